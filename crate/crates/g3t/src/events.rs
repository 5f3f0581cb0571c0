//! Line-delimited event log emitted by the planner, consumed by the SVG
//! renderer and the determinism checks.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

/// Spheroid parameters as logged for rendering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpheroidInfo {
    pub focus_a: Vec<f64>,
    pub focus_b: Vec<f64>,
    pub transverse_cost: f64,
    pub c_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", content = "data", rename_all = "kebab-case")]
pub enum PlannerEvent {
    /// New sampling batch: store size, radius, and the allocation decision.
    Batch {
        index: u64,
        samples_added: usize,
        store_size: usize,
        radius: f64,
        level: u32,
        m_g2: usize,
        m_informed: usize,
        cci: Option<f64>,
        hci: Option<f64>,
        pruned: usize,
    },
    /// Reverse-tree edges (child, parent) after a lazy reverse search.
    ReverseTree { edges: Vec<(Vec<f64>, Vec<f64>)> },
    EdgeAccept {
        source_id: usize,
        target_id: usize,
        source: Vec<f64>,
        target: Vec<f64>,
    },
    EdgeInvalid {
        source_id: usize,
        target_id: usize,
        source: Vec<f64>,
        target: Vec<f64>,
    },
    GraftSuccess {
        source_id: usize,
        via_id: usize,
        target_id: usize,
        source: Vec<f64>,
        via: Vec<f64>,
        target: Vec<f64>,
        key_cost: f64,
    },
    GraftFail {
        source_id: usize,
        target_id: usize,
        candidates: usize,
    },
    Solution {
        cost: f64,
        full_checks: u64,
        vertices: Vec<Vec<f64>>,
    },
    /// Beacon and greedy spheroids recomputed after a solution improvement.
    Beacon {
        beacon: Vec<f64>,
        front: Option<SpheroidInfo>,
        back: Option<SpheroidInfo>,
        greedy_front_vertex: Vec<f64>,
        greedy_back_vertex: Vec<f64>,
    },
}

/// One log line: the event plus the forward-search iteration it occurred at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    #[serde(flatten)]
    pub event: PlannerEvent,
    pub iteration: u64,
}

/// Writes records as JSON lines.
pub fn write_jsonl<W: Write>(records: &[EventRecord], mut out: W) -> std::io::Result<()> {
    for rec in records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads records from a JSON-lines stream, skipping blank lines.
pub fn read_jsonl<R: BufRead>(input: R) -> std::io::Result<Vec<EventRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip() {
        let records = vec![
            EventRecord {
                event: PlannerEvent::Batch {
                    index: 0,
                    samples_added: 100,
                    store_size: 102,
                    radius: 0.3,
                    level: 1,
                    m_g2: 0,
                    m_informed: 0,
                    cci: None,
                    hci: None,
                    pruned: 0,
                },
                iteration: 0,
            },
            EventRecord {
                event: PlannerEvent::Solution {
                    cost: 0.95,
                    full_checks: 42,
                    vertices: vec![vec![0.1, 0.5], vec![0.9, 0.5]],
                },
                iteration: 17,
            },
        ];
        let mut buf = Vec::new();
        write_jsonl(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().next().unwrap().contains("\"event\":\"batch\""));
        let back = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }
}
