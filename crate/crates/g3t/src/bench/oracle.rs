//! Exact 2D shortest-path oracle: visibility graph over obstacle corners
//! inflated by 1e-9, Dijkstra over exactly checked visibility edges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::bench::env::BenchError;
use crate::space::{ProblemDef, State};

const INFLATE: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
struct Node {
    dist: f64,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Length of the shortest collision-free path from the start to the nearest
/// goal; infinity when disconnected. Exact up to the 1e-9 corner inflation.
pub fn shortest_path_oracle_2d(p: &ProblemDef) -> Result<f64, BenchError> {
    if p.dim() != 2 {
        return Err(BenchError::UnsupportedDimension(p.dim()));
    }

    // nodes: start, goals, then the inflated corners of every obstacle
    let mut nodes: Vec<State> = Vec::new();
    nodes.push(p.start().clone());
    let goal_range = 1..(1 + p.goals().len());
    nodes.extend(p.goals().iter().cloned());
    for b in p.obstacles() {
        let (x0, y0) = (b.min[0], b.min[1]);
        let (x1, y1) = (b.max[0], b.max[1]);
        for corner in [
            [x0 - INFLATE, y0 - INFLATE],
            [x1 + INFLATE, y0 - INFLATE],
            [x0 - INFLATE, y1 + INFLATE],
            [x1 + INFLATE, y1 + INFLATE],
        ] {
            if corner.iter().all(|c| (0.0..=1.0).contains(c))
                && p.point_in_free_coords(&corner)
            {
                nodes.push(State::new(corner.to_vec()));
            }
        }
    }

    // visibility edges via the exact segment test
    let n = nodes.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if p.segment_valid_unchecked(nodes[i].coords(), nodes[j].coords()) {
                let d = nodes[i].distance(&nodes[j]);
                adj[i].push((j, d));
                adj[j].push((i, d));
            }
        }
    }

    // Dijkstra from the start
    let mut dist = vec![f64::INFINITY; n];
    dist[0] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Node { dist: 0.0, id: 0 });
    while let Some(Node { dist: d, id }) = heap.pop() {
        if d > dist[id] {
            continue;
        }
        for &(next, w) in &adj[id] {
            let cand = d + w;
            if cand < dist[next] {
                dist[next] = cand;
                heap.push(Node {
                    dist: cand,
                    id: next,
                });
            }
        }
    }

    Ok(goal_range
        .map(|g| dist[g])
        .fold(f64::INFINITY, f64::min))
}
