//! SVG scene renderer: obstacles, both trees, grafted edge-pairs, the beacon
//! with its greedy spheroids, and the solution path.

use std::fmt::Write as _;

use crate::bench::env::BenchError;
use crate::events::{EventRecord, PlannerEvent, SpheroidInfo};
use crate::space::ProblemDef;

const SCALE: f64 = 1000.0;

/// Renders an event log over its problem. Problems above two dimensions need
/// an explicit axis pair to project onto.
pub fn render_svg(
    events: &[EventRecord],
    p: &ProblemDef,
    project: Option<(usize, usize)>,
) -> Result<String, BenchError> {
    let (ax, ay) = match project {
        Some(axes) => axes,
        None if p.dim() == 2 => (0, 1),
        None => return Err(BenchError::UnsupportedDimension(p.dim())),
    };
    let px = |v: &[f64]| (v[ax], v[ay]);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SCALE as u64
    )
    .unwrap();
    // world frame: unit square with the y axis pointing up
    writeln!(
        svg,
        r#"<g transform="translate(0,{s}) scale({s},-{s})">"#,
        s = SCALE as u64
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect x="0" y="0" width="1" height="1" fill="white" stroke="black" stroke-width="0.002"/>"#
    )
    .unwrap();

    for b in p.obstacles() {
        let (x0, y0) = px(b.min.coords());
        let (x1, y1) = px(b.max.coords());
        writeln!(
            svg,
            r##"<rect class="obstacle" x="{x0}" y="{y0}" width="{w}" height="{h}" fill="#bbbbbb"/>"##,
            w = x1 - x0,
            h = y1 - y0,
        )
        .unwrap();
    }

    let mut reverse_edges: &[(Vec<f64>, Vec<f64>)] = &[];
    let mut forward_edges = Vec::new();
    let mut grafts = Vec::new();
    let mut beacon: Option<(&Vec<f64>, &Option<SpheroidInfo>, &Option<SpheroidInfo>)> = None;
    let mut solution: Option<&Vec<Vec<f64>>> = None;
    for rec in events {
        match &rec.event {
            PlannerEvent::ReverseTree { edges } => reverse_edges = edges,
            PlannerEvent::EdgeAccept { source, target, .. } => {
                forward_edges.push((source, target))
            }
            PlannerEvent::GraftSuccess {
                source, via, target, ..
            } => grafts.push((source, via, target)),
            PlannerEvent::Beacon {
                beacon: b,
                front,
                back,
                ..
            } => beacon = Some((b, front, back)),
            PlannerEvent::Solution { vertices, .. } => solution = Some(vertices),
            _ => {}
        }
    }

    for (a, b) in reverse_edges {
        let (x0, y0) = px(a);
        let (x1, y1) = px(b);
        writeln!(
            svg,
            r##"<line class="reverse" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#2e8b57" stroke-width="0.001" opacity="0.6"/>"##
        )
        .unwrap();
    }
    for (a, b) in &forward_edges {
        let (x0, y0) = px(a);
        let (x1, y1) = px(b);
        writeln!(
            svg,
            r##"<line class="forward" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#e07020" stroke-width="0.0015" opacity="0.8"/>"##
        )
        .unwrap();
    }
    for (s, v, t) in &grafts {
        for (a, b) in [(s, v), (v, t)] {
            let (x0, y0) = px(a);
            let (x1, y1) = px(b);
            writeln!(
                svg,
                r##"<line class="graft" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#c000c0" stroke-width="0.003"/>"##
            )
            .unwrap();
        }
    }

    if let Some((b, front, back)) = beacon {
        for sph in [front, back].into_iter().flatten() {
            let (fx0, fy0) = px(&sph.focus_a);
            let (fx1, fy1) = px(&sph.focus_b);
            let cx = (fx0 + fx1) / 2.0;
            let cy = (fy0 + fy1) / 2.0;
            let rx = sph.transverse_cost / 2.0;
            let ry = (sph.transverse_cost * sph.transverse_cost - sph.c_min * sph.c_min)
                .max(0.0)
                .sqrt()
                / 2.0;
            let angle = (fy1 - fy0).atan2(fx1 - fx0).to_degrees();
            writeln!(
                svg,
                r##"<ellipse class="spheroid" cx="0" cy="0" rx="{rx}" ry="{ry}" transform="translate({cx},{cy}) rotate({angle})" fill="none" stroke="#4060d0" stroke-width="0.002"/>"##
            )
            .unwrap();
        }
        let (bx, by) = px(b);
        writeln!(
            svg,
            r##"<circle class="beacon" cx="{bx}" cy="{by}" r="0.008" fill="#10a010"/>"##
        )
        .unwrap();
    }

    if let Some(vertices) = solution {
        let points: Vec<String> = vertices
            .iter()
            .map(|v| {
                let (x, y) = px(v);
                format!("{x},{y}")
            })
            .collect();
        writeln!(
            svg,
            r##"<polyline class="solution" points="{}" fill="none" stroke="#d02020" stroke-width="0.004"/>"##,
            points.join(" ")
        )
        .unwrap();
    }

    let (sx, sy) = px(p.start().coords());
    writeln!(
        svg,
        r##"<circle class="start" cx="{sx}" cy="{sy}" r="0.01" fill="#008000"/>"##
    )
    .unwrap();
    for g in p.goals() {
        let (gx, gy) = px(g.coords());
        writeln!(
            svg,
            r##"<circle class="goal" cx="{gx}" cy="{gy}" r="0.01" fill="#800080"/>"##
        )
        .unwrap();
    }

    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}
