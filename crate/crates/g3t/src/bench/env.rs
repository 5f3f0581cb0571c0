//! Benchmark world generators: dividing wall-gaps and random rectangles in
//! the unit hypercube, plus scene-file loading.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{AxisBox, ProblemDef, SpaceError, State};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("the oracle supports 2D problems only, got dimension {0}")]
    UnsupportedDimension(usize),
    #[error("obstacle generator gave up after {0} redraws")]
    GeneratorSaturated(usize),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Which world a trial runs in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EnvSpec {
    DividingWalls { dim: usize, variation: u32 },
    RandomRects { dim: usize, variation: u32, count: usize },
    File { path: String },
}

impl EnvSpec {
    pub fn family(&self) -> &'static str {
        match self {
            EnvSpec::DividingWalls { .. } => "dw",
            EnvSpec::RandomRects { .. } => "rr",
            EnvSpec::File { .. } => "file",
        }
    }

    pub fn build(&self) -> Result<ProblemDef, BenchError> {
        match self {
            EnvSpec::DividingWalls { dim, variation } => Ok(gen_dividing_walls(*dim, *variation)),
            EnvSpec::RandomRects {
                dim,
                variation,
                count,
            } => gen_random_rects(*dim, *variation as u64, *count),
            EnvSpec::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| SpaceError::InvalidProblem(e.to_string()))?;
                let p: ProblemDef = serde_json::from_str(&text)
                    .map_err(|e| SpaceError::InvalidProblem(e.to_string()))?;
                Ok(p)
            }
        }
    }
}

fn axis_point(dim: usize, x: f64) -> State {
    let mut coords = vec![0.5; dim];
    coords[0] = x;
    State::new(coords)
}

/// Start and goal shared by the generated benchmark worlds:
/// `(0.1, 0.5, ...)` and `(0.9, 0.5, ...)`.
pub fn bench_endpoints(dim: usize) -> (State, State) {
    (axis_point(dim, 0.1), axis_point(dim, 0.9))
}

/// A wall slab on the first axis, pierced by gaps along the second axis;
/// every further axis is spanned fully.
fn wall_boxes(dim: usize, x_lo: f64, x_hi: f64, gaps: &[(f64, f64)]) -> Vec<AxisBox> {
    let mut sorted = gaps.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut boxes = Vec::new();
    let mut y_cursor = 0.0;
    for &(g_lo, g_hi) in &sorted {
        if g_lo > y_cursor {
            boxes.push(segment_box(dim, x_lo, x_hi, y_cursor, g_lo));
        }
        y_cursor = g_hi;
    }
    if y_cursor < 1.0 {
        boxes.push(segment_box(dim, x_lo, x_hi, y_cursor, 1.0));
    }
    boxes
}

fn segment_box(dim: usize, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> AxisBox {
    let mut min = vec![0.0; dim];
    let mut max = vec![1.0; dim];
    min[0] = x_lo;
    max[0] = x_hi;
    min[1] = y_lo;
    max[1] = y_hi;
    AxisBox::new(State::new(min), State::new(max))
}

/// Dividing wall-gaps world: two walls of thickness 0.05 at x = 0.35 and
/// x = 0.65, each pierced by two gaps with heights drawn from [0.03, 0.125]
/// at positions seeded by the variation index. Ten canonical variations.
pub fn gen_dividing_walls(dim: usize, variation: u32) -> ProblemDef {
    assert!(dim >= 2, "dividing walls need at least two dimensions");
    let (start, goal) = bench_endpoints(dim);
    let mut obstacles = Vec::new();
    for (wall_idx, &x_lo) in [0.35f64, 0.65f64].iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(
            0x5eed_0000_0000u64 + variation as u64 * 64 + wall_idx as u64,
        );
        let gaps = draw_gaps(&mut rng, 2);
        obstacles.extend(wall_boxes(dim, x_lo, x_lo + 0.05, &gaps));
    }
    ProblemDef::new(dim, obstacles, start, vec![goal])
        .expect("wall endpoints are free by construction")
}

/// Draws `count` disjoint gaps `(lo, hi)` with heights uniform in
/// [0.03, 0.125], separated by at least 0.05 and clear of the cube edges.
fn draw_gaps<R: Rng>(rng: &mut R, count: usize) -> Vec<(f64, f64)> {
    loop {
        let mut gaps: Vec<(f64, f64)> = (0..count)
            .map(|_| {
                let h = rng.gen_range(0.03..0.125);
                let lo = rng.gen_range(0.02..(0.98 - h));
                (lo, lo + h)
            })
            .collect();
        gaps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let disjoint = gaps.windows(2).all(|w| w[1].0 - w[0].1 >= 0.05);
        if disjoint {
            return gaps;
        }
    }
}

/// Default obstacle counts for the random-rectangle worlds.
pub fn default_rect_count(dim: usize) -> usize {
    match dim {
        0..=2 => 75,
        3..=4 => 40,
        _ => 20,
    }
}

/// Random-rectangle world: `count` boxes with per-axis side lengths uniform
/// in [0.05, 0.4] and uniform centers, clipped to the cube. Boxes containing
/// the start or a goal are re-drawn, up to 1000 times each.
pub fn gen_random_rects(dim: usize, seed: u64, count: usize) -> Result<ProblemDef, BenchError> {
    assert!(dim >= 2, "random rectangles need at least two dimensions");
    let (start, goal) = bench_endpoints(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(0xabcd_0000u64 ^ seed);
    let mut obstacles = Vec::with_capacity(count);
    for _ in 0..count {
        let mut redraws = 0;
        loop {
            if redraws > 1000 {
                return Err(BenchError::GeneratorSaturated(redraws));
            }
            redraws += 1;
            let mut min = Vec::with_capacity(dim);
            let mut max = Vec::with_capacity(dim);
            for _ in 0..dim {
                let side = rng.gen_range(0.05..0.4);
                let center = rng.gen::<f64>();
                min.push((center - side / 2.0).max(0.0));
                max.push((center + side / 2.0).min(1.0));
            }
            let bx = AxisBox::new(State::new(min), State::new(max));
            if bx.contains(start.coords()) || bx.contains(goal.coords()) {
                continue;
            }
            obstacles.push(bx);
            break;
        }
    }
    Ok(ProblemDef::new(dim, obstacles, start, vec![goal])?)
}
