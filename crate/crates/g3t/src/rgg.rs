//! Batched sample store over an implicit random geometric graph: shrinking
//! connection radius, exact radius-neighbor queries, and pruning.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{dist, phs_measure, unit_ball_measure, AxisBox, ProblemDef, State};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RggError {
    #[error("radius needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid radius parameters: {0}")]
    InvalidParams(String),
}

/// Inputs to the connection-radius formula.
#[derive(Clone, Copy, Debug)]
pub struct RadiusParams {
    pub eta: f64,
    pub dim: usize,
    pub measure_min: f64,
    pub rewire_factor: f64,
}

impl RadiusParams {
    pub fn new(
        eta: f64,
        dim: usize,
        measure_min: f64,
        rewire_factor: f64,
    ) -> Result<Self, RggError> {
        if !(eta > 1.0) {
            return Err(RggError::InvalidParams(format!("eta must exceed 1, got {eta}")));
        }
        if dim == 0 {
            return Err(RggError::InvalidParams("dimension must be positive".into()));
        }
        if !(measure_min > 0.0 && measure_min <= 1.0) {
            return Err(RggError::InvalidParams(format!(
                "measure_min must lie in (0, 1], got {measure_min}"
            )));
        }
        if !(rewire_factor >= 1.0) {
            return Err(RggError::InvalidParams(format!(
                "rewire factor must be at least 1, got {rewire_factor}"
            )));
        }
        Ok(RadiusParams {
            eta,
            dim,
            measure_min,
            rewire_factor,
        })
    }
}

/// Scaling factor `gamma = 2 * eta * (1 + 1/n)^(1/n) * (measure_min / B_{1,n})^(1/n)`.
pub fn gamma(params: &RadiusParams) -> f64 {
    let n = params.dim as f64;
    let b = unit_ball_measure(params.dim).expect("dim validated positive");
    2.0 * params.eta * (1.0 + 1.0 / n).powf(1.0 / n) * (params.measure_min / b).powf(1.0 / n)
}

/// Connection radius `rewire_factor * gamma * (ln m / m)^(1/n)`; natural log.
pub fn rgg_radius(m: usize, params: &RadiusParams) -> Result<f64, RggError> {
    if m < 2 {
        return Err(RggError::TooFewSamples(m));
    }
    let n = params.dim as f64;
    Ok(params.rewire_factor * gamma(params) * ((m as f64).ln() / m as f64).powf(1.0 / n))
}

/// Connectivity threshold `gamma* = 2 * (2n * B_{1,n})^(-1/n)`; graphs with
/// `gamma > gamma*` are asymptotically connected.
pub fn gamma_star(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    let b = unit_ball_measure(n).unwrap();
    2.0 * (2.0 * n as f64 * b).powf(-1.0 / n as f64)
}

/// Free-space measure estimate: unit-cube volume minus clipped obstacle
/// volumes, with pairwise inclusion-exclusion for overlaps, clamped to (0, 1].
pub fn free_measure_estimate(p: &ProblemDef) -> f64 {
    let obs = p.obstacles();
    let mut blocked: f64 = obs.iter().map(|b| b.volume()).sum();
    for i in 0..obs.len() {
        for j in (i + 1)..obs.len() {
            if let Some(overlap) = obs[i].intersect(&obs[j]) {
                blocked -= overlap.volume();
            }
        }
    }
    (1.0 - blocked).clamp(1e-9, 1.0)
}

/// Measure used in the radius formula: the free-space estimate before any
/// solution exists, afterwards the smaller of it and the informed-set
/// spheroid measure at the current cost.
pub fn radius_measure(p: &ProblemDef, current_cost: Option<f64>) -> f64 {
    let free = free_measure_estimate(p);
    match current_cost {
        Some(c) if c.is_finite() => {
            let c_min = p.min_cost();
            let informed = phs_measure(c.max(c_min), c_min, p.dim()).unwrap_or(free);
            free.min(informed).clamp(1e-9, 1.0)
        }
        _ => free,
    }
}

/// Stable identifier of a stored vertex. Ids are never reused within a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Uniform-grid bucket index for exact radius queries. Rebuilt whenever the
/// query radius changes; falls back to a single bucket for large radii.
#[derive(Clone, Debug, Default)]
struct GridIndex {
    cell: f64,
    buckets: HashMap<Vec<i32>, Vec<usize>>,
}

impl GridIndex {
    fn key(&self, coords: &[f64]) -> Vec<i32> {
        coords.iter().map(|&c| (c / self.cell).floor() as i32).collect()
    }

    fn insert(&mut self, id: usize, coords: &[f64]) {
        let key = self.key(coords);
        self.buckets.entry(key).or_default().push(id);
    }
}

/// Indexed vertex set with radius-based neighbor queries. Single writer;
/// pruned slots stay allocated so ids remain stable.
#[derive(Clone, Debug)]
pub struct SampleStore {
    dim: usize,
    points: Vec<Option<State>>,
    alive: usize,
    grid: GridIndex,
}

impl SampleStore {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        SampleStore {
            dim,
            points: Vec::new(),
            alive: 0,
            grid: GridIndex {
                cell: 1.0,
                buckets: HashMap::new(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of live (non-pruned) vertices.
    pub fn len(&self) -> usize {
        self.alive
    }

    pub fn is_empty(&self) -> bool {
        self.alive == 0
    }

    /// Total ids ever issued, including pruned ones.
    pub fn capacity_ids(&self) -> usize {
        self.points.len()
    }

    pub fn state(&self, id: VertexId) -> &State {
        self.points[id.0].as_ref().expect("vertex was pruned")
    }

    pub fn get(&self, id: VertexId) -> Option<&State> {
        self.points.get(id.0).and_then(|p| p.as_ref())
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.as_ref().map(|_| VertexId(i)))
    }

    /// Inserts states with fresh ids, in order; duplicates get distinct ids.
    pub fn add_batch(&mut self, states: &[State]) -> Vec<VertexId> {
        let mut ids = Vec::with_capacity(states.len());
        for st in states {
            assert_eq!(st.dim(), self.dim, "state dimension mismatch");
            let id = self.points.len();
            self.grid.insert(id, st.coords());
            self.points.push(Some(st.clone()));
            self.alive += 1;
            ids.push(VertexId(id));
        }
        ids
    }

    /// Sizes grid cells for radius-`r` queries and rebuilds the buckets.
    pub fn set_query_radius(&mut self, r: f64) {
        assert!(r > 0.0);
        self.grid = GridIndex {
            cell: r.min(1.0),
            buckets: HashMap::new(),
        };
        for (i, p) in self.points.iter().enumerate() {
            if let Some(st) = p {
                let key = self.grid.key(st.coords());
                self.grid.buckets.entry(key).or_default().push(i);
            }
        }
    }

    fn gather_candidates(&self, center: &[f64], r: f64, out: &mut Vec<usize>) {
        out.clear();
        let cell = self.grid.cell;
        let lo: Vec<i32> = center
            .iter()
            .map(|&c| (((c - r).max(0.0)) / cell).floor() as i32)
            .collect();
        let hi: Vec<i32> = center
            .iter()
            .map(|&c| (((c + r).min(1.0)) / cell).floor() as i32)
            .collect();
        let mut key = lo.clone();
        loop {
            if let Some(bucket) = self.grid.buckets.get(key.as_slice()) {
                out.extend_from_slice(bucket);
            }
            // odometer increment over the cell ranges
            let mut axis = 0;
            loop {
                if axis == key.len() {
                    return;
                }
                key[axis] += 1;
                if key[axis] <= hi[axis] {
                    break;
                }
                key[axis] = lo[axis];
                axis += 1;
            }
        }
    }

    /// All stored vertices within Euclidean distance `r` of `v`, excluding
    /// any vertex at distance zero. Sorted ascending by distance, ties by id.
    pub fn neighbors(&self, v: &State, r: f64) -> Vec<VertexId> {
        assert!(r > 0.0);
        let mut candidates = Vec::new();
        self.gather_candidates(v.coords(), r, &mut candidates);
        let mut hits: Vec<(f64, usize)> = candidates
            .into_iter()
            .filter_map(|i| {
                let d = dist(self.points[i].as_ref().unwrap().coords(), v.coords());
                (d > 0.0 && d <= r).then_some((d, i))
            })
            .collect();
        hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        hits.into_iter().map(|(_, i)| VertexId(i)).collect()
    }

    /// Neighbors of a stored vertex (the vertex itself is excluded).
    pub fn neighbors_of(&self, id: VertexId, r: f64) -> Vec<VertexId> {
        self.neighbors(self.state(id), r)
    }

    /// Intersection of the two radius neighborhoods, sorted by id. Neither
    /// endpoint is its own common neighbor.
    pub fn common_neighbors(&self, v_s: &State, v_t: &State, r: f64) -> Vec<VertexId> {
        let ns = self.neighbors(v_s, r);
        let nt: HashSet<VertexId> = self.neighbors(v_t, r).into_iter().collect();
        let mut common: Vec<VertexId> = ns.into_iter().filter(|id| nt.contains(id)).collect();
        common.sort();
        common
    }

    /// Removes every vertex whose admissible total estimate
    /// `|v - start| + min_goal |goal - v|` is at least `c_curr`, except ids
    /// in `keep`. Returns the removed ids.
    pub fn prune(&mut self, p: &ProblemDef, c_curr: f64, keep: &HashSet<VertexId>) -> Vec<VertexId> {
        let mut removed = Vec::new();
        for i in 0..self.points.len() {
            let Some(st) = &self.points[i] else { continue };
            if keep.contains(&VertexId(i)) {
                continue;
            }
            let f_hat = st.distance(p.start()) + p.min_goal_distance(st);
            if f_hat >= c_curr {
                self.points[i] = None;
                self.alive -= 1;
                removed.push(VertexId(i));
            }
        }
        if !removed.is_empty() {
            let cell = self.grid.cell;
            self.set_query_radius(cell);
        }
        removed
    }
}
