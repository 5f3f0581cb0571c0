//! Geometric primitives: states in the unit hypercube, axis-aligned box
//! obstacles, exact and sparse collision checks, and prolate-hyperspheroid
//! math with uniform sampling.

use std::f64::consts::PI;
use std::ops::Index;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by geometric primitives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },
    #[error("transverse cost {cost} is below the focal distance {c_min}")]
    DegenerateSpheroid { cost: f64, c_min: f64 },
    #[error("focal axis is degenerate: the foci coincide")]
    DegenerateAxis,
    #[error("segment endpoint lies in collision")]
    InvalidEndpoint,
    #[error("rejection sampling exhausted after {attempts} attempts")]
    SpaceSaturated { attempts: u64 },
    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),
}

/// A point in `[0,1]^n`. Coordinates are finite by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(Vec<f64>);

impl State {
    /// Panics if `coords` is empty or contains a non-finite value.
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(
            !coords.is_empty() && coords.iter().all(|c| c.is_finite()),
            "state coordinates must be non-empty and finite"
        );
        State(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &State) -> f64 {
        dist(&self.0, &other.0)
    }
}

impl Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for State {
    fn from(coords: Vec<f64>) -> Self {
        State::new(coords)
    }
}

/// Euclidean distance between coordinate slices.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Total cost of a polyline: sum of consecutive Euclidean segment lengths.
pub fn polyline_cost(vertices: &[State]) -> f64 {
    vertices
        .windows(2)
        .map(|w| w[0].distance(&w[1]))
        .sum::<f64>()
}

/// Closed axis-aligned hyperrectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub min: State,
    pub max: State,
}

impl AxisBox {
    /// Panics if dimensions differ or `min[i] > max[i]` for some axis.
    pub fn new(min: State, max: State) -> Self {
        assert_eq!(min.dim(), max.dim(), "box corner dimensions must match");
        assert!(
            min.coords().iter().zip(max.coords()).all(|(a, b)| a <= b),
            "box min must not exceed max on any axis"
        );
        AxisBox { min, max }
    }

    pub fn dim(&self) -> usize {
        self.min.dim()
    }

    /// Closed containment: boundary points count as inside.
    pub fn contains(&self, v: &[f64]) -> bool {
        v.iter()
            .enumerate()
            .all(|(i, &c)| c >= self.min[i] && c <= self.max[i])
    }

    pub fn volume(&self) -> f64 {
        self.min
            .coords()
            .iter()
            .zip(self.max.coords())
            .map(|(a, b)| b - a)
            .product()
    }

    /// Intersection with the unit hypercube; `None` if empty.
    pub fn clip_to_unit_cube(&self) -> Option<AxisBox> {
        let min: Vec<f64> = self.min.coords().iter().map(|c| c.max(0.0)).collect();
        let max: Vec<f64> = self.max.coords().iter().map(|c| c.min(1.0)).collect();
        if min.iter().zip(&max).all(|(a, b)| a <= b) {
            Some(AxisBox::new(State::new(min), State::new(max)))
        } else {
            None
        }
    }

    /// Intersection of two boxes; `None` if they do not overlap.
    pub fn intersect(&self, other: &AxisBox) -> Option<AxisBox> {
        let min: Vec<f64> = self
            .min
            .coords()
            .iter()
            .zip(other.min.coords())
            .map(|(a, b)| a.max(*b))
            .collect();
        let max: Vec<f64> = self
            .max
            .coords()
            .iter()
            .zip(other.max.coords())
            .map(|(a, b)| a.min(*b))
            .collect();
        if min.iter().zip(&max).all(|(a, b)| a <= b) {
            Some(AxisBox::new(State::new(min), State::new(max)))
        } else {
            None
        }
    }
}

/// Scene-file schema: planning problem in `[0,1]^n` with box obstacles.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct ProblemDef {
    dim: usize,
    obstacles: Vec<AxisBox>,
    start: State,
    goals: Vec<State>,
}

/// Raw JSON shape of a scene file.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct SceneFile {
    dim: usize,
    start: Vec<f64>,
    goals: Vec<Vec<f64>>,
    obstacles: Vec<AxisBox>,
}

impl TryFrom<SceneFile> for ProblemDef {
    type Error = SpaceError;
    fn try_from(s: SceneFile) -> Result<Self, SpaceError> {
        let goals = s.goals.into_iter().map(State::from).collect();
        ProblemDef::new(s.dim, s.obstacles, State::from(s.start), goals)
    }
}

impl From<ProblemDef> for SceneFile {
    fn from(p: ProblemDef) -> SceneFile {
        SceneFile {
            dim: p.dim,
            start: p.start.coords().to_vec(),
            goals: p.goals.iter().map(|g| g.coords().to_vec()).collect(),
            obstacles: p.obstacles,
        }
    }
}

impl ProblemDef {
    /// Obstacles are clipped to the unit cube; start and every goal must be
    /// collision-free.
    pub fn new(
        dim: usize,
        obstacles: Vec<AxisBox>,
        start: State,
        goals: Vec<State>,
    ) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::InvalidDimension);
        }
        if start.dim() != dim {
            return Err(SpaceError::DimensionError {
                expected: dim,
                got: start.dim(),
            });
        }
        if goals.is_empty() {
            return Err(SpaceError::InvalidProblem("at least one goal required".into()));
        }
        for g in &goals {
            if g.dim() != dim {
                return Err(SpaceError::DimensionError {
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        for b in &obstacles {
            if b.dim() != dim {
                return Err(SpaceError::DimensionError {
                    expected: dim,
                    got: b.dim(),
                });
            }
        }
        let obstacles: Vec<AxisBox> =
            obstacles.iter().filter_map(|b| b.clip_to_unit_cube()).collect();
        let p = ProblemDef {
            dim,
            obstacles,
            start,
            goals,
        };
        if !p.point_in_free(&p.start) {
            return Err(SpaceError::InvalidProblem("start is in collision".into()));
        }
        for g in &p.goals {
            if !p.point_in_free(g) {
                return Err(SpaceError::InvalidProblem("goal is in collision".into()));
            }
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn obstacles(&self) -> &[AxisBox] {
        &self.obstacles
    }

    pub fn start(&self) -> &State {
        &self.start
    }

    pub fn goals(&self) -> &[State] {
        &self.goals
    }

    /// Straight-line lower bound on any solution cost: distance from the
    /// start to the nearest goal.
    pub fn min_cost(&self) -> f64 {
        self.goals
            .iter()
            .map(|g| g.distance(&self.start))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `v` to the nearest goal.
    pub fn min_goal_distance(&self, v: &State) -> f64 {
        self.goals
            .iter()
            .map(|g| g.distance(v))
            .fold(f64::INFINITY, f64::min)
    }

    /// True iff `v` lies inside the closed unit cube and outside every
    /// (closed) obstacle. Boundary contact with an obstacle is a collision.
    pub fn point_in_free(&self, v: &State) -> bool {
        self.point_in_free_coords(v.coords())
    }

    pub(crate) fn point_in_free_coords(&self, v: &[f64]) -> bool {
        if v.iter().any(|&c| !(0.0..=1.0).contains(&c)) {
            return false;
        }
        !self.obstacles.iter().any(|b| b.contains(v))
    }

    /// Exact segment check (slab / parametric interval clipping) against
    /// every closed obstacle. Errors if either endpoint is in collision.
    pub fn segment_valid(&self, a: &State, b: &State) -> Result<bool, SpaceError> {
        if !self.point_in_free(a) || !self.point_in_free(b) {
            return Err(SpaceError::InvalidEndpoint);
        }
        Ok(self.segment_valid_unchecked(a.coords(), b.coords()))
    }

    /// Slab test assuming both endpoints are already known collision-free.
    pub(crate) fn segment_valid_unchecked(&self, a: &[f64], b: &[f64]) -> bool {
        !self
            .obstacles
            .iter()
            .any(|bx| segment_hits_box(a, b, bx))
    }

    /// Sparse segment check at the given resolution level: evaluates
    /// `point_in_free` at both endpoints plus `2^level - 1` evenly spaced
    /// interior points. One-sided: `false` implies the segment is invalid,
    /// `true` proves nothing.
    pub fn sparse_segment_check(&self, a: &State, b: &State, level: u32) -> bool {
        assert!(level >= 1, "resolution level must be at least 1");
        let steps = 1u64 << level;
        let (ac, bc) = (a.coords(), b.coords());
        let mut point = vec![0.0; self.dim];
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            for i in 0..self.dim {
                point[i] = ac[i] + t * (bc[i] - ac[i]);
            }
            if !self.point_in_free_coords(&point) {
                return false;
            }
        }
        true
    }

    /// Number of interior points the sparse check evaluates at `level`.
    pub fn sparse_check_effort(level: u32) -> f64 {
        ((1u64 << level) - 1) as f64
    }

    /// Incremental sparse check for endpoints already known collision-free:
    /// evaluates only the interior points levels `from_level+1..=to_level`
    /// add over `from_level` (the odd numerators `k / 2^lvl`). With
    /// `from_level = 0` this covers exactly the interior points of
    /// `sparse_segment_check(to_level)`.
    pub(crate) fn sparse_check_increment(
        &self,
        a: &[f64],
        b: &[f64],
        from_level: u32,
        to_level: u32,
    ) -> bool {
        debug_assert!(from_level < to_level);
        let mut point = vec![0.0; self.dim];
        for lvl in (from_level + 1)..=to_level {
            let steps = 1u64 << lvl;
            for k in (1..steps).step_by(2) {
                let t = k as f64 / steps as f64;
                for i in 0..self.dim {
                    point[i] = a[i] + t * (b[i] - a[i]);
                }
                if !self.point_in_free_coords(&point) {
                    return false;
                }
            }
        }
        true
    }

    /// Rejection sampling over the unit cube: exactly `count` collision-free
    /// states, or `SpaceSaturated` after `10^6 * count` attempts.
    pub fn sample_free_uniform<R: Rng>(
        &self,
        rng: &mut R,
        count: usize,
    ) -> Result<Vec<State>, SpaceError> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return Ok(out);
        }
        let max_attempts = 1_000_000u64 * count as u64;
        let mut attempts = 0u64;
        while out.len() < count {
            if attempts >= max_attempts {
                return Err(SpaceError::SpaceSaturated { attempts });
            }
            attempts += 1;
            let v: Vec<f64> = (0..self.dim).map(|_| rng.gen::<f64>()).collect();
            if self.point_in_free_coords(&v) {
                out.push(State::new(v));
            }
        }
        Ok(out)
    }
}

/// True iff the closed segment `a..b` meets the closed box (boundary contact
/// counts). Parametric interval clipping per axis.
fn segment_hits_box(a: &[f64], b: &[f64], bx: &AxisBox) -> bool {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for i in 0..a.len() {
        let d = b[i] - a[i];
        if d == 0.0 {
            if a[i] < bx.min[i] || a[i] > bx.max[i] {
                return false;
            }
        } else {
            let mut ta = (bx.min[i] - a[i]) / d;
            let mut tb = (bx.max[i] - a[i]) / d;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Lebesgue measure of the n-dimensional unit ball,
/// `B_{1,n} = pi^{n/2} / Gamma(n/2 + 1)`, via the exact two-step recurrence
/// `B_n = B_{n-2} * 2*pi / n`.
pub fn unit_ball_measure(n: usize) -> Result<f64, SpaceError> {
    if n == 0 {
        return Err(SpaceError::InvalidDimension);
    }
    let mut b = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = n % 2;
    while k < n {
        k += 2;
        b *= 2.0 * PI / k as f64;
    }
    Ok(b)
}

/// Hypervolume of the prolate hyperspheroid with transverse diameter `c` and
/// focal distance `c_min`:
/// `c * (c^2 - c_min^2)^((n-1)/2) * B_{1,n} / 2^n`, zero iff `c == c_min`.
pub fn phs_measure(c: f64, c_min: f64, n: usize) -> Result<f64, SpaceError> {
    if n == 0 {
        return Err(SpaceError::InvalidDimension);
    }
    if c < c_min {
        return Err(SpaceError::DegenerateSpheroid { cost: c, c_min });
    }
    if c == c_min {
        return Ok(0.0);
    }
    let b = unit_ball_measure(n)?;
    Ok(c * (c * c - c_min * c_min).powf((n as f64 - 1.0) / 2.0) * b / 2f64.powi(n as i32))
}

/// Orthonormal basis whose first column is a prescribed unit axis.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    cols: Vec<Vec<f64>>,
}

impl OrthonormalBasis {
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    /// World-frame image of local coordinates `y`: `sum_j cols[j] * y[j]`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (j, col) in self.cols.iter().enumerate() {
            for i in 0..n {
                out[i] += col[i] * y[j];
            }
        }
        out
    }
}

/// Orthonormal basis with first column `(b - a) / |b - a|`, completed by
/// Gram-Schmidt over the standard basis vectors in index order, skipping
/// candidates whose residual norm falls below 1e-9.
pub fn focal_basis(a: &State, b: &State) -> Result<OrthonormalBasis, SpaceError> {
    if a.dim() != b.dim() {
        return Err(SpaceError::DimensionError {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let n = a.dim();
    let norm = a.distance(b);
    if norm == 0.0 {
        return Err(SpaceError::DegenerateAxis);
    }
    let axis: Vec<f64> = a
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (y - x) / norm)
        .collect();
    let mut cols = vec![axis];
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        // two projection passes keep the result orthonormal well below 1e-9
        for _ in 0..2 {
            for col in &cols {
                let dot: f64 = v.iter().zip(col).map(|(x, y)| x * y).sum();
                for (vc, cc) in v.iter_mut().zip(col) {
                    *vc -= dot * cc;
                }
            }
        }
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 1e-9 {
            for vc in v.iter_mut() {
                *vc /= vnorm;
            }
            cols.push(v);
        }
    }
    debug_assert_eq!(cols.len(), n);
    Ok(OrthonormalBasis { cols })
}

/// Prolate hyperspheroid: the set of states whose summed distance to the two
/// foci is strictly below the transverse cost.
#[derive(Clone, Debug)]
pub struct ProlateHyperspheroid {
    focus_a: State,
    focus_b: State,
    transverse_cost: f64,
    c_min: f64,
    center: Vec<f64>,
    basis: OrthonormalBasis,
}

impl ProlateHyperspheroid {
    pub fn new(focus_a: State, focus_b: State, transverse_cost: f64) -> Result<Self, SpaceError> {
        if focus_a.dim() != focus_b.dim() {
            return Err(SpaceError::DimensionError {
                expected: focus_a.dim(),
                got: focus_b.dim(),
            });
        }
        let c_min = focus_a.distance(&focus_b);
        if c_min == 0.0 {
            return Err(SpaceError::DegenerateAxis);
        }
        if transverse_cost < c_min {
            return Err(SpaceError::DegenerateSpheroid {
                cost: transverse_cost,
                c_min,
            });
        }
        let basis = focal_basis(&focus_a, &focus_b)?;
        let center: Vec<f64> = focus_a
            .coords()
            .iter()
            .zip(focus_b.coords())
            .map(|(x, y)| (x + y) / 2.0)
            .collect();
        Ok(ProlateHyperspheroid {
            focus_a,
            focus_b,
            transverse_cost,
            c_min,
            center,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.focus_a.dim()
    }

    pub fn focus_a(&self) -> &State {
        &self.focus_a
    }

    pub fn focus_b(&self) -> &State {
        &self.focus_b
    }

    pub fn transverse_cost(&self) -> f64 {
        self.transverse_cost
    }

    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    /// Transverse semi-axis `c / 2`.
    pub fn semi_axis_major(&self) -> f64 {
        self.transverse_cost / 2.0
    }

    /// Conjugate semi-axis `sqrt(c^2 - c_min^2) / 2`.
    pub fn semi_axis_minor(&self) -> f64 {
        (self.transverse_cost * self.transverse_cost - self.c_min * self.c_min).sqrt() / 2.0
    }

    pub fn measure(&self) -> f64 {
        phs_measure(self.transverse_cost, self.c_min, self.dim())
            .expect("construction enforces c >= c_min")
    }

    /// Strict membership: focal-distance sum below the transverse cost.
    pub fn contains(&self, v: &State) -> Result<bool, SpaceError> {
        if v.dim() != self.dim() {
            return Err(SpaceError::DimensionError {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(self.contains_coords(v.coords()))
    }

    pub(crate) fn contains_coords(&self, v: &[f64]) -> bool {
        dist(v, self.focus_a.coords()) + dist(v, self.focus_b.coords()) < self.transverse_cost
    }

    /// Uniform sample over the spheroid volume: uniform unit-ball draw scaled
    /// by the semi-axes, rotated into the focal frame, translated to the
    /// center. Every returned state satisfies `contains`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<State, SpaceError> {
        if self.transverse_cost <= self.c_min {
            return Err(SpaceError::DegenerateSpheroid {
                cost: self.transverse_cost,
                c_min: self.c_min,
            });
        }
        let n = self.dim();
        let major = self.semi_axis_major();
        let minor = self.semi_axis_minor();
        loop {
            let mut y = sample_unit_ball(rng, n);
            y[0] *= major;
            for c in y.iter_mut().skip(1) {
                *c *= minor;
            }
            let mut world = self.basis.apply(&y);
            for (w, c) in world.iter_mut().zip(&self.center) {
                *w += c;
            }
            // boundary draws have probability zero; redraw keeps the strict
            // membership postcondition unconditional
            if self.contains_coords(&world) {
                return Ok(State::new(world));
            }
        }
    }
}

/// Uniform draw from the unit n-ball: Gaussian direction, radius `u^{1/n}`.
pub(crate) fn sample_unit_ball<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = standard_normals(rng, n);
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let r = rng.gen::<f64>().powf(1.0 / n as f64);
            return g.into_iter().map(|x| x * r / norm).collect();
        }
    }
}

/// Box-Muller standard normals.
fn standard_normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u1 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let u2 = rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        out.push(r * theta.cos());
        if out.len() < n {
            out.push(r * theta.sin());
        }
    }
    out
}

/// Collision-free polyline from the start to a goal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub vertices: Vec<State>,
    pub cost: f64,
}

impl SolutionPath {
    pub fn from_vertices(vertices: Vec<State>) -> Self {
        let cost = polyline_cost(&vertices);
        SolutionPath { vertices, cost }
    }

    /// Independent re-validation: endpoints match the problem, every segment
    /// passes the exact check, and the stored cost equals the recomputed sum.
    pub fn validate(&self, p: &ProblemDef) -> Result<(), SpaceError> {
        let first = self
            .vertices
            .first()
            .ok_or_else(|| SpaceError::InvalidProblem("empty path".into()))?;
        let last = self.vertices.last().unwrap();
        if first != p.start() {
            return Err(SpaceError::InvalidProblem("path does not begin at start".into()));
        }
        if !p.goals().iter().any(|g| g == last) {
            return Err(SpaceError::InvalidProblem("path does not end at a goal".into()));
        }
        for w in self.vertices.windows(2) {
            if !p.segment_valid(&w[0], &w[1])? {
                return Err(SpaceError::InvalidProblem("path segment in collision".into()));
            }
        }
        let recomputed = polyline_cost(&self.vertices);
        if (recomputed - self.cost).abs() > 1e-9 {
            return Err(SpaceError::InvalidProblem("stored cost mismatch".into()));
        }
        if self.cost < first.distance(last) - 1e-12 {
            return Err(SpaceError::InvalidProblem("cost below chord length".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(coords: &[f64]) -> State {
        State::new(coords.to_vec())
    }

    fn empty_world(dim: usize) -> ProblemDef {
        let mut start = vec![0.5; dim];
        let mut goal = vec![0.5; dim];
        start[0] = 0.1;
        goal[0] = 0.9;
        ProblemDef::new(dim, vec![], s(&start), vec![s(&goal)]).unwrap()
    }

    fn world_with(dim: usize, obstacles: Vec<AxisBox>) -> ProblemDef {
        let mut start = vec![0.5; dim];
        let mut goal = vec![0.5; dim];
        start[0] = 0.1;
        goal[0] = 0.9;
        ProblemDef::new(dim, obstacles, s(&start), vec![s(&goal)]).unwrap()
    }

    fn bx(min: &[f64], max: &[f64]) -> AxisBox {
        AxisBox::new(s(min), s(max))
    }

    #[test]
    fn unit_ball_measure_known_values() {
        assert_eq!(unit_ball_measure(0), Err(SpaceError::InvalidDimension));
        assert_relative_eq!(unit_ball_measure(1).unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(unit_ball_measure(2).unwrap(), PI, max_relative = 1e-12);
        assert_relative_eq!(
            unit_ball_measure(4).unwrap(),
            PI * PI / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn phs_measure_degenerate_and_known() {
        assert_eq!(phs_measure(1.0, 1.0, 2).unwrap(), 0.0);
        assert!(matches!(
            phs_measure(0.9, 1.0, 2),
            Err(SpaceError::DegenerateSpheroid { .. })
        ));
        // hand evaluation: 2 * (4-1)^1 * (4*pi/3) / 8 = pi
        assert_relative_eq!(phs_measure(2.0, 1.0, 3).unwrap(), PI, max_relative = 1e-12);
    }

    #[test]
    fn phs_measure_matches_monte_carlo_area() {
        // ellipse c=1.0, c_min=0.8 in R^2; bounding box in the focal frame
        let c: f64 = 1.0;
        let c_min: f64 = 0.8;
        let expected = phs_measure(c, c_min, 2).unwrap();
        assert_relative_eq!(expected, 0.4712, max_relative = 2e-4);

        let major = c / 2.0;
        let minor = (c * c - c_min * c_min).sqrt() / 2.0;
        let fa = [-c_min / 2.0, 0.0];
        let fb = [c_min / 2.0, 0.0];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n_samples = 1_000_000u64;
        let mut hits = 0u64;
        for _ in 0..n_samples {
            let x = rng.gen_range(-major..major);
            let y = rng.gen_range(-minor..minor);
            let p = [x, y];
            if dist(&p, &fa) + dist(&p, &fb) < c {
                hits += 1;
            }
        }
        let est = hits as f64 / n_samples as f64 * (2.0 * major) * (2.0 * minor);
        assert!(
            (est - expected).abs() / expected < 0.01,
            "MC {est} vs formula {expected}"
        );
    }

    #[test]
    fn phs_measure_monotone_in_cost() {
        let mut prev = 0.0;
        for k in 1..=20 {
            let c = 1.0 + 0.1 * k as f64;
            let m = phs_measure(c, 1.0, 3).unwrap();
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn phs_contains_strict_boundary() {
        let phs = ProlateHyperspheroid::new(s(&[0.0, 0.0]), s(&[1.0, 0.0]), 1.2).unwrap();
        // focus itself: focal sum equals c_min < c
        assert!(phs.contains(&s(&[0.0, 0.0])).unwrap());
        // point with focal sum exactly c: on the transverse axis at x = -0.1
        assert!(!phs.contains(&s(&[-0.1, 0.0])).unwrap());
        // hand computation: 2 * sqrt(0.34) ~ 1.166 < 1.2
        assert!(phs.contains(&s(&[0.5, 0.3])).unwrap());
        assert!(matches!(
            phs.contains(&s(&[0.5, 0.3, 0.0])),
            Err(SpaceError::DimensionError { .. })
        ));
    }

    #[test]
    fn phs_sample_membership_and_mean() {
        let phs = ProlateHyperspheroid::new(s(&[0.0, 0.0]), s(&[1.0, 0.0]), 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut mean = [0.0f64; 2];
        for _ in 0..n {
            let v = phs.sample(&mut rng).unwrap();
            assert!(phs.contains(&v).unwrap());
            mean[0] += v[0];
            mean[1] += v[1];
        }
        mean[0] /= n as f64;
        mean[1] /= n as f64;
        assert!((mean[0] - 0.5).abs() < 0.01, "mean x {}", mean[0]);
        assert!((mean[1] - 0.0).abs() < 0.01, "mean y {}", mean[1]);
    }

    #[test]
    fn phs_sample_deterministic_and_degenerate() {
        let phs = ProlateHyperspheroid::new(s(&[0.0, 0.0]), s(&[1.0, 0.0]), 1.5).unwrap();
        let a = phs.sample(&mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = phs.sample(&mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);

        let tight = ProlateHyperspheroid::new(s(&[0.0, 0.0]), s(&[1.0, 0.0]), 1.0).unwrap();
        assert!(matches!(
            tight.sample(&mut ChaCha8Rng::seed_from_u64(0)),
            Err(SpaceError::DegenerateSpheroid { .. })
        ));
        assert!(matches!(
            ProlateHyperspheroid::new(s(&[0.2, 0.2]), s(&[0.2, 0.2]), 1.0),
            Err(SpaceError::DegenerateAxis)
        ));
    }

    #[test]
    fn point_in_free_closed_obstacles() {
        let p = world_with(2, vec![bx(&[0.4, 0.4], &[0.6, 0.6])]);
        assert!(!p.point_in_free(&s(&[0.5, 0.5])));
        assert!(p.point_in_free(&s(&[0.2, 0.2])));
        // boundary contact counts as collision
        assert!(!p.point_in_free(&s(&[0.4, 0.5])));
        // outside the unit cube
        assert!(!p.point_in_free(&s(&[1.1, 0.5])));
        // cube boundary itself is free
        assert!(p.point_in_free(&s(&[0.0, 1.0])));
    }

    #[test]
    fn segment_valid_slab_cases() {
        let p = world_with(2, vec![bx(&[0.4, 0.4], &[0.6, 0.6])]);
        let q = world_with(2, vec![bx(&[0.4, 0.2], &[0.6, 0.3])]);
        // passes through the box center
        assert!(!p
            .segment_valid(&s(&[0.0, 0.0]), &s(&[1.0, 1.0]))
            .unwrap());
        // disjoint y-ranges
        assert!(q
            .segment_valid(&s(&[0.0, 0.0]), &s(&[1.0, 0.0]))
            .unwrap());
        // hand slab computation: x-interval [0.5, 1], y-interval [0, 0.4167]
        let r = world_with(2, vec![bx(&[0.45, 0.45], &[0.55, 0.55])]);
        assert!(r
            .segment_valid(&s(&[0.4, 0.5]), &s(&[0.5, 0.62]))
            .unwrap());
        // endpoint inside the obstacle errors
        assert!(matches!(
            p.segment_valid(&s(&[0.5, 0.5]), &s(&[0.9, 0.9])),
            Err(SpaceError::InvalidEndpoint)
        ));
    }

    #[test]
    fn segment_grazing_face_collides() {
        let p = world_with(2, vec![bx(&[0.4, 0.4], &[0.6, 0.6])]);
        // runs along the y = 0.4 face: closed obstacle means contact
        assert!(!p
            .segment_valid(&s(&[0.3, 0.4]), &s(&[0.7, 0.4]))
            .unwrap());
        // stops short of the face: no contact
        assert!(p
            .segment_valid(&s(&[0.2, 0.4]), &s(&[0.39, 0.4]))
            .unwrap());
        // touches only a corner point; exact binary fractions keep the slab
        // arithmetic exact
        let q = world_with(2, vec![bx(&[0.25, 0.25], &[0.5, 0.5])]);
        assert!(!q
            .segment_valid(&s(&[0.0, 0.5]), &s(&[0.5, 0.0]))
            .unwrap());
    }

    #[test]
    fn sparse_check_levels() {
        let thin = world_with(2, vec![bx(&[0.49, 0.0], &[0.51, 1.0])]);
        // midpoint x = 0.5 falls inside at level 1
        assert!(!thin.sparse_segment_check(&s(&[0.0, 0.5]), &s(&[1.0, 0.5]), 1));

        let off = world_with(2, vec![bx(&[0.30, 0.0], &[0.32, 1.0])]);
        let a = s(&[0.0, 0.5]);
        let b = s(&[1.0, 0.5]);
        // lazy false positive: checked x in {0, 0.5, 1} are all free
        assert!(off.sparse_segment_check(&a, &b, 1));
        assert!(!off.segment_valid_unchecked(a.coords(), b.coords()));
        // higher resolution still misses it (points at k/8 avoid [0.30, 0.32])
        // but level 4 probes x = 5/16 = 0.3125 which is inside
        assert!(!off.sparse_segment_check(&a, &b, 4));

        // a valid segment passes at every level
        let free = empty_world(2);
        for level in 1..=6 {
            assert!(free.sparse_segment_check(&a, &b, level));
        }
    }

    #[test]
    fn sparse_check_one_sided_random() {
        let p = world_with(
            2,
            vec![bx(&[0.35, 0.1], &[0.45, 0.9]), bx(&[0.6, 0.3], &[0.8, 0.5])],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 500 {
            let a: Vec<f64> = (0..2).map(|_| rng.gen()).collect();
            let b: Vec<f64> = (0..2).map(|_| rng.gen()).collect();
            if !p.point_in_free_coords(&a) || !p.point_in_free_coords(&b) {
                continue;
            }
            checked += 1;
            let (a, b) = (State::new(a), State::new(b));
            let exact = p.segment_valid(&a, &b).unwrap();
            for level in 1..=5 {
                let sparse = p.sparse_segment_check(&a, &b, level);
                if exact {
                    assert!(sparse, "sparse check rejected a valid segment");
                }
                if !sparse {
                    assert!(!exact, "sparse rejection must imply exact rejection");
                }
            }
        }
    }

    #[test]
    fn sample_free_uniform_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let free = empty_world(3);
        assert!(free.sample_free_uniform(&mut rng, 0).unwrap().is_empty());
        let pts = free.sample_free_uniform(&mut rng, 100).unwrap();
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|v| free.point_in_free(v)));

        let blocked = ProblemDef::new(
            2,
            vec![bx(&[0.0, 0.0], &[0.5, 1.0])],
            s(&[0.7, 0.5]),
            vec![s(&[0.9, 0.5])],
        )
        .unwrap();
        let pts = blocked.sample_free_uniform(&mut rng, 1000).unwrap();
        assert!(pts.iter().all(|v| v[0] > 0.5));
    }

    #[test]
    fn focal_basis_axis_cases() {
        let id = focal_basis(&s(&[0.0, 0.0]), &s(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(id.col(0)[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(id.col(0)[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(id.col(1)[1].abs(), 1.0, epsilon = 1e-12);

        let swapped = focal_basis(&s(&[0.0, 0.0]), &s(&[0.0, 1.0])).unwrap();
        assert_relative_eq!(swapped.col(0)[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(swapped.col(0)[1], 1.0, epsilon = 1e-12);

        assert!(matches!(
            focal_basis(&s(&[0.3, 0.3]), &s(&[0.3, 0.3])),
            Err(SpaceError::DegenerateAxis)
        ));
    }

    #[test]
    fn focal_basis_orthonormal_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let a: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let b: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            if dist(&a, &b) < 1e-6 {
                continue;
            }
            let basis = focal_basis(&State::new(a), &State::new(b)).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let dot: f64 = basis
                        .col(i)
                        .iter()
                        .zip(basis.col(j))
                        .map(|(x, y)| x * y)
                        .sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-9, "M^T M != I at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn scene_file_round_trip() {
        let p = world_with(2, vec![bx(&[0.4, 0.4], &[0.6, 0.6])]);
        let json = serde_json::to_string(&p).unwrap();
        let back: ProblemDef = serde_json::from_str(&json).unwrap();
        assert_eq!(back.obstacles(), p.obstacles());
        assert_eq!(back.start(), p.start());
        assert_eq!(back.goals(), p.goals());

        let bad = r#"{"dim":2,"start":[0.5,0.5],"goals":[[0.9,0.5]],
                      "obstacles":[{"min":[0.4,0.4],"max":[0.6,0.6]}]}"#;
        assert!(serde_json::from_str::<ProblemDef>(bad).is_err());
    }

    #[test]
    fn solution_path_validation() {
        let p = world_with(2, vec![bx(&[0.45, 0.0], &[0.55, 0.45])]);
        let path = SolutionPath::from_vertices(vec![
            s(&[0.1, 0.5]),
            s(&[0.5, 0.6]),
            s(&[0.9, 0.5]),
        ]);
        path.validate(&p).unwrap();

        let through = SolutionPath::from_vertices(vec![
            s(&[0.1, 0.5]),
            s(&[0.5, 0.2]),
            s(&[0.9, 0.5]),
        ]);
        assert!(through.validate(&p).is_err());
    }
}
