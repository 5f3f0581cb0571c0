//! Greedy GuILD subset construction: measure-minimal beacon selection along
//! the solution path, greedy transverse costs, and sampling over the
//! two-spheroid union.

use rand::Rng;
use thiserror::Error;

use crate::space::{
    phs_measure, polyline_cost, ProblemDef, ProlateHyperspheroid, SolutionPath, State,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuildError {
    #[error("path has no interior vertex to use as a beacon")]
    NoInteriorVertex,
    #[error("both subset spheroids are degenerate")]
    DegenerateSubsets,
    #[error("subset rejection sampling exhausted after {attempts} attempts")]
    SubsetSaturated { attempts: u64 },
}

/// Result of beacon selection: the measure-minimal interior path vertex with
/// its front/back path slices and path-cost spheroids.
#[derive(Clone, Debug)]
pub struct BeaconChoice {
    pub beacon: State,
    pub beacon_index: usize,
    pub front_path: Vec<State>,
    pub back_path: Vec<State>,
    pub front_cost: f64,
    pub back_cost: f64,
    pub front: Option<ProlateHyperspheroid>,
    pub back: Option<ProlateHyperspheroid>,
    pub measure_sum: f64,
}

/// Measure of the spheroid with foci `a`, `b` and transverse cost `c`,
/// clamping `c` up to the chord to absorb floating-point path sums.
fn side_measure(a: &State, b: &State, c: f64, n: usize) -> f64 {
    let c_min = a.distance(b);
    phs_measure(c.max(c_min), c_min, n).expect("clamped cost is admissible")
}

fn side_spheroid(a: &State, b: &State, c: f64) -> Option<ProlateHyperspheroid> {
    let c_min = a.distance(b);
    ProlateHyperspheroid::new(a.clone(), b.clone(), c.max(c_min)).ok()
}

/// Picks the interior path vertex minimizing the summed Lebesgue measures of
/// the two path-cost spheroids. Ties break toward the smallest path index.
pub fn select_beacon(path: &SolutionPath) -> Result<BeaconChoice, GuildError> {
    let verts = &path.vertices;
    if verts.len() < 3 {
        return Err(GuildError::NoInteriorVertex);
    }
    let n = verts[0].dim();
    let start = &verts[0];
    let goal = verts.last().unwrap();

    // prefix path costs along xi
    let mut prefix = Vec::with_capacity(verts.len());
    let mut acc = 0.0;
    prefix.push(0.0);
    for w in verts.windows(2) {
        acc += w[0].distance(&w[1]);
        prefix.push(acc);
    }
    let total = acc;

    let mut best: Option<(usize, f64)> = None;
    for i in 1..verts.len() - 1 {
        let c_f = prefix[i];
        let c_b = total - prefix[i];
        let sum = side_measure(start, &verts[i], c_f, n) + side_measure(&verts[i], goal, c_b, n);
        if best.map_or(true, |(_, b)| sum < b) {
            best = Some((i, sum));
        }
    }
    let (idx, measure_sum) = best.unwrap();
    let front_cost = prefix[idx];
    let back_cost = total - prefix[idx];
    Ok(BeaconChoice {
        beacon: verts[idx].clone(),
        beacon_index: idx,
        front_path: verts[..=idx].to_vec(),
        back_path: verts[idx..].to_vec(),
        front_cost,
        back_cost,
        front: side_spheroid(start, &verts[idx], front_cost),
        back: side_spheroid(&verts[idx], goal, back_cost),
        measure_sum,
    })
}

/// Greedy transverse costs: the path vertex maximizing the summed chord
/// distances to the slice endpoints, endpoints included, first maximizer
/// kept. Returns `(c_greedy_f, v_f, c_greedy_b, v_b)`.
pub fn greedy_costs(
    front_path: &[State],
    back_path: &[State],
    beacon: &State,
    start: &State,
    goal: &State,
) -> (f64, State, f64, State) {
    let scan = |path: &[State], a: &State, b: &State| -> (f64, State) {
        let mut best = f64::NEG_INFINITY;
        let mut v = path[0].clone();
        for p in path {
            let d = a.distance(p) + p.distance(b);
            if d > best {
                best = d;
                v = p.clone();
            }
        }
        (best, v)
    };
    let (c_f, v_f) = scan(front_path, start, beacon);
    let (c_b, v_b) = scan(back_path, beacon, goal);
    (c_f, v_f, c_b, v_b)
}

/// The greedy GuILD subsets: beacon, the two greedy spheroids, and the data
/// needed for membership checks and measure-proportional sampling.
#[derive(Clone, Debug)]
pub struct GuildSubsets {
    pub beacon: State,
    pub front: Option<ProlateHyperspheroid>,
    pub back: Option<ProlateHyperspheroid>,
    pub greedy_front_cost: f64,
    pub greedy_front_vertex: State,
    pub greedy_back_cost: f64,
    pub greedy_back_vertex: State,
    pub front_measure: f64,
    pub back_measure: f64,
    pub path_cost: f64,
    pub start: State,
    pub goal: State,
}

impl GuildSubsets {
    /// Strict membership in either greedy spheroid; free-space membership is
    /// checked separately against the problem.
    pub fn in_spheroids(&self, v: &State) -> bool {
        self.front.as_ref().is_some_and(|s| s.contains_coords(v.coords()))
            || self.back.as_ref().is_some_and(|s| s.contains_coords(v.coords()))
    }

    /// Full membership: collision-free and inside either greedy spheroid.
    pub fn contains(&self, p: &ProblemDef, v: &State) -> bool {
        p.point_in_free(v) && self.in_spheroids(v)
    }

    /// Informed-set inequality at the defining path cost.
    pub fn in_informed_set(&self, v: &State) -> bool {
        self.start.distance(v) + self.goal.distance(v) < self.path_cost
    }
}

/// Builds the greedy GuILD subsets for a solution path: beacon selection,
/// greedy costs over both slices, then the two greedy spheroids. A side whose
/// spheroid degenerates is marked empty.
pub fn build_g2(path: &SolutionPath, _p: &ProblemDef) -> Result<GuildSubsets, GuildError> {
    let choice = select_beacon(path)?;
    let start = path.vertices[0].clone();
    let goal = path.vertices.last().unwrap().clone();
    let (c_gf, v_f, c_gb, v_b) = greedy_costs(
        &choice.front_path,
        &choice.back_path,
        &choice.beacon,
        &start,
        &goal,
    );
    let n = start.dim();
    let front = side_spheroid(&start, &choice.beacon, c_gf);
    let back = side_spheroid(&choice.beacon, &goal, c_gb);
    let front_measure = side_measure(&start, &choice.beacon, c_gf, n);
    let back_measure = side_measure(&choice.beacon, &goal, c_gb, n);
    Ok(GuildSubsets {
        beacon: choice.beacon,
        front,
        back,
        greedy_front_cost: c_gf,
        greedy_front_vertex: v_f,
        greedy_back_cost: c_gb,
        greedy_back_vertex: v_b,
        front_measure,
        back_measure,
        path_cost: polyline_cost(&path.vertices),
        start,
        goal,
    })
}

/// Draws `count` states from the free-space portion of the subset union.
/// Each draw picks a side with probability proportional to the spheroid
/// measures, then rejection-samples that side into free space (at most 1e5
/// attempts per point).
pub fn g2_sample<R: Rng>(
    g2: &GuildSubsets,
    p: &ProblemDef,
    rng: &mut R,
    count: usize,
) -> Result<Vec<State>, GuildError> {
    let front_ok = g2.front.is_some() && g2.front_measure > 0.0;
    let back_ok = g2.back.is_some() && g2.back_measure > 0.0;
    if !front_ok && !back_ok {
        return Err(GuildError::DegenerateSubsets);
    }
    let w_front = if front_ok { g2.front_measure } else { 0.0 };
    let w_back = if back_ok { g2.back_measure } else { 0.0 };
    let p_front = w_front / (w_front + w_back);

    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let side = if rng.gen::<f64>() < p_front {
            g2.front.as_ref().unwrap()
        } else {
            g2.back.as_ref().unwrap()
        };
        let mut attempts = 0u64;
        loop {
            if attempts >= 100_000 {
                return Err(GuildError::SubsetSaturated { attempts });
            }
            attempts += 1;
            let v = side.sample(rng).expect("side has positive measure");
            if p.point_in_free(&v) {
                debug_assert!(g2.in_informed_set(&v), "subset chain violated");
                out.push(v);
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(coords: &[f64]) -> State {
        State::new(coords.to_vec())
    }

    fn path(pts: &[&[f64]]) -> SolutionPath {
        SolutionPath::from_vertices(pts.iter().map(|p| s(p)).collect())
    }

    fn free_world() -> ProblemDef {
        ProblemDef::new(2, vec![], s(&[0.0, 0.0]), vec![s(&[1.0, 0.0])]).unwrap()
    }

    #[test]
    fn beacon_requires_interior_vertex() {
        let p = path(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(
            select_beacon(&p),
            Err(GuildError::NoInteriorVertex)
        ));
    }

    #[test]
    fn beacon_single_interior() {
        let p = path(&[&[0.0, 0.0], &[0.4, 0.3], &[1.0, 0.0]]);
        let choice = select_beacon(&p).unwrap();
        assert_eq!(choice.beacon_index, 1);
        assert_eq!(choice.beacon, s(&[0.4, 0.3]));
    }

    #[test]
    fn beacon_collinear_tie_breaks_to_first() {
        let p = path(&[&[0.0, 0.0], &[0.25, 0.0], &[0.5, 0.0], &[1.0, 0.0]]);
        let choice = select_beacon(&p).unwrap();
        assert_eq!(choice.beacon_index, 1);
        assert_eq!(choice.measure_sum, 0.0);
    }

    #[test]
    fn beacon_hand_example() {
        // candidate (0.5, 0.1): total ~ 0.5835; candidate (0.5, 0.4): ~ 0.3154
        let p = path(&[&[0.0, 0.0], &[0.5, 0.1], &[0.5, 0.4], &[1.0, 0.0]]);
        let choice = select_beacon(&p).unwrap();
        assert_eq!(choice.beacon, s(&[0.5, 0.4]));
        assert_relative_eq!(choice.measure_sum, 0.3154, max_relative = 1e-3);
    }

    #[test]
    fn beacon_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let len = rng.gen_range(3..=20);
            let verts: Vec<State> = (0..len).map(|_| s(&[rng.gen(), rng.gen()])).collect();
            let p = SolutionPath::from_vertices(verts.clone());
            let choice = select_beacon(&p).unwrap();

            // independent oracle: direct enumeration over interior vertices
            let mut best_i = 0;
            let mut best_sum = f64::INFINITY;
            for i in 1..verts.len() - 1 {
                let c_f = polyline_cost(&verts[..=i]);
                let c_b = polyline_cost(&verts[i..]);
                let mf = side_measure(&verts[0], &verts[i], c_f, 2);
                let mb = side_measure(&verts[i], verts.last().unwrap(), c_b, 2);
                if mf + mb < best_sum {
                    best_sum = mf + mb;
                    best_i = i;
                }
            }
            assert_eq!(choice.beacon_index, best_i);
        }
    }

    #[test]
    fn greedy_costs_straight_line() {
        let front = [s(&[0.0, 0.0]), s(&[0.3, 0.0]), s(&[0.6, 0.0])];
        let (c_f, v_f, _, _) = greedy_costs(
            &front,
            &front,
            &s(&[0.6, 0.0]),
            &s(&[0.0, 0.0]),
            &s(&[0.6, 0.0]),
        );
        assert_relative_eq!(c_f, 0.6, max_relative = 1e-12);
        // collinear: every vertex attains the chord, first maximizer kept
        assert_eq!(v_f, s(&[0.0, 0.0]));
    }

    #[test]
    fn greedy_costs_hand_example() {
        let front = [s(&[0.0, 0.0]), s(&[0.3, 0.2]), s(&[0.6, 0.0])];
        let (c_f, v_f, _, _) = greedy_costs(
            &front,
            &front,
            &s(&[0.6, 0.0]),
            &s(&[0.0, 0.0]),
            &s(&[0.6, 0.0]),
        );
        assert_relative_eq!(c_f, 0.7211, max_relative = 1e-3);
        assert_eq!(v_f, s(&[0.3, 0.2]));
    }

    #[test]
    fn greedy_cost_bounded_by_path_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..1000 {
            let len = rng.gen_range(2..=10);
            let verts: Vec<State> = (0..len).map(|_| s(&[rng.gen(), rng.gen()])).collect();
            let start = verts[0].clone();
            let end = verts.last().unwrap().clone();
            let (c, _, _, _) = greedy_costs(&verts, &verts, &end, &start, &end);
            let cost = polyline_cost(&verts);
            assert!(c <= cost + 1e-12, "greedy {c} exceeds path cost {cost}");
            assert!(c >= start.distance(&end) - 1e-12);
        }
    }

    #[test]
    fn g2_membership_boundary() {
        let world = free_world();
        // the winning beacon's back slice is bent, so its greedy cost exceeds
        // the chord and the beacon itself lies strictly inside that spheroid
        let p = path(&[&[0.0, 0.0], &[0.3, 0.25], &[0.7, 0.15], &[1.0, 0.0]]);
        let g2 = build_g2(&p, &world).unwrap();
        assert!(g2.greedy_back_cost > g2.beacon.distance(&g2.goal));
        assert!(g2.contains(&world, &g2.beacon));

        // three-vertex path: both slices are chords, so both greedy costs
        // equal c_min and the beacon is excluded under strict membership
        let flat = path(&[&[0.0, 0.0], &[0.5, 0.2], &[1.0, 0.0]]);
        let g2 = build_g2(&flat, &world).unwrap();
        assert!(!g2.contains(&world, &g2.beacon));
    }

    #[test]
    fn g2_subset_of_informed_set() {
        let world = free_world();
        let p = path(&[&[0.0, 0.0], &[0.3, 0.25], &[0.7, 0.15], &[1.0, 0.0]]);
        let g2 = build_g2(&p, &world).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let samples = g2_sample(&g2, &world, &mut rng, 10_000).unwrap();
        for v in &samples {
            assert!(g2.contains(&world, v));
            assert!(g2.in_informed_set(v), "sample escaped the informed set");
        }
    }

    #[test]
    fn g2_measures_below_informed_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let world = free_world();
        for _ in 0..100 {
            let len = rng.gen_range(3..=8);
            let mut verts = vec![s(&[0.0, 0.0])];
            for _ in 0..len - 2 {
                verts.push(s(&[rng.gen(), rng.gen()]));
            }
            verts.push(s(&[1.0, 0.0]));
            let p = SolutionPath::from_vertices(verts);
            let g2 = build_g2(&p, &world).unwrap();
            let informed = phs_measure(p.cost, 1.0, 2).unwrap();
            assert!(
                g2.front_measure + g2.back_measure <= informed + 1e-9,
                "subset measures exceed the informed measure"
            );
        }
    }

    #[test]
    fn g2_sample_degenerate_side() {
        let world = free_world();
        // the winning beacon (0.6, 0.3) has a bent front slice and a chord
        // back slice, so only the front spheroid carries measure
        let p = path(&[&[0.0, 0.0], &[0.2, 0.0], &[0.6, 0.3], &[1.0, 0.0]]);
        let g2 = build_g2(&p, &world).unwrap();
        assert!(g2.front_measure > 0.0);
        assert_eq!(g2.back_measure, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let samples = g2_sample(&g2, &world, &mut rng, 200).unwrap();
        let front = g2.front.as_ref().unwrap();
        for v in &samples {
            assert!(front.contains_coords(v.coords()));
        }
    }

    #[test]
    fn g2_sample_side_ratio() {
        let world = free_world();
        // construct subsets directly with a 3:1 measure ratio
        let front = ProlateHyperspheroid::new(s(&[0.2, 0.5]), s(&[0.4, 0.5]), 0.3).unwrap();
        let back = ProlateHyperspheroid::new(s(&[0.6, 0.5]), s(&[0.8, 0.5]), 0.3).unwrap();
        let fm = front.measure();
        let g2 = GuildSubsets {
            beacon: s(&[0.5, 0.5]),
            front: Some(front),
            back: Some(back),
            greedy_front_cost: 0.3,
            greedy_front_vertex: s(&[0.3, 0.5]),
            greedy_back_cost: 0.3,
            greedy_back_vertex: s(&[0.7, 0.5]),
            front_measure: 3.0 * fm,
            back_measure: fm,
            path_cost: 10.0,
            start: s(&[0.2, 0.5]),
            goal: s(&[0.8, 0.5]),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let samples = g2_sample(&g2, &world, &mut rng, 100_000).unwrap();
        let front_hits = samples
            .iter()
            .filter(|v| g2.front.as_ref().unwrap().contains_coords(v.coords()))
            .count();
        let ratio = front_hits as f64 / (samples.len() - front_hits) as f64;
        assert!((ratio - 3.0).abs() / 3.0 < 0.05, "ratio {ratio}");
    }
}
