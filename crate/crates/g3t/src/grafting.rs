//! Edge grafting: repairs an invalid forward-reverse connecting edge by
//! routing through the best common RGG neighbor instead of restarting the
//! reverse search.

use thiserror::Error;

use crate::events::PlannerEvent;
use crate::rgg::{SampleStore, VertexId};
use crate::search::PlannerState;
use crate::space::ProblemDef;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraftError {
    #[error("edge-pair queue is empty")]
    EmptyQueue,
}

/// A two-edge detour `(v_s, v') + (v', v_t)` through a common neighbor,
/// keyed lexicographically by summed cost then summed validation effort.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgePair {
    pub via: VertexId,
    pub first: (VertexId, VertexId),
    pub second: (VertexId, VertexId),
    pub key_cost: f64,
    pub key_effort: f64,
}

impl EdgePair {
    pub fn new(
        store: &SampleStore,
        v_s: VertexId,
        v_t: VertexId,
        via: VertexId,
        leg_effort: f64,
    ) -> Self {
        debug_assert!(via != v_s && via != v_t);
        let c1 = store.state(v_s).distance(store.state(via));
        let c2 = store.state(via).distance(store.state(v_t));
        EdgePair {
            via,
            first: (v_s, via),
            second: (via, v_t),
            key_cost: c1 + c2,
            key_effort: 2.0 * leg_effort,
        }
    }

    fn key(&self) -> (f64, f64, usize) {
        (self.key_cost, self.key_effort, self.via.0)
    }
}

/// Lexicographic minimum by `(key_cost, key_effort, via id)`.
pub fn best_edge_pair(candidates: &[EdgePair]) -> Result<&EdgePair, GraftError> {
    candidates
        .iter()
        .min_by(|a, b| a.key().partial_cmp(&b.key()).unwrap())
        .ok_or(GraftError::EmptyQueue)
}

/// Edge-pairs through every common neighbor of the invalid edge, sorted by
/// the lexicographic key. `skip` filters memoized failures.
pub fn build_edge_pairs(
    store: &SampleStore,
    v_s: VertexId,
    v_t: VertexId,
    r: f64,
    leg_effort: f64,
    skip: impl Fn(VertexId) -> bool,
) -> Vec<EdgePair> {
    let commons = store.common_neighbors(store.state(v_s), store.state(v_t), r);
    let mut pairs: Vec<EdgePair> = commons
        .into_iter()
        .filter(|&via| via != v_s && via != v_t && !skip(via))
        .map(|via| EdgePair::new(store, v_s, v_t, via, leg_effort))
        .collect();
    pairs.sort_by(|a, b| a.key().partial_cmp(&b.key()).unwrap());
    pairs
}

/// Which check a leg is about to undergo.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegCheck {
    Lazy,
    Full,
}

/// Candidate scan shared by the planner and the oracle tests: iterates the
/// sorted edge-pairs, filters each through the cheap lazy check, then runs
/// the exact check on both legs; returns the first fully valid pair. Because
/// candidates are visited in key order, the first valid pair carries the
/// minimal cost key among all valid pairs.
pub fn scan_edge_pairs(
    pairs: &[EdgePair],
    mut check: impl FnMut(LegCheck, VertexId, VertexId) -> bool,
    mut on_fail: impl FnMut(VertexId),
) -> Option<EdgePair> {
    for pair in pairs {
        let (s, via) = pair.first;
        let (_, t) = pair.second;
        if !check(LegCheck::Lazy, s, via) || !check(LegCheck::Lazy, via, t) {
            on_fail(pair.via);
            continue;
        }
        if !check(LegCheck::Full, s, via) || !check(LegCheck::Full, via, t) {
            on_fail(pair.via);
            continue;
        }
        return Some(pair.clone());
    }
    None
}

/// Attempts to repair the invalid edge `(v_s, v_t)`: on success the via and
/// the target are inserted into the forward tree through the validated legs,
/// the via's neighborhood is expanded, and the pair is returned. `None`
/// signals that the candidate list is exhausted and the reverse search must
/// raise its resolution. The reverse tree is never touched.
pub fn graft(st: &mut PlannerState, invalid: (VertexId, VertexId)) -> Option<EdgePair> {
    let (v_s, v_t) = invalid;
    st.graft_attempts += 1;
    let leg_effort = ProblemDef::sparse_check_effort(st.level);
    let memo_key = (v_s.0, v_t.0);
    let pairs = {
        let failed = st.failed_vias.get(&memo_key);
        build_edge_pairs(&st.store, v_s, v_t, st.radius, leg_effort, |via| {
            failed.is_some_and(|f| f.contains(&via.0))
        })
    };
    let candidates = pairs.len();

    let mut failed_now: Vec<usize> = Vec::new();
    let result = scan_edge_pairs(
        &pairs,
        |kind, a, b| match kind {
            LegCheck::Lazy => st.sparse_check_cached(a.0, b.0),
            LegCheck::Full => st.full_check(a.0, b.0),
        },
        |via| failed_now.push(via.0),
    );
    st.failed_vias.entry(memo_key).or_default().extend(failed_now);

    match result {
        Some(pair) => {
            st.graft_successes += 1;
            // both legs are validated: insert the via, then continue the
            // forward search through the target
            st.accept_validated_edge(v_s.0, pair.via.0);
            st.accept_validated_edge(pair.via.0, v_t.0);
            st.emit(PlannerEvent::GraftSuccess {
                source_id: v_s.0,
                via_id: pair.via.0,
                target_id: v_t.0,
                source: st.store.state(v_s).coords().to_vec(),
                via: st.store.state(pair.via).coords().to_vec(),
                target: st.store.state(v_t).coords().to_vec(),
                key_cost: pair.key_cost,
            });
            Some(pair)
        }
        None => {
            st.emit(PlannerEvent::GraftFail {
                source_id: v_s.0,
                target_id: v_t.0,
                candidates,
            });
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{AxisBox, State};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(coords: &[f64]) -> State {
        State::new(coords.to_vec())
    }

    fn bx(min: &[f64], max: &[f64]) -> AxisBox {
        AxisBox::new(s(min), s(max))
    }

    #[test]
    fn best_pair_selection() {
        let mut store = SampleStore::new(2);
        let ids = store.add_batch(&[
            s(&[0.4, 0.5]),  // v_s
            s(&[0.6, 0.5]),  // v_t
            s(&[0.5, 0.62]), // via a
            s(&[0.5, 0.58]), // via b
        ]);
        let a = EdgePair::new(&store, ids[0], ids[1], ids[2], 1.0);
        let b = EdgePair::new(&store, ids[0], ids[1], ids[3], 1.0);
        assert_relative_eq!(a.key_cost, 0.3124, max_relative = 1e-3);
        assert_relative_eq!(b.key_cost, 0.2561, max_relative = 1e-3);

        let pairs = vec![a.clone(), b.clone()];
        assert_eq!(best_edge_pair(&pairs).unwrap().via, ids[3]);
        assert_eq!(best_edge_pair(&pairs[..1]).unwrap().via, ids[2]);
        assert!(matches!(best_edge_pair(&[]), Err(GraftError::EmptyQueue)));
    }

    #[test]
    fn best_pair_tie_breaks_on_via_id() {
        let mut store = SampleStore::new(2);
        let ids = store.add_batch(&[
            s(&[0.4, 0.5]),
            s(&[0.6, 0.5]),
            s(&[0.5, 0.6]), // symmetric vias: identical keys
            s(&[0.5, 0.4]),
        ]);
        let a = EdgePair::new(&store, ids[0], ids[1], ids[2], 1.0);
        let b = EdgePair::new(&store, ids[0], ids[1], ids[3], 1.0);
        assert_eq!(a.key_cost, b.key_cost);
        let best = best_edge_pair(&[b, a]).unwrap().via;
        assert_eq!(best, ids[2], "lower via id must win ties");
    }

    #[test]
    fn pair_cost_respects_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut store = SampleStore::new(3);
        let pts: Vec<State> = (0..50)
            .map(|_| s(&[rng.gen(), rng.gen(), rng.gen()]))
            .collect();
        let ids = store.add_batch(&pts);
        for _ in 0..200 {
            let i = ids[rng.gen_range(0..ids.len())];
            let j = ids[rng.gen_range(0..ids.len())];
            let k = ids[rng.gen_range(0..ids.len())];
            if i == j || j == k || i == k {
                continue;
            }
            let pair = EdgePair::new(&store, i, j, k, 1.0);
            let direct = store.state(i).distance(store.state(j));
            assert!(pair.key_cost >= direct - 1e-12);
        }
    }

    /// The module-space scenario: box [0.45,0.55]^2 blocks (0.4,0.5)-(0.6,0.5),
    /// the via above the box repairs it with two valid legs.
    #[test]
    fn graft_repairs_blocked_edge() {
        let p = ProblemDef::new(
            2,
            vec![bx(&[0.45, 0.45], &[0.55, 0.55])],
            s(&[0.4, 0.5]),
            vec![s(&[0.6, 0.5])],
        )
        .unwrap();
        let cfg = crate::search::PlannerConfig {
            log_events: true,
            ..Default::default()
        };
        let mut st = PlannerState::new(p, cfg, 0);
        let via = st.store.add_batch(&[s(&[0.5, 0.62])])[0];
        let below = st.store.add_batch(&[s(&[0.5, 0.5 - 0.12])])[0];
        let _ = below; // symmetric via below also exists
        st.sync_after_manual_insert(0.3);
        st.reverse_search();

        let v_s = st.start_id;
        let v_t = st.goal_ids[0];
        assert!(!st.full_check(v_s.0, v_t.0), "direct edge must be blocked");
        let pair = graft(&mut st, (v_s, v_t)).expect("graft must succeed");
        // both symmetric vias tie on cost; the lower id wins
        assert_eq!(pair.via, via);
        assert!(st.g[v_t.0].is_finite(), "target joined the forward tree");
        let g_via = st.g[pair.via.0];
        assert_relative_eq!(
            g_via,
            st.store.state(v_s).distance(st.store.state(pair.via)),
            epsilon = 1e-12
        );
    }

    /// Only common neighbor sits inside-adjacent so both its legs collide.
    #[test]
    fn graft_fails_when_all_vias_blocked() {
        let p = ProblemDef::new(
            2,
            vec![bx(&[0.45, 0.45], &[0.55, 0.55])],
            s(&[0.4, 0.5]),
            vec![s(&[0.6, 0.5])],
        )
        .unwrap();
        let mut st = PlannerState::new(p, crate::search::PlannerConfig::default(), 0);
        // via just above the box: both legs still cross the corner region
        st.store.add_batch(&[s(&[0.5, 0.56])]);
        st.sync_after_manual_insert(0.25);
        st.reverse_search();

        let v_s = st.start_id;
        let v_t = st.goal_ids[0];
        assert!(!st.full_check(v_s.0, v_t.0));
        assert!(graft(&mut st, (v_s, v_t)).is_none());

        // no common neighbors at all
        let p2 = ProblemDef::new(
            2,
            vec![bx(&[0.45, 0.45], &[0.55, 0.55])],
            s(&[0.4, 0.5]),
            vec![s(&[0.6, 0.5])],
        )
        .unwrap();
        let mut st = PlannerState::new(p2, crate::search::PlannerConfig::default(), 0);
        st.sync_after_manual_insert(0.25);
        st.reverse_search();
        let (v_s, v_t) = (st.start_id, st.goal_ids[0]);
        assert!(graft(&mut st, (v_s, v_t)).is_none());
    }

    /// Brute-force oracle: enumerate every common neighbor, exactly check
    /// both legs, and take the minimal cost key among valid pairs.
    #[test]
    fn scan_matches_brute_force_on_random_scenarios() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let mut scenarios = 0;
        while scenarios < 200 {
            let n_obs = rng.gen_range(1..=3);
            let obstacles: Vec<AxisBox> = (0..n_obs)
                .map(|_| {
                    let cx: f64 = rng.gen_range(0.2..0.8);
                    let cy: f64 = rng.gen_range(0.2..0.8);
                    let wx: f64 = rng.gen_range(0.02..0.15);
                    let wy: f64 = rng.gen_range(0.02..0.15);
                    bx(
                        &[(cx - wx).max(0.0), (cy - wy).max(0.0)],
                        &[(cx + wx).min(1.0), (cy + wy).min(1.0)],
                    )
                })
                .collect();
            let Ok(p) = ProblemDef::new(
                2,
                obstacles,
                s(&[0.05, 0.05]),
                vec![s(&[0.95, 0.95])],
            ) else {
                continue;
            };
            let count = rng.gen_range(50..=500);
            let Ok(pts) = p.sample_free_uniform(&mut rng, count) else {
                continue;
            };
            let mut store = SampleStore::new(2);
            let ids = store.add_batch(&pts);
            let r: f64 = rng.gen_range(0.1..0.35);
            store.set_query_radius(r);

            // pick an invalid edge among nearby pairs
            let mut invalid = None;
            for _ in 0..200 {
                let a = ids[rng.gen_range(0..ids.len())];
                let b = ids[rng.gen_range(0..ids.len())];
                if a == b || store.state(a).distance(store.state(b)) > r {
                    continue;
                }
                if !p.segment_valid(store.state(a), store.state(b)).unwrap() {
                    invalid = Some((a, b));
                    break;
                }
            }
            let Some((v_s, v_t)) = invalid else { continue };
            scenarios += 1;

            let level = rng.gen_range(1..=3u32);
            let leg_effort = ProblemDef::sparse_check_effort(level);
            let pairs = build_edge_pairs(&store, v_s, v_t, r, leg_effort, |_| false);
            let got = scan_edge_pairs(
                &pairs,
                |kind, a, b| match kind {
                    LegCheck::Lazy => {
                        p.sparse_segment_check(store.state(a), store.state(b), level)
                    }
                    LegCheck::Full => p.segment_valid(store.state(a), store.state(b)).unwrap(),
                },
                |_| {},
            );

            // oracle: exact checks only, global minimum over valid pairs
            let commons = store.common_neighbors(store.state(v_s), store.state(v_t), r);
            let best = commons
                .iter()
                .filter(|&&via| {
                    p.segment_valid(store.state(v_s), store.state(via)).unwrap()
                        && p.segment_valid(store.state(via), store.state(v_t)).unwrap()
                })
                .map(|&via| EdgePair::new(&store, v_s, v_t, via, leg_effort))
                .min_by(|a, b| a.key().partial_cmp(&b.key()).unwrap());

            match (got, best) {
                (None, None) => {}
                (Some(g), Some(b)) => {
                    assert_eq!(g.via, b.via, "selected via mismatch");
                    assert_relative_eq!(g.key_cost, b.key_cost, epsilon = 1e-12);
                }
                (g, b) => panic!("scan {g:?} disagrees with oracle {b:?}"),
            }
        }
    }
}
