//! Asymmetric bidirectional anytime planner core: lazy reverse search
//! supplying admissible cost-to-go estimates, a fully checked forward
//! search over an edge queue, the batch loop, pruning, and termination.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::events::{EventRecord, PlannerEvent, SpheroidInfo};
use crate::grafting;
use crate::guild::{build_g2, GuildSubsets};
use crate::hist::{
    historical_sampling, informed_only_sampling, AllocationMode, BatchSample, ImprovementTracker,
    SamplingContext,
};
use crate::rgg::{radius_measure, rgg_radius, RadiusParams, SampleStore, VertexId};
use crate::space::{ProblemDef, ProlateHyperspheroid, SolutionPath, SpaceError, State};

/// Planner parameters. Defaults match the benchmark settings.
#[derive(Clone, Debug)]
pub struct PlannerConfig {
    pub eta: f64,
    pub rewire_factor: f64,
    pub batch_size: usize,
    pub theta: u32,
    pub allocation: AllocationMode,
    pub resolution_cap: u32,
    /// Repair invalid connecting edges through common neighbors instead of
    /// restarting the reverse search.
    pub grafting_enabled: bool,
    /// Greedy GuILD subsets plus the historical allocation controller; when
    /// off, sampling falls back to the plain informed set.
    pub guild_enabled: bool,
    pub log_events: bool,
    /// Safety stop: end the run after this many consecutive batches without
    /// a single forward step (e.g. an unreachable goal under a check budget).
    pub max_stalled_batches: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            eta: 1.001,
            rewire_factor: 1.2,
            batch_size: 100,
            theta: 3,
            allocation: AllocationMode::Prose,
            resolution_cap: 16,
            grafting_enabled: true,
            guild_enabled: true,
            log_events: false,
            max_stalled_batches: 64,
        }
    }
}

/// Termination criteria; planning stops when any bound is hit.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    pub max_full_checks: Option<u64>,
    pub max_iterations: Option<u64>,
    pub max_batches: Option<u64>,
    pub max_wall_ms: Option<u64>,
    pub target_cost: Option<f64>,
    pub stop_after_first: bool,
}

impl Budget {
    pub fn checks(n: u64) -> Self {
        Budget {
            max_full_checks: Some(n),
            ..Default::default()
        }
    }

    pub fn first_solution(n: u64) -> Self {
        Budget {
            max_full_checks: Some(n),
            stop_after_first: true,
            ..Default::default()
        }
    }
}

/// Admissible edge estimates: Euclidean cost and the number of interior
/// points a sparse check evaluates at the given resolution level.
pub fn edge_heuristics(u: &State, v: &State, level: u32) -> (f64, f64) {
    (u.distance(v), ProblemDef::sparse_check_effort(level))
}

/// A strictly improving solution with the effort it took to reach it.
#[derive(Clone, Debug)]
pub struct EmittedSolution {
    pub iteration: u64,
    pub full_checks: u64,
    pub path: SolutionPath,
}

/// Result of a planning run.
#[derive(Clone, Debug)]
pub struct PlanOutcome {
    pub solutions: Vec<EmittedSolution>,
    pub success: bool,
    pub final_cost: f64,
    pub full_checks: u64,
    pub sparse_checks: u64,
    pub iterations: u64,
    pub batches: u64,
    pub graft_attempts: u64,
    pub graft_successes: u64,
    pub wall_ms: u64,
    pub events: Vec<EventRecord>,
}

impl PlanOutcome {
    /// Effort at the first solution, if any.
    pub fn first_solution(&self) -> Option<&EmittedSolution> {
        self.solutions.first()
    }
}

/// One outcome of popping the best edge candidate.
#[derive(Clone, Debug)]
pub enum StepOutcome {
    EdgeAccepted,
    EdgeInvalid((VertexId, VertexId)),
    SolutionImproved(SolutionPath),
    QueueExhausted,
}

/// Queue entry keyed by `g_F(src) + c_hat(src, dst) + h_R(dst)`, tie-broken
/// by estimated effort, then source and target ids. Keys are finite by
/// construction. Ordered for a min-heap.
#[derive(Clone, Debug)]
struct EdgeCandidate {
    key: f64,
    effort: f64,
    src: usize,
    dst: usize,
    g_src: f64,
}

impl PartialEq for EdgeCandidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for EdgeCandidate {}
impl PartialOrd for EdgeCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EdgeCandidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want the smallest key on top
        other
            .key
            .partial_cmp(&self.key)
            .unwrap()
            .then_with(|| other.effort.partial_cmp(&self.effort).unwrap())
            .then_with(|| other.src.cmp(&self.src))
            .then_with(|| other.dst.cmp(&self.dst))
    }
}

/// Min-heap key for the reverse Dijkstra.
#[derive(Clone, Copy, Debug)]
struct ReverseCandidate {
    dist: f64,
    id: usize,
}

impl PartialEq for ReverseCandidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ReverseCandidate {}
impl PartialOrd for ReverseCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ReverseCandidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn norm_edge(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// The planner: problem, sample store, forward and reverse trees, edge
/// queue, sampling controller, and effort counters. Confined to one thread.
pub struct PlannerState {
    pub(crate) problem: ProblemDef,
    pub(crate) config: PlannerConfig,
    pub(crate) store: SampleStore,
    pub(crate) start_id: VertexId,
    pub(crate) goal_ids: Vec<VertexId>,
    pub(crate) radius: f64,

    // forward tree: cost-to-come, parents, children
    pub(crate) g: Vec<f64>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    /// edges that failed the exact check; geometry is static so they stay bad
    pub(crate) invalid_edges: HashSet<(usize, usize)>,

    // lazy reverse tree
    pub(crate) h: Vec<f64>,
    rev_parent: Vec<Option<usize>>,
    pub(crate) level: u32,
    /// highest sparse resolution each edge has passed; failures are recorded
    /// permanently in `invalid_edges` (the sparse check is one-sided)
    lazy_passed: HashMap<(usize, usize), u32>,

    queue: BinaryHeap<EdgeCandidate>,

    pub(crate) best_cost: f64,
    best_path: Option<SolutionPath>,
    best_path_ids: Vec<usize>,

    tracker: ImprovementTracker,
    g2: Option<GuildSubsets>,
    c_prev_batch: f64,

    pub(crate) full_checks: u64,
    pub(crate) sparse_checks: u64,
    pub(crate) iterations: u64,
    pub(crate) batches: u64,
    pub(crate) graft_attempts: u64,
    pub(crate) graft_successes: u64,

    /// vias that already failed for an invalid edge, per batch
    pub(crate) failed_vias: HashMap<(usize, usize), HashSet<usize>>,

    pub(crate) events: Vec<EventRecord>,
    pub(crate) solutions: Vec<EmittedSolution>,
    rng: ChaCha8Rng,
}

impl PlannerState {
    pub fn new(problem: ProblemDef, config: PlannerConfig, seed: u64) -> Self {
        let mut store = SampleStore::new(problem.dim());
        let start_id = store.add_batch(std::slice::from_ref(problem.start()))[0];
        let goal_ids = store.add_batch(problem.goals());
        let tracker = ImprovementTracker::new(config.theta, config.batch_size, config.allocation);
        let mut st = PlannerState {
            problem,
            config,
            store,
            start_id,
            goal_ids,
            radius: 1.0,
            g: Vec::new(),
            parent: Vec::new(),
            children: Vec::new(),
            invalid_edges: HashSet::new(),
            h: Vec::new(),
            rev_parent: Vec::new(),
            level: 1,
            lazy_passed: HashMap::new(),
            queue: BinaryHeap::new(),
            best_cost: f64::INFINITY,
            best_path: None,
            best_path_ids: Vec::new(),
            tracker,
            g2: None,
            c_prev_batch: f64::INFINITY,
            full_checks: 0,
            sparse_checks: 0,
            iterations: 0,
            batches: 0,
            graft_attempts: 0,
            graft_successes: 0,
            failed_vias: HashMap::new(),
            events: Vec::new(),
            solutions: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        st.ensure_capacity();
        st.g[st.start_id.0] = 0.0;
        st
    }

    pub fn problem(&self) -> &ProblemDef {
        &self.problem
    }

    pub fn best_cost(&self) -> f64 {
        self.best_cost
    }

    pub fn best_path(&self) -> Option<&SolutionPath> {
        self.best_path.as_ref()
    }

    fn ensure_capacity(&mut self) {
        let n = self.store.capacity_ids();
        self.g.resize(n, f64::INFINITY);
        self.parent.resize(n, None);
        self.children.resize(n, Vec::new());
        self.h.resize(n, f64::INFINITY);
        self.rev_parent.resize(n, None);
    }

    /// Test support: after inserting states directly into the store, size the
    /// bookkeeping arrays and fix the connection radius.
    #[cfg(test)]
    pub(crate) fn sync_after_manual_insert(&mut self, radius: f64) {
        self.ensure_capacity();
        self.radius = radius;
        self.store.set_query_radius(radius);
    }

    pub(crate) fn emit(&mut self, event: PlannerEvent) {
        if self.config.log_events {
            self.events.push(EventRecord {
                event,
                iteration: self.iterations,
            });
        }
    }

    fn dist_ids(&self, a: usize, b: usize) -> f64 {
        self.store
            .state(VertexId(a))
            .distance(self.store.state(VertexId(b)))
    }

    /// Sparse segment check at the current resolution level. Passed levels
    /// are cached per edge and only the refinement points a higher level adds
    /// are evaluated; a sparse failure proves the edge invalid for good.
    pub(crate) fn sparse_check_cached(&mut self, a: usize, b: usize) -> bool {
        let key = norm_edge(a, b);
        if self.invalid_edges.contains(&key) {
            return false;
        }
        let cached = self.lazy_passed.get(&key).copied().unwrap_or(0);
        if cached >= self.level {
            return true;
        }
        self.sparse_checks += 1;
        let ok = self.problem.sparse_check_increment(
            self.store.state(VertexId(key.0)).coords(),
            self.store.state(VertexId(key.1)).coords(),
            cached,
            self.level,
        );
        if ok {
            self.lazy_passed.insert(key, self.level);
        } else {
            self.lazy_passed.remove(&key);
            self.invalid_edges.insert(key);
        }
        ok
    }

    /// Exact segment check; counts one full check per invocation. Edges known
    /// invalid are rejected without re-checking.
    pub(crate) fn full_check(&mut self, a: usize, b: usize) -> bool {
        let key = norm_edge(a, b);
        if self.invalid_edges.contains(&key) {
            return false;
        }
        self.full_checks += 1;
        let ok = self.problem.segment_valid_unchecked(
            self.store.state(VertexId(key.0)).coords(),
            self.store.state(VertexId(key.1)).coords(),
        );
        if !ok {
            self.invalid_edges.insert(key);
        }
        ok
    }

    /// Label-setting reverse search from all goals over the RGG at the
    /// current radius, expanding only edges that pass the sparse check at the
    /// current resolution level.
    pub(crate) fn reverse_search(&mut self) {
        self.ensure_capacity();
        for v in self.h.iter_mut() {
            *v = f64::INFINITY;
        }
        for p in self.rev_parent.iter_mut() {
            *p = None;
        }
        let mut heap = BinaryHeap::new();
        for gid in self.goal_ids.clone() {
            self.h[gid.0] = 0.0;
            heap.push(ReverseCandidate {
                dist: 0.0,
                id: gid.0,
            });
        }
        while let Some(ReverseCandidate { dist, id }) = heap.pop() {
            if dist > self.h[id] {
                continue;
            }
            for nb in self.store.neighbors_of(VertexId(id), self.radius) {
                let nb = nb.0;
                if self.invalid_edges.contains(&norm_edge(id, nb)) {
                    continue;
                }
                let cand = dist + self.dist_ids(id, nb);
                if cand < self.h[nb] && self.sparse_check_cached(id, nb) {
                    self.h[nb] = cand;
                    self.rev_parent[nb] = Some(id);
                    heap.push(ReverseCandidate { dist: cand, id: nb });
                }
            }
        }
    }

    fn emit_reverse_tree(&mut self) {
        if !self.config.log_events {
            return;
        }
        let mut edges = Vec::new();
        for id in self.store.ids() {
            if let Some(par) = self.rev_parent[id.0] {
                edges.push((
                    self.store.state(id).coords().to_vec(),
                    self.store.state(VertexId(par)).coords().to_vec(),
                ));
            }
        }
        self.emit(PlannerEvent::ReverseTree { edges });
    }

    /// Enqueues the outgoing edges of a forward-tree vertex: neighbors with a
    /// finite cost-to-go whose connection could improve their cost-to-come.
    pub(crate) fn enqueue_out_edges(&mut self, src: usize) {
        debug_assert!(self.g[src].is_finite());
        let effort = ProblemDef::sparse_check_effort(self.level);
        for nb in self.store.neighbors_of(VertexId(src), self.radius) {
            let dst = nb.0;
            if self.invalid_edges.contains(&norm_edge(src, dst)) {
                continue;
            }
            if !self.h[dst].is_finite() {
                continue;
            }
            let cost_est = self.dist_ids(src, dst);
            if self.g[src] + cost_est >= self.g[dst] {
                continue;
            }
            let key = self.g[src] + cost_est + self.h[dst];
            if key >= self.best_cost {
                continue;
            }
            self.queue.push(EdgeCandidate {
                key,
                effort,
                src,
                dst,
                g_src: self.g[src],
            });
        }
    }

    /// Rebuilds the edge queue from every forward-tree vertex.
    fn seed_queue(&mut self) {
        self.queue.clear();
        let tree: Vec<usize> = (0..self.g.len())
            .filter(|&i| self.g[i].is_finite() && self.store.get(VertexId(i)).is_some())
            .collect();
        for src in tree {
            self.enqueue_out_edges(src);
        }
    }

    /// Drops queue entries that are stale (their source has been re-wired to
    /// a cheaper cost) or point along a known-invalid edge.
    fn clean_queue_top(&mut self) {
        while let Some(top) = self.queue.peek() {
            if self.g[top.src] != top.g_src
                || self.invalid_edges.contains(&norm_edge(top.src, top.dst))
            {
                self.queue.pop();
            } else {
                return;
            }
        }
    }

    /// True iff the best queue key could strictly improve the current best
    /// solution.
    pub fn could_improve(&mut self) -> bool {
        self.clean_queue_top();
        self.queue
            .peek()
            .is_some_and(|top| top.key < self.best_cost)
    }

    /// Pops and processes the best edge candidate.
    pub fn forward_step(&mut self) -> StepOutcome {
        self.clean_queue_top();
        let Some(cand) = self.queue.pop() else {
            return StepOutcome::QueueExhausted;
        };
        let (src, dst) = (cand.src, cand.dst);
        let cost = self.dist_ids(src, dst);
        if self.g[src] + cost >= self.g[dst] {
            // dominated: the target is already reached at least as cheaply
            return StepOutcome::EdgeAccepted;
        }
        if !self.full_check(src, dst) {
            self.emit(PlannerEvent::EdgeInvalid {
                source_id: src,
                target_id: dst,
                source: self.store.state(VertexId(src)).coords().to_vec(),
                target: self.store.state(VertexId(dst)).coords().to_vec(),
            });
            return StepOutcome::EdgeInvalid((VertexId(src), VertexId(dst)));
        }
        match self.accept_validated_edge(src, dst) {
            Some(path) => StepOutcome::SolutionImproved(path),
            None => StepOutcome::EdgeAccepted,
        }
    }

    /// Inserts or rewires `dst` through a fully validated edge from `src`,
    /// propagates cost improvements through the subtree, expands the updated
    /// vertices, and records any goal improvement. Returns the new best path
    /// when one was found.
    pub(crate) fn accept_validated_edge(&mut self, src: usize, dst: usize) -> Option<SolutionPath> {
        let cost = self.dist_ids(src, dst);
        if self.g[src] + cost >= self.g[dst] {
            return None;
        }
        self.emit(PlannerEvent::EdgeAccept {
            source_id: src,
            target_id: dst,
            source: self.store.state(VertexId(src)).coords().to_vec(),
            target: self.store.state(VertexId(dst)).coords().to_vec(),
        });
        if let Some(old) = self.parent[dst] {
            self.children[old].retain(|&c| c != dst);
        }
        self.parent[dst] = Some(src);
        self.children[src].push(dst);
        self.g[dst] = self.g[src] + cost;

        // propagate exact path sums through the rewired subtree
        let mut changed = vec![dst];
        let mut stack = vec![dst];
        while let Some(v) = stack.pop() {
            let kids = self.children[v].clone();
            for child in kids {
                if self.store.get(VertexId(child)).is_none() {
                    continue;
                }
                self.g[child] = self.g[v] + self.dist_ids(v, child);
                changed.push(child);
                stack.push(child);
            }
        }
        for &v in &changed {
            self.enqueue_out_edges(v);
        }

        // goal improvements: emit the best one
        let mut best_goal: Option<usize> = None;
        for gid in &self.goal_ids {
            if changed.contains(&gid.0) && self.g[gid.0] < self.best_cost {
                match best_goal {
                    Some(b) if self.g[b] <= self.g[gid.0] => {}
                    _ => best_goal = Some(gid.0),
                }
            }
        }
        best_goal.map(|goal| self.record_solution(goal))
    }

    fn record_solution(&mut self, goal: usize) -> SolutionPath {
        let mut ids = vec![goal];
        let mut cur = goal;
        while let Some(par) = self.parent[cur] {
            ids.push(par);
            cur = par;
        }
        debug_assert_eq!(cur, self.start_id.0, "solution path must reach the start");
        ids.reverse();
        let vertices: Vec<State> = ids
            .iter()
            .map(|&i| self.store.state(VertexId(i)).clone())
            .collect();
        let path = SolutionPath {
            vertices,
            cost: self.g[goal],
        };
        debug_assert!(path.cost < self.best_cost);
        self.best_cost = path.cost;
        self.best_path = Some(path.clone());
        self.best_path_ids = ids;
        self.solutions.push(EmittedSolution {
            iteration: self.iterations,
            full_checks: self.full_checks,
            path: path.clone(),
        });
        self.emit(PlannerEvent::Solution {
            cost: path.cost,
            full_checks: self.full_checks,
            vertices: path.vertices.iter().map(|v| v.coords().to_vec()).collect(),
        });
        self.refresh_guild_subsets(&path);
        path
    }

    /// Rebuilds the greedy subsets from the improved path; paths without an
    /// interior vertex leave the subsets unset and sampling falls back to the
    /// informed set.
    fn refresh_guild_subsets(&mut self, path: &SolutionPath) {
        if !self.config.guild_enabled {
            return;
        }
        self.g2 = build_g2(path, &self.problem).ok();
        if let Some(g2) = &self.g2 {
            let info = |s: &Option<ProlateHyperspheroid>| {
                s.as_ref().map(|p| SpheroidInfo {
                    focus_a: p.focus_a().coords().to_vec(),
                    focus_b: p.focus_b().coords().to_vec(),
                    transverse_cost: p.transverse_cost(),
                    c_min: p.c_min(),
                })
            };
            let ev = PlannerEvent::Beacon {
                beacon: g2.beacon.coords().to_vec(),
                front: info(&g2.front),
                back: info(&g2.back),
                greedy_front_vertex: g2.greedy_front_vertex.coords().to_vec(),
                greedy_back_vertex: g2.greedy_back_vertex.coords().to_vec(),
            };
            self.emit(ev);
        }
    }

    /// Raises the sparse-check resolution and recomputes the reverse search
    /// and the edge queue. Returns false when the per-batch cap is exhausted
    /// and the batch should be abandoned.
    pub fn update_reverse_resolution(&mut self) -> bool {
        if self.level >= self.config.resolution_cap {
            return false;
        }
        self.level += 1;
        self.reverse_search();
        self.seed_queue();
        true
    }

    /// Samples the next batch per the controller, inserts it, recomputes the
    /// radius and the reverse search, and reseeds the queue.
    fn begin_batch(&mut self) -> Result<(), SpaceError> {
        let c_prev = self.c_prev_batch;
        let c_curr = self.best_cost;
        self.c_prev_batch = c_curr;

        let ctx = SamplingContext {
            problem: &self.problem,
            c_prev,
            c_curr,
            g2: self.g2.as_ref(),
        };
        let BatchSample {
            states,
            m_g2,
            m_informed,
            cci,
            hci,
            level,
        } = if self.config.guild_enabled {
            historical_sampling(&mut self.tracker, &ctx, &mut self.rng)?
        } else {
            informed_only_sampling(&ctx, &mut self.rng, self.config.batch_size)?
        };

        self.store.add_batch(&states);
        self.ensure_capacity();

        let m = self.store.len();
        let measure = radius_measure(
            &self.problem,
            self.best_cost.is_finite().then_some(self.best_cost),
        );
        let params = RadiusParams::new(
            self.config.eta,
            self.problem.dim(),
            measure,
            self.config.rewire_factor,
        )
        .expect("validated config");
        self.radius = rgg_radius(m.max(2), &params).expect("store holds start and goals");
        self.store.set_query_radius(self.radius);

        self.level = 1;
        self.failed_vias.clear();
        self.batches += 1;
        self.emit(PlannerEvent::Batch {
            index: self.batches - 1,
            samples_added: states.len(),
            store_size: m,
            radius: self.radius,
            level,
            m_g2,
            m_informed,
            cci,
            hci,
            pruned: 0,
        });

        self.reverse_search();
        self.emit_reverse_tree();
        self.seed_queue();
        Ok(())
    }

    /// Removes samples that cannot improve the current solution and repairs
    /// the forward tree. Solution-path vertices, the start, and the goals are
    /// always retained.
    fn prune_batch(&mut self) -> usize {
        if !self.best_cost.is_finite() {
            return 0;
        }
        let mut keep: HashSet<VertexId> = HashSet::new();
        keep.insert(self.start_id);
        keep.extend(self.goal_ids.iter().copied());
        keep.extend(self.best_path_ids.iter().map(|&i| VertexId(i)));
        let removed = self.store.prune(&self.problem, self.best_cost, &keep);
        if removed.is_empty() {
            return 0;
        }
        for id in &removed {
            self.g[id.0] = f64::INFINITY;
            self.parent[id.0] = None;
            self.children[id.0].clear();
        }
        // detach orphaned subtrees: anything not reachable from the start
        let mut reachable = vec![false; self.g.len()];
        let mut stack = vec![self.start_id.0];
        reachable[self.start_id.0] = true;
        while let Some(v) = stack.pop() {
            self.children[v].retain(|&c| self.store.get(VertexId(c)).is_some());
            for &c in &self.children[v] {
                if !reachable[c] {
                    reachable[c] = true;
                    stack.push(c);
                }
            }
        }
        for i in 0..self.g.len() {
            if self.g[i].is_finite() && !reachable[i] {
                self.g[i] = f64::INFINITY;
                self.parent[i] = None;
                self.children[i].clear();
            }
        }
        removed.len()
    }

    fn update_pruned_count(&mut self, pruned: usize) {
        if !self.config.log_events || pruned == 0 {
            return;
        }
        // the prune belongs to the batch that just finished
        for rec in self.events.iter_mut().rev() {
            if let PlannerEvent::Batch { pruned: p, .. } = &mut rec.event {
                *p = pruned;
                break;
            }
        }
    }
}

struct Deadline {
    start: Instant,
    budget: Budget,
}

impl Deadline {
    fn reached(&self, st: &PlannerState) -> bool {
        let b = &self.budget;
        if b.max_full_checks.is_some_and(|m| st.full_checks >= m) {
            return true;
        }
        if b.max_iterations.is_some_and(|m| st.iterations >= m) {
            return true;
        }
        if b.max_batches.is_some_and(|m| st.batches >= m) {
            return true;
        }
        if b.max_wall_ms
            .is_some_and(|m| self.start.elapsed().as_millis() as u64 >= m)
        {
            return true;
        }
        if b.target_cost.is_some_and(|t| st.best_cost <= t) {
            return true;
        }
        if b.stop_after_first && st.best_cost.is_finite() {
            return true;
        }
        false
    }
}

/// Runs the anytime planner: sample batch, radius update, lazy reverse
/// search, forward search with grafting, prune; emits every strictly
/// improving solution until the budget is exhausted.
pub fn plan(problem: &ProblemDef, config: &PlannerConfig, budget: &Budget, seed: u64) -> PlanOutcome {
    let started = Instant::now();
    let mut st = PlannerState::new(problem.clone(), config.clone(), seed);
    let deadline = Deadline {
        start: started,
        budget: budget.clone(),
    };

    let mut stalled_batches = 0u32;
    while !deadline.reached(&st) && stalled_batches < config.max_stalled_batches {
        if st.begin_batch().is_err() {
            // sampling saturated: the free space is effectively blocked
            break;
        }
        let iterations_before = st.iterations;
        while !deadline.reached(&st) && st.could_improve() {
            st.iterations += 1;
            match st.forward_step() {
                StepOutcome::EdgeInvalid(edge) => {
                    let mut repaired = false;
                    if st.config.grafting_enabled {
                        repaired = grafting::graft(&mut st, edge).is_some();
                    }
                    if !repaired && !st.update_reverse_resolution() {
                        break; // resolution cap: abandon the batch
                    }
                }
                StepOutcome::QueueExhausted => break,
                StepOutcome::EdgeAccepted | StepOutcome::SolutionImproved(_) => {}
            }
        }
        if st.iterations == iterations_before {
            stalled_batches += 1;
        } else {
            stalled_batches = 0;
        }
        let pruned = st.prune_batch();
        st.update_pruned_count(pruned);
    }

    let success = st.best_path.is_some();
    PlanOutcome {
        success,
        final_cost: st.best_cost,
        full_checks: st.full_checks,
        sparse_checks: st.sparse_checks,
        iterations: st.iterations,
        batches: st.batches,
        graft_attempts: st.graft_attempts,
        graft_successes: st.graft_successes,
        wall_ms: started.elapsed().as_millis() as u64,
        solutions: std::mem::take(&mut st.solutions),
        events: std::mem::take(&mut st.events),
    }
}
