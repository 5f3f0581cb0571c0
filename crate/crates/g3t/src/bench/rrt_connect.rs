//! Bidirectional RRT-Connect baseline: extend/connect with goal bias, first
//! feasible solution only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::search::{Budget, EmittedSolution, PlanOutcome};
use crate::space::{ProblemDef, SolutionPath, State};

#[derive(Clone, Copy, Debug)]
pub struct RrtConnectConfig {
    pub goal_bias: f64,
    pub max_edge_len: f64,
}

impl RrtConnectConfig {
    /// Benchmark settings: 5% goal bias, max edge length 0.5 / 1.25 / 3.0
    /// for two-, four-, and eight-dimensional problems.
    pub fn for_dim(dim: usize) -> Self {
        let max_edge_len = if dim <= 2 {
            0.5
        } else if dim <= 4 {
            1.25
        } else {
            3.0
        };
        RrtConnectConfig {
            goal_bias: 0.05,
            max_edge_len,
        }
    }
}

struct Tree {
    nodes: Vec<State>,
    parent: Vec<Option<usize>>,
    root_is_start: bool,
}

impl Tree {
    fn new(root: State, root_is_start: bool) -> Self {
        Tree {
            nodes: vec![root],
            parent: vec![None],
            root_is_start,
        }
    }

    fn nearest(&self, q: &State) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = n.distance(q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn path_to_root(&self, mut idx: usize) -> Vec<State> {
        let mut out = vec![self.nodes[idx].clone()];
        while let Some(p) = self.parent[idx] {
            idx = p;
            out.push(self.nodes[idx].clone());
        }
        out
    }
}

enum Extend {
    Reached(usize),
    Advanced(usize),
    Trapped,
}

struct Run<'a> {
    problem: &'a ProblemDef,
    cfg: RrtConnectConfig,
    full_checks: u64,
}

impl Run<'_> {
    fn steer(&self, from: &State, to: &State) -> State {
        let d = from.distance(to);
        if d <= self.cfg.max_edge_len {
            return to.clone();
        }
        let t = self.cfg.max_edge_len / d;
        State::new(
            from.coords()
                .iter()
                .zip(to.coords())
                .map(|(a, b)| a + (b - a) * t)
                .collect(),
        )
    }

    fn extend(&mut self, tree: &mut Tree, target: &State) -> Extend {
        let nearest = tree.nearest(target);
        let q_new = self.steer(&tree.nodes[nearest].clone(), target);
        if !self.problem.point_in_free(&q_new) {
            return Extend::Trapped;
        }
        self.full_checks += 1;
        if !self
            .problem
            .segment_valid_unchecked(tree.nodes[nearest].coords(), q_new.coords())
        {
            return Extend::Trapped;
        }
        let reached = q_new.distance(target) < 1e-12;
        tree.nodes.push(q_new);
        tree.parent.push(Some(nearest));
        let idx = tree.nodes.len() - 1;
        if reached {
            Extend::Reached(idx)
        } else {
            Extend::Advanced(idx)
        }
    }

    fn connect(&mut self, tree: &mut Tree, target: &State, budget_left: impl Fn(u64) -> bool) -> Extend {
        loop {
            if !budget_left(self.full_checks) {
                return Extend::Trapped;
            }
            match self.extend(tree, target) {
                Extend::Advanced(_) => {}
                done => return done,
            }
        }
    }
}

/// Standard bidirectional extend/connect. Emits the first feasible solution
/// and stops; no optimization phase.
pub fn plan_rrt_connect(
    problem: &ProblemDef,
    cfg: RrtConnectConfig,
    budget: &Budget,
    seed: u64,
) -> PlanOutcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goal = problem.goals()[0].clone();
    let mut tree_a = Tree::new(problem.start().clone(), true);
    let mut tree_b = Tree::new(goal.clone(), false);
    let mut run = Run {
        problem,
        cfg,
        full_checks: 0,
    };
    let mut iterations = 0u64;
    let mut solution: Option<SolutionPath> = None;

    let max_checks = budget.max_full_checks.unwrap_or(u64::MAX);
    let max_iters = budget.max_iterations.unwrap_or(u64::MAX);
    let max_ms = budget.max_wall_ms.unwrap_or(u64::MAX);

    while solution.is_none()
        && run.full_checks < max_checks
        && iterations < max_iters
        && (started.elapsed().as_millis() as u64) < max_ms
    {
        iterations += 1;
        // goal bias pulls tree A toward the other tree's root
        let target = if rng.gen::<f64>() < run.cfg.goal_bias {
            tree_b.nodes[0].clone()
        } else {
            State::new((0..problem.dim()).map(|_| rng.gen::<f64>()).collect())
        };
        if let Extend::Advanced(new_idx) | Extend::Reached(new_idx) =
            run.extend(&mut tree_a, &target)
        {
            let q_new = tree_a.nodes[new_idx].clone();
            let checks_cap = max_checks;
            if let Extend::Reached(meet_idx) =
                run.connect(&mut tree_b, &q_new, move |c| c < checks_cap)
            {
                let mut part_a = tree_a.path_to_root(new_idx);
                part_a.reverse();
                let part_b = tree_b.path_to_root(meet_idx);
                // part_b starts at the meeting point, duplicated in part_a
                let mut vertices = part_a;
                vertices.extend(part_b.into_iter().skip(1));
                if !tree_a.root_is_start {
                    vertices.reverse();
                }
                solution = Some(SolutionPath::from_vertices(vertices));
            }
        }
        std::mem::swap(&mut tree_a, &mut tree_b);
    }

    let solutions: Vec<EmittedSolution> = solution
        .iter()
        .map(|path| EmittedSolution {
            iteration: iterations,
            full_checks: run.full_checks,
            path: path.clone(),
        })
        .collect();
    PlanOutcome {
        success: solution.is_some(),
        final_cost: solution.as_ref().map_or(f64::INFINITY, |s| s.cost),
        full_checks: run.full_checks,
        sparse_checks: 0,
        iterations,
        batches: 0,
        graft_attempts: 0,
        graft_successes: 0,
        wall_ms: started.elapsed().as_millis() as u64,
        solutions,
        events: Vec::new(),
    }
}
