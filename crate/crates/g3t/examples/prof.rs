use g3t::bench::gen_dividing_walls;
use g3t::search::{plan, Budget, PlannerConfig};
use std::time::Instant;

fn main() {
    let p = gen_dividing_walls(2, 0);
    let t0 = Instant::now();
    let budget = Budget {
        max_batches: Some(40),
        ..Budget::checks(10_000)
    };
    let out = plan(&p, &PlannerConfig::default(), &budget, 7);
    eprintln!(
        "elapsed={:?} success={} cost={:.4} checks={} sparse={} iters={} batches={} grafts={}/{}",
        t0.elapsed(),
        out.success,
        out.final_cost,
        out.full_checks,
        out.sparse_checks,
        out.iterations,
        out.batches,
        out.graft_successes,
        out.graft_attempts,
    );
}
