//! Benchmark worlds, baselines, trial runner, statistics, the 2D optimality
//! oracle, and the SVG renderer.

mod env;
mod oracle;
mod render;
mod rrt_connect;
mod runner;
mod stats;

pub use env::{gen_dividing_walls, gen_random_rects, default_rect_count, BenchError, EnvSpec};
pub use oracle::shortest_path_oracle_2d;
pub use render::render_svg;
pub use rrt_connect::{plan_rrt_connect, RrtConnectConfig};
pub use runner::{
    run_benchmark, run_trial, BenchmarkResult, PlannerKind, SuiteSpec, TrialRecord,
    read_csv, write_csv,
};
pub use stats::{binomial_cdf, median_ci99, sign_test_p_value, SummaryStats};
