//! Anytime sampling-based motion planning in the unit hypercube.
//!
//! The planner grows a fully collision-checked forward tree guided by a lazy,
//! sparsely checked reverse search over a batched random geometric graph.
//! Invalid connecting edges are repaired by grafting through common RGG
//! neighbors instead of restarting the reverse search. Once a solution
//! exists, sampling concentrates on greedy GuILD subsets around a
//! measure-minimal beacon vertex, with a historical cost-improvement
//! controller splitting each batch between the GuILD subsets and the
//! informed set.
//!
//! The [`bench`] module provides benchmark worlds, an RRT-Connect baseline,
//! a 2D visibility-graph optimum oracle, a trial runner, and an SVG renderer.

pub mod bench;
pub mod events;
pub mod grafting;
pub mod guild;
pub mod hist;
pub mod rgg;
pub mod search;
pub mod space;

pub use search::{plan, Budget, PlanOutcome, PlannerConfig};
pub use space::{AxisBox, ProblemDef, SolutionPath, State};
