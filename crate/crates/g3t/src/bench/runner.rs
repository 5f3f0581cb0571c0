//! Trial runner: planner variants, per-trial records, suite execution with
//! deterministic aggregation, and CSV round-tripping.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::env::{BenchError, EnvSpec};
use crate::bench::rrt_connect::{plan_rrt_connect, RrtConnectConfig};
use crate::bench::stats::SummaryStats;
use crate::search::{plan, Budget, PlanOutcome, PlannerConfig};

/// Planner variants under benchmark: the full planner, the two ablations,
/// and the RRT-Connect baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlannerKind {
    G3t,
    G3tNoGraft,
    G3tInformedOnly,
    RrtConnect,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 4] = [
        PlannerKind::G3t,
        PlannerKind::G3tNoGraft,
        PlannerKind::G3tInformedOnly,
        PlannerKind::RrtConnect,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PlannerKind::G3t => "g3t",
            PlannerKind::G3tNoGraft => "g3t-nograft",
            PlannerKind::G3tInformedOnly => "g3t-informed-only",
            PlannerKind::RrtConnect => "rrt-connect",
        }
    }

    pub fn parse(name: &str) -> Option<PlannerKind> {
        PlannerKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Planner configuration with the variant's ablation flags applied.
    pub fn configure(&self, base: &PlannerConfig) -> PlannerConfig {
        let mut cfg = base.clone();
        match self {
            PlannerKind::G3t => {}
            PlannerKind::G3tNoGraft => cfg.grafting_enabled = false,
            PlannerKind::G3tInformedOnly => cfg.guild_enabled = false,
            PlannerKind::RrtConnect => {}
        }
        cfg
    }
}

/// One benchmark trial: identity, outcome, and effort accounting. The cost
/// trace records `(iteration, full_checks, cost)` per improvement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub env: String,
    pub dim: usize,
    pub variation: u32,
    pub planner: String,
    pub seed: u64,
    pub success: bool,
    pub init_checks: f64,
    pub init_cost: f64,
    pub final_cost: f64,
    pub graft_attempts: u64,
    pub graft_successes: u64,
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cost_trace: Vec<(u64, u64, f64)>,
}

impl TrialRecord {
    pub fn from_outcome(
        env: &EnvSpec,
        dim: usize,
        variation: u32,
        planner: PlannerKind,
        seed: u64,
        outcome: &PlanOutcome,
    ) -> Self {
        let first = outcome.first_solution();
        TrialRecord {
            env: env.family().to_string(),
            dim,
            variation,
            planner: planner.name().to_string(),
            seed,
            success: outcome.success,
            init_checks: first.map_or(f64::INFINITY, |s| s.full_checks as f64),
            init_cost: first.map_or(f64::INFINITY, |s| s.path.cost),
            final_cost: outcome.final_cost,
            graft_attempts: outcome.graft_attempts,
            graft_successes: outcome.graft_successes,
            wall_ms: outcome.wall_ms,
            cost_trace: outcome
                .solutions
                .iter()
                .map(|s| (s.iteration, s.full_checks, s.path.cost))
                .collect(),
        }
    }
}

/// Runs one `(environment, planner, seed)` trial.
pub fn run_trial(
    env: &EnvSpec,
    planner: PlannerKind,
    seed: u64,
    base: &PlannerConfig,
    budget: &Budget,
) -> Result<(TrialRecord, PlanOutcome), BenchError> {
    let problem = env.build()?;
    let variation = match env {
        EnvSpec::DividingWalls { variation, .. } => *variation,
        EnvSpec::RandomRects { variation, .. } => *variation,
        EnvSpec::File { .. } => 0,
    };
    let outcome = match planner {
        PlannerKind::RrtConnect => plan_rrt_connect(
            &problem,
            RrtConnectConfig::for_dim(problem.dim()),
            budget,
            seed,
        ),
        variant => {
            let cfg = variant.configure(base);
            plan(&problem, &cfg, budget, seed)
        }
    };
    let record = TrialRecord::from_outcome(env, problem.dim(), variation, planner, seed, &outcome);
    Ok((record, outcome))
}

/// A benchmark suite: environment family and dimension over the canonical
/// ten variations.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSpec {
    pub name: String,
    pub envs: Vec<EnvSpec>,
}

impl SuiteSpec {
    /// Parses `dw2`, `dw4`, `dw8`, `rr2`, `rr4`, `rr8` into ten-variation
    /// suites.
    pub fn parse(name: &str) -> Option<SuiteSpec> {
        let (family, dim) = name.split_at(2);
        let dim: usize = dim.parse().ok()?;
        let envs = (0..10)
            .map(|variation| match family {
                "dw" => Some(EnvSpec::DividingWalls { dim, variation }),
                "rr" => Some(EnvSpec::RandomRects {
                    dim,
                    variation,
                    count: super::env::default_rect_count(dim),
                }),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SuiteSpec {
            name: name.to_string(),
            envs,
        })
    }
}

/// Full benchmark result: all trials plus per-(env, planner) summaries.
#[derive(Clone, Debug)]
pub struct BenchmarkResult {
    pub records: Vec<TrialRecord>,
    pub summaries: BTreeMap<(String, String), SummaryStats>,
}

/// Runs every `(variation, seed, planner)` trial of each suite independently
/// and aggregates deterministically: records are ordered by suite, variation,
/// seed, and planner regardless of execution order.
pub fn run_benchmark(
    suites: &[SuiteSpec],
    planners: &[PlannerKind],
    trials: u64,
    base: &PlannerConfig,
    budget: &Budget,
) -> Result<BenchmarkResult, BenchError> {
    let mut jobs = Vec::new();
    for suite in suites {
        for (variation, env) in suite.envs.iter().enumerate() {
            for seed in 0..trials {
                for &planner in planners {
                    // the sample sequence depends on (variation, seed) only,
                    // so planner variants are compared on identical draws
                    let rng_seed = ((variation as u64) << 32) | seed;
                    jobs.push((suite.name.clone(), env.clone(), planner, rng_seed));
                }
            }
        }
    }
    let results: Vec<Result<TrialRecord, String>> = jobs
        .par_iter()
        .map(|(suite_name, env, planner, seed)| {
            run_trial(env, *planner, *seed, base, budget)
                .map(|(mut rec, _)| {
                    rec.env = suite_name.clone();
                    rec
                })
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => return Err(crate::space::SpaceError::InvalidProblem(e).into()),
        }
    }

    let mut summaries = BTreeMap::new();
    let mut groups: BTreeMap<(String, String), Vec<&TrialRecord>> = BTreeMap::new();
    for rec in &records {
        groups
            .entry((rec.env.clone(), rec.planner.clone()))
            .or_default()
            .push(rec);
    }
    for (key, group) in groups {
        let successes = group.iter().filter(|r| r.success).count();
        let init_checks: Vec<f64> = group.iter().map(|r| r.init_checks).collect();
        let init_cost: Vec<f64> = group.iter().map(|r| r.init_cost).collect();
        let final_cost: Vec<f64> = group.iter().map(|r| r.final_cost).collect();
        summaries.insert(
            key,
            SummaryStats::from_metrics(successes, group.len(), &init_checks, &init_cost, &final_cost),
        );
    }
    Ok(BenchmarkResult { records, summaries })
}

const CSV_HEADER: [&str; 12] = [
    "env",
    "dim",
    "variation",
    "planner",
    "seed",
    "success",
    "init_checks",
    "init_cost",
    "final_cost",
    "graft_attempts",
    "graft_successes",
    "wall_ms",
];

/// Writes trial records with the fixed benchmark column set.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(&[
            r.env.clone(),
            r.dim.to_string(),
            r.variation.to_string(),
            r.planner.clone(),
            r.seed.to_string(),
            r.success.to_string(),
            r.init_checks.to_string(),
            r.init_cost.to_string(),
            r.final_cost.to_string(),
            r.graft_attempts.to_string(),
            r.graft_successes.to_string(),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a benchmark CSV back into records (without cost traces).
pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        out.push(TrialRecord {
            env: row[0].to_string(),
            dim: row[1].parse().unwrap(),
            variation: row[2].parse().unwrap(),
            planner: row[3].to_string(),
            seed: row[4].parse().unwrap(),
            success: row[5].parse().unwrap(),
            init_checks: row[6].parse().unwrap(),
            init_cost: row[7].parse().unwrap(),
            final_cost: row[8].parse().unwrap(),
            graft_attempts: row[9].parse().unwrap(),
            graft_successes: row[10].parse().unwrap(),
            wall_ms: row[11].parse().unwrap(),
            cost_trace: Vec::new(),
        });
    }
    Ok(out)
}
