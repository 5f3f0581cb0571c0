//! Historical distributed sampling controller: tracks current and historical
//! cost-improvement ratios and splits each batch between the greedy GuILD
//! subsets and the informed set.

use rand::Rng;
use thiserror::Error;

use crate::guild::{g2_sample, GuildError, GuildSubsets};
use crate::space::{phs_measure, ProblemDef, ProlateHyperspheroid, SpaceError, State};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HistError {
    #[error("current cost {curr} exceeds previous cost {prev}")]
    NotAnImprovement { prev: f64, curr: f64 },
}

/// How the greedy-subset share responds to marginal improvements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AllocationMode {
    /// Decreasing-exploitation schedule: share `(1 - level/theta)` under
    /// marginal improvements, full batch on substantial improvements.
    Prose,
    /// Literal rational schedule `floor(1/theta) * level * M`, which is zero
    /// for any integer threshold above one. Kept for experimentation.
    LiteralRational,
}

/// Relative cost improvement `(c_prev - c_curr) / c_prev`.
pub fn cci(c_prev: f64, c_curr: f64) -> Result<f64, HistError> {
    assert!(c_prev.is_finite() && c_curr > 0.0, "costs must be finite and positive");
    if c_curr > c_prev {
        return Err(HistError::NotAnImprovement {
            prev: c_prev,
            curr: c_curr,
        });
    }
    Ok((c_prev - c_curr) / c_prev)
}

/// Running cost-improvement statistics and the level counter driving batch
/// allocation.
#[derive(Clone, Debug)]
pub struct ImprovementTracker {
    n_imp: u64,
    cci_sum: f64,
    level: u32,
    theta: u32,
    m_curr: usize,
    mode: AllocationMode,
    last_cci: Option<f64>,
    last_alloc: Option<(usize, usize)>,
}

impl ImprovementTracker {
    pub fn new(theta: u32, m_curr: usize, mode: AllocationMode) -> Self {
        assert!(theta >= 1 && m_curr >= 1);
        ImprovementTracker {
            n_imp: 0,
            cci_sum: 0.0,
            level: 0,
            theta,
            m_curr,
            mode,
            last_cci: None,
            last_alloc: None,
        }
    }

    pub fn improvements(&self) -> u64 {
        self.n_imp
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn batch_size(&self) -> usize {
        self.m_curr
    }

    pub fn last_cci(&self) -> Option<f64> {
        self.last_cci
    }

    /// Mean of all recorded improvement ratios; zero before any record.
    pub fn hci(&self) -> f64 {
        if self.n_imp == 0 {
            0.0
        } else {
            self.cci_sum / self.n_imp as f64
        }
    }

    /// Records one improvement ratio and returns the new running mean.
    pub fn hci_update(&mut self, cci_value: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&cci_value));
        self.n_imp += 1;
        self.cci_sum += cci_value;
        self.last_cci = Some(cci_value);
        self.hci()
    }

    fn marginal_share(&self) -> usize {
        let m = self.m_curr;
        match self.mode {
            AllocationMode::Prose => {
                let share = (1.0 - self.level as f64 / self.theta as f64).max(0.0);
                (share * m as f64).floor() as usize
            }
            AllocationMode::LiteralRational => {
                let base = (1.0 / self.theta as f64).floor();
                let level = self.level.min(self.theta) as f64;
                ((base * level * m as f64) as usize).min(m)
            }
        }
    }

    /// Splits the batch between the greedy subsets and the informed set based
    /// on the most recent improvement: substantial improvements (CCI >= HCI)
    /// reset the level and devote the whole batch to the subsets; marginal
    /// improvements raise the level and shrink the subset share.
    pub fn allocate(&mut self) -> (usize, usize) {
        let cci = self.last_cci.expect("allocate requires a recorded improvement");
        let hci = self.hci();
        let m = self.m_curr;
        let m_g2 = if cci < hci {
            self.level += 1;
            self.marginal_share()
        } else {
            self.level = 0;
            m
        };
        let alloc = (m_g2, m - m_g2);
        self.last_alloc = Some(alloc);
        alloc
    }

    /// A batch whose cost did not change is a marginal event for the level
    /// counter only: the stall raises the level and shifts samples toward the
    /// informed set without recording an improvement. Keeping the previous
    /// allocation instead can starve the informed set indefinitely and with
    /// it the reverse search's goal-side connectivity.
    pub fn stall_allocate(&mut self) -> (usize, usize) {
        self.level += 1;
        let m_g2 = self.marginal_share();
        let alloc = (m_g2, self.m_curr - m_g2);
        self.last_alloc = Some(alloc);
        alloc
    }
}

/// Sampler over the informed set: per-goal spheroids at the current solution
/// cost, chosen per draw proportionally to their measures.
pub struct InformedSet {
    spheroids: Vec<ProlateHyperspheroid>,
    weights: Vec<f64>,
}

impl InformedSet {
    /// Builds per-goal spheroids at cost `c`; goals whose spheroid would be
    /// degenerate are skipped. Errors if every goal degenerates.
    pub fn new(p: &ProblemDef, c: f64) -> Result<Self, SpaceError> {
        let mut spheroids = Vec::new();
        let mut weights = Vec::new();
        for g in p.goals() {
            let c_min = p.start().distance(g);
            if c > c_min {
                if let Ok(sph) = ProlateHyperspheroid::new(p.start().clone(), g.clone(), c) {
                    weights.push(phs_measure(c, c_min, p.dim())?);
                    spheroids.push(sph);
                }
            }
        }
        if spheroids.is_empty() {
            return Err(SpaceError::DegenerateSpheroid {
                cost: c,
                c_min: p.min_cost(),
            });
        }
        Ok(InformedSet { spheroids, weights })
    }

    /// Rejection-samples `count` free states from the informed set, skipping
    /// states accepted by `reject`. Errors after 1e5 attempts per point.
    pub fn sample_free<R: Rng>(
        &self,
        p: &ProblemDef,
        rng: &mut R,
        count: usize,
        reject: impl Fn(&State) -> bool,
    ) -> Result<Vec<State>, SpaceError> {
        let total: f64 = self.weights.iter().sum();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut attempts = 0u64;
            loop {
                if attempts >= 100_000 {
                    return Err(SpaceError::SpaceSaturated { attempts });
                }
                attempts += 1;
                let mut pick = rng.gen::<f64>() * total;
                let mut idx = 0;
                for (i, w) in self.weights.iter().enumerate() {
                    idx = i;
                    if pick < *w {
                        break;
                    }
                    pick -= w;
                }
                let v = self.spheroids[idx].sample(rng)?;
                if p.point_in_free(&v) && !reject(&v) {
                    out.push(v);
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// Everything the per-batch sampler needs from the planner.
pub struct SamplingContext<'a> {
    pub problem: &'a ProblemDef,
    pub c_prev: f64,
    pub c_curr: f64,
    pub g2: Option<&'a GuildSubsets>,
}

/// One batch of samples along with the allocation it used.
#[derive(Clone, Debug)]
pub struct BatchSample {
    pub states: Vec<State>,
    pub m_g2: usize,
    pub m_informed: usize,
    pub cci: Option<f64>,
    pub hci: Option<f64>,
    pub level: u32,
}

fn uniform_batch<R: Rng>(
    p: &ProblemDef,
    rng: &mut R,
    count: usize,
) -> Result<Vec<State>, SpaceError> {
    p.sample_free_uniform(rng, count)
}

/// Samples from the greedy subsets with graceful degradation: informed set if
/// the subsets are degenerate or saturated, uniform free space if the
/// informed set is degenerate too.
fn g2_batch<R: Rng>(
    ctx: &SamplingContext,
    rng: &mut R,
    count: usize,
) -> Result<Vec<State>, SpaceError> {
    if let Some(g2) = ctx.g2 {
        match g2_sample(g2, ctx.problem, rng, count) {
            Ok(states) => return Ok(states),
            Err(GuildError::DegenerateSubsets | GuildError::SubsetSaturated { .. }) => {}
            Err(GuildError::NoInteriorVertex) => unreachable!("g2 built from a valid path"),
        }
    }
    informed_batch(ctx, rng, count, false)
}

/// Samples from the informed set, optionally excluding greedy-subset members;
/// falls back to unrestricted informed samples on saturation and to uniform
/// free samples when the informed set is degenerate.
fn informed_batch<R: Rng>(
    ctx: &SamplingContext,
    rng: &mut R,
    count: usize,
    outside_g2: bool,
) -> Result<Vec<State>, SpaceError> {
    let informed = match InformedSet::new(ctx.problem, ctx.c_curr) {
        Ok(i) => i,
        Err(_) => return uniform_batch(ctx.problem, rng, count),
    };
    if outside_g2 {
        if let Some(g2) = ctx.g2 {
            match informed.sample_free(ctx.problem, rng, count, |v| g2.in_spheroids(v)) {
                Ok(states) => return Ok(states),
                Err(SpaceError::SpaceSaturated { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    informed.sample_free(ctx.problem, rng, count, |_| false)
}

/// One batch of the historical sampling schedule: uniform free-space samples
/// before any solution, greedy-subset samples after the first solution, and
/// an allocation split driven by CCI/HCI after each improvement. An unchanged
/// cost reuses the previous allocation without recording an improvement.
pub fn historical_sampling<R: Rng>(
    tracker: &mut ImprovementTracker,
    ctx: &SamplingContext,
    rng: &mut R,
) -> Result<BatchSample, SpaceError> {
    let m = tracker.m_curr;
    let no_prev = !ctx.c_prev.is_finite();
    let no_curr = !ctx.c_curr.is_finite();

    if no_prev && no_curr {
        return Ok(BatchSample {
            states: uniform_batch(ctx.problem, rng, m)?,
            m_g2: 0,
            m_informed: 0,
            cci: None,
            hci: None,
            level: tracker.level,
        });
    }

    if no_prev {
        tracker.last_alloc = Some((m, 0));
        return Ok(BatchSample {
            states: g2_batch(ctx, rng, m)?,
            m_g2: m,
            m_informed: 0,
            cci: None,
            hci: None,
            level: tracker.level,
        });
    }

    let (m_g2, m_informed, cci_val) = if ctx.c_curr < ctx.c_prev {
        let ratio = cci(ctx.c_prev, ctx.c_curr).expect("strict improvement");
        tracker.hci_update(ratio);
        let (g2, inf) = tracker.allocate();
        (g2, inf, Some(ratio))
    } else {
        let (g2, inf) = tracker.stall_allocate();
        (g2, inf, None)
    };

    let mut states = g2_batch(ctx, rng, m_g2)?;
    states.extend(informed_batch(ctx, rng, m_informed, true)?);
    Ok(BatchSample {
        states,
        m_g2,
        m_informed,
        cci: cci_val,
        hci: if tracker.n_imp > 0 { Some(tracker.hci()) } else { None },
        level: tracker.level,
    })
}

/// Plain informed sampling, used by the ablation with the controller and the
/// greedy subsets disabled: uniform before the first solution, informed-set
/// samples afterwards.
pub fn informed_only_sampling<R: Rng>(
    ctx: &SamplingContext,
    rng: &mut R,
    m: usize,
) -> Result<BatchSample, SpaceError> {
    let states = if ctx.c_curr.is_finite() {
        informed_batch(ctx, rng, m, false)?
    } else {
        uniform_batch(ctx.problem, rng, m)?
    };
    Ok(BatchSample {
        states,
        m_g2: 0,
        m_informed: if ctx.c_curr.is_finite() { m } else { 0 },
        cci: None,
        hci: None,
        level: 0,
    })
}
