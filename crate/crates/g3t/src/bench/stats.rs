//! Order statistics: medians, nonparametric 99% confidence intervals, and a
//! one-sided sign test.

/// Cumulative probability `P(X <= k)` for `X ~ Binomial(n, 1/2)`, by the
/// exact pmf recurrence.
pub fn binomial_cdf(n: usize, k: usize) -> f64 {
    let mut pmf = 0.5f64.powi(n as i32);
    let mut cdf = 0.0;
    for i in 0..=k.min(n) {
        cdf += pmf;
        pmf *= (n - i) as f64 / (i + 1) as f64;
    }
    cdf.min(1.0)
}

/// Median and nonparametric 99% confidence interval: the `(j, k)` order
/// statistics where `j - 1` is the largest count with binomial CDF at most
/// 0.005 and `k` is the symmetric upper index. Returns `(lower, median,
/// upper)`. Infinite samples sort above every finite one.
pub fn median_ci99(samples: &[f64]) -> (f64, f64, f64) {
    assert!(!samples.is_empty(), "median of an empty sample");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        let a = sorted[n / 2 - 1];
        let b = sorted[n / 2];
        if a.is_infinite() && b.is_infinite() {
            a
        } else {
            (a + b) / 2.0
        }
    };
    // largest count t with P(X <= t) <= 0.005; the lower bound is then the
    // (t + 1)-th order statistic and the upper its symmetric partner
    let mut t: i64 = -1;
    for k in 0..n {
        if binomial_cdf(n, k) <= 0.005 {
            t = k as i64;
        } else {
            break;
        }
    }
    let lower0 = t.max(0) as usize; // 0-based index of the (t+1)-th value
    let upper0 = n - 1 - lower0;
    (sorted[lower0], median, sorted[upper0.max(lower0)])
}

/// One-sided sign test p-value: probability of at least `wins` successes in
/// `trials` fair coin flips. Small values reject "no better than chance".
pub fn sign_test_p_value(wins: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    if wins == 0 {
        return 1.0;
    }
    1.0 - binomial_cdf(trials, wins - 1)
}

/// Success rate and per-metric medians with 99% confidence bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    pub trials: usize,
    pub success_rate: f64,
    pub init_checks: (f64, f64, f64),
    pub init_cost: (f64, f64, f64),
    pub final_cost: (f64, f64, f64),
}

impl SummaryStats {
    pub fn from_metrics(
        successes: usize,
        trials: usize,
        init_checks: &[f64],
        init_cost: &[f64],
        final_cost: &[f64],
    ) -> Self {
        SummaryStats {
            trials,
            success_rate: successes as f64 / trials as f64,
            init_checks: median_ci99(init_checks),
            init_cost: median_ci99(init_cost),
            final_cost: median_ci99(final_cost),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn binomial_cdf_known_values() {
        assert_relative_eq!(binomial_cdf(4, 4), 1.0, max_relative = 1e-12);
        assert_relative_eq!(binomial_cdf(4, 2), 11.0 / 16.0, max_relative = 1e-12);
        // the n = 100 bounds behind the (37, 64) interval
        assert!(binomial_cdf(100, 36) <= 0.005);
        assert!(binomial_cdf(100, 37) > 0.005);
    }

    #[test]
    fn median_basic() {
        let (_, m, _) = median_ci99(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(m, 3.0);
        let (_, m, _) = median_ci99(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(m, 2.5);
    }

    #[test]
    fn ci_indices_n100() {
        // 1..=100: lower must be the 37th order statistic, upper the 64th
        let samples: Vec<f64> = (1..=100).map(|x| x as f64).collect();
        let (lo, med, hi) = median_ci99(&samples);
        assert_eq!(lo, 37.0);
        assert_eq!(med, 50.5);
        assert_eq!(hi, 64.0);
    }

    #[test]
    fn ci_all_equal() {
        let (lo, med, hi) = median_ci99(&[2.5; 30]);
        assert_eq!(lo, 2.5);
        assert_eq!(med, 2.5);
        assert_eq!(hi, 2.5);
    }

    #[test]
    fn ci_bounds_bracket_median() {
        let samples: Vec<f64> = (0..77).map(|x| (x as f64) * 0.37 % 5.0).collect();
        let (lo, med, hi) = median_ci99(&samples);
        assert!(lo <= med && med <= hi);
    }

    #[test]
    fn median_with_infinities() {
        let mut samples = vec![1.0, 2.0, 3.0];
        samples.extend([f64::INFINITY; 4]);
        let (_, med, hi) = median_ci99(&samples);
        assert!(med.is_infinite());
        assert!(hi.is_infinite());
    }

    #[test]
    fn sign_test_values() {
        // 9 wins out of 10: p = (1 + 10) / 1024 ~ 0.0107
        assert_relative_eq!(sign_test_p_value(9, 10), 11.0 / 1024.0, max_relative = 1e-9);
        assert_relative_eq!(sign_test_p_value(10, 10), 1.0 / 1024.0, max_relative = 1e-9);
        assert_eq!(sign_test_p_value(0, 10), 1.0);
        assert_eq!(sign_test_p_value(0, 0), 1.0);
        // 60 wins of 100 is not significant at 5%, 65 is
        assert!(sign_test_p_value(60, 100) > 0.02);
        assert!(sign_test_p_value(65, 100) < 0.05);
    }
}
