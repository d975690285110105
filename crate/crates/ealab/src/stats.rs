//! Small statistical toolkit for the experiment harness: batch summaries,
//! a tie-aware two-sample Kolmogorov–Smirnov test, and the leading-constant
//! diagnostic that checks empirical runtimes against the `n·ln n / p₁` law.

use thiserror::Error;

/// Errors from the statistics helpers.
#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    /// Mean/variance summaries need at least two samples.
    #[error("need at least 2 samples, got {got}")]
    TooFewSamples { got: usize },
    /// Both KS samples must be non-empty.
    #[error("two-sample test requires non-empty samples (sizes {a} and {b})")]
    EmptySample { a: usize, b: usize },
    /// Malformed input to the leading-constant fit.
    #[error("leading-constant fit: {0}")]
    BadInput(&'static str),
}

/// Mean and spread of a batch of runtimes (or any sample).
#[derive(Clone, Copy, Debug)]
pub struct Summary {
    /// Number of samples.
    pub count: usize,
    /// Sample mean.
    pub mean: f64,
    /// Sample standard deviation (Bessel-corrected, divisor `count − 1`).
    pub std_dev: f64,
    /// Standard error of the mean, `std_dev / √count`.
    pub std_error: f64,
    /// Lower end of the normal-approximation 95% confidence interval.
    pub ci95_lo: f64,
    /// Upper end of the normal-approximation 95% confidence interval.
    pub ci95_hi: f64,
}

/// Summarise a sample: mean, Bessel-corrected standard deviation, standard
/// error, and a 95% normal confidence interval for the mean.
pub fn summarize(samples: &[f64]) -> Result<Summary, StatsError> {
    let count = samples.len();
    if count < 2 {
        return Err(StatsError::TooFewSamples { got: count });
    }
    let mean = samples.iter().sum::<f64>() / count as f64;
    let ss: f64 = samples.iter().map(|&x| (x - mean) * (x - mean)).sum();
    let std_dev = (ss / (count - 1) as f64).sqrt();
    let std_error = std_dev / (count as f64).sqrt();
    let half = 1.96 * std_error;
    Ok(Summary {
        count,
        mean,
        std_dev,
        std_error,
        ci95_lo: mean - half,
        ci95_hi: mean + half,
    })
}

/// Result of the two-sample Kolmogorov–Smirnov test.
#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    /// Supremum distance between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic two-sided p-value.
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2·Σ_{j≥1} (−1)^{j−1}·exp(−2·j²·λ²)`, clamped to `[0, 1]`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-6 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=1000 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test. Ties are handled exactly: the CDF
/// difference is only compared after both samples advance past each distinct
/// value. The p-value uses the asymptotic approximation
/// `Q((√nₑ + 0.12 + 0.11/√nₑ)·D)` with `nₑ = n_a·n_b/(n_a + n_b)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample {
            a: a.len(),
            b: b.len(),
        });
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (na, nb) = (sa.len(), sb.len());
    let (naf, nbf) = (na as f64, nb as f64);
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut d = 0.0f64;
    while ia < na || ib < nb {
        // next distinct value in the merged order
        let v = match (sa.get(ia), sb.get(ib)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while ia < na && sa[ia] <= v {
            ia += 1;
        }
        while ib < nb && sb[ib] <= v {
            ib += 1;
        }
        let gap = (ia as f64 / naf - ib as f64 / nbf).abs();
        if gap > d {
            d = gap;
        }
    }
    let ne = naf * nbf / (naf + nbf);
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q(lambda),
    })
}

/// Outcome of the leading-constant fit.
#[derive(Clone, Debug)]
pub struct LeadingConstantFit {
    /// `(n, mean·p₁/(n·ln n))` per design point, in input order.
    pub ratios: Vec<(usize, f64)>,
    /// Whether `|ratio − 1|` is non-increasing along increasing `n`.
    pub trend_toward_one: bool,
    /// Ratio at the largest `n`.
    pub final_ratio: f64,
}

/// Compare measured mean runtimes against the `n·ln n / p₁` leading-order
/// law: for each `(n, mean_T)` point compute `mean_T·p1/(n·ln n)` and check
/// the deviation from 1 shrinks (weakly) as `n` grows. Points must be sorted
/// by strictly increasing `n ≥ 3` with positive finite means; `p1 ∈ (0, 1]`.
pub fn leading_constant_fit(
    points: &[(usize, f64)],
    p1: f64,
) -> Result<LeadingConstantFit, StatsError> {
    if points.is_empty() {
        return Err(StatsError::BadInput("need at least 1 design point"));
    }
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(StatsError::BadInput("p1 must lie in (0, 1]"));
    }
    for pair in points.windows(2) {
        if pair[0].0 >= pair[1].0 {
            return Err(StatsError::BadInput(
                "points must have strictly increasing n",
            ));
        }
    }
    let mut ratios = Vec::with_capacity(points.len());
    for &(n, mean) in points {
        if n < 3 {
            return Err(StatsError::BadInput("need n >= 3"));
        }
        if !mean.is_finite() || mean <= 0.0 {
            return Err(StatsError::BadInput("means must be positive and finite"));
        }
        let nf = n as f64;
        ratios.push((n, mean * p1 / (nf * nf.ln())));
    }
    let trend_toward_one = ratios
        .windows(2)
        .all(|w| (w[1].1 - 1.0).abs() <= (w[0].1 - 1.0).abs());
    let final_ratio = ratios.last().expect("nonempty").1;
    Ok(LeadingConstantFit {
        ratios,
        trend_toward_one,
        final_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_hand_values() {
        let s = summarize(&[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(s.count, 3);
        assert!((s.mean - 4.0).abs() < 1e-15);
        assert!((s.std_dev - 2.0).abs() < 1e-15);
        let se = 2.0 / 3f64.sqrt();
        assert!((s.std_error - se).abs() < 1e-15);
        assert!((s.ci95_lo - (4.0 - 1.96 * se)).abs() < 1e-12);
        assert!((s.ci95_hi - (4.0 + 1.96 * se)).abs() < 1e-12);
    }

    #[test]
    fn summary_constant_sample_has_zero_spread() {
        let s = summarize(&[7.0; 50]).unwrap();
        assert_eq!(s.mean, 7.0);
        assert_eq!(s.std_dev, 0.0);
        assert_eq!(s.ci95_lo, 7.0);
        assert_eq!(s.ci95_hi, 7.0);
    }

    #[test]
    fn summary_rejects_tiny_samples() {
        assert_eq!(
            summarize(&[]).unwrap_err(),
            StatsError::TooFewSamples { got: 0 }
        );
        assert_eq!(
            summarize(&[1.0]).unwrap_err(),
            StatsError::TooFewSamples { got: 1 }
        );
    }

    #[test]
    fn ks_statistic_hand_value() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [3.0, 4.0, 5.0, 6.0];
        let r = ks_two_sample(&a, &b).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
        // λ = (√2 + 0.12 + 0.11/√2)·0.5 ≈ 0.80600, Q(λ) ≈ 0.534393
        assert!((r.p_value - 0.534393).abs() < 5e-4, "p = {}", r.p_value);
    }

    #[test]
    fn ks_handles_ties_exactly() {
        // compare only after passing all copies of each value:
        // at v = 1 the CDFs are 2/3 vs 1/3, at v = 2 both reach 1
        let a = [1.0, 1.0, 2.0];
        let b = [1.0, 2.0, 2.0];
        let r = ks_two_sample(&a, &b).unwrap();
        assert!((r.statistic - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_identical_samples() {
        let a = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn ks_disjoint_samples() {
        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..50).map(|i| 1000.0 + i as f64).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn ks_same_distribution_gets_high_p() {
        // interleaved grids on [0, 1): max CDF gap 1/200
        let a: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let b: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert!(r.statistic <= 0.011);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_shifted_distribution_gets_low_p() {
        let a: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
        let b: Vec<f64> = (0..200).map(|i| 0.3 + i as f64 / 200.0).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert!(r.p_value < 1e-4);
    }

    #[test]
    fn ks_rejects_empty() {
        assert_eq!(
            ks_two_sample(&[], &[1.0]).unwrap_err(),
            StatsError::EmptySample { a: 0, b: 1 }
        );
    }

    #[test]
    fn leading_constant_perfect_law() {
        let points: Vec<(usize, f64)> = [100usize, 200, 400]
            .iter()
            .map(|&n| (n, n as f64 * (n as f64).ln() / 0.3))
            .collect();
        let fit = leading_constant_fit(&points, 0.3).unwrap();
        for &(_, r) in &fit.ratios {
            assert!((r - 1.0).abs() < 1e-12);
        }
        assert!(fit.trend_toward_one);
        assert!((fit.final_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leading_constant_linear_excess_converges() {
        // mean = n·ln n/p₁ + 5n has ratio 1 + 5p₁/ln n, decreasing toward 1
        let p1 = 0.4;
        let points: Vec<(usize, f64)> = [100usize, 400, 1600]
            .iter()
            .map(|&n| (n, n as f64 * (n as f64).ln() / p1 + 5.0 * n as f64))
            .collect();
        let fit = leading_constant_fit(&points, p1).unwrap();
        assert!(fit.trend_toward_one);
        assert!(fit.ratios.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(fit.final_ratio > 1.0);
    }

    #[test]
    fn leading_constant_diverging_trend_is_flagged() {
        let mk = |n: usize, ratio: f64| (n, ratio * n as f64 * (n as f64).ln());
        let bad = [mk(100, 1.05), mk(200, 1.1), mk(400, 1.3)];
        let fit = leading_constant_fit(&bad, 1.0).unwrap();
        assert!(!fit.trend_toward_one);
        assert!((fit.final_ratio - 1.3).abs() < 1e-12);
    }

    #[test]
    fn leading_constant_rejects_bad_input() {
        assert!(matches!(
            leading_constant_fit(&[], 0.3).unwrap_err(),
            StatsError::BadInput(_)
        ));
        let unsorted = [(100usize, 500.0), (50, 300.0)];
        assert!(matches!(
            leading_constant_fit(&unsorted, 0.3).unwrap_err(),
            StatsError::BadInput(_)
        ));
        assert!(matches!(
            leading_constant_fit(&[(100, 500.0)], 0.0).unwrap_err(),
            StatsError::BadInput(_)
        ));
        assert!(matches!(
            leading_constant_fit(&[(2, 5.0)], 0.5).unwrap_err(),
            StatsError::BadInput(_)
        ));
        assert!(matches!(
            leading_constant_fit(&[(100, -1.0)], 0.5).unwrap_err(),
            StatsError::BadInput(_)
        ));
    }
}
