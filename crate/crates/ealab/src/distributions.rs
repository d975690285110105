//! Flip-number distributions `D = (p_0, …, p_n)`.
//!
//! A static unary unbiased mutation operator is fully described by such a
//! vector: each step draws `k ~ D` and flips a uniformly random `k`-subset.
//! This module builds and validates the standard families, exposes the mean
//! `χ = Σ k·p_k`, conditioning on `k > 0`, and inverse-CDF sampling.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric;

/// Validation tolerance for `|Σ p_k − 1|` on custom vectors; inside the
/// tolerance the vector is renormalised exactly (divided by its sum).
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Errors from flip-distribution construction and conditioning.
#[derive(Debug, Error, PartialEq)]
pub enum DistributionError {
    /// A custom vector must have exactly `n + 1` entries.
    #[error("expected {expected} probabilities for n = {n}, got {got}")]
    LengthMismatch {
        n: usize,
        expected: usize,
        got: usize,
    },
    /// Probabilities must be non-negative (and finite).
    #[error("probability p_{index} = {value} must be non-negative and finite")]
    NegativeProbability { index: usize, value: f64 },
    /// A custom vector must sum to 1 within [`PROB_SUM_TOLERANCE`].
    #[error("probabilities sum to {sum}, more than {tolerance} away from 1")]
    SumOutOfTolerance { sum: f64, tolerance: f64 },
    /// Point-mass flip count outside `[0, n]`.
    #[error("flip count {k} outside [0, {n}]")]
    OutOfRange { k: usize, n: usize },
    /// Standard-bit-mutation rate `c` outside `(0, n]`.
    #[error("expected flip count c = {c} outside (0, {n}]")]
    RateOutOfRange { c: f64, n: usize },
    /// Power-law exponent must exceed 1.
    #[error("power-law exponent beta = {beta} must exceed 1")]
    BetaOutOfRange { beta: f64 },
    /// Conditioning on `k > 0` is undefined when all mass sits on `k = 0`.
    #[error("cannot condition on nonzero flips when p_0 = 1")]
    DegenerateAllZero,
    /// Families that need a minimum dimension (power law needs `n >= 2`).
    #[error("instance size {n} below minimum {min} for this family")]
    SizeTooSmall { n: usize, min: usize },
    /// A JSON spec omitted a field its kind requires.
    #[error("distribution spec is missing field `{0}`")]
    MissingField(&'static str),
    /// A JSON spec declared an `n` that contradicts the surrounding config.
    #[error("distribution spec declares n = {declared}, but the config supplies n = {context}")]
    ContextMismatch { declared: usize, context: usize },
}

/// A validated flip distribution on `{0, …, n}` with cached mean and a
/// cumulative table for sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipDistribution {
    n: usize,
    probs: Vec<f64>,
    chi: f64,
    cumulative: Vec<f64>,
}

impl FlipDistribution {
    /// Internal: validated non-negative masses with positive sum; renormalises
    /// exactly and builds the sampling table (last entry forced to 1.0).
    fn from_masses(n: usize, mut probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), n + 1);
        let sum: f64 = probs.iter().sum();
        debug_assert!(sum > 0.0);
        for p in &mut probs {
            *p /= sum;
        }
        let chi = probs
            .iter()
            .enumerate()
            .map(|(k, &p)| k as f64 * p)
            .sum::<f64>();
        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        // guard the sampler against accumulated rounding at the top end
        *cumulative.last_mut().expect("n + 1 >= 1 entries") = 1.0;
        FlipDistribution {
            n,
            probs,
            chi,
            cumulative,
        }
    }

    /// Dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The probability vector `(p_0, …, p_n)`, normalised.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Mean flip count `χ = Σ k·p_k`.
    pub fn mean(&self) -> f64 {
        self.chi
    }

    /// Single-bit-flip probability `p_1` (the leading constant of the
    /// `(1/p_1)·n·ln n` runtime law).
    pub fn p1(&self) -> f64 {
        self.probs[1.min(self.n)]
    }

    /// Iterator over the support: `(k, p_k)` with `p_k > 0`.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(k, &p)| (k, p))
    }

    /// The distribution conditioned on `k > 0`:
    /// `p'_0 = 0`, `p'_k = p_k / (1 − p_0)`. Returns the distribution
    /// unchanged when `p_0 = 0` and fails when all mass sits on zero.
    pub fn condition_nonzero(&self) -> Result<FlipDistribution, DistributionError> {
        let p0 = self.probs[0];
        if p0 == 0.0 {
            return Ok(self.clone());
        }
        if p0 >= 1.0 {
            return Err(DistributionError::DegenerateAllZero);
        }
        let mut probs = self.probs.clone();
        probs[0] = 0.0;
        Ok(Self::from_masses(self.n, probs))
    }

    /// Draw one flip count by inverse-CDF lookup: a short linear scan covers
    /// the common light-tailed case, binary search handles the rest.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let quick = self.cumulative.len().min(4);
        for (k, &c) in self.cumulative[..quick].iter().enumerate() {
            if u < c {
                return k;
            }
        }
        self.cumulative.partition_point(|&c| c <= u)
    }
}

fn validate_masses(n: usize, probs: &[f64]) -> Result<(), DistributionError> {
    if probs.len() != n + 1 {
        return Err(DistributionError::LengthMismatch {
            n,
            expected: n + 1,
            got: probs.len(),
        });
    }
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(DistributionError::NegativeProbability { index, value });
        }
    }
    Ok(())
}

/// Custom distribution from an explicit vector of `n + 1` probabilities.
/// The vector must sum to 1 within [`PROB_SUM_TOLERANCE`]; it is then
/// renormalised exactly.
pub fn make_custom(n: usize, probs: &[f64]) -> Result<FlipDistribution, DistributionError> {
    validate_masses(n, probs)?;
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(DistributionError::SumOutOfTolerance {
            sum,
            tolerance: PROB_SUM_TOLERANCE,
        });
    }
    Ok(FlipDistribution::from_masses(n, probs.to_vec()))
}

/// Point mass at `k` (`k = 1` is randomised local search).
pub fn make_point_mass(n: usize, k: usize) -> Result<FlipDistribution, DistributionError> {
    if k > n {
        return Err(DistributionError::OutOfRange { k, n });
    }
    let mut probs = vec![0.0; n + 1];
    probs[k] = 1.0;
    Ok(FlipDistribution::from_masses(n, probs))
}

/// Standard bit mutation with rate `c/n`: `k ~ Binomial(n, c/n)`, so
/// `χ = c`. Requires `0 < c <= n`; `c = n` degenerates to the point mass
/// at `n`.
///
/// The pmf is built outward from its mode by exact ratio recurrences with a
/// log-space anchor, so it stays accurate for every `0 < c < n` with no
/// factorial overflow; far-tail entries that underflow `f64` are exactly 0.
pub fn make_standard_bit_mutation(n: usize, c: f64) -> Result<FlipDistribution, DistributionError> {
    if !c.is_finite() || c <= 0.0 || c > n as f64 {
        return Err(DistributionError::RateOutOfRange { c, n });
    }
    let p = c / n as f64;
    if p >= 1.0 {
        return make_point_mass(n, n);
    }
    let q = 1.0 - p;
    let mut probs = vec![0.0f64; n + 1];
    // anchor at the mode, whose probability is ~1/sqrt(n) and never underflows
    let mode = (((n + 1) as f64) * p).floor().min(n as f64) as usize;
    let ln_anchor = numeric::ln_binom(n, mode) + mode as f64 * p.ln() + (n - mode) as f64 * q.ln();
    probs[mode] = ln_anchor.exp();
    // pmf(k+1)/pmf(k) = ((n-k)/(k+1)) * (p/q)
    let ratio = p / q;
    for k in mode..n {
        probs[k + 1] = probs[k] * ((n - k) as f64 / (k + 1) as f64) * ratio;
    }
    for k in (0..mode).rev() {
        // pmf(k) = pmf(k+1) * ((k+1)/(n-k)) * (q/p)
        probs[k] = probs[k + 1] * ((k + 1) as f64 / (n - k) as f64) / ratio;
    }
    Ok(FlipDistribution::from_masses(n, probs))
}

/// Heavy-tailed power law on `[1, ⌊n/2⌋]`: `p_k ∝ k^{−beta}` with
/// `beta > 1`; requires `n >= 2` so the support is non-empty.
pub fn make_power_law(n: usize, beta: f64) -> Result<FlipDistribution, DistributionError> {
    if n < 2 {
        return Err(DistributionError::SizeTooSmall { n, min: 2 });
    }
    if beta.is_nan() || beta <= 1.0 {
        return Err(DistributionError::BetaOutOfRange { beta });
    }
    let mut probs = vec![0.0f64; n + 1];
    for (k, slot) in probs.iter_mut().enumerate().take(n / 2 + 1).skip(1) {
        *slot = (k as f64).powf(-beta);
    }
    Ok(FlipDistribution::from_masses(n, probs))
}

/// JSON description of a flip distribution, as accepted by experiment
/// configs: `{"kind": "point"|"sbm"|"power_law"|"custom",
///   "n": int?, "k": int?, "c": real?, "beta": real?, "probs": [real]?}`.
///
/// `n` may be omitted when an outer config level supplies it (drift, bound
/// and sweep commands).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
}

/// Distribution kind tags recognised in configs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Point,
    Sbm,
    PowerLaw,
    Custom,
}

impl DistributionSpec {
    /// Build the distribution; `ctx_n` supplies `n` when the config carries
    /// it at an outer level. A spec-level `n` that contradicts the context is
    /// an error, not silently overridden.
    pub fn build(&self, ctx_n: Option<usize>) -> Result<FlipDistribution, DistributionError> {
        if let (Some(context), Some(declared)) = (ctx_n, self.n) {
            if context != declared {
                return Err(DistributionError::ContextMismatch { declared, context });
            }
        }
        let n = ctx_n
            .or(self.n)
            .ok_or(DistributionError::MissingField("n"))?;
        match self.kind {
            DistributionKind::Point => {
                let k = self.k.ok_or(DistributionError::MissingField("k"))?;
                make_point_mass(n, k)
            }
            DistributionKind::Sbm => {
                let c = self.c.ok_or(DistributionError::MissingField("c"))?;
                make_standard_bit_mutation(n, c)
            }
            DistributionKind::PowerLaw => {
                let beta = self.beta.ok_or(DistributionError::MissingField("beta"))?;
                make_power_law(n, beta)
            }
            DistributionKind::Custom => {
                let probs = self
                    .probs
                    .as_deref()
                    .ok_or(DistributionError::MissingField("probs"))?;
                make_custom(n, probs)
            }
        }
    }

    /// Stable kind label for CSV columns.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DistributionKind::Point => "point",
            DistributionKind::Sbm => "sbm",
            DistributionKind::PowerLaw => "power_law",
            DistributionKind::Custom => "custom",
        }
    }

    /// Compact parameter label for CSV columns (`k=...`, `c=...`, …).
    pub fn param_label(&self) -> String {
        match self.kind {
            DistributionKind::Point => format!("k={}", self.k.unwrap_or(0)),
            DistributionKind::Sbm => format!("c={}", self.c.unwrap_or(f64::NAN)),
            DistributionKind::PowerLaw => format!("beta={}", self.beta.unwrap_or(f64::NAN)),
            DistributionKind::Custom => "custom".to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn custom_examples() {
        let d = make_custom(3, &[0.0, 0.5, 0.5, 0.0]).unwrap();
        assert_eq!(d.mean(), 1.5);
        assert_eq!(d.p1(), 0.5);
        let err = make_custom(2, &[0.5, 0.4, 0.2]).unwrap_err();
        assert!(matches!(err, DistributionError::SumOutOfTolerance { .. }));
        let err = make_custom(2, &[0.5, 0.5]).unwrap_err();
        assert!(matches!(err, DistributionError::LengthMismatch { .. }));
        let err = make_custom(2, &[0.5, -0.1, 0.6]).unwrap_err();
        assert!(matches!(
            err,
            DistributionError::NegativeProbability { index: 1, .. }
        ));
        // near-1 sums inside the tolerance are renormalised exactly
        let d = make_custom(1, &[0.5, 0.5 + 4e-10]).unwrap();
        assert_eq!(d.probs().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn point_mass_examples() {
        let d = make_point_mass(10, 1).unwrap();
        assert_eq!(d.mean(), 1.0);
        assert_eq!(d.probs()[1], 1.0);
        let d = make_point_mass(6, 6).unwrap();
        assert_eq!(d.mean(), 6.0);
        assert_eq!(
            make_point_mass(4, 5).unwrap_err(),
            DistributionError::OutOfRange { k: 5, n: 4 }
        );
    }

    #[test]
    fn sbm_exact_small_case() {
        let d = make_standard_bit_mutation(2, 1.0).unwrap();
        let expect = [0.25, 0.5, 0.25];
        for (p, e) in d.probs().iter().zip(expect) {
            assert!((p - e).abs() < 1e-15, "{p} vs {e}");
        }
    }

    #[test]
    fn sbm_p1_and_mean() {
        let d = make_standard_bit_mutation(100, 1.0).unwrap();
        let expect = 0.99f64.powi(99);
        assert!((d.p1() - expect).abs() <= 1e-12 * expect);
        assert!((d.p1() - 0.36973).abs() < 1e-5);
        let d = make_standard_bit_mutation(50, 1.7).unwrap();
        assert!((d.mean() - 1.7).abs() <= 1e-12 * 1.7);
    }

    #[test]
    fn sbm_rate_edges() {
        assert!(matches!(
            make_standard_bit_mutation(10, 0.0).unwrap_err(),
            DistributionError::RateOutOfRange { .. }
        ));
        assert!(matches!(
            make_standard_bit_mutation(10, 10.5).unwrap_err(),
            DistributionError::RateOutOfRange { .. }
        ));
        // c = n degenerates to the point mass at n
        let d = make_standard_bit_mutation(10, 10.0).unwrap();
        assert_eq!(d.probs()[10], 1.0);
        // heavy rates underflow only in the far tail yet stay normalised
        let d = make_standard_bit_mutation(3000, 1500.0).unwrap();
        assert!((d.mean() - 1500.0).abs() <= 1e-9 * 1500.0);
        assert_eq!(d.probs()[0], 0.0); // q^n underflows to an exact zero
    }

    #[test]
    fn power_law_examples() {
        let d = make_power_law(4, 2.0).unwrap();
        assert_eq!(d.probs()[1], 0.8);
        assert_eq!(d.probs()[2], 0.2);
        assert!((d.mean() - 1.2).abs() < 1e-15);
        let d = make_power_law(4, 1.5).unwrap();
        let norm = 1.0 + 2f64.powf(-1.5);
        assert!((d.p1() - 1.0 / norm).abs() < 1e-15);
        assert!((d.p1() - 0.73879).abs() < 1e-5);
        assert!(matches!(
            make_power_law(10, 1.0).unwrap_err(),
            DistributionError::BetaOutOfRange { .. }
        ));
        assert!(matches!(
            make_power_law(1, 3.0).unwrap_err(),
            DistributionError::SizeTooSmall { .. }
        ));
    }

    #[test]
    fn power_law_support_is_one_to_half_n() {
        let d = make_power_law(11, 2.5).unwrap();
        assert_eq!(d.probs()[0], 0.0);
        for k in 1..=5 {
            assert!(d.probs()[k] > 0.0);
        }
        for k in 6..=11 {
            assert_eq!(d.probs()[k], 0.0);
        }
    }

    #[test]
    fn power_law_beta3_mean_stays_bounded() {
        // χ(β = 3) increases with n yet stays below ζ(2)/ζ(3) ≈ 1.3685
        let mut prev = 0.0;
        for exp in [8u32, 12, 16] {
            let n = 1usize << exp;
            let chi = make_power_law(n, 3.0).unwrap().mean();
            assert!(chi > prev);
            assert!(chi < 1.369, "chi({n}) = {chi}");
            prev = chi;
        }
    }

    #[test]
    fn condition_nonzero_examples() {
        let d = make_custom(2, &[0.5, 0.25, 0.25]).unwrap();
        let c = d.condition_nonzero().unwrap();
        assert_eq!(c.probs(), &[0.0, 0.5, 0.5]);
        assert!((c.mean() - d.mean() / 0.5).abs() < 1e-15);
        // p_0 = 0: unchanged
        let d = make_point_mass(5, 2).unwrap();
        assert_eq!(d.condition_nonzero().unwrap(), d);
        // all mass on zero: degenerate
        let d = make_point_mass(5, 0).unwrap();
        assert_eq!(
            d.condition_nonzero().unwrap_err(),
            DistributionError::DegenerateAllZero
        );
    }

    #[test]
    fn sampling_is_deterministic_and_in_support() {
        let d = make_power_law(20, 1.5).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let ka = d.sample(&mut a);
            assert_eq!(ka, d.sample(&mut b));
            assert!((1..=10).contains(&ka));
        }
        let p = make_point_mass(9, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| p.sample(&mut rng) == 3));
    }

    /// χ² goodness-of-fit of `draws` samples against `d`, merging bins with
    /// expected count below 10 into their left neighbour.
    fn chi_square_stat(d: &FlipDistribution, draws: usize, seed: u64) -> (f64, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; d.n() + 1];
        for _ in 0..draws {
            counts[d.sample(&mut rng)] += 1;
        }
        let mut stat = 0.0;
        let mut df: isize = -1;
        let mut pend_obs = 0.0;
        let mut pend_exp = 0.0;
        for (k, &p) in d.probs().iter().enumerate() {
            if p == 0.0 {
                assert_eq!(counts[k], 0, "sampled outside support at k = {k}");
                continue;
            }
            pend_obs += counts[k] as f64;
            pend_exp += p * draws as f64;
            if pend_exp >= 10.0 {
                stat += (pend_obs - pend_exp).powi(2) / pend_exp;
                df += 1;
                pend_obs = 0.0;
                pend_exp = 0.0;
            }
        }
        if pend_exp > 0.0 {
            stat += (pend_obs - pend_exp).powi(2) / pend_exp;
            df += 1;
        }
        (stat, df.max(1) as usize)
    }

    #[test]
    fn sampler_matches_pmf_chi_square() {
        // pinned seeds; thresholds are the χ² 0.999 quantiles for the df
        let quantile_999 = [
            10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877, 29.588,
        ];
        let cases: Vec<(FlipDistribution, u64)> = vec![
            (make_standard_bit_mutation(8, 1.0).unwrap(), 101),
            (make_power_law(10, 1.5).unwrap(), 202),
            (make_custom(3, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 303),
        ];
        for (d, seed) in cases {
            let (stat, df) = chi_square_stat(&d, 1_000_000, seed);
            assert!((1..=10).contains(&df));
            assert!(
                stat < quantile_999[df - 1],
                "chi2 = {stat} at df = {df} for seed {seed}"
            );
        }
    }

    #[test]
    fn spec_build_paths() {
        let spec: DistributionSpec =
            serde_json::from_str(r#"{"kind":"sbm","n":50,"c":1.0}"#).unwrap();
        assert_eq!(spec.build(None).unwrap().n(), 50);
        let spec: DistributionSpec = serde_json::from_str(r#"{"kind":"point","k":1}"#).unwrap();
        assert_eq!(
            spec.build(None).unwrap_err(),
            DistributionError::MissingField("n")
        );
        assert_eq!(spec.build(Some(12)).unwrap().p1(), 1.0);
        let spec: DistributionSpec =
            serde_json::from_str(r#"{"kind":"custom","n":2,"probs":[0.0,1.0,0.0]}"#).unwrap();
        assert_eq!(spec.build(None).unwrap().mean(), 1.0);
        assert_eq!(
            spec.build(Some(3)).unwrap_err(),
            DistributionError::ContextMismatch {
                declared: 2,
                context: 3
            }
        );
        assert_eq!(spec.build(Some(2)).unwrap().mean(), 1.0);
    }

    proptest! {
        #[test]
        fn random_masses_normalise_cleanly(raw in proptest::collection::vec(0.0f64..1.0, 2..40)) {
            prop_assume!(raw.iter().sum::<f64>() > 1e-3);
            let n = raw.len() - 1;
            let sum: f64 = raw.iter().sum();
            let scaled: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let d = make_custom(n, &scaled).unwrap();
            let total: f64 = d.probs().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            let chi_direct: f64 = d.probs().iter().enumerate().map(|(k, &p)| k as f64 * p).sum();
            prop_assert!((d.mean() - chi_direct).abs() <= 1e-12 * chi_direct.max(1.0));
        }

        #[test]
        fn conditioning_scales_mean(raw in proptest::collection::vec(0.0f64..1.0, 3..30), p0 in 0.0f64..0.95) {
            prop_assume!(raw.iter().skip(1).sum::<f64>() > 1e-3);
            let n = raw.len() - 1;
            let tail: f64 = raw.iter().skip(1).sum();
            let mut masses = vec![p0];
            masses.extend(raw.iter().skip(1).map(|v| v * (1.0 - p0) / tail));
            let d = make_custom(n, &masses).unwrap();
            let c = d.condition_nonzero().unwrap();
            let p0 = d.probs()[0];
            prop_assert_eq!(c.probs()[0], 0.0);
            // χ' · (1 − p_0) = χ
            prop_assert!((c.mean() * (1.0 - p0) - d.mean()).abs() <= 1e-12 * d.mean().max(1e-6));
        }
    }
}
