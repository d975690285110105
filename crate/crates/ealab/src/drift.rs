//! Exact drift calculus for the folded distance potential
//! `d(x) = min(|x|_1, n − |x|_1)`.
//!
//! Central quantities, all evaluated in closed form:
//!
//! * [`expected_progress`] — `B(n, d, r)`, the expected positive distance
//!   decrease of a uniform `r`-bit flip from distance `d`;
//! * [`h_tilde`] / [`drift_table`] — the per-distance one-step drift
//!   `h̃(d) = Σ_{r=1}^{n−1} (p_r + p_{n−r})·B(n, d, r)` of a flip
//!   distribution, and its capped companion `h` that switches to the trivial
//!   bound `n` above the cutoff [`d0`];
//! * [`potential_weights`] / [`potential`] — the capped geometric weights
//!   `γ_i = (1 + α·χ³/((n−1)p₁²))^{i−1}`, `g_1 = 1`,
//!   `g_i = min(γ_i, g_{i−1}·w_i/w_{i−1})`, which turn any positive linear
//!   function into a potential with multiplicative drift;
//! * [`upper_bound_b`] — the non-asymptotic runtime tail bound
//!   `b(r) = (n/p₁)·(α/(α−1))·(α n χ³/((n−1)p₁²) + ln((n−1)p₁²/χ³) + r)`
//!   holding with failure probability `e^{−r}`;
//! * [`c_tilde`] — pessimistic jump targets for the lower-bound argument;
//! * [`variable_drift_lower_bound`] — the lower-bound profile
//!   `Σ_{d=1}^{d₀} 1/h(d)` with its `n·ln n/(p₁ + p_{n−1})` headline form.
//!
//! Hypergeometric masses are computed by ratio products and mode-anchored
//! recurrences — never raw factorials — and are cross-checked against exact
//! rational arithmetic (see `oracle::rational`) in the test suite.

use thiserror::Error;

use crate::distributions::FlipDistribution;
use crate::numeric;
use crate::objectives::BitString;

/// Errors from the drift calculus.
#[derive(Debug, Error, PartialEq)]
pub enum DriftError {
    /// An argument left its documented domain.
    #[error("{what} = {got} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        got: f64,
        min: f64,
        max: f64,
    },
    /// The potential-weight construction needs `p_1 > 0`.
    #[error("p_1 = 0: the potential-weight construction needs single-bit flips")]
    ZeroP1,
    /// The drift margin parameter must satisfy `alpha > 1`.
    #[error("alpha = {alpha} must exceed 1")]
    NonPositiveAlphaMargin { alpha: f64 },
    /// A weight vector of the wrong length was supplied.
    #[error("expected {expected} weights, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Hypergeometric mass `C(d, i)·C(n−d, r−i)/C(n, r)`: the probability that a
/// uniform `r`-subset of `n` positions hits exactly `i` of a marked set of
/// `d`. Returns `0.0` outside the support (no error).
pub fn hypergeom_pmf(n: usize, r: usize, d: usize, i: usize) -> f64 {
    if r > n || d > n || i > r || i > d || r - i > n - d {
        return 0.0;
    }
    // the roles of sample and marked set are exchangeable; use the smaller
    // as the sample so direct products stay short
    let (r, d) = if r <= d { (r, d) } else { (d, r) };
    if n <= numeric::DIRECT_BINOM_LIMIT {
        // products never exceed C(n, r) (Vandermonde), hence stay finite
        numeric::binom(d, i) * numeric::binom(n - d, r - i) / numeric::binom(n, r)
    } else {
        (numeric::ln_binom(d, i) + numeric::ln_binom(n - d, r - i) - numeric::ln_binom(n, r)).exp()
    }
}

/// The full hypergeometric row for parameters `(n, r, d)`: masses for
/// `i = lo, …, hi` with `lo = max(0, r+d−n)`, `hi = min(r, d)`, anchored at
/// the mode and filled outward by exact ratio recurrences.
#[derive(Clone, Debug)]
pub struct HypergeomRow {
    /// Smallest support point.
    pub lo: usize,
    /// `masses[j]` is the probability of `i = lo + j`.
    pub masses: Vec<f64>,
}

/// Compute [`HypergeomRow`], reusing `buf` for the masses.
pub fn hypergeom_row_into(n: usize, r: usize, d: usize, buf: &mut Vec<f64>) -> usize {
    debug_assert!(r <= n && d <= n);
    let lo = (r + d).saturating_sub(n);
    let hi = r.min(d);
    buf.clear();
    buf.resize(hi - lo + 1, 0.0);
    let mode = (((r + 1) * (d + 1)) / (n + 2)).clamp(lo, hi);
    buf[mode - lo] = hypergeom_pmf(n, r, d, mode);
    // pmf(i+1)/pmf(i) = ((d−i)(r−i)) / ((i+1)(n−d−r+i+1));
    // summands are grouped as n+i+1−d−r ≥ 1 since i ≥ lo ≥ r+d−n
    for i in mode..hi {
        let up = ((d - i) * (r - i)) as f64 / (((i + 1) * (n + i + 1 - d - r)) as f64);
        buf[i + 1 - lo] = buf[i - lo] * up;
    }
    // pmf(i−1)/pmf(i) = (i(n−d−r+i)) / ((d−i+1)(r−i+1))
    for i in ((lo + 1)..=mode).rev() {
        let down = (i * (n + i - d - r)) as f64 / (((d - i + 1) * (r - i + 1)) as f64);
        buf[i - 1 - lo] = buf[i - lo] * down;
    }
    lo
}

/// Compute the hypergeometric row as an owned value.
pub fn hypergeom_row(n: usize, r: usize, d: usize) -> HypergeomRow {
    let mut masses = Vec::new();
    let lo = hypergeom_row_into(n, r, d, &mut masses);
    HypergeomRow { lo, masses }
}

/// Mode-anchored weighted sum `Σ_{i=lo}^{hi} coeff(i)·pmf(n, r, d_urn, i)`.
fn weighted_hypergeom_sum(
    n: usize,
    r: usize,
    d_urn: usize,
    lo: usize,
    hi: usize,
    coeff: impl Fn(usize) -> f64,
) -> f64 {
    let mode = (((r + 1) * (d_urn + 1)) / (n + 2)).clamp(lo, hi);
    let p_anchor = hypergeom_pmf(n, r, d_urn, mode);
    let mut sum = coeff(mode) * p_anchor;
    let mut p = p_anchor;
    for i in mode..hi {
        p *= ((d_urn - i) * (r - i)) as f64 / (((i + 1) * (n + i + 1 - d_urn - r)) as f64);
        sum += coeff(i + 1) * p;
    }
    p = p_anchor;
    for i in ((lo + 1)..=mode).rev() {
        p *= (i * (n + i - d_urn - r)) as f64 / (((d_urn - i + 1) * (r - i + 1)) as f64);
        sum += coeff(i - 1) * p;
    }
    sum
}

/// `B(n, d, r) = Σ_{i=max(⌈r/2⌉, r+d−n)}^{min(d, r)} (2i − r)·
/// C(d,i)·C(n−d,r−i)/C(n,r)`: the expected positive decrease of the folded
/// distance when flipping a uniform `r`-subset from distance `d` (the `i`
/// flips that land on the `d` wrong positions help, the rest hurt).
pub fn expected_progress(n: usize, d: usize, r: usize) -> Result<f64, DriftError> {
    if r < 1 || r > n {
        return Err(DriftError::OutOfRange {
            what: "flip count r",
            got: r as f64,
            min: 1.0,
            max: n as f64,
        });
    }
    if d > n {
        return Err(DriftError::OutOfRange {
            what: "distance d",
            got: d as f64,
            min: 0.0,
            max: n as f64,
        });
    }
    let lo = r.div_ceil(2).max((r + d).saturating_sub(n));
    let hi = d.min(r);
    if lo > hi {
        return Ok(0.0);
    }
    let rf = r as f64;
    Ok(weighted_hypergeom_sum(n, r, d, lo, hi, |i| {
        2.0 * i as f64 - rf
    }))
}

/// Shifted progress `B_d(n, d+Δ, r) = Σ_{i=max(⌈(r+Δ)/2⌉, r+d+Δ−n)}^{min(d+Δ, r)}
/// (2i − r − Δ)·C(d+Δ,i)·C(n−d−Δ,r−i)/C(n,r)`: progress measured against the
/// *base* distance `d` for a walker currently `Δ` further out. Used by the
/// audit command to tabulate how drift aggregated over a band of distances
/// compares with the single-distance drift.
pub fn expected_progress_shifted(
    n: usize,
    d: usize,
    delta: usize,
    r: usize,
) -> Result<f64, DriftError> {
    if r < 1 || r > n {
        return Err(DriftError::OutOfRange {
            what: "flip count r",
            got: r as f64,
            min: 1.0,
            max: n as f64,
        });
    }
    if d + delta > n {
        return Err(DriftError::OutOfRange {
            what: "shifted distance d + delta",
            got: (d + delta) as f64,
            min: 0.0,
            max: n as f64,
        });
    }
    let dd = d + delta;
    let lo = (r + delta).div_ceil(2).max((r + dd).saturating_sub(n));
    let hi = dd.min(r);
    if lo > hi {
        return Ok(0.0);
    }
    let shift = (r + delta) as f64;
    Ok(weighted_hypergeom_sum(n, r, dd, lo, hi, |i| {
        2.0 * i as f64 - shift
    }))
}

/// Unchecked-range worker behind [`h_tilde`]; accepts any `d <= n` so the
/// lower-bound profile can evaluate tiny instances where the cutoff exceeds
/// `n/2`.
pub(crate) fn h_tilde_at(dist: &FlipDistribution, d: usize) -> f64 {
    let n = dist.n();
    let mut sum = 0.0;
    for (k, pk) in dist.support() {
        if k == 0 || k == n {
            continue; // flips of 0 or n bits never change the folded distance
        }
        let b_k = expected_progress(n, d, k).expect("support k within [1, n-1]");
        let b_nk = expected_progress(n, d, n - k).expect("support k within [1, n-1]");
        sum += pk * (b_k + b_nk);
    }
    sum
}

/// Per-distance one-step drift
/// `h̃(d) = Σ_{r=1}^{n−1} (p_r + p_{n−r})·B(n, d, r)` for `0 <= d <= ⌊n/2⌋`.
/// Skips flip counts with zero coefficient, so point masses cost `O(d)`.
pub fn h_tilde(dist: &FlipDistribution, d: usize) -> Result<f64, DriftError> {
    let n = dist.n();
    if d > n / 2 {
        return Err(DriftError::OutOfRange {
            what: "distance d",
            got: d as f64,
            min: 0.0,
            max: (n / 2) as f64,
        });
    }
    Ok(h_tilde_at(dist, d))
}

/// Band-aggregated drift `h_d(d + Δ) = Σ_{r=Δ+1}^{n−Δ−1} (p_r + p_{n−r})·
/// B_d(n, d+Δ, r)`, the companion of [`expected_progress_shifted`].
pub fn h_tilde_shifted(dist: &FlipDistribution, d: usize, delta: usize) -> Result<f64, DriftError> {
    let n = dist.n();
    if d + delta > n {
        return Err(DriftError::OutOfRange {
            what: "shifted distance d + delta",
            got: (d + delta) as f64,
            min: 0.0,
            max: n as f64,
        });
    }
    let mut sum = 0.0;
    for (k, pk) in dist.support() {
        // only flip counts in the band [Δ+1, n−Δ−1] can traverse it
        if k < delta + 1 || k + delta + 1 > n {
            continue;
        }
        let b_k = expected_progress_shifted(n, d, delta, k)?;
        let b_nk = expected_progress_shifted(n, d, delta, n - k)?;
        sum += pk * (b_k + b_nk);
    }
    Ok(sum)
}

/// The drift cutoff `d₀ = ⌊(p₁ + p_{n−1})·n / ln²n⌋`: below it the exact
/// drift `h̃` is the useful bound, above it the trivial bound `n` takes over.
/// Requires `n >= 2`.
pub fn d0(dist: &FlipDistribution) -> usize {
    let n = dist.n();
    assert!(n >= 2, "the drift cutoff needs n >= 2");
    let p_sum = dist.probs()[1] + dist.probs()[n - 1];
    let ln_n = (n as f64).ln();
    (p_sum * n as f64 / (ln_n * ln_n)).floor() as usize
}

/// The tabulated drift bound: `h(d) = h̃(d)` for `d <= d₀`, `h(d) = n`
/// beyond the cutoff.
#[derive(Clone, Debug)]
pub struct DriftTable {
    pub n: usize,
    pub d0: usize,
    /// `(h̃(d), h(d))` for `d = 0, …, ⌊n/2⌋`.
    rows: Vec<(f64, f64)>,
}

impl DriftTable {
    /// `h̃(d)`.
    pub fn h_tilde(&self, d: usize) -> f64 {
        self.rows[d].0
    }

    /// `h(d)`.
    pub fn h(&self, d: usize) -> f64 {
        self.rows[d].1
    }

    /// All rows as `(d, h̃(d), h(d))`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.rows.iter().enumerate().map(|(d, &(ht, h))| (d, ht, h))
    }
}

/// Tabulate `h̃` and `h` for every distance up to `⌊n/2⌋`. Requires `n >= 2`.
pub fn drift_table(dist: &FlipDistribution) -> DriftTable {
    let n = dist.n();
    let cutoff = d0(dist);
    let rows = (0..=n / 2)
        .map(|d| {
            let ht = h_tilde_at(dist, d);
            let h = if d <= cutoff { ht } else { n as f64 };
            (ht, h)
        })
        .collect();
    DriftTable {
        n,
        d0: cutoff,
        rows,
    }
}

/// The capped geometric potential weights for a positive linear function
/// with ascending weights `w`: `γ_i = (1 + α·χ³/((n−1)·p₁²))^{i−1}` and
/// `g_1 = 1`, `g_i = min(γ_i, g_{i−1}·w_i/w_{i−1})`.
///
/// Applied to the *complemented* incumbent (see [`potential`]), `Σ g_i·x̄_i`
/// is a potential that is 0 exactly at the optimum and shrinks in expectation
/// by a factor `>= s·p₁·(α−1)/(α·n)` per step, where `s` is the current
/// potential value.
#[derive(Clone, Debug)]
pub struct PotentialWeights {
    pub n: usize,
    pub alpha: f64,
    pub chi: f64,
    pub p1: f64,
    gamma: Vec<f64>,
    g: Vec<f64>,
}

impl PotentialWeights {
    /// `γ_1, …, γ_n` (index 0 holds `γ_1 = 1`).
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// `g_1, …, g_n` (index 0 holds `g_1 = 1`).
    pub fn g(&self) -> &[f64] {
        &self.g
    }
}

/// Build [`PotentialWeights`] for flip distribution `dist`, margin
/// `alpha > 1` and the target function's ascending positive weights.
pub fn potential_weights(
    dist: &FlipDistribution,
    alpha: f64,
    weights: &[f64],
) -> Result<PotentialWeights, DriftError> {
    let n = dist.n();
    assert!(n >= 2, "potential weights need n >= 2");
    if weights.len() != n {
        return Err(DriftError::LengthMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(DriftError::NonPositiveAlphaMargin { alpha });
    }
    let p1 = dist.probs()[1];
    if p1 <= 0.0 {
        return Err(DriftError::ZeroP1);
    }
    debug_assert!(
        weights.windows(2).all(|w| w[0] <= w[1]) && weights[0] > 0.0,
        "weights must be positive and ascending"
    );
    let chi = dist.mean();
    let base = 1.0 + alpha * chi.powi(3) / ((n - 1) as f64 * p1 * p1);
    let gamma: Vec<f64> = (0..n).map(|i| base.powi(i as i32)).collect();
    let mut g = Vec::with_capacity(n);
    g.push(1.0);
    for i in 1..n {
        let ratio_capped = g[i - 1] * weights[i] / weights[i - 1];
        g.push(gamma[i].min(ratio_capped));
    }
    debug_assert!(
        g.windows(2).all(|w| w[0] <= w[1]),
        "g must be non-decreasing"
    );
    debug_assert!(
        g.iter()
            .zip(&gamma)
            .all(|(gi, gam)| 1.0 <= *gi && *gi <= *gam),
        "1 <= g_i <= gamma_i must hold"
    );
    Ok(PotentialWeights {
        n,
        alpha,
        chi,
        p1,
        gamma,
        g,
    })
}

/// Potential value `Σ g_i·z_i` of a bitstring `z`. Pass the *complemented*
/// incumbent: the potential is then 0 iff the incumbent is the optimum.
pub fn potential(pw: &PotentialWeights, z: &BitString) -> Result<f64, DriftError> {
    if z.len() != pw.n {
        return Err(DriftError::LengthMismatch {
            expected: pw.n,
            got: z.len(),
        });
    }
    let mut sum = 0.0;
    for (wi, &word) in z.as_words().iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            sum += pw.g[wi * 64 + b];
            bits &= bits - 1;
        }
    }
    Ok(sum)
}

/// The non-asymptotic runtime tail bound for positive linear functions:
/// returns `(b(r), e^{−r})` where
/// `b(r) = (n/p₁)·(α/(α−1))·(α·n·χ³/((n−1)·p₁²) + ln((n−1)·p₁²/χ³) + r)`
/// and the runtime exceeds `b(r)` with probability at most `e^{−r}`.
pub fn upper_bound_b(
    dist: &FlipDistribution,
    alpha: f64,
    r: f64,
) -> Result<(f64, f64), DriftError> {
    let n = dist.n();
    assert!(n >= 2, "the runtime bound needs n >= 2");
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(DriftError::NonPositiveAlphaMargin { alpha });
    }
    if r.is_nan() || r <= 0.0 {
        return Err(DriftError::OutOfRange {
            what: "tail parameter r",
            got: r,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let p1 = dist.probs()[1];
    if p1 <= 0.0 {
        return Err(DriftError::ZeroP1);
    }
    let chi3 = dist.mean().powi(3);
    let n1p = (n - 1) as f64 * p1 * p1;
    let bound = (n as f64 / p1)
        * (alpha / (alpha - 1.0))
        * (alpha * n as f64 * chi3 / n1p + (n1p / chi3).ln() + r);
    Ok((bound, (-r).exp()))
}

/// Pessimistic post-jump distance `c̃(i)` used by the lower-bound argument:
/// large jumps are assumed to land almost as far as they started —
/// `i − √n·ln n` for `i >= n/6`, `i − ln²n` for `n^{1/3} <= i < n/6`, and
/// `i − 1` below. May be negative for small `n`, where the middle regimes
/// are vacuous; callers treat non-positive values as "no useful bound".
pub fn c_tilde(n: usize, i: usize) -> Result<f64, DriftError> {
    if i < 1 || i > n {
        return Err(DriftError::OutOfRange {
            what: "distance i",
            got: i as f64,
            min: 1.0,
            max: n as f64,
        });
    }
    let nf = n as f64;
    let fi = i as f64;
    Ok(if fi >= nf / 6.0 {
        fi - nf.sqrt() * nf.ln()
    } else if fi >= nf.cbrt() {
        fi - nf.ln().powi(2)
    } else {
        fi - 1.0
    })
}

/// The lower-bound profile of a flip distribution.
#[derive(Clone, Debug)]
pub struct VariableDriftProfile {
    pub n: usize,
    /// The drift cutoff `d₀`.
    pub d0: usize,
    /// `Σ_{d=1}^{d₀} 1/h(d)` — the variable-drift lower bound on the
    /// expected runtime from distance `>= d₀` (up to the correction below).
    pub sum_inverse_h: f64,
    /// The headline form `n·ln n/(p₁ + p_{n−1})` that the sum approaches.
    pub headline: f64,
    /// Failure probability `n^{−4/3}·ln⁷n` of the supporting concentration
    /// argument. Exceeds 1 for small `n`, making [`Self::corrected`] vacuous
    /// there; it is reported as-is.
    pub failure_p: f64,
    /// `sum − sum²·p/(1 + sum·p)`: the lower bound discounted by the failure
    /// probability `p`.
    pub corrected: f64,
    /// True when `p₁ + p_{n−1} = 0`, which degenerates the whole profile
    /// (empty sum, infinite headline).
    pub degenerate: bool,
}

/// Compute the lower-bound profile. Requires `n >= 2`.
///
/// The summation range is clamped to `d <= n` so that absurdly small
/// instances (where the literal cutoff formula exceeds the diameter) stay in
/// the state space.
pub fn variable_drift_lower_bound(dist: &FlipDistribution) -> VariableDriftProfile {
    let n = dist.n();
    assert!(n >= 2, "the lower-bound profile needs n >= 2");
    let p_sum = dist.probs()[1] + dist.probs()[n - 1];
    let cutoff = d0(dist);
    let mut sum = 0.0;
    for d in 1..=cutoff.min(n) {
        sum += 1.0 / h_tilde_at(dist, d);
    }
    let nf = n as f64;
    let headline = nf * nf.ln() / p_sum;
    let failure_p = nf.powf(-4.0 / 3.0) * nf.ln().powi(7);
    let corrected = sum - sum * sum * failure_p / (1.0 + sum * failure_p);
    VariableDriftProfile {
        n,
        d0: cutoff,
        sum_inverse_h: sum,
        headline,
        failure_p,
        corrected,
        degenerate: p_sum == 0.0,
    }
}
