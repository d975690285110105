//! Brute-force ground truth for small instances.
//!
//! Every oracle here reduces the (1+1) algorithm to an absorbing Markov chain
//! and solves for exact expected hitting times of the optimum:
//!
//! * [`level_chain`] — `n + 1` OneMax-level states, for objectives that are a
//!   function of `|x|_1` (OneMax, parity-swap); handles `n` up to 10⁴ via
//!   sparse hypergeometric transition rows;
//! * [`full_chain`] — all `2^n` bitstrings for any objective kind, `n <= 16`;
//!   transition rows are streamed, never materialised, so memory stays
//!   `O(2^n)` plus the largest fitness-tie class (which the dense tie solver
//!   squares);
//! * [`compressed_anchored_chain`] — the `2n` states `(x_1, |x_{2..n}|_1)`
//!   that determine anchored objectives, for `n` up to 10⁴;
//! * [`exact_step_drift`] — exhaustive one-step drift of the folded distance
//!   (acceptance-free, since the distance potential tracks the best point
//!   *evaluated* so far) or of a weighted potential under true elitist
//!   acceptance.
//!
//! States from which absorption is not almost sure have infinite expected
//! time; the solver detects them structurally (no path to the optimum, or
//! positive probability of entering such a trap) and queries return
//! [`OracleError::UnreachableOptimum`].
//!
//! Ties are accepted, exactly as the run engine does. For level-symmetric
//! objectives the convention cannot change hitting times (a tie move lands in
//! a state with an identical future law), which a test pins down at `n = 8`.
//!
//! The [`rational`] submodule recomputes the combinatorial kernels in exact
//! arbitrary-precision rational arithmetic for cross-checking the `f64`
//! paths.

use thiserror::Error;

use crate::distributions::FlipDistribution;
use crate::drift::{hypergeom_row_into, PotentialWeights};
use crate::numeric;
use crate::objectives::{BitString, Objective};

/// Errors from the chain oracles.
#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    /// Instance too large for this oracle's state space.
    #[error("instance size n = {n} exceeds this oracle's limit {max}")]
    TooLarge { n: usize, max: usize },
    /// Absorption is not almost sure from this state, so its expected hitting
    /// time is infinite.
    #[error("optimum unreachable from state {state} (expected hitting time is infinite)")]
    UnreachableOptimum { state: usize },
    /// The objective is not a function of the OneMax level.
    #[error("objective kind `{kind}` is not a function of the OneMax level")]
    NotLevelFunction { kind: &'static str },
    /// Objective and distribution dimensions differ.
    #[error(
        "objective dimension {objective} does not match distribution dimension {distribution}"
    )]
    DimensionMismatch {
        objective: usize,
        distribution: usize,
    },
    /// A bitstring of the wrong length was supplied.
    #[error("bitstring length {got} does not match dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    /// State index outside the chain's state space.
    #[error("state {state} outside state space of size {states}")]
    StateOutOfRange { state: usize, states: usize },
}

/// How a [`ChainSolution`] indexes its states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpace {
    /// State `m` = OneMax level `|x|_1`, `m = 0, …, n`.
    OneMaxLevel,
    /// Same indexing, parity-swap fitness on top.
    ParityLevel,
    /// State `b·n + m` where `b = x_1` and `m = |x_{2..n}|_1 ∈ [0, n−1]`.
    AnchoredCompressed,
    /// State = the bitstring read as a little-endian integer mask.
    Full,
}

/// Exact expected hitting times of the optimum for every state of a chain.
#[derive(Clone, Debug)]
pub struct ChainSolution {
    space: StateSpace,
    n: usize,
    /// `INFINITY` marks states without almost-sure absorption.
    expected: Vec<f64>,
    absorbing: Vec<usize>,
    /// Mixture weights of a uniform random bitstring over the states.
    start_weights: Vec<f64>,
}

impl ChainSolution {
    /// The indexing convention of this chain.
    pub fn space(&self) -> StateSpace {
        self.space
    }

    /// Dimension of the underlying bitstrings.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of states.
    pub fn states(&self) -> usize {
        self.expected.len()
    }

    /// States of maximal fitness (expected time 0), ascending.
    pub fn absorbing(&self) -> &[usize] {
        &self.absorbing
    }

    /// Raw expected-iteration vector; `INFINITY` marks states from which
    /// absorption is not almost sure.
    pub fn expected_times(&self) -> &[f64] {
        &self.expected
    }

    /// Weights of each state under a uniform random starting bitstring.
    pub fn start_weights(&self) -> &[f64] {
        &self.start_weights
    }

    /// Expected iterations to reach the optimum from `state`.
    pub fn expected_from(&self, state: usize) -> Result<f64, OracleError> {
        if state >= self.expected.len() {
            return Err(OracleError::StateOutOfRange {
                state,
                states: self.expected.len(),
            });
        }
        let e = self.expected[state];
        if e.is_finite() {
            Ok(e)
        } else {
            Err(OracleError::UnreachableOptimum { state })
        }
    }

    /// Expected iterations from a uniform random starting bitstring.
    pub fn expected_from_uniform(&self) -> Result<f64, OracleError> {
        let mut sum = 0.0;
        for (state, (&e, &w)) in self.expected.iter().zip(&self.start_weights).enumerate() {
            if w > 0.0 {
                if !e.is_finite() {
                    return Err(OracleError::UnreachableOptimum { state });
                }
                sum += w * e;
            }
        }
        Ok(sum)
    }
}

/// Index of the anchored-compressed state with anchor bit `first_bit` and
/// `rest_ones` one-bits among the other `n − 1` positions.
pub fn anchored_state(n: usize, first_bit: bool, rest_ones: usize) -> usize {
    debug_assert!(rest_ones < n);
    (first_bit as usize) * n + rest_ones
}

/// Dense Gauss elimination with partial pivoting; `a` is row-major `m × m`.
fn gauss_solve(a: &mut [f64], rhs: &mut [f64], m: usize) -> Vec<f64> {
    for col in 0..m {
        // partial pivot
        let mut piv = col;
        let mut best = a[col * m + col].abs();
        for row in col + 1..m {
            let v = a[row * m + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        assert!(best > 0.0, "singular tie-block system");
        if piv != col {
            for j in 0..m {
                a.swap(col * m + j, piv * m + j);
            }
            rhs.swap(col, piv);
        }
        let diag = a[col * m + col];
        for row in col + 1..m {
            let factor = a[row * m + col] / diag;
            if factor == 0.0 {
                continue;
            }
            a[row * m + col] = 0.0;
            for j in col + 1..m {
                a[row * m + j] -= factor * a[col * m + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0f64; m];
    for row in (0..m).rev() {
        let mut v = rhs[row];
        for j in row + 1..m {
            v -= a[row * m + j] * x[j];
        }
        x[row] = v / a[row * m + row];
    }
    x
}

/// Solve an elitist chain given per-state fitness and a transition scanner.
///
/// `scan(s, emit)` must enumerate every accepted transition out of `s` with
/// positive mass to a *different* state; emissions to the same target
/// accumulate. Accepted targets never have lower fitness than `s`.
///
/// Processes fitness-tie blocks in descending fitness order: the top block is
/// absorbing; within each block, states that can fail to absorb (no path out,
/// or positive mass towards an infinite-time state) get `INFINITY`, the rest
/// solve a dense linear system.
fn solve_chain(
    states: usize,
    fitness: &[f64],
    mut scan: impl FnMut(usize, &mut dyn FnMut(usize, f64)),
) -> (Vec<f64>, Vec<usize>) {
    assert_eq!(fitness.len(), states);
    assert!(states >= 1);
    let mut order: Vec<usize> = (0..states).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));

    let mut expected = vec![f64::INFINITY; states];
    let mut finite = vec![false; states];
    let mut absorbing = Vec::new();

    // maximal-fitness block: the optima, absorbing by elitism
    let top_f = fitness[order[0]];
    let mut block_start = 0usize;
    while block_start < states && fitness[order[block_start]] == top_f {
        let s = order[block_start];
        expected[s] = 0.0;
        finite[s] = true;
        absorbing.push(s);
        block_start += 1;
    }
    absorbing.sort_unstable();

    let mut local_of = vec![usize::MAX; states];
    while block_start < states {
        let bf = fitness[order[block_start]];
        let mut block_end = block_start;
        while block_end < states && fitness[order[block_end]] == bf {
            block_end += 1;
        }
        let members = &order[block_start..block_end];
        let bsize = members.len();
        for (li, &s) in members.iter().enumerate() {
            local_of[s] = li;
        }

        // one transition scan per member, splitting edges into block-internal
        // ones and exits towards already-solved (higher-fitness) states
        let mut out_total = vec![0.0f64; bsize];
        let mut exit_rhs = vec![0.0f64; bsize];
        let mut exit_inf = vec![false; bsize];
        let mut has_exit = vec![false; bsize];
        let mut block_edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); bsize];
        for (li, &s) in members.iter().enumerate() {
            let fs = fitness[s];
            scan(s, &mut |t: usize, mass: f64| {
                if mass <= 0.0 || t == s {
                    return;
                }
                debug_assert!(fitness[t] >= fs, "accepted edge lowered fitness");
                out_total[li] += mass;
                let lt = local_of[t];
                if lt != usize::MAX {
                    block_edges[li].push((lt, mass));
                } else {
                    has_exit[li] = true;
                    if finite[t] {
                        exit_rhs[li] += mass * expected[t];
                    } else {
                        exit_inf[li] = true;
                    }
                }
            });
        }

        // which members can reach an exit at all (through block ties)?
        let mut exit_reach = has_exit.clone();
        loop {
            let mut changed = false;
            for li in 0..bsize {
                if !exit_reach[li] && block_edges[li].iter().any(|&(lt, _)| exit_reach[lt]) {
                    exit_reach[li] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // doomed = positive probability of never absorbing: stuck without an
        // exit, or any block path to an infinite-time exit
        let mut doomed: Vec<bool> = (0..bsize)
            .map(|li| exit_inf[li] || !exit_reach[li])
            .collect();
        loop {
            let mut changed = false;
            for li in 0..bsize {
                if !doomed[li] && block_edges[li].iter().any(|&(lt, _)| doomed[lt]) {
                    doomed[li] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let cand: Vec<usize> = (0..bsize).filter(|&li| !doomed[li]).collect();
        if cand.len() == 1 {
            // a lone candidate has no block edges (they would all be doomed):
            // scalar back-substitution
            let li = cand[0];
            debug_assert!(block_edges[li].is_empty());
            let s = members[li];
            expected[s] = (1.0 + exit_rhs[li]) / out_total[li];
            finite[s] = true;
        } else if !cand.is_empty() {
            let m = cand.len();
            let mut row_of = vec![usize::MAX; bsize];
            for (ri, &li) in cand.iter().enumerate() {
                row_of[li] = ri;
            }
            // (out_total)·E[x] − Σ_block mass·E[y] = 1 + Σ_exit mass·E[exit]
            let mut a = vec![0.0f64; m * m];
            let mut rhs = vec![0.0f64; m];
            for (ri, &li) in cand.iter().enumerate() {
                a[ri * m + ri] = out_total[li];
                rhs[ri] = 1.0 + exit_rhs[li];
                for &(lt, mass) in &block_edges[li] {
                    let rj = row_of[lt];
                    debug_assert_ne!(rj, usize::MAX, "candidate edge into doomed state");
                    a[ri * m + rj] -= mass;
                }
            }
            let sol = gauss_solve(&mut a, &mut rhs, m);
            for (ri, &li) in cand.iter().enumerate() {
                let s = members[li];
                expected[s] = sol[ri];
                finite[s] = true;
            }
        }

        for &s in members {
            local_of[s] = usize::MAX;
        }
        block_start = block_end;
    }
    (expected, absorbing)
}

/// Binomial start weights `C(n, m)/2^n` over levels `0..=n` (log-space, so
/// they stay finite at any supported `n`).
fn binomial_start_weights(n: usize) -> Vec<f64> {
    let ln2n = n as f64 * 2f64.ln();
    (0..=n)
        .map(|m| (numeric::ln_binom(n, m) - ln2n).exp())
        .collect()
}

/// Exact expected hitting times on the OneMax-level chain (`n + 1` states)
/// for objectives that are a function of `|x|_1`. Supports `n <= 10⁴`.
pub fn level_chain(f: &Objective, dist: &FlipDistribution) -> Result<ChainSolution, OracleError> {
    let n = f.n();
    if dist.n() != n {
        return Err(OracleError::DimensionMismatch {
            objective: n,
            distribution: dist.n(),
        });
    }
    if n > 10_000 {
        return Err(OracleError::TooLarge { n, max: 10_000 });
    }
    let fitness: Vec<f64> = (0..=n)
        .map(|m| {
            f.level_fitness(m).ok_or(OracleError::NotLevelFunction {
                kind: f.kind_name(),
            })
        })
        .collect::<Result<_, _>>()?;
    let support: Vec<(usize, f64)> = dist.support().filter(|&(k, _)| k >= 1).collect();
    let mut buf: Vec<f64> = Vec::new();
    let (expected, absorbing) = solve_chain(n + 1, &fitness, |m, emit| {
        for &(k, pk) in &support {
            let lo = hypergeom_row_into(n, k, m, &mut buf);
            for (j, &mass) in buf.iter().enumerate() {
                if mass <= 0.0 {
                    continue;
                }
                let i = lo + j; // flips landing on the m one-bits
                let m2 = m + k - 2 * i;
                if m2 != m && fitness[m2] >= fitness[m] {
                    emit(m2, pk * mass);
                }
            }
        }
    });
    let space = match f {
        Objective::ParitySwap { .. } => StateSpace::ParityLevel,
        _ => StateSpace::OneMaxLevel,
    };
    Ok(ChainSolution {
        space,
        n,
        expected,
        absorbing,
        start_weights: binomial_start_weights(n),
    })
}

fn full_chain_impl(
    f: &Objective,
    dist: &FlipDistribution,
    strict_acceptance: bool,
) -> Result<ChainSolution, OracleError> {
    let n = f.n();
    if dist.n() != n {
        return Err(OracleError::DimensionMismatch {
            objective: n,
            distribution: dist.n(),
        });
    }
    if n > 16 {
        return Err(OracleError::TooLarge { n, max: 16 });
    }
    let states = 1usize << n;
    let fitness: Vec<f64> = (0..states)
        .map(|mask| {
            f.evaluate(&BitString::from_mask(n, mask as u64))
                .expect("mask has matching length")
        })
        .collect();
    let binoms: Vec<f64> = (0..=n).map(|h| numeric::binom(n, h)).collect();
    let probs = dist.probs();
    let (expected, absorbing) = solve_chain(states, &fitness, |x, emit| {
        let fx = fitness[x];
        for (y, &fy) in fitness.iter().enumerate() {
            if y == x {
                continue;
            }
            let h = (x ^ y).count_ones() as usize;
            let p = probs[h];
            if p <= 0.0 {
                continue;
            }
            let accepted = if strict_acceptance { fy > fx } else { fy >= fx };
            if accepted {
                emit(y, p / binoms[h]);
            }
        }
    });
    Ok(ChainSolution {
        space: StateSpace::Full,
        n,
        expected,
        absorbing,
        start_weights: vec![1.0 / states as f64; states],
    })
}

/// Exact expected hitting times on the full `2^n`-state chain for any
/// objective kind; `n <= 16`. State index = bitstring as little-endian mask.
///
/// Transition rows are streamed (`O(4^n)` time, `O(2^n)` memory plus dense
/// systems over fitness-tie classes).
pub fn full_chain(f: &Objective, dist: &FlipDistribution) -> Result<ChainSolution, OracleError> {
    full_chain_impl(f, dist, false)
}

/// Exact expected hitting times for anchored objectives
/// `f(x) = a·x_1 + |x_{2..n}|_1` on the `2n` compressed states
/// `(x_1, |x_{2..n}|_1)`; `n <= 10⁴`. With `a = 1` this is OneMax in
/// compressed coordinates. State indexing per [`anchored_state`].
pub fn compressed_anchored_chain(
    anchor_weight: f64,
    n: usize,
    dist: &FlipDistribution,
) -> Result<ChainSolution, OracleError> {
    assert!(n >= 2, "compressed chain needs n >= 2");
    assert!(
        anchor_weight > 0.0 && anchor_weight.is_finite(),
        "anchor weight must be positive"
    );
    if dist.n() != n {
        return Err(OracleError::DimensionMismatch {
            objective: n,
            distribution: dist.n(),
        });
    }
    if n > 10_000 {
        return Err(OracleError::TooLarge { n, max: 10_000 });
    }
    let states = 2 * n;
    let fitness: Vec<f64> = (0..states)
        .map(|id| anchor_weight * (id / n) as f64 + (id % n) as f64)
        .collect();
    let support: Vec<(usize, f64)> = dist.support().filter(|&(k, _)| k >= 1).collect();
    let mut buf: Vec<f64> = Vec::new();
    let nf = n as f64;
    let (expected, absorbing) = solve_chain(states, &fitness, |s, emit| {
        let b = s / n;
        let m = s % n;
        let fs = fitness[s];
        for &(k, pk) in &support {
            // the anchor is among the k flips with probability k/n, in which
            // case k−1 flips land uniformly on the n−1 companion positions
            let p_anchor = pk * k as f64 / nf;
            if p_anchor > 0.0 {
                let lo = hypergeom_row_into(n - 1, k - 1, m, &mut buf);
                for (j, &mass) in buf.iter().enumerate() {
                    if mass <= 0.0 {
                        continue;
                    }
                    let i = lo + j;
                    let m2 = m + (k - 1) - 2 * i;
                    let t = (1 - b) * n + m2;
                    if fitness[t] >= fs {
                        emit(t, p_anchor * mass);
                    }
                }
            }
            // anchor kept: all k flips on the companion positions
            if k < n {
                let p_keep = pk * (n - k) as f64 / nf;
                if p_keep > 0.0 {
                    let lo = hypergeom_row_into(n - 1, k, m, &mut buf);
                    for (j, &mass) in buf.iter().enumerate() {
                        if mass <= 0.0 {
                            continue;
                        }
                        let i = lo + j;
                        let m2 = m + k - 2 * i;
                        if m2 == m {
                            continue;
                        }
                        let t = b * n + m2;
                        if fitness[t] >= fs {
                            emit(t, p_keep * mass);
                        }
                    }
                }
            }
        }
    });
    // a uniform random string has anchor b ∈ {0,1} with probability 1/2 each
    // and C(n−1, m)/2^{n−1} on the companions: C(n−1, m)/2^n per state
    let ln2n = n as f64 * 2f64.ln();
    let mut start_weights = vec![0.0f64; states];
    for b in 0..2 {
        for m in 0..n {
            start_weights[b * n + m] = (numeric::ln_binom(n - 1, m) - ln2n).exp();
        }
    }
    Ok(ChainSolution {
        space: StateSpace::AnchoredCompressed,
        n,
        expected,
        absorbing,
        start_weights,
    })
}

/// Which potential [`exact_step_drift`] measures.
#[derive(Clone, Copy, Debug)]
pub enum StepPotential<'a> {
    /// The folded distance `min(|x|_1, n − |x|_1)` of the best point
    /// *evaluated* so far. Offspring count whether or not they are accepted,
    /// so this drift is acceptance-free (the objective plays no role).
    Distance,
    /// A weighted potential `Σ g_i·x̄_i` under true elitist acceptance on the
    /// supplied objective.
    Weighted(&'a PotentialWeights),
}

/// Exhaustive one-step drift `E[pot(x) − pot(after one mutation)]⁺-or-signed`:
/// for [`StepPotential::Distance`] the expected *positive* decrease of the
/// folded distance (enumerating all `2^n` flip sets for `n <= 14`, switching
/// to the exact hypergeometric form beyond); for [`StepPotential::Weighted`]
/// the expected signed potential decrease over *accepted* offspring only
/// (subset enumeration, `n <= 14`).
pub fn exact_step_drift(
    f: &Objective,
    dist: &FlipDistribution,
    x: &BitString,
    potential: StepPotential<'_>,
) -> Result<f64, OracleError> {
    let n = f.n();
    if dist.n() != n {
        return Err(OracleError::DimensionMismatch {
            objective: n,
            distribution: dist.n(),
        });
    }
    if x.len() != n {
        return Err(OracleError::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let probs = dist.probs();
    match potential {
        StepPotential::Distance => {
            let m = x.ones();
            let dx = x.distance() as f64;
            if n <= 14 {
                // true brute force: every flip set, counted directly
                let xmask = x.as_words()[0];
                let binoms: Vec<f64> = (0..=n).map(|h| numeric::binom(n, h)).collect();
                let mut total = 0.0;
                for mask in 1..(1u64 << n) {
                    let pc = mask.count_ones() as usize;
                    let p = probs[pc];
                    if p <= 0.0 {
                        continue;
                    }
                    let m2 = (xmask ^ mask).count_ones() as usize;
                    let dy = m2.min(n - m2) as f64;
                    if dx > dy {
                        total += p / binoms[pc] * (dx - dy);
                    }
                }
                Ok(total)
            } else {
                // E[(d(x) − d(y))⁺] via hypergeometric rows over |y|_1
                let mut buf: Vec<f64> = Vec::new();
                let mut total = 0.0;
                for (k, pk) in dist.support() {
                    if k == 0 {
                        continue;
                    }
                    let lo = hypergeom_row_into(n, k, m, &mut buf);
                    for (j, &mass) in buf.iter().enumerate() {
                        if mass <= 0.0 {
                            continue;
                        }
                        let i = lo + j;
                        let m2 = m + k - 2 * i;
                        let dy = m2.min(n - m2) as f64;
                        if dx > dy {
                            total += pk * mass * (dx - dy);
                        }
                    }
                }
                Ok(total)
            }
        }
        StepPotential::Weighted(pw) => {
            if n > 14 {
                return Err(OracleError::TooLarge { n, max: 14 });
            }
            if pw.n != n {
                return Err(OracleError::LengthMismatch {
                    expected: n,
                    got: pw.n,
                });
            }
            let g = pw.g();
            let total_g: f64 = g.iter().sum();
            let g_sum = |mask: u64| -> f64 {
                let mut s = 0.0;
                let mut bits = mask;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    s += g[b];
                    bits &= bits - 1;
                }
                s
            };
            let xmask = x.as_words()[0];
            let fx = f.evaluate(x).expect("length checked");
            // potential of the complemented string: Σ_{i: x_i = 0} g_i
            let pot_x = total_g - g_sum(xmask);
            let binoms: Vec<f64> = (0..=n).map(|h| numeric::binom(n, h)).collect();
            let mut total = 0.0;
            for mask in 1..(1u64 << n) {
                let pc = mask.count_ones() as usize;
                let p = probs[pc];
                if p <= 0.0 {
                    continue;
                }
                let ymask = xmask ^ mask;
                let y = BitString::from_mask(n, ymask);
                let fy = f.evaluate(&y).expect("length checked");
                if fy >= fx {
                    let pot_y = total_g - g_sum(ymask);
                    total += p / binoms[pc] * (pot_x - pot_y);
                }
            }
            Ok(total)
        }
    }
}

/// Exact rational recomputation of the combinatorial kernels, for
/// cross-checking the `f64` paths.
pub mod rational {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{Signed, ToPrimitive, Zero};

    /// Exact binomial coefficient `C(a, b)`.
    pub fn binomial(a: usize, b: usize) -> BigInt {
        if b > a {
            return BigInt::zero();
        }
        let b = b.min(a - b);
        let mut prod = BigInt::from(1u32);
        for j in 1..=b {
            prod *= BigInt::from(a - b + j);
            prod /= BigInt::from(j); // exact: every prefix product is C(a−b+j, j)·j!
        }
        prod
    }

    /// Exact hypergeometric mass `C(d,i)·C(n−d,r−i)/C(n,r)`; zero outside
    /// the support. Requires `r <= n` so the denominator is positive.
    pub fn hypergeom(n: usize, r: usize, d: usize, i: usize) -> BigRational {
        assert!(r <= n && d <= n);
        if i > r || i > d || r - i > n - d {
            return BigRational::zero();
        }
        BigRational::new(binomial(d, i) * binomial(n - d, r - i), binomial(n, r))
    }

    /// Exact `B(n, d, r) = Σ (2i − r)·pmf` over the progress range.
    pub fn expected_progress(n: usize, d: usize, r: usize) -> BigRational {
        assert!(r >= 1 && r <= n && d <= n);
        let lo = r.div_ceil(2).max((r + d).saturating_sub(n));
        let hi = d.min(r);
        let mut sum = BigRational::zero();
        for i in lo..=hi {
            let coeff = BigInt::from(2 * i as i64 - r as i64);
            sum += BigRational::from(coeff) * hypergeom(n, r, d, i);
        }
        sum
    }

    /// Round an exact rational to the nearest `f64`.
    pub fn to_f64(q: &BigRational) -> f64 {
        q.to_f64().unwrap_or_else(|| {
            if q.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
}
