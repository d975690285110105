//! Shared floating-point combinatorics kernels.
//!
//! Binomial coefficients are evaluated as interleaved products of ratios (never
//! raw factorials), which keeps every partial product bounded by the final
//! value; a thread-local cumulative log-factorial table (Kahan-compensated)
//! covers sizes where direct products would overflow `f64`.

use std::cell::RefCell;

/// Largest `n` for which `C(n, k)` is guaranteed finite in `f64`
/// (`C(1024, 512) ≈ 4.5e306 < f64::MAX`).
pub(crate) const DIRECT_BINOM_LIMIT: usize = 1024;

/// Binomial coefficient `C(a, b)` as `f64` via a multiplicative loop.
///
/// Exact for small arguments, relative error a few ulps per factor otherwise.
/// Finite for `a <= DIRECT_BINOM_LIMIT`; may overflow to `inf` beyond that —
/// callers needing larger sizes go through [`ln_binom`].
pub(crate) fn binom(a: usize, b: usize) -> f64 {
    if b > a {
        return 0.0;
    }
    let b = b.min(a - b);
    let mut prod = 1.0f64;
    for j in 1..=b {
        // (a - b + j) / j, interleaved so partial products stay <= C(a, b)
        prod *= (a - b + j) as f64 / j as f64;
    }
    prod
}

thread_local! {
    // ln_fact[k] = ln(k!), grown on demand with compensated summation
    static LN_FACT: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

/// `ln(k!)` from a cumulative table with Kahan compensation.
pub(crate) fn ln_factorial(k: usize) -> f64 {
    LN_FACT.with(|cell| {
        let mut table = cell.borrow_mut();
        if table.is_empty() {
            table.push(0.0); // ln 0! = 0
        }
        if table.len() <= k {
            // extend with compensated accumulation of ln j
            let mut sum = *table.last().expect("non-empty");
            let mut comp = 0.0f64;
            for j in table.len()..=k {
                let term = (j as f64).ln() - comp;
                let next = sum + term;
                comp = (next - sum) - term;
                sum = next;
                table.push(sum);
            }
        }
        table[k]
    })
}

/// `ln C(a, b)`; `-inf` when `b > a` (so `exp` gives 0).
pub(crate) fn ln_binom(a: usize, b: usize) -> f64 {
    if b > a {
        return f64::NEG_INFINITY;
    }
    ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b)
}
