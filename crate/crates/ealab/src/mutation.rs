//! The unary unbiased mutation operator: flip a uniformly random `k`-subset
//! of positions, with `k` drawn from a flip distribution.
//!
//! Randomness comes from caller-supplied ChaCha8 generators (see
//! [`crate::engine`] for seed derivation), so every draw is reproducible.

use rand::{Rng, RngExt};
use thiserror::Error;

use crate::distributions::FlipDistribution;
use crate::objectives::BitString;

/// Errors from the mutation operator.
#[derive(Debug, Error, PartialEq)]
pub enum MutationError {
    /// Requested flip count outside `[0, n]`.
    #[error("flip count {k} outside [0, {n}]")]
    OutOfRange { k: usize, n: usize },
}

/// A drawn set of positions to flip, in one of two encodings:
/// an explicit position list for `k <= n/2`, or the complement encoding
/// "flip everything except these" for larger `k` (so a draw never costs more
/// than `O(min(k, n−k))` random numbers).
///
/// Applying the same `FlipSet` twice is the identity — the run engine uses
/// this to keep a mirrored offspring buffer without copying.
#[derive(Debug, PartialEq, Eq)]
pub enum FlipSet<'a> {
    /// Flip exactly these positions.
    Positions(&'a [u32]),
    /// Flip every position except these.
    AllBut(&'a [u32]),
}

impl FlipSet<'_> {
    /// Number of positions that change under this flip set.
    pub fn size(&self, n: usize) -> usize {
        match self {
            FlipSet::Positions(ps) => ps.len(),
            FlipSet::AllBut(keep) => n - keep.len(),
        }
    }

    /// The explicit position list, when this draw used the direct encoding.
    pub fn positions(&self) -> Option<&[u32]> {
        match self {
            FlipSet::Positions(ps) => Some(ps),
            FlipSet::AllBut(_) => None,
        }
    }

    /// XOR the flip set into `x` (an involution).
    pub fn apply(&self, x: &mut BitString) {
        match self {
            FlipSet::Positions(ps) => {
                for &p in *ps {
                    x.flip(p as usize);
                }
            }
            FlipSet::AllBut(keep) => {
                x.flip_all();
                for &p in *keep {
                    x.flip(p as usize);
                }
            }
        }
    }
}

/// Reusable sampler of uniform random position subsets of `{0, …, n−1}`.
///
/// A partial Fisher–Yates pass over a persistent index array draws a uniform
/// `m`-subset in `O(m)` time with no per-draw allocation; the array stays a
/// permutation between draws, so reuse keeps every draw uniform.
pub struct Mutator {
    n: usize,
    idx: Vec<u32>,
}

impl Mutator {
    /// A sampler for strings of length `n`.
    pub fn new(n: usize) -> Self {
        Mutator {
            n,
            idx: (0..n as u32).collect(),
        }
    }

    /// Dimension this sampler draws for.
    pub fn n(&self) -> usize {
        self.n
    }

    fn partial_shuffle<R: Rng + ?Sized>(&mut self, m: usize, rng: &mut R) {
        for i in 0..m {
            let j = rng.random_range(i..self.n);
            self.idx.swap(i, j);
        }
    }

    /// Draw a uniform random `k`-subset as a [`FlipSet`] borrowing this
    /// sampler's scratch space. Uses the complement encoding when
    /// `k > n/2`, sampling the `n − k` kept positions instead.
    pub fn draw<R: Rng + ?Sized>(
        &mut self,
        k: usize,
        rng: &mut R,
    ) -> Result<FlipSet<'_>, MutationError> {
        if k > self.n {
            return Err(MutationError::OutOfRange { k, n: self.n });
        }
        if 2 * k <= self.n {
            self.partial_shuffle(k, rng);
            Ok(FlipSet::Positions(&self.idx[..k]))
        } else {
            let keep = self.n - k;
            self.partial_shuffle(keep, rng);
            Ok(FlipSet::AllBut(&self.idx[..keep]))
        }
    }

    /// `flip_k`: a fresh offspring differing from `x` in a uniform random
    /// `k`-subset of positions.
    pub fn flip_k<R: Rng + ?Sized>(
        &mut self,
        x: &BitString,
        k: usize,
        rng: &mut R,
    ) -> Result<BitString, MutationError> {
        debug_assert_eq!(x.len(), self.n);
        let fs = self.draw(k, rng)?;
        let mut y = x.clone();
        fs.apply(&mut y);
        Ok(y)
    }

    /// `mut_D`: draw `k ~ D`, then `flip_k`. Returns the offspring and the
    /// drawn flip count. Lengths must match (checked by assertion).
    pub fn mutate<R: Rng + ?Sized>(
        &mut self,
        x: &BitString,
        d: &FlipDistribution,
        rng: &mut R,
    ) -> (BitString, usize) {
        assert_eq!(d.n(), self.n, "distribution dimension mismatch");
        assert_eq!(x.len(), self.n, "bitstring length mismatch");
        let k = d.sample(rng);
        let y = self.flip_k(x, k, rng).expect("sampled k is within [0, n]");
        (y, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_point_mass, make_power_law, make_standard_bit_mutation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flip_k_changes_exactly_k_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 5, 64, 70, 129] {
            let mut mt = Mutator::new(n);
            let x = BitString::random(n, &mut rng);
            for k in [0usize, 1, n / 2, n.saturating_sub(1), n] {
                let y = mt.flip_k(&x, k, &mut rng).unwrap();
                assert_eq!(x.hamming(&y), k, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn edge_flip_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut mt = Mutator::new(12);
        let x = BitString::random(12, &mut rng);
        assert_eq!(mt.flip_k(&x, 0, &mut rng).unwrap(), x);
        assert_eq!(mt.flip_k(&x, 12, &mut rng).unwrap(), x.complement());
        assert_eq!(
            mt.flip_k(&x, 13, &mut rng).unwrap_err(),
            MutationError::OutOfRange { k: 13, n: 12 }
        );
    }

    #[test]
    fn apply_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut mt = Mutator::new(40);
        let x = BitString::random(40, &mut rng);
        for k in [1usize, 7, 20, 33, 39] {
            let mut y = x.clone();
            // capture the drawn set once, apply twice
            let fs = mt.draw(k, &mut rng).unwrap();
            fs.apply(&mut y);
            assert_eq!(x.hamming(&y), k);
            fs.apply(&mut y);
            assert_eq!(y, x);
        }
    }

    /// Subset frequencies for (n, k) over `draws` draws, keyed by bitmask.
    fn subset_counts(
        n: usize,
        k: usize,
        draws: usize,
        seed: u64,
    ) -> std::collections::HashMap<u64, u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mt = Mutator::new(n);
        let zero = BitString::all_zeros(n);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            let y = mt.flip_k(&zero, k, &mut rng).unwrap();
            *counts.entry(y.as_words()[0]).or_insert(0u64) += 1;
        }
        counts
    }

    #[test]
    fn subsets_uniform_direct_path() {
        // n = 4, k = 2: six subsets; χ²(df = 5) 0.999 quantile = 20.515
        let draws = 600_000;
        let counts = subset_counts(4, 2, draws, 42);
        assert_eq!(counts.len(), 6);
        let expect = draws as f64 / 6.0;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        assert!(stat < 20.515, "chi2 = {stat}");
    }

    #[test]
    fn subsets_uniform_complement_path() {
        // n = 5, k = 3 uses the complement encoding; ten subsets, df = 9,
        // χ² 0.999 quantile = 27.877
        let draws = 500_000;
        let counts = subset_counts(5, 3, draws, 43);
        assert_eq!(counts.len(), 10);
        let expect = draws as f64 / 10.0;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        assert!(stat < 27.877, "chi2 = {stat}");
    }

    #[test]
    fn mutate_reports_drawn_k_and_marginals_match() {
        // per-position flip frequency must be χ/n for every position
        let n = 32;
        let draws = 400_000usize;
        for (d, seed) in [
            (make_point_mass(n, 3).unwrap(), 51u64),
            (make_standard_bit_mutation(n, 1.0).unwrap(), 52),
            (make_power_law(n, 2.0).unwrap(), 53),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut mt = Mutator::new(n);
            let x = BitString::random(n, &mut rng);
            let mut counts = vec![0u64; n];
            for _ in 0..draws {
                let (y, k) = mt.mutate(&x, &d, &mut rng);
                assert_eq!(x.hamming(&y), k);
                for (i, slot) in counts.iter_mut().enumerate() {
                    if x.get(i) != y.get(i) {
                        *slot += 1;
                    }
                }
            }
            let q = d.mean() / n as f64;
            let sigma = (q * (1.0 - q) * draws as f64).sqrt();
            for (i, &c) in counts.iter().enumerate() {
                let dev = (c as f64 - q * draws as f64).abs();
                assert!(
                    dev <= 4.5 * sigma,
                    "position {i}: dev = {dev}, sigma = {sigma}"
                );
            }
        }
    }

    #[test]
    fn permuted_coordinates_flip_at_the_same_rate() {
        // relabelling coordinates must not change per-position flip statistics
        let n = 16;
        let draws = 200_000usize;
        let perm: Vec<usize> = (0..n).map(|i| (5 * i + 3) % n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut mt = Mutator::new(n);
        let x = BitString::all_zeros(n);
        let mut direct = vec![0u64; n];
        let mut relabeled = vec![0u64; n];
        for t in 0..draws {
            let y = mt.flip_k(&x, 2, &mut rng).unwrap();
            for i in 0..n {
                if y.get(i) {
                    if t % 2 == 0 {
                        direct[i] += 1;
                    } else {
                        relabeled[perm[i]] += 1;
                    }
                }
            }
        }
        let m = draws as f64 / 2.0;
        let q = 2.0 / n as f64;
        let sigma = (q * (1.0 - q) * m).sqrt();
        for i in 0..n {
            assert!((direct[i] as f64 - q * m).abs() <= 4.5 * sigma);
            assert!((relabeled[i] as f64 - q * m).abs() <= 4.5 * sigma);
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let d = make_standard_bit_mutation(20, 1.5).unwrap();
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut mt = Mutator::new(20);
            let x = BitString::all_zeros(20);
            (0..50)
                .map(|_| mt.mutate(&x, &d, &mut rng).0.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }
}
