//! Pseudo-Boolean benchmark functions over fixed-length bitstrings.
//!
//! Every maximisable kind provided here has its unique global optimum at the
//! all-ones string (parity-swap needs an even length for uniqueness), so
//! runtime experiments across kinds are directly comparable.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors from objective construction and evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    /// A bitstring of the wrong length was passed to `evaluate`.
    #[error("bitstring length {got} does not match objective dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    /// Linear/anchored weights must be strictly positive (and finite).
    #[error("weight {value} at index {index} must be strictly positive and finite")]
    NonPositiveWeight { index: usize, value: f64 },
    /// A linear objective needs at least one weight.
    #[error("linear objective needs at least one weight")]
    EmptyWeights,
}

/// A fixed-length binary string, bit-packed into `u64` words with a cached
/// popcount. Bit `i` of the string is bit `i % 64` of word `i / 64`; unused
/// high bits of the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    n: usize,
    words: Vec<u64>,
    ones: usize,
}

impl BitString {
    /// The all-zeros string of length `n`.
    pub fn all_zeros(n: usize) -> Self {
        BitString {
            n,
            words: vec![0u64; n.div_ceil(64)],
            ones: 0,
        }
    }

    /// The all-ones string of length `n`.
    pub fn all_ones(n: usize) -> Self {
        let mut x = Self::all_zeros(n);
        x.flip_all();
        x
    }

    /// Build from explicit bit values; `bits[i]` is position `i`.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Self::all_zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                x.flip(i);
            }
        }
        x
    }

    /// Build from the low `n` bits of a mask (`n <= 64`); bit `i` of the mask
    /// is position `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "mask constructor supports n <= 64");
        if n < 64 {
            assert_eq!(mask >> n, 0, "mask has bits beyond position n");
        }
        BitString {
            n,
            words: vec![mask],
            ones: mask.count_ones() as usize,
        }
    }

    /// A uniformly random string of length `n`.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand::RngExt as _;
        let mut words: Vec<u64> = (0..n.div_ceil(64)).map(|_| rng.random()).collect();
        let tail = n % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        BitString { n, words, ones }
    }

    /// Number of positions.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the string has length zero.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Cached number of one-bits.
    pub fn ones(&self) -> usize {
        self.ones
    }

    /// Value of position `i`.
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.n,
            "position {i} out of range for length {}",
            self.n
        );
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Flip position `i`, keeping the popcount cache current.
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.n,
            "position {i} out of range for length {}",
            self.n
        );
        let w = i / 64;
        let mask = 1u64 << (i % 64);
        if self.words[w] & mask != 0 {
            self.ones -= 1;
        } else {
            self.ones += 1;
        }
        self.words[w] ^= mask;
    }

    /// Flip every position (used by complement-coded mutations).
    pub fn flip_all(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        let tail = self.n % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        self.ones = self.n - self.ones;
    }

    /// The bitwise complement.
    pub fn complement(&self) -> Self {
        let mut y = self.clone();
        y.flip_all();
        y
    }

    /// Hamming distance to `other` (lengths must match).
    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.n, other.n, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Folded distance `min(|x|_1, n - |x|_1)`: Hamming distance to the nearer
    /// of the all-ones string and its antipode. This is the distance potential
    /// used throughout the drift calculus.
    pub fn distance(&self) -> usize {
        self.ones.min(self.n - self.ones)
    }

    /// The packed words (little-endian in position order).
    pub fn as_words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(n={}, ones={})", self.n, self.ones)
        }
    }
}

/// A benchmark function to be maximised.
///
/// All kinds have their unique maximum at the all-ones string; parity-swap
/// with odd length is the one exception (two-point plateau at the top) and is
/// rejected by the run engine.
#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    /// `f(x) = |x|_1`.
    OneMax { n: usize },
    /// `f(x) = Σ w_i x_i` with strictly positive weights, stored sorted
    /// ascending (a coordinate relabelling, which unbiased mutation cannot
    /// distinguish).
    Linear { weights: Vec<f64> },
    /// `f(x) = Σ 2^i x_i`, the lexicographically extreme linear function.
    ///
    /// `evaluate` returns the exact value only while it fits a double
    /// (`n <= 52`); beyond that it rounds (and reaches `inf` past `n = 1024`).
    /// The run engine never relies on `evaluate` for BinVal acceptance — it
    /// compares bitstrings as binary integers, which is exact at every `n`.
    BinVal { n: usize },
    /// `f(x) = |x|_1` when `|x|_1` is even, `n - |x|_1` when odd: a function
    /// of the OneMax level that interleaves two fitness ladders.
    ParitySwap { n: usize },
    /// `f(x) = a·x_1 + Σ_{i>=2} x_i`: OneMax with one heavy anchor bit.
    Anchored { n: usize, anchor_weight: f64 },
}

/// `f(x) = |x|_1` on `n >= 1` positions.
pub fn make_onemax(n: usize) -> Objective {
    assert!(n >= 1, "OneMax needs at least one position");
    Objective::OneMax { n }
}

/// Positive-weight linear function. Weights are sorted ascending on
/// construction; zero, negative, or non-finite weights are rejected.
pub fn make_linear(weights: Vec<f64>) -> Result<Objective, ObjectiveError> {
    if weights.is_empty() {
        return Err(ObjectiveError::EmptyWeights);
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(ObjectiveError::NonPositiveWeight { index, value });
        }
    }
    let mut weights = weights;
    weights.sort_by(f64::total_cmp);
    Ok(Objective::Linear { weights })
}

/// `f(x) = Σ 2^i x_i` on `n >= 1` positions. See [`Objective::BinVal`] for
/// the precision contract of `evaluate` at large `n`.
pub fn make_binval(n: usize) -> Objective {
    assert!(n >= 1, "BinVal needs at least one position");
    Objective::BinVal { n }
}

/// Parity-swap on `n >= 2` positions; the optimum is unique only for even `n`.
pub fn make_parity_swap(n: usize) -> Objective {
    assert!(n >= 2, "parity-swap needs at least two positions");
    Objective::ParitySwap { n }
}

/// Anchored OneMax with first-position weight `anchor_weight > 0` on `n >= 2`
/// positions.
pub fn make_anchored(n: usize, anchor_weight: f64) -> Result<Objective, ObjectiveError> {
    assert!(n >= 2, "anchored objective needs at least two positions");
    if !anchor_weight.is_finite() || anchor_weight <= 0.0 {
        return Err(ObjectiveError::NonPositiveWeight {
            index: 0,
            value: anchor_weight,
        });
    }
    Ok(Objective::Anchored { n, anchor_weight })
}

impl Objective {
    /// Dimension (number of positions).
    pub fn n(&self) -> usize {
        match self {
            Objective::OneMax { n }
            | Objective::BinVal { n }
            | Objective::ParitySwap { n }
            | Objective::Anchored { n, .. } => *n,
            Objective::Linear { weights } => weights.len(),
        }
    }

    /// Stable kind label used in CSV/JSON reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Objective::OneMax { .. } => "onemax",
            Objective::Linear { .. } => "linear",
            Objective::BinVal { .. } => "binval",
            Objective::ParitySwap { .. } => "parity_swap",
            Objective::Anchored { .. } => "anchored",
        }
    }

    /// Fitness of `x`.
    pub fn evaluate(&self, x: &BitString) -> Result<f64, ObjectiveError> {
        if x.len() != self.n() {
            return Err(ObjectiveError::LengthMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(match self {
            Objective::OneMax { .. } => x.ones() as f64,
            Objective::Linear { weights } => {
                let mut sum = 0.0;
                for (wi, &word) in x.as_words().iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        sum += weights[wi * 64 + b];
                        bits &= bits - 1;
                    }
                }
                sum
            }
            Objective::BinVal { .. } => {
                let mut sum = 0.0;
                for (wi, &word) in x.as_words().iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        sum += 2f64.powi((wi * 64 + b) as i32);
                        bits &= bits - 1;
                    }
                }
                sum
            }
            Objective::ParitySwap { n } => {
                let m = x.ones();
                if m.is_multiple_of(2) {
                    m as f64
                } else {
                    (n - m) as f64
                }
            }
            Objective::Anchored { anchor_weight, .. } => {
                let anchor = x.get(0) as usize as f64;
                anchor_weight * anchor + (x.ones() as f64 - anchor)
            }
        })
    }

    /// The unique global maximiser, when one exists (`None` for parity-swap
    /// with odd length, which tops out on a two-level plateau).
    pub fn optimum(&self) -> Option<BitString> {
        match self {
            Objective::ParitySwap { n } if n % 2 == 1 => None,
            _ => Some(BitString::all_ones(self.n())),
        }
    }

    /// For kinds whose fitness depends on `x` only through the OneMax level
    /// `m = |x|_1`, the fitness of level `m`; `None` otherwise.
    pub fn level_fitness(&self, m: usize) -> Option<f64> {
        match self {
            Objective::OneMax { .. } => Some(m as f64),
            Objective::ParitySwap { n } => Some(if m.is_multiple_of(2) {
                m as f64
            } else {
                (n - m) as f64
            }),
            _ => None,
        }
    }

    /// The weight vector of a linear objective (sorted ascending).
    pub fn linear_weights(&self) -> Option<&[f64]> {
        match self {
            Objective::Linear { weights } => Some(weights),
            _ => None,
        }
    }
}

/// JSON description of an objective, as accepted by experiment configs:
/// `{"kind": "onemax"|"linear"|"binval"|"parity_swap"|"anchored",
///   "n": int?, "weights": [real]?, "anchor_weight": real?}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_weight: Option<f64>,
}

/// Objective kind tags recognised in configs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Onemax,
    Linear,
    Binval,
    ParitySwap,
    Anchored,
}

impl ObjectiveSpec {
    /// Build the objective; `ctx_n` supplies the dimension when the config
    /// carries it at an outer level (sweeps, drift commands). A spec-level
    /// `n` that contradicts the context is an error, not silently overridden.
    pub fn build(&self, ctx_n: Option<usize>) -> Result<Objective, String> {
        if let (Some(context), Some(declared)) = (ctx_n, self.n) {
            if context != declared {
                return Err(format!(
                    "objective spec declares n = {declared}, but the config supplies n = {context}"
                ));
            }
        }
        let n = ctx_n.or(self.n);
        let need_n = |what: &str| -> Result<usize, String> {
            n.ok_or_else(|| format!("objective kind `{what}` needs field `n`"))
        };
        match self.kind {
            ObjectiveKind::Onemax => {
                let n = need_n("onemax")?;
                if n == 0 {
                    return Err("objective needs n >= 1".into());
                }
                Ok(make_onemax(n))
            }
            ObjectiveKind::Binval => {
                let n = need_n("binval")?;
                if n == 0 {
                    return Err("objective needs n >= 1".into());
                }
                Ok(make_binval(n))
            }
            ObjectiveKind::ParitySwap => {
                let n = need_n("parity_swap")?;
                if n < 2 {
                    return Err("parity_swap needs n >= 2".into());
                }
                Ok(make_parity_swap(n))
            }
            ObjectiveKind::Anchored => {
                let n = need_n("anchored")?;
                if n < 2 {
                    return Err("anchored needs n >= 2".into());
                }
                let a = self
                    .anchor_weight
                    .ok_or("objective kind `anchored` needs field `anchor_weight`")?;
                make_anchored(n, a).map_err(|e| e.to_string())
            }
            ObjectiveKind::Linear => {
                let weights = self
                    .weights
                    .clone()
                    .ok_or("objective kind `linear` needs field `weights`")?;
                if let Some(ctx) = ctx_n {
                    if ctx != weights.len() {
                        return Err(format!(
                            "linear weights length {} does not match n = {ctx}",
                            weights.len()
                        ));
                    }
                }
                make_linear(weights).map_err(|e| e.to_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_flip_and_count() {
        let mut x = BitString::all_zeros(70);
        assert_eq!(x.ones(), 0);
        x.flip(0);
        x.flip(69);
        assert_eq!(x.ones(), 2);
        assert!(x.get(0) && x.get(69) && !x.get(35));
        x.flip(0);
        assert_eq!(x.ones(), 1);
    }

    #[test]
    fn bitstring_flip_all_masks_tail() {
        for n in [1usize, 63, 64, 65, 70, 128, 129] {
            let mut x = BitString::all_zeros(n);
            x.flip_all();
            assert_eq!(x.ones(), n, "n = {n}");
            // unused high bits stay zero
            let tail = n % 64;
            if tail != 0 {
                assert_eq!(x.as_words().last().unwrap() >> tail, 0);
            }
            x.flip_all();
            assert_eq!(x.ones(), 0);
        }
    }

    #[test]
    fn bitstring_hamming_and_complement() {
        let x = BitString::from_bits(&[true, false, true, false, true]);
        let y = x.complement();
        assert_eq!(x.hamming(&y), 5);
        assert_eq!(x.hamming(&x), 0);
        assert_eq!(y.ones(), 2);
    }

    #[test]
    fn distance_examples() {
        // |x|_1 = 3 of n = 10 -> 3; 8 of 10 -> 2; optimum and antipode -> 0
        let mut x = BitString::all_zeros(10);
        for i in 0..3 {
            x.flip(i);
        }
        assert_eq!(x.distance(), 3);
        for i in 3..8 {
            x.flip(i);
        }
        assert_eq!(x.distance(), 2);
        assert_eq!(BitString::all_ones(10).distance(), 0);
        assert_eq!(BitString::all_zeros(10).distance(), 0);
    }

    #[test]
    fn distance_complement_symmetric() {
        let mut x = BitString::all_zeros(37);
        for i in [0usize, 3, 4, 11, 20, 36] {
            x.flip(i);
        }
        assert_eq!(x.distance(), x.complement().distance());
    }

    #[test]
    fn from_mask_roundtrip() {
        let x = BitString::from_mask(6, 0b101101);
        assert_eq!(x.ones(), 4);
        assert!(x.get(0) && !x.get(1) && x.get(2) && x.get(3) && !x.get(4) && x.get(5));
        assert_eq!(x.to_string(), "101101");
    }

    #[test]
    fn onemax_and_parity_swap_examples() {
        let pm = make_parity_swap(4);
        // f(1111) = 4, f(1000) = 3, f(0110) = 2
        assert_eq!(pm.evaluate(&BitString::all_ones(4)).unwrap(), 4.0);
        assert_eq!(pm.evaluate(&BitString::from_mask(4, 0b0001)).unwrap(), 3.0);
        assert_eq!(pm.evaluate(&BitString::from_mask(4, 0b0110)).unwrap(), 2.0);
        let om = make_onemax(4);
        assert_eq!(om.evaluate(&BitString::from_mask(4, 0b0110)).unwrap(), 2.0);
    }

    #[test]
    fn linear_sorts_and_validates() {
        let f = make_linear(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(f.linear_weights().unwrap(), &[1.0, 2.0, 3.0]);
        // after sorting, x = 101 picks weights 1 and 3
        let x = BitString::from_mask(3, 0b101);
        assert_eq!(f.evaluate(&x).unwrap(), 4.0);
        assert_eq!(
            make_linear(vec![1.0, 0.0, 2.0]).unwrap_err(),
            ObjectiveError::NonPositiveWeight {
                index: 1,
                value: 0.0
            }
        );
        assert_eq!(
            make_linear(vec![]).unwrap_err(),
            ObjectiveError::EmptyWeights
        );
    }

    #[test]
    fn binval_values() {
        let f = make_binval(4);
        assert_eq!(f.evaluate(&BitString::from_mask(4, 0b1010)).unwrap(), 10.0);
        assert_eq!(f.evaluate(&BitString::all_ones(4)).unwrap(), 15.0);
        // exact through n = 52
        let g = make_binval(52);
        assert_eq!(
            g.evaluate(&BitString::all_ones(52)).unwrap(),
            (1u64 << 52) as f64 - 1.0
        );
    }

    #[test]
    fn anchored_examples() {
        let f = make_anchored(4, 4.0).unwrap();
        assert_eq!(f.evaluate(&BitString::from_mask(4, 0b0001)).unwrap(), 4.0);
        assert_eq!(f.evaluate(&BitString::from_mask(4, 0b1110)).unwrap(), 3.0);
        assert_eq!(f.evaluate(&BitString::all_ones(4)).unwrap(), 7.0);
        assert!(make_anchored(4, 0.0).is_err());
    }

    #[test]
    fn evaluate_length_mismatch() {
        let f = make_onemax(5);
        assert_eq!(
            f.evaluate(&BitString::all_zeros(4)).unwrap_err(),
            ObjectiveError::LengthMismatch {
                expected: 5,
                got: 4
            }
        );
    }

    #[test]
    fn optima_unique_exhaustively() {
        let mut cases = vec![
            make_onemax(16),
            make_binval(16),
            make_parity_swap(8),
            make_anchored(10, 3.0).unwrap(),
            make_linear((1..=10).map(|i| i as f64 * 1.5).collect()).unwrap(),
        ];
        // parity-swap with odd n has no unique optimum
        assert!(make_parity_swap(5).optimum().is_none());
        for f in cases.drain(..) {
            let n = f.n();
            let opt = f.optimum().expect("unique optimum");
            let fopt = f.evaluate(&opt).unwrap();
            for mask in 0..(1u64 << n) {
                let x = BitString::from_mask(n, mask);
                if x != opt {
                    assert!(
                        f.evaluate(&x).unwrap() < fopt,
                        "{} not below optimum for {:?}",
                        mask,
                        f.kind_name()
                    );
                }
            }
        }
    }

    #[test]
    fn parity_swap_level_multiset_matches_onemax() {
        // parity-swap permutes the level fitness values; the multiset of
        // (level count, fitness) pairs matches OneMax after relabelling
        for n in [4usize, 6, 8] {
            let pm = make_parity_swap(n);
            let mut values: Vec<f64> = (0..=n).map(|m| pm.level_fitness(m).unwrap()).collect();
            values.sort_by(f64::total_cmp);
            let expect: Vec<f64> = (0..=n).map(|m| m as f64).collect();
            assert_eq!(values, expect, "n = {n}");
        }
    }

    #[test]
    fn linear_monotone_componentwise() {
        // y >= x componentwise implies f(y) >= f(x); exhaustive at n = 10
        let f = make_linear(vec![0.5, 0.7, 1.1, 2.0, 3.0, 3.5, 4.0, 5.5, 6.1, 9.0]).unwrap();
        for x in 0..(1u64 << 10) {
            let fx = f.evaluate(&BitString::from_mask(10, x)).unwrap();
            // enumerate supersets of x by walking submasks of the complement
            let comp = !x & ((1 << 10) - 1);
            let mut extra = comp;
            loop {
                let y = x | extra;
                let fy = f.evaluate(&BitString::from_mask(10, y)).unwrap();
                assert!(fy >= fx);
                if extra == 0 {
                    break;
                }
                extra = (extra - 1) & comp;
            }
        }
    }

    #[test]
    fn spec_build_paths() {
        let spec: ObjectiveSpec =
            serde_json::from_str(r#"{"kind":"anchored","n":12,"anchor_weight":3.0}"#).unwrap();
        let f = spec.build(None).unwrap();
        assert_eq!(f.kind_name(), "anchored");
        assert_eq!(f.n(), 12);
        let spec: ObjectiveSpec = serde_json::from_str(r#"{"kind":"onemax"}"#).unwrap();
        assert!(spec.build(None).is_err());
        assert_eq!(spec.build(Some(7)).unwrap().n(), 7);
        let spec: ObjectiveSpec = serde_json::from_str(r#"{"kind":"onemax","n":6}"#).unwrap();
        assert!(spec.build(Some(7)).unwrap_err().contains("supplies n = 7"));
        assert_eq!(spec.build(Some(6)).unwrap().n(), 6);
        let spec: ObjectiveSpec =
            serde_json::from_str(r#"{"kind":"linear","weights":[2.0,1.0]}"#).unwrap();
        assert_eq!(
            spec.build(None).unwrap().linear_weights().unwrap(),
            &[1.0, 2.0]
        );
    }
}
