//! The acceptance battery: twelve numbered criteria pinning the laboratory
//! against its own exact oracles and against the runtime laws it exists to
//! reproduce.
//!
//! Deterministic criteria (drift identities, chain closed forms,
//! counterexamples) carry exact or near-exact tolerances; simulation criteria
//! run pinned master seeds and statistical tolerances (3 standard errors,
//! fixed ratio windows, KS thresholds). The quick level runs the
//! deterministic/cheap set; the full level adds the long-horizon simulations
//! (headline runtime law, small-`p₁` speedup, heavy-tail phase effects).
//!
//! All criteria are pure functions of the build: no files, no environment,
//! worker count never changes any reported number (only wall time).

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cli;
use crate::distributions::{
    make_custom, make_point_mass, make_power_law, make_standard_bit_mutation, FlipDistribution,
};
use crate::drift;
use crate::engine::{self, mix64, EngineConfig, StartSpec};
use crate::objectives::{
    make_anchored, make_binval, make_linear, make_onemax, make_parity_swap, BitString, Objective,
};
use crate::oracle::{self, StepPotential};
use crate::stats;

/// How much of the battery to run: `quick` covers every deterministic
/// criterion plus the cheap simulations; `full` adds the long-horizon
/// simulation criteria (5–8).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    #[default]
    Quick,
    Full,
}

/// Verdict of one criterion.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    /// Criterion number (1–12), stable across releases.
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    /// Human-readable evidence: the measured quantities and their bounds.
    pub details: String,
}

/// Criteria included at each level, in execution order.
pub fn criterion_ids(level: VerifyLevel) -> &'static [usize] {
    match level {
        VerifyLevel::Quick => &[1, 2, 3, 4, 9, 10, 11, 12],
        VerifyLevel::Full => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
    }
}

/// Run one criterion. `workers` only affects wall time (batch results are
/// worker-invariant by construction).
pub fn run_criterion(id: usize, workers: usize) -> CriterionResult {
    match id {
        1 => c1_exact_step_drift_identity(),
        2 => c2_potential_drift_floor(),
        3 => c3_closed_form_hitting_times(),
        4 => c4_monte_carlo_vs_oracle(workers),
        5 => c5_headline_runtime_law(workers),
        6 => c6_lower_bound_consistency(workers),
        7 => c7_small_p1_speedup(workers),
        8 => c8_heavy_tail_anchor_phases(workers),
        9 => c9_parity_relabel_equivalence(workers),
        10 => c10_no_stochastic_domination(),
        11 => c11_idle_mass_rescale(),
        12 => c12_byte_determinism(),
        other => CriterionResult {
            id: other,
            name: "unknown",
            pass: false,
            details: format!("no criterion with id {other}"),
        },
    }
}

/// Run a whole level, feeding each result to `sink` as it completes.
pub fn run_suite(level: VerifyLevel, workers: usize, sink: &mut dyn FnMut(&CriterionResult)) {
    for &id in criterion_ids(level) {
        let result = run_criterion(id, workers);
        sink(&result);
    }
}

// Pinned master seeds of the simulation criteria. Changing any of these
// changes the sampled trajectories but not what the criteria measure.
const C4_SEED: u64 = 0x0401;
const C5_SEED: u64 = 0x0501;
const C5_WEIGHT_SEED: u64 = 0x0577;
const C7_SEED: u64 = 0x0701;
const C8_SEED: u64 = 0x0801;
const C9_SEED: u64 = 0x0901;

const C5_TRIALS: u64 = 1000;

fn result(id: usize, name: &'static str, pass: bool, details: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        pass,
        details,
    }
}

/// A bitstring at folded distance `d` from the all-ones optimum (`d <= n/2`).
fn at_distance(n: usize, d: usize) -> BitString {
    let mut x = BitString::all_ones(n);
    for i in 0..d {
        x.flip(i);
    }
    x
}

fn batch_means(
    f: &Objective,
    d: &FlipDistribution,
    start: StartSpec,
    trials: u64,
    master_seed: u64,
    workers: usize,
) -> stats::Summary {
    let cfg = EngineConfig {
        start,
        max_evaluations: engine::DEFAULT_MAX_EVALUATIONS,
        record_trace: false,
        seed: master_seed,
    };
    let records = engine::run_batch(f, d, &cfg, trials, workers).expect("valid batch setup");
    let samples: Vec<f64> = records.iter().map(|r| r.iterations as f64).collect();
    stats::summarize(&samples).expect("trials >= 2")
}

/// Criterion 1: the per-distance drift formula equals exhaustive one-step
/// enumeration of the distance potential, to 1e−12 relative error, at n=12
/// for five distribution shapes and every distance `d ∈ [0, 6]`.
fn c1_exact_step_drift_identity() -> CriterionResult {
    let n = 12usize;
    let f = make_onemax(n);
    let flips: Vec<(&str, FlipDistribution)> = vec![
        ("point k=1", make_point_mass(n, 1).expect("valid")),
        ("point k=11", make_point_mass(n, n - 1).expect("valid")),
        (
            "sbm c=1",
            make_standard_bit_mutation(n, 1.0).expect("valid"),
        ),
        ("power beta=1.5", make_power_law(n, 1.5).expect("valid")),
        ("power beta=3", make_power_law(n, 3.0).expect("valid")),
    ];
    let mut worst = 0.0f64;
    let mut pass = true;
    for (_, flip) in &flips {
        for d in 0..=6usize {
            let x = at_distance(n, d);
            let enumerated = oracle::exact_step_drift(&f, flip, &x, StepPotential::Distance)
                .expect("dimensions match");
            let formula = drift::h_tilde(flip, d).expect("d <= n/2");
            let err = (formula - enumerated).abs() / enumerated.abs().max(1e-300);
            worst = worst.max(err);
            if err > 1e-12 {
                pass = false;
            }
        }
    }
    result(
        1,
        "exact_step_drift_identity",
        pass,
        format!(
            "h~(d) vs exhaustive one-step drift at n={n}, 5 distributions, d in [0,6]: \
             worst relative error {worst:.3e} (tolerance 1e-12)"
        ),
    )
}

/// Criterion 2: at every one of the 1024 states of three positive linear
/// objectives under three operators (n=10, α=2), the enumerated g-potential
/// drift is at least `0.5·(p₁/10)·g(x)`.
fn c2_potential_drift_floor() -> CriterionResult {
    let n = 10usize;
    let alpha = 2.0;
    let objectives: Vec<(&str, Vec<f64>)> = vec![
        ("onemax", vec![1.0; n]),
        ("binval", (0..n).map(|i| (1u64 << i) as f64).collect()),
        (
            "fibonacci",
            vec![1.0, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0],
        ),
    ];
    let mut custom = vec![0.0; n + 1];
    custom[1] = 0.3;
    custom[2] = 0.5;
    custom[5] = 0.2;
    let flips: Vec<(&str, FlipDistribution)> = vec![
        ("point k=1", make_point_mass(n, 1).expect("valid")),
        (
            "sbm c=1",
            make_standard_bit_mutation(n, 1.0).expect("valid"),
        ),
        ("custom", make_custom(n, &custom).expect("valid")),
    ];
    let full = (1u64 << n) - 1;
    let mut pass = true;
    let mut min_slack = f64::INFINITY;
    let mut violations = 0usize;
    for (_, weights) in &objectives {
        let f = make_linear(weights.clone()).expect("positive weights");
        for (_, flip) in &flips {
            let pw = drift::potential_weights(flip, alpha, weights).expect("valid setup");
            let floor = 0.5 * flip.p1() / n as f64;
            for mask in 0..=full {
                let x = BitString::from_mask(n, mask);
                let g_drift = oracle::exact_step_drift(&f, flip, &x, StepPotential::Weighted(&pw))
                    .expect("n <= 14");
                let g_x = drift::potential(&pw, &BitString::from_mask(n, !mask & full))
                    .expect("lengths match");
                let rhs = floor * g_x;
                let slack = g_drift - rhs;
                min_slack = min_slack.min(slack);
                if g_drift + 1e-12 * rhs.max(1.0) < rhs {
                    pass = false;
                    violations += 1;
                }
            }
        }
    }
    result(
        2,
        "potential_drift_floor",
        pass,
        format!(
            "g-drift >= 0.5*(p1/n)*g(x) at all {} states x 9 objective/operator pairs \
             (n={n}, alpha={alpha}): {violations} violations, minimum slack {min_slack:.3e}",
            1u64 << n
        ),
    )
}

/// Criterion 3: chain solutions reproduce the closed forms for single-bit
/// flips on OneMax — `25/3` from the all-zeros string at n=4 (≤ 1e−12) and
/// `n·Σ_{k<=n} 1/k` at n=100 (≤ 1e−9).
fn c3_closed_form_hitting_times() -> CriterionResult {
    let sol4 = oracle::level_chain(&make_onemax(4), &make_point_mass(4, 1).expect("valid"))
        .expect("level chain");
    let err4 = (sol4.expected_times()[0] - 25.0 / 3.0).abs();
    let n = 100usize;
    let sol100 = oracle::level_chain(&make_onemax(n), &make_point_mass(n, 1).expect("valid"))
        .expect("level chain");
    let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    let err100 = (sol100.expected_times()[0] - n as f64 * harmonic).abs();
    let pass = err4 <= 1e-12 && err100 <= 1e-9;
    result(
        3,
        "closed_form_hitting_times",
        pass,
        format!(
            "single-bit flips on onemax: |E[T | n=4, level 0] - 25/3| = {err4:.3e} \
             (tolerance 1e-12); |E[T | n=100, level 0] - n*H_n| = {err100:.3e} (tolerance 1e-9)"
        ),
    )
}

/// Criterion 4: six pinned simulation scenarios, 10⁴ trials each, agree with
/// the corresponding exact chain expectation within 3 standard errors.
fn c4_monte_carlo_vs_oracle(workers: usize) -> CriterionResult {
    let trials = 10_000u64;
    struct Scenario {
        name: &'static str,
        f: Objective,
        d: FlipDistribution,
        exact: f64,
    }
    let mut scenarios: Vec<Scenario> = Vec::new();

    let f = make_onemax(100);
    let d = make_point_mass(100, 1).expect("valid");
    let exact = oracle::level_chain(&f, &d)
        .expect("chain")
        .expected_from_uniform()
        .expect("reachable");
    scenarios.push(Scenario {
        name: "point k=1 / onemax n=100",
        f,
        d,
        exact,
    });

    let f = make_onemax(50);
    let d = make_standard_bit_mutation(50, 1.0).expect("valid");
    let exact = oracle::level_chain(&f, &d)
        .expect("chain")
        .expected_from_uniform()
        .expect("reachable");
    scenarios.push(Scenario {
        name: "sbm c=1 / onemax n=50",
        f,
        d,
        exact,
    });

    let f = make_onemax(50);
    let d = make_power_law(50, 3.0).expect("valid");
    let exact = oracle::level_chain(&f, &d)
        .expect("chain")
        .expected_from_uniform()
        .expect("reachable");
    scenarios.push(Scenario {
        name: "power beta=3 / onemax n=50",
        f,
        d,
        exact,
    });

    let f = make_binval(14);
    let d = make_standard_bit_mutation(14, 1.0).expect("valid");
    let exact = oracle::full_chain(&f, &d)
        .expect("chain")
        .expected_from_uniform()
        .expect("reachable");
    scenarios.push(Scenario {
        name: "sbm c=1 / binval n=14",
        f,
        d,
        exact,
    });

    let f = make_parity_swap(10);
    let d = make_point_mass(10, 9).expect("valid");
    let exact = oracle::level_chain(&f, &d)
        .expect("chain")
        .expected_from_uniform()
        .expect("reachable");
    scenarios.push(Scenario {
        name: "point k=9 / parity_swap n=10",
        f,
        d,
        exact,
    });

    let f = make_anchored(12, 3.0).expect("valid");
    let d = make_standard_bit_mutation(12, 1.0).expect("valid");
    let exact = oracle::compressed_anchored_chain(3.0, 12, &d)
        .expect("chain")
        .expected_from_uniform()
        .expect("reachable");
    scenarios.push(Scenario {
        name: "sbm c=1 / anchored(3) n=12",
        f,
        d,
        exact,
    });

    let mut pass = true;
    let mut worst_z = 0.0f64;
    let mut lines = Vec::new();
    for (i, sc) in scenarios.iter().enumerate() {
        let master = mix64(C4_SEED ^ mix64(1 + i as u64));
        let summary = batch_means(&sc.f, &sc.d, StartSpec::Uniform, trials, master, workers);
        let z = (summary.mean - sc.exact) / summary.std_error;
        worst_z = worst_z.max(z.abs());
        if z.abs() > 3.0 {
            pass = false;
        }
        lines.push(format!(
            "{}: mean {:.4} vs exact {:.4} (z = {:+.2})",
            sc.name, summary.mean, sc.exact, z
        ));
    }
    result(
        4,
        "monte_carlo_vs_oracle",
        pass,
        format!(
            "6 scenarios x {trials} trials, |z| <= 3 required, worst |z| = {worst_z:.2}; {}",
            lines.join("; ")
        ),
    )
}

/// One cell of the headline-law dataset (criteria 5 and 6).
struct HeadlineCell {
    objective: &'static str,
    n: usize,
    mean: f64,
    p1: f64,
    ratio: f64,
}

const HEADLINE_NS: [usize; 4] = [250, 500, 1000, 2000];

fn random_linear_weights(n: usize) -> Vec<f64> {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mix64(C5_WEIGHT_SEED ^ n as u64));
    (0..n).map(|_| rng.random_range(1.0..10.0)).collect()
}

fn headline_dataset(workers: usize) -> &'static Vec<HeadlineCell> {
    static DATA: OnceLock<Vec<HeadlineCell>> = OnceLock::new();
    DATA.get_or_init(|| {
        let objectives: [&'static str; 3] = ["onemax", "binval", "linear"];
        let mut cells = Vec::new();
        for (oi, &objective) in objectives.iter().enumerate() {
            for (ni, &n) in HEADLINE_NS.iter().enumerate() {
                let f = match objective {
                    "onemax" => make_onemax(n),
                    "binval" => make_binval(n),
                    _ => make_linear(random_linear_weights(n)).expect("positive weights"),
                };
                let d = make_standard_bit_mutation(n, 1.0).expect("valid");
                let cell = (oi * HEADLINE_NS.len() + ni) as u64;
                let master = mix64(C5_SEED ^ mix64(1 + cell));
                let summary = batch_means(&f, &d, StartSpec::Uniform, C5_TRIALS, master, workers);
                let nf = n as f64;
                let p1 = d.p1();
                cells.push(HeadlineCell {
                    objective,
                    n,
                    mean: summary.mean,
                    p1,
                    ratio: summary.mean * p1 / (nf * nf.ln()),
                });
            }
        }
        cells
    })
}

/// Criterion 5: the headline law `T ≈ (1/p₁)·n·ln n` for standard bit
/// mutation (c=1) on three linear objectives across n ∈ {250, …, 2000}:
/// every ratio in [0.75, 1.25], the n=2000 ratio at least as close to 1 as
/// the n=250 one, and the three objectives' means at n=2000 pairwise within
/// 10%.
fn c5_headline_runtime_law(workers: usize) -> CriterionResult {
    let cells = headline_dataset(workers);
    let mut pass = true;
    let mut lines = Vec::new();
    for objective in ["onemax", "binval", "linear"] {
        let per_n: Vec<&HeadlineCell> = cells.iter().filter(|c| c.objective == objective).collect();
        let ratios: Vec<f64> = per_n.iter().map(|c| c.ratio).collect();
        let window_ok = ratios.iter().all(|r| (0.75..=1.25).contains(r));
        let fit_points: Vec<(usize, f64)> = per_n.iter().map(|c| (c.n, c.mean)).collect();
        // all cells of one objective share p1 only approximately (p1 depends
        // on n for sbm), so judge the trend on the per-n exact p1 ratios
        let first_err = (ratios[0] - 1.0).abs();
        let last_err = (ratios[ratios.len() - 1] - 1.0).abs();
        let trend_ok = last_err <= first_err;
        // the shared-p1 helper is exercised on the same data with the n=2000
        // single-bit probability standing in for all cells
        let fit = stats::leading_constant_fit(&fit_points, per_n.last().expect("cells").p1)
            .expect("valid points");
        if !window_ok || !trend_ok {
            pass = false;
        }
        lines.push(format!(
            "{objective}: ratios [{}] window_ok={window_ok} trend_ok={trend_ok} (helper trend {})",
            ratios
                .iter()
                .map(|r| format!("{r:.4}"))
                .collect::<Vec<_>>()
                .join(", "),
            fit.trend_toward_one
        ));
    }
    let at2000: Vec<&HeadlineCell> = cells.iter().filter(|c| c.n == 2000).collect();
    let mut pairwise_ok = true;
    let mut worst_pair = 0.0f64;
    for a in &at2000 {
        for b in &at2000 {
            let rel = (a.mean - b.mean).abs() / b.mean;
            worst_pair = worst_pair.max(rel);
            if rel > 0.10 {
                pairwise_ok = false;
            }
        }
    }
    if !pairwise_ok {
        pass = false;
    }
    result(
        5,
        "headline_runtime_law",
        pass,
        format!(
            "sbm c=1, {C5_TRIALS} trials/cell, ratio = mean*p1/(n ln n); {}; \
             n=2000 pairwise mean spread {:.2}% (<= 10% required)",
            lines.join("; "),
            worst_pair * 100.0
        ),
    )
}

/// Criterion 6: every headline cell's mean is at least the variable-drift
/// lower bound `Σ_{d<=d₀} 1/h(d) − n`.
fn c6_lower_bound_consistency(workers: usize) -> CriterionResult {
    let cells = headline_dataset(workers);
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    for &n in &HEADLINE_NS {
        let d = make_standard_bit_mutation(n, 1.0).expect("valid");
        let bound = drift::variable_drift_lower_bound(&d).sum_inverse_h - n as f64;
        for cell in cells.iter().filter(|c| c.n == n) {
            let margin = cell.mean - bound;
            worst_margin = worst_margin.min(margin);
            if cell.mean < bound {
                pass = false;
            }
        }
    }
    result(
        6,
        "lower_bound_consistency",
        pass,
        format!(
            "mean >= sum(1/h) - n for all 12 headline cells; \
             smallest margin {worst_margin:.1} iterations"
        ),
    )
}

/// Criterion 7: concentrating mutation mass on 2-flips with
/// `p₁ = n^{-1/2}` beats the `(1/p₁)·n·ln n` law by the predicted constant
/// (ratio ≤ 0.85, theory → 0.75) at n=10⁴.
fn c7_small_p1_speedup(workers: usize) -> CriterionResult {
    let n = 10_000usize;
    let nf = n as f64;
    let p1 = nf.powf(-0.5);
    let mut probs = vec![0.0; n + 1];
    probs[1] = p1;
    probs[2] = 1.0 - p1;
    let d = make_custom(n, &probs).expect("valid");
    let f = make_onemax(n);
    let summary = batch_means(&f, &d, StartSpec::Uniform, 30, C7_SEED, workers);
    let ratio = summary.mean * p1 / (nf * nf.ln());
    let pass = ratio <= 0.85;
    result(
        7,
        "small_p1_speedup",
        pass,
        format!(
            "n={n}, p1=n^-1/2, 30 trials: mean*p1/(n ln n) = {ratio:.4} \
             (required <= 0.85, theory -> 0.75)"
        ),
    )
}

/// Criterion 8: on the anchored objective with weight n, started one flip
/// from the optimum at the anchor, power-law mutation shows the predicted
/// phase behavior — β=3 keeps `mean/n` within a factor 3 across
/// n ∈ {256, 1024, 4096}, β=1.5 makes it strictly increasing.
fn c8_heavy_tail_anchor_phases(workers: usize) -> CriterionResult {
    let ns = [256usize, 1024, 4096];
    let trials = 200u64;
    let mut per_beta = Vec::new();
    for (bi, &beta) in [3.0, 1.5].iter().enumerate() {
        let mut normalized = Vec::new();
        for (ni, &n) in ns.iter().enumerate() {
            let f = make_anchored(n, n as f64).expect("valid");
            let d = make_power_law(n, beta).expect("valid");
            let mut start = BitString::all_ones(n);
            start.flip(0);
            let master = mix64(C8_SEED ^ mix64(1 + (bi * ns.len() + ni) as u64));
            let summary = batch_means(&f, &d, StartSpec::Fixed(start), trials, master, workers);
            normalized.push(summary.mean / n as f64);
        }
        per_beta.push((beta, normalized));
    }
    let bounded = &per_beta[0].1;
    let spread = bounded.iter().cloned().fold(f64::MIN, f64::max)
        / bounded.iter().cloned().fold(f64::MAX, f64::min);
    let bounded_ok = spread <= 3.0;
    let increasing = &per_beta[1].1;
    let increasing_ok = increasing.windows(2).all(|w| w[1] > w[0]);
    let pass = bounded_ok && increasing_ok;
    result(
        8,
        "heavy_tail_anchor_phases",
        pass,
        format!(
            "anchored(weight=n), start one anchor-flip away, {trials} trials: \
             beta=3 mean/n = [{}] spread x{spread:.2} (<= 3 required); \
             beta=1.5 mean/n = [{}] strictly increasing = {increasing_ok}",
            bounded
                .iter()
                .map(|v| format!("{v:.2}"))
                .collect::<Vec<_>>()
                .join(", "),
            increasing
                .iter()
                .map(|v| format!("{v:.2}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

/// Criterion 9: the parity-swap objective under almost-complement flips is
/// the exact relabeling of OneMax under single-bit flips — chain equality at
/// n=8 (≤ 1e−9 per level) and indistinguishable simulated runtime samples at
/// n=10 (two-sample KS p > 0.01 on 10⁴ + 10⁴ trials).
fn c9_parity_relabel_equivalence(workers: usize) -> CriterionResult {
    let n = 8usize;
    let parity = make_parity_swap(n);
    let sol_parity =
        oracle::level_chain(&parity, &make_point_mass(n, n - 1).expect("valid")).expect("chain");
    let sol_rls = oracle::level_chain(&make_onemax(n), &make_point_mass(n, 1).expect("valid"))
        .expect("chain");
    let mut worst = 0.0f64;
    for m in 0..=n {
        let image = parity.level_fitness(m).expect("level-defined") as usize;
        let diff = (sol_parity.expected_times()[m] - sol_rls.expected_times()[image]).abs();
        worst = worst.max(diff);
    }
    let chains_ok = worst <= 1e-9;

    let n = 10usize;
    let trials = 10_000u64;
    let cfg = |seed| EngineConfig {
        start: StartSpec::Uniform,
        max_evaluations: engine::DEFAULT_MAX_EVALUATIONS,
        record_trace: false,
        seed,
    };
    let parity_records = engine::run_batch(
        &make_parity_swap(n),
        &make_point_mass(n, n - 1).expect("valid"),
        &cfg(mix64(C9_SEED ^ mix64(1))),
        trials,
        workers,
    )
    .expect("valid batch");
    let onemax_records = engine::run_batch(
        &make_onemax(n),
        &make_point_mass(n, 1).expect("valid"),
        &cfg(mix64(C9_SEED ^ mix64(2))),
        trials,
        workers,
    )
    .expect("valid batch");
    let a: Vec<f64> = parity_records.iter().map(|r| r.iterations as f64).collect();
    let b: Vec<f64> = onemax_records.iter().map(|r| r.iterations as f64).collect();
    let ks = stats::ks_two_sample(&a, &b).expect("non-empty samples");
    let ks_ok = ks.p_value > 0.01;
    result(
        9,
        "parity_relabel_equivalence",
        chains_ok && ks_ok,
        format!(
            "n=8 chain relabeling: worst |difference| {worst:.3e} (<= 1e-9); \
             n=10 runtime samples ({trials} each): KS D = {:.4}, p = {:.4} (> 0.01 required)",
            ks.statistic, ks.p_value
        ),
    )
}

/// Criterion 10: no stochastic domination in start distance — with
/// `D = (p₁=n⁻², p₂=1−n⁻²)` at n=20, one wrong bit takes 8000 expected
/// iterations but two wrong bits only ≈ 545; and with
/// `D = (p₁=n⁻³, p₂=n⁻¹, p₃=rest)` at n=14, the anchored objective is hit
/// strictly faster than OneMax from the same start.
fn c10_no_stochastic_domination() -> CriterionResult {
    let n = 20usize;
    let p1 = (n as f64).powi(-2);
    let mut probs = vec![0.0; n + 1];
    probs[1] = p1;
    probs[2] = 1.0 - p1;
    let d = make_custom(n, &probs).expect("valid");
    let sol = oracle::level_chain(&make_onemax(n), &d).expect("chain");
    let e1 = sol.expected_times()[n - 1];
    let e2 = sol.expected_times()[n - 2];
    let first_ok = (e1 - 8000.0).abs() <= 1e-6 && (540.0..=551.0).contains(&e2) && e2 < e1;

    let n = 14usize;
    let nf = n as f64;
    let mut probs = vec![0.0; n + 1];
    probs[1] = nf.powi(-3);
    probs[2] = nf.powi(-1);
    probs[3] = 1.0 - probs[1] - probs[2];
    let d = make_custom(n, &probs).expect("valid");
    let anchored = oracle::compressed_anchored_chain(3.0, n, &d).expect("chain");
    let e_anchored = anchored.expected_times()[oracle::anchored_state(n, false, n - 1)];
    let e_onemax = oracle::level_chain(&make_onemax(n), &d)
        .expect("chain")
        .expected_times()[n - 1];
    let second_ok = e_anchored < e_onemax;
    result(
        10,
        "no_stochastic_domination",
        first_ok && second_ok,
        format!(
            "n=20 two-flip-heavy: E[T | distance 1] = {e1:.6} (= 8000), \
             E[T | distance 2] = {e2:.4} (in [540, 551]); \
             n=14: anchored(3) {e_anchored:.2} < onemax {e_onemax:.2} from the same start = {second_ok}"
        ),
    )
}

/// Criterion 11: idle mutation mass only stretches time — mixing `p₀ = 0.3`
/// into single-bit flips multiplies every level hitting time by exactly
/// `1/0.7`, at n=10 and n=100.
fn c11_idle_mass_rescale() -> CriterionResult {
    let mut worst = 0.0f64;
    for n in [10usize, 100] {
        let mut probs = vec![0.0; n + 1];
        probs[0] = 0.3;
        probs[1] = 0.7;
        let lazy = make_custom(n, &probs).expect("valid");
        let rls = make_point_mass(n, 1).expect("valid");
        let f = make_onemax(n);
        let sol_lazy = oracle::level_chain(&f, &lazy).expect("chain");
        let sol_rls = oracle::level_chain(&f, &rls).expect("chain");
        for m in 0..=n {
            let diff = (sol_lazy.expected_times()[m] - sol_rls.expected_times()[m] / 0.7).abs();
            worst = worst.max(diff);
        }
    }
    result(
        11,
        "idle_mass_rescale",
        worst <= 1e-9,
        format!(
            "E[T with p0=0.3] vs E[T without]/0.7 on every level at n=10 and n=100: \
             worst |difference| {worst:.3e} (tolerance 1e-9)"
        ),
    )
}

/// Criterion 12: repeating a command with the same master seed reproduces
/// byte-identical CSV output, independent of worker count.
fn c12_byte_determinism() -> CriterionResult {
    let batch = br#"{"cmd":"batch","n":30,"trials":200,"master_seed":99,
        "objective":{"kind":"onemax"},"distribution":{"kind":"sbm","c":1.0},"workers":1}"#;
    let batch8 = br#"{"cmd":"batch","n":30,"trials":200,"master_seed":99,
        "objective":{"kind":"onemax"},"distribution":{"kind":"sbm","c":1.0},"workers":8}"#;
    let run_once = |cfg: &[u8]| {
        cli::execute_bytes(cfg, &mut |_| {})
            .expect("valid config")
            .artifacts
            .remove(0)
            .bytes
    };
    let a = run_once(batch);
    let b = run_once(batch);
    let c = run_once(batch8);
    let batch_ok = a == b && a == c;

    let drift_cfg = br#"{"cmd":"drift","n":200,"distribution":{"kind":"sbm","c":1.0}}"#;
    let drift_ok = run_once(drift_cfg) == run_once(drift_cfg);

    let sweep = br#"{"cmd":"sweep","objective":{"kind":"onemax"},"ns":[8,16],
        "distributions":[{"kind":"point","k":1},{"kind":"sbm","c":1.0}],
        "trials":50,"master_seed":7,"workers":1}"#;
    let sweep4 = br#"{"cmd":"sweep","objective":{"kind":"onemax"},"ns":[8,16],
        "distributions":[{"kind":"point","k":1},{"kind":"sbm","c":1.0}],
        "trials":50,"master_seed":7,"workers":4}"#;
    let s1 = run_once(sweep);
    let s2 = run_once(sweep);
    let s3 = run_once(sweep4);
    let sweep_ok = s1 == s2 && s1 == s3;
    result(
        12,
        "byte_determinism",
        batch_ok && drift_ok && sweep_ok,
        format!(
            "byte-identical reruns: batch (and workers 1 vs 8) = {batch_ok}, \
             drift = {drift_ok}, sweep (and workers 1 vs 4) = {sweep_ok}"
        ),
    )
}
