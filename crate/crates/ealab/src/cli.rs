//! JSON-config experiment runner.
//!
//! One invocation executes one subcommand, selected by the `"cmd"` field of a
//! single JSON config document:
//!
//! * `run` — one seeded run; JSON report (optionally with a full trace);
//! * `batch` — independent trials with derived per-trial seeds; CSV
//!   (`trial,seed,n,iterations,evaluations,hit_optimum,final_fitness`);
//! * `drift` — tabulate the per-distance drift; CSV
//!   (`d,h_tilde,h,inv_h_cumsum`);
//! * `bound` — the closed-form runtime tail bound and the variable-drift
//!   lower-bound profile; JSON;
//! * `oracle` — exact expected hitting times from the chain solvers, plus a
//!   set of named counterexample scenarios; JSON;
//! * `audit` — left/right sides of the three drift-comparison inequalities
//!   the calculus rests on, tabulated with **no assertion**; CSV
//!   (`inequality,d,param,left,right`);
//! * `verify` — the acceptance battery (see [`crate::verify`]); JSON verdict,
//!   exit code 3 if any criterion fails;
//! * `sweep` — cartesian product of dimensions × distributions, batch each
//!   cell; CSV (`n,dist_kind,dist_param,mean_iterations,std_error,
//!   ratio_to_nlogn_over_p1`).
//!
//! Reproducibility contract: the same config file on the same build produces
//! byte-identical output. CSV floats are printed with 17 significant digits
//! (lossless round-trip); JSON reports embed the SHA-256 of the raw config
//! bytes and the master seed (`null` where no randomness is involved).
//! Infinite expected times serialize to JSON `null`.
//!
//! Exit codes: `0` success, `2` config parse/schema error, `3` verification
//! failure, `1` anything else.

use std::fmt::Write as _;
use std::fs;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::distributions::{make_custom, DistributionSpec, FlipDistribution};
use crate::drift;
use crate::engine::{self, EngineConfig, RunRecord, StartSpec, DEFAULT_MAX_EVALUATIONS};
use crate::objectives::{make_onemax, make_parity_swap, BitString, Objective, ObjectiveSpec};
use crate::oracle::{self, ChainSolution, OracleError, StateSpace};
use crate::stats;
use crate::verify::{self, VerifyLevel};

/// Errors of the experiment runner, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The config is not valid JSON.
    #[error("config parse error: {0}")]
    ConfigParse(String),
    /// The config is valid JSON but violates the schema or a precondition.
    #[error("config schema violation: {0}")]
    SchemaViolation(String),
    /// Reading the config or writing an output file failed.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    /// An unexpected failure while executing a valid config.
    #[error("runtime error: {0}")]
    Runtime(String),
    /// The `verify` subcommand found failing criteria.
    #[error("verification failed: {failed} criterion(s) did not pass")]
    VerificationFailed { failed: usize },
}

impl CliError {
    /// Process exit code: 0 is success, 2 config error, 3 verification
    /// failure, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigParse(_) | CliError::SchemaViolation(_) => 2,
            CliError::VerificationFailed { .. } => 3,
            CliError::Io { .. } | CliError::Runtime(_) => 1,
        }
    }
}

/// Top-level config document, dispatched on `"cmd"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case")]
pub enum Config {
    Run(RunConfig),
    Batch(BatchConfig),
    Drift(DriftConfig),
    Bound(BoundConfig),
    Oracle(OracleConfig),
    Audit(AuditConfig),
    Verify(VerifyConfig),
    Sweep(SweepConfig),
}

fn default_workers() -> usize {
    1
}

fn default_alpha() -> f64 {
    2.0
}

fn default_r() -> f64 {
    1.0
}

fn default_flip_counts() -> Vec<usize> {
    vec![12, 16, 24]
}

fn default_deltas() -> Vec<usize> {
    vec![1, 2, 4]
}

/// Where a configured run starts: `"uniform"`, `{"fixed": "0110…"}` (bit `i`
/// of the string is position `i`), or `{"distance": k}` (optimum with `k`
/// uniformly chosen bits flipped off).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartConfig {
    #[default]
    Uniform,
    Fixed(String),
    Distance(usize),
}

/// `{"cmd":"run"}` — a single seeded run, JSON report.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Dimension; may instead live inside `objective`/`distribution`.
    #[serde(default)]
    pub n: Option<usize>,
    pub objective: ObjectiveSpec,
    pub distribution: DistributionSpec,
    /// Seed of the run (defaults to 0).
    #[serde(default)]
    pub master_seed: u64,
    /// Evaluation budget (defaults to [`DEFAULT_MAX_EVALUATIONS`]).
    #[serde(default)]
    pub max_evals: Option<u64>,
    #[serde(default)]
    pub start: StartConfig,
    /// Record a per-iteration `(t, fitness, best-distance)` trace.
    #[serde(default)]
    pub record_trace: bool,
    /// Output path; stdout when omitted.
    #[serde(default)]
    pub out: Option<String>,
}

/// `{"cmd":"batch"}` — `trials` independent runs, trial `i` seeded with
/// `mix64(master_seed ^ i)`; CSV output ordered by trial index regardless of
/// `workers`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    #[serde(default)]
    pub n: Option<usize>,
    pub objective: ObjectiveSpec,
    pub distribution: DistributionSpec,
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub max_evals: Option<u64>,
    #[serde(default)]
    pub start: StartConfig,
    #[serde(default)]
    pub out: Option<String>,
}

/// `{"cmd":"drift"}` — tabulate `h̃(d)`, `h(d)` and `Σ_{e<=d} 1/h(e)` for
/// `d = 0, …, ⌊n/2⌋`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftConfig {
    pub n: usize,
    pub distribution: DistributionSpec,
    #[serde(default)]
    pub out: Option<String>,
}

/// `{"cmd":"bound"}` — the runtime tail bound `b(r)` (with margin `alpha`)
/// and the variable-drift lower-bound profile.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub n: usize,
    pub distribution: DistributionSpec,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub out: Option<String>,
}

/// `{"cmd":"oracle"}` — exact expected hitting times; the `scenario` field
/// picks a chain or a named counterexample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleConfig {
    #[serde(flatten)]
    pub scenario: OracleScenario,
    #[serde(default)]
    pub out: Option<String>,
}

/// Oracle scenarios.
///
/// The three chain scenarios (`level`, `full`, `compressed`) report the whole
/// expected-time vector plus the uniform-start expectation. The named
/// scenarios package the laboratory's counterexamples:
///
/// * `no_domination` — `D = (p₁ = n⁻², p₂ = 1 − n⁻²)` on OneMax: starting
///   *closer* to the optimum (one wrong bit vs two) takes longer in
///   expectation;
/// * `onemax_not_easiest` — `D = (p₁ = n⁻³, p₂ = n⁻¹, p₃ = rest)`: from the
///   all-ones-but-the-anchor string, the anchored objective (weight 3) is hit
///   faster than OneMax under the same operator;
/// * `parity_equivalence` — the point mass at `n − 1` on the parity-swap
///   objective has the same level-hitting times as single-bit flips on
///   OneMax after fitness relabeling;
/// * `idle_rescale` — mixing idle mass `p₀` into single-bit flips divides
///   every expected hitting time by exactly `1 − p₀`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum OracleScenario {
    /// Fitness-level chain (`n + 1` states) for level-symmetric objectives.
    Level {
        objective: ObjectiveSpec,
        distribution: DistributionSpec,
        #[serde(default)]
        n: Option<usize>,
        /// Also report the expectation from this level.
        #[serde(default)]
        start_level: Option<usize>,
    },
    /// Full `2^n`-state chain (any objective, `n <= 16`).
    Full {
        objective: ObjectiveSpec,
        distribution: DistributionSpec,
        #[serde(default)]
        n: Option<usize>,
        /// Also report the expectation from this bitstring.
        #[serde(default)]
        start_state: Option<String>,
    },
    /// Compressed `2n`-state chain for the anchored objective.
    Compressed {
        anchor_weight: f64,
        n: usize,
        distribution: DistributionSpec,
        #[serde(default)]
        start_first_bit: Option<bool>,
        #[serde(default)]
        start_rest_ones: Option<usize>,
    },
    /// `E[T | start distance 1] > E[T | start distance 2]` on OneMax.
    NoDomination { n: usize },
    /// The anchored objective is hit faster than OneMax under the same
    /// operator.
    OnemaxNotEasiest { n: usize },
    /// Parity-swap under full-complement flips ≡ OneMax under single flips.
    ParityEquivalence { n: usize },
    /// Idle mass `p₀` rescales every hitting time by `1/(1 − p₀)`.
    IdleRescale { n: usize, p0: f64 },
}

/// `{"cmd":"audit"}` — tabulate, with no assertion, the left/right sides of
/// the three inequalities behind the drift calculus, for every distance
/// `d = 1, …, min(d₀, ⌊n/2⌋)`:
///
/// * `b_quadratic` — per-flip progress vs `(d/n)²`, one row per entry of
///   `flip_counts` (clamped to `[1, n−1]`);
/// * `h_linear_cap` — `h(d)` vs `(1 + 1/ln n)·(p₁ + p_{n−1})·d/n`;
/// * `shifted_vs_base` — band-aggregated drift `h_d(d+Δ)` vs `h(d)`, one row
///   per entry of `deltas`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub n: usize,
    pub distribution: DistributionSpec,
    #[serde(default = "default_flip_counts")]
    pub flip_counts: Vec<usize>,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<usize>,
    #[serde(default)]
    pub out: Option<String>,
}

/// `{"cmd":"verify"}` — run the acceptance battery.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub level: VerifyLevel,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub out: Option<String>,
}

/// `{"cmd":"sweep"}` — batch every cell of `ns × distributions`. Cell
/// `(i, j)` (row-major) uses master seed `mix64(master_seed ^ mix64(1 + i·|distributions| + j))`,
/// so inserting a dimension does not shift the other cells' randomness.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub objective: ObjectiveSpec,
    pub ns: Vec<usize>,
    pub distributions: Vec<DistributionSpec>,
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub max_evals: Option<u64>,
    #[serde(default)]
    pub out: Option<String>,
}

/// One rendered output: bytes plus their destination (`None` = stdout).
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub path: Option<String>,
    pub bytes: Vec<u8>,
}

/// Result of executing a config: the artifacts to write, plus the number of
/// failed acceptance criteria (nonzero only for `verify`).
#[derive(Clone, Debug)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub failed_criteria: usize,
}

/// Format a float with 17 significant digits (lossless f64 round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Hex SHA-256 of raw bytes — the config fingerprint JSON reports embed.
pub fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

fn classify_parse_error(e: serde_json::Error) -> CliError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof => CliError::ConfigParse(e.to_string()),
        _ => CliError::SchemaViolation(e.to_string()),
    }
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::SchemaViolation(msg.into())
}

fn build_objective(spec: &ObjectiveSpec, ctx_n: Option<usize>) -> Result<Objective, CliError> {
    spec.build(ctx_n).map_err(CliError::SchemaViolation)
}

fn build_distribution(
    spec: &DistributionSpec,
    ctx_n: Option<usize>,
) -> Result<FlipDistribution, CliError> {
    spec.build(ctx_n).map_err(|e| schema(e.to_string()))
}

fn parse_bits(s: &str) -> Result<BitString, CliError> {
    if s.is_empty() {
        return Err(schema("bit string must not be empty"));
    }
    let mut b = BitString::all_zeros(s.len());
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => b.flip(i),
            _ => return Err(schema(format!("invalid character {ch:?} in bit string"))),
        }
    }
    Ok(b)
}

fn start_spec(start: &StartConfig) -> Result<StartSpec, CliError> {
    Ok(match start {
        StartConfig::Uniform => StartSpec::Uniform,
        StartConfig::Fixed(bits) => StartSpec::Fixed(parse_bits(bits)?),
        StartConfig::Distance(k) => StartSpec::DistanceFromOptimum(*k),
    })
}

fn engine_err(e: engine::EngineError) -> CliError {
    schema(e.to_string())
}

fn oracle_err(e: OracleError) -> CliError {
    schema(e.to_string())
}

fn drift_err(e: drift::DriftError) -> CliError {
    schema(e.to_string())
}

/// Assemble a JSON report: `cmd`, `config_sha256` and `master_seed` merged
/// with the command-specific body (keys are emitted in sorted order).
fn json_report(cmd: &str, sha: &str, master_seed: Option<u64>, body: Value) -> Vec<u8> {
    let mut doc = serde_json::Map::new();
    doc.insert("cmd".into(), cmd.into());
    doc.insert("config_sha256".into(), sha.into());
    doc.insert(
        "master_seed".into(),
        match master_seed {
            Some(s) => s.into(),
            None => Value::Null,
        },
    );
    if let Value::Object(map) = body {
        for (k, v) in map {
            doc.insert(k, v);
        }
    }
    let mut bytes =
        serde_json::to_vec_pretty(&Value::Object(doc)).expect("report serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

/// Render batch results as CSV (the byte-determinism surface of the tool).
pub fn batch_csv_bytes(records: &[RunRecord], n: usize) -> Vec<u8> {
    let mut csv = String::from("trial,seed,n,iterations,evaluations,hit_optimum,final_fitness\n");
    for (trial, r) in records.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{trial},{},{n},{},{},{},{}",
            r.seed,
            r.iterations,
            r.evaluations,
            r.hit_optimum,
            fmt_f64(r.final_fitness)
        );
    }
    csv.into_bytes()
}

/// Execute a raw config document. `progress` receives human-readable status
/// lines (currently only per-criterion verdicts of `verify`); artifacts are
/// returned, not written.
pub fn execute_bytes(
    config_bytes: &[u8],
    progress: &mut dyn FnMut(&str),
) -> Result<Outcome, CliError> {
    let sha = hex_sha256(config_bytes);
    let config: Config = serde_json::from_slice(config_bytes).map_err(classify_parse_error)?;
    let mut failed_criteria = 0;
    let artifacts = match config {
        Config::Run(cfg) => cmd_run(&cfg, &sha)?,
        Config::Batch(cfg) => cmd_batch(&cfg)?,
        Config::Drift(cfg) => cmd_drift(&cfg)?,
        Config::Bound(cfg) => cmd_bound(&cfg, &sha)?,
        Config::Oracle(cfg) => cmd_oracle(&cfg, &sha)?,
        Config::Audit(cfg) => cmd_audit(&cfg)?,
        Config::Verify(cfg) => {
            let (arts, failed) = cmd_verify(&cfg, &sha, progress)?;
            failed_criteria = failed;
            arts
        }
        Config::Sweep(cfg) => cmd_sweep(&cfg)?,
    };
    Ok(Outcome {
        artifacts,
        failed_criteria,
    })
}

/// Read a config file, execute it, write its artifacts (file or stdout).
/// Returns [`CliError::VerificationFailed`] after writing the report if the
/// config was a `verify` run with failing criteria.
pub fn execute_path(path: &str) -> Result<(), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io {
        path: path.to_string(),
        source: e,
    })?;
    let mut progress = |line: &str| eprintln!("{line}");
    let outcome = execute_bytes(&bytes, &mut progress)?;
    for artifact in &outcome.artifacts {
        write_artifact(artifact)?;
    }
    if outcome.failed_criteria > 0 {
        return Err(CliError::VerificationFailed {
            failed: outcome.failed_criteria,
        });
    }
    Ok(())
}

fn write_artifact(artifact: &Artifact) -> Result<(), CliError> {
    match &artifact.path {
        Some(path) => fs::write(path, &artifact.bytes).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&artifact.bytes)
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

fn trace_json(record: &RunRecord) -> Value {
    match &record.trace {
        None => Value::Null,
        Some(points) => Value::Array(
            points
                .iter()
                .map(|p| json!({"t": p.t, "fitness": p.fitness, "potential": p.potential}))
                .collect(),
        ),
    }
}

fn cmd_run(cfg: &RunConfig, sha: &str) -> Result<Vec<Artifact>, CliError> {
    let f = build_objective(&cfg.objective, cfg.n)?;
    let d = build_distribution(&cfg.distribution, cfg.n.or(Some(f.n())))?;
    let engine_cfg = EngineConfig {
        start: start_spec(&cfg.start)?,
        max_evaluations: cfg.max_evals.unwrap_or(DEFAULT_MAX_EVALUATIONS),
        record_trace: cfg.record_trace,
        seed: cfg.master_seed,
    };
    let record = engine::run(&f, &d, &engine_cfg).map_err(engine_err)?;
    let body = json!({
        "n": f.n(),
        "objective": f.kind_name(),
        "record": {
            "seed": record.seed,
            "iterations": record.iterations,
            "evaluations": record.evaluations,
            "hit_optimum": record.hit_optimum,
            "final_fitness": record.final_fitness,
            "trace": trace_json(&record),
        },
    });
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: json_report("run", sha, Some(cfg.master_seed), body),
    }])
}

fn cmd_batch(cfg: &BatchConfig) -> Result<Vec<Artifact>, CliError> {
    if cfg.trials == 0 {
        return Err(schema("trials must be at least 1"));
    }
    if cfg.workers == 0 {
        return Err(schema("workers must be at least 1"));
    }
    let f = build_objective(&cfg.objective, cfg.n)?;
    let d = build_distribution(&cfg.distribution, cfg.n.or(Some(f.n())))?;
    let engine_cfg = EngineConfig {
        start: start_spec(&cfg.start)?,
        max_evaluations: cfg.max_evals.unwrap_or(DEFAULT_MAX_EVALUATIONS),
        record_trace: false,
        seed: cfg.master_seed,
    };
    let records =
        engine::run_batch(&f, &d, &engine_cfg, cfg.trials, cfg.workers).map_err(engine_err)?;
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: batch_csv_bytes(&records, f.n()),
    }])
}

fn cmd_drift(cfg: &DriftConfig) -> Result<Vec<Artifact>, CliError> {
    if cfg.n < 2 {
        return Err(schema("drift tables need n >= 2"));
    }
    let d = build_distribution(&cfg.distribution, Some(cfg.n))?;
    let table = drift::drift_table(&d);
    let mut csv = String::from("d,h_tilde,h,inv_h_cumsum\n");
    let mut cumulative = 0.0;
    for (dist, h_tilde, h) in table.iter() {
        if dist >= 1 {
            cumulative += 1.0 / h;
        }
        let _ = writeln!(
            csv,
            "{dist},{},{},{}",
            fmt_f64(h_tilde),
            fmt_f64(h),
            fmt_f64(cumulative)
        );
    }
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: csv.into_bytes(),
    }])
}

fn cmd_bound(cfg: &BoundConfig, sha: &str) -> Result<Vec<Artifact>, CliError> {
    if cfg.n < 2 {
        return Err(schema("runtime bounds need n >= 2"));
    }
    let d = build_distribution(&cfg.distribution, Some(cfg.n))?;
    let (b_of_r, tail_prob) = drift::upper_bound_b(&d, cfg.alpha, cfg.r).map_err(drift_err)?;
    let profile = drift::variable_drift_lower_bound(&d);
    let body = json!({
        "n": cfg.n,
        "alpha": cfg.alpha,
        "r": cfg.r,
        "p1": d.p1(),
        "chi": d.mean(),
        "b_of_r": b_of_r,
        "tail_prob": tail_prob,
        "d0": profile.d0,
        "sum_inverse_h": profile.sum_inverse_h,
        "headline": profile.headline,
        "failure_p": profile.failure_p,
        "corrected": profile.corrected,
        "degenerate": profile.degenerate,
    });
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: json_report("bound", sha, None, body),
    }])
}

fn space_name(space: StateSpace) -> &'static str {
    match space {
        StateSpace::OneMaxLevel => "onemax_level",
        StateSpace::ParityLevel => "parity_level",
        StateSpace::AnchoredCompressed => "anchored_compressed",
        StateSpace::Full => "full",
    }
}

/// Expected time from one state as a JSON value; infinite times (optimum not
/// almost surely reached) become `null`.
fn query_state(sol: &ChainSolution, state: usize) -> Result<Value, CliError> {
    match sol.expected_from(state) {
        Ok(v) => Ok(v.into()),
        Err(OracleError::UnreachableOptimum { .. }) => Ok(Value::Null),
        Err(e) => Err(oracle_err(e)),
    }
}

fn uniform_value(sol: &ChainSolution) -> Value {
    match sol.expected_from_uniform() {
        Ok(v) => v.into(),
        Err(_) => Value::Null,
    }
}

fn solution_json(sol: &ChainSolution, from_start: Option<Value>) -> Value {
    let mut body = json!({
        "space": space_name(sol.space()),
        "n": sol.n(),
        "states": sol.states(),
        "expected": sol.expected_times(),
        "absorbing": sol.absorbing(),
        "expected_from_uniform": uniform_value(sol),
    });
    if let Some(v) = from_start {
        body["expected_from_start"] = v;
    }
    body
}

fn cmd_oracle(cfg: &OracleConfig, sha: &str) -> Result<Vec<Artifact>, CliError> {
    let body = match &cfg.scenario {
        OracleScenario::Level {
            objective,
            distribution,
            n,
            start_level,
        } => {
            let f = build_objective(objective, *n)?;
            let d = build_distribution(distribution, Some(f.n()))?;
            let sol = oracle::level_chain(&f, &d).map_err(oracle_err)?;
            let from_start = start_level
                .map(|level| query_state(&sol, level))
                .transpose()?;
            let mut body = solution_json(&sol, from_start);
            body["objective"] = f.kind_name().into();
            body
        }
        OracleScenario::Full {
            objective,
            distribution,
            n,
            start_state,
        } => {
            let f = build_objective(objective, *n)?;
            let d = build_distribution(distribution, Some(f.n()))?;
            let sol = oracle::full_chain(&f, &d).map_err(oracle_err)?;
            let from_start = start_state
                .as_deref()
                .map(|bits| {
                    let b = parse_bits(bits)?;
                    if b.len() != f.n() {
                        return Err(schema(format!(
                            "start_state has {} bits, objective has {}",
                            b.len(),
                            f.n()
                        )));
                    }
                    let mask = (0..f.n())
                        .filter(|&i| b.get(i))
                        .fold(0usize, |m, i| m | (1 << i));
                    query_state(&sol, mask)
                })
                .transpose()?;
            let mut body = solution_json(&sol, from_start);
            body["objective"] = f.kind_name().into();
            body
        }
        OracleScenario::Compressed {
            anchor_weight,
            n,
            distribution,
            start_first_bit,
            start_rest_ones,
        } => {
            let d = build_distribution(distribution, Some(*n))?;
            let sol =
                oracle::compressed_anchored_chain(*anchor_weight, *n, &d).map_err(oracle_err)?;
            let from_start = match (start_first_bit, start_rest_ones) {
                (None, None) => None,
                (Some(fb), Some(ro)) => {
                    if *ro >= *n {
                        return Err(schema("start_rest_ones must be < n"));
                    }
                    Some(query_state(&sol, oracle::anchored_state(*n, *fb, *ro))?)
                }
                _ => {
                    return Err(schema(
                        "start_first_bit and start_rest_ones must be given together",
                    ))
                }
            };
            let mut body = solution_json(&sol, from_start);
            body["anchor_weight"] = (*anchor_weight).into();
            body
        }
        OracleScenario::NoDomination { n } => no_domination_json(*n)?,
        OracleScenario::OnemaxNotEasiest { n } => onemax_not_easiest_json(*n)?,
        OracleScenario::ParityEquivalence { n } => parity_equivalence_json(*n)?,
        OracleScenario::IdleRescale { n, p0 } => idle_rescale_json(*n, *p0)?,
    };
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: json_report("oracle", sha, None, body),
    }])
}

/// `D = (p₁ = n⁻², p₂ = 1 − n⁻²)` on OneMax: one wrong bit is a *worse*
/// starting position than two wrong bits.
fn no_domination_json(n: usize) -> Result<Value, CliError> {
    if n < 4 {
        return Err(schema("the no-domination scenario needs n >= 4"));
    }
    let p1 = (n as f64).powi(-2);
    let mut probs = vec![0.0; n + 1];
    probs[1] = p1;
    probs[2] = 1.0 - p1;
    let d = make_custom(n, &probs).map_err(|e| schema(e.to_string()))?;
    let sol = oracle::level_chain(&make_onemax(n), &d).map_err(oracle_err)?;
    let e_t1 = sol.expected_times()[n - 1];
    let e_t2 = sol.expected_times()[n - 2];
    Ok(json!({
        "scenario": "no_domination",
        "n": n,
        "E_T1": e_t1,
        "E_T2": e_t2,
        "closer_start_is_slower": e_t2 < e_t1,
    }))
}

/// `D = (p₁ = n⁻³, p₂ = n⁻¹, p₃ = rest)` from the all-ones string with the
/// anchor bit cleared: the anchored objective (weight 3) beats OneMax.
fn onemax_not_easiest_json(n: usize) -> Result<Value, CliError> {
    if n < 4 {
        return Err(schema("the onemax-not-easiest scenario needs n >= 4"));
    }
    let nf = n as f64;
    let mut probs = vec![0.0; n + 1];
    probs[1] = nf.powi(-3);
    probs[2] = nf.powi(-1);
    probs[3] = 1.0 - probs[1] - probs[2];
    let d = make_custom(n, &probs).map_err(|e| schema(e.to_string()))?;
    let anchored = oracle::compressed_anchored_chain(3.0, n, &d).map_err(oracle_err)?;
    let onemax = oracle::level_chain(&make_onemax(n), &d).map_err(oracle_err)?;
    let e_anchored = anchored.expected_times()[oracle::anchored_state(n, false, n - 1)];
    let e_onemax = onemax.expected_times()[n - 1];
    Ok(json!({
        "scenario": "onemax_not_easiest",
        "n": n,
        "anchored_expected": e_anchored,
        "onemax_expected": e_onemax,
        "anchored_faster": e_anchored < e_onemax,
    }))
}

/// Point mass at `n − 1` on parity-swap vs single-bit flips on OneMax: equal
/// hitting times after relabeling level `m` by its parity-swap fitness.
fn parity_equivalence_json(n: usize) -> Result<Value, CliError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(schema("the parity-equivalence scenario needs even n >= 2"));
    }
    let parity = make_parity_swap(n);
    let near_full =
        crate::distributions::make_point_mass(n, n - 1).map_err(|e| schema(e.to_string()))?;
    let rls = crate::distributions::make_point_mass(n, 1).map_err(|e| schema(e.to_string()))?;
    let sol_parity = oracle::level_chain(&parity, &near_full).map_err(oracle_err)?;
    let sol_rls = oracle::level_chain(&make_onemax(n), &rls).map_err(oracle_err)?;
    let relabelled: Vec<f64> = (0..=n)
        .map(|m| {
            let image = parity.level_fitness(m).expect("parity is level-defined") as usize;
            sol_rls.expected_times()[image]
        })
        .collect();
    let max_abs_diff = sol_parity
        .expected_times()
        .iter()
        .zip(&relabelled)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(json!({
        "scenario": "parity_equivalence",
        "n": n,
        "parity_expected": sol_parity.expected_times(),
        "relabelled_onemax_expected": relabelled,
        "max_abs_diff": max_abs_diff,
    }))
}

/// `D = (p₀, 1 − p₀)` vs pure single-bit flips: every expected hitting time
/// scales by exactly `1/(1 − p₀)`.
fn idle_rescale_json(n: usize, p0: f64) -> Result<Value, CliError> {
    if n < 2 {
        return Err(schema("the idle-rescale scenario needs n >= 2"));
    }
    if !(0.0..1.0).contains(&p0) {
        return Err(schema("p0 must lie in [0, 1)"));
    }
    let mut probs = vec![0.0; n + 1];
    probs[0] = p0;
    probs[1] = 1.0 - p0;
    let lazy = make_custom(n, &probs).map_err(|e| schema(e.to_string()))?;
    let rls = crate::distributions::make_point_mass(n, 1).map_err(|e| schema(e.to_string()))?;
    let f = make_onemax(n);
    let sol_lazy = oracle::level_chain(&f, &lazy).map_err(oracle_err)?;
    let sol_rls = oracle::level_chain(&f, &rls).map_err(oracle_err)?;
    let max_abs_error = sol_lazy
        .expected_times()
        .iter()
        .zip(sol_rls.expected_times())
        .map(|(l, r)| (l * (1.0 - p0) - r).abs())
        .fold(0.0, f64::max);
    Ok(json!({
        "scenario": "idle_rescale",
        "n": n,
        "p0": p0,
        "expected_idle": sol_lazy.expected_times(),
        "expected_rls": sol_rls.expected_times(),
        "max_abs_error_after_rescale": max_abs_error,
    }))
}

fn cmd_audit(cfg: &AuditConfig) -> Result<Vec<Artifact>, CliError> {
    if cfg.n < 2 {
        return Err(schema("the audit needs n >= 2"));
    }
    let n = cfg.n;
    let d = build_distribution(&cfg.distribution, Some(n))?;
    let cutoff = drift::d0(&d).min(n / 2);
    let nf = n as f64;
    let p_sum = d.probs()[1] + d.probs()[n - 1];
    let mut csv = String::from("inequality,d,param,left,right\n");
    for dist in 1..=cutoff {
        for &r in &cfg.flip_counts {
            if r < 1 || r > n - 1 {
                continue;
            }
            let left = drift::expected_progress(n, dist, r).map_err(drift_err)?;
            let right = (dist as f64 / nf).powi(2);
            let _ = writeln!(
                csv,
                "b_quadratic,{dist},{r},{},{}",
                fmt_f64(left),
                fmt_f64(right)
            );
        }
    }
    for dist in 1..=cutoff {
        let left = drift::h_tilde(&d, dist).map_err(drift_err)?;
        let right = (1.0 + 1.0 / nf.ln()) * p_sum * dist as f64 / nf;
        let _ = writeln!(
            csv,
            "h_linear_cap,{dist},0,{},{}",
            fmt_f64(left),
            fmt_f64(right)
        );
    }
    for dist in 1..=cutoff {
        let base = drift::h_tilde(&d, dist).map_err(drift_err)?;
        for &delta in &cfg.deltas {
            if dist + delta > n {
                continue;
            }
            let left = drift::h_tilde_shifted(&d, dist, delta).map_err(drift_err)?;
            let _ = writeln!(
                csv,
                "shifted_vs_base,{dist},{delta},{},{}",
                fmt_f64(left),
                fmt_f64(base)
            );
        }
    }
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: csv.into_bytes(),
    }])
}

fn cmd_verify(
    cfg: &VerifyConfig,
    sha: &str,
    progress: &mut dyn FnMut(&str),
) -> Result<(Vec<Artifact>, usize), CliError> {
    if cfg.workers == 0 {
        return Err(schema("workers must be at least 1"));
    }
    let mut results = Vec::new();
    verify::run_suite(cfg.level, cfg.workers, &mut |res| {
        progress(&format!(
            "criterion {:2} {}: {}",
            res.id,
            res.name,
            if res.pass { "PASS" } else { "FAIL" }
        ));
        results.push(res.clone());
    });
    let failed = results.iter().filter(|r| !r.pass).count();
    let body = json!({
        "level": cfg.level,
        "workers": cfg.workers,
        "all_pass": failed == 0,
        "criteria": results
            .iter()
            .map(|r| json!({
                "id": r.id,
                "name": r.name,
                "pass": r.pass,
                "details": r.details,
            }))
            .collect::<Vec<_>>(),
    });
    Ok((
        vec![Artifact {
            path: cfg.out.clone(),
            bytes: json_report("verify", sha, None, body),
        }],
        failed,
    ))
}

fn cmd_sweep(cfg: &SweepConfig) -> Result<Vec<Artifact>, CliError> {
    if cfg.ns.is_empty() {
        return Err(schema("sweep needs at least one n"));
    }
    if cfg.ns.iter().any(|&n| n < 2) {
        return Err(schema("sweep needs every n >= 2"));
    }
    if cfg.distributions.is_empty() {
        return Err(schema("sweep needs at least one distribution"));
    }
    if cfg.trials < 2 {
        return Err(schema("sweep needs trials >= 2 (standard errors)"));
    }
    if cfg.workers == 0 {
        return Err(schema("workers must be at least 1"));
    }
    let mut csv =
        String::from("n,dist_kind,dist_param,mean_iterations,std_error,ratio_to_nlogn_over_p1\n");
    for (i, &n) in cfg.ns.iter().enumerate() {
        let f = build_objective(&cfg.objective, Some(n))?;
        for (j, spec) in cfg.distributions.iter().enumerate() {
            let d = build_distribution(spec, Some(n))?;
            let cell = (i * cfg.distributions.len() + j) as u64;
            let engine_cfg = EngineConfig {
                start: StartSpec::Uniform,
                max_evaluations: cfg.max_evals.unwrap_or(DEFAULT_MAX_EVALUATIONS),
                record_trace: false,
                seed: engine::mix64(cfg.master_seed ^ engine::mix64(1 + cell)),
            };
            let records = engine::run_batch(&f, &d, &engine_cfg, cfg.trials, cfg.workers)
                .map_err(engine_err)?;
            let samples: Vec<f64> = records.iter().map(|r| r.iterations as f64).collect();
            let summary = stats::summarize(&samples).expect("trials >= 2 was validated");
            let nf = n as f64;
            let ratio = summary.mean * d.p1() / (nf * nf.ln());
            let _ = writeln!(
                csv,
                "{n},{},{},{},{},{}",
                spec.kind_name(),
                spec.param_label(),
                fmt_f64(summary.mean),
                fmt_f64(summary.std_error),
                fmt_f64(ratio)
            );
        }
    }
    Ok(vec![Artifact {
        path: cfg.out.clone(),
        bytes: csv.into_bytes(),
    }])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_reference_vector() {
        assert_eq!(
            hex_sha256(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(hex_sha256(b"").len(), 64);
    }

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[
            0.005,
            1.0 / 3.0,
            12345.678,
            1e300,
            5e-324,
            0.0,
            -2.75,
            f64::MAX,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().expect("formatted float parses");
            assert_eq!(back, x, "{s} did not round-trip");
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn syntax_error_vs_schema_error() {
        let mut sink = |_: &str| {};
        let err = execute_bytes(b"{not json", &mut sink).unwrap_err();
        assert!(matches!(err, CliError::ConfigParse(_)));
        assert_eq!(err.exit_code(), 2);
        let err = execute_bytes(br#"{"cmd":"nosuch"}"#, &mut sink).unwrap_err();
        assert!(matches!(err, CliError::SchemaViolation(_)));
        assert_eq!(err.exit_code(), 2);
        let err = execute_bytes(
            br#"{"cmd":"drift","n":10,"distribution":{"kind":"point","k":1},"bogus":1}"#,
            &mut sink,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::SchemaViolation(_)));
    }

    #[test]
    fn zero_trials_is_a_schema_violation() {
        let mut sink = |_: &str| {};
        let cfg = br#"{"cmd":"batch","n":10,"trials":0,
            "objective":{"kind":"onemax"},"distribution":{"kind":"point","k":1}}"#;
        let err = execute_bytes(cfg, &mut sink).unwrap_err();
        assert!(matches!(err, CliError::SchemaViolation(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn exit_codes_cover_all_variants() {
        assert_eq!(CliError::ConfigParse(String::new()).exit_code(), 2);
        assert_eq!(CliError::SchemaViolation(String::new()).exit_code(), 2);
        assert_eq!(CliError::VerificationFailed { failed: 1 }.exit_code(), 3);
        assert_eq!(CliError::Runtime(String::new()).exit_code(), 1);
        assert_eq!(
            CliError::Io {
                path: "x".into(),
                source: std::io::Error::other("boom"),
            }
            .exit_code(),
            1
        );
    }

    #[test]
    fn start_config_parses_all_forms() {
        let u: StartConfig = serde_json::from_str(r#""uniform""#).unwrap();
        assert_eq!(u, StartConfig::Uniform);
        let f: StartConfig = serde_json::from_str(r#"{"fixed":"0101"}"#).unwrap();
        assert_eq!(f, StartConfig::Fixed("0101".into()));
        let d: StartConfig = serde_json::from_str(r#"{"distance":3}"#).unwrap();
        assert_eq!(d, StartConfig::Distance(3));
        assert_eq!(StartConfig::default(), StartConfig::Uniform);
    }

    #[test]
    fn bit_string_parsing() {
        let b = parse_bits("0110").unwrap();
        assert!(!b.get(0) && b.get(1) && b.get(2) && !b.get(3));
        assert!(parse_bits("01x1").is_err());
        assert!(parse_bits("").is_err());
    }

    #[test]
    fn json_reports_carry_fingerprint_and_seed() {
        let cfg =
            br#"{"cmd":"run","n":8,"objective":{"kind":"onemax"},"distribution":{"kind":"point","k":1},"master_seed":7}"#;
        let mut sink = |_: &str| {};
        let outcome = execute_bytes(cfg, &mut sink).unwrap();
        assert_eq!(outcome.artifacts.len(), 1);
        let doc: Value = serde_json::from_slice(&outcome.artifacts[0].bytes).unwrap();
        assert_eq!(doc["cmd"], "run");
        assert_eq!(doc["config_sha256"], Value::String(hex_sha256(cfg)));
        assert_eq!(doc["master_seed"], 7);
        assert_eq!(
            doc["record"]["evaluations"],
            doc["record"]["iterations"].as_u64().unwrap() + 1
        );
        assert_eq!(doc["record"]["hit_optimum"], true);
    }
}
