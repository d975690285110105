//! ealab — a simulation and exact-analysis laboratory for elitist (1+1)
//! evolutionary algorithms with static unary unbiased mutation operators on
//! pseudo-Boolean functions.
//!
//! A mutation operator in this class is fully described by a flip distribution
//! `D = (p_0, …, p_n)`: each step draws a flip count `k ~ D` and flips a
//! uniformly random k-subset of positions. The crate provides
//!
//! * [`distributions`] — construction, validation and sampling of flip
//!   distributions (point mass / RLS, standard bit mutation, power laws,
//!   custom vectors);
//! * [`objectives`] — benchmark functions with a unique global maximum
//!   (OneMax, general positive-weight linear, BinVal, parity-swap, anchored)
//!   over packed [`objectives::BitString`]s;
//! * [`mutation`] — the `flip_k` operator and `mut_D`;
//! * [`engine`] — the seeded, reproducible (1+1) main loop and batch runner;
//! * [`drift`] — exact drift calculus (per-flip progress `B(n,d,r)`, the
//!   per-distance drift `h̃`/`h`, the cutoff `d₀`, potential weights γ/g, the
//!   runtime bound `b(r)`, jump bounds `c̃`, the variable-drift lower-bound
//!   sum);
//! * [`oracle`] — brute-force ground truth: absorbing-Markov-chain expected
//!   hitting times on small instances plus exhaustive one-step drift
//!   enumeration, with an exact rational arithmetic cross-check path;
//! * [`stats`] — estimators and a two-sample Kolmogorov–Smirnov test;
//! * [`cli`] — a JSON-config experiment runner with CSV/JSON reports;
//! * [`verify`] — the acceptance battery wired into both the CLI `verify`
//!   subcommand and the `acceptance` integration test target.
//!
//! Reproducibility: all randomness flows through ChaCha8 generators seeded
//! explicitly; batch trial `i` uses `mix64(master_seed ^ i)` (a splitmix64
//! finalizer, see [`engine::mix64`]). Results are bit-stable within one build.

mod numeric;

pub mod cli;
pub mod distributions;
pub mod drift;
pub mod engine;
pub mod mutation;
pub mod objectives;
pub mod oracle;
pub mod stats;
pub mod verify;
