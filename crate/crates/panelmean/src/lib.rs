//! Variance-aware planning for multi-judge evaluation.
//!
//! Benchmark scores produced by a panel of automated judges mix several
//! sources of noise: scenario difficulty, generation stochasticity,
//! per-judge leniency offsets, and residual scoring noise. This crate
//!
//! - ingests balanced score data into a [`ScoreTensor`],
//! - estimates the four variance components with a crossed ANOVA
//!   ([`estimator`]),
//! - predicts the benchmark-score variance of judge-allocation strategies
//!   under a per-scenario call budget and ranks them ([`allocation`]),
//! - generates concrete balanced assignment plans ([`assignment`]), and
//! - verifies every closed-form prediction with a seeded simulator and
//!   subsampling harness ([`montecarlo`]).
//!
//! The narrative guide lives in `book/` and is compiled into [`guide`] so
//! its snippets run under `cargo test --doc`. The `panelmean` binary exposes
//! the same pipeline as subcommands (`estimate`, `predict`, `recommend`,
//! `plan`, `simulate`, `validate`).

pub mod allocation;
pub mod assignment;
pub mod estimator;
pub mod guide;
pub mod manifest;
pub mod montecarlo;
pub mod rng;
pub mod score;
mod special;

pub use allocation::{
    benchmark_variance, fpc_brute_force, fpc_factor, pairwise_gaps, recommend_strategy,
    scenario_floor, scenario_generation_tradeoff, strategy_variance, AllocationError,
    PairwiseGaps, Recommendation, Strategy, StrategyVariance, VarianceBreakdown, VarianceProfile,
};
pub use assignment::{
    all_judges_plan, cyclic_plan, random_plan, residual_offset_bound, AssignmentError,
    AssignmentPlan,
};
pub use estimator::{
    estimate_components, f_upper_tail, generation_mean_square, judge_f_test,
    residual_mean_square, scenario_mean_square, ComponentId, EstimatorError, FTestResult,
    MeanSquares, VarianceComponents,
};
pub use montecarlo::{
    pool_constants, run_harness, simulate_tensor, subsample_score, variance_curve,
    HarnessResult, MonteCarloError, NoiseFamily, PoolConstants, SimulationConfig, SkippedPoint,
    VarianceCurve,
};
pub use score::{Design, DesignError, IngestError, ScoreRecord, ScoreTensor};
