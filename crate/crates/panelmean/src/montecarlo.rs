//! Synthetic score generation and the subsampling harness.
//!
//! The simulator draws scores from the additive model
//! `X = mu + alpha_i + beta_ij + gamma_l + eps_ijl` with configurable
//! zero-mean noise families (only finite second moments are assumed
//! anywhere, so gaussian, uniform, and heavier-tailed draws are all valid).
//!
//! The harness validates closed-form predictions against a finite tensor:
//! within each scenario it draws i.i.d. (with replacement) from the pool a
//! strategy actually samples — generation-level panel means for the
//! all-judges strategy, single cells for random judging, per-judge columns
//! for cycling — so the subsampled score variance is exactly `C / (nB)`
//! with `C` the matching empirical pool variance.

use ndarray::{Array2, Array3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocation::Strategy;
use crate::rng::{derive_seed, stream_rng, streams};
use crate::score::ScoreTensor;

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("budget {budget} is not divisible by the judge pool size {k_tot}")]
    IndivisibleBudget { budget: usize, k_tot: usize },
    #[error("empty sampling pool")]
    EmptyPool,
    #[error("pool constants need at least one generation per scenario")]
    DegeneratePool,
    #[error("variance of the harness needs at least 2 replicates (got {0})")]
    TooFewReps(usize),
    #[error(transparent)]
    Ingest(#[from] crate::score::IngestError),
}

/// Zero-mean noise family for one random effect.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NoiseFamily {
    #[default]
    Gaussian,
    Uniform,
    /// Student-t rescaled to the requested standard deviation; `df > 2`
    /// keeps the second moment finite.
    StudentT { df: f64 },
}

enum Sampler {
    Zero,
    Normal(Normal<f64>),
    Uniform(Uniform<f64>),
    StudentT { dist: StudentT<f64>, scale: f64 },
}

impl Sampler {
    fn new(family: NoiseFamily, sigma: f64) -> Result<Self, MonteCarloError> {
        if sigma == 0.0 {
            return Ok(Sampler::Zero);
        }
        match family {
            NoiseFamily::Gaussian => Normal::new(0.0, sigma)
                .map(Sampler::Normal)
                .map_err(|e| MonteCarloError::InvalidConfig(e.to_string())),
            NoiseFamily::Uniform => {
                // Half-width sigma * sqrt(3) gives variance sigma^2.
                let half = sigma * 3f64.sqrt();
                Uniform::new_inclusive(-half, half)
                    .map(Sampler::Uniform)
                    .map_err(|e| MonteCarloError::InvalidConfig(e.to_string()))
            }
            NoiseFamily::StudentT { df } => {
                if df.is_nan() || df <= 2.0 {
                    return Err(MonteCarloError::InvalidConfig(format!(
                        "student_t noise needs df > 2 for a finite variance (got {df})"
                    )));
                }
                let dist = StudentT::new(df)
                    .map_err(|e| MonteCarloError::InvalidConfig(e.to_string()))?;
                // t(df) has variance df / (df - 2); rescale to sigma^2.
                Ok(Sampler::StudentT {
                    dist,
                    scale: sigma * ((df - 2.0) / df).sqrt(),
                })
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Zero => 0.0,
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::StudentT { dist, scale } => dist.sample(rng) * scale,
        }
    }
}

/// Generative parameters for the additive score model.
///
/// `sigma_*` are standard deviations; `gamma` is the fixed per-judge offset
/// vector over the full pool and must sum to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub mu: f64,
    pub sigma_alpha: f64,
    pub sigma_beta: f64,
    pub sigma_eps: f64,
    pub gamma: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub k_tot: usize,
    #[serde(default)]
    pub alpha_family: NoiseFamily,
    #[serde(default)]
    pub beta_family: NoiseFamily,
    #[serde(default)]
    pub eps_family: NoiseFamily,
    /// Clamp scores into a bounded scale. Off by default: the additive
    /// model is unbounded, and clipping breaks the exact variance algebra,
    /// so it exists only to mimic bounded-scale artifacts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_to_scale: Option<(f64, f64)>,
    pub seed: u64,
}

impl SimulationConfig {
    /// A gaussian-noise config with every knob at its default.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu: f64,
        sigma_alpha: f64,
        sigma_beta: f64,
        sigma_eps: f64,
        gamma: Vec<f64>,
        n: usize,
        m: usize,
        seed: u64,
    ) -> Self {
        let k_tot = gamma.len();
        SimulationConfig {
            mu,
            sigma_alpha,
            sigma_beta,
            sigma_eps,
            gamma,
            n,
            m,
            k_tot,
            alpha_family: NoiseFamily::default(),
            beta_family: NoiseFamily::default(),
            eps_family: NoiseFamily::default(),
            clip_to_scale: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        if self.n == 0 || self.m == 0 || self.k_tot == 0 {
            return Err(MonteCarloError::InvalidConfig(
                "n, m, and k_tot must be at least 1".into(),
            ));
        }
        if self.gamma.len() != self.k_tot {
            return Err(MonteCarloError::InvalidConfig(format!(
                "gamma has {} entries but k_tot is {}",
                self.gamma.len(),
                self.k_tot
            )));
        }
        for (s, name) in [
            (self.sigma_alpha, "sigma_alpha"),
            (self.sigma_beta, "sigma_beta"),
            (self.sigma_eps, "sigma_eps"),
        ] {
            if s.is_nan() || s < 0.0 {
                return Err(MonteCarloError::InvalidConfig(format!(
                    "{name} must be non-negative (got {s})"
                )));
            }
        }
        let gsum: f64 = self.gamma.iter().sum();
        if gsum.abs() > 1e-9 {
            return Err(MonteCarloError::InvalidConfig(format!(
                "gamma must sum to zero (got {gsum:e})"
            )));
        }
        if let Some((lo, hi)) = self.clip_to_scale {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(MonteCarloError::InvalidConfig(format!(
                    "clip bounds must satisfy lo <= hi (got {lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

/// Draws one full-panel score tensor from the additive model.
///
/// Deterministic given the config: scenario, generation, and residual
/// effects each consume their own random stream keyed by `seed`.
pub fn simulate_tensor(config: &SimulationConfig) -> Result<ScoreTensor, MonteCarloError> {
    config.validate()?;
    let (n, m, k) = (config.n, config.m, config.k_tot);

    let mut alpha_rng = stream_rng(config.seed, streams::SIM_ALPHA);
    let mut beta_rng = stream_rng(config.seed, streams::SIM_BETA);
    let mut eps_rng = stream_rng(config.seed, streams::SIM_EPS);
    let alpha = Sampler::new(config.alpha_family, config.sigma_alpha)?;
    let beta = Sampler::new(config.beta_family, config.sigma_beta)?;
    let eps = Sampler::new(config.eps_family, config.sigma_eps)?;

    let mut scores = Array3::<f64>::zeros((n, m, k));
    for i in 0..n {
        let a = alpha.sample(&mut alpha_rng);
        for j in 0..m {
            let b = beta.sample(&mut beta_rng);
            for l in 0..k {
                let e = eps.sample(&mut eps_rng);
                let mut x = config.mu + a + b + config.gamma[l] + e;
                if let Some((lo, hi)) = config.clip_to_scale {
                    x = x.clamp(lo, hi);
                }
                scores[[i, j, l]] = x;
            }
        }
    }

    let (scale_min, scale_max) = config
        .clip_to_scale
        .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    Ok(ScoreTensor::from_array(
        scores,
        (0..n).map(|i| format!("s{i}")).collect(),
        (0..k).map(|l| format!("j{l}")).collect(),
        scale_min,
        scale_max,
    )?)
}

/// Empirical pool variances: the constants `C` such that a strategy's
/// subsampled score has variance exactly `C / (nB)`.
///
/// All three are plain (divide-by-count) averages over the finite pools,
/// which is what makes the harness predictions exact at finite `m_max`:
///
/// - `C_A`: variance of generation-level panel means within a scenario,
///   scaled by `k_tot` because a full-panel draw costs `k_tot` calls;
/// - `C_B`: variance of single cells around the scenario mean;
/// - `C_C`: variance of cells within their judge column.
///
/// The tensor must contain the full judge panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolConstants {
    #[serde(rename = "C_A")]
    pub c_a: f64,
    #[serde(rename = "C_B")]
    pub c_b: f64,
    #[serde(rename = "C_C")]
    pub c_c: f64,
}

pub fn pool_constants(tensor: &ScoreTensor) -> Result<PoolConstants, MonteCarloError> {
    let (n, m_max, k_tot) = (tensor.n(), tensor.m(), tensor.k());
    if m_max == 0 {
        return Err(MonteCarloError::DegeneratePool);
    }
    let gen_means = tensor.cell_means();
    let scenario_means = tensor.scenario_means();

    let mut c_a = 0.0;
    let mut c_b = 0.0;
    let mut c_c = 0.0;
    for i in 0..n {
        let s_mean = scenario_means[i];
        let mut a_i = 0.0;
        for g in 0..m_max {
            let d = gen_means[[i, g]] - s_mean;
            a_i += d * d;
        }
        c_a += a_i / m_max as f64;

        let mut b_i = 0.0;
        for g in 0..m_max {
            for l in 0..k_tot {
                let d = tensor.score(i, g, l) - s_mean;
                b_i += d * d;
            }
        }
        c_b += b_i / (m_max * k_tot) as f64;

        for l in 0..k_tot {
            let col_mean =
                (0..m_max).map(|g| tensor.score(i, g, l)).sum::<f64>() / m_max as f64;
            let mut c_il = 0.0;
            for g in 0..m_max {
                let d = tensor.score(i, g, l) - col_mean;
                c_il += d * d;
            }
            c_c += c_il / m_max as f64;
        }
    }
    Ok(PoolConstants {
        c_a: k_tot as f64 * c_a / n as f64,
        c_b: c_b / n as f64,
        c_c: c_c / (n * k_tot) as f64,
    })
}

/// Precomputed lookups shared by every replicate of a harness run.
struct SamplingPools<'a> {
    tensor: &'a ScoreTensor,
    gen_means: Array2<f64>,
}

impl<'a> SamplingPools<'a> {
    fn new(tensor: &'a ScoreTensor) -> Self {
        SamplingPools {
            tensor,
            gen_means: tensor.cell_means(),
        }
    }
}

fn check_budget(strategy: Strategy, budget: usize, k_tot: usize) -> Result<(), MonteCarloError> {
    if budget == 0 {
        return Err(MonteCarloError::InvalidConfig("budget must be at least 1".into()));
    }
    match strategy {
        Strategy::AllJudges | Strategy::Cyclic if !budget.is_multiple_of(k_tot) => {
            Err(MonteCarloError::IndivisibleBudget { budget, k_tot })
        }
        _ => Ok(()),
    }
}

fn subsample_with_rng(
    pools: &SamplingPools,
    strategy: Strategy,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let tensor = pools.tensor;
    let (n, m_max, k_tot) = (tensor.n(), tensor.m(), tensor.k());
    let mut total = 0.0;
    for i in 0..n {
        let scenario_mean = match strategy {
            Strategy::AllJudges => {
                let draws = budget / k_tot;
                let mut acc = 0.0;
                for _ in 0..draws {
                    let g = rng.random_range(0..m_max);
                    acc += pools.gen_means[[i, g]];
                }
                acc / draws as f64
            }
            Strategy::RandomSingle => {
                let mut acc = 0.0;
                for _ in 0..budget {
                    let g = rng.random_range(0..m_max);
                    let l = rng.random_range(0..k_tot);
                    acc += tensor.score(i, g, l);
                }
                acc / budget as f64
            }
            Strategy::Cyclic => {
                let per_judge = budget / k_tot;
                let mut acc = 0.0;
                for l in 0..k_tot {
                    for _ in 0..per_judge {
                        let g = rng.random_range(0..m_max);
                        acc += tensor.score(i, g, l);
                    }
                }
                acc / budget as f64
            }
        };
        total += scenario_mean;
    }
    total / n as f64
}

/// One subsampled benchmark score at per-scenario budget `B`.
///
/// Within each scenario the strategy's pool is sampled with replacement:
/// all-judges averages `B / k_tot` generation-level panel means, random
/// judging averages `B` uniform cells, cycling averages `B / k_tot` draws
/// from each judge's column. Deterministic given the seed.
pub fn subsample_score(
    tensor: &ScoreTensor,
    strategy: Strategy,
    budget: usize,
    seed: u64,
) -> Result<f64, MonteCarloError> {
    if tensor.m() == 0 {
        return Err(MonteCarloError::EmptyPool);
    }
    check_budget(strategy, budget, tensor.k())?;
    let pools = SamplingPools::new(tensor);
    let mut rng = stream_rng(seed, streams::SUBSAMPLE);
    Ok(subsample_with_rng(&pools, strategy, budget, &mut rng))
}

/// Empirical-versus-predicted variance for one (strategy, budget) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessResult {
    pub strategy: Strategy,
    #[serde(rename = "B")]
    pub budget: usize,
    pub reps: usize,
    pub empirical_variance: f64,
    pub predicted_variance: f64,
    /// Standard error of the empirical variance under the normal
    /// approximation: `empirical_variance * sqrt(2 / (reps - 1))`.
    pub standard_error: f64,
}

/// Runs `reps` independent subsampling replicates and compares their sample
/// variance against the exact pool prediction `C / (nB)`.
///
/// Replicates execute in parallel; each derives its own stream from
/// (`seed`, replicate index), and the variance is accumulated in replicate
/// order, so the result is bit-identical regardless of thread schedule.
pub fn run_harness(
    tensor: &ScoreTensor,
    strategy: Strategy,
    budget: usize,
    reps: usize,
    seed: u64,
) -> Result<HarnessResult, MonteCarloError> {
    let constants = pool_constants(tensor)?;
    harness_with_pools(tensor, &constants, strategy, budget, reps, seed)
}

fn harness_with_pools(
    tensor: &ScoreTensor,
    constants: &PoolConstants,
    strategy: Strategy,
    budget: usize,
    reps: usize,
    seed: u64,
) -> Result<HarnessResult, MonteCarloError> {
    if reps < 2 {
        return Err(MonteCarloError::TooFewReps(reps));
    }
    check_budget(strategy, budget, tensor.k())?;
    let pools = SamplingPools::new(tensor);
    let scores: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(derive_seed(seed, r as u64), streams::SUBSAMPLE);
            subsample_with_rng(&pools, strategy, budget, &mut rng)
        })
        .collect();
    let empirical_variance = sample_variance(&scores);
    let c = match strategy {
        Strategy::AllJudges => constants.c_a,
        Strategy::RandomSingle => constants.c_b,
        Strategy::Cyclic => constants.c_c,
    };
    Ok(HarnessResult {
        strategy,
        budget,
        reps,
        empirical_variance,
        predicted_variance: c / (tensor.n() as f64 * budget as f64),
        standard_error: empirical_variance * (2.0 / (reps as f64 - 1.0)).sqrt(),
    })
}

/// Two-pass sample variance (n - 1 denominator) with a fixed summation
/// order.
pub fn sample_variance(values: &[f64]) -> f64 {
    assert!(values.len() >= 2, "sample variance needs at least 2 values");
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// A (strategy, budget) point skipped by [`variance_curve`] and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub strategy: Strategy,
    #[serde(rename = "B")]
    pub budget: usize,
    pub reason: String,
}

/// Harness results over a budget grid for all three strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCurve {
    pub results: Vec<HarnessResult>,
    pub skipped: Vec<SkippedPoint>,
}

/// Runs the harness for every strategy at every budget. Budgets that the
/// all-judges or cyclic strategy cannot realize (not a multiple of the pool
/// size) are skipped with a recorded reason; pool constants are computed
/// once.
pub fn variance_curve(
    tensor: &ScoreTensor,
    budgets: &[usize],
    reps: usize,
    seed: u64,
) -> Result<VarianceCurve, MonteCarloError> {
    let constants = pool_constants(tensor)?;
    let k_tot = tensor.k();
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for (si, &strategy) in Strategy::ALL.iter().enumerate() {
        for (bi, &budget) in budgets.iter().enumerate() {
            if let Err(e) = check_budget(strategy, budget, k_tot) {
                skipped.push(SkippedPoint {
                    strategy,
                    budget,
                    reason: e.to_string(),
                });
                continue;
            }
            let point_seed = derive_seed(seed, (si * budgets.len() + bi) as u64);
            results.push(harness_with_pools(
                tensor, &constants, strategy, budget, reps, point_seed,
            )?);
        }
    }
    Ok(VarianceCurve { results, skipped })
}
