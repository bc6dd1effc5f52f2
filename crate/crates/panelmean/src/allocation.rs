//! Closed-form variance analytics for judge-allocation strategies.
//!
//! The benchmark score is the grand mean of a balanced crossed design. Its
//! variance splits into scenario, generation, and residual noise terms plus
//! a judge-bias term that carries a finite population correction: sampling
//! `K` of `k_tot` centered offsets without replacement shrinks the offset
//! variance by `(k_tot - K) / (k_tot - 1)`, reaching exactly zero at the
//! full panel.
//!
//! Under a per-scenario budget of `B` judge calls, three strategies compete:
//!
//! - `AllJudges`: every judge scores each of `B / k_tot` generations,
//!   `V_A = (k_tot * sigma2_beta + sigma2_eps) / (nB)`;
//! - `RandomSingle`: one uniformly drawn judge scores each of `B`
//!   generations, `V_B = (sigma2_beta + sigma2_gamma + sigma2_eps) / (nB)`;
//! - `Cyclic`: judges rotate round-robin over `B` generations (or over
//!   shuffled scenarios when `m = 1`), cancelling the centered offsets at
//!   single-judge cost, `V_C = (sigma2_beta + sigma2_eps) / (nB)`.
//!
//! Cyclic is never worse than either alternative; the AllJudges-vs-Random
//! order flips on the sign of `(k_tot - 1) * sigma2_beta - sigma2_gamma`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::VarianceComponents;
use crate::score::Design;

#[derive(Debug, Error)]
pub enum AllocationError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("budget {budget} is not divisible by the judge pool size {k_tot}")]
    IndivisibleBudget { budget: usize, k_tot: usize },
    #[error("values must sum to zero (got {sum:e})")]
    Uncentered { sum: f64 },
    #[error("variance profile has a negative component: {0}")]
    NegativeComponent(&'static str),
    #[error("generation variance is indeterminate (single-generation fit); supply sigma2_beta explicitly")]
    IndeterminateGeneration,
}

/// Judge-allocation strategies under a fixed per-scenario call budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    AllJudges,
    RandomSingle,
    Cyclic,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::AllJudges, Strategy::RandomSingle, Strategy::Cyclic];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::AllJudges => "AllJudges",
            Strategy::RandomSingle => "RandomSingle",
            Strategy::Cyclic => "Cyclic",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "alljudges" | "all-judges" | "all" | "a" => Ok(Strategy::AllJudges),
            "randomsingle" | "random" | "b" => Ok(Strategy::RandomSingle),
            "cyclic" | "cycle" | "c" => Ok(Strategy::Cyclic),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// Plain per-observation variance components, the inputs every closed form
/// consumes. Values are variances (score-units squared).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceProfile {
    pub sigma2_alpha: f64,
    pub sigma2_beta: f64,
    pub sigma2_gamma: f64,
    pub sigma2_eps: f64,
}

impl VarianceProfile {
    pub fn new(
        sigma2_alpha: f64,
        sigma2_beta: f64,
        sigma2_gamma: f64,
        sigma2_eps: f64,
    ) -> Result<Self, AllocationError> {
        let p = VarianceProfile {
            sigma2_alpha,
            sigma2_beta,
            sigma2_gamma,
            sigma2_eps,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AllocationError> {
        for (v, name) in [
            (self.sigma2_alpha, "sigma2_alpha"),
            (self.sigma2_beta, "sigma2_beta"),
            (self.sigma2_gamma, "sigma2_gamma"),
            (self.sigma2_eps, "sigma2_eps"),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(AllocationError::NegativeComponent(name));
            }
        }
        Ok(())
    }
}

impl VarianceComponents {
    /// The plain component values needed by the closed forms. Fails when the
    /// generation component is indeterminate (fit at a single generation per
    /// scenario) rather than silently substituting zero.
    pub fn profile(&self) -> Result<VarianceProfile, AllocationError> {
        let beta = self
            .sigma2_beta
            .ok_or(AllocationError::IndeterminateGeneration)?;
        VarianceProfile::new(self.sigma2_alpha, beta, self.sigma2_gamma, self.sigma2_eps)
    }
}

/// Finite population correction `(k_tot - k) / (k_tot - 1)` for averaging
/// `k` of `k_tot` centered judge offsets sampled without replacement.
/// Equals 1 at `k = 1` and 0 at the full panel.
pub fn fpc_factor(k: usize, k_tot: usize) -> Result<f64, AllocationError> {
    if k_tot < 2 {
        return Err(AllocationError::InvalidDesign(format!(
            "finite population correction needs a pool of at least 2 (got {k_tot})"
        )));
    }
    if k == 0 || k > k_tot {
        return Err(AllocationError::InvalidDesign(format!(
            "judges per cell must satisfy 1 <= k <= k_tot (got k={k}, k_tot={k_tot})"
        )));
    }
    Ok((k_tot - k) as f64 / (k_tot - 1) as f64)
}

/// Exact variance of the mean of a size-`k` simple random sample drawn
/// without replacement from centered `values`, by full subset enumeration.
///
/// This is the independent check of [`fpc_factor`]: the result equals
/// `(mean of squared values / k) * (P - k) / (P - 1)` for every centered
/// population.
pub fn fpc_brute_force(values: &[f64], k: usize) -> Result<f64, AllocationError> {
    let p = values.len();
    if k == 0 || k > p {
        return Err(AllocationError::InvalidDesign(format!(
            "sample size must satisfy 1 <= k <= {p} (got {k})"
        )));
    }
    let sum: f64 = values.iter().sum();
    if sum.abs() > 1e-12 {
        return Err(AllocationError::Uncentered { sum });
    }
    let mut mean_acc = 0.0;
    let mut sq_acc = 0.0;
    let mut count = 0u64;
    let mut chosen = Vec::with_capacity(k);
    enumerate_subsets(values, k, 0, 0.0, &mut chosen, &mut |subset_sum| {
        let mean = subset_sum / k as f64;
        mean_acc += mean;
        sq_acc += mean * mean;
        count += 1;
    });
    let mean_of_means = mean_acc / count as f64;
    Ok(sq_acc / count as f64 - mean_of_means * mean_of_means)
}

fn enumerate_subsets(
    values: &[f64],
    k: usize,
    start: usize,
    acc: f64,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(f64),
) {
    if chosen.len() == k {
        visit(acc);
        return;
    }
    let remaining = k - chosen.len();
    for idx in start..=values.len() - remaining {
        chosen.push(idx);
        enumerate_subsets(values, k, idx + 1, acc + values[idx], chosen, visit);
        chosen.pop();
    }
}

/// Per-term breakdown of the benchmark-score variance at an operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    /// `sigma2_alpha / n`
    pub scenario: f64,
    /// `sigma2_beta / (n m)`
    pub generation: f64,
    /// `(sigma2_gamma / K) * (k_tot - K) / (k_tot - 1)`
    pub judge: f64,
    /// `sigma2_eps / (n m K)`
    pub residual: f64,
    pub total: f64,
}

/// Variance of the benchmark score at the design's operating point, with
/// the per-term breakdown.
pub fn benchmark_variance(
    profile: &VarianceProfile,
    design: &Design,
) -> Result<VarianceBreakdown, AllocationError> {
    profile.validate()?;
    if design.k == 0 || design.k > design.k_tot {
        return Err(AllocationError::InvalidDesign(format!(
            "judges per cell must satisfy 1 <= k <= k_tot (got k={}, k_tot={})",
            design.k, design.k_tot
        )));
    }
    let (n, m, k) = (design.n as f64, design.m as f64, design.k as f64);
    // At the full panel the offsets cancel identically; the correction
    // factor is only evaluated (and its k_tot >= 2 requirement enforced)
    // when judges are a strict subset.
    let fpc = if design.k == design.k_tot {
        0.0
    } else {
        fpc_factor(design.k, design.k_tot)?
    };
    let scenario = profile.sigma2_alpha / n;
    let generation = profile.sigma2_beta / (n * m);
    let judge = profile.sigma2_gamma / k * fpc;
    let residual = profile.sigma2_eps / (n * m * k);
    Ok(VarianceBreakdown {
        scenario,
        generation,
        judge,
        residual,
        total: scenario + generation + judge + residual,
    })
}

/// A strategy's predicted benchmark-score variance at budget `B`.
///
/// The scenario term `sigma2_alpha / n` is excluded: scenarios are fixed
/// before strategies are compared. Use [`scenario_floor`] to reconstruct the
/// total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyVariance {
    pub strategy: Strategy,
    #[serde(rename = "B")]
    pub budget: usize,
    pub variance: f64,
}

/// The fixed scenario contribution `sigma2_alpha / n` that every strategy
/// shares on top of its budget-dependent variance.
pub fn scenario_floor(profile: &VarianceProfile, n: usize) -> f64 {
    profile.sigma2_alpha / n as f64
}

/// Closed-form strategy variance at per-scenario budget `B`.
///
/// `AllJudges` and `Cyclic` require `B` divisible by `k_tot` (whole
/// generations for the former, exact offset cancellation for the latter).
pub fn strategy_variance(
    strategy: Strategy,
    profile: &VarianceProfile,
    n: usize,
    budget: usize,
    k_tot: usize,
) -> Result<StrategyVariance, AllocationError> {
    profile.validate()?;
    if n == 0 || k_tot == 0 {
        return Err(AllocationError::InvalidDesign(
            "n and k_tot must be at least 1".into(),
        ));
    }
    if budget == 0 {
        return Err(AllocationError::InvalidDesign("budget must be at least 1".into()));
    }
    let divisible = budget.is_multiple_of(k_tot);
    let pooled = match strategy {
        Strategy::AllJudges => {
            if !divisible {
                return Err(AllocationError::IndivisibleBudget { budget, k_tot });
            }
            k_tot as f64 * profile.sigma2_beta + profile.sigma2_eps
        }
        Strategy::RandomSingle => {
            profile.sigma2_beta + profile.sigma2_gamma + profile.sigma2_eps
        }
        Strategy::Cyclic => {
            if !divisible {
                return Err(AllocationError::IndivisibleBudget { budget, k_tot });
            }
            profile.sigma2_beta + profile.sigma2_eps
        }
    };
    Ok(StrategyVariance {
        strategy,
        budget,
        variance: pooled / (n as f64 * budget as f64),
    })
}

/// Differences between the three strategy variances at budget `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseGaps {
    /// `(k_tot - 1) * sigma2_beta / (nB)`, always non-negative.
    #[serde(rename = "VA_minus_VC")]
    pub a_minus_c: f64,
    /// `sigma2_gamma / (nB)`, always non-negative.
    #[serde(rename = "VB_minus_VC")]
    pub b_minus_c: f64,
    /// `((k_tot - 1) * sigma2_beta - sigma2_gamma) / (nB)`, either sign.
    #[serde(rename = "VA_minus_VB")]
    pub a_minus_b: f64,
}

/// Closed-form pairwise gaps; all are `O(1/B)`, so cycling's advantage is
/// largest at small budgets.
pub fn pairwise_gaps(
    profile: &VarianceProfile,
    n: usize,
    budget: usize,
    k_tot: usize,
) -> Result<PairwiseGaps, AllocationError> {
    profile.validate()?;
    if n == 0 || k_tot == 0 || budget == 0 {
        return Err(AllocationError::InvalidDesign(
            "n, budget, and k_tot must be at least 1".into(),
        ));
    }
    if !budget.is_multiple_of(k_tot) {
        return Err(AllocationError::IndivisibleBudget { budget, k_tot });
    }
    let nb = n as f64 * budget as f64;
    let a_minus_c = (k_tot as f64 - 1.0) * profile.sigma2_beta / nb;
    let b_minus_c = profile.sigma2_gamma / nb;
    Ok(PairwiseGaps {
        a_minus_c,
        b_minus_c,
        a_minus_b: a_minus_c - b_minus_c,
    })
}

/// Strategy ranking with the decision diagnostics behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    /// Best first. `Cyclic` always leads; `AllJudges` precedes
    /// `RandomSingle` exactly when `sigma2_gamma / sigma2_beta` is at least
    /// `k_tot - 1` (ties break toward `AllJudges`, which cancels offsets at
    /// every sub-sample size, not just in expectation).
    pub ranking: Vec<Strategy>,
    /// `sigma2_gamma / sigma2_beta`; infinite when `sigma2_beta = 0`.
    #[serde(
        serialize_with = "serialize_ratio",
        deserialize_with = "deserialize_ratio"
    )]
    pub ratio: f64,
    /// `k_tot - 1`, the ratio threshold at which AllJudges overtakes
    /// RandomSingle.
    pub threshold: f64,
    pub gaps: PairwiseGaps,
}

fn serialize_ratio<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    // JSON has no infinity literal; keep the value readable and parseable.
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("+inf")
    }
}

fn deserialize_ratio<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Str(s) if s == "+inf" => Ok(f64::INFINITY),
        Raw::Str(s) => Err(serde::de::Error::custom(format!("bad ratio {s:?}"))),
    }
}

/// Ranks the three strategies at budget `B`.
pub fn recommend_strategy(
    profile: &VarianceProfile,
    n: usize,
    budget: usize,
    k_tot: usize,
) -> Result<Recommendation, AllocationError> {
    let gaps = pairwise_gaps(profile, n, budget, k_tot)?;
    let ratio = if profile.sigma2_beta == 0.0 {
        f64::INFINITY
    } else {
        profile.sigma2_gamma / profile.sigma2_beta
    };
    // AllJudges beats RandomSingle iff V_A - V_B < 0, i.e. iff
    // (k_tot - 1) * sigma2_beta < sigma2_gamma; ties go to AllJudges.
    let ranking = if gaps.a_minus_b <= 0.0 {
        vec![Strategy::Cyclic, Strategy::AllJudges, Strategy::RandomSingle]
    } else {
        vec![Strategy::Cyclic, Strategy::RandomSingle, Strategy::AllJudges]
    };
    Ok(Recommendation {
        ranking,
        ratio,
        threshold: k_tot as f64 - 1.0,
        gaps,
    })
}

/// Variance under cycling when a total generation budget `b_gen = n * m` is
/// split into `m` generations for each of `n = b_gen / m` scenarios:
/// `(m * sigma2_alpha + sigma2_beta + sigma2_eps) / b_gen`.
///
/// Affine in `m` with slope `sigma2_alpha / b_gen`, so whenever scenarios
/// differ at all the minimum sits at `m = 1`: spend generation budget on
/// scenario coverage first.
pub fn scenario_generation_tradeoff(
    profile: &VarianceProfile,
    b_gen: usize,
    m: usize,
) -> Result<f64, AllocationError> {
    profile.validate()?;
    if m == 0 || b_gen == 0 {
        return Err(AllocationError::InvalidDesign(
            "b_gen and m must be at least 1".into(),
        ));
    }
    if !b_gen.is_multiple_of(m) {
        return Err(AllocationError::InvalidDesign(format!(
            "b_gen {b_gen} must be divisible by m {m}"
        )));
    }
    Ok((m as f64 * profile.sigma2_alpha + profile.sigma2_beta + profile.sigma2_eps)
        / b_gen as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn qwen_gp() -> VarianceProfile {
        VarianceProfile::new(1.530, 0.266, 0.947, 1.486).unwrap()
    }

    #[test]
    fn fpc_endpoints() {
        assert_eq!(fpc_factor(5, 5).unwrap(), 0.0);
        assert_eq!(fpc_factor(1, 5).unwrap(), 1.0);
        assert_eq!(fpc_factor(2, 5).unwrap(), 0.75);
        assert!(fpc_factor(6, 5).is_err());
        assert!(fpc_factor(1, 1).is_err());
        assert!(fpc_factor(0, 5).is_err());
    }

    #[test]
    fn brute_force_two_point() {
        assert_abs_diff_eq!(fpc_brute_force(&[1.0, -1.0], 1).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fpc_brute_force(&[1.0, -1.0], 2).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn brute_force_three_point() {
        // Subsets of size 2 from (2, -1, -1) have means (1/2, 1/2, -1):
        // variance 0.5, matching (sigma2/k) * (P-k)/(P-1) = (2/2) * (1/2).
        assert_abs_diff_eq!(
            fpc_brute_force(&[2.0, -1.0, -1.0], 2).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn brute_force_rejects_uncentered() {
        assert!(matches!(
            fpc_brute_force(&[1.0, 1.0], 1),
            Err(AllocationError::Uncentered { .. })
        ));
    }

    #[test]
    fn benchmark_variance_reference_point() {
        // 1-10-scale reference profile at the single-judge default
        // operating point; per-term values known to three decimals in
        // 1e-3 units.
        let d = Design::new(80, 1, 1, 5).unwrap();
        let b = benchmark_variance(&qwen_gp(), &d).unwrap();
        assert_abs_diff_eq!(b.scenario, 19.125e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(b.generation, 3.325e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(b.judge, 947.0e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(b.residual, 18.575e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(b.total, 0.988025, epsilon = 1e-12);
    }

    #[test]
    fn benchmark_variance_zero_profile() {
        let d = Design::new(10, 2, 2, 5).unwrap();
        let p = VarianceProfile::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(benchmark_variance(&p, &d).unwrap().total, 0.0);
    }

    #[test]
    fn benchmark_variance_full_panel_drops_judge_term() {
        // 1-5-scale reference profile, full five-judge panel.
        let p = VarianceProfile::new(0.005, 0.002, 0.155, 0.061).unwrap();
        let d = Design::new(50, 5, 5, 5).unwrap();
        let b = benchmark_variance(&p, &d).unwrap();
        assert_eq!(b.judge, 0.0);
        assert_abs_diff_eq!(
            b.total,
            0.005 / 50.0 + 0.002 / 250.0 + 0.061 / 1250.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(b.total, 1.568e-4, epsilon = 1e-9);
    }

    #[test]
    fn strategies_coincide_without_beta_and_gamma() {
        let p = VarianceProfile::new(0.3, 0.0, 0.0, 1.7).unwrap();
        for strategy in Strategy::ALL {
            let v = strategy_variance(strategy, &p, 40, 10, 5).unwrap();
            assert_abs_diff_eq!(v.variance, 1.7 / 400.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn strategy_reference_values() {
        let p = qwen_gp();
        let vc = strategy_variance(Strategy::Cyclic, &p, 80, 5, 5).unwrap();
        let vb = strategy_variance(Strategy::RandomSingle, &p, 80, 5, 5).unwrap();
        assert_abs_diff_eq!(vc.variance, 4.38e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(vb.variance, 6.7475e-3, epsilon = 1e-12);
        let reduction = (vb.variance - vc.variance) / vb.variance;
        assert!(
            (0.27..=0.40).contains(&reduction),
            "random-to-cyclic reduction {reduction} out of expected band"
        );
        // One full-panel generation: V_A at B = k_tot.
        let va = strategy_variance(Strategy::AllJudges, &p, 80, 5, 5).unwrap();
        assert_abs_diff_eq!(
            va.variance,
            (5.0 * 0.266 + 1.486) / (80.0 * 5.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn indivisible_budget_rejected_for_all_judges_and_cyclic() {
        let p = qwen_gp();
        assert!(matches!(
            strategy_variance(Strategy::AllJudges, &p, 80, 7, 5),
            Err(AllocationError::IndivisibleBudget { .. })
        ));
        assert!(matches!(
            strategy_variance(Strategy::Cyclic, &p, 80, 7, 5),
            Err(AllocationError::IndivisibleBudget { .. })
        ));
        assert!(strategy_variance(Strategy::RandomSingle, &p, 80, 7, 5).is_ok());
    }

    #[test]
    fn gaps_match_direct_subtraction_and_halve_with_budget() {
        let p = qwen_gp();
        let g5 = pairwise_gaps(&p, 80, 5, 5).unwrap();
        let g10 = pairwise_gaps(&p, 80, 10, 5).unwrap();
        let va = strategy_variance(Strategy::AllJudges, &p, 80, 5, 5).unwrap().variance;
        let vb = strategy_variance(Strategy::RandomSingle, &p, 80, 5, 5).unwrap().variance;
        let vc = strategy_variance(Strategy::Cyclic, &p, 80, 5, 5).unwrap().variance;
        assert_abs_diff_eq!(g5.a_minus_c, va - vc, epsilon = 1e-15);
        assert_abs_diff_eq!(g5.b_minus_c, vb - vc, epsilon = 1e-15);
        assert_abs_diff_eq!(g5.a_minus_b, va - vb, epsilon = 1e-15);
        assert_abs_diff_eq!(g10.a_minus_c, g5.a_minus_c / 2.0, epsilon = 1e-18);
        assert_abs_diff_eq!(g10.b_minus_c, g5.b_minus_c / 2.0, epsilon = 1e-18);
        assert_abs_diff_eq!(g10.a_minus_b, g5.a_minus_b / 2.0, epsilon = 1e-18);
    }

    #[test]
    fn zero_beta_makes_all_judges_match_cyclic() {
        let p = VarianceProfile::new(0.4, 0.0, 0.43, 0.66).unwrap();
        let g = pairwise_gaps(&p, 80, 10, 5).unwrap();
        assert_eq!(g.a_minus_c, 0.0);
    }

    #[test]
    fn zero_gamma_makes_random_match_cyclic() {
        let p = VarianceProfile::new(0.4, 0.2, 0.0, 0.66).unwrap();
        let g = pairwise_gaps(&p, 80, 10, 5).unwrap();
        assert_eq!(g.b_minus_c, 0.0);
    }

    #[test]
    fn recommendation_threshold_cases() {
        // ratio 0.947 / 0.266 = 3.56 below threshold 4: random beats
        // all-judges.
        let r = recommend_strategy(&qwen_gp(), 80, 5, 5).unwrap();
        assert_eq!(
            r.ranking,
            vec![Strategy::Cyclic, Strategy::RandomSingle, Strategy::AllJudges]
        );
        assert_abs_diff_eq!(r.ratio, 0.947 / 0.266, epsilon = 1e-12);
        assert_eq!(r.threshold, 4.0);

        // ratio 0.155 / 0.002 = 77.5 above threshold: all-judges wins.
        let p = VarianceProfile::new(0.005, 0.002, 0.155, 0.061).unwrap();
        let r = recommend_strategy(&p, 50, 5, 5).unwrap();
        assert_eq!(
            r.ranking,
            vec![Strategy::Cyclic, Strategy::AllJudges, Strategy::RandomSingle]
        );
        assert_abs_diff_eq!(r.ratio, 77.5, epsilon = 1e-9);
    }

    #[test]
    fn full_tie_keeps_cyclic_first_and_all_judges_second() {
        let p = VarianceProfile::new(0.3, 0.0, 0.0, 0.5).unwrap();
        let r = recommend_strategy(&p, 10, 5, 5).unwrap();
        assert_eq!(
            r.ranking,
            vec![Strategy::Cyclic, Strategy::AllJudges, Strategy::RandomSingle]
        );
        assert!(r.ratio.is_infinite());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"+inf\""));
        let back: Recommendation = serde_json::from_str(&json).unwrap();
        assert!(back.ratio.is_infinite());
    }

    #[test]
    fn tradeoff_reference_values() {
        let p = qwen_gp();
        assert_abs_diff_eq!(
            scenario_generation_tradeoff(&p, 80, 1).unwrap(),
            0.0410250,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            scenario_generation_tradeoff(&p, 80, 2).unwrap(),
            0.0601500,
            epsilon = 1e-9
        );
        assert!(scenario_generation_tradeoff(&p, 80, 3).is_err());
    }

    #[test]
    fn tradeoff_flat_without_scenario_variance() {
        let p = VarianceProfile::new(0.0, 0.2, 0.9, 1.1).unwrap();
        let v1 = scenario_generation_tradeoff(&p, 60, 1).unwrap();
        for m in [2, 3, 4, 5, 6] {
            assert_abs_diff_eq!(
                scenario_generation_tradeoff(&p, 60, m).unwrap(),
                v1,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn scenario_floor_reported_separately() {
        let p = qwen_gp();
        assert_abs_diff_eq!(scenario_floor(&p, 80), 1.530 / 80.0, epsilon = 1e-15);
    }
}
