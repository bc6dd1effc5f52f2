//! Crossed-ANOVA estimation of variance components and the judge F-test.
//!
//! The observation model splits each score into a panel mean, a scenario
//! effect, a generation effect, a fixed per-judge offset (centered over the
//! judge pool), and residual noise. With a balanced crossed design, three
//! mean squares identify the variance components by the method of moments:
//!
//! - `MS_W` (residual, double-centered over cells and judges) estimates
//!   `sigma2_eps`,
//! - `E[MS_G] = sigma2_eps + K * sigma2_beta`,
//! - `E[MS_S] = sigma2_eps + K * sigma2_beta + m * K * sigma2_alpha`.
//!
//! Negative method-of-moments estimates are clamped to zero and flagged,
//! the standard truncation convention for ANOVA variance components.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::score::ScoreTensor;
use crate::special::inc_beta;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("degenerate design: {0}")]
    DegenerateDesign(&'static str),
    #[error(
        "judge offsets are defined over the full pool: tensor has {observed} judges, pool is {pool}"
    )]
    PartialPanel { observed: usize, pool: usize },
    #[error("residual sum of squares is zero; F statistic undefined")]
    ZeroResidual,
}

/// Identifies a variance component whose raw estimate was truncated at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentId {
    #[serde(rename = "sigma2_alpha")]
    Scenario,
    #[serde(rename = "sigma2_beta")]
    Generation,
    #[serde(rename = "sigma2_gamma")]
    Judge,
}

/// The ANOVA mean squares behind a component fit. `MS_G` needs at least two
/// generations per scenario and is absent otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSquares {
    #[serde(rename = "MS_W")]
    pub ms_w: f64,
    #[serde(rename = "MS_S")]
    pub ms_s: f64,
    #[serde(rename = "MS_G", skip_serializing_if = "Option::is_none", default)]
    pub ms_g: Option<f64>,
}

/// Estimated variance components and per-judge offsets.
///
/// `sigma2_beta` is `None` when the data had a single generation per
/// scenario: the generation stratum is then unidentifiable, and
/// `sigma2_alpha` absorbs it (an upper bound on the scenario component, since
/// `E[MS_S - MS_W] = K * (sigma2_alpha + sigma2_beta)` at m = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponents {
    pub mu_hat: f64,
    pub sigma2_alpha: f64,
    pub sigma2_beta: Option<f64>,
    pub sigma2_gamma: f64,
    pub sigma2_eps: f64,
    pub gamma_hat: Vec<f64>,
    pub truncated: BTreeSet<ComponentId>,
    pub mean_squares: MeanSquares,
}

/// Two-way ANOVA F-test result for the judge main effect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FTestResult {
    #[serde(rename = "F")]
    pub f: f64,
    pub df1: u64,
    pub df2: u64,
    pub p_value: f64,
}

/// Residual mean square `MS_W`: the double-centered sum of squares over
/// cells and judges, divided by `(nm - 1)(K - 1)`. Estimates `sigma2_eps`.
pub fn residual_mean_square(tensor: &ScoreTensor) -> Result<f64, EstimatorError> {
    let (n, m, k) = (tensor.n(), tensor.m(), tensor.k());
    if k < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "residual mean square needs at least two judges",
        ));
    }
    if n * m < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "residual mean square needs at least two scenario-generation cells",
        ));
    }
    let grand = tensor.grand_mean();
    let cell_means = tensor.cell_means();
    let judge_means = tensor.judge_means();
    let mut ss = 0.0;
    for i in 0..n {
        for j in 0..m {
            for (l, &jm) in judge_means.iter().enumerate() {
                let r = tensor.score(i, j, l) - cell_means[[i, j]] - jm + grand;
                ss += r * r;
            }
        }
    }
    Ok(ss / (((n * m - 1) * (k - 1)) as f64))
}

/// Between-generation mean square `MS_G = K / (n(m-1)) * sum of squared
/// deviations of cell means from their scenario mean`.
/// `E[MS_G] = sigma2_eps + K * sigma2_beta`.
pub fn generation_mean_square(tensor: &ScoreTensor) -> Result<f64, EstimatorError> {
    let (n, m, k) = (tensor.n(), tensor.m(), tensor.k());
    if m < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "generation mean square needs at least two generations per scenario",
        ));
    }
    let cell_means = tensor.cell_means();
    let scenario_means = tensor.scenario_means();
    let mut ss = 0.0;
    for i in 0..n {
        for j in 0..m {
            let d = cell_means[[i, j]] - scenario_means[i];
            ss += d * d;
        }
    }
    Ok(k as f64 / (n as f64 * (m as f64 - 1.0)) * ss)
}

/// Between-scenario mean square `MS_S = mK / (n-1) * sum of squared
/// deviations of scenario means from the grand mean`.
/// `E[MS_S] = sigma2_eps + K * sigma2_beta + m * K * sigma2_alpha`.
pub fn scenario_mean_square(tensor: &ScoreTensor) -> Result<f64, EstimatorError> {
    let (n, m, k) = (tensor.n(), tensor.m(), tensor.k());
    if n < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "scenario mean square needs at least two scenarios",
        ));
    }
    let grand = tensor.grand_mean();
    let scenario_means = tensor.scenario_means();
    let ss: f64 = scenario_means.iter().map(|&x| (x - grand) * (x - grand)).sum();
    Ok((m * k) as f64 / (n as f64 - 1.0) * ss)
}

/// Method-of-moments fit of all variance components plus per-judge offsets.
///
/// The tensor must contain the full judge pool (`K = k_tot`): the offsets
/// `gamma_hat` and their dispersion are defined relative to the whole panel.
/// Negative raw estimates of the scenario, generation, and judge components
/// are truncated at zero and recorded in `truncated`; the residual is a sum
/// of squares and cannot go negative.
pub fn estimate_components(
    tensor: &ScoreTensor,
    k_tot: usize,
) -> Result<VarianceComponents, EstimatorError> {
    let (n, m, k) = (tensor.n(), tensor.m(), tensor.k());
    if n < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "component estimation needs at least two scenarios",
        ));
    }
    if k < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "component estimation needs at least two judges",
        ));
    }
    if k != k_tot {
        return Err(EstimatorError::PartialPanel {
            observed: k,
            pool: k_tot,
        });
    }

    let ms_w = residual_mean_square(tensor)?;
    let ms_s = scenario_mean_square(tensor)?;
    let mut truncated = BTreeSet::new();

    let (ms_g, sigma2_beta) = if m >= 2 {
        let ms_g = generation_mean_square(tensor)?;
        let raw_beta = (ms_g - ms_w) / k as f64;
        let beta = if raw_beta < 0.0 {
            truncated.insert(ComponentId::Generation);
            0.0
        } else {
            raw_beta
        };
        (Some(ms_g), Some(beta))
    } else {
        (None, None)
    };

    // At m = 1 there is no generation stratum; fall back to
    // (MS_S - MS_W) / K, which lumps the generation component into the
    // scenario estimate.
    let raw_alpha = match ms_g {
        Some(ms_g) => (ms_s - ms_g) / (m * k) as f64,
        None => (ms_s - ms_w) / k as f64,
    };
    let sigma2_alpha = if raw_alpha < 0.0 {
        truncated.insert(ComponentId::Scenario);
        0.0
    } else {
        raw_alpha
    };

    let grand = tensor.grand_mean();
    let gamma_hat: Vec<f64> = tensor.judge_means().iter().map(|&jm| jm - grand).collect();
    let gamma_sq_mean = gamma_hat.iter().map(|g| g * g).sum::<f64>() / k_tot as f64;
    // Bias correction: each offset estimate carries residual noise of
    // variance sigma2_eps / (nm), of which a (k_tot - 1) / k_tot share
    // survives the centering.
    let raw_gamma =
        gamma_sq_mean - ms_w / (n * m) as f64 * (k_tot as f64 - 1.0) / k_tot as f64;
    let sigma2_gamma = if raw_gamma < 0.0 {
        truncated.insert(ComponentId::Judge);
        0.0
    } else {
        raw_gamma
    };

    Ok(VarianceComponents {
        mu_hat: grand,
        sigma2_alpha,
        sigma2_beta,
        sigma2_gamma,
        sigma2_eps: ms_w,
        gamma_hat,
        truncated,
        mean_squares: MeanSquares { ms_w, ms_s, ms_g },
    })
}

/// Two-way crossed ANOVA F-test for a judge main effect, treating each
/// scenario-generation pair as a subject crossed with the `K` judges.
///
/// `F = MS_J / MS_R` with `(K - 1, (N - 1)(K - 1))` degrees of freedom,
/// `N = nm` subjects.
pub fn judge_f_test(tensor: &ScoreTensor) -> Result<FTestResult, EstimatorError> {
    let (n, m, k) = (tensor.n(), tensor.m(), tensor.k());
    if k < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "F-test needs at least two judges",
        ));
    }
    let subjects = n * m;
    if subjects < 2 {
        return Err(EstimatorError::DegenerateDesign(
            "F-test needs at least two scenario-generation subjects",
        ));
    }
    let grand = tensor.grand_mean();
    let cell_means = tensor.cell_means();
    let judge_means = tensor.judge_means();

    let ss_judge: f64 = judge_means
        .iter()
        .map(|&jm| (jm - grand) * (jm - grand))
        .sum::<f64>()
        * subjects as f64;
    let mut ss_resid = 0.0;
    for i in 0..n {
        for j in 0..m {
            for (l, &jm) in judge_means.iter().enumerate() {
                let r = tensor.score(i, j, l) - cell_means[[i, j]] - jm + grand;
                ss_resid += r * r;
            }
        }
    }
    if ss_resid == 0.0 {
        return Err(EstimatorError::ZeroResidual);
    }
    let df1 = (k - 1) as u64;
    let df2 = ((subjects - 1) * (k - 1)) as u64;
    let f = (ss_judge / df1 as f64) / (ss_resid / df2 as f64);
    Ok(FTestResult {
        f,
        df1,
        df2,
        p_value: f_upper_tail(f, df1, df2),
    })
}

/// Upper-tail probability of the F distribution:
/// `P(F_{df1, df2} > f) = I_{df2 / (df2 + df1 f)}(df2/2, df1/2)`.
///
/// Saturates at 0 and 1; accurate to about 1e-10 absolute for the degrees of
/// freedom a crossed design produces.
pub fn f_upper_tail(f: f64, df1: u64, df2: u64) -> f64 {
    debug_assert!(df1 >= 1 && df2 >= 1, "degrees of freedom must be >= 1");
    if f <= 0.0 {
        return 1.0;
    }
    if !f.is_finite() {
        return 0.0;
    }
    let d1 = df1 as f64;
    let d2 = df2 as f64;
    let x = d2 / (d2 + d1 * f);
    inc_beta(x, 0.5 * d2, 0.5 * d1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::{ScoreRecord, ScoreTensor};
    use approx::assert_abs_diff_eq;
    use ndarray::Array3;

    fn tensor_from_fn(
        n: usize,
        m: usize,
        k: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> ScoreTensor {
        let scores = Array3::from_shape_fn((n, m, k), |(i, j, l)| f(i, j, l));
        ScoreTensor::from_array(
            scores,
            (0..n).map(|i| format!("s{i}")).collect(),
            (0..k).map(|l| format!("j{l}")).collect(),
            f64::NEG_INFINITY,
            f64::INFINITY,
        )
        .unwrap()
    }

    #[test]
    fn constant_tensor_mean_squares_are_zero() {
        let t = tensor_from_fn(4, 3, 2, |_, _, _| 5.0);
        assert_eq!(residual_mean_square(&t).unwrap(), 0.0);
        assert_eq!(generation_mean_square(&t).unwrap(), 0.0);
        assert_eq!(scenario_mean_square(&t).unwrap(), 0.0);
    }

    #[test]
    fn pure_judge_offsets_leave_no_residual() {
        let offsets = [0.4, -0.1, -0.3, 0.2, -0.2];
        let t = tensor_from_fn(3, 2, 5, |_, _, l| 5.0 + offsets[l]);
        let ms_w = residual_mean_square(&t).unwrap();
        assert!(ms_w.abs() < 1e-28, "double-centering must cancel column effects, got {ms_w}");
    }

    #[test]
    fn identical_generations_zero_ms_g() {
        let t = tensor_from_fn(3, 4, 2, |i, _, l| i as f64 + 0.5 * l as f64);
        assert_abs_diff_eq!(generation_mean_square(&t).unwrap(), 0.0, epsilon = 1e-24);
    }

    #[test]
    fn two_scenario_hand_expansion() {
        // Two scenarios with constant scores a and b at m = K = 1:
        // MS_S = (a - b)^2 / 2.
        let (a, b) = (3.0, 8.0);
        let t = tensor_from_fn(2, 1, 1, |i, _, _| if i == 0 { a } else { b });
        assert_abs_diff_eq!(
            scenario_mean_square(&t).unwrap(),
            (a - b) * (a - b) / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn degenerate_designs_are_rejected() {
        let single_judge = tensor_from_fn(3, 2, 1, |i, j, _| (i + j) as f64);
        assert!(matches!(
            residual_mean_square(&single_judge),
            Err(EstimatorError::DegenerateDesign(_))
        ));
        let single_gen = tensor_from_fn(3, 1, 2, |i, _, l| (i + l) as f64);
        assert!(matches!(
            generation_mean_square(&single_gen),
            Err(EstimatorError::DegenerateDesign(_))
        ));
        assert!(matches!(
            judge_f_test(&tensor_from_fn(1, 1, 3, |_, _, l| l as f64)),
            Err(EstimatorError::DegenerateDesign(_))
        ));
    }

    #[test]
    fn noiseless_offsets_recover_exactly() {
        let offsets = [0.4, -0.1, -0.3, 0.2, -0.2];
        let t = tensor_from_fn(10, 2, 5, |_, _, l| 5.0 + offsets[l]);
        let c = estimate_components(&t, 5).unwrap();
        assert_abs_diff_eq!(c.mu_hat, 5.0, epsilon = 1e-12);
        for (g, o) in c.gamma_hat.iter().zip(offsets.iter()) {
            assert_abs_diff_eq!(*g, *o, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(c.sigma2_gamma, 0.068, epsilon = 1e-12);
        assert!(c.sigma2_eps.abs() < 1e-24);
        assert!(c.sigma2_alpha.abs() < 1e-20);
        assert!(c.sigma2_beta.unwrap().abs() < 1e-20);
    }

    #[test]
    fn constant_tensor_all_zero_components() {
        let t = tensor_from_fn(5, 2, 3, |_, _, _| 7.0);
        let c = estimate_components(&t, 3).unwrap();
        assert_eq!(c.mu_hat, 7.0);
        assert_eq!(c.sigma2_alpha, 0.0);
        assert_eq!(c.sigma2_beta, Some(0.0));
        assert_eq!(c.sigma2_gamma, 0.0);
        assert_eq!(c.sigma2_eps, 0.0);
        assert!(c.gamma_hat.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn partial_panel_rejected() {
        let t = tensor_from_fn(4, 2, 3, |i, j, l| (i * 7 + j * 3 + l) as f64);
        assert!(matches!(
            estimate_components(&t, 5),
            Err(EstimatorError::PartialPanel { observed: 3, pool: 5 })
        ));
    }

    #[test]
    fn m1_reports_indeterminate_beta() {
        let t = tensor_from_fn(6, 1, 3, |i, _, l| (i as f64) * 0.7 + (l as f64) * 0.1);
        let c = estimate_components(&t, 3).unwrap();
        assert_eq!(c.sigma2_beta, None);
        assert!(c.mean_squares.ms_g.is_none());
        assert!(c.sigma2_alpha > 0.0);
    }

    #[test]
    fn gamma_hat_sums_to_zero() {
        let t = tensor_from_fn(7, 3, 4, |i, j, l| ((i * 31 + j * 17 + l * 7) % 11) as f64);
        let c = estimate_components(&t, 4).unwrap();
        let sum: f64 = c.gamma_hat.iter().sum();
        assert!(sum.abs() < 1e-9, "gamma offsets must center, got {sum}");
    }

    #[test]
    fn f_test_degrees_of_freedom() {
        let t = tensor_from_fn(80, 10, 5, |i, j, l| {
            ((i * 13 + j * 5 + l * 3) % 7) as f64 + 0.01 * (i as f64)
        });
        let r = judge_f_test(&t).unwrap();
        assert_eq!((r.df1, r.df2), (4, 3196));
        let t2 = tensor_from_fn(50, 5, 5, |i, j, l| ((i + 2 * j + 3 * l) % 5) as f64 + 0.1);
        let r2 = judge_f_test(&t2).unwrap();
        assert_eq!((r2.df1, r2.df2), (4, 996));
    }

    #[test]
    fn f_test_zero_residual_rejected() {
        let t = tensor_from_fn(4, 2, 3, |_, _, _| 2.0);
        assert!(matches!(judge_f_test(&t), Err(EstimatorError::ZeroResidual)));
    }

    #[test]
    fn f_upper_tail_reference_values() {
        assert_eq!(f_upper_tail(0.0, 4, 100), 1.0);
        // Equal degrees of freedom put the median exactly at F = 1.
        assert_abs_diff_eq!(f_upper_tail(1.0, 10, 10), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f_upper_tail(1.0, 7, 7), 0.5, epsilon = 1e-12);
        // Cross-checked against an independent high-precision evaluation.
        assert_abs_diff_eq!(f_upper_tail(2.37, 4, 100), 0.05753760078651093, epsilon = 1e-10);
        assert_abs_diff_eq!(f_upper_tail(3.0, 5, 10), 0.06555756209384413, epsilon = 1e-10);
        assert_abs_diff_eq!(f_upper_tail(2.0, 4, 3196), 0.09185319627336604, epsilon = 1e-10);
        assert_abs_diff_eq!(f_upper_tail(0.5, 1, 1), 0.6081734479693929, epsilon = 1e-10);
        assert_abs_diff_eq!(f_upper_tail(5.0, 2, 7), 0.04479937088061744, epsilon = 1e-10);
        assert_abs_diff_eq!(f_upper_tail(1.1, 4, 3196), 0.35477133385689935, epsilon = 1e-10);
    }

    #[test]
    fn serializes_with_exact_field_names() {
        let rec = vec![
            ScoreRecord { scenario_id: "a".into(), generation_id: "g".into(), judge_id: "x".into(), score: 1.0 },
            ScoreRecord { scenario_id: "a".into(), generation_id: "g".into(), judge_id: "y".into(), score: 2.0 },
            ScoreRecord { scenario_id: "b".into(), generation_id: "g".into(), judge_id: "x".into(), score: 4.0 },
            ScoreRecord { scenario_id: "b".into(), generation_id: "g".into(), judge_id: "y".into(), score: 3.0 },
        ];
        let t = ScoreTensor::from_records(&rec, 0.0, 10.0).unwrap();
        let c = estimate_components(&t, 2).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        for key in [
            "mu_hat",
            "sigma2_alpha",
            "sigma2_beta",
            "sigma2_gamma",
            "sigma2_eps",
            "gamma_hat",
            "truncated",
            "mean_squares",
        ] {
            assert!(v.get(key).is_some(), "missing field {key}");
        }
        assert!(v["mean_squares"].get("MS_W").is_some());
        assert!(v["sigma2_beta"].is_null(), "m=1 fit must report null beta");
    }
}
