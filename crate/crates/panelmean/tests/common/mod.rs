//! Helpers shared across the integration test suites.
#![allow(dead_code)]

/// Reference per-observation component profiles used throughout the tests:
/// (sigma2_alpha, sigma2_beta, sigma2_gamma, sigma2_eps) for a 1-10-scale
/// panel study at n = 80 and a 1-5-scale study at n = 50, five judges each.
pub const GP_QWEN: [f64; 4] = [1.530, 0.266, 0.947, 1.486];
pub const DM_CLAUDE: [f64; 4] = [0.005, 0.002, 0.155, 0.061];

/// Centered judge-offset shapes consistent with the profiles above
/// (panel-relative means of the underlying studies; sums are zero to within
/// one ulp).
pub const GP_OFFSET_PATTERN: [f64; 5] = [0.89, 1.26, -1.04, 0.03, -1.14];
pub const DM_OFFSET_PATTERN: [f64; 5] = [0.782, 0.902, -0.158, -0.788, -0.738];

/// Rescales a centered offset pattern so its mean square equals
/// `sigma2_target`. Scaling preserves centering.
pub fn scaled_gamma(pattern: &[f64], sigma2_target: f64) -> Vec<f64> {
    let ms = pattern.iter().map(|g| g * g).sum::<f64>() / pattern.len() as f64;
    let s = (sigma2_target / ms).sqrt();
    pattern.iter().map(|g| g * s).collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Standard error of the sample variance without a normality assumption,
/// from the empirical fourth moment:
/// `Var(s^2) ~= (m4 - s^4 (R - 3) / (R - 1)) / R`.
pub fn variance_standard_error(values: &[f64]) -> f64 {
    let r = values.len() as f64;
    let m = mean(values);
    let s2 = sample_variance(values);
    let m4 = values.iter().map(|v| (v - m).powi(4)).sum::<f64>() / r;
    let var_s2 = (m4 - s2 * s2 * (r - 3.0) / (r - 1.0)) / r;
    var_s2.max(0.0).sqrt()
}

/// Two-sided Kolmogorov-Smirnov distance of a sample against Uniform(0, 1).
pub fn ks_uniform_statistic(p_values: &[f64]) -> f64 {
    let mut sorted = p_values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &p) in sorted.iter().enumerate() {
        let hi = (i as f64 + 1.0) / n - p;
        let lo = p - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Asymptotic two-sided KS critical value at significance `alpha`.
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}
