//! Log-gamma and the regularized incomplete beta function.
//!
//! Dependency-free numerics backing the F-distribution tail probability.
//! The incomplete beta uses the modified Lentz continued fraction with the
//! usual symmetry switch, which stays accurate for the large denominator
//! degrees of freedom that crossed designs produce (df up to ~10^4).

/// Natural log of the gamma function for x > 0 (Lanczos, g = 7, 9 terms).
#[allow(clippy::excessive_precision)]
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0, "ln_gamma requires x > 0");
    if x < 0.5 {
        // Reflection keeps accuracy near zero.
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = 0.999_999_999_999_809_93;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
pub fn inc_beta(x: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0, "inc_beta requires a, b > 0");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // Symmetry switch keeps the continued fraction in its fast-converging
    // region.
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - inc_beta(1.0 - x, b, a);
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    let cf = beta_continued_fraction(x, a, b);
    (ln_front.exp() * cf / a).clamp(0.0, 1.0)
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Modified Lentz evaluation of the continued fraction for I_x(a, b).
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TOL: f64 = 1e-12;
    const TINY: f64 = 1e-30;
    const MAX_ITER: usize = 1_000;

    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let mf = m as f64;
        // Even step.
        let numer = mf * (b - mf) * x / ((a + 2.0 * mf - 1.0) * (a + 2.0 * mf));
        d = 1.0 + numer * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + numer / c;
        if c.abs() < TINY {
            c = TINY;
        }
        h *= d * c;
        // Odd step.
        let numer = -(a + mf) * (a + b + mf) * x / ((a + 2.0 * mf) * (a + 2.0 * mf + 1.0));
        d = 1.0 + numer * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = 1.0 + numer / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < TOL {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_reference_values() {
        // Reference values computed with an independent high-precision
        // implementation.
        assert_abs_diff_eq!(ln_gamma(0.5), 0.5723649429247, epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma(5.0), 3.1780538303479458, epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma(12.3), 18.238983407092245, epsilon = 1e-11);
        assert_abs_diff_eq!(ln_gamma(1598.0), 10186.890722487859, epsilon = 1e-7);
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn inc_beta_reference_values() {
        assert_abs_diff_eq!(inc_beta(0.5, 2.0, 3.0), 0.6875, epsilon = 1e-12);
        assert_abs_diff_eq!(inc_beta(0.3, 0.5, 0.5), 0.36901011956554536, epsilon = 1e-11);
        assert_abs_diff_eq!(inc_beta(0.9, 30.0, 4.0), 0.5769436641256929, epsilon = 1e-11);
    }

    #[test]
    fn inc_beta_bounds_and_symmetry() {
        assert_eq!(inc_beta(0.0, 2.0, 2.0), 0.0);
        assert_eq!(inc_beta(1.0, 2.0, 2.0), 1.0);
        // I_{1/2}(a, a) = 1/2 for any a.
        for a in [0.5, 1.0, 3.5, 50.0, 799.0] {
            assert_abs_diff_eq!(inc_beta(0.5, a, a), 0.5, epsilon = 1e-12);
        }
        // Complement identity.
        for (x, a, b) in [(0.2, 3.0, 7.0), (0.77, 12.0, 2.5), (0.5, 1598.0, 2.0)] {
            let lhs = inc_beta(x, a, b);
            let rhs = 1.0 - inc_beta(1.0 - x, b, a);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }
}
