use crate::error::{Error, Result};

const MAX_ITERS: usize = 1000;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularised upper incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        (1.0 - lower_series(a, x)).clamp(0.0, 1.0)
    } else {
        upper_continued_fraction(a, x).clamp(0.0, 1.0)
    }
}

fn prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

/// Series for the regularised lower gamma `P(a, x)`.
fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITERS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * prefactor(a, x)
}

/// Modified Lentz evaluation of the continued fraction for `Q(a, x)`.
fn upper_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITERS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    prefactor(a, x) * h
}

/// Upper tail `P[chi^2_k > x]`.
pub fn chi2_sf(x: f64, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidInput("chi-squared degrees of freedom must be >= 1".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidInput(format!(
            "chi-squared statistic must be non-negative, got {x}"
        )));
    }
    Ok(regularized_gamma_q(0.5 * k as f64, 0.5 * x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_statistic_has_unit_tail() {
        for k in 1..30 {
            assert_eq!(chi2_sf(0.0, k).unwrap(), 1.0);
        }
    }

    #[test]
    fn five_percent_critical_value() {
        assert!((chi2_sf(3.8415, 1).unwrap() - 0.05).abs() < 1e-4);
        // 18.307 is the tabulated 95% quantile for 10 df.
        assert!((chi2_sf(18.307, 10).unwrap() - 0.05).abs() < 1e-4);
    }

    #[test]
    fn far_tail_vanishes() {
        assert!(chi2_sf(1e6, 1).unwrap() < 1e-12);
        assert_eq!(chi2_sf(f64::INFINITY, 3).unwrap(), 0.0);
    }

    #[test]
    fn closed_forms() {
        // k = 2: exp(-x / 2).
        for &x in &[0.1, 1.0, 5.0, 20.0, 60.0] {
            assert!((chi2_sf(x, 2).unwrap() - (-x / 2.0).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_invalid_arguments() {
        assert!(chi2_sf(-0.1, 1).is_err());
        assert!(chi2_sf(f64::NAN, 1).is_err());
        assert!(chi2_sf(1.0, 0).is_err());
    }

    #[test]
    fn strictly_decreasing_on_grid() {
        for k in 1..=20 {
            let mut prev = chi2_sf(0.0, k).unwrap();
            for i in 1..=100 {
                let cur = chi2_sf(0.5 * i as f64, k).unwrap();
                assert!(cur < prev, "k={k} x={}", 0.5 * i as f64);
                prev = cur;
            }
        }
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..20u32 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12);
            fact *= n as f64;
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }
}
