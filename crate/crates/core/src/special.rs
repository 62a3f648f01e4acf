//! Special functions backing the Gamma law: log-gamma and the regularized
//! lower incomplete gamma function P(a, x).

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
///
/// Power series for x < a + 1, modified Lentz continued fraction for Q(a, x)
/// otherwise. Both are summed to relative precision `EPS`.
pub(crate) fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x.is_nan() || a.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x < a + 1.0 {
        lower_series(a, x)
    } else {
        1.0 - upper_continued_fraction(a, x)
    }
}

/// ln of the common prefactor x^a e^{-x} / Gamma(a).
fn ln_prefactor(a: f64, x: f64) -> f64 {
    a * x.ln() - x - ln_gamma(a)
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln() + ln_prefactor(a, x)).exp().min(1.0)
}

fn upper_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (ln_prefactor(a, x).exp() * h).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_special_case() {
        for x in [0.1f64, 0.5, 1.0, 2.0, 5.0, 30.0] {
            let expected = 1.0 - (-x).exp();
            assert!(
                (regularized_gamma_p(1.0, x) - expected).abs() < 1e-15,
                "x={x}"
            );
        }
    }

    #[test]
    fn half_integer_shape_matches_erf() {
        // P(1/2, x) = erf(sqrt(x))
        for &x in &[0.01, 0.3, 1.0, 1.5, 4.0, 12.0] {
            let expected = libm::erf(f64::sqrt(x));
            assert!(
                (regularized_gamma_p(0.5, x) - expected).abs() < 1e-14,
                "x={x}"
            );
        }
    }

    #[test]
    fn integer_shape_matches_poisson_tail() {
        // P(n, x) = 1 - e^{-x} sum_{k<n} x^k / k!
        let n = 5;
        for x in [0.5f64, 3.0, 5.9, 6.1, 20.0] {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..n {
                term *= x / k as f64;
                sum += term;
            }
            let expected = 1.0 - (-x).exp() * sum;
            assert!(
                (regularized_gamma_p(n as f64, x) - expected).abs() < 1e-14,
                "x={x}"
            );
        }
    }

    #[test]
    fn boundary_values() {
        assert_eq!(regularized_gamma_p(3.0, 0.0), 0.0);
        assert_eq!(regularized_gamma_p(3.0, f64::INFINITY), 1.0);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-14);
    }
}
