//! Beta function, beta density and the regularised incomplete beta.

use crate::error::{Error, Result};

const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const CF_MAX_TERMS: usize = 10_000;

/// `ln B(a, b) = lnΓ(a) + lnΓ(b) − lnΓ(a + b)`.
pub fn log_beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::DomainError("beta function needs a > 0 and b > 0"));
    }
    Ok(ln_beta_unchecked(a, b))
}

#[inline]
pub(crate) fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Density of Beta(a, b) at `x`; boundary points return the limit value.
pub(crate) fn pdf_unchecked(x: f64, a: f64, b: f64) -> f64 {
    // x^(a-1) at x = 0 with a = 1 is 1 by continuity; likewise (1-x)^(b-1)
    let left = if a == 1.0 {
        0.0
    } else if x == 0.0 {
        return if a > 1.0 { 0.0 } else { f64::INFINITY };
    } else {
        (a - 1.0) * libm::log(x)
    };
    let right = if b == 1.0 {
        0.0
    } else if x == 1.0 {
        return if b > 1.0 { 0.0 } else { f64::INFINITY };
    } else {
        (b - 1.0) * libm::log1p(-x)
    };
    libm::exp(left + right - ln_beta_unchecked(a, b))
}

/// Lentz evaluation of the continued fraction for `I_x(a, b)`.
fn continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularised incomplete beta `I_x(a, b)` for `a, b > 0`, `x` in `[0, 1]`.
pub(crate) fn inc_beta_unchecked(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let log_front = a * libm::log(x) + b * libm::log1p(-x) - ln_beta_unchecked(a, b);
    let front = libm::exp(log_front);
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * continued_fraction(a, b, x) / a
    } else {
        1.0 - front * continued_fraction(b, a, 1.0 - x) / b
    };
    value.clamp(0.0, 1.0)
}

pub(crate) fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::DomainError("x must lie in [0, 1]"))
    }
}
