//! Constant relative risk-aversion utility.

use crate::error::{Error, Result};

use super::gamble::Outcome;

/// `v^(1-ω)/(1-ω)`, or `ln v` at `ω = 1`.
pub fn crra_utility(v: f64, omega: f64) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::NonPositivePayoff(v));
    }
    if !omega.is_finite() {
        return Err(Error::NonFinite("risk aversion"));
    }
    if omega == 1.0 {
        Ok(v.ln())
    } else {
        let t = 1.0 - omega;
        Ok(v.powf(t) / t)
    }
}

/// Expected CRRA utility of one option.
pub fn option_utility(option: &[Outcome], omega: f64) -> Result<f64> {
    option
        .iter()
        .map(|o| crra_utility(o.v, omega).map(|u| o.p * u))
        .sum()
}

/// Enough terms that `0.5^k/(k+1)!` is below double precision.
const SERIES_TERMS: usize = 18;

const fn series_coefficients(derivative: bool) -> [f64; SERIES_TERMS] {
    // c_k = 1/(k+1)!  or  (k+1)/(k+2)!
    let mut out = [0.0; SERIES_TERMS];
    let mut fact = 1.0; // (k+1)!
    let mut k = 0;
    while k < SERIES_TERMS {
        fact *= (k + 1) as f64;
        out[k] = if derivative {
            (k + 1) as f64 / (fact * (k + 2) as f64)
        } else {
            1.0 / fact
        };
        k += 1;
    }
    out
}

const SERIES_U: [f64; SERIES_TERMS] = series_coefficients(false);
const SERIES_D: [f64; SERIES_TERMS] = series_coefficients(true);

/// `(v^(1-ω) - 1)/(1-ω)` and its derivative in ω, given `ln v`.
///
/// This differs from [`crra_utility`] by `1/(1-ω)`, a constant that cancels
/// between two options whose probabilities each sum to one, so utility gaps
/// are the same under both forms. Unlike the plain form it is continuous at
/// `ω = 1`, which keeps gaps and gradients accurate there.
#[inline]
pub(crate) fn shifted_utility(ln_v: f64, omega: f64) -> (f64, f64) {
    let t = 1.0 - omega;
    let x = t * ln_v;
    if x.abs() < 0.5 {
        // u = L Σ x^k/(k+1)!,  du/dt = L² Σ (k+1) x^k/(k+2)!
        let mut sum_u = SERIES_U[SERIES_TERMS - 1];
        let mut sum_d = SERIES_D[SERIES_TERMS - 1];
        for k in (0..SERIES_TERMS - 1).rev() {
            sum_u = sum_u * x + SERIES_U[k];
            sum_d = sum_d * x + SERIES_D[k];
        }
        (ln_v * sum_u, -(ln_v * ln_v * sum_d))
    } else {
        // |x| ≥ 0.5, so e^x - 1 loses no precision
        let ex = x.exp();
        let em1 = ex - 1.0;
        let u = em1 / t;
        let du_dt = (x * ex - em1) / (t * t);
        (u, -du_dt)
    }
}
