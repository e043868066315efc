//! Closed-form convergence rates for the inverted ellipse.
//!
//! With `a = 4 ln ρ` the polynomial analyticity radius is a ratio of theta
//! sums, `R = Σ_k e^{−ak²} / Σ_k e^{−a(k+½)²}`. For ρ close to 1 the excess
//! `R − 1` drops below double-precision resolution of `R` itself, so it is
//! also available separately through the Poisson-dual series
//! `R − 1 = 4(q + q⁹ + q²⁵ + …)/(1 − 2q + 2q⁴ − 2q⁹ + …)`, `q = e^{−π²/a}`,
//! which has no cancellation.

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `A = 4 e^{−π²/8}`, the prefactor of `R − 1` in terms of `ρ − 1`.
pub fn asymptotic_prefactor() -> f64 {
    4.0 * (-PI * PI / 8.0).exp()
}

const SERIES_RTOL: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 10_000;

/// Upper end (exclusive) of the ρ range for the finger and crowding estimates.
pub const FINGER_RHO_MAX: f64 = 1.225;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePrediction {
    pub r: f64,
    /// `R − 1`, accurate even where `r` rounds to 1.
    pub r_excess: f64,
    pub r_star: f64,
    pub poly_factor: f64,
    pub rat_factor: f64,
    pub degree_per_digit_poly: f64,
    pub degree_per_digit_rat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRadius {
    /// `1 + 4e^{−π²/(4 ln ρ)}`.
    pub log_form: f64,
    /// `1 + A e^{−π²/(4(ρ−1))}`.
    pub eps_form: f64,
    pub log_form_excess: f64,
    pub eps_form_excess: f64,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("rho must be > 1, got {rho}")))
    }
}

/// `Σ_{k ≥ start} ρ^{−(2k + offset)²}` truncated at relative `1e−18`.
fn one_sided_sum(rho: f64, offset: u64, head: f64) -> Result<f64> {
    let ln_rho = rho.ln();
    let mut sum = head;
    let start = if offset == 0 { 1 } else { 0 };
    for k in start..(start + SERIES_MAX_TERMS as u64) {
        let e = (2 * k + offset) as f64;
        let term = (-e * e * ln_rho).exp();
        sum += term;
        if term < SERIES_RTOL * sum {
            return Ok(sum);
        }
    }
    Err(Error::Unconverged(SERIES_MAX_TERMS))
}

/// `R = (½ + ρ^{−2²} + ρ^{−4²} + …)/(ρ^{−1²} + ρ^{−3²} + …)`.
pub fn analyticity_radius_ie(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let num = one_sided_sum(rho, 0, 0.5)?;
    let den = one_sided_sum(rho, 1, 0.0)?;
    Ok(num / den)
}

/// `R − 1` without cancellation.
pub fn analyticity_excess_ie(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let a = 4.0 * rho.ln();
    let log_q = -PI * PI / a;
    if log_q > -0.7 {
        // q close to 1 (ρ ≳ 30): the direct series is fast and R − 1 is large.
        return Ok(analyticity_radius_ie(rho)? - 1.0);
    }
    let mut odd = 0.0;
    let mut alt = 1.0;
    for k in 1..=SERIES_MAX_TERMS {
        let kk = (k * k) as f64;
        let term = (kk * log_q).exp();
        alt += if k % 2 == 1 { -2.0 * term } else { 2.0 * term };
        if k % 2 == 1 {
            odd += term;
        }
        if term < SERIES_RTOL * odd.max(f64::MIN_POSITIVE) {
            return Ok(4.0 * odd / alt);
        }
        if term == 0.0 {
            return Ok(4.0 * odd / alt);
        }
    }
    Err(Error::Unconverged(SERIES_MAX_TERMS))
}

/// Independent evaluation via the bilateral sums `Σ_{k∈ℤ} e^{−ak²}` and
/// `Σ_{k∈ℤ} e^{−a(k+½)²}`, `a = 4 ln ρ`.
pub fn theta_ratio_oracle(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let a = 4.0 * rho.ln();
    let bilateral = |shift: f64| -> Result<f64> {
        // Sum from the smallest terms inward so the large ones come last.
        let kmax = (SERIES_MAX_TERMS as i64).min(((42.0 / a).sqrt().ceil() as i64) + 2);
        if (kmax as f64) * (kmax as f64) * a < 41.0 {
            return Err(Error::Unconverged(SERIES_MAX_TERMS));
        }
        // Indices k and −k−1 for k = kmax..0 cover −kmax−1..kmax once each.
        let mut s = 0.0;
        for k in (0..=kmax).rev() {
            for kk in [k, -k - 1] {
                let x = kk as f64 + shift;
                s += (-a * x * x).exp();
            }
        }
        Ok(s)
    };
    Ok(bilateral(0.0)? / bilateral(0.5)?)
}

/// Both asymptotic forms of `R` as `ρ → 1`.
pub fn analyticity_radius_asymptotic(rho: f64) -> Result<AsymptoticRadius> {
    check_rho(rho)?;
    let log_form_excess = 4.0 * (-PI * PI / (4.0 * rho.ln())).exp();
    let eps_form_excess = asymptotic_prefactor() * (-PI * PI / (4.0 * (rho - 1.0))).exp();
    Ok(AsymptoticRadius {
        log_form: 1.0 + log_form_excess,
        eps_form: 1.0 + eps_form_excess,
        log_form_excess,
        eps_form_excess,
    })
}

/// Preimage of the focus `z = 1` on the real axis under the exterior map,
/// the reciprocal of [`analyticity_radius_ie`].
pub fn focus_image(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let num = one_sided_sum(rho, 1, 0.0)?;
    let den = one_sided_sum(rho, 0, 0.5)?;
    Ok(num / den)
}

/// `ln 10 / ln R`; infinite for `R ≤ 1`.
pub fn degree_per_digit(r: f64) -> f64 {
    if r > 1.0 {
        LN_10 / r.ln()
    } else {
        f64::INFINITY
    }
}

/// `ln 10 / ln(1 + excess)`, for use with [`analyticity_excess_ie`].
pub fn degree_per_digit_from_excess(excess: f64) -> f64 {
    if excess > 0.0 {
        LN_10 / excess.ln_1p()
    } else {
        f64::INFINITY
    }
}

/// `(ln 10 / A) e^{(π²/4)/(ρ−1)}`.
pub fn poly_cost_asymptotic(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(LN_10 / asymptotic_prefactor() * (PI * PI / 4.0 / (rho - 1.0)).exp())
}

/// Polynomial and rational rate predictions for the inverted ellipse; the
/// rational modulus is reported at its supremum `R* = ρ`.
pub fn rational_rate_ie(rho: f64) -> Result<RatePrediction> {
    let r = analyticity_radius_ie(rho)?;
    let r_excess = analyticity_excess_ie(rho)?;
    Ok(RatePrediction {
        r,
        r_excess,
        r_star: rho,
        poly_factor: 1.0 / r,
        rat_factor: 1.0 / (rho * rho),
        degree_per_digit_poly: degree_per_digit_from_excess(r_excess),
        degree_per_digit_rat: LN_10 / (2.0 * rho.ln()),
    })
}

fn check_finger_range(rho: f64) -> Result<()> {
    if rho > 1.0 && rho < FINGER_RHO_MAX {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("finger estimates need 1 < rho < {FINGER_RHO_MAX}, got {rho}")))
    }
}

/// Length-to-width ratio `1/(8(ρ−1))` of the inlets.
pub fn finger_length_ie(rho: f64) -> Result<f64> {
    check_finger_range(rho)?;
    Ok(1.0 / (8.0 * (rho - 1.0)))
}

/// Map distortion `e^{πL}` across a finger of length-to-width ratio `L`.
pub fn crowding_magnitude(l: f64) -> f64 {
    (PI * l).exp()
}

/// `(e^{−π/(8ε)}, e^{−π²/(4ε)})` with `ε = ρ − 1`: the crowding bound and the
/// sharp rate for `R − 1`.
pub fn crowding_bounds_ie(rho: f64) -> Result<(f64, f64)> {
    check_finger_range(rho)?;
    let eps = rho - 1.0;
    Ok(((-PI / (8.0 * eps)).exp(), (-PI * PI / (4.0 * eps)).exp()))
}

/// Rounds to `sig` significant figures.
pub fn round_sig(x: f64, sig: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let p = sig as i32 - 1 - mag;
    if p >= 0 {
        let f = 10f64.powi(p);
        (x * f).round() / f
    } else {
        let f = 10f64.powi(-p);
        (x / f).round() * f
    }
}
