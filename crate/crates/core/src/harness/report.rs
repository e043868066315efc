//! Structured reports for the Schwarz-function and rate experiments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ParametricCurve;
use crate::rates::{
    analyticity_radius_asymptotic, crowding_bounds_ie, crowding_magnitude, finger_length_ie, focus_image,
    poly_cost_asymptotic, rational_rate_ie, RatePrediction,
};
use crate::schwarz::{schwarz_fit, BranchEstimate, PoleString};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzReport {
    pub curve: String,
    pub points: usize,
    pub tol: f64,
    pub aaa_degree: usize,
    /// Max `|r(z) − conj z|` on the samples.
    pub residual: f64,
    /// `residual / max|z|`.
    pub relative_residual: f64,
    pub converged: bool,
    pub interior_poles: Vec<Complex64>,
    pub exterior_poles: Vec<Complex64>,
    pub strings: Vec<PoleString>,
    pub branch_estimates: Vec<BranchEstimate>,
}

impl SchwarzReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numerical(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

pub fn schwarz_report(curve_spec: &str, points: usize, tol: f64) -> Result<SchwarzReport> {
    let curve: ParametricCurve = curve_spec.parse()?;
    let s = schwarz_fit(&curve, points, tol)?;
    Ok(SchwarzReport {
        curve: curve.to_string(),
        points,
        tol,
        aaa_degree: s.rational.degree(),
        residual: s.residual,
        relative_residual: s.residual / s.scale,
        converged: s.converged,
        interior_poles: s.interior_poles,
        exterior_poles: s.exterior_poles,
        strings: s.strings,
        branch_estimates: s.branch_estimates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesReport {
    pub rho: f64,
    pub prediction: RatePrediction,
    pub focus_image: f64,
    /// `R − 1` from `4e^{−π²/(4 ln ρ)}`.
    pub asymptotic_excess_log: f64,
    /// `R − 1` from `A e^{−π²/(4(ρ−1))}`.
    pub asymptotic_excess_eps: f64,
    pub poly_cost_asymptotic: f64,
    /// Present for `1 < ρ < 1.225`.
    pub finger_length: Option<f64>,
    pub crowding_magnitude: Option<f64>,
    /// `(e^{−π/(8ε)}, e^{−π²/(4ε)})`.
    pub crowding_bounds: Option<(f64, f64)>,
}

pub fn rates_report(rho: f64) -> Result<RatesReport> {
    let prediction = rational_rate_ie(rho)?;
    let asym = analyticity_radius_asymptotic(rho)?;
    let finger_length = finger_length_ie(rho).ok();
    Ok(RatesReport {
        rho,
        prediction,
        focus_image: focus_image(rho)?,
        asymptotic_excess_log: asym.log_form_excess,
        asymptotic_excess_eps: asym.eps_form_excess,
        poly_cost_asymptotic: poly_cost_asymptotic(rho)?,
        finger_length,
        crowding_magnitude: finger_length.map(crowding_magnitude),
        crowding_bounds: crowding_bounds_ie(rho).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schwarz::Side;

    #[test]
    fn inverted_ellipse_report() {
        let r = schwarz_report("iell:1.5", 2000, 1e-10).unwrap();
        let ext: Vec<_> = r.branch_estimates.iter().filter(|e| e.side == Side::Exterior).collect();
        assert!(!ext.is_empty());
        for e in ext {
            assert!((e.location - 1.0).norm().min((e.location + 1.0).norm()) < 0.05);
        }
        let back = SchwarzReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn circle_report_has_no_strings() {
        let r = schwarz_report("trig:0,0,1", 600, 1e-12).unwrap();
        assert!(r.strings.is_empty() && r.branch_estimates.is_empty());
        assert_eq!(r.interior_poles.len(), 1);
    }

    #[test]
    fn rates_report_fields() {
        let r = rates_report(1.125).unwrap();
        assert!((r.finger_length.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.crowding_bounds.is_some());
        let r = rates_report(1.3).unwrap();
        assert!(r.finger_length.is_none() && r.crowding_bounds.is_none());
        assert!((r.prediction.degree_per_digit_rat - 4.39).abs() < 0.01);
        assert!(rates_report(0.9).unwrap_err().is_config());
    }
}
