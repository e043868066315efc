//! Degree sweeps and geometric-rate fitting.

use std::f64::consts::LN_10;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::error::{Error, Result};
use crate::geometry::{CurveKind, ParametricCurve};
use crate::polysolver::{fit_laplace_poly, validation_nodes, HarmonicApproximant};
use crate::ratsolver::{companion_degree, fit_laplace_rational, select_poles, PoleSource};
use crate::rates::rational_rate_ie;

/// Below `100 ε` relative to the data scale an error is roundoff.
const ROUNDOFF_FLOOR: f64 = 100.0 * f64::EPSILON;

/// Minimum number of points for a slope fit.
pub const MIN_SLOPE_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    /// Schedule entry that failed.
    pub requested: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub method: Method,
    pub curve: String,
    pub data: String,
    pub pole_source: Option<PoleSource>,
    /// Total degree of each successful fit, strictly increasing.
    pub degrees: Vec<usize>,
    /// Held-out boundary sup error for each degree.
    pub errors: Vec<f64>,
    /// Schedule entry that produced each degree.
    pub requested: Vec<usize>,
    /// Per-degree geometric factor from the pre-plateau window.
    pub fitted_rate: Option<f64>,
    pub predicted_rate: Option<f64>,
    pub plateau_floor: f64,
    pub failures: Vec<SweepFailure>,
}

impl ConvergenceRecord {
    pub fn fitted_degree_per_digit(&self) -> Option<f64> {
        self.fitted_rate.filter(|&r| r > 0.0 && r < 1.0).map(|r| -LN_10 / r.ln())
    }

    pub fn predicted_degree_per_digit(&self) -> Option<f64> {
        self.predicted_rate.filter(|&r| r > 0.0 && r < 1.0).map(|r| -LN_10 / r.ln())
    }

    pub fn best_error(&self) -> Option<f64> {
        self.errors.iter().copied().reduce(f64::min)
    }

    /// Smallest degree whose error is at most `target`.
    pub fn degree_reaching(&self, target: f64) -> Option<usize> {
        self.degrees.iter().zip(&self.errors).find(|(_, &e)| e <= target).map(|(&d, _)| d)
    }

    /// Indices of the points used for the slope fit.
    pub fn window(&self) -> Vec<usize> {
        slope_window(&self.errors, self.plateau_floor)
    }

    /// `e₀ · predicted^(n − n₀)`, anchored at the first window point.
    pub fn predicted_line(&self) -> Vec<Option<f64>> {
        let Some(rate) = self.predicted_rate else {
            return vec![None; self.degrees.len()];
        };
        let anchor = self.window().first().copied().unwrap_or(0);
        if self.degrees.is_empty() {
            return Vec::new();
        }
        let (n0, e0) = (self.degrees[anchor] as f64, self.errors[anchor]);
        self.degrees.iter().map(|&n| Some(e0 * rate.powf(n as f64 - n0))).collect()
    }

    /// CSV with columns `degree,error,predicted_error_line` at full precision.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["degree", "error", "predicted_error_line"]).map_err(io)?;
        for ((d, e), p) in self.degrees.iter().zip(&self.errors).zip(self.predicted_line()) {
            let p = p.map(|v| format!("{v:.16e}")).unwrap_or_default();
            out.write_record([d.to_string(), format!("{e:.16e}"), p]).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Median of the last three errors (or of all, if fewer).
pub fn plateau_floor(errors: &[f64]) -> f64 {
    let mut tail: Vec<f64> = errors[errors.len().saturating_sub(3)..].to_vec();
    if tail.is_empty() {
        return 0.0;
    }
    tail.sort_by(f64::total_cmp);
    tail[tail.len() / 2]
}

fn slope_window(errors: &[f64], floor: f64) -> Vec<usize> {
    (0..errors.len()).filter(|&i| errors[i] > 10.0 * floor && errors[i].is_finite()).collect()
}

/// Least-squares line through `(degree, ln error)` over the points with
/// `error > 10·floor`; returns the per-degree factor `e^{slope}`, or `None`
/// with fewer than three such points.
pub fn fit_slope(degrees: &[usize], errors: &[f64], floor: f64) -> Option<f64> {
    if degrees.len() != errors.len() {
        return None;
    }
    let idx = slope_window(errors, floor);
    if idx.len() < MIN_SLOPE_POINTS {
        return None;
    }
    let k = idx.len() as f64;
    let xm = idx.iter().map(|&i| degrees[i] as f64).sum::<f64>() / k;
    let ym = idx.iter().map(|&i| errors[i].ln()).sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &i in &idx {
        let dx = degrees[i] as f64 - xm;
        sxy += dx * (errors[i].ln() - ym);
        sxx += dx * dx;
    }
    (sxx > 0.0).then(|| (sxy / sxx).exp())
}

/// One fit of the sweep at schedule entry `requested`.
pub fn fit_at(
    config: &ExperimentConfig,
    curve: &ParametricCurve,
    h: &dyn Fn(num_complex::Complex64) -> f64,
    requested: usize,
) -> Result<HarmonicApproximant> {
    let samples = |n: usize| config.points.max(config.oversampling * n);
    match config.method {
        Method::Poly => fit_laplace_poly(curve, &h, requested, samples(requested)),
        Method::Rational => {
            let sample = curve.sample(config.points)?;
            let basis = select_poles(curve, &sample, &h, config.tol, config.pole_source, requested)?;
            let npoly = companion_degree(basis.len());
            fit_laplace_rational(curve, &h, &basis, npoly, samples(npoly + basis.len()))
        }
    }
}

/// Runs the configured solver at each schedule entry and fits the
/// convergence rate. Numerical failures at individual degrees are recorded
/// and skipped; repeated total degrees keep the first fit.
pub fn run_sweep(config: &ExperimentConfig) -> Result<ConvergenceRecord> {
    config.validate()?;
    let curve = config.parse_curve()?;
    let data = config.parse_data()?;
    let h = move |z| data.eval(z);

    let mut degrees = Vec::new();
    let mut errors = Vec::new();
    let mut requested = Vec::new();
    let mut failures = Vec::new();
    for &req in config.degrees.degrees() {
        match fit_at(config, &curve, &h, req) {
            Ok(fit) => {
                let d = fit.degree();
                if degrees.contains(&d) {
                    continue;
                }
                degrees.push(d);
                errors.push(fit.boundary_error.max(f64::MIN_POSITIVE));
                requested.push(req);
            }
            Err(e) if e.is_config() && !matches!(e, Error::TooFewSamples { .. }) => return Err(e),
            Err(e) => failures.push(SweepFailure { requested: req, message: e.to_string() }),
        }
    }
    let mut order: Vec<usize> = (0..degrees.len()).collect();
    order.sort_by_key(|&i| degrees[i]);
    let degrees: Vec<usize> = order.iter().map(|&i| degrees[i]).collect();
    let errors: Vec<f64> = order.iter().map(|&i| errors[i]).collect();
    let requested: Vec<usize> = order.iter().map(|&i| requested[i]).collect();

    let scale = validation_nodes(&curve, 256).iter().map(|&z| h(z).abs()).fold(0.0, f64::max).max(1.0);
    let floor = plateau_floor(&errors).max(ROUNDOFF_FLOOR * scale);
    let fitted_rate = fit_slope(&degrees, &errors, floor);
    let predicted_rate = match curve.kind() {
        CurveKind::InvertedEllipse { rho } => {
            let p = rational_rate_ie(*rho)?;
            Some(match config.method {
                Method::Poly => p.poly_factor,
                Method::Rational => p.rat_factor,
            })
        }
        _ => None,
    };
    Ok(ConvergenceRecord {
        method: config.method,
        curve: config.curve.clone(),
        data: config.data.clone(),
        pole_source: (config.method == Method::Rational).then_some(config.pole_source),
        degrees,
        errors,
        requested,
        fitted_rate,
        predicted_rate,
        plateau_floor: floor,
        failures,
    })
}
