//! Analyticity radii and polynomial degree-per-digit costs for inverted
//! ellipses, with the published reference values.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rates::{analyticity_excess_ie, degree_per_digit_from_excess, round_sig};

/// `(ρ, R − 1, degree per digit)` as published, at two significant figures.
pub const REFERENCE: [(f64, f64, f64); 10] = [
    (2.0, 0.12, 20.0),
    (1.9, 0.089, 27.0),
    (1.8, 0.062, 38.0),
    (1.7, 0.038, 60.0),
    (1.6, 0.021, 110.0),
    (1.5, 0.0091, 250.0),
    (1.4, 0.0026, 880.0),
    (1.3, 0.00033, 7000.0),
    (1.2, 0.0000053, 430_000.0),
    (1.1, 0.000000000023, 100_000_000_000.0),
];

pub fn default_rhos() -> Vec<f64> {
    REFERENCE.iter().map(|r| r.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub r_excess: f64,
    pub degree_per_digit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub rho: f64,
    /// `R − 1` at full precision.
    pub r_excess: f64,
    pub degree_per_digit: f64,
    /// `R − 1` rounded to two significant figures.
    pub r_excess_2sf: f64,
    pub degree_per_digit_2sf: f64,
    pub reference: Option<Reference>,
    /// Whether the rounded `R − 1` equals the reference.
    pub r_matches: Option<bool>,
    pub degree_matches: Option<bool>,
}

impl Table1Row {
    /// `R` as a decimal string: `1.` followed by `R − 1` at two significant
    /// figures, as the published table writes it.
    pub fn r_display(&self) -> String {
        format_r(self.r_excess_2sf)
    }
}

pub fn format_r(excess_2sf: f64) -> String {
    if excess_2sf <= 0.0 {
        return "1".into();
    }
    let decimals = (1 - excess_2sf.log10().floor() as i32).max(0) as usize;
    format!("{:.*}", decimals, 1.0 + excess_2sf)
}

fn reference_for(rho: f64) -> Option<Reference> {
    REFERENCE
        .iter()
        .find(|r| (r.0 - rho).abs() < 1e-12)
        .map(|r| Reference { r_excess: r.1, degree_per_digit: r.2 })
}

fn same_2sf(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs()
}

pub fn table1(rhos: &[f64]) -> Result<Vec<Table1Row>> {
    rhos.iter()
        .map(|&rho| {
            let r_excess = analyticity_excess_ie(rho)?;
            let dpd = degree_per_digit_from_excess(r_excess);
            let r2 = round_sig(r_excess, 2);
            let d2 = round_sig(dpd, 2);
            let reference = reference_for(rho);
            Ok(Table1Row {
                rho,
                r_excess,
                degree_per_digit: dpd,
                r_excess_2sf: r2,
                degree_per_digit_2sf: d2,
                reference,
                r_matches: reference.map(|r| same_2sf(r2, r.r_excess)),
                degree_matches: reference.map(|r| same_2sf(d2, r.degree_per_digit)),
            })
        })
        .collect()
}
