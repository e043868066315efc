//! Rational Laplace solver (AAA least squares).
//!
//! Candidate poles come from an AAA fit on the boundary (of the data itself,
//! or of `conj z`, whose singularities are the ones that govern the rate), or
//! from a fixed clustering law on the known branch cuts of the inverted
//! ellipse. Poles inside the domain are thrown away; the rest become columns
//! `Re 1/(z − π)`, `−Im 1/(z − π)` next to an Arnoldi polynomial part.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aaa::aaa_fit;
use crate::error::{Error, Result};
use crate::geometry::{winding_number, BoundarySample, CurveKind, ParametricCurve};
use crate::polysolver::{fit_harmonic, HarmonicApproximant};

/// Exponential clustering rate of the branch-cut pole law.
pub const DEFAULT_SIGMA: f64 = 4.0;
/// Distance scale of the branch-cut pole law.
pub const DEFAULT_DEPTH: f64 = 1.0;

/// Residues below this (relative to the boundary scale) mark a pole as a
/// probable Froissart doublet.
const DOUBLET_RESIDUE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleSource {
    FromData,
    FromSchwarz,
    ExactBranchCut,
}

impl fmt::Display for PoleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoleSource::FromData => "from_data",
            PoleSource::FromSchwarz => "from_schwarz",
            PoleSource::ExactBranchCut => "exact_branch_cut",
        })
    }
}

impl FromStr for PoleSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "from_data" | "data" => Ok(PoleSource::FromData),
            "from_schwarz" | "schwarz" => Ok(PoleSource::FromSchwarz),
            "exact_branch_cut" | "branch_cut" => Ok(PoleSource::ExactBranchCut),
            other => Err(Error::Config(format!("unknown pole source '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleBasis {
    /// All outside the curve.
    pub poles: Vec<Complex64>,
    pub source: PoleSource,
    /// Number of candidate poles dropped for lying inside the curve.
    pub discarded: usize,
    /// Indices into `poles` whose AAA residue is negligible.
    pub doublets: Vec<usize>,
    /// Degree of the AAA fit the poles came from, if any.
    pub aaa_degree: Option<usize>,
    pub warning: Option<String>,
}

impl PoleBasis {
    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

/// Polynomial degree paired with `n_poles` poles.
pub fn companion_degree(n_poles: usize) -> usize {
    (n_poles / 2).max(10)
}

/// `±(1 + d·e^{−σk/√n})`, `k = 0..n−1`: `2n` real poles accumulating at `±1`.
pub fn branch_cut_poles(n: usize, sigma: f64, depth: f64) -> Vec<Complex64> {
    let sq = (n as f64).sqrt();
    let right: Vec<Complex64> =
        (0..n).map(|k| Complex64::new(1.0 + depth * (-sigma * k as f64 / sq).exp(), 0.0)).collect();
    right.iter().copied().chain(right.iter().map(|p| -p)).collect()
}

/// Whether `z` is inside the closed polygon `nodes` or inside the curve as
/// judged on a denser polygon. Chords of the sample polygon cut slightly
/// inside convex stretches of the curve, so both are consulted.
pub fn is_interior(curve: &ParametricCurve, nodes: &[Complex64], z: Complex64) -> bool {
    winding_number(nodes, z) != 0 || curve.contains(z)
}

/// Candidate poles from `source`, with those inside the curve removed.
///
/// `budget` is the maximal AAA degree for the data-driven sources and the
/// number of poles per side for [`PoleSource::ExactBranchCut`].
pub fn select_poles<H: Fn(Complex64) -> f64>(
    curve: &ParametricCurve,
    sample: &BoundarySample,
    h: &H,
    tol: f64,
    source: PoleSource,
    budget: usize,
) -> Result<PoleBasis> {
    let z = &sample.nodes;
    let (candidates, aaa_degree, residues) = match source {
        PoleSource::FromData | PoleSource::FromSchwarz => {
            let f: Vec<Complex64> = if source == PoleSource::FromData {
                z.iter().map(|&zk| Complex64::new(h(zk), 0.0)).collect()
            } else {
                z.iter().map(|zk| zk.conj()).collect()
            };
            let r = aaa_fit(z, &f, tol, budget)?;
            let poles = r.poles()?;
            let residues: Vec<f64> = poles.iter().map(|&p| r.residue(p).norm()).collect();
            (poles, Some(r.degree()), Some(residues))
        }
        PoleSource::ExactBranchCut => {
            if !matches!(curve.kind(), CurveKind::InvertedEllipse { .. }) {
                return Err(Error::NotAvailable("branch-cut poles are only known for inverted ellipses"));
            }
            (branch_cut_poles(budget, DEFAULT_SIGMA, DEFAULT_DEPTH), None, None)
        }
    };

    let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut poles = Vec::new();
    let mut doublets = Vec::new();
    let mut discarded = 0;
    for (i, &p) in candidates.iter().enumerate() {
        if !(p.re.is_finite() && p.im.is_finite()) || is_interior(curve, z, p) {
            discarded += 1;
            continue;
        }
        if let Some(res) = &residues {
            if res[i] < DOUBLET_RESIDUE * scale {
                doublets.push(poles.len());
            }
        }
        poles.push(p);
    }
    let warning = (poles.is_empty() && !candidates.is_empty())
        .then(|| format!("all {} candidate poles lie inside the curve; fit is polynomial", candidates.len()));
    Ok(PoleBasis { poles, source, discarded, doublets, aaa_degree, warning })
}

/// Fits `u ≈ Re(p(z) + Σ c_j/(z − π_j))` with `deg p ≤ npoly` on `m`
/// boundary samples. The reported degree is `npoly + #poles`.
pub fn fit_laplace_rational<H: Fn(Complex64) -> f64>(
    curve: &ParametricCurve,
    h: &H,
    basis: &PoleBasis,
    npoly: usize,
    m: usize,
) -> Result<HarmonicApproximant> {
    if basis.poles.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::Pole("non-finite pole in basis".into()));
    }
    fit_harmonic(curve, h, npoly, &basis.poles, m)
}
