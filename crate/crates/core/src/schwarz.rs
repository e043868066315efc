//! Numerical Schwarz-function analysis.
//!
//! AAA applied to `conj z` on the boundary gives a rational approximation of
//! the Schwarz function. Its poles line up along strings that approximate
//! the branch cuts; the end of each string nearest the curve estimates a
//! branch point. For the ellipse family, where `S` is known in closed form,
//! the reflection identity and the failure of `f` to continue across the
//! cut can be checked directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aaa::{aaa_fit, BarycentricRational, DEFAULT_MMAX};
use crate::error::{Error, Result};
use crate::geometry::{schwarz_exact, schwarz_two_branches, CurveKind, ParametricCurve};
use crate::ratsolver::{companion_degree, fit_laplace_rational, is_interior, select_poles, PoleSource};

/// Smallest boundary sample for which pole strings are meaningful.
pub const MIN_SCHWARZ_SAMPLES: usize = 500;

/// Width, in units of `ρ − 1`, of the strip around the curve in which the
/// reflection identity is checked.
pub const REFLECTION_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterOptions {
    /// Link distance as a multiple of the median nearest-neighbour spacing.
    pub link_factor: f64,
    /// Strings with fewer poles are ignored.
    pub min_string: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self { link_factor: 3.0, min_string: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleString {
    pub side: Side,
    pub members: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchEstimate {
    pub location: Complex64,
    pub side: Side,
    pub string_size: usize,
    /// Distance from the estimate to the curve.
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct SchwarzApprox {
    pub rational: BarycentricRational,
    pub exterior_poles: Vec<Complex64>,
    pub interior_poles: Vec<Complex64>,
    pub strings: Vec<PoleString>,
    pub branch_estimates: Vec<BranchEstimate>,
    /// Max of `|r(z) − conj z|` over the samples.
    pub residual: f64,
    /// `max |z|` over the samples.
    pub scale: f64,
    pub converged: bool,
}

/// AAA fit of `conj z` on `m` boundary samples with the default clustering.
pub fn schwarz_fit(curve: &ParametricCurve, m: usize, tol: f64) -> Result<SchwarzApprox> {
    schwarz_fit_with(curve, m, tol, DEFAULT_MMAX, &ClusterOptions::default())
}

pub fn schwarz_fit_with(
    curve: &ParametricCurve,
    m: usize,
    tol: f64,
    mmax: usize,
    opts: &ClusterOptions,
) -> Result<SchwarzApprox> {
    if m < MIN_SCHWARZ_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_SCHWARZ_SAMPLES, got: m });
    }
    let z = curve.sample(m)?.nodes;
    let f: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();
    let rational = aaa_fit(&z, &f, tol, mmax)?;
    let poles = rational.poles()?;
    let (interior_poles, exterior_poles): (Vec<_>, Vec<_>) =
        poles.into_iter().partition(|&p| is_interior(curve, &z, p));

    let mut strings = Vec::new();
    for (side, set) in [(Side::Exterior, &exterior_poles), (Side::Interior, &interior_poles)] {
        for members in cluster_poles(set, opts) {
            strings.push(PoleString { side, members });
        }
    }
    let branch_estimates = strings
        .iter()
        .map(|s| {
            let (location, distance) = s
                .members
                .iter()
                .map(|&p| (p, curve.distance_to(p)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("strings are non-empty");
            BranchEstimate { location, side: s.side, string_size: s.members.len(), distance }
        })
        .collect();

    let residual = f
        .iter()
        .zip(rational.eval(&z))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let converged = rational.tol_achieved <= tol;
    Ok(SchwarzApprox {
        rational,
        exterior_poles,
        interior_poles,
        strings,
        branch_estimates,
        residual,
        scale,
        converged,
    })
}

/// Single-linkage clusters of `poles` with link distance `link_factor ×`
/// the median nearest-neighbour distance; clusters smaller than
/// `min_string` are dropped.
pub fn cluster_poles(poles: &[Complex64], opts: &ClusterOptions) -> Vec<Vec<Complex64>> {
    let n = poles.len();
    if n < opts.min_string.max(2) {
        return Vec::new();
    }
    let mut nn: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (poles[i] - poles[j]).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    nn.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { nn[n / 2] } else { 0.5 * (nn[n / 2 - 1] + nn[n / 2]) };
    let link = opts.link_factor * median;

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (poles[i] - poles[j]).norm() <= link {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    let mut root_index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_index[r] == usize::MAX {
            root_index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_index[r]].push(poles[i]);
    }
    groups.retain(|g| g.len() >= opts.min_string);
    groups
}

fn ellipse_family_rho(curve: &ParametricCurve) -> Result<f64> {
    match curve.kind() {
        CurveKind::Ellipse { rho } | CurveKind::InvertedEllipse { rho } => Ok(*rho),
        CurveKind::Trig { .. } => Err(Error::NotAvailable("exact Schwarz function is only known for the ellipse family")),
    }
}

/// `|conj S(conj S(z)) − z|` with the exact Schwarz function, for `z` within
/// `0.05(ρ − 1)` of the curve.
pub fn reflection_check(curve: &ParametricCurve, z: Complex64) -> Result<f64> {
    let rho = ellipse_family_rho(curve)?;
    let band = REFLECTION_BAND * (rho - 1.0);
    let d = curve.distance_to(z);
    if d >= band {
        return Err(Error::OutOfRange(format!("point is {d:.3e} from the curve; the check is limited to {band:.3e}")));
    }
    let reflected = schwarz_exact(curve, z)?.conj();
    let back = schwarz_exact(curve, reflected)?.conj();
    Ok((back - z).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationWitness {
    /// Point on the branch cut.
    pub b: f64,
    pub a1: Complex64,
    pub a2: Complex64,
    /// `|u(a₁) − u(a₂)|`.
    pub delta_u: f64,
    /// Boundary error of the Laplace solution used.
    pub boundary_error: f64,
}

/// Default point on the cut, just beyond the branch point `z = 1`.
pub const DEFAULT_CUT_POINT: f64 = 1.05;

/// Reflects `b` on the cut `(1, ∞)` of an inverted ellipse through both
/// branches of the Schwarz function to `a₁, a₂ ∈ Ω` and compares the
/// numerically computed harmonic extension of `h` there.
///
/// If `f` (with `u = Re f`) continued analytically across the cut at `b`,
/// reflection would force `u(a₁) = u(a₂)`; a clear difference shows it
/// does not.
pub fn continuation_violation_witness<H: Fn(Complex64) -> f64>(
    curve: &ParametricCurve,
    h: &H,
    b: f64,
) -> Result<ContinuationWitness> {
    if !matches!(curve.kind(), CurveKind::InvertedEllipse { .. }) {
        return Err(Error::NotAvailable("continuation witness is defined for inverted ellipses"));
    }
    let [s1, s2] = schwarz_two_branches(curve, b)?;
    let (a1, a2) = (s1.conj(), s2.conj());
    if !curve.contains(a1) || !curve.contains(a2) {
        return Err(Error::Domain(format!("reflections of b = {b} fall outside the domain")));
    }
    let m = 1500;
    let sample = curve.sample(m)?;
    let basis = select_poles(curve, &sample, h, 1e-13, PoleSource::FromSchwarz, 60)?;
    let npoly = companion_degree(basis.len());
    let m_fit = m.max(16 * (npoly + basis.len()));
    let fit = fit_laplace_rational(curve, h, &basis, npoly, m_fit)?;
    let u = fit.evaluate(&[a1, a2]);
    Ok(ContinuationWitness { b, a1, a2, delta_u: (u[0] - u[1]).abs(), boundary_error: fit.boundary_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::schwarz_singularities;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn clustering_separates_strings() {
        let mut poles: Vec<Complex64> = (0..6).map(|k| c(1.0 + 0.1 * k as f64, 0.0)).collect();
        poles.extend((0..6).map(|k| c(-1.0 - 0.1 * k as f64, 0.0)));
        poles.push(c(0.0, 5.0));
        poles.push(c(0.0, -5.0));
        let groups = cluster_poles(&poles, &ClusterOptions::default());
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().all(|g| g.len() == 6));
        assert!(cluster_poles(&poles[..2], &ClusterOptions::default()).is_empty());
    }

    #[test]
    fn inverted_ellipse_branch_points_and_poles() {
        let curve = ParametricCurve::inverted_ellipse(1.5).unwrap();
        let s = schwarz_fit(&curve, 2000, 1e-10).unwrap();
        assert!(s.converged);
        assert!(s.residual <= 1e-10 * s.scale);
        let ext: Vec<_> = s.branch_estimates.iter().filter(|e| e.side == Side::Exterior).collect();
        assert!(!ext.is_empty());
        for e in &ext {
            let d = (e.location - 1.0).norm().min((e.location + 1.0).norm());
            assert!(d < 0.05, "{:?}", e);
        }
        assert!(ext.iter().any(|e| e.location.re > 0.0) && ext.iter().any(|e| e.location.re < 0.0));
        let expected = schwarz_singularities(&curve).unwrap().interior_poles;
        for p in expected {
            let d = s.interior_poles.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 0.1, "no interior pole near {p}: {:?}", s.interior_poles);
        }
    }

    #[test]
    fn circle_has_no_strings() {
        let s = schwarz_fit(&ParametricCurve::unit_circle(), 600, 1e-12).unwrap();
        assert!(s.strings.is_empty());
        assert_eq!(s.rational.degree(), 1);
        assert_eq!(s.interior_poles.len(), 1);
        assert!(s.interior_poles[0].norm() < 1e-10);
    }

    #[test]
    fn too_few_samples() {
        let curve = ParametricCurve::ellipse(2.0).unwrap();
        assert!(matches!(schwarz_fit(&curve, 100, 1e-10), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn reflection_on_and_near_curve() {
        for curve in [ParametricCurve::inverted_ellipse(1.5).unwrap(), ParametricCurve::ellipse(1.5).unwrap()] {
            for k in 0..16 {
                let z = curve.point(TAU * (k as f64 + 0.3) / 16.0);
                assert!(reflection_check(&curve, z).unwrap() < 1e-12);
            }
        }
        let ie = ParametricCurve::inverted_ellipse(1.5).unwrap();
        assert!(reflection_check(&ie, 1.01 * ie.point(0.3)).unwrap() < 1e-8);
        let e = ParametricCurve::ellipse(1.5).unwrap();
        assert!(reflection_check(&e, 0.99 * e.point(0.3)).unwrap() < 1e-8);
        assert!(matches!(reflection_check(&e, c(0.0, 0.0)), Err(Error::OutOfRange(_))));
        let t = ParametricCurve::unit_circle();
        assert!(reflection_check(&t, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn witness_for_constant_data_vanishes() {
        let curve = ParametricCurve::inverted_ellipse(1.3).unwrap();
        let w = continuation_violation_witness(&curve, &|_| 1.0, DEFAULT_CUT_POINT).unwrap();
        assert!((w.a1 - w.a2).norm() > 1e-6);
        assert!(w.delta_u < 1e-8, "{}", w.delta_u);
        assert!(continuation_violation_witness(&ParametricCurve::ellipse(1.3).unwrap(), &|_| 1.0, 1.05).is_err());
    }
}
