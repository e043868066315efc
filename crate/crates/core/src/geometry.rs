//! Boundary curves: ellipses, inverted ellipses and trigonometric blobs.
//!
//! Every curve is the image of the unit circle under a 2π-periodic map
//! `θ ↦ z(θ)`. For the two ellipse families the Schwarz function is known in
//! closed form and is exposed here together with its singularities.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest number of boundary samples accepted by [`ParametricCurve::sample`].
pub const MIN_SAMPLES: usize = 4;

/// Grid used to validate trigonometric curves at construction.
const VALIDATION_GRID: usize = 2048;

/// The Joukowsky map `J(w) = (w + 1/w)/2`.
pub fn joukowsky(w: Complex64) -> Result<Complex64> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("Joukowsky map is undefined at w = 0".into()));
    }
    Ok(0.5 * (w + w.inv()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// `E_ρ`: image of `|w| = ρ` under the Joukowsky map.
    Ellipse { rho: f64 },
    /// `I_ρ = 1/E_ρ`: a smooth domain with two inlets pointing at `±1`.
    InvertedEllipse { rho: f64 },
    /// `z(θ) = Σ c_k e^{ikθ}` for `k = -K..=K`; `coeffs[i]` multiplies
    /// `e^{i(i-K)θ}`.
    Trig { coeffs: Vec<Complex64> },
}

/// An analytic Jordan curve given by its boundary parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    kind: CurveKind,
}

impl ParametricCurve {
    pub fn ellipse(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self { kind: CurveKind::Ellipse { rho } })
    }

    pub fn inverted_ellipse(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self { kind: CurveKind::InvertedEllipse { rho } })
    }

    /// Builds a trigonometric curve from `2K+1` coefficients `c_{-K}..c_K`.
    ///
    /// The curve is rejected unless its derivative stays away from zero and
    /// the sampled polygon has no self-intersections.
    pub fn trig(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidCurve(format!(
                "trigonometric curve needs an odd number of coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidCurve("non-finite coefficient".into()));
        }
        let curve = Self { kind: CurveKind::Trig { coeffs } };
        curve.validate_jordan()?;
        Ok(curve)
    }

    /// The unit circle, as the trigonometric curve `z(θ) = e^{iθ}`.
    pub fn unit_circle() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { kind: CurveKind::Trig { coeffs: vec![zero, zero, one] } }
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// ρ for the ellipse families.
    pub fn rho(&self) -> Option<f64> {
        match self.kind {
            CurveKind::Ellipse { rho } | CurveKind::InvertedEllipse { rho } => Some(rho),
            CurveKind::Trig { .. } => None,
        }
    }

    pub fn point(&self, theta: f64) -> Complex64 {
        match &self.kind {
            CurveKind::Ellipse { rho } => ellipse_point(*rho, theta),
            CurveKind::InvertedEllipse { rho } => ellipse_point(*rho, theta).inv(),
            CurveKind::Trig { coeffs } => {
                let k0 = (coeffs.len() / 2) as i64;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * Complex64::from_polar(1.0, (i as i64 - k0) as f64 * theta))
                    .sum()
            }
        }
    }

    /// `dz/dθ`.
    pub fn derivative(&self, theta: f64) -> Complex64 {
        let i = Complex64::i();
        match &self.kind {
            CurveKind::Ellipse { rho } => {
                let w = Complex64::from_polar(*rho, theta);
                0.5 * i * (w - w.inv())
            }
            CurveKind::InvertedEllipse { rho } => {
                let w = Complex64::from_polar(*rho, theta);
                let e = 0.5 * (w + w.inv());
                let de = 0.5 * i * (w - w.inv());
                -de / (e * e)
            }
            CurveKind::Trig { coeffs } => {
                let k0 = (coeffs.len() / 2) as i64;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let k = (j as i64 - k0) as f64;
                        i * k * c * Complex64::from_polar(1.0, k * theta)
                    })
                    .sum()
            }
        }
    }

    /// `m` equispaced samples `θ_k = 2πk/m`.
    pub fn sample(&self, m: usize) -> Result<BoundarySample> {
        if m < MIN_SAMPLES {
            return Err(Error::TooFewSamples { min: MIN_SAMPLES, got: m });
        }
        Ok(self.sample_shifted(m, 0.0))
    }

    /// `m` samples at `θ_k = 2π(k + offset)/m`, `0 ≤ offset < 1`. With
    /// `offset = 0.5` the grid interleaves every coarser equispaced grid whose
    /// size divides `m`, which is how validation grids are built.
    pub fn sample_shifted(&self, m: usize, offset: f64) -> BoundarySample {
        let params: Vec<f64> = (0..m).map(|k| TAU * (k as f64 + offset) / m as f64).collect();
        let nodes = params.iter().map(|&t| self.point(t)).collect();
        BoundarySample { nodes, params }
    }

    /// Approximate distance from `z` to the curve, from a dense polygon.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let poly = self.sample_shifted(VALIDATION_GRID * 2, 0.0).nodes;
        polygon_distance(&poly, z)
    }

    /// Whether `z` lies strictly inside the curve, judged on a dense polygon.
    pub fn contains(&self, z: Complex64) -> bool {
        let poly = self.sample_shifted(VALIDATION_GRID * 2, 0.0).nodes;
        winding_number(&poly, z) != 0
    }

    /// Checks `min |z'(θ)| > 0` and that the sampled polygon is simple.
    pub fn validate_jordan(&self) -> Result<()> {
        let n = VALIDATION_GRID;
        let scale = (0..n)
            .map(|k| self.point(TAU * k as f64 / n as f64).norm())
            .fold(0.0, f64::max);
        let min_speed = (0..4 * n)
            .map(|k| self.derivative(TAU * k as f64 / (4 * n) as f64).norm())
            .fold(f64::INFINITY, f64::min);
        if !(min_speed > 1e-8 * scale.max(1e-300)) {
            return Err(Error::InvalidCurve(format!(
                "parameterization degenerates: min |z'(θ)| = {min_speed:e}"
            )));
        }
        let poly = self.sample_shifted(n / 2, 0.0).nodes;
        if let Some((i, j)) = first_self_intersection(&poly) {
            return Err(Error::InvalidCurve(format!(
                "curve crosses itself between segments {i} and {j}"
            )));
        }
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("ellipse parameter must satisfy ρ > 1, got {rho}")))
    }
}

fn ellipse_point(rho: f64, theta: f64) -> Complex64 {
    let w = Complex64::from_polar(rho, theta);
    0.5 * (w + w.inv())
}

/// Semi-axes `(a, b)` of `E_ρ`.
pub fn ellipse_axes(rho: f64) -> (f64, f64) {
    (0.5 * (rho + rho.recip()), 0.5 * (rho - rho.recip()))
}

/// `x²/a² + y²/b² − 1` for `E_ρ`; zero exactly on the ellipse.
pub fn ellipse_residual(rho: f64, z: Complex64) -> f64 {
    let (a, b) = ellipse_axes(rho);
    (z.re / a).powi(2) + (z.im / b).powi(2) - 1.0
}

impl fmt::Display for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CurveKind::Ellipse { rho } => write!(f, "ell:{rho}"),
            CurveKind::InvertedEllipse { rho } => write!(f, "iell:{rho}"),
            CurveKind::Trig { coeffs } => {
                write!(f, "trig:")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", format_complex(*c))?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ParametricCurve {
    type Err = Error;

    /// Parses `ell:RHO`, `iell:RHO` or `trig:c_{-K},...,c_K` with complex
    /// coefficients written as `a+bi`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("curve spec `{s}` has no `kind:` prefix")))?;
        match tag {
            "ell" | "iell" => {
                let rho: f64 = body
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad ρ in curve spec `{s}`")))?;
                if tag == "ell" {
                    Self::ellipse(rho)
                } else {
                    Self::inverted_ellipse(rho)
                }
            }
            "trig" => {
                let coeffs = body.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                Self::trig(coeffs)
            }
            _ => Err(Error::Config(format!("unknown curve kind `{tag}`"))),
        }
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, with optional exponents.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("cannot parse complex number `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split before the last sign that is not leading and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() { 0.0 } else { re_str.parse::<f64>().map_err(|_| bad())? };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

pub fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 || (c.im == 0.0 && c.im.is_sign_negative()) {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Discrete boundary: `nodes[k] = z(params[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    pub nodes: Vec<Complex64>,
    pub params: Vec<f64>,
}

impl BoundarySample {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Winding number of the closed polygon `poly` around `z`.
pub fn winding_number(poly: &[Complex64], z: Complex64) -> i32 {
    let n = poly.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = poly[k] - z;
        let b = poly[(k + 1) % n] - z;
        total += (b / a).arg();
    }
    (total / TAU).round() as i32
}

fn polygon_distance(poly: &[Complex64], z: Complex64) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|k| segment_distance(poly[k], poly[(k + 1) % n], z))
        .fold(f64::INFINITY, f64::min)
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn first_self_intersection(poly: &[Complex64]) -> Option<(usize, usize)> {
    let n = poly.len();
    for i in 0..n {
        let (p1, p2) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(p1, p2, poly[j], poly[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Singularities of the Schwarz function of an inverted ellipse.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzSingularities {
    /// Square-root branch points, outside the curve.
    pub branch_points: Vec<Complex64>,
    /// Simple poles, inside the curve.
    pub interior_poles: Vec<Complex64>,
}

/// `(α, β) = ((ρ² + ρ⁻²)/2, (ρ² − ρ⁻²)/2)`; note `α² − β² = 1`.
fn schwarz_coefficients(rho: f64) -> (f64, f64) {
    let r2 = rho * rho;
    (0.5 * (r2 + r2.recip()), 0.5 * (r2 - r2.recip()))
}

fn on_real_segment(z: Complex64, inside_unit: bool) -> bool {
    let tol = 1e-15 * z.norm().max(1.0);
    z.im.abs() <= tol && if inside_unit { z.re.abs() < 1.0 } else { z.re.abs() > 1.0 }
}

/// Exact Schwarz function of an ellipse or inverted ellipse.
///
/// For `E_ρ`, `S(z) = αz − βz√(1 − z⁻²)` with the principal root, which is
/// analytic off the focal segment `[−1, 1]`. For `I_ρ` the reciprocal
/// composition simplifies to `S(z) = z / (α − β√(1 − z²))`, analytic off
/// `(−∞, −1] ∪ [1, ∞)` apart from simple poles at `±i/β`.
pub fn schwarz_exact(curve: &ParametricCurve, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    match curve.kind() {
        CurveKind::Ellipse { rho } => {
            if on_real_segment(z, true) {
                return Err(Error::BranchCut(format!("{z}")));
            }
            let (alpha, beta) = schwarz_coefficients(*rho);
            Ok(alpha * z - beta * z * (one - (z * z).inv()).sqrt())
        }
        CurveKind::InvertedEllipse { rho } => {
            if on_real_segment(z, false) {
                return Err(Error::BranchCut(format!("{z}")));
            }
            let (alpha, beta) = schwarz_coefficients(*rho);
            let den = alpha - beta * (one - z * z).sqrt();
            if den.norm() <= 1e-14 * alpha {
                return Err(Error::Pole(format!("{z}")));
            }
            Ok(z / den)
        }
        CurveKind::Trig { .. } => Err(Error::NotAvailable("closed-form Schwarz function")),
    }
}

/// Both sheets of the inverted-ellipse Schwarz function at a point `b` on
/// the cut `|b| > 1` (real): the limits from above and below the cut.
pub fn schwarz_two_branches(curve: &ParametricCurve, b: f64) -> Result<[Complex64; 2]> {
    let CurveKind::InvertedEllipse { rho } = curve.kind() else {
        return Err(Error::NotAvailable("two-branch Schwarz evaluation"));
    };
    if b.abs() <= 1.0 {
        return Err(Error::Domain(format!("b = {b} is not on the cut |b| > 1")));
    }
    let (alpha, beta) = schwarz_coefficients(*rho);
    let s = (b * b - 1.0).sqrt();
    let z = Complex64::new(b, 0.0);
    let upper = z / (alpha - beta * Complex64::new(0.0, -s));
    let lower = z / (alpha - beta * Complex64::new(0.0, s));
    Ok([upper, lower])
}

/// Branch points and interior poles of the inverted-ellipse Schwarz
/// function: `±1` and `±i/β = ±2i/(ρ² − ρ⁻²)`.
pub fn schwarz_singularities(curve: &ParametricCurve) -> Result<SchwarzSingularities> {
    let CurveKind::InvertedEllipse { rho } = curve.kind() else {
        return Err(Error::NotAvailable("Schwarz singularities"));
    };
    let (_, beta) = schwarz_coefficients(*rho);
    let p = Complex64::new(0.0, beta.recip());
    Ok(SchwarzSingularities {
        branch_points: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        interior_poles: vec![p, -p],
    })
}
