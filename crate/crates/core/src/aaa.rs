//! AAA rational approximation in barycentric form.
//!
//! `r(z) = Σ w_j f_j/(z − z_j) / Σ w_j/(z − z_j)`. Support points are added
//! greedily where the current residual is largest; the weights are the
//! smallest right singular vector of the Loewner matrix on the remaining
//! sample points.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{generalized_eig_arrowhead, min_singular_vector, DenseMatrix};

pub const DEFAULT_MMAX: usize = 200;

/// Relative distance under which an evaluation point is taken to coincide
/// with a support point.
const SUPPORT_MATCH: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricRational {
    pub support: Vec<Complex64>,
    pub values: Vec<Complex64>,
    /// Unit 2-norm.
    pub weights: Vec<Complex64>,
    /// Final max residual on the sample set, relative to `max|F|`.
    pub tol_achieved: f64,
    /// Absolute max residual after each greedy step.
    pub history: Vec<f64>,
}

impl BarycentricRational {
    pub fn degree(&self) -> usize {
        self.support.len().saturating_sub(1)
    }

    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        let scale = z.norm().max(1.0);
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for ((zj, fj), wj) in self.support.iter().zip(&self.values).zip(&self.weights) {
            let d = z - zj;
            if d.norm() <= SUPPORT_MATCH * scale {
                return *fj;
            }
            let c = wj / d;
            num += c * fj;
            den += c;
        }
        num / den
    }

    pub fn eval(&self, points: &[Complex64]) -> Vec<Complex64> {
        points.iter().map(|&z| self.eval_at(z)).collect()
    }

    /// Finite poles.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        generalized_eig_arrowhead(&self.support, &self.weights)
    }

    /// Residue at a (simple) pole `p`: `N(p)/D'(p)`.
    pub fn residue(&self, p: Complex64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut dden = Complex64::new(0.0, 0.0);
        for ((zj, fj), wj) in self.support.iter().zip(&self.values).zip(&self.weights) {
            let d = p - zj;
            num += wj * fj / d;
            dden -= wj / (d * d);
        }
        num / dden
    }
}

/// Runs AAA on samples `F` at points `Z` until the max residual is at most
/// `tol · max|F|` or the degree reaches `mmax`.
///
/// Not meeting `tol` is not an error; check `tol_achieved`.
pub fn aaa_fit(z: &[Complex64], f: &[Complex64], tol: f64, mmax: usize) -> Result<BarycentricRational> {
    let n = z.len();
    if n != f.len() {
        return Err(Error::Dimension(format!("{} points but {} values", n, f.len())));
    }
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if z.iter().chain(f).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Domain("non-finite sample".into()));
    }
    check_distinct(z)?;

    let fmax = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let target = tol * fmax;
    let mean = f.iter().sum::<Complex64>() / n as f64;
    let mut approx = vec![mean; n];
    let mut active = vec![true; n];
    let mut support = Vec::new();
    let mut values = Vec::new();
    let mut weights = Vec::new();
    let mut history = Vec::new();

    // Support points: at most mmax + 1, and never so many that the Loewner
    // matrix runs out of rows.
    let max_support = (mmax + 1).min(n / 2).max(1);
    while support.len() < max_support {
        let j = argmax_residual(f, &approx);
        support.push(z[j]);
        values.push(f[j]);
        active[j] = false;

        let rows: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let m = support.len();
        let cauchy = DenseMatrix::from_fn(rows.len(), m, |r, k| (z[rows[r]] - support[k]).inv());
        let loewner = DenseMatrix::from_fn(rows.len(), m, |r, k| (f[rows[r]] - values[k]) * cauchy[(r, k)]);
        weights = min_singular_vector(&loewner)?;

        for (r, &i) in rows.iter().enumerate() {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = Complex64::new(0.0, 0.0);
            for k in 0..m {
                let c = cauchy[(r, k)] * weights[k];
                num += c * values[k];
                den += c;
            }
            approx[i] = num / den;
        }
        for (i, a) in approx.iter_mut().enumerate() {
            if !active[i] {
                *a = f[i];
            }
        }
        let err = f
            .iter()
            .zip(&approx)
            .map(|(fi, ai)| (fi - ai).norm())
            .fold(0.0, |acc: f64, e| if e.is_nan() { f64::INFINITY } else { acc.max(e) });
        history.push(err);
        if err <= target {
            break;
        }
    }
    let last = *history.last().unwrap_or(&f64::INFINITY);
    let tol_achieved = if fmax > 0.0 { last / fmax } else { 0.0 };
    Ok(BarycentricRational { support, values, weights, tol_achieved, history })
}

/// Evaluates `r` at `points`, returning `f_j` at support points.
pub fn eval_barycentric(r: &BarycentricRational, points: &[Complex64]) -> Vec<Complex64> {
    r.eval(points)
}

pub fn poles(r: &BarycentricRational) -> Result<Vec<Complex64>> {
    r.poles()
}

fn argmax_residual(f: &[Complex64], approx: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_err = f64::NEG_INFINITY;
    for (i, (fi, ai)) in f.iter().zip(approx).enumerate() {
        let e = (fi - ai).norm();
        let e = if e.is_nan() { f64::INFINITY } else { e };
        if e > best_err {
            best_err = e;
            best = i;
        }
    }
    best
}

fn check_distinct(z: &[Complex64]) -> Result<()> {
    let mut sorted: Vec<Complex64> = z.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("sample points must be distinct".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ParametricCurve;
    use crate::linalg::norm2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(n: usize) -> Vec<Complex64> {
        ParametricCurve::unit_circle().sample(n).unwrap().nodes
    }

    #[test]
    fn identity_data_is_degree_one() {
        let z: Vec<Complex64> = (0..50).map(|k| c(-1.0 + 0.04 * k as f64, 0.1 * (k as f64).sin())).collect();
        let r = aaa_fit(&z, &z, 1e-12, DEFAULT_MMAX).unwrap();
        assert_eq!(r.degree(), 1);
        let err = z.iter().zip(r.eval(&z)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn recovers_simple_pole() {
        let z = circle(256);
        let f: Vec<Complex64> = z.iter().map(|z| (z - 2.0).inv()).collect();
        let r = aaa_fit(&z, &f, 1e-13, DEFAULT_MMAX).unwrap();
        assert!(r.tol_achieved <= 1e-13);
        let ps = r.poles().unwrap();
        let nearest = ps.iter().map(|p| (p - 2.0).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-6, "{ps:?}");
        let res = r.residue(ps.iter().copied().min_by(|a, b| (a - 2.0).norm().total_cmp(&(b - 2.0).norm())).unwrap());
        assert!((res - 1.0).norm() < 1e-6);
    }

    #[test]
    fn interpolates_support_points() {
        let z = circle(200);
        let f: Vec<Complex64> = z.iter().map(|z| z.exp() / (z - c(1.5, 0.5))).collect();
        let r = aaa_fit(&z, &f, 1e-12, 30).unwrap();
        for (zj, fj) in r.support.iter().zip(&r.values) {
            assert_eq!(r.eval_at(*zj), *fj);
        }
        assert!((norm2(&r.weights) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_point_barycentric_is_identity() {
        let w = 0.5f64.sqrt();
        let r = BarycentricRational {
            support: vec![c(-1.0, 0.0), c(1.0, 0.0)],
            values: vec![c(-1.0, 0.0), c(1.0, 0.0)],
            weights: vec![c(w, 0.0), c(-w, 0.0)],
            tol_achieved: 0.0,
            history: vec![],
        };
        assert!((r.eval_at(c(0.3, 0.0)) - c(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn far_field_limit_is_weighted_mean() {
        let r = BarycentricRational {
            support: vec![c(-1.0, 0.0), c(0.5, 0.5), c(1.0, -0.2)],
            values: vec![c(2.0, 0.0), c(-1.0, 1.0), c(0.5, 0.0)],
            weights: vec![c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)],
            tol_achieved: 0.0,
            history: vec![],
        };
        let wsum: Complex64 = r.weights.iter().sum();
        let limit: Complex64 = r.weights.iter().zip(&r.values).map(|(w, f)| w * f).sum::<Complex64>() / wsum;
        let far = r.eval_at(c(1e8, 0.0));
        assert!((far - limit).norm() < 1e-7 * limit.norm());
    }

    #[test]
    fn evaluating_at_a_pole_does_not_panic() {
        let z = circle(64);
        let f: Vec<Complex64> = z.iter().map(|z| (z - 2.0).inv()).collect();
        let r = aaa_fit(&z, &f, 1e-13, 10).unwrap();
        let p = r.poles().unwrap()[0];
        let v = r.eval_at(p);
        assert!(v.norm() > 1e6 || !v.norm().is_finite());
    }

    #[test]
    fn history_and_flag_when_mmax_hit() {
        let z = circle(300);
        let f: Vec<Complex64> = z.iter().map(|z| (z - 1.05).sqrt()).collect();
        let r = aaa_fit(&z, &f, 1e-15, 5).unwrap();
        assert_eq!(r.degree(), 5);
        assert_eq!(r.history.len(), 6);
        assert!(r.tol_achieved > 1e-15);
        assert!(r.history.iter().all(|e| e.is_finite()));
        let fmax = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let recomputed = f.iter().zip(r.eval(&z)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / fmax;
        assert!(recomputed <= 2.0 * r.tol_achieved && r.tol_achieved <= 2.0 * recomputed);
    }

    #[test]
    fn degree_one_identity_has_no_finite_pole() {
        let z = circle(40);
        let r = aaa_fit(&z, &z, 1e-12, DEFAULT_MMAX).unwrap();
        let ps = r.poles().unwrap();
        assert!(ps.is_empty() || ps.iter().all(|p| p.norm() > 1e6), "{ps:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let z = circle(8);
        assert!(aaa_fit(&z, &z[..4], 1e-10, 10).is_err());
        assert!(aaa_fit(&z[..1], &z[..1], 1e-10, 10).is_err());
        assert!(aaa_fit(&z, &z, 0.0, 10).is_err());
        let mut dup = z.clone();
        dup[3] = dup[2];
        assert!(aaa_fit(&dup, &z, 1e-10, 10).is_err());
    }
}
