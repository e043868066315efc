//! Polynomial Laplace solver.
//!
//! The harmonic function is sought as `u = Re p(z)`. Monomials are hopeless
//! as a basis beyond modest degree, so the basis is orthonormalized on the
//! boundary nodes as it is built (Vandermonde with Arnoldi): each new column
//! is `z·q_k` made orthogonal to `q_0..q_k`, and the Hessenberg coefficients
//! of that recurrence let the same basis be evaluated anywhere else.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, ParametricCurve};
use crate::linalg::{dot_conj, lstsq, norm2, DenseMatrix};

/// New columns with discrete norm below this are treated as a breakdown.
const BREAKDOWN_TOL: f64 = 1e-14;

/// Points per block when evaluating on large point sets.
const EVAL_CHUNK: usize = 64;

/// Validation grid size as a multiple of the fitting grid.
pub const VALIDATION_FACTOR: usize = 4;

#[derive(Debug, Clone)]
pub struct ArnoldiBasis {
    /// Degree actually reached; smaller than requested after a breakdown.
    pub degree: usize,
    pub requested_degree: usize,
    /// `M × (degree+1)` basis values at the nodes.
    pub q: DenseMatrix<Complex64>,
    /// `(degree+1) × degree` recurrence coefficients.
    pub hessenberg: DenseMatrix<Complex64>,
    pub center: Complex64,
    pub scale: f64,
}

impl ArnoldiBasis {
    pub fn breakdown(&self) -> bool {
        self.degree < self.requested_degree
    }

    /// `max |QᴴQ/M − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.q.rows() as f64;
        let n = self.degree + 1;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let g = dot_conj(self.q.column(i), self.q.column(j)) / m;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Evaluates all basis columns at `points`.
    pub fn eval(&self, points: &[Complex64]) -> DenseMatrix<Complex64> {
        let mut w = DenseMatrix::zeros(points.len(), self.degree + 1);
        for (c, chunk) in points.chunks(EVAL_CHUNK).enumerate() {
            let block = self.eval_block(chunk);
            let off = c * EVAL_CHUNK;
            for j in 0..=self.degree {
                let (re, im) = block.column(j);
                for (i, dst) in w.column_mut(j)[off..off + chunk.len()].iter_mut().enumerate() {
                    *dst = Complex64::new(re[i], im[i]);
                }
            }
        }
        w
    }

    /// Runs the Hessenberg recurrence on a small block of points, with real
    /// and imaginary parts stored apart so the inner loops vectorize.
    fn eval_block(&self, points: &[Complex64]) -> SplitBlock {
        let n = self.degree;
        let p = points.len();
        let mut w = SplitBlock { p, re: vec![0.0; p * (n + 1)], im: vec![0.0; p * (n + 1)] };
        w.re[..p].fill(1.0);
        let (xr, xi): (Vec<f64>, Vec<f64>) =
            points.iter().map(|z| (z - self.center) / self.scale).map(|x| (x.re, x.im)).unzip();
        let mut nr = vec![0.0; p];
        let mut ni = vec![0.0; p];
        for k in 0..n {
            let (ar, ai) = w.column(k);
            for i in 0..p {
                nr[i] = xr[i] * ar[i] - xi[i] * ai[i];
                ni[i] = xr[i] * ai[i] + xi[i] * ar[i];
            }
            // Four columns per pass halves the traffic on the accumulator.
            let mut j = 0;
            while j + 4 <= k + 1 {
                let h: [Complex64; 4] = std::array::from_fn(|t| self.hessenberg[(j + t, k)]);
                let (a0r, a0i) = w.column(j);
                let (a1r, a1i) = w.column(j + 1);
                let (a2r, a2i) = w.column(j + 2);
                let (a3r, a3i) = w.column(j + 3);
                for i in 0..p {
                    nr[i] -= (h[0].re * a0r[i] - h[0].im * a0i[i])
                        + (h[1].re * a1r[i] - h[1].im * a1i[i])
                        + (h[2].re * a2r[i] - h[2].im * a2i[i])
                        + (h[3].re * a3r[i] - h[3].im * a3i[i]);
                    ni[i] -= (h[0].re * a0i[i] + h[0].im * a0r[i])
                        + (h[1].re * a1i[i] + h[1].im * a1r[i])
                        + (h[2].re * a2i[i] + h[2].im * a2r[i])
                        + (h[3].re * a3i[i] + h[3].im * a3r[i]);
                }
                j += 4;
            }
            for j in j..=k {
                let h = self.hessenberg[(j, k)];
                let (ar, ai) = w.column(j);
                for i in 0..p {
                    nr[i] -= h.re * ar[i] - h.im * ai[i];
                    ni[i] -= h.re * ai[i] + h.im * ar[i];
                }
            }
            let inv = self.hessenberg[(k + 1, k)].inv();
            let (dr, di) = w.column_mut(k + 1);
            for i in 0..p {
                dr[i] = nr[i] * inv.re - ni[i] * inv.im;
                di[i] = nr[i] * inv.im + ni[i] * inv.re;
            }
        }
        w
    }
}

/// Basis values on a block of points, column-major, split into real and
/// imaginary parts.
struct SplitBlock {
    p: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl SplitBlock {
    fn column(&self, j: usize) -> (&[f64], &[f64]) {
        let r = j * self.p..(j + 1) * self.p;
        (&self.re[r.clone()], &self.im[r])
    }

    fn column_mut(&mut self, j: usize) -> (&mut [f64], &mut [f64]) {
        let r = j * self.p..(j + 1) * self.p;
        (&mut self.re[r.clone()], &mut self.im[r])
    }
}

/// Builds a discretely orthonormal polynomial basis of degree `n` on the
/// sample nodes, with `⟨u, v⟩ = (1/M) Σ conj(u_k) v_k`.
pub fn arnoldi_build(sample: &BoundarySample, n: usize) -> Result<ArnoldiBasis> {
    let nodes = &sample.nodes;
    let m = nodes.len();
    if m < 2 * (n + 1) {
        return Err(Error::TooFewSamples { min: 2 * (n + 1), got: m });
    }
    let center = nodes.iter().sum::<Complex64>() / m as f64;
    let scale = nodes.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::Domain("boundary nodes coincide".into()));
    }
    let x: Vec<Complex64> = nodes.iter().map(|z| (z - center) / scale).collect();
    let sqrt_m = (m as f64).sqrt();

    let mut q = DenseMatrix::zeros(m, n + 1);
    q.column_mut(0).fill(Complex64::new(1.0, 0.0));
    let mut h = DenseMatrix::zeros(n + 1, n);
    let mut v = vec![Complex64::new(0.0, 0.0); m];
    let mut degree = n;
    for k in 0..n {
        for (vi, (xi, qk)) in v.iter_mut().zip(x.iter().zip(q.column(k))) {
            *vi = xi * qk;
        }
        for j in 0..=k {
            let qj = q.column(j);
            let hjk = dot_conj(qj, &v) / m as f64;
            for (vi, qji) in v.iter_mut().zip(qj) {
                *vi -= hjk * qji;
            }
            h[(j, k)] = hjk;
        }
        let norm = norm2(&v) / sqrt_m;
        if norm < BREAKDOWN_TOL {
            degree = k;
            break;
        }
        h[(k + 1, k)] = Complex64::new(norm, 0.0);
        for (dst, vi) in q.column_mut(k + 1).iter_mut().zip(&v) {
            *dst = vi / norm;
        }
    }
    if degree < n {
        q = DenseMatrix::from_fn(m, degree + 1, |i, j| q[(i, j)]);
        h = DenseMatrix::from_fn(degree + 1, degree, |i, j| h[(i, j)]);
    }
    Ok(ArnoldiBasis { degree, requested_degree: n, q, hessenberg: h, center, scale })
}

/// Evaluates the basis at arbitrary points through the stored recurrence.
pub fn arnoldi_eval(basis: &ArnoldiBasis, points: &[Complex64]) -> DenseMatrix<Complex64> {
    basis.eval(points)
}

/// `u ≈ c₀ + Σ a_j Re q_j − Σ b_j Im q_j + Σ (p_j Re g_j − s_j Im g_j)` with
/// `g_j = 1/(z − π_j)`: the real part of
/// `c₀ + Σ (a_j + i b_j) q_j + Σ (p_j + i s_j)/(z − π_j)`.
#[derive(Debug, Clone)]
pub struct HarmonicApproximant {
    pub basis: ArnoldiBasis,
    pub poles: Vec<Complex64>,
    /// `[c₀, a₁..a_n, b₁..b_n, p₁..p_K, s₁..s_K]`.
    pub coefficients: Vec<f64>,
    /// Sup-norm boundary error on the held-out validation grid.
    pub boundary_error: f64,
    pub validation_points: usize,
    /// Fitting grid size.
    pub sample_points: usize,
    pub rank_deficient: bool,
}

impl HarmonicApproximant {
    /// Total degree: polynomial degree plus number of finite poles.
    pub fn degree(&self) -> usize {
        self.basis.degree + self.poles.len()
    }

    pub fn poly_degree(&self) -> usize {
        self.basis.degree
    }

    /// Complex coefficients of the polynomial part (`c₀` real) and of the
    /// pole terms.
    pub fn complex_coefficients(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.basis.degree;
        let k = self.poles.len();
        let c = &self.coefficients;
        let mut poly = vec![Complex64::new(c[0], 0.0)];
        poly.extend((1..=n).map(|j| Complex64::new(c[j], c[n + j])));
        let base = 2 * n + 1;
        let pole = (0..k).map(|j| Complex64::new(c[base + j], c[base + k + j])).collect();
        (poly, pole)
    }

    /// The analytic function `f` with `u = Re f`, at `points`.
    pub fn evaluate_analytic(&self, points: &[Complex64]) -> Vec<Complex64> {
        let (poly, pole) = self.complex_coefficients();
        let mut out = Vec::with_capacity(points.len());
        for chunk in points.chunks(EVAL_CHUNK) {
            let w = self.basis.eval_block(chunk);
            let mut fr = vec![0.0; chunk.len()];
            let mut fi = vec![0.0; chunk.len()];
            for (j, cj) in poly.iter().enumerate() {
                let (wr, wi) = w.column(j);
                for i in 0..chunk.len() {
                    fr[i] += cj.re * wr[i] - cj.im * wi[i];
                    fi[i] += cj.re * wi[i] + cj.im * wr[i];
                }
            }
            for (i, z) in chunk.iter().enumerate() {
                let mut f = Complex64::new(fr[i], fi[i]);
                for (p, c) in self.poles.iter().zip(&pole) {
                    f += c / (z - p);
                }
                out.push(f);
            }
        }
        out
    }

    /// `u` at `points`.
    pub fn evaluate(&self, points: &[Complex64]) -> Vec<f64> {
        self.evaluate_analytic(points).into_iter().map(|f| f.re).collect()
    }

    /// Sup of `|u − h|` over `points`.
    pub fn max_error<H: Fn(Complex64) -> f64>(&self, points: &[Complex64], h: &H) -> f64 {
        self.evaluate(points)
            .into_iter()
            .zip(points)
            .map(|(u, z)| (u - h(*z)).abs())
            .fold(0.0, f64::max)
    }
}

/// Validation nodes for a fit on `m` samples: `4m` points interleaved with
/// the fitting grid.
pub fn validation_nodes(curve: &ParametricCurve, m: usize) -> Vec<Complex64> {
    curve.sample_shifted(VALIDATION_FACTOR * m, 0.5).nodes
}

/// Real least-squares fit of `h` by the real part of a polynomial of degree
/// `npoly` plus simple poles. Shared by the polynomial and rational solvers.
pub(crate) fn fit_harmonic<H: Fn(Complex64) -> f64>(
    curve: &ParametricCurve,
    h: &H,
    npoly: usize,
    poles: &[Complex64],
    m: usize,
) -> Result<HarmonicApproximant> {
    let unknowns = 2 * npoly + 1 + 2 * poles.len();
    if m < 2 * unknowns {
        return Err(Error::TooFewSamples { min: 2 * unknowns, got: m });
    }
    let sample = curve.sample(m)?;
    let basis = arnoldi_build(&sample, npoly)?;
    let n = basis.degree;
    let k = poles.len();
    let rhs: Vec<f64> = sample.nodes.iter().map(|&z| h(z)).collect();
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("boundary data is not finite at every node".into()));
    }

    let cols = 2 * n + 1 + 2 * k;
    let mut a = DenseMatrix::<f64>::zeros(m, cols);
    a.column_mut(0).fill(1.0);
    for j in 1..=n {
        let qj = basis.q.column(j).to_vec();
        for (dst, v) in a.column_mut(j).iter_mut().zip(&qj) {
            *dst = v.re;
        }
        for (dst, v) in a.column_mut(n + j).iter_mut().zip(&qj) {
            *dst = -v.im;
        }
    }
    let base = 2 * n + 1;
    for (j, p) in poles.iter().enumerate() {
        let g: Vec<Complex64> = sample.nodes.iter().map(|z| (z - p).inv()).collect();
        for (dst, v) in a.column_mut(base + j).iter_mut().zip(&g) {
            *dst = v.re;
        }
        for (dst, v) in a.column_mut(base + k + j).iter_mut().zip(&g) {
            *dst = -v.im;
        }
    }
    let sol = lstsq(&a, &rhs)?;
    drop(a);

    let mut approx = HarmonicApproximant {
        basis,
        poles: poles.to_vec(),
        coefficients: sol.coefficients,
        boundary_error: f64::NAN,
        validation_points: VALIDATION_FACTOR * m,
        sample_points: m,
        rank_deficient: sol.rank_deficient,
    };
    let check = validation_nodes(curve, m);
    approx.boundary_error = approx.max_error(&check, h);
    if !approx.boundary_error.is_finite() {
        return Err(Error::Numerical("fit produced a non-finite boundary error".into()));
    }
    Ok(approx)
}

/// Fits `u = Re p` with `deg p ≤ n` to boundary data `h` sampled at `m`
/// equispaced parameter values.
///
/// The real system has columns `[1, Re q₁..Re q_n, −Im q₁..−Im q_n]`; the
/// imaginary constant is left out because `u` only fixes `p` up to one.
pub fn fit_laplace_poly<H: Fn(Complex64) -> f64>(
    curve: &ParametricCurve,
    h: &H,
    n: usize,
    m: usize,
) -> Result<HarmonicApproximant> {
    fit_harmonic(curve, h, n, &[], m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_circle_basis_is_monomial() {
        let circle = ParametricCurve::unit_circle();
        let s = circle.sample(64).unwrap();
        let b = arnoldi_build(&s, 4).unwrap();
        assert!(b.center.norm() < 1e-15);
        assert!((b.scale - 1.0).abs() < 1e-15);
        for k in 0..4 {
            assert!((b.hessenberg[(k + 1, k)] - 1.0).norm() < 1e-12);
        }
        for (i, z) in s.nodes.iter().enumerate() {
            for j in 0..=4 {
                assert!((b.q[(i, j)] - z.powi(j as i32)).norm() < 1e-12);
            }
        }
        let w = b.eval(&[c(2.0, 0.0)]);
        for j in 0..=4 {
            assert!((w[(0, j)] - c(2f64.powi(j as i32), 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn degree_zero_basis() {
        let s = ParametricCurve::ellipse(1.5).unwrap().sample(16).unwrap();
        let b = arnoldi_build(&s, 0).unwrap();
        assert_eq!(b.q.cols(), 1);
        let norm = norm2(b.q.column(0)) / 4.0;
        assert!((norm - 1.0).abs() < 1e-15);
        let w = b.eval(&[c(7.0, -3.0), c(0.1, 0.2)]);
        assert_eq!(w[(0, 0)], b.q[(0, 0)]);
        assert_eq!(w[(1, 0)], b.q[(0, 0)]);
    }

    #[test]
    fn basis_is_orthonormal_and_reproducible() {
        for curve in ["iell:1.3", "ell:2", "trig:0,0.1,0,0,1,0,0.05+0.05i"] {
            let curve: ParametricCurve = curve.parse().unwrap();
            let s = curve.sample(2400).unwrap();
            let b = arnoldi_build(&s, 150).unwrap();
            assert!(!b.breakdown());
            assert!(b.orthonormality_defect() < 1e-10, "{curve}");
            let w = arnoldi_eval(&b, &s.nodes);
            let mut worst = 0.0f64;
            for j in 0..=150 {
                for i in 0..2400 {
                    worst = worst.max((w[(i, j)] - b.q[(i, j)]).norm());
                }
            }
            assert!(worst < 1e-10, "{curve}: {worst}");
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let s = ParametricCurve::ellipse(1.5).unwrap().sample(10).unwrap();
        assert!(matches!(arnoldi_build(&s, 5), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn breakdown_caps_degree() {
        // 6 nodes support at most degree 5; ask for more with an exactly
        // representable set (all nodes on a circle, 12 nodes, degree 5 fits
        // but the monomials z^k for k ≥ 12 alias).
        let circle = ParametricCurve::unit_circle();
        let s = circle.sample(12).unwrap();
        let b = arnoldi_build(&s, 5).unwrap();
        assert!(!b.breakdown());
        // three distinct nodes repeated: the space of functions has dim 3
        let nodes: Vec<Complex64> = (0..12).map(|k| Complex64::from_polar(1.0, TAU * (k % 3) as f64 / 3.0)).collect();
        let s = BoundarySample { params: (0..12).map(|k| k as f64 * 0.1).collect(), nodes };
        let b = arnoldi_build(&s, 5).unwrap();
        assert!(b.breakdown());
        assert_eq!(b.degree, 2);
        assert!(b.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn fits_real_part_of_z_on_circle() {
        let circle = ParametricCurve::unit_circle();
        let fit = fit_laplace_poly(&circle, &|z: Complex64| z.re, 1, 64).unwrap();
        assert!(fit.boundary_error < 1e-12);
    }

    #[test]
    fn reproduces_cubic_on_ellipse() {
        let e = ParametricCurve::ellipse(1.5).unwrap();
        let h = |z: Complex64| z.powi(3).re + 2.0;
        let fit = fit_laplace_poly(&e, &h, 3, 200).unwrap();
        assert!(fit.boundary_error < 1e-10);
        let pts: Vec<Complex64> = (0..50).map(|k| 0.6 * e.point(0.37 * k as f64)).collect();
        for (u, z) in fit.evaluate(&pts).iter().zip(&pts) {
            assert!((u - h(*z)).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_data() {
        for spec in ["iell:1.3", "ell:1.2", "trig:0,0,1"] {
            let curve: ParametricCurve = spec.parse().unwrap();
            let fit = fit_laplace_poly(&curve, &|_| 5.0, 0, 50).unwrap();
            let pts = [c(0.0, 0.0), c(0.1, 0.2), c(3.0, -1.0)];
            for u in fit.evaluate(&pts) {
                assert!((u - 5.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_error_is_recomputable() {
        let curve = ParametricCurve::inverted_ellipse(1.8).unwrap();
        let h = |z: Complex64| (z.im + 1.0).powi(2);
        let fit = fit_laplace_poly(&curve, &h, 30, 400).unwrap();
        let nodes = validation_nodes(&curve, 400);
        let again = fit.max_error(&nodes, &h);
        assert!((again - fit.boundary_error).abs() <= 1e-12 * fit.boundary_error.max(1.0));
        assert_eq!(fit.validation_points, 1600);
    }

    #[test]
    fn boundary_error_decreases_with_degree() {
        let curve = ParametricCurve::inverted_ellipse(1.8).unwrap();
        let h = |z: Complex64| (z.im + 1.0).powi(2);
        let errs: Vec<f64> = (0..8)
            .map(|k| fit_laplace_poly(&curve, &h, 10 + 10 * k, 1500).unwrap().boundary_error)
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-13, "{errs:?}");
        }
    }

    #[test]
    fn too_few_rows_for_fit() {
        let e = ParametricCurve::ellipse(1.5).unwrap();
        assert!(matches!(fit_laplace_poly(&e, &|z: Complex64| z.re, 10, 40), Err(Error::TooFewSamples { .. })));
    }
}
