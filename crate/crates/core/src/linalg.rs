//! Dense kernels: Householder least squares, smallest right singular vector,
//! and the eigenvalue problem behind barycentric pole computation.
//!
//! Matrices are stored column-major so that Householder updates stream over
//! contiguous columns. Everything is generic over real and complex scalars;
//! the Laplace fits are real, the AAA steps complex.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real or complex field element with `f64` moduli.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}

impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Dense `rows × cols` matrix, column-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T = Complex64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<T>>) -> Result<Self> {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for col in columns {
            if col.len() != rows {
                return Err(Error::Dimension(format!("column of length {} in a {rows}-row matrix", col.len())));
            }
            data.extend(col);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate().take(self.cols) {
            for (yi, &aij) in y.iter_mut().zip(self.column(j)) {
                *yi += aij * xj;
            }
        }
        y
    }

    /// `Aᴴ x`.
    pub fn adjoint_mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.cols).map(|j| dot_conj(self.column(j), x)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conjugate())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let y = self.mul_vec(other.column(j));
            out.column_mut(j).copy_from_slice(&y);
        }
        Ok(out)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.rows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.rows + i]
    }
}

/// `Σ conj(a_i) b_i`, with four accumulators so the real case vectorizes.
pub fn dot_conj<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k].conjugate() * y[k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x.conjugate() * *y;
    }
    s
}

/// `y ← y − α x`.
fn sub_scaled<T: Scalar>(y: &mut [T], alpha: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi -= alpha * xi;
    }
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    let scale = x.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|v| (v.modulus() / scale).powi(2)).sum();
    scale * s.sqrt()
}

/// Householder QR computed in place: `R` in the upper triangle, reflector
/// tails below the diagonal.
struct Householder<T> {
    qr: DenseMatrix<T>,
    tau: Vec<T>,
}

impl<T: Scalar> Householder<T> {
    fn factor(mut a: DenseMatrix<T>) -> Self {
        let (m, n) = (a.rows, a.cols);
        let steps = n.min(m);
        let mut tau = vec![T::zero(); steps];
        let mut v = vec![T::zero(); m];
        for k in 0..steps {
            let col = &mut a.data[k * m..(k + 1) * m];
            let alpha = col[k];
            let tail_norm = norm2(&col[k + 1..]);
            if tail_norm == 0.0 && alpha.imaginary() == 0.0 {
                continue;
            }
            let norm = alpha.modulus().hypot(tail_norm);
            let beta = if alpha.real() >= 0.0 { -norm } else { norm };
            let t = (T::from_real(beta) - alpha).unscale(beta);
            let inv = (alpha - T::from_real(beta)).recip();
            for x in &mut col[k + 1..] {
                *x *= inv;
            }
            col[k] = T::from_real(beta);
            tau[k] = t;

            v[k] = T::one();
            v[k + 1..m].copy_from_slice(&col[k + 1..]);
            let vk = &v[k..m];
            let ct = t.conjugate();
            for j in k + 1..n {
                let cj = &mut a.data[j * m + k..(j + 1) * m];
                let s = dot_conj(vk, cj);
                sub_scaled(cj, ct * s, vk);
            }
        }
        Self { qr: a, tau }
    }

    /// Overwrites `b` with `Qᴴ b`.
    fn apply_qh(&self, b: &mut [T]) {
        let m = self.qr.rows;
        let mut v = vec![T::zero(); m];
        for (k, &t) in self.tau.iter().enumerate() {
            if t == T::zero() {
                continue;
            }
            v[k] = T::one();
            v[k + 1..].copy_from_slice(&self.qr.column(k)[k + 1..]);
            let s = dot_conj(&v[k..], &b[k..]);
            sub_scaled(&mut b[k..], t.conjugate() * s, &v[k..]);
        }
    }

    fn r_diag(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.tau.len()).map(|k| self.qr[(k, k)].modulus())
    }

    /// Leading `n × n` block of `R`.
    fn r_block(&self) -> DMatrix<T> {
        let n = self.qr.cols;
        DMatrix::from_fn(n, n, |i, j| if i <= j { self.qr[(i, j)] } else { T::zero() })
    }

    fn back_substitute(&self, c: &[T]) -> Vec<T> {
        let n = self.qr.cols;
        let mut x = c[..n].to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.qr[(i, j)] * x[j];
            }
            x[i] = s / self.qr[(i, i)];
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstsqResult<T = Complex64> {
    pub coefficients: Vec<T>,
    /// `‖Ax − b‖₂` of the returned `x`.
    pub residual_norm: f64,
    /// Set when `R` is singular to working precision; the coefficients are
    /// then the minimum-norm solution of the column-equilibrated system.
    pub rank_deficient: bool,
}

/// Least-squares solution of `Ax ≈ b` via Householder QR.
pub fn lstsq<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<LstsqResult<T>> {
    let (m, n) = (a.rows, a.cols);
    if n == 0 || m < n {
        return Err(Error::Dimension(format!("least squares needs rows ≥ cols ≥ 1, got {m}x{n}")));
    }
    if b.len() != m {
        return Err(Error::Dimension(format!("right-hand side has {} entries, matrix has {m} rows", b.len())));
    }
    // Equilibrate columns to unit norm so the rank decision is not skewed by
    // column scaling; the solution is unscaled at the end.
    let mut scaled = a.clone();
    let col_scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = norm2(scaled.column(j));
            let s = if s > 0.0 && s.is_finite() { s } else { 1.0 };
            for x in scaled.column_mut(j) {
                *x = x.unscale(s);
            }
            s
        })
        .collect();
    let qr = Householder::factor(scaled);
    let mut c = b.to_vec();
    qr.apply_qh(&mut c);

    let rmax = qr.r_diag().fold(0.0, f64::max);
    let cutoff = n as f64 * f64::EPSILON * rmax;
    let rank_deficient = rmax == 0.0 || qr.r_diag().any(|d| d <= cutoff);
    let mut coefficients = if rank_deficient {
        min_norm_cod(a, &col_scale, b)?
    } else {
        qr.back_substitute(&c)
    };
    for (x, s) in coefficients.iter_mut().zip(&col_scale) {
        *x = x.unscale(*s);
    }
    if coefficients.iter().any(|x| !x.modulus().is_finite()) {
        return Err(Error::Numerical("least-squares solution is not finite".into()));
    }
    let mut r = a.mul_vec(&coefficients);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    Ok(LstsqResult { coefficients, residual_norm: norm2(&r), rank_deficient })
}

/// Minimum-norm least-squares solution of the column-equilibrated system
/// through a complete orthogonal decomposition: column-pivoted QR
/// `A P = Q R` truncated at the numerical rank `r`, then `R₁ᴴ = Z L` for the
/// leading `r` rows, so that `x = P Z L⁻ᴴ (Qᴴb)₁`.
///
/// This avoids an SVD of the graded triangular factor, which the bidiagonal
/// SVD in nalgebra does not always reconstruct to working precision.
fn min_norm_cod<T: Scalar>(a: &DenseMatrix<T>, col_scale: &[f64], b: &[T]) -> Result<Vec<T>> {
    let (m, n) = (a.rows, a.cols);
    let scaled = DMatrix::from_fn(m, n, |i, j| a[(i, j)].unscale(col_scale[j]));
    let (q, r, p) = scaled.col_piv_qr().unpack();
    let c = q.adjoint() * nalgebra::DVector::from_column_slice(b);
    let rmax = r[(0, 0)].modulus();
    let cutoff = n as f64 * f64::EPSILON * rmax;
    let rank = (0..n).take_while(|&k| r[(k, k)].modulus() > cutoff).count();
    let mut x = nalgebra::DVector::zeros(n);
    if rank > 0 {
        let (z, l) = r.rows(0, rank).adjoint().qr().unpack();
        let y = l
            .adjoint()
            .solve_lower_triangular(&c.rows(0, rank).into_owned())
            .ok_or_else(|| Error::Numerical("singular triangular factor".into()))?;
        x = z * y;
    }
    p.inv_permute_rows(&mut x);
    Ok(x.iter().copied().collect())
}

/// Unit vector `v` minimizing `‖Av‖₂`: the right singular vector of the
/// smallest singular value. Computed from the SVD of the QR factor `R`.
pub fn min_singular_vector<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<T>> {
    let n = a.cols;
    if n == 0 {
        return Err(Error::Dimension("matrix has no columns".into()));
    }
    let square;
    let a = if a.rows < n {
        let mut padded = DenseMatrix::zeros(n, n);
        for j in 0..n {
            padded.column_mut(j)[..a.rows].copy_from_slice(a.column(j));
        }
        square = padded;
        &square
    } else {
        a
    };
    let qr = Householder::factor(a.clone());
    let svd = qr.r_block().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| Error::Numerical("empty SVD".into()))?;
    let v: Vec<T> = (0..n).map(|j| v_t[(k, j)].conjugate()).collect();
    let nv = norm2(&v);
    Ok(v.into_iter().map(|x| x.unscale(nv)).collect())
}

/// Finite poles of the barycentric rational with the given support points
/// and weights: the zeros of `Σ w_j/(z − z_j)`.
///
/// These are the finite eigenvalues of the arrowhead pencil
/// `([0 wᵀ; 1 diag(z)], diag(0, 1, …, 1))`. Its two infinite eigenvalues
/// are removed exactly by restricting to the subspace `wᵀx = 0`, which
/// leaves an ordinary `(m−1) × (m−1)` eigenproblem. Eigenvalues larger than
/// `1e13 · max|z_j|` are treated as infinite and dropped.
pub fn generalized_eig_arrowhead(support: &[Complex64], weights: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = support.len();
    if weights.len() != m {
        return Err(Error::Dimension("support and weights differ in length".into()));
    }
    if m == 0 || weights.iter().all(|w| w.norm() == 0.0) {
        return Err(Error::Domain("weights must not all vanish".into()));
    }
    if m == 1 {
        return Ok(Vec::new());
    }
    // Householder reflector P (Hermitian, unitary) with P e₁ ∝ conj(w).
    let x: Vec<Complex64> = weights.iter().map(|w| w.conj()).collect();
    let xnorm = norm2(&x);
    let phase = if x[0].norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
    let mut v = x.clone();
    v[0] += phase * xnorm;
    let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let p = |i: usize, j: usize| -> Complex64 {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) - 2.0 * v[i] * v[j].conj() / vnorm2
    };
    let pm = DMatrix::from_fn(m, m, p);
    let q1 = pm.column(0).into_owned();
    let q2 = pm.columns(1, m - 1).into_owned();

    // C = Q₂ᴴ D Q₂ − (Q₂ᴴ e)(q₁ᴴ D Q₂)/(q₁ᴴ e)
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(support));
    let dq2 = &d * &q2;
    let a22 = q2.adjoint() * &dq2;
    let q2e = q2.adjoint() * nalgebra::DVector::from_element(m, Complex64::new(1.0, 0.0));
    let q1d = q1.adjoint() * &dq2;
    let mut q1e: Complex64 = q1.iter().map(|c| c.conj()).sum();
    let wscale: f64 = weights.iter().map(|w| w.norm()).sum::<f64>() / xnorm;
    if q1e.norm() <= f64::EPSILON * wscale {
        // Degree drop: Σ w_j = 0 puts one pole at infinity.
        q1e = Complex64::new(f64::EPSILON * wscale, 0.0);
    }
    let c = a22 - (q2e * q1d) / q1e;

    let schur = nalgebra::Schur::try_new(c, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let eig = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur form is not triangular".into()))?;
    let zmax = support.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let limit = 1e13 * zmax;
    Ok(eig.iter().copied().filter(|l| l.re.is_finite() && l.im.is_finite() && l.norm() <= limit).collect())
}
