//! Dense complex vectors and matrices of small dimension.
//!
//! Everything here is sized for the two-level models this crate studies, with
//! a hard cap of [`MAX_DIM`]. Storage is a flat row-major `Vec`.
//!
//! The matrix exponential [`mat_exp`] returns `exp(-i H t)`. For `2x2` input it
//! uses a closed form that stays exact at defective (exceptional) points, where
//! any eigen-decomposition route breaks down; larger matrices go through
//! scaling and squaring on a truncated Taylor series.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 16;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Number of Taylor terms summed after scaling in [`exp_series`].
const SERIES_TERMS: usize = 20;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(())
}

fn all_finite(data: &[C64]) -> bool {
    data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        check_dim(data.len())?;
        if !all_finite(&data) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self { data })
    }

    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::new(data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![ZERO; dim],
        }
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.data.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Unit vector along `self`, or `None` for a zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl TryFrom<Vec<C64>> for ComplexVector {
    type Error = Error;
    fn try_from(data: Vec<C64>) -> Result<Self> {
        Self::new(data)
    }
}

impl From<ComplexVector> for Vec<C64> {
    fn from(v: ComplexVector) -> Self {
        v.data
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ComplexVector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        ComplexVector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<C64> for &ComplexVector {
    type Output = ComplexVector;
    fn mul(self, c: C64) -> ComplexVector {
        self.scale(c)
    }
}

/// `<u|v>`, antilinear in `u`.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Result<C64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(dot(u, v))
}

// Unchecked inner product for internal use once dimensions are known to agree.
pub(crate) fn dot(u: &ComplexVector, v: &ComplexVector) -> C64 {
    debug_assert_eq!(u.dim(), v.dim());
    u.data.iter().zip(&v.data).map(|(a, b)| a.conj() * b).sum()
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<C64>>", into = "Vec<Vec<C64>>")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diag(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Projector-like outer product `|u><v|`.
    pub fn outer(u: &ComplexVector, v: &ComplexVector) -> Self {
        assert_eq!(u.dim(), v.dim(), "outer product dimension mismatch");
        Self::from_fn(u.dim(), |i, j| u[i] * v[j].conj())
    }

    /// `|v><v|`.
    pub fn projector(v: &ComplexVector) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(<[C64]>::to_vec).collect()
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `self + c * I`.
    pub fn shift(&self, c: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] += c;
        }
        out
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim, v.dim(), "matrix-vector dimension mismatch");
        let data = self
            .data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
            .collect();
        ComplexVector { data }
    }

    /// `<v|M|v>`.
    pub fn expectation(&self, v: &ComplexVector) -> C64 {
        dot(v, &self.apply(v))
    }

    /// Largest entry modulus, `||M||_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (largest absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `||M - M^dagger||_max`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Positive semidefiniteness up to `tol`: Cholesky of `M + tol*I` must succeed.
    /// Only meaningful for Hermitian input.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        let a = self.shift(C64::new(tol, 0.0));
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = C64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl TryFrom<Vec<Vec<C64>>> for ComplexMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<C64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<ComplexMatrix> for Vec<Vec<C64>> {
    fn from(m: ComplexMatrix) -> Self {
        m.rows()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

impl Mul<&ComplexVector> for &ComplexMatrix {
    type Output = ComplexVector;
    fn mul(self, rhs: &ComplexVector) -> ComplexVector {
        self.apply(rhs)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, c: C64) -> ComplexMatrix {
        self.scale(c)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

/// `exp(-i H t)`.
///
/// `2x2` input takes the closed form [`mat_exp_2x2`]; a `1x1` input is a scalar
/// phase; anything larger goes through [`exp_series`].
pub fn mat_exp(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    match h.dim() {
        1 => ComplexMatrix::diag(&[(-I * h[(0, 0)] * t).exp()]),
        2 => mat_exp_2x2(h, t),
        _ => mat_exp_series(h, t),
    }
}

/// Generic-path `exp(-i H t)`, regardless of dimension.
pub fn mat_exp_series(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    exp_series(&h.scale(-I * t))
}

/// `mu` and `nu` of a `2x2` matrix: eigenvalues are `mu +- sqrt(nu)`.
pub fn split_2x2(h: &ComplexMatrix) -> (C64, C64) {
    assert_eq!(h.dim(), 2, "split_2x2 requires a 2x2 matrix");
    let mu = (h[(0, 0)] + h[(1, 1)]) * 0.5;
    let half_diff = (h[(0, 0)] - h[(1, 1)]) * 0.5;
    let nu = half_diff * half_diff + h[(0, 1)] * h[(1, 0)];
    (mu, nu)
}

/// Whether `nu` is small enough that the `2x2` matrix is treated as defective.
pub fn is_defective_2x2(h: &ComplexMatrix) -> bool {
    let (_, nu) = split_2x2(h);
    nu.norm() < 1e-12 * h.max_abs().powi(2).max(1.0)
}

/// Closed-form `exp(-i H t)` for `2x2` `H`.
///
/// With `B = H - mu I` we have `B^2 = nu I`, so the series collapses to
/// `e^{-i mu t} [cos(q t) I - i sin(q t)/q B]` with `q = sqrt(nu)`. Both
/// `cos(q t)` and `sin(q t)/q` are even in `q`, so the square-root branch is
/// irrelevant. At `nu = 0` the limit `e^{-i mu t} [I - i t B]` is used.
pub fn mat_exp_2x2(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let (mu, nu) = split_2x2(h);
    let b = h.shift(-mu);
    let phase = (-I * mu * t).exp();
    let (c, sinc) = if is_defective_2x2(h) {
        (ONE, C64::new(t, 0.0))
    } else {
        let q = nu.sqrt();
        ((q * t).cos(), (q * t).sin() / q)
    };
    let mut out = b.scale(-I * sinc * phase);
    let diag = c * phase;
    out[(0, 0)] += diag;
    out[(1, 1)] += diag;
    out
}

/// `exp(A)` by scaling and squaring on a truncated Taylor series.
///
/// `A` is scaled by `2^-s` until its induced 1-norm is at most `1/2`, the
/// series is summed to [`SERIES_TERMS`] terms and the result squared `s` times.
pub fn exp_series(a: &ComplexMatrix) -> ComplexMatrix {
    let norm = a.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(C64::new(0.5f64.powi(squarings), 0.0));

    let n = a.dim();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=SERIES_TERMS {
        term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Eigen-decomposition of a Hermitian `2x2` matrix, eigenvalues ascending.
pub fn hermitian_eigh_2x2(m: &ComplexMatrix) -> ([f64; 2], [ComplexVector; 2]) {
    assert_eq!(m.dim(), 2, "hermitian_eigh_2x2 requires a 2x2 matrix");
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
    let values = [mean - radius, mean + radius];

    if b.norm() <= 1e-300 {
        let (lo, hi) = if a <= d { (0, 1) } else { (1, 0) };
        return (
            values,
            [ComplexVector::basis(2, lo), ComplexVector::basis(2, hi)],
        );
    }
    let vector_for = |lambda: f64| {
        // Two equivalent null vectors of (M - lambda I); keep the better conditioned one.
        let v1 = ComplexVector {
            data: vec![b, C64::new(lambda - a, 0.0)],
        };
        let v2 = ComplexVector {
            data: vec![C64::new(lambda - d, 0.0), b.conj()],
        };
        let v = if v1.norm_sqr() >= v2.norm_sqr() {
            v1
        } else {
            v2
        };
        v.normalized().expect("non-zero eigenvector candidate")
    };
    (values, [vector_for(values[0]), vector_for(values[1])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_of_identity_and_nilpotent() {
        assert_eq!(
            ComplexMatrix::identity(2).adjoint(),
            ComplexMatrix::identity(2)
        );
        let m = ComplexMatrix::from_rows(vec![vec![ZERO, I], vec![ZERO, ZERO]]).unwrap();
        let expected = ComplexMatrix::from_rows(vec![vec![ZERO, ZERO], vec![-I, ZERO]]).unwrap();
        assert_eq!(m.adjoint(), expected);
    }

    #[test]
    fn inner_rejects_mismatched_dims() {
        let u = ComplexVector::basis(2, 0);
        let v = ComplexVector::basis(3, 0);
        assert_eq!(
            inner(&u, &v),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert_eq!(inner(&u, &u).unwrap(), ONE);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ONE]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(vec![vec![c(f64::NAN, 0.0)]]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            ComplexVector::new(vec![]),
            Err(Error::UnsupportedDimension(0))
        ));
        assert!(ComplexVector::new(vec![ONE; MAX_DIM + 1]).is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for t in [-3.0, 0.0, 0.7, 12.0] {
            for dim in [1, 2, 3, 5] {
                let u = mat_exp(&ComplexMatrix::zeros(dim), t);
                assert!(u.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_pauli_x() {
        // exp(-i sigma_x t) = cos t I - i sin t sigma_x
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let t = 0.37_f64;
        let u = mat_exp(&sx, t);
        let expected = ComplexMatrix::from_rows(vec![
            vec![c(t.cos(), 0.0), c(0.0, -t.sin())],
            vec![c(0.0, -t.sin()), c(t.cos(), 0.0)],
        ])
        .unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn defective_branch_at_exceptional_point() {
        // [[2i, 2], [2, -2i]]: nu = (2i)^2 + 4 = 0, B^2 = 0
        let h = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 2.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, -2.0)],
        ])
        .unwrap();
        assert!(is_defective_2x2(&h));
        for t in [0.0, 0.5, 1.0, 3.0] {
            let closed = mat_exp(&h, t);
            let expected = &ComplexMatrix::identity(2) - &h.scale(I * t);
            assert!(closed.max_abs_diff(&expected) < 1e-14);
            assert!(closed.max_abs_diff(&mat_exp_series(&h, t)) < 1e-10);
        }
    }

    #[test]
    fn hermitian_eigh_reconstructs() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.5, 0.0), c(0.3, -0.8)],
            vec![c(0.3, 0.8), c(-0.4, 0.0)],
        ])
        .unwrap();
        let (vals, vecs) = hermitian_eigh_2x2(&m);
        assert!(vals[0] <= vals[1]);
        for (lambda, v) in vals.iter().zip(&vecs) {
            let residual = &m.apply(v) - &v.scale(C64::new(*lambda, 0.0));
            assert!(residual.norm() < 1e-14);
        }
        assert!(dot(&vecs[0], &vecs[1]).norm() < 1e-14);

        let diag = ComplexMatrix::diag(&[c(2.0, 0.0), c(-1.0, 0.0)]);
        let (vals, vecs) = hermitian_eigh_2x2(&diag);
        assert_eq!(vals, [-1.0, 2.0]);
        assert_eq!(vecs[0], ComplexVector::basis(2, 1));
    }

    #[test]
    fn psd_check() {
        let p = ComplexMatrix::projector(&ComplexVector::basis(3, 1));
        assert!(p.is_positive_semidefinite(1e-10));
        let m = ComplexMatrix::diag(&[ONE, c(-1e-3, 0.0)]);
        assert!(!m.is_positive_semidefinite(1e-10));
    }
}
