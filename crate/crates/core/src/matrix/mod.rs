//! Dense small-matrix complex linear algebra.
//!
//! Everything in this crate runs on `d x d` matrices with `d` in the single
//! digits, so all algorithms are chosen for robustness rather than asymptotic
//! speed: LU with partial pivoting for determinants, Gauss-Jordan for
//! inverses, the division-free Faddeev-LeVerrier recursion for adjugates
//! (which must work at exactly singular matrices), and cyclic Jacobi
//! rotations for Hermitian eigendecompositions.

mod eigen;
pub mod fd;

pub use eigen::Eigendecomposition;

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use thiserror::Error;

/// Errors from matrix construction and inversion.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is singular (|det| = {det_abs:.3e} <= tolerance {tol:.3e})")]
    SingularMatrix { det_abs: f64, tol: f64 },
    #[error("matrix is not Hermitian (max |L - L*| = {defect:.3e} > {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("entry count {got} does not match dim {dim} squared")]
    BadEntryCount { dim: usize, got: usize },
}

/// Asymmetry allowed when constructing a [`HermitianMatrix`]; inputs within
/// this entrywise tolerance are symmetrized, anything worse is rejected.
pub const HERMITIAN_CONSTRUCTION_TOL: f64 = 1e-12;

/// A dense `d x d` complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries; `entries.len()` must equal `dim * dim`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, MatrixError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(MatrixError::BadEntryCount {
                dim,
                got: entries.len(),
            });
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        ComplexMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from complex entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(
            &diag
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// Build from real row-major entries (imaginary parts zero).
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self, MatrixError> {
        Self::new(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Entrywise maximum modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Entrywise comparison in the max norm.
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.dim == other.dim && (self - other).max_norm() <= tol
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Determinant by LU with partial pivoting. Exact for `d = 1`; singular
    /// input yields 0 up to round-off.
    pub fn det(&self) -> Complex64 {
        let d = self.dim;
        if d == 1 {
            return self.entries[0];
        }
        let mut a = self.entries.clone();
        let mut sign = Complex64::new(1.0, 0.0);
        for col in 0..d {
            let mut piv = col;
            let mut best = a[col * d + col].norm();
            for row in col + 1..d {
                let v = a[row * d + col].norm();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if piv != col {
                for k in 0..d {
                    a.swap(col * d + k, piv * d + k);
                }
                sign = -sign;
            }
            let pivot = a[col * d + col];
            for row in col + 1..d {
                let factor = a[row * d + col] / pivot;
                a[row * d + col] = Complex64::new(0.0, 0.0);
                for k in col + 1..d {
                    let sub = factor * a[col * d + k];
                    a[row * d + k] -= sub;
                }
            }
        }
        let mut det = sign;
        for i in 0..d {
            det *= a[i * d + i];
        }
        det
    }

    /// Adjugate by the Faddeev-LeVerrier recursion.
    ///
    /// Division-free, so exactly singular matrices are handled without any
    /// special case; satisfies `m * adj(m) = det(m) * I`. For `d = 1` the
    /// adjugate is `[[1]]` regardless of the entry.
    pub fn adjugate(&self) -> ComplexMatrix {
        let d = self.dim;
        // c_n = 1, M_1 = I; M_{k+1} = A M_k + c_{n-k} I with
        // c_{n-k} = -tr(A M_k)/k; then adj(A) = (-1)^{n-1} M_n.
        let mut m_k = ComplexMatrix::identity(d);
        for k in 1..d {
            let am = self * &m_k;
            let c = -am.trace() / (k as f64);
            m_k = &am + &ComplexMatrix::identity(d).scale(c);
        }
        if d.is_multiple_of(2) {
            m_k = m_k.scale(Complex64::new(-1.0, 0.0));
        }
        m_k
    }

    /// Inverse by Gauss-Jordan with partial pivoting.
    ///
    /// Rejects matrices whose determinant is below `1e-12` times the natural
    /// determinant scale `max(1, max_norm)^d`.
    pub fn inverse(&self) -> Result<ComplexMatrix, MatrixError> {
        let scale = self.max_norm().max(1.0).powi(self.dim as i32);
        self.inverse_with_tol(1e-12 * scale)
    }

    /// Inverse with an explicit absolute singularity threshold on `|det|`.
    pub fn inverse_with_tol(&self, singular_tol: f64) -> Result<ComplexMatrix, MatrixError> {
        let det_abs = self.det().norm();
        if det_abs <= singular_tol {
            return Err(MatrixError::SingularMatrix {
                det_abs,
                tol: singular_tol,
            });
        }
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut inv = ComplexMatrix::identity(d);
        for col in 0..d {
            let mut piv = col;
            let mut best = a[col * d + col].norm();
            for row in col + 1..d {
                let v = a[row * d + col].norm();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if best == 0.0 {
                // det check above makes this unreachable in practice
                return Err(MatrixError::SingularMatrix {
                    det_abs,
                    tol: singular_tol,
                });
            }
            if piv != col {
                for k in 0..d {
                    a.swap(col * d + k, piv * d + k);
                    inv.entries.swap(col * d + k, piv * d + k);
                }
            }
            let pivot = a[col * d + col];
            for k in 0..d {
                a[col * d + k] /= pivot;
                inv.entries[col * d + k] /= pivot;
            }
            for row in 0..d {
                if row == col {
                    continue;
                }
                let factor = a[row * d + col];
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..d {
                    let s = factor * a[col * d + k];
                    a[row * d + k] -= s;
                    let s = factor * inv.entries[col * d + k];
                    inv.entries[row * d + k] -= s;
                }
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>12.5e}{:+.5e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
                ComplexMatrix {
                    dim: self.dim,
                    entries: self
                        .entries
                        .iter()
                        .zip(&rhs.entries)
                        .map(|(&a, &b)| a $op b)
                        .collect(),
                }
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let add = aik * rhs[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }
}

/// A Hermitian `d x d` matrix. Construction symmetrizes via `(L + L*)/2`
/// after checking the input is Hermitian within [`HERMITIAN_CONSTRUCTION_TOL`]
/// relative to its size.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, MatrixError> {
        let tol = HERMITIAN_CONSTRUCTION_TOL * m.max_norm().max(1.0);
        let defect = m.hermitian_defect();
        if defect > tol {
            return Err(MatrixError::NotHermitian { defect, tol });
        }
        let sym = (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0));
        Ok(HermitianMatrix { inner: sym })
    }

    /// Real diagonal matrix, trivially Hermitian.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        HermitianMatrix {
            inner: ComplexMatrix::from_real_diag(diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    /// Eigendecomposition by cyclic Jacobi rotations; eigenvalues ascending.
    pub fn eigh(&self) -> Eigendecomposition {
        eigen::jacobi_hermitian(&self.inner)
    }

    /// Eigenvalues only, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().values
    }

    /// Apply a scalar function to the spectrum: `U diag(f(d_k)) U*`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        self.eigh().spectral_map(f)
    }
}

/// `i * sqrt(shift * I - q)` through the spectral decomposition of `q`.
///
/// Each eigenvalue `d_k` maps to `i * sqrt(shift - d_k)` with the principal
/// square root (branch cut on the negative real axis), so for
/// `shift < min eig(q)` the result is the negative-definite real matrix
/// `-sqrt(q - shift * I)`.
pub fn hermitian_sqrt(q: &HermitianMatrix, shift: f64) -> ComplexMatrix {
    q.spectral_map(|d_k| Complex64::i() * Complex64::new(shift - d_k, 0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn det_1x1_is_entry() {
        let m = ComplexMatrix::from_real(1, &[2.0]).unwrap();
        assert_eq!(m.det(), c(2.0, 0.0));
    }

    #[test]
    fn det_identity() {
        assert!(close(ComplexMatrix::identity(3).det(), c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn det_2x2_cofactor_oracle() {
        // [[1,2],[3,4]] -> 1*4 - 2*3 = -2 by hand cofactor expansion
        let m = ComplexMatrix::from_real(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(close(m.det(), c(-2.0, 0.0), 1e-14));
    }

    #[test]
    fn adjugate_of_scalar_is_one() {
        let m = ComplexMatrix::from_real(1, &[0.0]).unwrap();
        assert_eq!(m.adjugate(), ComplexMatrix::identity(1));
        let m = ComplexMatrix::from_real(1, &[7.5]).unwrap();
        assert_eq!(m.adjugate(), ComplexMatrix::identity(1));
    }

    #[test]
    fn adjugate_2x2_pattern() {
        let (a, b, cc, d) = (c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0), c(0.0, 4.0));
        let m = ComplexMatrix::new(2, vec![a, b, cc, d]).unwrap();
        let adj = m.adjugate();
        assert!(close(adj[(0, 0)], d, 1e-14));
        assert!(close(adj[(0, 1)], -b, 1e-14));
        assert!(close(adj[(1, 0)], -cc, 1e-14));
        assert!(close(adj[(1, 1)], a, 1e-14));
    }

    #[test]
    fn adjugate_singular_diag() {
        // adj(diag(0,1)) = diag(1,0) by cofactor expansion
        let m = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let adj = m.adjugate();
        assert!(adj.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-14));
    }

    #[test]
    fn inverse_identity_and_diag() {
        let m = ComplexMatrix::identity(2);
        assert!(m.inverse().unwrap().approx_eq(&m, 1e-12));

        let m = ComplexMatrix::from_real_diag(&[-1.0, -1.0]);
        assert!(m.inverse().unwrap().approx_eq(&m, 1e-12));

        // reciprocal-of-diagonal oracle
        let m = ComplexMatrix::from_real_diag(&[2.0, 4.0]);
        let expect = ComplexMatrix::from_real_diag(&[0.5, 0.25]);
        assert!(m.inverse().unwrap().approx_eq(&expect, 1e-12));
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!(matches!(
            m.inverse(),
            Err(MatrixError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn trace_examples() {
        assert!(close(ComplexMatrix::identity(3).trace(), c(3.0, 0.0), 0.0));
        let prod = &ComplexMatrix::from_real_diag(&[1.0, 0.0])
            * &ComplexMatrix::from_real_diag(&[-1.0, -1.0]);
        assert!(close(prod.trace(), c(-1.0, 0.0), 0.0));
        let m = ComplexMatrix::from_real(2, &[0.0, 7.0, 9.0, 0.0]).unwrap();
        assert!(close(m.trace(), c(0.0, 0.0), 0.0));
    }

    #[test]
    fn hermitian_construction_symmetrizes() {
        let m = ComplexMatrix::new(2, vec![c(1.0, 0.0), c(0.5, 1e-13), c(0.5, 0.0), c(2.0, 0.0)])
            .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        assert!(h.matrix().hermitian_defect() <= 1e-16);
    }

    #[test]
    fn hermitian_construction_rejects_asymmetry() {
        let m = ComplexMatrix::from_real(2, &[1.0, 0.5, 0.9, 2.0]).unwrap();
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(MatrixError::NotHermitian { .. })
        ));
    }

    #[test]
    fn hermitian_sqrt_below_spectrum_is_negative_root() {
        // i*sqrt(-4 - 0) = i * 2i = -2
        let q = HermitianMatrix::from_real_diag(&[0.0]);
        let m = hermitian_sqrt(&q, -4.0);
        assert!(close(m[(0, 0)], c(-2.0, 0.0), 1e-14));
    }

    #[test]
    fn hermitian_sqrt_at_spectrum_edge_is_zero() {
        let q = HermitianMatrix::from_real_diag(&[1.0, 1.0]);
        let m = hermitian_sqrt(&q, 1.0);
        assert!(m.max_norm() <= 1e-12);
    }

    #[test]
    fn hermitian_sqrt_per_eigenvalue() {
        let q = HermitianMatrix::from_real_diag(&[0.0, 5.0]);
        let m = hermitian_sqrt(&q, -4.0);
        let expect = ComplexMatrix::from_real_diag(&[-2.0, -3.0]);
        assert!(m.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn hermitian_sqrt_above_spectrum_is_imaginary() {
        // lambda above q: i*sqrt(positive) stays on the positive imaginary axis
        let q = HermitianMatrix::from_real_diag(&[0.0]);
        let m = hermitian_sqrt(&q, 9.0);
        assert!(close(m[(0, 0)], c(0.0, 3.0), 1e-14));
    }

    #[test]
    fn adjugate_times_matrix_is_det_identity_nontrivial() {
        let m = ComplexMatrix::new(
            3,
            vec![
                c(0.3, -0.2),
                c(1.0, 0.4),
                c(-0.7, 0.0),
                c(0.0, 0.9),
                c(-0.1, -0.1),
                c(0.5, 0.2),
                c(0.8, 0.0),
                c(0.2, -0.6),
                c(-0.4, 0.1),
            ],
        )
        .unwrap();
        let lhs = &m * &m.adjugate();
        let rhs = ComplexMatrix::identity(3).scale(m.det());
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }
}
