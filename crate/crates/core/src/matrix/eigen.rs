//! Hermitian eigendecomposition by cyclic Jacobi rotations.

use super::ComplexMatrix;
use num_complex::Complex64;

/// Result of [`jacobi_hermitian`]: `h = vectors * diag(values) * vectors^*`
/// with `values` sorted ascending and `vectors` unitary (columns are the
/// eigenvectors, in the order of `values`).
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigendecomposition {
    /// `vectors * diag(f(values)) * vectors^*`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let mapped: Vec<Complex64> = self.values.iter().map(|&d| f(d)).collect();
        let diag = ComplexMatrix::from_diag(&mapped);
        &(&self.vectors * &diag) * &self.vectors.adjoint()
    }
}

fn off_diagonal_norm(h: &ComplexMatrix) -> f64 {
    let d = h.dim();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += h[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi sweeps over all off-diagonal pivots until the off-diagonal
/// Frobenius norm drops below `~1e-15` of the matrix scale.
///
/// For a pivot `(p, q)` with `b = h[p][q] = |b| e^{i phi}` the annihilating
/// rotation is the complex Givens matrix with `V[p][p] = c`, `V[p][q] = s`,
/// `V[q][p] = -s e^{-i phi}`, `V[q][q] = c e^{-i phi}` where `t` is the
/// smaller root of `t^2 + 2 tau t - 1 = 0`, `tau = (h[q][q] - h[p][p]) / (2|b|)`.
pub fn jacobi_hermitian(h: &ComplexMatrix) -> Eigendecomposition {
    let d = h.dim();
    let mut a = h.clone();
    let mut u = ComplexMatrix::identity(d);
    if d > 1 {
        let scale = a.max_norm().max(f64::MIN_POSITIVE);
        let target = 1e-15 * scale * (d as f64);
        for _sweep in 0..60 {
            if off_diagonal_norm(&a) <= target {
                break;
            }
            for p in 0..d - 1 {
                for q in p + 1..d {
                    let b = a[(p, q)];
                    let babs = b.norm();
                    if babs <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let phase = b / babs;
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * babs);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // columns: new_p = c*col_p - s*conj(phase)*col_q,
                    //          new_q = s*phase*col_p + c*col_q, applied as
                    // a <- V* a V with the 2x2 block acting on rows/cols p,q.
                    let vpp = Complex64::new(c, 0.0);
                    let vpq = Complex64::new(s, 0.0);
                    let vqp = -s * phase.conj();
                    let vqq = c * phase.conj();
                    for k in 0..d {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * vpp + akq * vqp;
                        a[(k, q)] = akp * vpq + akq * vqq;
                    }
                    for k in 0..d {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
                        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
                    }
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    for k in 0..d {
                        let ukp = u[(k, p)];
                        let ukq = u[(k, q)];
                        u[(k, p)] = ukp * vpp + ukq * vqp;
                        u[(k, q)] = ukp * vpq + ukq * vqq;
                    }
                }
            }
        }
        debug_assert!(off_diagonal_norm(&a) <= 10.0 * target);
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..d {
            vectors[(k, new_col)] = u[(k, old_col)];
        }
    }
    Eigendecomposition { values, vectors }
}
