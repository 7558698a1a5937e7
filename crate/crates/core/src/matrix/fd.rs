//! Finite-difference derivative checks.
//!
//! Central differences with one Richardson extrapolation step, used by the
//! verification battery to confirm analytic derivatives of Weyl functions
//! and characteristic determinants. These are checks, not the primary route:
//! analytic derivatives are always preferred where available.

use super::ComplexMatrix;
use num_complex::Complex64;

fn central_scalar(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    (f(x + h) - f(x - h)) / Complex64::new(2.0 * h, 0.0)
}

/// First derivative of a scalar function by central differences plus one
/// Richardson step: `(4 D(h/2) - D(h)) / 3`, error `O(h^4)`.
pub fn derivative1_scalar(f: impl Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    let coarse = central_scalar(&f, x, h);
    let fine = central_scalar(&f, x, h / 2.0);
    (fine.scale(4.0) - coarse) / Complex64::new(3.0, 0.0)
}

fn second_scalar(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    (f(x + h) - f(x).scale(2.0) + f(x - h)) / Complex64::new(h * h, 0.0)
}

/// Second derivative of a scalar function, central stencil with one
/// Richardson step. Round-off grows like `eps / h^2`, so `h` should stay
/// well above `eps^(1/4)`; `1e-3` is a reasonable default on unit scales.
pub fn derivative2_scalar(f: impl Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    let coarse = second_scalar(&f, x, h);
    let fine = second_scalar(&f, x, h / 2.0);
    (fine.scale(4.0) - coarse) / Complex64::new(3.0, 0.0)
}

fn central_matrix(f: &dyn Fn(f64) -> ComplexMatrix, x: f64, h: f64) -> ComplexMatrix {
    (&f(x + h) - &f(x - h)).scale(Complex64::new(1.0 / (2.0 * h), 0.0))
}

/// Entrywise first derivative of a matrix-valued function.
pub fn derivative1_matrix(f: impl Fn(f64) -> ComplexMatrix, x: f64, h: f64) -> ComplexMatrix {
    let coarse = central_matrix(&f, x, h);
    let fine = central_matrix(&f, x, h / 2.0);
    (&fine.scale(Complex64::new(4.0, 0.0)) - &coarse).scale(Complex64::new(1.0 / 3.0, 0.0))
}

fn second_matrix(f: &dyn Fn(f64) -> ComplexMatrix, x: f64, h: f64) -> ComplexMatrix {
    let mid = f(x).scale(Complex64::new(2.0, 0.0));
    (&(&f(x + h) - &mid) + &f(x - h)).scale(Complex64::new(1.0 / (h * h), 0.0))
}

/// Entrywise second derivative of a matrix-valued function.
pub fn derivative2_matrix(f: impl Fn(f64) -> ComplexMatrix, x: f64, h: f64) -> ComplexMatrix {
    let coarse = second_matrix(&f, x, h);
    let fine = second_matrix(&f, x, h / 2.0);
    (&fine.scale(Complex64::new(4.0, 0.0)) - &coarse).scale(Complex64::new(1.0 / 3.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_first_derivative() {
        // d/dx x^3 at 2 is 12; smooth polynomial, Richardson is near-exact
        let d = derivative1_scalar(|x| Complex64::new(x * x * x, 0.0), 2.0, 1e-3);
        assert!((d - Complex64::new(12.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn exp_second_derivative() {
        let d = derivative2_scalar(|x| Complex64::new(x.exp(), 0.0), 0.5, 1e-3);
        assert!((d - Complex64::new(0.5f64.exp(), 0.0)).norm() < 1e-8);
    }

    #[test]
    fn sqrt_branch_first_derivative() {
        // d/dl i*sqrt(l) at l = -4 from the principal branch: i/(2*sqrt(-4)) = 1/4
        let f = |l: f64| Complex64::i() * Complex64::new(l, 0.0).sqrt();
        let d = derivative1_scalar(f, -4.0, 1e-5);
        assert!((d - Complex64::new(0.25, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn matrix_derivatives_match_scalar_entries() {
        let f = |x: f64| {
            ComplexMatrix::from_diag(&[
                Complex64::new(x * x, 0.0),
                Complex64::new((2.0 * x).sin(), 0.0),
            ])
        };
        let d1 = derivative1_matrix(f, 0.7, 1e-4);
        assert!((d1[(0, 0)] - Complex64::new(1.4, 0.0)).norm() < 1e-9);
        assert!((d1[(1, 1)] - Complex64::new(2.0 * (1.4f64).cos(), 0.0)).norm() < 1e-9);
        let d2 = derivative2_matrix(f, 0.7, 1e-3);
        assert!((d2[(0, 0)] - Complex64::new(2.0, 0.0)).norm() < 1e-7);
        assert!((d2[(1, 1)] + Complex64::new(4.0 * (1.4f64).sin(), 0.0)).norm() < 1e-7);
    }
}
