//! Weak-coupling eigenvalue expansions for point-contact models, verified
//! by numerical branch tracking.
//!
//! Two self-adjoint systems, each described only through a matrix Herglotz
//! function `M(lambda)` with its derivatives ([`WeylModel`]), are joined by
//! a rank-`d` contact of strength `omega` ([`CouplingSpec`]). A discrete
//! eigenvalue `lambda0` of the decoupled system then moves along a branch
//! `lambda(x)` in `x = |omega|^2`, and this crate computes the expansion
//!
//! `lambda(x) = lambda0 + a x + b x^2 + ...`
//!
//! two independent ways: analytically from determinant calculus at
//! `lambda0` ([`coeff_a`], [`coeff_ab_scalar`]) and numerically by tracking
//! the root of the characteristic function `F(lambda, x)` across a grid of
//! couplings ([`track_branch`], [`fit_coefficients`]). The [`verify`]
//! battery cross-checks the two against each other together with every
//! matrix identity the formulas rely on.
//!
//! ```
//! use pointcontact::{
//!     coeff_ab_scalar, CoupledSystem, CouplingSpec, HermitianMatrix, Tolerances, WeylModel,
//! };
//! use num_complex::Complex64;
//!
//! // two half-line systems with contact point potentials, coupled with
//! // boundary parameters alpha = -1, beta = -2
//! let tilde = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0]));
//! let hat = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0]));
//! let coupling = CouplingSpec::new(-1.0, -2.0, Complex64::new(0.0, 0.0), 1);
//! let sys = CoupledSystem::new(tilde, hat, coupling).unwrap();
//!
//! // the eigenvalue at -beta^2 = -4 moves as lambda(x) = -4 - 4x + 3x^2 + O(x^3)
//! let res = coeff_ab_scalar(&sys, -4.0, &Tolerances::default()).unwrap();
//! assert!((res.a + 4.0).abs() < 1e-12);
//! assert!((res.b.unwrap() - 3.0).abs() < 1e-12);
//! ```

pub mod contact;
pub mod continuation;
pub mod interval;
pub mod matrix;
pub mod perturbation;
mod solve;
pub mod verify;
pub mod weyl;

pub use contact::{ContactError, CoupledSystem, CouplingSpec, FaultInjection};
pub use continuation::{
    fit_coefficients, geometric_grid, track_branch, BranchSample, BranchTrace,
    ContinuationError, Fitted,
};
pub use interval::Interval;
pub use matrix::{hermitian_sqrt, ComplexMatrix, HermitianMatrix, MatrixError};
pub use perturbation::{
    coeff_a, coeff_ab_scalar, Diagnostics, ExpansionResult, PerturbationError,
};
pub use verify::{all_passed, run_battery, CheckResult, CheckStatus};
pub use weyl::{
    find_isolated_eigenvalue, ExtensionSpectrumProbe, ModelKind, WeylError, WeylModel,
};

/// Numerical thresholds shared by eigenvalue location, hypothesis checks,
/// and branch tracking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Residual bound `|det| <= root_tol` for accepting a root.
    pub root_tol: f64,
    /// Lower bound on the determinant derivative certifying a simple zero,
    /// and on the resolvent-point determinant.
    pub simple_tol: f64,
    /// Step for the finite-difference cross-checks of analytic derivatives.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_tol: 1e-12,
            simple_tol: 1e-8,
            fd_step: 1e-5,
        }
    }
}
