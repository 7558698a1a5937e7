//! Perturbation coefficients of the eigenvalue branch.
//!
//! Given a coupled system and an unperturbed eigenvalue `lambda0` of the
//! hat-side extension, these routines compute the slope `a` of the branch
//! `lambda(x) = lambda0 + a x + O(x^2)` in `x = |omega|^2` for any
//! dimension, and additionally the curvature coefficient `b` (so that the
//! error improves to `O(x^3)`) when `d = 1`.
//!
//! Every hypothesis of the underlying expansion is enforced numerically and
//! violated hypotheses surface as typed errors: `lambda0` must be an
//! eigenvalue of the hat side (`NotEigenvalue`), a simple one
//! (`NotSimple`), and a resolvent point of the tilde side
//! (`NotResolventPoint`).

use num_complex::Complex64;
use thiserror::Error;

use crate::contact::{ContactError, CoupledSystem, REALNESS_TOL};
use crate::matrix::ComplexMatrix;
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error(
        "lambda0 = {lambda0} is not an eigenvalue of the hat-side extension: \
         |det(beta I - M^)| = {dhat_beta_abs:.3e} > {tol:.3e}"
    )]
    NotEigenvalue {
        lambda0: f64,
        dhat_beta_abs: f64,
        tol: f64,
    },
    #[error(
        "eigenvalue lambda0 = {lambda0} is not simple: \
         |d/dlambda det(beta I - M^)| = {dhat_beta_prime_abs:.3e} < {tol:.3e}"
    )]
    NotSimple {
        lambda0: f64,
        dhat_beta_prime_abs: f64,
        tol: f64,
    },
    #[error(
        "lambda0 = {lambda0} is not a resolvent point of the tilde-side extension: \
         |det(alpha I - M~)| = {dtilde_alpha_abs:.3e} < {tol:.3e}"
    )]
    NotResolventPoint {
        lambda0: f64,
        dtilde_alpha_abs: f64,
        tol: f64,
    },
    #[error("expansion denominator {denominator:.3e} is below {tol:.3e}")]
    ZeroDenominator { denominator: f64, tol: f64 },
    #[error("second-order coefficient requires dimension 1, got {dim}")]
    DimensionMismatch { dim: usize },
    #[error("coefficient has imaginary residue {im_abs:.3e} > {tol:.3e}")]
    NonRealCoefficient { im_abs: f64, tol: f64 },
    #[error(transparent)]
    Contact(#[from] ContactError),
}

impl PerturbationError {
    /// Stable typed name, printed on the diagnostic stream by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            PerturbationError::NotEigenvalue { .. } => "NotEigenvalue",
            PerturbationError::NotSimple { .. } => "NotSimple",
            PerturbationError::NotResolventPoint { .. } => "NotResolventPoint",
            PerturbationError::ZeroDenominator { .. } => "ZeroDenominator",
            PerturbationError::DimensionMismatch { .. } => "DimensionMismatch",
            PerturbationError::NonRealCoefficient { .. } => "NonRealCoefficient",
            PerturbationError::Contact(e) => e.name(),
        }
    }
}

/// The two determinant quantities that certify the expansion hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `d/dlambda det(beta I - M^(lambda))` at `lambda0`; nonzero iff the
    /// eigenvalue is simple.
    pub dhat_beta_prime: f64,
    /// `det(alpha I - M~(lambda0))`; nonzero iff `lambda0` is a resolvent
    /// point of the tilde side.
    pub dtilde_alpha: f64,
}

/// The computed branch expansion around `lambda0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResult {
    pub lambda0: f64,
    /// First-order coefficient, per unit of `x = |omega|^2`.
    pub a: f64,
    /// Second-order coefficient; present only when `order == 2` (`d = 1`).
    pub b: Option<f64>,
    /// 1 when the expansion is `lambda0 + a x + O(x^2)`, 2 when it is
    /// `lambda0 + a x + b x^2 + O(x^3)`.
    pub order: u8,
    pub diagnostics: Diagnostics,
}

impl ExpansionResult {
    /// Evaluate the truncated expansion at coupling `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.lambda0 + self.a * x + self.b.map_or(0.0, |b| b * x * x)
    }
}

fn real_trace(z: Complex64) -> Result<f64, PerturbationError> {
    let tol = REALNESS_TOL * z.norm().max(1.0);
    if z.im.abs() > tol {
        return Err(PerturbationError::NonRealCoefficient {
            im_abs: z.im.abs(),
            tol,
        });
    }
    Ok(z.re)
}

struct HypothesisData {
    adj_beta_block: ComplexMatrix,
    tilde_value: ComplexMatrix,
    hat_deriv1: ComplexMatrix,
    diagnostics: Diagnostics,
}

/// Evaluate the blocks at `lambda0` and enforce the expansion hypotheses.
fn check_hypotheses(
    sys: &CoupledSystem,
    lambda0: f64,
    tol: &Tolerances,
) -> Result<HypothesisData, PerturbationError> {
    if !sys.working_interval().contains(lambda0) {
        return Err(ContactError::OutOfInterval {
            lambda: lambda0,
            interval: sys.working_interval(),
        }
        .into());
    }
    let d = sys.dim();
    let alpha = sys.coupling().alpha;
    let beta = sys.coupling().beta;
    let hat_value = sys.hat().eval(lambda0).expect("inside working interval");
    let hat_deriv1 = sys.hat().deriv1(lambda0).expect("inside working interval");
    let tilde_value = sys.tilde().eval(lambda0).expect("inside working interval");

    let beta_block =
        &ComplexMatrix::identity(d).scale(Complex64::new(beta, 0.0)) - &hat_value;
    let dhat_beta = real_trace(beta_block.det())?;
    let det_scale = beta_block.max_norm().max(1.0).powi(d as i32);
    if dhat_beta.abs() > tol.root_tol * det_scale {
        return Err(PerturbationError::NotEigenvalue {
            lambda0,
            dhat_beta_abs: dhat_beta.abs(),
            tol: tol.root_tol * det_scale,
        });
    }

    let adj_beta_block = beta_block.adjugate();
    let dhat_beta_prime = -real_trace((&adj_beta_block * &hat_deriv1).trace())?;
    if dhat_beta_prime.abs() < tol.simple_tol {
        return Err(PerturbationError::NotSimple {
            lambda0,
            dhat_beta_prime_abs: dhat_beta_prime.abs(),
            tol: tol.simple_tol,
        });
    }

    let alpha_block =
        &ComplexMatrix::identity(d).scale(Complex64::new(alpha, 0.0)) - &tilde_value;
    let dtilde_alpha = real_trace(alpha_block.det())?;
    if dtilde_alpha.abs() < tol.simple_tol {
        return Err(PerturbationError::NotResolventPoint {
            lambda0,
            dtilde_alpha_abs: dtilde_alpha.abs(),
            tol: tol.simple_tol,
        });
    }

    Ok(HypothesisData {
        adj_beta_block,
        tilde_value,
        hat_deriv1,
        diagnostics: Diagnostics {
            dhat_beta_prime,
            dtilde_alpha,
        },
    })
}

/// First-order coefficient for arbitrary dimension:
///
/// `a = tr(adj(beta I - M^) (M~ - alpha I)^-1) / tr(adj(beta I - M^) M^')`,
///
/// all evaluated at `lambda0`. The adjugate is essential here: the matrix
/// `beta I - M^(lambda0)` is exactly singular at the eigenvalue.
pub fn coeff_a(
    sys: &CoupledSystem,
    lambda0: f64,
    tol: &Tolerances,
) -> Result<ExpansionResult, PerturbationError> {
    let data = check_hypotheses(sys, lambda0, tol)?;
    let d = sys.dim();
    let alpha = sys.coupling().alpha;

    let shifted = &data.tilde_value - &ComplexMatrix::identity(d).scale(Complex64::new(alpha, 0.0));
    let inv = shifted
        .inverse_with_tol(0.5 * tol.simple_tol)
        .expect("resolvent-point check guarantees invertibility");
    let numerator = real_trace((&data.adj_beta_block * &inv).trace())?;
    let denominator = real_trace((&data.adj_beta_block * &data.hat_deriv1).trace())?;
    if denominator.abs() < tol.simple_tol {
        // same quantity as the simplicity check up to sign; kept as a direct
        // guard on the division
        return Err(PerturbationError::ZeroDenominator {
            denominator,
            tol: tol.simple_tol,
        });
    }
    Ok(ExpansionResult {
        lambda0,
        a: numerator / denominator,
        b: None,
        order: 1,
        diagnostics: data.diagnostics,
    })
}

/// First and second coefficients for `d = 1`, in the factored scalar form
///
/// `a = 1 / ((M~ - alpha) M^')`,
/// `b = a^2 (M~' / (alpha - M~) - M^'' / (2 M^'))`,
///
/// all at `lambda0`.
pub fn coeff_ab_scalar(
    sys: &CoupledSystem,
    lambda0: f64,
    tol: &Tolerances,
) -> Result<ExpansionResult, PerturbationError> {
    if sys.dim() != 1 {
        return Err(PerturbationError::DimensionMismatch { dim: sys.dim() });
    }
    let data = check_hypotheses(sys, lambda0, tol)?;
    let alpha = sys.coupling().alpha;

    let mt = real_trace(data.tilde_value[(0, 0)])?;
    let mh1 = real_trace(data.hat_deriv1[(0, 0)])?;
    let mt1 = real_trace(
        sys.tilde().deriv1(lambda0).expect("inside working interval")[(0, 0)],
    )?;
    let mh2 = real_trace(
        sys.hat().deriv2(lambda0).expect("inside working interval")[(0, 0)],
    )?;

    let denominator = (mt - alpha) * mh1;
    // both factors individually passed the hypothesis thresholds, so the
    // product is bounded below by their product of tolerances
    if denominator.abs() < tol.simple_tol * tol.simple_tol {
        return Err(PerturbationError::ZeroDenominator {
            denominator,
            tol: tol.simple_tol * tol.simple_tol,
        });
    }
    let a = 1.0 / denominator;
    let b = a * a * (mt1 / (alpha - mt) - 0.5 * mh2 / mh1);
    Ok(ExpansionResult {
        lambda0,
        a,
        b: Some(b),
        order: 2,
        diagnostics: data.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::CouplingSpec;
    use crate::interval::Interval;
    use crate::matrix::HermitianMatrix;
    use crate::weyl::WeylModel;

    fn scalar_identity_model() -> WeylModel {
        WeylModel::make_scalar_rational(&[0.0, 1.0], &[1.0], Interval::all()).unwrap()
    }

    fn toy_system() -> CoupledSystem {
        CoupledSystem::new(
            scalar_identity_model(),
            scalar_identity_model(),
            CouplingSpec::new(0.0, 1.0, Complex64::new(0.0, 0.0), 1),
        )
        .unwrap()
    }

    fn two_level_d1(alpha: f64, beta: f64) -> CoupledSystem {
        let tilde = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0]));
        let hat = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0]));
        CoupledSystem::new(
            tilde,
            hat,
            CouplingSpec::new(alpha, beta, Complex64::new(0.0, 0.0), 1),
        )
        .unwrap()
    }

    #[test]
    fn toy_coefficients() {
        // exact branch: lambda(x) = (1 + sqrt(1 + 4x))/2 = 1 + x - x^2 + O(x^3)
        let sys = toy_system();
        let tol = Tolerances::default();
        let res = coeff_ab_scalar(&sys, 1.0, &tol).unwrap();
        assert!((res.a - 1.0).abs() < 1e-14);
        assert!((res.b.unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(res.order, 2);

        let first = coeff_a(&sys, 1.0, &tol).unwrap();
        assert!((first.a - res.a).abs() < 1e-14);
        assert_eq!(first.order, 1);
        assert_eq!(first.b, None);
    }

    #[test]
    fn two_level_scalar_coefficients() {
        let sys = two_level_d1(-1.0, -2.0);
        let res = coeff_ab_scalar(&sys, -4.0, &Tolerances::default()).unwrap();
        assert!((res.a + 4.0).abs() < 1e-12);
        assert!((res.b.unwrap() - 3.0).abs() < 1e-12);
        assert!((res.diagnostics.dhat_beta_prime + 0.25).abs() < 1e-12);
        assert!((res.diagnostics.dtilde_alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_level_matrix_coefficient() {
        // adj(diag(0,1)) = diag(1,0); (M~ - alpha I)^-1 = diag(-1,-1);
        // M^' = diag(1/4, 1/6); a = (-1)/(1/4) = -4
        let tilde =
            WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0, 0.0]));
        let hat = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0, 5.0]));
        let sys = CoupledSystem::new(
            tilde,
            hat,
            CouplingSpec::new(-1.0, -2.0, Complex64::new(0.0, 0.0), 2),
        )
        .unwrap();
        let res = coeff_a(&sys, -4.0, &Tolerances::default()).unwrap();
        assert!((res.a + 4.0).abs() < 1e-12);
        assert_eq!(res.order, 1);
        assert_eq!(res.b, None);
        assert!(res.a < 0.0);
    }

    #[test]
    fn evaluate_truncated_expansion() {
        let diag = Diagnostics {
            dhat_beta_prime: 1.0,
            dtilde_alpha: 1.0,
        };
        let res = ExpansionResult {
            lambda0: -4.0,
            a: -4.0,
            b: Some(3.0),
            order: 2,
            diagnostics: diag,
        };
        assert_eq!(res.evaluate(0.0), -4.0);

        let res = ExpansionResult {
            lambda0: 1.0,
            a: 1.0,
            b: Some(-1.0),
            order: 2,
            diagnostics: diag,
        };
        assert!((res.evaluate(0.01) - 1.0099).abs() < 1e-15);

        let res = ExpansionResult {
            lambda0: -4.0,
            a: -4.0,
            b: None,
            order: 1,
            diagnostics: diag,
        };
        assert!((res.evaluate(0.1) + 4.4).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_eigenvalue() {
        // beta = -1 has its eigenvalue at -1, not at -4
        let sys = two_level_d1(-2.0, -1.0);
        let err = coeff_a(&sys, -4.0, &Tolerances::default()).unwrap_err();
        assert_eq!(err.name(), "NotEigenvalue");
    }

    #[test]
    fn rejects_sigma_point_of_tilde_side() {
        // alpha = beta makes lambda0 an eigenvalue of both sides at once
        let sys = two_level_d1(-2.0, -2.0);
        let err = coeff_ab_scalar(&sys, -4.0, &Tolerances::default()).unwrap_err();
        assert_eq!(err.name(), "NotResolventPoint");
    }

    #[test]
    fn rejects_degenerate_zero() {
        // M^ = lambda^3/3 has M^' = lambda^2, which vanishes at the
        // eigenvalue lambda0 = 0 of the beta = 0 extension
        let tilde = scalar_identity_model();
        let hat = WeylModel::make_scalar_rational(&[0.0, 0.0, 0.0, 1.0 / 3.0], &[1.0], Interval::all())
            .unwrap();
        let sys = CoupledSystem::new(
            tilde,
            hat,
            CouplingSpec::new(-1.0, 0.0, Complex64::new(0.0, 0.0), 1),
        )
        .unwrap();
        let err = coeff_ab_scalar(&sys, 0.0, &Tolerances::default()).unwrap_err();
        assert_eq!(err.name(), "NotSimple");
    }

    #[test]
    fn rejects_matrix_system_for_scalar_coefficients() {
        let tilde =
            WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0, 0.0]));
        let hat = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(&[0.0, 5.0]));
        let sys = CoupledSystem::new(
            tilde,
            hat,
            CouplingSpec::new(-1.0, -2.0, Complex64::new(0.0, 0.0), 2),
        )
        .unwrap();
        let err = coeff_ab_scalar(&sys, -4.0, &Tolerances::default()).unwrap_err();
        assert_eq!(err.name(), "DimensionMismatch");
    }

    #[test]
    fn rejects_point_outside_working_interval() {
        let sys = two_level_d1(-1.0, -2.0);
        let err = coeff_a(&sys, 2.0, &Tolerances::default()).unwrap_err();
        assert_eq!(err.name(), "OutOfInterval");
    }
}
