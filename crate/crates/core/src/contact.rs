//! The coupled point-contact system: coupling data, the characteristic
//! function `F(lambda, x)`, and the block-determinant form of the eigenvalue
//! condition that cross-checks it.

use num_complex::Complex64;
use thiserror::Error;

use crate::interval::Interval;
use crate::matrix::ComplexMatrix;
use crate::weyl::WeylModel;

/// Imaginary residue allowed on determinants that are provably real; more
/// than this indicates a square-root branch error, not round-off.
pub const REALNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContactError {
    #[error("model dimensions disagree: tilde {tilde}, hat {hat}, coupling {coupling}")]
    DimensionMismatch {
        tilde: usize,
        hat: usize,
        coupling: usize,
    },
    #[error("the valid intervals of the two models do not overlap")]
    EmptyWorkingInterval,
    #[error("evaluation point {lambda} lies outside the working interval {interval}")]
    OutOfInterval { lambda: f64, interval: Interval },
    #[error(
        "determinant at lambda = {lambda} has imaginary residue {im_abs:.3e} > {tol:.3e}; \
         this indicates a square-root branch inconsistency"
    )]
    NonRealDeterminant { lambda: f64, im_abs: f64, tol: f64 },
}

impl ContactError {
    /// Stable typed name, printed on the diagnostic stream by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            ContactError::DimensionMismatch { .. } => "DimensionMismatch",
            ContactError::EmptyWorkingInterval => "EmptyWorkingInterval",
            ContactError::OutOfInterval { .. } => "OutOfInterval",
            ContactError::NonRealDeterminant { .. } => "NonRealDeterminant",
        }
    }
}

/// Boundary parameters of the two subsystems and the coupling strength:
/// the data of the Hermitian `2d x 2d` matrix `[[alpha I, omega I], [conj(omega) I, beta I]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    pub alpha: f64,
    pub beta: f64,
    pub omega: Complex64,
    pub dim: usize,
}

impl CouplingSpec {
    pub fn new(alpha: f64, beta: f64, omega: Complex64, dim: usize) -> CouplingSpec {
        assert!(dim >= 1);
        assert!(alpha.is_finite() && beta.is_finite() && omega.is_finite());
        CouplingSpec {
            alpha,
            beta,
            omega,
            dim,
        }
    }

    /// The coupling parameter the branch actually depends on: `x = |omega|^2`.
    pub fn x(&self) -> f64 {
        self.omega.norm_sqr()
    }

    /// Assembles the full `2d x 2d` coupling matrix.
    pub fn coupling_matrix(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut m = ComplexMatrix::zeros(2 * d);
        for i in 0..d {
            m[(i, i)] = Complex64::new(self.alpha, 0.0);
            m[(i, i + d)] = self.omega;
            m[(i + d, i)] = self.omega.conj();
            m[(i + d, i + d)] = Complex64::new(self.beta, 0.0);
        }
        debug_assert!(m.hermitian_defect() == 0.0);
        m
    }
}

/// Deliberate defect switches used by the verification battery to prove its
/// checks can fail. Not reachable from any normal construction path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaultInjection {
    #[default]
    None,
    /// Assemble the lower-right block of the block determinant with the
    /// wrong sign, breaking the agreement with the characteristic function.
    HatBlockSign,
    /// Contaminate the characteristic determinant with a spurious imaginary
    /// part, breaking the realness guarantee.
    ImaginaryOffset,
}

impl FaultInjection {
    pub fn parse(name: &str) -> Option<FaultInjection> {
        match name {
            "none" => Some(FaultInjection::None),
            "hat-block-sign" => Some(FaultInjection::HatBlockSign),
            "imaginary-offset" => Some(FaultInjection::ImaginaryOffset),
            _ => None,
        }
    }
}

/// Two Weyl models of equal dimension joined through a [`CouplingSpec`],
/// evaluated on the intersection of their valid intervals.
#[derive(Debug)]
pub struct CoupledSystem {
    tilde: WeylModel,
    hat: WeylModel,
    coupling: CouplingSpec,
    working_interval: Interval,
    fault: FaultInjection,
}

impl CoupledSystem {
    pub fn new(
        tilde: WeylModel,
        hat: WeylModel,
        coupling: CouplingSpec,
    ) -> Result<CoupledSystem, ContactError> {
        if tilde.dim() != hat.dim() || tilde.dim() != coupling.dim {
            return Err(ContactError::DimensionMismatch {
                tilde: tilde.dim(),
                hat: hat.dim(),
                coupling: coupling.dim,
            });
        }
        let working_interval = tilde.valid_interval().intersect(hat.valid_interval());
        if working_interval.is_empty() {
            return Err(ContactError::EmptyWorkingInterval);
        }
        Ok(CoupledSystem {
            tilde,
            hat,
            coupling,
            working_interval,
            fault: FaultInjection::None,
        })
    }

    pub fn tilde(&self) -> &WeylModel {
        &self.tilde
    }

    pub fn hat(&self) -> &WeylModel {
        &self.hat
    }

    pub fn coupling(&self) -> &CouplingSpec {
        &self.coupling
    }

    pub fn dim(&self) -> usize {
        self.coupling.dim
    }

    pub fn working_interval(&self) -> Interval {
        self.working_interval
    }

    /// Install a deliberate defect; used only by the verification battery.
    pub fn inject_fault(&mut self, fault: FaultInjection) {
        self.fault = fault;
    }

    pub fn fault(&self) -> FaultInjection {
        self.fault
    }

    fn check_inside(&self, lambda: f64) -> Result<(), ContactError> {
        if self.working_interval.contains(lambda) {
            Ok(())
        } else {
            Err(ContactError::OutOfInterval {
                lambda,
                interval: self.working_interval,
            })
        }
    }

    /// `alpha I - M~(lambda)`.
    fn alpha_block(&self, lambda: f64) -> ComplexMatrix {
        let d = self.dim();
        let m = self
            .tilde
            .eval(lambda)
            .expect("checked against the working interval");
        &ComplexMatrix::identity(d).scale(Complex64::new(self.coupling.alpha, 0.0)) - &m
    }

    /// `beta I - M^(lambda)`.
    fn beta_block(&self, lambda: f64) -> ComplexMatrix {
        let d = self.dim();
        let m = self
            .hat
            .eval(lambda)
            .expect("checked against the working interval");
        &ComplexMatrix::identity(d).scale(Complex64::new(self.coupling.beta, 0.0)) - &m
    }

    /// `T(lambda) = (alpha I - M~(lambda)) (beta I - M^(lambda))`.
    ///
    /// A product of Hermitian factors, so not Hermitian itself in general,
    /// but its spectrum is real on the working interval.
    pub fn t_matrix(&self, lambda: f64) -> Result<ComplexMatrix, ContactError> {
        self.check_inside(lambda)?;
        Ok(&self.alpha_block(lambda) * &self.beta_block(lambda))
    }

    /// `d/dlambda T(lambda) = -M~' (beta I - M^) - (alpha I - M~) M^'`.
    fn t_matrix_deriv(&self, lambda: f64) -> ComplexMatrix {
        let m1t = self
            .tilde
            .deriv1(lambda)
            .expect("checked against the working interval");
        let m1h = self
            .hat
            .deriv1(lambda)
            .expect("checked against the working interval");
        let left = &(-&m1t) * &self.beta_block(lambda);
        let right = &self.alpha_block(lambda) * &m1h;
        &left - &right
    }

    fn real_part(&self, det: Complex64, lambda: f64) -> Result<f64, ContactError> {
        let tol = REALNESS_TOL * det.norm().max(1.0);
        if det.im.abs() > tol {
            return Err(ContactError::NonRealDeterminant {
                lambda,
                im_abs: det.im.abs(),
                tol,
            });
        }
        Ok(det.re)
    }

    pub(crate) fn char_fn_complex(&self, lambda: f64, x: f64) -> Result<Complex64, ContactError> {
        self.check_inside(lambda)?;
        debug_assert!(x >= 0.0, "x plays the role of |omega|^2");
        let t = self.t_matrix(lambda)?;
        let shifted = &t - &ComplexMatrix::identity(self.dim()).scale(Complex64::new(x, 0.0));
        let mut det = shifted.det();
        if self.fault == FaultInjection::ImaginaryOffset {
            det += Complex64::new(0.0, 1e-6 * det.norm().max(1.0));
        }
        Ok(det)
    }

    /// The characteristic function `F(lambda, x) = det(T(lambda) - x I)`.
    ///
    /// Real on the working interval: `T - xI` is similar to its adjoint via
    /// conjugation by the Hermitian factor `alpha I - M~`, so its
    /// determinant is real; the imaginary residue is asserted below
    /// [`REALNESS_TOL`] and discarded. Zeros in `lambda` at `x = |omega|^2`
    /// are the discrete eigenvalues of the coupled system.
    pub fn char_fn(&self, lambda: f64, x: f64) -> Result<f64, ContactError> {
        let det = self.char_fn_complex(lambda, x)?;
        self.real_part(det, lambda)
    }

    /// `d/dlambda F(lambda, x) = tr(adj(T - xI) T')`, exact up to round-off.
    pub fn char_fn_lambda_deriv(&self, lambda: f64, x: f64) -> Result<f64, ContactError> {
        self.check_inside(lambda)?;
        debug_assert!(x >= 0.0, "x plays the role of |omega|^2");
        let t = self.t_matrix(lambda)?;
        let shifted = &t - &ComplexMatrix::identity(self.dim()).scale(Complex64::new(x, 0.0));
        let deriv = (&shifted.adjugate() * &self.t_matrix_deriv(lambda)).trace();
        self.real_part(deriv, lambda)
    }

    /// Determinant of the assembled `2d x 2d` eigenvalue condition
    /// `[[alpha I - M~, omega I], [conj(omega) I, beta I - M^]]`.
    ///
    /// Because the off-diagonal blocks are multiples of the identity, this
    /// equals `char_fn(lambda, |omega|^2)` exactly; it is kept as the
    /// independent cross-check of that reduction.
    pub fn block_det(&self, lambda: f64) -> Result<f64, ContactError> {
        self.check_inside(lambda)?;
        let d = self.dim();
        let a = self.alpha_block(lambda);
        let mut b = self.beta_block(lambda);
        if self.fault == FaultInjection::HatBlockSign {
            let m = self
                .hat
                .eval(lambda)
                .expect("checked against the working interval");
            b = &b + &m.scale(Complex64::new(2.0, 0.0));
        }
        let mut block = ComplexMatrix::zeros(2 * d);
        for i in 0..d {
            for j in 0..d {
                block[(i, j)] = a[(i, j)];
                block[(i + d, j + d)] = b[(i, j)];
            }
            block[(i, i + d)] = self.coupling.omega;
            block[(i + d, i)] = self.coupling.omega.conj();
        }
        self.real_part(block.det(), lambda)
    }
}
