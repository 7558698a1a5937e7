//! Weyl function models: matrix-valued Herglotz functions together with
//! their first and second derivatives on a declared real interval.
//!
//! A [`WeylModel`] is the sole spectral input of everything downstream. The
//! derivative stack is part of the model contract so that all callers share
//! one consistent set of derivatives: analytic for the built-in models,
//! Richardson-extrapolated finite differences for custom closures.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::interval::Interval;
use crate::matrix::{fd, ComplexMatrix, Eigendecomposition, HermitianMatrix};
use crate::solve::{newton_bisect, SolveFailure};
use crate::Tolerances;

/// Errors from model construction, evaluation, and eigenvalue location.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeylError {
    #[error("evaluation point {lambda} lies outside the valid interval {interval}")]
    OutOfInterval { lambda: f64, interval: Interval },
    #[error(
        "model is not Herglotz: derivative {value:.3e} at lambda = {lambda} \
         (must be finite and >= -1e-9 on the declared interval)"
    )]
    NotHerglotz { lambda: f64, value: f64 },
    #[error("determinant has no sign change over [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error(
        "eigenvalue at {lambda} is not simple: |detfun_deriv| = {deriv_abs:.3e} < {tol:.3e}"
    )]
    NotSimple {
        lambda: f64,
        deriv_abs: f64,
        tol: f64,
    },
    #[error("root search stalled after {max_iter} iterations")]
    RootSearchStalled { max_iter: usize },
}

impl WeylError {
    /// Stable typed name, printed on the diagnostic stream by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            WeylError::OutOfInterval { .. } => "OutOfInterval",
            WeylError::NotHerglotz { .. } => "NotHerglotz",
            WeylError::NoSignChange { .. } => "NoSignChange",
            WeylError::NotSimple { .. } => "NotSimple",
            WeylError::RootSearchStalled { .. } => "RootSearchStalled",
        }
    }
}

/// Which construction a model came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    PointInteraction,
    ScalarRational,
    Custom,
}

/// Real polynomial in ascending coefficient order.
#[derive(Debug, Clone, PartialEq)]
struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    fn new(coeffs: &[f64]) -> Poly {
        Poly {
            coeffs: coeffs.to_vec(),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn deriv(&self) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        }
    }
}

#[derive(Clone)]
enum Backend {
    /// `M(lambda) = i sqrt(lambda - Q)` through the cached eigendecomposition
    /// of `Q`, with analytic first and second derivatives.
    PointInteraction { eig: Eigendecomposition },
    /// Scalar rational `M = p/q` with symbolically differentiated stack.
    ScalarRational {
        p: Poly,
        q: Poly,
        p1: Poly,
        q1: Poly,
        p2: Poly,
        q2: Poly,
    },
    /// User-supplied evaluation closure; derivatives by Richardson-
    /// extrapolated central differences with the stored step.
    Custom {
        f: Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>,
        fd_step: f64,
    },
}

/// A matrix Herglotz function `M(lambda)` on an open real interval, with
/// first and second derivatives.
#[derive(Clone)]
pub struct WeylModel {
    dim: usize,
    interval: Interval,
    backend: Backend,
}

impl fmt::Debug for WeylModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylModel")
            .field("kind", &self.kind())
            .field("dim", &self.dim)
            .field("interval", &self.interval)
            .finish()
    }
}

/// Principal-branch scalar `i sqrt(s)`; for `s < 0` this equals
/// `-sqrt(-s)`, the single branch convention of the whole crate.
fn i_sqrt(s: f64) -> Complex64 {
    Complex64::i() * Complex64::new(s, 0.0).sqrt()
}

impl WeylModel {
    /// `M(lambda) = i sqrt(lambda - q)`, valid on `(-inf, min eig(q))`.
    ///
    /// Derivatives are taken per eigenvalue through the spectral
    /// decomposition: `M' = i/2 (lambda - q)^(-1/2)` and
    /// `M'' = -i/4 (lambda - q)^(-3/2)`, both positive definite real below
    /// the spectrum of `q`.
    pub fn make_point_interaction(q: HermitianMatrix) -> WeylModel {
        let dim = q.dim();
        let eig = q.eigh();
        let interval = Interval::below(eig.values[0]);
        WeylModel {
            dim,
            interval,
            backend: Backend::PointInteraction { eig },
        }
    }

    /// Scalar rational model `M = numerator / denominator` (ascending
    /// coefficients) on a declared interval.
    ///
    /// Construction probes the interval and rejects models whose derivative
    /// is negative (or non-finite, e.g. at a pole) anywhere on the probe
    /// grid, since downstream formulas rely on the Herglotz property.
    pub fn make_scalar_rational(
        numerator: &[f64],
        denominator: &[f64],
        interval: Interval,
    ) -> Result<WeylModel, WeylError> {
        let p = Poly::new(numerator);
        let q = Poly::new(denominator);
        let p1 = p.deriv();
        let q1 = q.deriv();
        let p2 = p1.deriv();
        let q2 = q1.deriv();
        let model = WeylModel {
            dim: 1,
            interval,
            backend: Backend::ScalarRational {
                p,
                q,
                p1,
                q1,
                p2,
                q2,
            },
        };
        for lambda in model.interval.probe_points(101) {
            let v = model.scalar_deriv1(lambda);
            if !v.is_finite() || v < -1e-9 {
                return Err(WeylError::NotHerglotz { lambda, value: v });
            }
        }
        Ok(model)
    }

    /// Model backed by an arbitrary evaluation closure, with derivatives by
    /// central finite differences (one Richardson step) at step `fd_step`.
    ///
    /// The closure is evaluated up to `fd_step` outside `interval` when
    /// differentiating near its ends, so it must tolerate that margin.
    pub fn make_custom(
        dim: usize,
        interval: Interval,
        fd_step: f64,
        f: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
    ) -> WeylModel {
        assert!(dim >= 1);
        assert!(fd_step > 0.0);
        WeylModel {
            dim,
            interval,
            backend: Backend::Custom {
                f: Arc::new(f),
                fd_step,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valid_interval(&self) -> Interval {
        self.interval
    }

    pub fn kind(&self) -> ModelKind {
        match self.backend {
            Backend::PointInteraction { .. } => ModelKind::PointInteraction,
            Backend::ScalarRational { .. } => ModelKind::ScalarRational,
            Backend::Custom { .. } => ModelKind::Custom,
        }
    }

    fn check_inside(&self, lambda: f64) -> Result<(), WeylError> {
        if self.interval.contains(lambda) {
            Ok(())
        } else {
            Err(WeylError::OutOfInterval {
                lambda,
                interval: self.interval,
            })
        }
    }

    fn scalar_value(&self, lambda: f64) -> f64 {
        match &self.backend {
            Backend::ScalarRational { p, q, .. } => p.eval(lambda) / q.eval(lambda),
            _ => unreachable!("scalar path is only used by the rational backend"),
        }
    }

    fn scalar_deriv1(&self, lambda: f64) -> f64 {
        match &self.backend {
            Backend::ScalarRational { p, q, p1, q1, .. } => {
                let qv = q.eval(lambda);
                (p1.eval(lambda) * qv - p.eval(lambda) * q1.eval(lambda)) / (qv * qv)
            }
            _ => unreachable!("scalar path is only used by the rational backend"),
        }
    }

    fn scalar_deriv2(&self, lambda: f64) -> f64 {
        match &self.backend {
            Backend::ScalarRational {
                p,
                q,
                p1,
                q1,
                p2,
                q2,
            } => {
                let (pv, qv) = (p.eval(lambda), q.eval(lambda));
                let (p1v, q1v) = (p1.eval(lambda), q1.eval(lambda));
                // M' = n1/q^2 with n1 = p'q - pq'; differentiating once more:
                // M'' = (n1' q - 2 n1 q') / q^3, n1' = p''q - pq''.
                let n1 = p1v * qv - pv * q1v;
                let n1p = p2.eval(lambda) * qv - pv * q2.eval(lambda);
                (n1p * qv - 2.0 * n1 * q1v) / (qv * qv * qv)
            }
            _ => unreachable!("scalar path is only used by the rational backend"),
        }
    }

    /// `M(lambda)`; refuses points outside the valid interval.
    pub fn eval(&self, lambda: f64) -> Result<ComplexMatrix, WeylError> {
        self.check_inside(lambda)?;
        Ok(match &self.backend {
            Backend::PointInteraction { eig } => eig.spectral_map(|d| i_sqrt(lambda - d)),
            Backend::ScalarRational { .. } => scalar_matrix(self.scalar_value(lambda)),
            Backend::Custom { f, .. } => f(lambda),
        })
    }

    /// `M'(lambda)`.
    pub fn deriv1(&self, lambda: f64) -> Result<ComplexMatrix, WeylError> {
        self.check_inside(lambda)?;
        Ok(match &self.backend {
            Backend::PointInteraction { eig } => eig.spectral_map(|d| {
                let s = Complex64::new(lambda - d, 0.0).sqrt();
                Complex64::new(0.0, 0.5) / s
            }),
            Backend::ScalarRational { .. } => scalar_matrix(self.scalar_deriv1(lambda)),
            Backend::Custom { f, fd_step } => {
                let f = f.clone();
                fd::derivative1_matrix(move |t| f(t), lambda, *fd_step)
            }
        })
    }

    /// `M''(lambda)`.
    pub fn deriv2(&self, lambda: f64) -> Result<ComplexMatrix, WeylError> {
        self.check_inside(lambda)?;
        Ok(match &self.backend {
            Backend::PointInteraction { eig } => eig.spectral_map(|d| {
                let s = Complex64::new(lambda - d, 0.0).sqrt();
                Complex64::new(0.0, -0.25) / (s * s * s)
            }),
            Backend::ScalarRational { .. } => scalar_matrix(self.scalar_deriv2(lambda)),
            Backend::Custom { f, fd_step } => {
                let f = f.clone();
                // second differences lose eps/h^2 to round-off; widen the step
                let h = fd_step.max(1e-4) * 10.0;
                fd::derivative2_matrix(move |t| f(t), lambda, h)
            }
        })
    }

    /// Probe for the spectrum of the extension labeled by `param`:
    /// the determinant `det(param I - M(lambda))` and its derivative.
    pub fn detfun(&self, param: f64) -> ExtensionSpectrumProbe<'_> {
        ExtensionSpectrumProbe {
            model: self,
            param,
        }
    }
}

fn scalar_matrix(v: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[v])
}

/// The determinant function `lambda -> det(param I - M(lambda))` of one
/// boundary parameter, whose zeros on the valid interval are eigenvalues of
/// the corresponding extension.
pub struct ExtensionSpectrumProbe<'a> {
    model: &'a WeylModel,
    param: f64,
}

impl ExtensionSpectrumProbe<'_> {
    pub fn boundary_parameter(&self) -> f64 {
        self.param
    }

    pub fn model(&self) -> &WeylModel {
        self.model
    }

    fn shifted(&self, lambda: f64) -> Result<ComplexMatrix, WeylError> {
        let m = self.model.eval(lambda)?;
        Ok(&ComplexMatrix::identity(self.model.dim).scale(Complex64::new(self.param, 0.0)) - &m)
    }

    /// `det(param I - M(lambda))`, real on the valid interval because
    /// `M(lambda)` is Hermitian there.
    pub fn detfun(&self, lambda: f64) -> Result<f64, WeylError> {
        let det = self.shifted(lambda)?.det();
        debug_assert!(det.im.abs() <= 1e-6 * det.norm().max(1.0));
        Ok(det.re)
    }

    /// `d/dlambda det(param I - M(lambda))`, assembled as
    /// `-tr(adj(param I - M) M')` rather than by differencing.
    pub fn detfun_deriv(&self, lambda: f64) -> Result<f64, WeylError> {
        let shifted = self.shifted(lambda)?;
        let m1 = self.model.deriv1(lambda)?;
        let t = (&shifted.adjugate() * &m1).trace();
        debug_assert!(t.im.abs() <= 1e-6 * t.norm().max(1.0));
        Ok(-t.re)
    }
}

/// Locate a zero of `probe.detfun` inside `[lo, hi]` and certify it simple.
///
/// The bracket endpoints must lie in the model's valid interval and the
/// determinant must change sign between them. The returned point satisfies
/// `|detfun| <= root_tol` scaled by the bracket's determinant magnitudes,
/// and `|detfun_deriv| >= simple_tol`; a derivative below that threshold is
/// reported as [`WeylError::NotSimple`] since the perturbation formulas
/// require a simple zero.
pub fn find_isolated_eigenvalue(
    probe: &ExtensionSpectrumProbe<'_>,
    lo: f64,
    hi: f64,
    tol: &Tolerances,
) -> Result<f64, WeylError> {
    probe.model.check_inside(lo)?;
    probe.model.check_inside(hi)?;
    let f = |l: f64| probe.detfun(l).expect("bracket lies inside the valid interval");
    let df = |l: f64| {
        probe
            .detfun_deriv(l)
            .expect("bracket lies inside the valid interval")
    };
    let scale = f(lo).abs().max(f(hi).abs()).max(1.0);
    let max_iter = 200;
    let result = newton_bisect(
        &f,
        &df,
        lo,
        hi,
        0.5 * (lo + hi),
        tol.root_tol * scale,
        max_iter,
    )
    .map_err(|e| match e {
        SolveFailure::NoBracket => WeylError::NoSignChange { lo, hi },
        SolveFailure::Stalled { .. } => WeylError::RootSearchStalled { max_iter },
    })?;
    let deriv_abs = df(result.root).abs();
    if deriv_abs < tol.simple_tol {
        return Err(WeylError::NotSimple {
            lambda: result.root,
            deriv_abs,
            tol: tol.simple_tol,
        });
    }
    Ok(result.root)
}
