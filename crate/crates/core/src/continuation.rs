//! Numerical branch tracking: the independent oracle for the perturbation
//! coefficients.
//!
//! For a grid of coupling values `x` this module solves the characteristic
//! equation `F(lambda, x) = 0` by safeguarded Newton iteration, warm-started
//! along the branch, and then fits empirical expansion coefficients and
//! remainder orders to the tracked samples. Nothing here reuses the
//! perturbation formulas except as an optional seed, so agreement between
//! the fitted and the computed coefficients is a genuine cross-check.

use thiserror::Error;

use crate::contact::{ContactError, CoupledSystem};
use crate::perturbation::ExpansionResult;
use crate::solve::{newton_bisect, SolveFailure};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuationError {
    #[error(
        "Newton iteration at x = {x} did not converge: last iterate {last_iterate}, \
         |F| = {residual:.3e}"
    )]
    NewtonDiverged {
        x: f64,
        last_iterate: f64,
        residual: f64,
    },
    #[error(
        "no sign change of F around the predicted branch point at x = {x} \
         (seed {seed}, searched half-width {half_width:.3e})"
    )]
    BracketLost { x: f64, seed: f64, half_width: f64 },
    #[error("branch left the working interval at x = {x} (predicted lambda = {lambda})")]
    LeftInterval { x: f64, lambda: f64 },
    #[error(
        "branch simplicity lost at x = {x}: |F_lambda({lambda})| = {f_lambda_abs:.3e} < {tol:.3e}"
    )]
    SimplicityLost {
        x: f64,
        lambda: f64,
        f_lambda_abs: f64,
        tol: f64,
    },
    #[error(
        "fit needs at least 4 positive samples spanning a decade; \
         got {count} samples over {decades:.2} decades"
    )]
    InsufficientSamples { count: usize, decades: f64 },
    #[error(transparent)]
    Contact(#[from] ContactError),
}

impl ContinuationError {
    /// Stable typed name, printed on the diagnostic stream by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            ContinuationError::NewtonDiverged { .. } => "NewtonDiverged",
            ContinuationError::BracketLost { .. } => "BracketLost",
            ContinuationError::LeftInterval { .. } => "LeftInterval",
            ContinuationError::SimplicityLost { .. } => "SimplicityLost",
            ContinuationError::InsufficientSamples { .. } => "InsufficientSamples",
            ContinuationError::Contact(e) => e.name(),
        }
    }
}

/// One accepted point of the tracked branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    /// Coupling parameter `|omega|^2`.
    pub x: f64,
    /// Branch eigenvalue at this coupling.
    pub lambda: f64,
    /// `|F(lambda, x)|` at acceptance.
    pub residual: f64,
    pub newton_iters: usize,
}

/// Least-squares summary of a tracked branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitted {
    /// Fitted first-order coefficient of `lambda(x) - lambda0`.
    pub a_hat: f64,
    /// Fitted second-order coefficient. An estimate of the analytic `b` when
    /// `d = 1`; for `d > 1` it is purely empirical (no analytic counterpart
    /// is computed).
    pub b_hat: Option<f64>,
    /// Log-log slope of the remainder after subtracting the reference
    /// expansion, measured over the smallest decade of `x` that sits above
    /// the floating-point noise floor; absent when every remainder is below
    /// that floor.
    pub remainder_slope: Option<f64>,
}

/// A numerically tracked branch with optional analytic reference expansion
/// and optional fit summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTrace {
    pub samples: Vec<BranchSample>,
    pub lambda0: f64,
    /// The analytic expansion this trace verifies, when one was supplied to
    /// seed the tracking. Remainder slopes are measured against it, since a
    /// fitted polynomial would absorb exactly the error being measured.
    pub reference: Option<ExpansionResult>,
    pub fitted: Option<Fitted>,
}

/// Geometric grid from `lo` to `hi` with `per_decade` points per decade of
/// `x`; the final point is exactly `hi`.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && per_decade >= 1);
    let mut xs = Vec::new();
    let l0 = lo.log10();
    let mut k = 0usize;
    loop {
        let x = 10f64.powf(l0 + k as f64 / per_decade as f64);
        if x >= hi * (1.0 - 1e-12) {
            break;
        }
        xs.push(x);
        k += 1;
    }
    xs.push(hi);
    xs
}

/// Track the branch `lambda(x)` through the grid `xs` (nonnegative, strictly
/// increasing), starting from the decoupled eigenvalue `lambda0`.
///
/// Each positive `x` is solved by Newton iteration on `lambda` with the
/// analytic derivative `F_lambda`, safeguarded by bisection over a bracket
/// found by doubling a window around the seed. Seeds come from `reference`
/// when given (its truncated expansion evaluated at `x`), otherwise from
/// linear extrapolation of the previous samples. A grid value `x = 0`
/// contributes the sample `(0, lambda0)` directly.
///
/// At every accepted sample `|F_lambda| >= simple_tol` is required; losing
/// that bound means the tracked zero is no longer simple and tracking stops
/// with [`ContinuationError::SimplicityLost`].
pub fn track_branch(
    sys: &CoupledSystem,
    lambda0: f64,
    xs: &[f64],
    reference: Option<&ExpansionResult>,
    tol: &Tolerances,
) -> Result<BranchTrace, ContinuationError> {
    for w in xs.windows(2) {
        assert!(w[0] < w[1], "grid must be strictly increasing");
    }
    if let Some(&first) = xs.first() {
        assert!(first >= 0.0, "grid values are couplings |omega|^2 >= 0");
    }

    let interval = sys.working_interval();
    let mut samples = Vec::with_capacity(xs.len());
    let mut prev_x = 0.0;
    let mut prev_lambda = lambda0;
    let mut empirical_slope = 0.0;

    for &x in xs {
        if x == 0.0 {
            let residual = sys.char_fn(lambda0, 0.0)?.abs();
            samples.push(BranchSample {
                x,
                lambda: lambda0,
                residual,
                newton_iters: 0,
            });
            continue;
        }

        let seed = match reference {
            Some(r) => r.evaluate(x),
            None => prev_lambda + empirical_slope * (x - prev_x),
        };
        if !interval.contains(seed) {
            return Err(ContinuationError::LeftInterval { x, lambda: seed });
        }
        // surfaces NonRealDeterminant and friends before the closures below
        sys.char_fn(seed, x)?;
        let f = |l: f64| sys.char_fn(l, x).expect("bracket stays inside the working interval");
        let df = |l: f64| {
            sys.char_fn_lambda_deriv(l, x)
                .expect("bracket stays inside the working interval")
        };

        let slope_scale = 1.0 + empirical_slope.abs().max(reference.map_or(0.0, |r| r.a.abs()));
        let mut half_width = (x * slope_scale).max(1e-9 * seed.abs().max(1.0));
        let (mut lo, mut hi);
        let mut bracketed = false;
        let mut expansions = 0;
        loop {
            lo = interval.clamp_inside(seed - half_width);
            hi = interval.clamp_inside(seed + half_width);
            if f(lo).signum() != f(hi).signum() {
                bracketed = true;
                break;
            }
            expansions += 1;
            if expansions > 60 {
                break;
            }
            half_width *= 2.0;
        }
        if !bracketed {
            return Err(ContinuationError::BracketLost {
                x,
                seed,
                half_width,
            });
        }

        let result = newton_bisect(&f, &df, lo, hi, seed.clamp(lo, hi), tol.root_tol, 100)
            .map_err(|e| match e {
                SolveFailure::NoBracket => ContinuationError::BracketLost {
                    x,
                    seed,
                    half_width,
                },
                SolveFailure::Stalled { last_x, last_f } => ContinuationError::NewtonDiverged {
                    x,
                    last_iterate: last_x,
                    residual: last_f.abs(),
                },
            })?;
        let lambda = result.root;
        let residual = result.f_value.abs();
        if residual > tol.root_tol {
            return Err(ContinuationError::NewtonDiverged {
                x,
                last_iterate: lambda,
                residual,
            });
        }
        let f_lambda = df(lambda);
        if f_lambda.abs() < tol.simple_tol {
            return Err(ContinuationError::SimplicityLost {
                x,
                lambda,
                f_lambda_abs: f_lambda.abs(),
                tol: tol.simple_tol,
            });
        }

        empirical_slope = (lambda - prev_lambda) / (x - prev_x);
        prev_x = x;
        prev_lambda = lambda;
        samples.push(BranchSample {
            x,
            lambda,
            residual,
            newton_iters: result.iters,
        });
    }

    Ok(BranchTrace {
        samples,
        lambda0,
        reference: reference.copied(),
        fitted: None,
    })
}

/// Multiples of machine epsilon below which a remainder is round-off, not
/// signal; such samples are excluded from slope measurement.
const NOISE_FLOOR_ULPS: f64 = 64.0;

/// Least-squares fit of the tracked branch.
///
/// The reduced values `z = (lambda - lambda0)/x` are fitted against
/// `{1, x}`, which weights all samples equally in `z` and so keeps the
/// intercept `a_hat` unbiased by the higher-order tail even at `order = 1`.
/// The remainder slope is measured after subtracting the order-`order`
/// truncation of the trace's reference expansion (falling back to the fitted
/// coefficients when no reference is attached), over the smallest decade of
/// `x` whose remainders exceed the round-off floor.
pub fn fit_coefficients(trace: &BranchTrace, order: u8) -> Result<Fitted, ContinuationError> {
    assert!(order == 1 || order == 2, "expansion order is 1 or 2");
    let pts: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .filter(|s| s.x > 0.0)
        .map(|s| (s.x, s.lambda))
        .collect();
    let count = pts.len();
    let decades = if count >= 2 {
        (pts[count - 1].0 / pts[0].0).log10()
    } else {
        0.0
    };
    if count < 4 || decades < 1.0 - 1e-9 {
        return Err(ContinuationError::InsufficientSamples { count, decades });
    }

    let (mut s01, mut s11, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0);
    for &(x, lambda) in &pts {
        let z = (lambda - trace.lambda0) / x;
        s01 += x;
        s11 += x * x;
        t0 += z;
        t1 += z * x;
    }
    let s00 = count as f64;
    let det = s00 * s11 - s01 * s01;
    let a_hat = (t0 * s11 - t1 * s01) / det;
    let c1 = (s00 * t1 - s01 * t0) / det;

    let (coef_a, coef_b) = match &trace.reference {
        Some(r) if order == 1 => (r.a, 0.0),
        Some(r) if r.b.is_some() => (r.a, r.b.unwrap()),
        _ => (a_hat, if order == 2 { c1 } else { 0.0 }),
    };
    let model = |x: f64| {
        trace.lambda0
            + coef_a * x
            + if order == 2 { coef_b * x * x } else { 0.0 }
    };
    let floor = NOISE_FLOOR_ULPS * f64::EPSILON * trace.lambda0.abs().max(1.0);
    let masked: Vec<(f64, f64)> = pts
        .iter()
        .map(|&(x, lambda)| (x, (lambda - model(x)).abs()))
        .filter(|&(_, r)| r > floor)
        .collect();
    let remainder_slope = masked.first().map(|&(x_min, _)| x_min).and_then(|x_min| {
        let decade: Vec<(f64, f64)> = masked
            .iter()
            .filter(|&&(x, _)| x <= 10.0 * x_min * (1.0 + 1e-9))
            .map(|&(x, r)| (x.ln(), r.ln()))
            .collect();
        log_slope(&decade)
    });

    Ok(Fitted {
        a_hat,
        b_hat: Some(c1),
        remainder_slope,
    })
}

fn log_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
