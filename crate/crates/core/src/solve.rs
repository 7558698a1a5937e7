//! Safeguarded scalar Newton iteration used by branch tracking.
//!
//! Newton steps are accepted only while they stay inside the current
//! bracket; otherwise the step falls back to bisection, so convergence is
//! guaranteed once a sign change is bracketed.

/// Converged root with the diagnostics branch tracking records per sample.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RootResult {
    pub root: f64,
    pub f_value: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum SolveFailure {
    /// No sign change over the supplied bracket.
    NoBracket,
    /// Iteration cap reached without meeting the residual tolerance.
    Stalled { last_x: f64, last_f: f64 },
}

/// Find a root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite
/// sign. `df` is the analytic derivative. Stops when `|f| <= f_tol` or the
/// bracket width shrinks below machine spacing around the root.
pub(crate) fn newton_bisect(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    f_tol: f64,
    max_iter: usize,
) -> Result<RootResult, SolveFailure> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(RootResult {
            root: lo,
            f_value: 0.0,
            iters: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(RootResult {
            root: hi,
            f_value: 0.0,
            iters: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(SolveFailure::NoBracket);
    }

    let mut x = x0.clamp(lo, hi);
    let mut fx = f(x);
    for iter in 1..=max_iter {
        if fx.abs() <= f_tol {
            return Ok(RootResult {
                root: x,
                f_value: fx,
                iters: iter - 1,
            });
        }
        // shrink the bracket around the sign change
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let dfx = df(x);
        let newton = x - fx / dfx;
        x = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        fx = f(x);
        if hi - lo <= f64::EPSILON * (x.abs().max(1.0)) {
            return Ok(RootResult {
                root: x,
                f_value: fx,
                iters: iter,
            });
        }
    }
    if fx.abs() <= f_tol {
        Ok(RootResult {
            root: x,
            f_value: fx,
            iters: max_iter,
        })
    } else {
        Err(SolveFailure::Stalled {
            last_x: x,
            last_f: fx,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_root() {
        let f = |x: f64| x * x - 2.0;
        let df = |x: f64| 2.0 * x;
        let r = newton_bisect(&f, &df, 0.0, 2.0, 1.0, 1e-14, 60).unwrap();
        assert!((r.root - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(r.iters < 10);
    }

    #[test]
    fn no_sign_change_reported() {
        let f = |x: f64| x * x + 1.0;
        let df = |x: f64| 2.0 * x;
        assert_eq!(
            newton_bisect(&f, &df, -1.0, 1.0, 0.0, 1e-14, 60).unwrap_err(),
            SolveFailure::NoBracket
        );
    }

    #[test]
    fn bisection_rescues_bad_newton_steps() {
        // derivative vanishes at the initial guess; bisection must take over
        let f = |x: f64| x * x * x - 8.0;
        let df = |x: f64| 3.0 * x * x;
        let r = newton_bisect(&f, &df, 0.0, 10.0, 0.0, 1e-13, 100).unwrap();
        assert!((r.root - 2.0).abs() < 1e-11);
    }

    #[test]
    fn endpoint_root_short_circuits() {
        let f = |x: f64| x - 1.0;
        let df = |_: f64| 1.0;
        let r = newton_bisect(&f, &df, 1.0, 3.0, 2.0, 1e-14, 10).unwrap();
        assert_eq!(r.root, 1.0);
        assert_eq!(r.iters, 0);
    }
}
