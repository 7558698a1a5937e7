//! Cross-checks of the analytic expansion coefficients against closed-form
//! eigenvalue branches that are derived here independently, by solving the
//! characteristic equation in radicals (or by bisection on the explicit
//! scalar equation) rather than through any of the library's determinant
//! calculus.

use num_complex::Complex64;
use pointcontact::{
    coeff_a, coeff_ab_scalar, find_isolated_eigenvalue, fit_coefficients, geometric_grid,
    track_branch, CoupledSystem, CouplingSpec, HermitianMatrix, Interval, Tolerances, WeylModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point_system(
    tilde_eigs: &[f64],
    hat_eigs: &[f64],
    alpha: f64,
    beta: f64,
) -> CoupledSystem {
    let tilde = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(tilde_eigs));
    let hat = WeylModel::make_point_interaction(HermitianMatrix::from_real_diag(hat_eigs));
    let dim = tilde_eigs.len();
    let coupling = CouplingSpec::new(alpha, beta, Complex64::new(0.3, 0.4), dim);
    CoupledSystem::new(tilde, hat, coupling).unwrap()
}

/// Two half lines with zero contact potentials, `alpha = -1`, `beta = -2`.
///
/// With `s = sqrt(-lambda)` the characteristic equation is
/// `(s - 1)(s - 2) = x`, so the branch through `lambda0 = -4` is
/// `lambda(x) = -((3 + sqrt(1 + 4x)) / 2)^2 = -4 - 4x + 3x^2 + O(x^3)`.
#[test]
fn half_line_branch_matches_radical_root() {
    let sys = point_system(&[0.0], &[0.0], -1.0, -2.0);
    let tol = Tolerances::default();

    let probe = sys.hat().detfun(-2.0);
    let lambda0 = find_isolated_eigenvalue(&probe, -5.0, -3.0, &tol).unwrap();
    assert!((lambda0 + 4.0).abs() < 1e-10);

    let res = coeff_ab_scalar(&sys, lambda0, &tol).unwrap();
    assert!((res.a + 4.0).abs() < 1e-12);
    assert!((res.b.unwrap() - 3.0).abs() < 1e-12);

    let xs = geometric_grid(1e-6, 1e-3, 8);
    let trace = track_branch(&sys, lambda0, &xs, Some(&res), &tol).unwrap();
    for s in &trace.samples {
        let root = -(0.5 * (3.0 + (1.0 + 4.0 * s.x).sqrt())).powi(2);
        assert!(
            (s.lambda - root).abs() < 1e-10,
            "x = {}: tracked {} vs closed form {}",
            s.x,
            s.lambda,
            root
        );
    }

    let fit1 = fit_coefficients(&trace, 1).unwrap();
    let fit2 = fit_coefficients(&trace, 2).unwrap();
    assert!((fit1.a_hat + 4.0).abs() < 1e-4);
    assert!((fit2.b_hat.unwrap() - 3.0).abs() < 1e-2);
    assert!(fit2.remainder_slope.unwrap() >= 2.8);
}

/// Same two models with the roles of the sides exchanged (`alpha = -2`,
/// `beta = -1`), which selects the other root of `(s - 1)(s - 2) = x`:
/// `lambda(x) = -((3 - sqrt(1 + 4x)) / 2)^2 = -1 + 2x - 3x^2 + O(x^3)`.
#[test]
fn role_swapped_branch_takes_other_radical_root() {
    let sys = point_system(&[0.0], &[0.0], -2.0, -1.0);
    let tol = Tolerances::default();

    let probe = sys.hat().detfun(-1.0);
    let lambda0 = find_isolated_eigenvalue(&probe, -2.5, -0.5, &tol).unwrap();
    assert!((lambda0 + 1.0).abs() < 1e-10);

    let res = coeff_ab_scalar(&sys, lambda0, &tol).unwrap();
    assert!((res.a - 2.0).abs() < 1e-12);
    assert!((res.b.unwrap() + 3.0).abs() < 1e-12);

    let xs = geometric_grid(1e-6, 1e-3, 8);
    let trace = track_branch(&sys, lambda0, &xs, Some(&res), &tol).unwrap();
    for s in &trace.samples {
        let root = -(0.5 * (3.0 - (1.0 + 4.0 * s.x).sqrt())).powi(2);
        assert!((s.lambda - root).abs() < 1e-10);
    }
}

/// Scalar toy with `M~ = M^ = lambda`, `alpha = 0`, `beta = 1`: the
/// characteristic equation `lambda^2 - lambda - x = 0` has the exact root
/// `lambda(x) = (1 + sqrt(1 + 4x)) / 2 = 1 + x - x^2 + O(x^3)`.
#[test]
fn scalar_toy_matches_quadratic_formula() {
    let model = || {
        WeylModel::make_scalar_rational(&[0.0, 1.0], &[1.0], Interval::all()).unwrap()
    };
    let coupling = CouplingSpec::new(0.0, 1.0, Complex64::new(0.3, 0.4), 1);
    let sys = CoupledSystem::new(model(), model(), coupling).unwrap();
    let tol = Tolerances::default();

    let res = coeff_ab_scalar(&sys, 1.0, &tol).unwrap();
    assert!((res.a - 1.0).abs() < 1e-12);
    assert!((res.b.unwrap() + 1.0).abs() < 1e-12);

    let single = track_branch(&sys, 1.0, &[0.01], Some(&res), &tol).unwrap();
    let exact = 0.5 * (1.0 + 1.04f64.sqrt());
    assert!((single.samples[0].lambda - exact).abs() < 1e-10);

    let xs = geometric_grid(1e-6, 1e-3, 8);
    let trace = track_branch(&sys, 1.0, &xs, Some(&res), &tol).unwrap();
    for s in &trace.samples {
        let root = 0.5 * (1.0 + (1.0 + 4.0 * s.x).sqrt());
        assert!((s.lambda - root).abs() < 1e-10);
    }
}

/// Distinct contact potentials (`q~ = 1/2`, `q^ = 0`): no closed form in
/// radicals, so the oracle inverts the explicit scalar equation
/// `(sqrt(s^2 + 1/2) - 1)(s - 2) = x`, `s = sqrt(-lambda)`, by bisection.
#[test]
fn shifted_potential_branch_matches_bisection_oracle() {
    let sys = point_system(&[0.5], &[0.0], -1.0, -2.0);
    let tol = Tolerances::default();

    let res = coeff_ab_scalar(&sys, -4.0, &tol).unwrap();
    let u = 4.5f64.sqrt();
    let a = 4.0 / (1.0 - u);
    let b = a * a * (1.0 / (2.0 * u * (u - 1.0)) - 1.0 / 16.0);
    assert!((res.a - a).abs() < 1e-12);
    assert!((res.b.unwrap() - b).abs() < 1e-12);

    let g = |s: f64| ((s * s + 0.5).sqrt() - 1.0) * (s - 2.0);
    let invert = |x: f64| {
        let (mut lo, mut hi) = (2.0f64, 2.5f64);
        assert!(g(lo) <= x && x <= g(hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        -(0.5 * (lo + hi)).powi(2)
    };

    let xs = geometric_grid(1e-6, 1e-3, 8);
    let trace = track_branch(&sys, -4.0, &xs, Some(&res), &tol).unwrap();
    for s in &trace.samples {
        assert!((s.lambda - invert(s.x)).abs() < 1e-9);
    }
    let fit = fit_coefficients(&trace, 2).unwrap();
    assert!((fit.a_hat - a).abs() < 1e-4);
    assert!((fit.b_hat.unwrap() - b).abs() < 1e-2);
}

/// Two-channel system `Q~ = diag(0, 0)`, `Q^ = diag(0, 5)`: all blocks are
/// diagonal, the characteristic determinant factors, and the branch through
/// `lambda0 = -4` solves the same scalar equation as the half-line case, so
/// the radical root doubles as the d = 2 oracle.
#[test]
fn two_channel_branch_matches_factored_determinant() {
    let sys = point_system(&[0.0, 0.0], &[0.0, 5.0], -1.0, -2.0);
    let tol = Tolerances::default();

    let probe = sys.hat().detfun(-2.0);
    let lambda0 = find_isolated_eigenvalue(&probe, -5.0, -3.0, &tol).unwrap();
    assert!((lambda0 + 4.0).abs() < 1e-10);

    let res = coeff_a(&sys, lambda0, &tol).unwrap();
    assert!((res.a + 4.0).abs() < 1e-12);
    assert!(res.b.is_none());

    let xs = geometric_grid(1e-6, 1e-3, 8);
    let trace = track_branch(&sys, lambda0, &xs, Some(&res), &tol).unwrap();
    for s in &trace.samples {
        let root = -(0.5 * (3.0 + (1.0 + 4.0 * s.x).sqrt())).powi(2);
        assert!((s.lambda - root).abs() < 1e-9);
    }
    let fit = fit_coefficients(&trace, 1).unwrap();
    assert!((fit.a_hat + 4.0).abs() < 1e-4);
    assert!(fit.remainder_slope.unwrap() >= 1.8);
}

/// On scalar systems the general trace formula and the factored scalar
/// formula are algebraically identical; check they agree to near machine
/// precision across randomly drawn admissible scenarios.
#[test]
fn general_formula_reduces_to_scalar_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x052a_1a52);
    let tol = Tolerances::default();
    for _ in 0..10 {
        let q_tilde: f64 = rng.gen_range(0.0..3.0);
        let q_hat: f64 = rng.gen_range(0.0..3.0);
        let beta: f64 = rng.gen_range(-3.0..-1.8);
        let alpha: f64 = rng.gen_range(0.5..2.0);
        let lambda0 = q_hat - beta * beta;

        let sys = point_system(&[q_tilde], &[q_hat], alpha, beta);
        let general = coeff_a(&sys, lambda0, &tol).unwrap();
        let scalar = coeff_ab_scalar(&sys, lambda0, &tol).unwrap();
        assert!(
            (general.a - scalar.a).abs() <= 1e-12,
            "q~ = {q_tilde}, q^ = {q_hat}: {} vs {}",
            general.a,
            scalar.a
        );
    }
}
