//! Command dispatch, error-to-exit-code mapping, and output routing.
//!
//! Exit codes: 0 success, 1 configuration problems, 2 violated expansion
//! hypotheses (typed error name on stderr), 3 branch-tracking failures,
//! 4 failed verification checks. Nothing is written to the selected output
//! on exit codes 1-3; the verify report is written even when checks fail.

use crate::config::{ConfigError, Format, Lambda0Spec, ScenarioConfig};
use crate::output;
use clap::{Args, Parser, Subcommand};
use pointcontact::{
    coeff_a, coeff_ab_scalar, find_isolated_eigenvalue, fit_coefficients, run_battery,
    track_branch, CheckStatus, ContinuationError, CoupledSystem, ExpansionResult,
    FaultInjection, PerturbationError, Tolerances, WeylError,
};
use std::fmt;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "pointcontact",
    version,
    about = "Weak-coupling eigenvalue expansions for abstract point contacts",
    after_help = "Exit codes: 0 ok, 1 config error, 2 hypothesis violation, \
                  3 tracking failure, 4 failed verification checks."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the expansion coefficients at the decoupled eigenvalue.
    Coeffs(CommonArgs),
    /// Track the eigenvalue branch over the coupling grid and compare it
    /// with the expansion.
    Branch(CommonArgs),
    /// Run the verification battery on the configured scenario.
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario description (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Output format; overrides the config (default: csv).
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write results to this file instead of stdout; overrides the config.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Root residual tolerance; overrides the environment and the config.
    #[arg(long, env = "POINTCONTACT_TOL_ROOT", value_name = "TOL")]
    tol_root: Option<f64>,

    /// Simplicity threshold; overrides the environment and the config.
    #[arg(long, env = "POINTCONTACT_TOL_SIMPLE", value_name = "TOL")]
    tol_simple: Option<f64>,

    /// Deliberately corrupt one internal formula (test hook).
    #[arg(long, hide = true, value_name = "NAME")]
    inject_fault: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Hypothesis { name: &'static str, message: String },
    Tracking { name: &'static str, message: String },
    ChecksFailed { failed: usize },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Hypothesis { .. } => 2,
            CliError::Tracking { .. } => 3,
            CliError::ChecksFailed { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Hypothesis { name, message } => write!(f, "{name}: {message}"),
            CliError::Tracking { name, message } => write!(f, "{name}: {message}"),
            CliError::ChecksFailed { failed } => {
                write!(f, "verification failed: {failed} check(s) did not pass")
            }
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> CliError {
        CliError::Config(e.to_string())
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> CliError {
        CliError::Hypothesis {
            name: e.name(),
            message: e.to_string(),
        }
    }
}

impl From<PerturbationError> for CliError {
    fn from(e: PerturbationError) -> CliError {
        CliError::Hypothesis {
            name: e.name(),
            message: e.to_string(),
        }
    }
}

impl From<ContinuationError> for CliError {
    fn from(e: ContinuationError) -> CliError {
        CliError::Tracking {
            name: e.name(),
            message: e.to_string(),
        }
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

type CommandFn = fn(
    &ScenarioConfig,
    &CoupledSystem,
    f64,
    &Tolerances,
    Format,
) -> Result<(String, Option<CliError>), CliError>;

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (args, cmd): (&CommonArgs, CommandFn) = match &cli.command {
        Command::Coeffs(a) => (a, cmd_coeffs),
        Command::Branch(a) => (a, cmd_branch),
        Command::Verify(a) => (a, cmd_verify),
    };

    let cfg = ScenarioConfig::load(&args.config)?;
    let tol = resolve_tolerances(&cfg, args)?;
    let mut sys = cfg.build_system()?;
    if let Some(name) = &args.inject_fault {
        let fault = FaultInjection::parse(name)
            .ok_or_else(|| CliError::Config(format!("unknown fault {name:?}")))?;
        sys.inject_fault(fault);
    }
    let format = args.format.or(cfg.output.format).unwrap_or(Format::Csv);

    let lambda0 = resolve_lambda0(&cfg, &sys, &tol)?;
    let (text, failure) = cmd(&cfg, &sys, lambda0, &tol, format)?;
    write_output(args, &cfg, &text)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn resolve_tolerances(cfg: &ScenarioConfig, args: &CommonArgs) -> Result<Tolerances, CliError> {
    let mut t = cfg.tolerances();
    for (name, value, slot) in [
        ("--tol-root", args.tol_root, &mut t.root_tol as &mut f64),
        ("--tol-simple", args.tol_simple, &mut t.simple_tol),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
            *slot = v;
        }
    }
    Ok(t)
}

/// The analytic expansion: order 2 for scalar systems, order 1 otherwise.
fn reference_coeffs(
    sys: &CoupledSystem,
    lambda0: f64,
    tol: &Tolerances,
) -> Result<ExpansionResult, CliError> {
    let res = if sys.dim() == 1 {
        coeff_ab_scalar(sys, lambda0, tol)?
    } else {
        coeff_a(sys, lambda0, tol)?
    };
    Ok(res)
}

fn resolve_lambda0(
    cfg: &ScenarioConfig,
    sys: &CoupledSystem,
    tol: &Tolerances,
) -> Result<f64, CliError> {
    let probe = sys.hat().detfun(sys.coupling().beta);
    match cfg.lambda0 {
        Some(Lambda0Spec::Value(v)) => Ok(v),
        Some(Lambda0Spec::Bracket([lo, hi])) => {
            Ok(find_isolated_eigenvalue(&probe, lo, hi, tol)?)
        }
        None => {
            // No location given: walk a window of the working interval and
            // bracket the first sign change of the decoupled determinant.
            let w = sys.working_interval();
            let (lo, hi) = if w.hi.is_finite() {
                (if w.lo.is_finite() { w.lo } else { w.hi - 10.0 }, w.hi)
            } else if w.lo.is_finite() {
                (w.lo, w.lo + 10.0)
            } else {
                (-10.0, 10.0)
            };
            let margin = 0.02 * (hi - lo);
            let (lo, hi) = (lo + margin, hi - margin);
            let n = 256;
            let mut prev: Option<(f64, f64)> = None;
            for k in 0..=n {
                let x = lo + (hi - lo) * (k as f64) / (n as f64);
                let f = probe.detfun(x)?;
                if let Some((px, pf)) = prev {
                    if pf == 0.0 || pf.signum() != f.signum() {
                        return Ok(find_isolated_eigenvalue(&probe, px, x, tol)?);
                    }
                }
                prev = Some((x, f));
            }
            Err(WeylError::NoSignChange { lo, hi }.into())
        }
    }
}

fn cmd_coeffs(
    _cfg: &ScenarioConfig,
    sys: &CoupledSystem,
    lambda0: f64,
    tol: &Tolerances,
    format: Format,
) -> Result<(String, Option<CliError>), CliError> {
    let res = reference_coeffs(sys, lambda0, tol)?;
    let text = match format {
        Format::Csv => output::coeffs_csv(&res),
        Format::Json => output::coeffs_json(&res),
    };
    Ok((text, None))
}

fn cmd_branch(
    cfg: &ScenarioConfig,
    sys: &CoupledSystem,
    lambda0: f64,
    tol: &Tolerances,
    format: Format,
) -> Result<(String, Option<CliError>), CliError> {
    let reference = reference_coeffs(sys, lambda0, tol)?;
    let xs = cfg.grid();
    let mut trace = track_branch(sys, lambda0, &xs, Some(&reference), tol)?;
    trace.fitted = match fit_coefficients(&trace, reference.order) {
        Ok(f) => Some(f),
        Err(ContinuationError::InsufficientSamples { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        Format::Csv => output::branch_csv(&trace, &reference),
        Format::Json => output::branch_json(&trace, &reference),
    };
    Ok((text, None))
}

fn cmd_verify(
    cfg: &ScenarioConfig,
    sys: &CoupledSystem,
    lambda0: f64,
    tol: &Tolerances,
    format: Format,
) -> Result<(String, Option<CliError>), CliError> {
    let xs = cfg.grid();
    let checks = run_battery(sys, lambda0, &xs, tol);
    let text = match format {
        Format::Csv => output::report_csv(&checks),
        Format::Json => output::report_json(&checks),
    };
    let failed = checks
        .iter()
        .filter(|c| c.status == CheckStatus::Fail)
        .count();
    let failure = (failed > 0).then_some(CliError::ChecksFailed { failed });
    Ok((text, failure))
}

fn write_output(args: &CommonArgs, cfg: &ScenarioConfig, text: &str) -> Result<(), CliError> {
    let path = args.out.as_ref().or(cfg.output.path.as_ref());
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
