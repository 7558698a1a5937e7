//! Scenario configuration: TOML schema, validation, and construction of the
//! coupled system it describes.

use num_complex::Complex64;
use pointcontact::{
    ComplexMatrix, CoupledSystem, CouplingSpec, HermitianMatrix, Interval, Tolerances, WeylModel,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// One scenario: the two Weyl models, the coupling parameters, the coupling
/// grid, and the numerical settings. Scalar fields come first so the
/// serialized TOML is valid (tables must follow plain values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Contact strength as `[re, im]`; only its modulus enters the branch,
    /// the phase is exercised by the invariance checks.
    #[serde(default = "default_omega")]
    pub omega: [f64; 2],
    /// Either the unperturbed eigenvalue itself or a bracket `[lo, hi]` to
    /// search; when absent the working interval is scanned for one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<Lambda0Spec>,
    #[serde(default = "default_grid")]
    pub omega_abs2_grid: GridSpec,
    pub model_tilde: ModelSpec,
    pub model_hat: ModelSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_omega() -> [f64; 2] {
    [0.3, 0.4]
}

fn default_grid() -> GridSpec {
    GridSpec::Geometric {
        geometric: GeometricGrid {
            lo: 1e-6,
            hi: 1e-3,
            per_decade: 8,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Half-space with a point contact: `M(lambda) = i sqrt(lambda - Q)`.
    /// `Q` is given either by its eigenvalues or as a dense Hermitian matrix
    /// of `[re, im]` entries (diagonalized internally).
    PointInteraction {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_eigenvalues: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_matrix: Option<Vec<Vec<[f64; 2]>>>,
    },
    /// Scalar rational `M(lambda)`, ascending coefficients, on a declared
    /// interval (`inf`/`-inf` are valid endpoints).
    ScalarRational {
        numerator: Vec<f64>,
        denominator: Vec<f64>,
        interval: [f64; 2],
    },
}

impl ModelSpec {
    pub fn dim(&self) -> Result<usize, ConfigError> {
        match self {
            ModelSpec::PointInteraction {
                q_eigenvalues,
                q_matrix,
            } => match (q_eigenvalues, q_matrix) {
                (Some(eigs), None) => Ok(eigs.len()),
                (None, Some(rows)) => Ok(rows.len()),
                (Some(_), Some(_)) => Err(invalid(
                    "point_interaction model: give q_eigenvalues or q_matrix, not both",
                )),
                (None, None) => Err(invalid(
                    "point_interaction model: one of q_eigenvalues, q_matrix is required",
                )),
            },
            ModelSpec::ScalarRational { .. } => Ok(1),
        }
    }

    fn validate(&self, label: &str) -> Result<(), ConfigError> {
        match self {
            ModelSpec::PointInteraction {
                q_eigenvalues,
                q_matrix,
            } => {
                self.dim()
                    .map_err(|e| invalid(format!("{label}: {e}")))?;
                if let Some(eigs) = q_eigenvalues {
                    if eigs.is_empty() {
                        return Err(invalid(format!("{label}: q_eigenvalues is empty")));
                    }
                    if eigs.iter().any(|v| !v.is_finite()) {
                        return Err(invalid(format!("{label}: q_eigenvalues must be finite")));
                    }
                }
                if let Some(rows) = q_matrix {
                    let d = rows.len();
                    if d == 0 || rows.iter().any(|r| r.len() != d) {
                        return Err(invalid(format!("{label}: q_matrix must be square")));
                    }
                    if rows
                        .iter()
                        .flatten()
                        .any(|e| !e[0].is_finite() || !e[1].is_finite())
                    {
                        return Err(invalid(format!("{label}: q_matrix entries must be finite")));
                    }
                }
                Ok(())
            }
            ModelSpec::ScalarRational {
                numerator,
                denominator,
                interval,
            } => {
                if numerator.is_empty() || denominator.is_empty() {
                    return Err(invalid(format!(
                        "{label}: numerator and denominator must be non-empty"
                    )));
                }
                if numerator.iter().chain(denominator).any(|c| !c.is_finite()) {
                    return Err(invalid(format!("{label}: coefficients must be finite")));
                }
                if denominator.iter().all(|&c| c == 0.0) {
                    return Err(invalid(format!("{label}: denominator is identically zero")));
                }
                if interval[0].is_nan() || interval[1].is_nan() || interval[0] >= interval[1] {
                    return Err(invalid(format!(
                        "{label}: interval must satisfy lo < hi, got [{}, {}]",
                        interval[0], interval[1]
                    )));
                }
                Ok(())
            }
        }
    }

    fn build(&self, label: &str) -> Result<WeylModel, ConfigError> {
        match self {
            ModelSpec::PointInteraction {
                q_eigenvalues,
                q_matrix,
            } => {
                let q = if let Some(eigs) = q_eigenvalues {
                    HermitianMatrix::from_real_diag(eigs)
                } else {
                    let rows = q_matrix.as_ref().expect("validated");
                    let entries: Vec<Complex64> = rows
                        .iter()
                        .flatten()
                        .map(|e| Complex64::new(e[0], e[1]))
                        .collect();
                    let m = ComplexMatrix::new(rows.len(), entries)
                        .map_err(|e| invalid(format!("{label}: {e}")))?;
                    HermitianMatrix::new(m).map_err(|e| invalid(format!("{label}: {e}")))?
                };
                Ok(WeylModel::make_point_interaction(q))
            }
            ModelSpec::ScalarRational {
                numerator,
                denominator,
                interval,
            } => WeylModel::make_scalar_rational(
                numerator,
                denominator,
                Interval::new(interval[0], interval[1]),
            )
            .map_err(|e| invalid(format!("{label}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    /// Explicit list of couplings `x = |omega|^2`.
    Explicit(Vec<f64>),
    Geometric { geometric: GeometricGrid },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricGrid {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lambda0Spec {
    Value(f64),
    Bracket([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simple_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<ScenarioConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        ScenarioConfig::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model_tilde.validate("model_tilde")?;
        self.model_hat.validate("model_hat")?;
        let dt = self.model_tilde.dim()?;
        let dh = self.model_hat.dim()?;
        if dt != dh {
            return Err(invalid(format!(
                "model dimensions differ: model_tilde has d = {dt}, model_hat has d = {dh}"
            )));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(invalid("alpha and beta must be finite"));
        }
        if !self.omega[0].is_finite() || !self.omega[1].is_finite() {
            return Err(invalid("omega must be finite"));
        }
        match &self.omega_abs2_grid {
            GridSpec::Explicit(xs) => {
                if xs.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(invalid(
                        "omega_abs2_grid entries must be finite and >= 0",
                    ));
                }
                if xs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("omega_abs2_grid must be strictly increasing"));
                }
            }
            GridSpec::Geometric { geometric } => {
                let g = geometric;
                if !(g.lo.is_finite() && g.hi.is_finite() && g.lo > 0.0 && g.hi > g.lo) {
                    return Err(invalid(format!(
                        "geometric grid needs 0 < lo < hi, got lo = {}, hi = {}",
                        g.lo, g.hi
                    )));
                }
                if g.per_decade == 0 {
                    return Err(invalid("geometric grid needs per_decade >= 1"));
                }
            }
        }
        match self.lambda0 {
            Some(Lambda0Spec::Value(v)) if !v.is_finite() => {
                return Err(invalid("lambda0 must be finite"));
            }
            Some(Lambda0Spec::Bracket([lo, hi])) if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                return Err(invalid(format!(
                    "lambda0 bracket must satisfy lo < hi, got [{lo}, {hi}]"
                )));
            }
            _ => {}
        }
        for (name, v) in [
            ("root_tol", self.tolerances.root_tol),
            ("simple_tol", self.tolerances.simple_tol),
            ("fd_step", self.tolerances.fd_step),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("tolerances.{name} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// The coupling grid, expanded when geometric.
    pub fn grid(&self) -> Vec<f64> {
        match &self.omega_abs2_grid {
            GridSpec::Explicit(xs) => xs.clone(),
            GridSpec::Geometric { geometric: g } => {
                pointcontact::geometric_grid(g.lo, g.hi, g.per_decade)
            }
        }
    }

    /// Tolerances with config values filled in over the library defaults.
    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            root_tol: self.tolerances.root_tol.unwrap_or(d.root_tol),
            simple_tol: self.tolerances.simple_tol.unwrap_or(d.simple_tol),
            fd_step: self.tolerances.fd_step.unwrap_or(d.fd_step),
        }
    }

    pub fn build_system(&self) -> Result<CoupledSystem, ConfigError> {
        let tilde = self.model_tilde.build("model_tilde")?;
        let hat = self.model_hat.build("model_hat")?;
        let dim = tilde.dim();
        let omega = Complex64::new(self.omega[0], self.omega[1]);
        let coupling = CouplingSpec::new(self.alpha, self.beta, omega, dim);
        CoupledSystem::new(tilde, hat, coupling).map_err(|e| invalid(e.to_string()))
    }
}
