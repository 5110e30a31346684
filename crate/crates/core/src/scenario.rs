//! JSON scenario files driving the command-line front-end.
//!
//! See `scenarios/schema.json` for the full schema. A minimal file:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "straight",
//!   "beam": { "length": 1.0, "a0": 0.1 },
//!   "targets": { "theta_tip": 0.0, "theta_bar": 0.0 }
//! }
//! ```

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::constraints::{build_constraint_matrix, fit_initial_curvature, nullspace};
use crate::curvature::{FourierCurvature, DEFAULT_GRID_N};
use crate::geometry::BeamConfig;
use crate::oracle::{DEFAULT_N_DISKS, REFINEMENT_N_DISKS};

pub const SCHEMA_VERSION: u32 = 1;

/// A scenario that failed to load or validate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Dotted path of the offending field, or `<json>` for syntax errors.
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    pub beam: BeamSpec,
    #[serde(default)]
    pub targets: Option<Targets>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub oracle: Option<OracleSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_name() -> String {
    "scenario".to_string()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    pub length: f64,
    pub a0: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
}

fn default_modes() -> usize {
    3
}

fn default_grid_n() -> usize {
    DEFAULT_GRID_N
}

/// Distal posture targets. The average angle may be given directly or as
/// the tip ratio it implies, `theta_bar = atan(tip_ratio)`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    pub theta_tip: f64,
    #[serde(default)]
    pub theta_bar: Option<f64>,
    #[serde(default)]
    pub tip_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DirectionSpec {
    Index(usize),
    Named(String),
}

impl Default for DirectionSpec {
    fn default() -> Self {
        DirectionSpec::Named("midspan".to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub direction: DirectionSpec,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_disk_counts")]
    pub n_disks: Vec<usize>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
}

fn default_disk_counts() -> Vec<usize> {
    REFINEMENT_N_DISKS.to_vec()
}

/// Gaussian curvature bump applied to a disk chain before projection.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub amplitude: f64,
    #[serde(default = "default_center")]
    pub center: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_perturbed_disks")]
    pub n_disks: Vec<usize>,
}

fn default_center() -> f64 {
    0.5
}

fn default_width() -> f64 {
    0.15
}

fn default_perturbed_disks() -> Vec<usize> {
    vec![DEFAULT_N_DISKS]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File-name prefix; defaults to the scenario name.
    #[serde(default)]
    pub prefix: Option<String>,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub svg: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            prefix: None,
            csv: true,
            svg: true,
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| ConfigError {
            field: "<json>".to_string(),
            message: e.to_string(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn prefix(&self) -> &str {
        self.output.prefix.as_deref().unwrap_or(&self.name)
    }

    /// Structural checks that do not need any numerics.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        if self.prefix().is_empty() || self.prefix().contains(['/', '\\']) {
            return Err(invalid(
                "output.prefix",
                "must be a non-empty file-name prefix",
            ));
        }
        let b = &self.beam;
        if !(b.length > 0.0) || !b.length.is_finite() {
            return Err(invalid("beam.length", "must be positive and finite"));
        }
        if !(b.a0 > 0.0) || !b.a0.is_finite() {
            return Err(invalid("beam.a0", "must be positive and finite"));
        }
        if b.a0 >= b.length {
            return Err(invalid("beam.a0", "must be smaller than beam.length"));
        }
        if b.modes < 2 {
            return Err(invalid("beam.modes", "need at least 2 Fourier modes"));
        }
        if b.grid_n < 3 || b.grid_n.is_multiple_of(2) {
            return Err(invalid("beam.grid_n", "must be odd and at least 3"));
        }
        match (&self.targets, &self.coefficients) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(invalid(
                    "targets",
                    "give exactly one of `targets` or `coefficients`",
                ));
            }
            (Some(t), None) => {
                if !t.theta_tip.is_finite() {
                    return Err(invalid("targets.theta_tip", "must be finite"));
                }
                match (t.theta_bar, t.tip_ratio) {
                    (Some(v), None) | (None, Some(v)) if v.is_finite() => {}
                    (Some(_), None) => return Err(invalid("targets.theta_bar", "must be finite")),
                    (None, Some(_)) => return Err(invalid("targets.tip_ratio", "must be finite")),
                    _ => {
                        return Err(invalid(
                            "targets.theta_bar",
                            "give exactly one of `theta_bar` or `tip_ratio`",
                        ))
                    }
                }
            }
            (None, Some(c)) => {
                if c.len() != 2 * b.modes {
                    return Err(invalid(
                        "coefficients",
                        format!(
                            "expected {} values for {} modes, got {}",
                            2 * b.modes,
                            b.modes,
                            c.len()
                        ),
                    ));
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("coefficients", "values must be finite"));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.alphas.is_empty() {
                return Err(invalid("sweep.alphas", "must not be empty"));
            }
            if sweep.alphas.iter().any(|a| !a.is_finite()) {
                return Err(invalid("sweep.alphas", "values must be finite"));
            }
            match &sweep.direction {
                DirectionSpec::Index(i) if *i >= 2 * b.modes - 2 => {
                    return Err(invalid(
                        "sweep.direction",
                        format!(
                            "index {i} out of range for a {}-dimensional nullspace",
                            2 * b.modes - 2
                        ),
                    ));
                }
                DirectionSpec::Named(n) if n != "midspan" => {
                    return Err(invalid(
                        "sweep.direction",
                        format!("unknown direction `{n}`"),
                    ));
                }
                _ => {}
            }
        }
        if let Some(oracle) = &self.oracle {
            if oracle.n_disks.is_empty() || oracle.n_disks.iter().any(|&n| n < 3) {
                return Err(invalid(
                    "oracle.n_disks",
                    "need a non-empty list of counts >= 3",
                ));
            }
            if let Some(p) = &oracle.perturbation {
                if !p.amplitude.is_finite() {
                    return Err(invalid("oracle.perturbation.amplitude", "must be finite"));
                }
                if !(0.0..=1.0).contains(&p.center) {
                    return Err(invalid("oracle.perturbation.center", "must lie in [0, 1]"));
                }
                if !(p.width > 0.0) || !p.width.is_finite() {
                    return Err(invalid("oracle.perturbation.width", "must be positive"));
                }
                if p.n_disks.is_empty() || p.n_disks.iter().any(|&n| n < 3) {
                    return Err(invalid("oracle.perturbation.n_disks", "need counts >= 3"));
                }
            }
        }
        Ok(())
    }

    pub fn beam_config(&self, grid_override: Option<usize>) -> Result<BeamConfig, ConfigError> {
        let b = &self.beam;
        let grid_n = grid_override.unwrap_or(b.grid_n);
        if grid_n < 3 || grid_n.is_multiple_of(2) {
            return Err(invalid("--grid-n", "must be odd and at least 3"));
        }
        BeamConfig::new(b.length, b.a0, b.modes, grid_n).map_err(|e| invalid("beam", e.to_string()))
    }

    /// The undeformed curvature: fitted to the targets or taken verbatim.
    pub fn initial_curvature(&self, cfg: &BeamConfig) -> crate::Result<FourierCurvature> {
        match (&self.targets, &self.coefficients) {
            (Some(t), _) => {
                let theta_bar = t
                    .theta_bar
                    .unwrap_or_else(|| t.tip_ratio.unwrap_or(0.0).atan());
                fit_initial_curvature(t.theta_tip, theta_bar, cfg)
            }
            (None, Some(c)) => FourierCurvature::new(c.clone(), cfg.length()),
            (None, None) => unreachable!("validated scenario has a shape"),
        }
    }

    /// Unit sweep direction in coefficient space.
    pub fn sweep_direction(&self, cfg: &BeamConfig) -> crate::Result<Vec<f64>> {
        let basis = nullspace(&build_constraint_matrix(cfg))?;
        match self.sweep.as_ref().map(|s| &s.direction) {
            Some(DirectionSpec::Index(i)) => Ok(basis.vectors()[*i].clone()),
            _ => basis.midspan_direction(cfg.length()),
        }
    }
}
