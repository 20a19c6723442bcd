//! Experiment configuration as read from TOML (or JSON) files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::PhaseResolution;
use crate::error::Error;
use crate::montecarlo::{Alignment, FadeSharing, Metric, NetworkParams, PathBMode, RunSpec};

use super::CliError;

/// Densities per km², converted to per m² at the engine boundary.
pub const PER_KM2: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Modes {
    #[serde(default)]
    pub path_b: PathBMode,
    #[serde(default)]
    pub alignment: Alignment,
    #[serde(default)]
    pub ris_fades: FadeSharing,
}

/// How a gate compares the simulated value with its analytic reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// `|mc - reference| <= tolerance`.
    AbsGap,
    /// `mc >= reference - tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    /// Analytic engine the simulation is compared against.
    pub engine: String,
    pub metric: Metric,
    pub kind: GateKind,
    pub tolerance: f64,
    /// Thresholds (dB) the gate applies to; all configured thresholds if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds_db: Option<Vec<f64>>,
}

pub fn default_gates() -> Vec<Gate> {
    vec![
        Gate {
            engine: "analytic_q2".into(),
            metric: Metric::GammaO,
            kind: GateKind::AbsGap,
            tolerance: 0.02,
            thresholds_db: None,
        },
        Gate {
            engine: "analytic_q23".into(),
            metric: Metric::GammaA,
            kind: GateKind::AbsGap,
            tolerance: 0.02,
            thresholds_db: None,
        },
        Gate {
            engine: "approx1".into(),
            metric: Metric::GammaB,
            kind: GateKind::AbsGap,
            tolerance: 0.05,
            thresholds_db: Some(vec![5.0]),
        },
        Gate {
            engine: "approx2".into(),
            metric: Metric::GammaB,
            kind: GateKind::AtLeast,
            tolerance: 0.03,
            thresholds_db: Some(vec![5.0]),
        },
    ]
}

fn default_thresholds() -> Vec<f64> {
    vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramConfig {
    #[serde(default)]
    pub quantities: Vec<crate::montecarlo::Quantity>,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_bins() -> usize {
    60
}

impl Default for HistogramConfig {
    fn default() -> Self {
        Self {
            quantities: Vec::new(),
            bins: default_bins(),
        }
    }
}

/// All deployment and run parameters. Densities are per km².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    pub lambda_bs: f64,
    pub lambda_ris: f64,
    pub p_s: f64,
    pub n_elements: u64,
    pub m_elements: u64,
    pub beta: f64,
    pub mu: f64,
    pub alpha: f64,
    /// Minimum BS to RIS distance in meters for the reflected-power moment.
    pub epsilon_floor: f64,
    /// RIS phase quantization depth; absent means ideal phases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_bits: Option<u32>,
    pub thresholds_db: Vec<f64>,
    /// Sampling radii in meters; absent means large enough to hold 2000
    /// expected points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ris_window: Option<f64>,
    pub n_trials: u64,
    pub master_seed: u64,
    pub modes: Modes,
    pub gates: Vec<Gate>,
    pub histograms: HistogramConfig,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            lambda_bs: 25.0,
            lambda_ris: 50_000.0,
            p_s: 2.0,
            n_elements: 16,
            m_elements: 100,
            beta: 0.9,
            mu: 1.0,
            alpha: 4.0,
            epsilon_floor: 1.0,
            phase_bits: None,
            thresholds_db: default_thresholds(),
            bs_window: None,
            ris_window: None,
            n_trials: 100_000,
            master_seed: 1,
            modes: Modes::default(),
            gates: default_gates(),
            histograms: HistogramConfig::default(),
        }
    }
}

fn field_error(field: &str, value: impl std::fmt::Display, reason: &str) -> CliError {
    CliError::Config(format!("field `{field}` = {value}: {reason}"))
}

impl NetworkConfig {
    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: NetworkConfig = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn phase(&self) -> PhaseResolution {
        match self.phase_bits {
            None => PhaseResolution::Ideal,
            Some(b) => PhaseResolution::Bits(b),
        }
    }

    pub fn network(&self) -> NetworkParams {
        NetworkParams {
            lambda_bs: self.lambda_bs * PER_KM2,
            lambda_ris: self.lambda_ris * PER_KM2,
            p_s: self.p_s,
            n_elements: self.n_elements,
            m_elements: self.m_elements,
            beta: self.beta,
            mu: self.mu,
            alpha: self.alpha,
            epsilon_floor: self.epsilon_floor,
            phase: self.phase(),
        }
    }

    pub fn run_spec(&self) -> RunSpec {
        RunSpec {
            path_b: self.modes.path_b,
            alignment: self.modes.alignment,
            ris_fades: self.modes.ris_fades,
            bs_window: self.bs_window,
            ris_window: self.ris_window,
            ..RunSpec::new(self.network(), self.n_trials, self.master_seed)
        }
    }

    /// Linear thresholds.
    pub fn thresholds(&self) -> Vec<f64> {
        self.thresholds_db.iter().map(|&d| db_to_linear(d)).collect()
    }

    /// Field-level validation of every physical quantity.
    pub fn validate(&self) -> Result<(), CliError> {
        for (field, v) in [
            ("lambda_bs", self.lambda_bs),
            ("lambda_ris", self.lambda_ris),
            ("p_s", self.p_s),
            ("mu", self.mu),
            ("epsilon_floor", self.epsilon_floor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(field_error(field, v, "must be finite and positive"));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(field_error("alpha", self.alpha, "path-loss exponent must exceed 2"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(field_error("beta", self.beta, "must lie in (0, 1]"));
        }
        if self.n_elements == 0 {
            return Err(field_error("n_elements", 0, "must be at least 1"));
        }
        if self.m_elements == 0 {
            return Err(field_error("m_elements", 0, "must be at least 1"));
        }
        if let Some(b) = self.phase_bits {
            if b == 0 || b > 52 {
                return Err(field_error("phase_bits", b, "must be between 1 and 52"));
            }
        }
        if let Some(t) = self.thresholds_db.iter().find(|t| !t.is_finite()) {
            return Err(field_error("thresholds_db", t, "thresholds must be finite"));
        }
        for (field, w) in [("bs_window", self.bs_window), ("ris_window", self.ris_window)] {
            if let Some(w) = w.filter(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(field_error(field, w, "must be finite and positive"));
            }
        }
        if self.n_trials == 0 {
            return Err(field_error("n_trials", 0, "must be at least 1"));
        }
        if self.histograms.bins == 0 {
            return Err(field_error("histograms.bins", 0, "must be at least 1"));
        }
        for (i, g) in self.gates.iter().enumerate() {
            if !(g.tolerance.is_finite() && g.tolerance >= 0.0) {
                return Err(field_error(&format!("gates[{i}].tolerance"), g.tolerance, "must be finite and non-negative"));
            }
        }
        self.run_spec().validate().map_err(|e| match e {
            Error::Parameter { name, value, reason } => field_error(name, value, reason),
            other => CliError::Config(other.to_string()),
        })
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serialises");
        let digest = Sha256::digest(&canonical);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
