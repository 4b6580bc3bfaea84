//! JSON experiment configuration for the command-line front end.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{bundled_h2_table, load_coefficients, Hamiltonian};
use crate::simulator::{ErrorLevel, NoiseModel};
use crate::vqe::{FluctuationSpec, OptimizerConfig, Pipeline};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeSettings {
    pub theta_min: f64,
    pub theta_max: f64,
    /// Grid points including both ends.
    pub theta_points: usize,
}

impl Default for LandscapeSettings {
    fn default() -> Self {
        Self {
            theta_min: 0.0,
            theta_max: PI,
            theta_points: 181,
        }
    }
}

impl LandscapeSettings {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.theta_points;
        let step = (self.theta_max - self.theta_min) / (n - 1) as f64;
        (0..n).map(|k| self.theta_min + k as f64 * step).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSettings {
    pub levels: Vec<ErrorLevel>,
    /// Shots per pre-rotation; absent means exact reconstruction.
    pub n_meas: Option<u64>,
}

impl Default for BudgetSettings {
    fn default() -> Self {
        Self {
            levels: ErrorLevel::ALL.to_vec(),
            n_meas: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositivitySettings {
    pub bins: usize,
    pub n_meas_bin: u64,
    pub histogram_bins: usize,
}

impl Default for PositivitySettings {
    fn default() -> Self {
        Self {
            bins: 100,
            n_meas_bin: 1_000,
            histogram_bins: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NegativitySettings {
    pub theta: f64,
    pub n_meas: Vec<u64>,
    pub n_seeds: usize,
}

impl Default for NegativitySettings {
    fn default() -> Self {
        Self {
            theta: PI / 4.0,
            n_meas: vec![1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000],
            n_seeds: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Coefficient table; relative paths resolve against the config file.
    /// Absent selects the bundled table.
    pub hamiltonian_path: Option<PathBuf>,
    /// Restricts runs to these rows of the table.
    pub bond_distances: Option<Vec<f64>>,
    pub noise: NoiseModel,
    pub optimizer: OptimizerConfig,
    pub fluctuation: Option<FluctuationSpec>,
    pub pipeline: Pipeline,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub landscape: LandscapeSettings,
    pub error_budget: BudgetSettings,
    pub positivity: PositivitySettings,
    pub negativity: NegativitySettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            hamiltonian_path: None,
            bond_distances: None,
            noise: NoiseModel::device_default(),
            optimizer: OptimizerConfig::default(),
            fluctuation: None,
            pipeline: Pipeline::default(),
            output_dir: None,
            seed: 0,
            landscape: LandscapeSettings::default(),
            error_budget: BudgetSettings::default(),
            positivity: PositivitySettings::default(),
            negativity: NegativitySettings::default(),
        }
    }
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    /// Parses and validates a config file, resolving relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        if let (Some(h), Some(dir)) = (&cfg.hamiltonian_path, path.parent()) {
            if h.is_relative() {
                cfg.hamiltonian_path = Some(dir.join(h));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate().map_err(config_error)?;
        self.optimizer.validate()?;
        if let Some(f) = &self.fluctuation {
            f.validate()?;
        }
        let l = &self.landscape;
        if l.theta_points < 2 || !(l.theta_max > l.theta_min) {
            return Err(config_error("landscape grid needs ≥ 2 points and theta_max > theta_min"));
        }
        let b = &self.error_budget;
        if b.levels.is_empty() || b.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("error_budget.levels must be non-empty and strictly increasing"));
        }
        if b.n_meas == Some(0) {
            return Err(config_error("error_budget.n_meas must be positive"));
        }
        let p = &self.positivity;
        if p.bins < 2 || p.n_meas_bin == 0 || p.histogram_bins == 0 {
            return Err(config_error("positivity needs ≥ 2 bins, positive n_meas_bin and histogram_bins"));
        }
        let n = &self.negativity;
        if n.n_seeds < 2 || n.n_meas.is_empty() || n.n_meas.contains(&0) {
            return Err(config_error("negativity needs ≥ 2 seeds and positive shot counts"));
        }
        self.hamiltonians().map(|_| ())
    }

    /// The selected rows of the coefficient table.
    pub fn hamiltonians(&self) -> Result<Vec<Hamiltonian>> {
        let all = match &self.hamiltonian_path {
            Some(p) => load_coefficients(p).map_err(|e| config_error(format!("{}: {e}", p.display())))?,
            None => bundled_h2_table(),
        };
        match &self.bond_distances {
            None => Ok(all),
            Some(rs) => rs
                .iter()
                .map(|&r| {
                    all.iter()
                        .find(|h| (h.bond_distance() - r).abs() < 1e-9)
                        .cloned()
                        .ok_or_else(|| config_error(format!("bond distance {r} Å is not in the coefficient table")))
                })
                .collect(),
        }
    }
}
