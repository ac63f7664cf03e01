use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wavelab_core::scattering::Comparator;
use wavelab_core::solver::{InitialData, Profile, SolverConfig};
use wavelab_core::{ModelParams, RadialGrid};

use crate::error::CliError;

pub const EXPERIMENTS: [&str; 10] = [
    "simulate",
    "params",
    "flux-check",
    "morawetz-check",
    "hardy-check",
    "radiation",
    "scatter",
    "linear-scatter",
    "decay-sweep",
    "converge",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub d: u32,
    pub p: f64,
    pub a: f64,
}

/// Either `n` or `dr` fixes the resolution; `r_max / dr` must then be a whole number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Gaussian { amplitude: f64, center: f64, width: f64 },
    Bump { amplitude: f64, center: f64, width: f64 },
    PolynomialTail { epsilon: f64 },
    Profiles { u0: Profile, u1: Profile },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    #[default]
    Nonlinear,
    Linear,
    Free,
}

/// One experiment run. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    pub params: ParamsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub t_final: f64,
    /// Length of the backward run prepended to the trajectory.
    #[serde(default)]
    pub t_back: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub dynamics: Dynamics,
    /// Solver steps between stored states; defaults to `n / 128`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radius: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windows: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kappa: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epsilon: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparator: Option<Comparator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Experiment run at every level of `converge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_cfl() -> f64 {
    0.25
}

fn invalid(path: &str, msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid { path: path.to_string(), message: msg.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid("$", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// SHA-256 of the compact serialisation, so formatting of the input file does not matter.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serialises");
        hex(&Sha256::digest(bytes))
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        let ParamsSpec { d, p, a } = self.params;
        ModelParams::validate(d, p, a).map_err(|e| invalid("params", e.to_string()))
    }

    pub fn grid(&self) -> Result<RadialGrid, CliError> {
        let g = self.grid.ok_or_else(|| invalid("grid", "required by this experiment"))?;
        let n = match (g.n, g.dr) {
            (Some(n), None) => n,
            (None, Some(dr)) => {
                let cells = g.r_max / dr;
                if !(dr > 0.0) || (cells - cells.round()).abs() > 1e-9 * cells {
                    return Err(invalid("grid.dr", format!("r_max / dr = {cells} is not a whole number")));
                }
                cells.round() as usize
            }
            (Some(_), Some(_)) => return Err(invalid("grid", "give one of n and dr")),
            (None, None) => return Err(invalid("grid", "one of n and dr is required")),
        };
        RadialGrid::new(self.params.d, n, g.r_max).map_err(|e| invalid("grid", e.to_string()))
    }

    pub fn initial_data(&self, params: &ModelParams, grid: &RadialGrid) -> Result<InitialData, CliError> {
        let data = self.data.ok_or_else(|| invalid("data", "required by this experiment"))?;
        Ok(match data {
            DataSpec::Gaussian { amplitude, center, width } => InitialData::gaussian(amplitude, center, width),
            DataSpec::Bump { amplitude, center, width } => InitialData::bump(amplitude, center, width),
            DataSpec::PolynomialTail { epsilon } => InitialData::polynomial_tail(params, epsilon, grid.r_max),
            DataSpec::Profiles { u0, u1 } => InitialData::new(u0, u1),
        })
    }

    /// Solver configuration with the margin for the data support checked in both time directions.
    pub fn solver(&self) -> Result<(SolverConfig, InitialData), CliError> {
        let params = self.model()?;
        let grid = self.grid()?;
        let stride = self.record_every.unwrap_or((grid.n / 128).max(1));
        let mut cfg = SolverConfig::new(params, grid, self.cfl, self.t_final).with_record_every(stride);
        cfg = match self.dynamics {
            Dynamics::Nonlinear => cfg,
            Dynamics::Linear => cfg.linear(),
            Dynamics::Free => cfg.free(),
        };
        cfg.validate().map_err(|e| invalid("$", e.to_string()))?;
        if !(self.t_back.is_finite() && self.t_back >= 0.0) {
            return Err(invalid("t_back", "must be finite and nonnegative"));
        }
        let data = self.initial_data(&params, &grid)?;
        cfg.clone()
            .with_t_final(self.t_final.max(self.t_back))
            .check_margin(data.support())
            .map_err(|e| invalid("grid.r_max", e.to_string()))?;
        Ok((cfg, data))
    }

    /// Same configuration on a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Result<Self, CliError> {
        let grid = self.grid()?;
        let mut out = self.clone();
        out.grid = Some(GridSpec { r_max: grid.r_max, n: Some(grid.n * factor), dr: None });
        out.record_every = self.record_every.map(|s| s * factor);
        Ok(out)
    }

    /// Same configuration on a grid with half as many cells.
    pub fn coarsened(&self) -> Result<Self, CliError> {
        let grid = self.grid()?;
        if grid.n % 2 != 0 {
            return Err(invalid("grid.n", "coarsening needs an even cell count"));
        }
        let mut out = self.clone();
        out.grid = Some(GridSpec { r_max: grid.r_max, n: Some(grid.n / 2), dr: None });
        out.record_every = self.record_every.map(|s| (s / 2).max(1));
        Ok(out)
    }

    pub fn check_experiment(&self, name: &str) -> Result<(), CliError> {
        if !EXPERIMENTS.contains(&name) {
            return Err(CliError::ExperimentUnknown(name.to_string()));
        }
        match &self.experiment {
            Some(e) if e != name => Err(invalid("experiment", format!("config names `{e}` but `{name}` was requested"))),
            _ => Ok(()),
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
