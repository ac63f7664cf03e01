//! The experiment registry. Each experiment turns a config into a JSON result, a set of
//! series and a list of pass/fail checks.

mod converge;
mod energy;
mod scatter;

use serde::{Deserialize, Serialize};
use wavelab_core::solver::{evolve, evolve_two_sided, Sampling, Trajectory};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Series;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// A scalar that should shrink under grid refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    /// Magnitude the value is measured against; values below `1e-12·scale` count as round-off.
    pub scale: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub result: serde_json::Value,
    pub series: Vec<Series>,
    pub checks: Vec<Check>,
    pub quantities: Vec<Quantity>,
}

pub fn execute(name: &str, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    cfg.check_experiment(name)?;
    match name {
        "params" => energy::params(cfg),
        "simulate" => energy::simulate(cfg),
        "flux-check" => energy::flux_check(cfg),
        "morawetz-check" => energy::morawetz(cfg),
        "hardy-check" => energy::hardy(cfg),
        "radiation" => scatter::radiation(cfg),
        "scatter" => scatter::scatter(cfg, false),
        "linear-scatter" => scatter::scatter(cfg, true),
        "decay-sweep" => scatter::decay_sweep(cfg),
        "converge" => converge::converge(cfg),
        other => Err(CliError::ExperimentUnknown(other.to_string())),
    }
}

pub(crate) fn trajectory(cfg: &ExperimentConfig, sampling: &Sampling) -> Result<Trajectory, CliError> {
    let (solver, data) = cfg.solver()?;
    let s0 = data.state(&solver.params, &solver.grid);
    let traj = if cfg.t_back > 0.0 {
        evolve_two_sided(&s0, &solver, cfg.t_back, sampling)?
    } else {
        evolve(&s0, &solver, sampling, &mut [])?
    };
    Ok(traj)
}

/// Energy at the data time `t = 0`.
pub(crate) fn data_energy(traj: &Trajectory) -> f64 {
    traj.energy.iter().find(|e| e.0 >= 0.0).or(traj.energy.first()).map_or(0.0, |e| e.1)
}

pub(crate) fn energy_series(traj: &Trajectory) -> Series {
    let mut s = Series::new("energy", &["t", "energy"]);
    for &(t, e) in &traj.energy {
        s.push(vec![t, e]);
    }
    s
}

pub(crate) fn strictly_decreasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0])
}

/// Least-squares slope of `ln y` against `ln x` over positive pairs.
pub(crate) fn log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serialises")
}
