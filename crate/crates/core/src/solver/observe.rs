use serde::{Deserialize, Serialize};

use super::{FieldState, SolverConfig};
use crate::functionals::energy_between;
use crate::mesh::value_and_slope;

/// Hook invoked on the initial state and after every step.
pub trait Observer {
    fn observe(&mut self, state: &FieldState, config: &SolverConfig);
}

/// Which per-step samples [`super::evolve`] collects.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    /// Cone offsets `η`; each cone `r = t - η` is traced while `0 < t - η < r_max`.
    pub cones: Vec<f64>,
    pub lines: Vec<CharacteristicLine>,
}

impl Sampling {
    pub fn states_only() -> Self {
        Self::default()
    }

    pub fn with_cones(mut self, etas: &[f64]) -> Self {
        self.cones.extend_from_slice(etas);
        self
    }

    pub fn with_lines(mut self, lines: &[CharacteristicLine]) -> Self {
        self.lines.extend_from_slice(lines);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharacteristicLine {
    /// `r = t - τ`
    Outgoing { tau: f64 },
    /// `r = s - t`
    Incoming { s: f64 },
}

impl CharacteristicLine {
    pub fn radius(&self, t: f64) -> f64 {
        match *self {
            CharacteristicLine::Outgoing { tau } => t - tau,
            CharacteristicLine::Incoming { s } => s - t,
        }
    }
}

/// Reduced-field values along `r = t - η`, with the energy of the enclosed ball.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConeTrace {
    pub eta: f64,
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub w_r: Vec<f64>,
    pub w_t: Vec<f64>,
    /// `E(t; B(0, t - η))`
    pub ball_energy: Vec<f64>,
}

/// `w_t ± w_r` along one characteristic line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicTrace {
    pub line: CharacteristicLine,
    pub t: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: SolverConfig,
    /// States at the record stride, always including the first and last.
    pub states: Vec<FieldState>,
    /// `(t, E)` after every step, `E` the semi-discrete energy.
    pub energy: Vec<(f64, f64)>,
    pub cones: Vec<ConeTrace>,
    pub characteristics: Vec<CharacteristicTrace>,
}

impl Trajectory {
    pub(crate) fn new(config: SolverConfig, sampling: &Sampling) -> Self {
        Self {
            config,
            states: Vec::new(),
            energy: Vec::new(),
            cones: sampling
                .cones
                .iter()
                .map(|&eta| ConeTrace { eta, ..ConeTrace::default() })
                .collect(),
            characteristics: sampling
                .lines
                .iter()
                .map(|&line| CharacteristicTrace { line, t: vec![], plus: vec![], minus: vec![] })
                .collect(),
        }
    }

    pub(crate) fn observe(&mut self, state: &FieldState, energy: f64, config: &SolverConfig, record: bool) {
        let grid = &config.grid;
        let t = state.t;
        self.energy.push((t, energy));
        if record {
            self.states.push(state.clone());
        }
        for cone in &mut self.cones {
            let r = t - cone.eta;
            if !(r > 0.0 && r < grid.r_max) {
                continue;
            }
            let (w, w_r) = value_and_slope(grid, &state.w, r);
            let (w_t, _) = value_and_slope(grid, &state.wt, r);
            cone.t.push(t);
            cone.w.push(w);
            cone.w_r.push(w_r);
            cone.w_t.push(w_t);
            cone.ball_energy.push(energy_between(state, config, 0.0, r).total);
        }
        for trace in &mut self.characteristics {
            let r = trace.line.radius(t);
            if !(r >= 0.0 && r <= grid.r_max) {
                continue;
            }
            let (_, w_r) = value_and_slope(grid, &state.w, r);
            let (w_t, _) = value_and_slope(grid, &state.wt, r);
            trace.t.push(t);
            trace.plus.push(w_t + w_r);
            trace.minus.push(w_t - w_r);
        }
    }

    pub fn t_start(&self) -> f64 {
        self.states.first().map_or(0.0, |s| s.t)
    }

    pub fn t_end(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.t)
    }

    pub fn last(&self) -> &FieldState {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// Recorded state closest in time to `t`.
    pub fn state_near(&self, t: f64) -> &FieldState {
        let idx = self.states.partition_point(|s| s.t < t);
        let lo = idx.saturating_sub(1);
        let hi = idx.min(self.states.len() - 1);
        if (self.states[hi].t - t).abs() < (self.states[lo].t - t).abs() {
            &self.states[hi]
        } else {
            &self.states[lo]
        }
    }

    pub fn cone(&self, eta: f64) -> Option<&ConeTrace> {
        self.cones.iter().find(|c| (c.eta - eta).abs() < 1e-12)
    }

    pub fn line(&self, line: CharacteristicLine) -> Option<&CharacteristicTrace> {
        self.characteristics.iter().find(|c| c.line == line)
    }

    /// Largest relative deviation of the recorded energy from its initial value.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy.first().map_or(0.0, |e| e.1);
        if e0 == 0.0 {
            return 0.0;
        }
        self.energy.iter().map(|&(_, e)| ((e - e0) / e0).abs()).fold(0.0, f64::max)
    }
}
