//! Method-of-lines solver for the reduced field `w = r^{(d-1)/2} u`:
//!
//! `w_tt = w_rr - (λ_d + a) w/r² - r^{-(d-1)(p-1)/2} |w|^{p-1} w`
//!
//! with Dirichlet conditions at both ends, centered second differences in
//! space and classical RK4 in time.

mod data;
mod observe;
mod oracle;

pub use data::{tail_exponent, InitialData, Profile};
pub use observe::{
    CharacteristicLine, CharacteristicTrace, ConeTrace, Observer, Sampling, Trajectory,
};
pub use oracle::{dalembert_free_d3, radiation_free_d3, OracleSample};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ModelParams;
use crate::mesh::RadialGrid;

/// Reduced field and its time derivative at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub w: Vec<f64>,
    pub wt: Vec<f64>,
}

impl FieldState {
    pub fn zero(grid: &RadialGrid) -> Self {
        Self {
            t: 0.0,
            w: vec![0.0; grid.len()],
            wt: vec![0.0; grid.len()],
        }
    }

    /// Largest radius where `|w|` or `|w_t|` exceeds `tol`.
    pub fn support_radius(&self, grid: &RadialGrid, tol: f64) -> f64 {
        (0..grid.len())
            .rev()
            .find(|&j| self.w[j].abs() > tol || self.wt[j].abs() > tol)
            .map_or(0.0, |j| grid.r(j))
    }

    /// The same state with `w_t` negated, i.e. the data of the time-reversed flow.
    pub fn reversed(&self) -> Self {
        Self {
            t: -self.t,
            w: self.w.clone(),
            wt: self.wt.iter().map(|v| -v).collect(),
        }
    }
}

/// `w_j = r_j^{(d-1)/2} u0(r_j)`, likewise for `w_t`; node 0 is set to zero.
pub fn from_physical(u0: &[f64], u1: &[f64], grid: &RadialGrid) -> FieldState {
    let k = (grid.d as f64 - 1.0) / 2.0;
    let lift = |j: usize, v: f64| if j == 0 { 0.0 } else { grid.r(j).powf(k) * v };
    FieldState {
        t: 0.0,
        w: u0.iter().enumerate().map(|(j, &v)| lift(j, v)).collect(),
        wt: u1.iter().enumerate().map(|(j, &v)| lift(j, v)).collect(),
    }
}

/// Inverse of [`from_physical`] on `j ≥ 1`. The origin value is extrapolated
/// from nodes 1 and 2 assuming `u` even in `r`.
pub fn to_physical(state: &FieldState, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let k = (grid.d as f64 - 1.0) / 2.0;
    let unlift = |v: &[f64]| {
        let mut out: Vec<f64> = v
            .iter()
            .enumerate()
            .map(|(j, &x)| if j == 0 { 0.0 } else { x / grid.r(j).powf(k) })
            .collect();
        out[0] = (4.0 * out[1] - out[2]) / 3.0;
        out
    };
    (unlift(&state.w), unlift(&state.wt))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub params: ModelParams,
    pub grid: RadialGrid,
    pub cfl: f64,
    pub potential_on: bool,
    pub nonlinearity_on: bool,
    pub t_final: f64,
    pub record_every: usize,
}

impl SolverConfig {
    pub fn new(params: ModelParams, grid: RadialGrid, cfl: f64, t_final: f64) -> Self {
        Self {
            params,
            grid,
            cfl,
            potential_on: true,
            nonlinearity_on: true,
            t_final,
            record_every: 1,
        }
    }

    pub fn linear(mut self) -> Self {
        self.nonlinearity_on = false;
        self
    }

    pub fn free(mut self) -> Self {
        self.potential_on = false;
        self.nonlinearity_on = false;
        self
    }

    pub fn with_record_every(mut self, stride: usize) -> Self {
        self.record_every = stride;
        self
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    /// Potential coefficient seen by the dynamics: `a`, or 0 with the potential off.
    pub fn a_eff(&self) -> f64 {
        if self.potential_on {
            self.params.a
        } else {
            0.0
        }
    }

    pub fn lambda_d(&self) -> f64 {
        let d = self.params.d as f64;
        (d - 1.0) * (d - 3.0) / 4.0
    }

    /// Exponent of the radial weight on the nonlinearity, `(d-1)(p-1)/2`.
    pub fn nonlinear_weight_exponent(&self) -> f64 {
        (self.params.d as f64 - 1.0) * (self.params.p - 1.0) / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.d != self.params.d {
            return Err(Error::InvalidConfig(format!(
                "grid dimension {} differs from model dimension {}",
                self.grid.d, self.params.d
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::InvalidConfig(format!("cfl = {} must lie in (0, 0.5]", self.cfl)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidConfig(format!("t_final = {} must be finite and nonnegative", self.t_final)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Finite-speed margin: `r_max ≥ support + t_final + 5·dr`.
    pub fn check_margin(&self, support: f64) -> Result<()> {
        let need = support + self.t_final + 5.0 * self.grid.dr;
        if self.grid.r_max < need {
            return Err(Error::InvalidConfig(format!(
                "r_max = {} is below support {} + t_final {} + 5 dr = {}",
                self.grid.r_max, support, self.t_final, need
            )));
        }
        Ok(())
    }

    /// Largest admissible step: `min(cfl·dr, 0.5·dr / sqrt(1 + max_j V_j dr²))`.
    pub fn dt_max(&self) -> f64 {
        let dr = self.grid.dr;
        let v1 = (self.lambda_d() + self.a_eff()).max(0.0) / (dr * dr);
        (self.cfl * dr).min(0.5 * dr / (1.0 + v1 * dr * dr).sqrt())
    }

    /// Number of steps and uniform step size landing exactly on `t_final`.
    pub fn plan(&self) -> (usize, f64) {
        if self.t_final == 0.0 {
            return (0, 0.0);
        }
        let steps = (self.t_final / self.dt_max()).ceil().max(1.0) as usize;
        (steps, self.t_final / steps as f64)
    }
}

/// Precomputed node coefficients of the semi-discrete operator.
#[derive(Debug, Clone)]
pub(crate) struct Operator {
    pub(crate) n: usize,
    pub(crate) dr: f64,
    pub(crate) c_d: f64,
    pub(crate) p: f64,
    /// `V_j = (λ_d + a)/r_j²`, zero at node 0.
    pub(crate) v: Vec<f64>,
    /// `r_j^{-(d-1)(p-1)/2}`, or all zero with the nonlinearity off.
    pub(crate) nl: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Power {
    Cubic,
    Square,
    General(f64),
}

impl Power {
    fn of(p: f64) -> Self {
        if p == 3.0 {
            Power::Cubic
        } else if p == 2.0 {
            Power::Square
        } else {
            Power::General(p - 1.0)
        }
    }

    /// `|w|^{p-1} w`
    #[inline(always)]
    fn force(self, w: f64) -> f64 {
        match self {
            Power::Cubic => w * w * w,
            Power::Square => w.abs() * w,
            Power::General(q) => w.abs().powf(q) * w,
        }
    }
}

impl Operator {
    pub(crate) fn new(config: &SolverConfig) -> Self {
        let grid = &config.grid;
        let coef = config.lambda_d() + config.a_eff();
        let gamma = config.nonlinear_weight_exponent();
        let mut v = vec![0.0; grid.len()];
        let mut nl = vec![0.0; grid.len()];
        for j in 1..grid.n {
            let r = grid.r(j);
            v[j] = coef / (r * r);
            if config.nonlinearity_on {
                nl[j] = r.powf(-gamma);
            }
        }
        Self {
            n: grid.n,
            dr: grid.dr,
            c_d: grid.c_d(),
            p: config.params.p,
            v,
            nl,
        }
    }

    /// `out_j = D²w_j - V_j w_j - N_j` on interior nodes, zero on the boundary.
    #[inline]
    pub(crate) fn accel(&self, w: &[f64], out: &mut [f64]) {
        let inv = 1.0 / (self.dr * self.dr);
        let power = Power::of(self.p);
        out[0] = 0.0;
        out[self.n] = 0.0;
        for j in 1..self.n {
            let wj = w[j];
            let lap = (w[j + 1] - 2.0 * wj + w[j - 1]) * inv;
            out[j] = lap - self.v[j] * wj - self.nl[j] * power.force(wj);
        }
    }

    /// The conserved quantity of the semi-discrete system, scaled by `c_d`.
    pub(crate) fn hamiltonian(&self, w: &[f64], wt: &[f64]) -> f64 {
        let dr = self.dr;
        let q = self.p + 1.0;
        let power = Power::of(self.p);
        let mut kin = 0.0;
        let mut pot = 0.0;
        let mut nonlin = 0.0;
        for j in 1..self.n {
            kin += wt[j] * wt[j];
            pot += self.v[j] * w[j] * w[j];
            nonlin += self.nl[j] * power.force(w[j]) * w[j];
        }
        let mut grad = 0.0;
        for j in 0..self.n {
            let dw = w[j + 1] - w[j];
            grad += dw * dw;
        }
        self.c_d * (0.5 * (kin + pot) * dr + 0.5 * grad / dr + nonlin * dr / q)
    }
}

/// Time derivatives `(dw/dt, dwt/dt)` of a state.
pub fn rhs(state: &FieldState, config: &SolverConfig) -> (Vec<f64>, Vec<f64>) {
    let op = Operator::new(config);
    let mut acc = vec![0.0; state.w.len()];
    op.accel(&state.w, &mut acc);
    let mut vel = state.wt.clone();
    vel[0] = 0.0;
    vel[op.n] = 0.0;
    (vel, acc)
}

/// The semi-discrete energy conserved by the method of lines, in physical units.
pub fn discrete_energy(state: &FieldState, config: &SolverConfig) -> f64 {
    Operator::new(config).hamiltonian(&state.w, &state.wt)
}

/// Energy growth factor per step above which a step is rejected.
pub const GROWTH_GUARD: f64 = 0.1;

/// RK4 with reusable stage buffers.
pub(crate) struct Integrator {
    pub(crate) op: Operator,
    k_w: [Vec<f64>; 4],
    k_v: [Vec<f64>; 4],
    tmp_w: Vec<f64>,
    tmp_v: Vec<f64>,
}

impl Integrator {
    pub(crate) fn new(config: &SolverConfig) -> Self {
        let op = Operator::new(config);
        let len = op.n + 1;
        let z = || vec![0.0; len];
        Self {
            op,
            k_w: [z(), z(), z(), z()],
            k_v: [z(), z(), z(), z()],
            tmp_w: z(),
            tmp_v: z(),
        }
    }

    /// Advances in place and returns the post-step energy.
    pub(crate) fn advance(&mut self, state: &mut FieldState, dt: f64, energy_before: f64) -> Result<f64> {
        let n = self.op.n;
        let half = 0.5 * dt;
        for stage in 0..4 {
            let (src_w, src_v): (&[f64], &[f64]) = if stage == 0 {
                (&state.w, &state.wt)
            } else {
                let h = if stage == 3 { dt } else { half };
                let (kw, kv) = (&self.k_w[stage - 1], &self.k_v[stage - 1]);
                for j in 0..=n {
                    self.tmp_w[j] = state.w[j] + h * kw[j];
                    self.tmp_v[j] = state.wt[j] + h * kv[j];
                }
                (&self.tmp_w, &self.tmp_v)
            };
            self.k_w[stage].copy_from_slice(src_v);
            self.op.accel(src_w, &mut self.k_v[stage]);
        }
        let sixth = dt / 6.0;
        for j in 1..n {
            state.w[j] += sixth * (self.k_w[0][j] + 2.0 * (self.k_w[1][j] + self.k_w[2][j]) + self.k_w[3][j]);
            state.wt[j] += sixth * (self.k_v[0][j] + 2.0 * (self.k_v[1][j] + self.k_v[2][j]) + self.k_v[3][j]);
        }
        for b in [0, n] {
            state.w[b] = 0.0;
            state.wt[b] = 0.0;
        }
        state.t += dt;
        let after = self.op.hamiltonian(&state.w, &state.wt);
        if after - energy_before > GROWTH_GUARD * energy_before.abs() {
            return Err(Error::StabilityViolation {
                t: state.t,
                growth: if energy_before != 0.0 { after / energy_before } else { f64::INFINITY },
            });
        }
        Ok(after)
    }
}

/// One RK4 step of size `dt`.
pub fn step(state: &FieldState, dt: f64, config: &SolverConfig) -> Result<FieldState> {
    let mut integrator = Integrator::new(config);
    let before = integrator.op.hamiltonian(&state.w, &state.wt);
    let mut next = state.clone();
    integrator.advance(&mut next, dt, before)?;
    Ok(next)
}

/// Marches `initial` to `initial.t + t_final` and collects the samples requested in `sampling`.
/// Extra observers see every state, including the initial one.
pub fn evolve(
    initial: &FieldState,
    config: &SolverConfig,
    sampling: &Sampling,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory> {
    config.validate()?;
    let (steps, dt) = config.plan();
    let mut integrator = Integrator::new(config);
    let mut state = initial.clone();
    let mut traj = Trajectory::new(config.clone(), sampling);
    let mut energy = integrator.op.hamiltonian(&state.w, &state.wt);

    traj.observe(&state, energy, config, true);
    for obs in observers.iter_mut() {
        obs.observe(&state, config);
    }
    for i in 1..=steps {
        energy = integrator.advance(&mut state, dt, energy)?;
        if i == steps {
            // Remove accumulated rounding so the final time is exact.
            state.t = initial.t + config.t_final;
        }
        let record = i % config.record_every == 0 || i == steps;
        traj.observe(&state, energy, config, record);
        for obs in observers.iter_mut() {
            obs.observe(&state, config);
        }
    }
    Ok(traj)
}

/// Evolves backward to `initial.t - t_back` and forward to `initial.t + config.t_final`,
/// returning one trajectory ordered in time. Samplers run on the forward half only.
pub fn evolve_two_sided(
    initial: &FieldState,
    config: &SolverConfig,
    t_back: f64,
    sampling: &Sampling,
) -> Result<Trajectory> {
    let back_cfg = config.clone().with_t_final(t_back);
    let mut back_start = initial.reversed();
    back_start.t = -initial.t;
    let back = evolve(&back_start, &back_cfg, &Sampling::states_only(), &mut [])?;
    let mut fwd = evolve(initial, config, sampling, &mut [])?;

    let mut states: Vec<FieldState> = back.states.iter().skip(1).rev().map(FieldState::reversed).collect();
    let mut energy: Vec<(f64, f64)> = back.energy.iter().skip(1).rev().map(|&(t, e)| (-t, e)).collect();
    states.append(&mut fwd.states);
    energy.append(&mut fwd.energy);
    fwd.states = states;
    fwd.energy = energy;
    Ok(fwd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ModelParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn config(d: u32, p: f64, a: f64, n: usize, r_max: f64, t_final: f64) -> SolverConfig {
        let params = ModelParams::validate(d, p, a).unwrap();
        SolverConfig::new(params, RadialGrid::new(d, n, r_max).unwrap(), 0.25, t_final)
    }

    fn gaussian_state(cfg: &SolverConfig) -> FieldState {
        InitialData::gaussian(1.0, 0.0, 1.0).state(&cfg.params, &cfg.grid)
    }

    #[test]
    fn lift_round_trip() {
        let grid = RadialGrid::new(5, 200, 10.0).unwrap();
        let u0 = grid.sample(|r| (-r * r).exp());
        let u1 = grid.sample(|r| r * (-r).exp());
        let s = from_physical(&u0, &u1, &grid);
        assert_eq!((s.w[0], s.wt[0]), (0.0, 0.0));
        let (back0, back1) = to_physical(&s, &grid);
        for j in 1..grid.len() {
            assert_relative_eq!(back0[j], u0[j], max_relative = 1e-15);
            assert_relative_eq!(back1[j], u1[j], max_relative = 1e-15);
        }
        let grid3 = RadialGrid::new(3, 100, 5.0).unwrap();
        let u0 = grid3.sample(|r| (-r * r).exp());
        let s = from_physical(&u0, &vec![0.0; grid3.len()], &grid3);
        for j in 0..grid3.len() {
            let r = grid3.r(j);
            assert_relative_eq!(s.w[j], r * (-r * r).exp(), max_relative = 1e-15);
        }
    }

    #[test]
    fn zero_state_is_fixed() {
        let cfg = config(4, 2.5, 0.3, 64, 8.0, 1.0);
        let zero = FieldState::zero(&cfg.grid);
        let (vel, acc) = rhs(&zero, &cfg);
        assert!(vel.iter().chain(acc.iter()).all(|v| *v == 0.0));
        let next = step(&zero, 0.01, &cfg).unwrap();
        assert!(next.w.iter().chain(next.wt.iter()).all(|v| *v == 0.0));
    }

    #[test]
    fn d3_free_is_one_dimensional_wave() {
        let cfg = config(3, 3.0, -0.2, 64, 8.0, 1.0).free();
        let op = Operator::new(&cfg);
        assert!(op.v.iter().all(|v| *v == 0.0));
        assert!(op.nl.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn potential_off_keeps_centrifugal_term() {
        let cfg = config(5, 2.0, 0.5, 64, 8.0, 1.0);
        let off = cfg.clone().free();
        let op = Operator::new(&off);
        let r = off.grid.r(3);
        assert_relative_eq!(op.v[3], 2.0 / (r * r), max_relative = 1e-15);
        assert_relative_eq!(Operator::new(&cfg).v[3], 2.5 / (r * r), max_relative = 1e-15);
    }

    #[test]
    fn step_plan_lands_on_final_time() {
        let cfg = config(6, 1.9, 0.0, 512, 20.0, 3.3);
        let (steps, dt) = cfg.plan();
        assert!(dt <= cfg.dt_max());
        assert_relative_eq!(steps as f64 * dt, 3.3, max_relative = 1e-14);
        // λ_6 = 3.75 tightens the guard below cfl·dr.
        assert!(cfg.dt_max() < 0.25 * cfg.grid.dr);
    }

    #[test]
    fn margin_invariant() {
        let cfg = config(3, 3.0, -0.2, 8192, 40.0, 24.0);
        assert!(cfg.check_margin(6.0).is_ok());
        assert!(cfg.check_margin(16.0).is_err());
    }

    #[test]
    fn manufactured_second_order() {
        // w = sin(k r)·cos(t) on [0, π] solves the forced problem
        // w_tt = w_rr - V w - N + F; the truncation error of D² is O(dr²).
        let errs: Vec<f64> = [64usize, 128, 256]
            .iter()
            .map(|&n| {
                let cfg = config(5, 2.0, 0.4, n, std::f64::consts::PI, 1.0).linear();
                let grid = cfg.grid;
                let w = grid.sample(|r| (3.0 * r).sin());
                let state = FieldState { t: 0.0, w, wt: vec![0.0; grid.len()] };
                let (_, acc) = rhs(&state, &cfg);
                let coef = cfg.lambda_d() + cfg.a_eff();
                (1..grid.n)
                    .map(|j| {
                        let r = grid.r(j);
                        let exact = -9.0 * (3.0 * r).sin() - coef * (3.0 * r).sin() / (r * r);
                        (acc[j] - exact).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        for pair in errs.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            assert!((1.8..2.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn finite_speed_of_propagation() {
        let cfg = config(4, 2.5, 0.3, 1600, 20.0, 4.0);
        let data = InitialData::bump(1.0, 3.0, 1.0);
        let traj = evolve(&data.state(&cfg.params, &cfg.grid), &cfg, &Sampling::states_only(), &mut []).unwrap();
        let last = traj.states.last().unwrap();
        let reach = 4.0 + 4.0 + 2.0 * cfg.grid.dr;
        let beyond = (0..cfg.grid.len())
            .filter(|&j| cfg.grid.r(j) > reach + 0.5)
            .map(|j| last.w[j].abs())
            .fold(0.0, f64::max);
        assert!(beyond < 1e-10, "leak {beyond}");
    }

    #[test]
    fn time_reversal_returns_data() {
        let errs: Vec<f64> = [400usize, 800]
            .iter()
            .map(|&n| {
                let cfg = config(3, 3.0, 0.5, n, 20.0, 3.0);
                let s0 = gaussian_state(&cfg);
                let fwd = evolve(&s0, &cfg, &Sampling::states_only(), &mut []).unwrap();
                let end = fwd.states.last().unwrap().reversed();
                let back = evolve(&end, &cfg, &Sampling::states_only(), &mut []).unwrap();
                let fin = back.states.last().unwrap().reversed();
                fin.w.iter().zip(&s0.w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < 1e-3, "{errs:?}");
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn defocusing_energy_nonnegative_and_bounded_linear() {
        let cfg = config(5, 2.0, -1.5, 800, 20.0, 4.0).linear();
        let s0 = gaussian_state(&cfg);
        let e0 = discrete_energy(&s0, &cfg);
        let traj = evolve(&s0, &cfg, &Sampling::states_only(), &mut []).unwrap();
        for &(_, e) in &traj.energy {
            assert!(e > 0.0);
            assert!((e - e0).abs() < 1e-4 * e0);
        }
    }

    #[test]
    fn stability_guard_trips_on_oversized_step() {
        let cfg = config(3, 3.0, 0.0, 400, 10.0, 1.0);
        let s0 = gaussian_state(&cfg);
        let err = step(&s0, 3.0 * cfg.grid.dr, &cfg);
        let mut s = s0.clone();
        let mut tripped = matches!(err, Err(Error::StabilityViolation { .. }));
        for _ in 0..200 {
            if tripped {
                break;
            }
            match step(&s, 3.0 * cfg.grid.dr, &cfg) {
                Ok(next) => s = next,
                Err(Error::StabilityViolation { .. }) => tripped = true,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(tripped);
    }

    #[test]
    fn two_sided_is_time_ordered() {
        let cfg = config(3, 3.0, -0.2, 400, 20.0, 2.0).with_record_every(10);
        let s0 = gaussian_state(&cfg);
        let traj = evolve_two_sided(&s0, &cfg, 1.5, &Sampling::states_only()).unwrap();
        let times: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
        assert_relative_eq!(times[0], -1.5, epsilon = 1e-12);
        assert_relative_eq!(*times.last().unwrap(), 2.0, epsilon = 1e-12);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        // The equation is even in time for data with u1 = 0.
        let first = &traj.states[0];
        let mirror = traj.states.iter().find(|s| (s.t - 1.5).abs() < 1e-9);
        if let Some(m) = mirror {
            for j in 0..cfg.grid.len() {
                assert!((first.w[j] - m.w[j]).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn energy_conserved_all_flag_combinations(
            d in 3u32..=6,
            amp in 0.2f64..1.5,
            potential in any::<bool>(),
            nonlinear in any::<bool>(),
        ) {
            let p = 1.0 + 4.0 / (d as f64 - 1.0);
            let a = crate::exponents::a_min(d, p) + 0.5;
            let mut cfg = config(d, p, a, 1200, 24.0, 3.0);
            cfg.potential_on = potential;
            cfg.nonlinearity_on = nonlinear;
            let s0 = InitialData::bump(amp, 4.0, 1.5).state(&cfg.params, &cfg.grid);
            let traj = evolve(&s0, &cfg, &Sampling::states_only(), &mut []).unwrap();
            let e0 = traj.energy[0].1;
            for &(_, e) in &traj.energy {
                prop_assert!((e - e0).abs() <= 1e-6 * e0.abs());
            }
        }
    }
}
