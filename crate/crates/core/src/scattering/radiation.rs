use serde::{Deserialize, Serialize};

use super::log_slope;
use crate::error::{Error, Result};
use crate::functionals::half_dim;
use crate::mesh::{line_integral_with, value_and_slope, RadialGrid};
use crate::solver::{FieldState, SolverConfig, Trajectory};

/// `½(w_t - w_r)(t - η, t)` at an earlier horizon, against the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationHorizon {
    pub t: f64,
    /// `|½(w_t - w_r)(t - η, t) - g₊(η)|`, `None` where `t - η` is off the grid.
    pub residual: Vec<Option<f64>>,
    /// `L²(η)` norm of the residual over the defined entries.
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationProfile {
    pub eta: Vec<f64>,
    pub g_plus: Vec<f64>,
    pub t_used: f64,
    pub horizons: Vec<RadiationHorizon>,
    /// `‖g₊‖²_{L²(η)}`
    pub norm_sq: f64,
    pub energy: f64,
    /// `‖g₊‖² / (E/c_d)`
    pub c_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonStability {
    /// Lower horizon `t` of each pair `(t, 2t)`.
    pub t: Vec<f64>,
    /// `‖g₊^{(2t)} - g₊^{(t)}‖_{L²(η)}`
    pub diff_l2: Vec<f64>,
    pub eta_range: (f64, f64),
    pub exponent: Option<f64>,
    pub beta: f64,
}

impl RadiationProfile {
    /// Uniform grid of the given spacing covering `[-support, t_final/2]`.
    pub fn default_grid(support: f64, t_final: f64, spacing: f64) -> Vec<f64> {
        let count = ((0.5 * t_final + support) / spacing).floor() as usize;
        (0..=count).map(|i| -support + i as f64 * spacing).collect()
    }

    /// `g₊` by linear interpolation, zero off the grid.
    pub fn g(&self, eta: f64) -> f64 {
        interp(&self.eta, &self.g_plus, eta, 0.0, 0.0)
    }

    /// `‖g₊ - f‖_{L²(η)}` on the profile grid.
    pub fn l2_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        let diff: Vec<Option<f64>> = self.eta.iter().zip(&self.g_plus).map(|(&e, &g)| Some(g - f(e))).collect();
        l2(&self.eta, &diff)
    }
}

fn interp(x: &[f64], y: &[f64], at: f64, below: f64, above: f64) -> f64 {
    if x.is_empty() || at < x[0] {
        return below;
    }
    if at > x[x.len() - 1] {
        return above;
    }
    let i = x.partition_point(|&v| v < at);
    if i == 0 {
        return y[0];
    }
    let th = (at - x[i - 1]) / (x[i] - x[i - 1]);
    y[i - 1] + th * (y[i] - y[i - 1])
}

fn sample(state: &FieldState, grid: &RadialGrid, eta: f64) -> Option<f64> {
    let r = state.t - eta;
    if !(r > 0.0 && r < grid.r_max) {
        return None;
    }
    let (_, w_r) = value_and_slope(grid, &state.w, r);
    let (w_t, _) = value_and_slope(grid, &state.wt, r);
    Some(0.5 * (w_t - w_r))
}

fn l2(eta: &[f64], v: &[Option<f64>]) -> f64 {
    let mut total = 0.0;
    for i in 1..eta.len() {
        if let (Some(a), Some(b)) = (v[i - 1], v[i]) {
            total += 0.5 * (a * a + b * b) * (eta[i] - eta[i - 1]);
        }
    }
    total.sqrt()
}

/// `g₊(η) = ½(w_t - w_r)(t - η, t)` at the last recorded time, with residuals at `t/2, t/4, …`.
pub fn extract_radiation(traj: &Trajectory, eta_grid: &[f64]) -> Result<RadiationProfile> {
    let grid = &traj.config.grid;
    let eta_max = eta_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let eta_min = eta_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if eta_grid.len() < 2 || eta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("eta grid needs at least two increasing values".into()));
    }
    let last = traj.last();
    let t = last.t;
    if t - eta_max < 1.0 {
        return Err(Error::InsufficientHorizon { t_final: t, eta_max });
    }
    grid.check_range(t - eta_max, t - eta_min)?;

    let g_plus: Vec<f64> = eta_grid.iter().map(|&e| sample(last, grid, e).unwrap_or(0.0)).collect();
    let mut horizons = Vec::new();
    let mut th = 0.5 * t;
    while th > 1.0 && th - eta_min > 1.0 && th >= traj.t_start() && horizons.len() < 6 {
        let state = traj.state_near(th);
        let residual: Vec<Option<f64>> = eta_grid
            .iter()
            .zip(&g_plus)
            .map(|(&e, &g)| sample(state, grid, e).map(|v| (v - g).abs()))
            .collect();
        let norm = l2(eta_grid, &residual);
        horizons.push(RadiationHorizon { t: state.t, residual, l2: norm });
        th *= 0.5;
    }

    let some: Vec<Option<f64>> = g_plus.iter().map(|&g| Some(g)).collect();
    let norm_sq = l2(eta_grid, &some).powi(2);
    let energy = traj.energy.first().map_or(0.0, |e| e.1);
    Ok(RadiationProfile {
        eta: eta_grid.to_vec(),
        g_plus,
        t_used: t,
        horizons,
        norm_sq,
        energy,
        c_ratio: if energy > 0.0 { norm_sq / (energy / grid.c_d()) } else { 0.0 },
    })
}

/// Differences of the profile read at horizons `t` and `2t` for each `t` in `horizons`, on the
/// `η` values of `eta_grid` lying at least one unit inside the smallest horizon.
pub fn horizon_stability(traj: &Trajectory, eta_grid: &[f64], horizons: &[f64]) -> Result<HorizonStability> {
    let grid = &traj.config.grid;
    let t_min = horizons.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = horizons.iter().copied().fold(0.0, f64::max);
    if horizons.is_empty() || 2.0 * t_max > traj.t_end() + 1e-9 * (1.0 + t_max) {
        return Err(Error::InsufficientHorizon { t_final: traj.t_end(), eta_max: 2.0 * t_max });
    }
    let etas: Vec<f64> = eta_grid.iter().copied().filter(|&e| t_min - e >= 1.0 && 2.0 * t_max - e < grid.r_max).collect();
    if etas.len() < 2 {
        return Err(Error::InsufficientHorizon { t_final: t_min, eta_max: eta_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max) });
    }
    let mut diffs = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let a = traj.state_near(t);
        let b = traj.state_near(2.0 * t);
        let d: Vec<Option<f64>> = etas
            .iter()
            .map(|&e| Some(sample(b, grid, e).unwrap_or(0.0) - sample(a, grid, e).unwrap_or(0.0)))
            .collect();
        diffs.push(l2(&etas, &d));
    }
    Ok(HorizonStability {
        t: horizons.to_vec(),
        exponent: log_slope(horizons, &diffs).map(|s| -s),
        diff_l2: diffs,
        eta_range: (etas[0], etas[etas.len() - 1]),
        beta: traj.config.params.derive().beta,
    })
}

/// `∫ (|r^{(d-1)/2}u_r + g(t-r)|² + |r^{(d-1)/2}u_t - g(t-r)|²) dr` at the state's time.
pub fn radiation_residual(state: &FieldState, config: &SolverConfig, profile: &RadiationProfile) -> f64 {
    let grid = &config.grid;
    let k = half_dim(config.params.d);
    let t = state.t;
    let inv = 0.5 / grid.dr;
    line_integral_with(grid, 0.0, grid.r_max, |j| {
        let r = grid.r(j);
        let g = profile.g(t - r);
        let (w, wt) = (state.w[j], state.wt[j]);
        let ur = if j == 0 {
            0.0
        } else if j == grid.n {
            (3.0 * w - 4.0 * state.w[j - 1] + state.w[j - 2]) * inv - k * w / r
        } else {
            (state.w[j + 1] - state.w[j - 1]) * inv - k * w / r
        };
        let (a, b) = (ur + g, wt - g);
        if j == 0 {
            g * g + b * b
        } else {
            a * a + b * b
        }
    })
}

/// Three-dimensional free wave with radiation field `g₊`: `w = G(t - r) - G(t + r)`,
/// `G' = g₊`, sampled on `grid` at time `t`.
pub fn radiation_built_state(profile: &RadiationProfile, grid: &RadialGrid, t: f64) -> Result<FieldState> {
    if grid.d != 3 {
        return Err(Error::InvalidConfig(format!("radiation-built comparator needs d = 3, got d = {}", grid.d)));
    }
    let eta = &profile.eta;
    let mut big_g = vec![0.0; eta.len()];
    for i in 1..eta.len() {
        big_g[i] = big_g[i - 1] + 0.5 * (profile.g_plus[i - 1] + profile.g_plus[i]) * (eta[i] - eta[i - 1]);
    }
    let g_end = big_g[big_g.len() - 1];
    let cap_g = |s: f64| interp(eta, &big_g, s, 0.0, g_end);
    let mut out = FieldState::zero(grid);
    out.t = t;
    for j in 1..grid.len() {
        let r = grid.r(j);
        out.w[j] = cap_g(t - r) - cap_g(t + r);
        out.wt[j] = profile.g(t - r) - profile.g(t + r);
    }
    Ok(out)
}
