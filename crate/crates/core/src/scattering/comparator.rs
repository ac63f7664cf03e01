use serde::{Deserialize, Serialize};

use super::energy_distance;
use super::radiation::{radiation_built_state, RadiationProfile};
use crate::error::{Error, Result};
use crate::functionals::energy_between;
use crate::mesh::line_integral_with;
use crate::solver::{evolve, FieldState, Sampling, SolverConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Comparator {
    /// Free wave assembled from `g₊` (three dimensions only).
    RadiationBuilt,
    /// Free flow of the solution's data at `t_match`, run forward and backward.
    MatchedData { t_match: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorSeries {
    /// Region `|x| > t - η`; `None` for all space.
    pub eta: Option<f64>,
    pub t: Vec<f64>,
    pub distance: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyPoint {
    pub t1: f64,
    pub t2: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    pub c: f64,
    pub value: f64,
    pub per_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub radius: f64,
    pub kappa_0: f64,
    pub t: f64,
    pub points: Vec<BandPoint>,
    /// `max(value/c) / min(value/c)`
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub comparator: Comparator,
    pub series: Vec<ExteriorSeries>,
    pub cauchy: Vec<CauchyPoint>,
    pub band: Option<BandReport>,
}

/// Runs the free flow (`a = 0`, no nonlinearity, `λ_d` kept) from `state` to time `target`.
fn free_flow(state: &FieldState, free: &SolverConfig, target: f64) -> Result<FieldState> {
    let span = target - state.t;
    if span == 0.0 {
        return Ok(state.clone());
    }
    let cfg = free.clone().with_t_final(span.abs()).with_record_every(usize::MAX);
    let out = if span > 0.0 {
        let traj = evolve(state, &cfg, &Sampling::states_only(), &mut [])?;
        traj.last().clone()
    } else {
        let traj = evolve(&state.reversed(), &cfg, &Sampling::states_only(), &mut [])?;
        traj.last().reversed()
    };
    Ok(FieldState { t: target, ..out })
}

/// The free wave sharing the solution's data at `t_match`, evaluated at every recorded time of `traj`.
pub fn free_comparator(traj: &Trajectory, t_match: f64) -> Result<Trajectory> {
    let anchor = traj.state_near(t_match);
    if (anchor.t - t_match).abs() > 1e-9 * (1.0 + t_match.abs()) {
        return Err(Error::InvalidConfig(format!("t_match = {t_match} is not a recorded time (nearest {})", anchor.t)));
    }
    let free = traj.config.clone().free();
    let times: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
    let k = times.partition_point(|&t| t < anchor.t);

    let mut states = vec![FieldState::zero(&free.grid); times.len()];
    states[k] = anchor.clone();
    for i in (0..k).rev() {
        states[i] = free_flow(&states[i + 1], &free, times[i])?;
    }
    for i in k + 1..times.len() {
        states[i] = free_flow(&states[i - 1], &free, times[i])?;
    }
    let energy = states.iter().map(|s| (s.t, energy_between(s, &free, 0.0, free.grid.r_max).total)).collect();
    Ok(Trajectory {
        config: free.with_t_final(traj.t_end() - traj.t_start()),
        states,
        energy,
        cones: Vec::new(),
        characteristics: Vec::new(),
    })
}

/// `‖S₀(-t₂)U(t₂) - S₀(-t₁)U(t₁)‖²_{Ḣ¹×L²}`, both states pulled back to `t = 0` by the free flow.
pub fn cauchy_criterion(traj: &Trajectory, t1: f64, t2: f64) -> Result<f64> {
    if t1 >= t2 {
        return Err(Error::InvalidConfig(format!("need t1 < t2, got {t1} and {t2}")));
    }
    crate::functionals::window(traj, t1, t2)?;
    let free = traj.config.clone().free();
    let a = free_flow(traj.state_near(t1), &free, 0.0)?;
    let b = free_flow(traj.state_near(t2), &free, 0.0)?;
    Ok(energy_distance(&a, &b, &free.grid, 0.0))
}

/// [`cauchy_criterion`] over consecutive pairs of `times`.
pub fn cauchy_series(traj: &Trajectory, times: &[f64]) -> Result<Vec<CauchyPoint>> {
    times
        .windows(2)
        .map(|p| Ok(CauchyPoint { t1: p[0], t2: p[1], distance: cauchy_criterion(traj, p[0], p[1])? }))
        .collect()
}

/// Distance between the solution and a free comparator on `|x| > t - η` for each `η`, and on all space.
pub fn exterior_scattering_check(
    traj: &Trajectory,
    eta_list: &[f64],
    comparator: Comparator,
    profile: Option<&RadiationProfile>,
) -> Result<ScatteringReport> {
    let grid = traj.config.grid;
    let matched = match comparator {
        Comparator::MatchedData { t_match } => Some(free_comparator(traj, t_match)?),
        Comparator::RadiationBuilt => {
            if profile.is_none() {
                return Err(Error::InvalidConfig("radiation-built comparator needs a radiation profile".into()));
            }
            None
        }
    };
    let comparator_at = |i: usize, t: f64| -> Result<FieldState> {
        match (&matched, profile) {
            (Some(m), _) => Ok(m.states[i].clone()),
            (None, Some(p)) => radiation_built_state(p, &grid, t),
            (None, None) => unreachable!(),
        }
    };

    let mut series: Vec<ExteriorSeries> = eta_list
        .iter()
        .map(|&e| ExteriorSeries { eta: Some(e), t: Vec::new(), distance: Vec::new() })
        .collect();
    let mut full = ExteriorSeries { eta: None, t: Vec::new(), distance: Vec::new() };
    for (i, u) in traj.states.iter().enumerate() {
        if u.t < 0.0 {
            continue;
        }
        let v = comparator_at(i, u.t)?;
        full.t.push(u.t);
        full.distance.push(energy_distance(u, &v, &grid, 0.0));
        for s in series.iter_mut() {
            let eta = s.eta.unwrap_or(0.0);
            if u.t >= eta && u.t - eta < grid.r_max {
                s.t.push(u.t);
                s.distance.push(energy_distance(u, &v, &grid, u.t - eta));
            }
        }
    }
    series.push(full);
    Ok(ScatteringReport { comparator, series, cauchy: Vec::new(), band: None })
}

/// `∫_{t-c·t^{1-κ₀}}^{t+R} (|w_t - g₊(t-r)|² + |w_r + g₊(t-r)|²) dr` at the last recorded time, for each `c`.
pub fn band_check(traj: &Trajectory, profile: &RadiationProfile, c_list: &[f64], radius: f64) -> Result<BandReport> {
    let config = &traj.config;
    let grid = &config.grid;
    let kappa_0 = config.params.derive().kappa_0;
    let s = traj.last();
    let t = s.t;
    if t <= 0.0 || c_list.is_empty() {
        return Err(Error::InsufficientHorizon { t_final: t, eta_max: 0.0 });
    }
    let inv = 0.5 / grid.dr;
    let points: Vec<BandPoint> = c_list
        .iter()
        .map(|&c| {
            let lo = (t - c * t.powf(1.0 - kappa_0)).max(0.0);
            let value = line_integral_with(grid, lo, t + radius, |j| {
                if j == 0 || j == grid.n {
                    return 0.0;
                }
                let g = profile.g(t - grid.r(j));
                let w_r = (s.w[j + 1] - s.w[j - 1]) * inv;
                let (a, b) = (s.wt[j] - g, w_r + g);
                a * a + b * b
            });
            BandPoint { c, value, per_c: value / c }
        })
        .collect();
    let hi = points.iter().map(|p| p.per_c).fold(f64::NEG_INFINITY, f64::max);
    let lo = points.iter().map(|p| p.per_c).fold(f64::INFINITY, f64::min);
    Ok(BandReport {
        radius,
        kappa_0,
        t,
        points,
        spread: if lo > 0.0 { hi / lo } else { f64::INFINITY },
    })
}
