//! Radial decay envelopes, tail bounds for weighted data, and the shrinking interior ball.

use serde::{Deserialize, Serialize};

use super::{abs_pow, half_dim, inv_pow, trapezoid, weighted_density, weighted_energy};
use crate::error::{Error, Result};
use crate::mesh::{line_integral_with, norms};
use crate::solver::{to_physical, FieldState, SolverConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelopes {
    /// `sup r^{(d-2)/2}|u| / ‖u‖_{Ḣ¹}`
    pub first: f64,
    /// `sup r^{2(d-1)/(p+3)}|u| / (‖u‖_{Ḣ¹}^{2/(p+3)} ‖u‖_{L^{p+1}}^{(p+1)/(p+3)})`
    pub second: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDecayRow {
    pub r: f64,
    pub e_kappa_r: f64,
    pub max_exterior_energy: f64,
    /// Largest `E(t; |x| > r + |t|) / (r^{-κ} E_{κ,r})` over the recorded times.
    pub max_energy_ratio: f64,
    /// Largest pointwise ratio against the weighted envelope over `|x| ≥ r + |t|`.
    pub max_pointwise_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDecayReport {
    pub kappa: f64,
    pub rows: Vec<TailDecayRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub label: String,
    pub t: f64,
    pub radius: f64,
    pub lhs: f64,
    pub rhs_scale: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorEnergySeries {
    pub c: f64,
    pub kappa_0: f64,
    pub t: Vec<f64>,
    /// `t - c·t^{1-κ₀}`
    pub radius: Vec<f64>,
    pub energy: Vec<f64>,
    pub integral_estimates: Vec<IntegralEstimate>,
}

/// Both decay envelopes of a single state.
pub fn pointwise_envelopes(state: &FieldState, config: &SolverConfig) -> Result<Envelopes> {
    let grid = &config.grid;
    let p = config.params.p;
    let d = config.params.d as f64;
    let (u, _) = to_physical(state, grid);
    let nm = norms(grid, &u, p);
    if nm.h1_dot <= 0.0 || nm.lp1 <= 0.0 {
        return Err(Error::ZeroField);
    }
    let e2 = 2.0 * (d - 1.0) / (p + 3.0);
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for (j, &v) in u.iter().enumerate().skip(1) {
        let r = grid.r(j);
        s1 = s1.max(r.powf(0.5 * (d - 2.0)) * v.abs());
        s2 = s2.max(r.powf(e2) * v.abs());
    }
    Ok(Envelopes {
        first: s1 / nm.h1_dot.sqrt(),
        second: s2 / (nm.h1_dot * nm.lp1).powf(1.0 / (p + 3.0)),
    })
}

/// `|∇u|² + u²/|x|² + u_t² + |u|^{p+1}` against `dr`, in reduced variables.
fn full_density(state: &FieldState, config: &SolverConfig, j: usize) -> f64 {
    if j == 0 || j == config.grid.n {
        return 0.0;
    }
    let r = config.grid.r(j);
    let w = state.w[j];
    let base = weighted_density(state, config, j);
    if config.nonlinearity_on {
        base + w * w / (r * r)
    } else {
        // Comparator runs carry no potential energy.
        let gamma = config.nonlinear_weight_exponent();
        base - inv_pow(r, gamma) * abs_pow(w, config.params.p + 1.0) + w * w / (r * r)
    }
}

fn ball_integral(state: &FieldState, config: &SolverConfig, lo: f64, hi: f64) -> f64 {
    config.grid.c_d() * line_integral_with(&config.grid, lo, hi, |j| full_density(state, config, j))
}

/// `s ↦ E_{κ,s}` of one state, tabulated on the nodes as `∫_{r_j}^{r_max}` and read at `s/2`.
struct TailTable {
    dr: f64,
    cumulative: Vec<f64>,
}

impl TailTable {
    fn new(state: &FieldState, config: &SolverConfig, kappa: f64) -> Self {
        let grid = &config.grid;
        let c_d = grid.c_d();
        let f: Vec<f64> = (0..grid.len())
            .map(|j| c_d * (grid.r(j).powf(kappa) + 1.0) * weighted_density(state, config, j))
            .collect();
        let mut cumulative = vec![0.0; grid.len()];
        for j in (0..grid.n).rev() {
            cumulative[j] = cumulative[j + 1] + 0.5 * grid.dr * (f[j] + f[j + 1]);
        }
        Self { dr: grid.dr, cumulative }
    }

    fn at(&self, s: f64) -> f64 {
        let x = (0.5 * s / self.dr).max(0.0);
        let j = x.floor() as usize;
        if j + 1 >= self.cumulative.len() {
            return 0.0;
        }
        let th = x - j as f64;
        (1.0 - th) * self.cumulative[j] + th * self.cumulative[j + 1]
    }
}

/// Exterior-energy and pointwise tail bounds for weighted data, with `E_{κ,·}` from the state at `t = 0`.
pub fn tail_decay_check(traj: &Trajectory, kappa: f64, r_list: &[f64]) -> Result<TailDecayReport> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::InvalidConfig(format!("kappa must lie in [0, 1), got {kappa}")));
    }
    let config = &traj.config;
    let grid = &config.grid;
    let d = config.params.d as f64;
    let p = config.params.p;
    let k = half_dim(config.params.d);
    let initial = traj.state_near(0.0);
    let table = TailTable::new(initial, config, kappa);
    let floor = 1e-14 * table.at(0.0);

    let mut rows = Vec::with_capacity(r_list.len());
    for &r in r_list {
        grid.check_range(0.0, r)?;
        let e_kappa_r = table.at(r);
        let denom = r.powf(-kappa) * e_kappa_r;
        let mut row = TailDecayRow {
            r,
            e_kappa_r,
            max_exterior_energy: 0.0,
            max_energy_ratio: 0.0,
            max_pointwise_ratio: 0.0,
        };
        for state in &traj.states {
            let lo = r + state.t.abs();
            if lo >= grid.r_max {
                continue;
            }
            let ext = ball_integral(state, config, lo, grid.r_max);
            row.max_exterior_energy = row.max_exterior_energy.max(ext);
            if denom > floor {
                row.max_energy_ratio = row.max_energy_ratio.max(ext / denom);
            }
            let first = (lo / grid.dr).ceil() as usize;
            for j in first.max(1)..grid.n {
                let x = grid.r(j);
                let s = x - state.t.abs();
                let e = table.at(s);
                if e <= floor {
                    break;
                }
                let u = state.w[j].abs() / x.powf(k);
                let bound = x.powf(-2.0 * (d - 1.0) / (p + 3.0)) * (s.powf(-kappa) * e).powf(2.0 / (p + 3.0));
                row.max_pointwise_ratio = row.max_pointwise_ratio.max(u / bound);
            }
        }
        rows.push(row);
    }
    Ok(TailDecayReport { kappa, rows })
}

fn outer_inv_sq(state: &FieldState, config: &SolverConfig, r: f64) -> f64 {
    let grid = &config.grid;
    grid.c_d()
        * line_integral_with(grid, r, grid.r_max, |j| {
            if j == 0 {
                0.0
            } else {
                state.w[j] * state.w[j] / (grid.r(j) * grid.r(j))
            }
        })
}

fn outer_inv_cube(state: &FieldState, config: &SolverConfig, r: f64) -> f64 {
    let grid = &config.grid;
    grid.c_d()
        * line_integral_with(grid, r, grid.r_max, |j| {
            let x = grid.r(j);
            state.w[j] * state.w[j] / (x * x * x)
        })
}

/// Energy of the ball `|x| < t - c·t^{1-κ₀}` along the trajectory, with the
/// three companion integral estimates logged at a handful of times.
pub fn interior_energy_series(traj: &Trajectory, c: f64) -> Result<InteriorEnergySeries> {
    let config = &traj.config;
    let grid = &config.grid;
    let d = config.params.d as f64;
    let p = config.params.p;
    let kappa_0 = config.params.derive().kappa_0;

    let mut out = InteriorEnergySeries {
        c,
        kappa_0,
        t: Vec::new(),
        radius: Vec::new(),
        energy: Vec::new(),
        integral_estimates: Vec::new(),
    };
    for state in &traj.states {
        let t = state.t;
        if t <= 0.0 {
            continue;
        }
        let radius = t - c * t.powf(1.0 - kappa_0);
        if radius <= 0.0 || radius > grid.r_max {
            continue;
        }
        out.t.push(t);
        out.radius.push(radius);
        out.energy.push(ball_integral(state, config, 0.0, radius));
    }

    let e_k0 = weighted_energy(traj.state_near(0.0), config, kappa_0);
    if e_k0 <= 0.0 {
        return Ok(out);
    }
    let scale = e_k0.powf(4.0 / (p + 3.0));
    let decay = (p + 5.0) / (p + 3.0) * kappa_0;
    let tail = -4.0 * (d - 1.0) / (p + 3.0);

    let positive: Vec<&FieldState> = traj.states.iter().filter(|s| s.t > 0.0).collect();
    let stride = positive.len().div_ceil(16).max(1);
    let ts: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
    for state in positive.iter().step_by(stride) {
        let t = state.t;
        let r_near = t + 1.0;
        if r_near < grid.r_max {
            let lhs = outer_inv_sq(state, config, r_near);
            let rhs = r_near.powf(-decay) * scale;
            out.integral_estimates.push(IntegralEstimate {
                label: "inverse_square_inside".into(),
                t,
                radius: r_near,
                lhs,
                rhs_scale: rhs,
                ratio: lhs / rhs,
            });
        }
        let r_far = 0.5 * t;
        let lhs = outer_inv_sq(state, config, r_far);
        let rhs = (t.powf(-decay) + (t - r_far) * r_far.powf(tail + d - 3.0)) * scale;
        out.integral_estimates.push(IntegralEstimate {
            label: "inverse_square_outside".into(),
            t,
            radius: r_far,
            lhs,
            rhs_scale: rhs,
            ratio: lhs / rhs,
        });

        // R < T < 2R with T = t, integrated over the recorded part of [-T, T].
        let r_mid = t / 1.5;
        let lo = ts.partition_point(|&s| s < -t);
        let hi = ts.partition_point(|&s| s <= t + 1e-9 * (1.0 + t));
        if hi >= lo + 2 {
            let f: Vec<f64> = traj.states[lo..hi].iter().map(|s| outer_inv_cube(s, config, r_mid)).collect();
            let lhs = trapezoid(&ts[lo..hi], &f);
            let rhs = (r_mid.powf(-decay) + (t - r_mid).powi(2) * r_mid.powf(tail + d - 4.0)) * scale;
            out.integral_estimates.push(IntegralEstimate {
                label: "inverse_cube_spacetime".into(),
                t,
                radius: r_mid,
                lhs,
                rhs_scale: rhs,
                ratio: lhs / rhs,
            });
        }
    }
    Ok(out)
}
