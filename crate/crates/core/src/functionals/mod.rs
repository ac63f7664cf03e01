//! Energies, fluxes, virial and inequality checks evaluated on solver output.
//!
//! Every energy density is the one conserved by the semi-discrete scheme:
//! cell differences for `w_r`, nodal trapezoid for the rest, written in the
//! reduced field with the physical boundary term restored on partial regions.

mod decay;
mod flux;
mod hardy;
mod morawetz;

pub use decay::{
    interior_energy_series, pointwise_envelopes, tail_decay_check, Envelopes, InteriorEnergySeries,
    IntegralEstimate, TailDecayReport, TailDecayRow,
};
pub use flux::{cone_flux, cone_hardy_check, ConeHardyReport, FluxReport};
pub use hardy::{hardy_local, virial, virial_bound, HardyReport, VirialBound};
pub use morawetz::{morawetz_check, retarded_energy_check, MorawetzReport, RetardedEnergyReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{cell_integral_with, interpolate_unchecked, line_integral_with, RadialGrid};
use crate::solver::{FieldState, SolverConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    All,
}

impl Region {
    pub fn bounds(&self, grid: &RadialGrid) -> (f64, f64) {
        match *self {
            Region::Ball { radius } => (0.0, radius),
            Region::Annulus { inner, outer } => (inner, outer),
            Region::All => (0.0, grid.r_max),
        }
    }
}

/// Components of `E(t; Σ)`; the angular part vanishes for radial fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub region: Region,
    /// `½∫u_t²`
    pub kinetic: f64,
    /// `½∫|∇u|²`
    pub gradient: f64,
    /// `(a/2)∫u²/|x|²`
    pub hardy: f64,
    /// `(1/(p+1))∫|u|^{p+1}`
    pub nonlinear: f64,
    pub total: f64,
}

/// Power `|w|^{p+1}` with the common integer cases unrolled.
#[inline(always)]
pub(crate) fn abs_pow(w: f64, q: f64) -> f64 {
    if q == 4.0 {
        let s = w * w;
        s * s
    } else if q == 3.0 {
        w.abs() * w * w
    } else {
        w.abs().powf(q)
    }
}

/// `r^{-γ}`, by repeated multiplication when `γ` is a small integer.
#[inline(always)]
pub(crate) fn inv_pow(r: f64, gamma: f64) -> f64 {
    if gamma == gamma.trunc() && gamma.abs() <= 16.0 {
        r.powi(-(gamma as i32))
    } else {
        r.powf(-gamma)
    }
}

/// Recorded states with `t1 ≤ t ≤ t2`, up to a rounding allowance.
pub(crate) fn window(traj: &Trajectory, t1: f64, t2: f64) -> Result<&[FieldState]> {
    let slack = 1e-9 * (1.0 + t1.abs().max(t2.abs()));
    let (t_start, t_end) = (traj.t_start(), traj.t_end());
    if traj.states.is_empty() || t1 < t_start - slack || t2 > t_end + slack || t2 < t1 {
        return Err(Error::WindowOutsideTrajectory { t1, t2, t_start, t_end });
    }
    let lo = traj.states.partition_point(|s| s.t < t1 - slack);
    let hi = traj.states.partition_point(|s| s.t <= t2 + slack);
    if hi <= lo {
        return Err(Error::WindowOutsideTrajectory { t1, t2, t_start, t_end });
    }
    Ok(&traj.states[lo..hi])
}

/// Trapezoid rule on `(t_i, f_i)` samples.
pub(crate) fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(t, f)| 0.5 * (f[0] + f[1]) * (t[1] - t[0])).sum()
}

pub fn half_dim(d: u32) -> f64 {
    (d as f64 - 1.0) / 2.0
}

/// Raw integrals of the reduced field on `[lo, hi]`, before scaling by `c_d`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ReducedIntegrals {
    /// `∫ w_t²`
    pub kin: f64,
    /// `∫ w_r²`
    pub grad: f64,
    /// `∫ w²/r²`
    pub inv_sq: f64,
    /// `∫ r^{-(d-1)(p-1)/2} |w|^{p+1}`
    pub nonlin: f64,
    /// `w(hi)²/hi - w(lo)²/lo`
    pub boundary: f64,
}

pub(crate) fn reduced_integrals(state: &FieldState, config: &SolverConfig, lo: f64, hi: f64) -> ReducedIntegrals {
    let grid = &config.grid;
    let (w, wt) = (&state.w, &state.wt);
    let dr = grid.dr;
    let kin = line_integral_with(grid, lo, hi, |j| wt[j] * wt[j]);
    let grad = cell_integral_with(grid, lo, hi, |j| {
        let s = w[j + 1] - w[j];
        s * s
    }) / (dr * dr);
    let inv_sq = line_integral_with(grid, lo, hi, |j| {
        if j == 0 {
            0.0
        } else {
            let r = j as f64 * dr;
            w[j] * w[j] / (r * r)
        }
    });
    let nonlin = if config.nonlinearity_on {
        let gamma = config.nonlinear_weight_exponent();
        let q = config.params.p + 1.0;
        line_integral_with(grid, lo, hi, |j| {
            if j == 0 || w[j] == 0.0 {
                0.0
            } else {
                inv_pow(j as f64 * dr, gamma) * abs_pow(w[j], q)
            }
        })
    } else {
        0.0
    };
    let edge = |r: f64| {
        if r <= 0.0 || r >= grid.r_max {
            0.0
        } else {
            let v = interpolate_unchecked(grid, w, r);
            v * v / r
        }
    };
    ReducedIntegrals {
        kin,
        grad,
        inv_sq,
        nonlin,
        boundary: edge(hi) - edge(lo),
    }
}

/// Energy on `[lo, hi]` without range checks (the range is clamped to the grid).
pub fn energy_between(state: &FieldState, config: &SolverConfig, lo: f64, hi: f64) -> EnergyBreakdown {
    let ri = reduced_integrals(state, config, lo, hi);
    let c_d = config.grid.c_d();
    let k = half_dim(config.params.d);
    let lambda = config.lambda_d();
    let kinetic = 0.5 * c_d * ri.kin;
    let gradient = 0.5 * c_d * (ri.grad + lambda * ri.inv_sq - k * ri.boundary);
    let hardy = 0.5 * c_d * config.a_eff() * ri.inv_sq;
    let nonlinear = c_d * ri.nonlin / (config.params.p + 1.0);
    EnergyBreakdown {
        region: Region::Annulus { inner: lo, outer: hi },
        kinetic,
        gradient,
        hardy,
        nonlinear,
        total: kinetic + gradient + hardy + nonlinear,
    }
}

/// `E(t; Σ)` and its components.
pub fn energy(state: &FieldState, config: &SolverConfig, region: Region) -> Result<EnergyBreakdown> {
    let (lo, hi) = region.bounds(&config.grid);
    config.grid.check_range(lo, hi)?;
    Ok(EnergyBreakdown {
        region,
        ..energy_between(state, config, lo, hi)
    })
}

/// Physical `(|∇u|² + u_t² + |u|^{p+1})` density in the reduced variables, per unit `dr`,
/// at node `j` (gradient from the centered difference), scaled by `c_d`.
fn weighted_density(state: &FieldState, config: &SolverConfig, j: usize) -> f64 {
    let grid = &config.grid;
    if j == 0 || j == grid.n {
        return 0.0;
    }
    let r = grid.r(j);
    let k = half_dim(config.params.d);
    let w = state.w[j];
    let w_r = (state.w[j + 1] - state.w[j - 1]) / (2.0 * grid.dr);
    let grad = w_r - k * w / r;
    let gamma = config.nonlinear_weight_exponent();
    let pot = inv_pow(r, gamma) * abs_pow(w, config.params.p + 1.0);
    grad * grad + state.wt[j] * state.wt[j] + pot
}

/// `E_κ = ∫(|x|^κ + 1)(|∇u|² + u_t² + |u|^{p+1}) dx`, unnormalized as written.
pub fn weighted_energy(state: &FieldState, config: &SolverConfig, kappa: f64) -> f64 {
    tail_energy(state, config, kappa, 0.0)
}

/// `E_{κ,r}`: the same weighted integral restricted to `|x| > r/2`.
pub fn tail_energy(state: &FieldState, config: &SolverConfig, kappa: f64, r: f64) -> f64 {
    let grid = &config.grid;
    config.grid.c_d()
        * line_integral_with(grid, 0.5 * r, grid.r_max, |j| {
            (grid.r(j).powf(kappa) + 1.0) * weighted_density(state, config, j)
        })
}
