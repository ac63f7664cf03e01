//! Energy flux through the truncated light cones `|x| = t - η`.

use serde::{Deserialize, Serialize};

use super::{abs_pow, half_dim, inv_pow, trapezoid};
use crate::error::{Error, Result};
use crate::mesh::ConeSection;
use crate::solver::{ConeTrace, SolverConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxReport {
    pub cone: ConeSection,
    /// Time integral of the cone flux density between the samples used.
    pub flux_value: f64,
    /// `E(t₂; B(0, t₂ - η)) - E(t₁; B(0, t₁ - η))`
    pub energy_delta: f64,
    pub residual: f64,
    pub t1_used: f64,
    pub t2_used: f64,
    pub samples: usize,
    /// Time-quadrature error estimate from halving the sample set.
    pub budget: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeHardyReport {
    pub eta: f64,
    /// Radius at the last sample; the cone is integrated over `0 < r < r_end`.
    pub r_end: f64,
    /// `c_d ∫ (w_r + w_t - k w/r)² dr`, i.e. `∫|u_r + u_t|² dS` up to the `√2`.
    pub gradient: f64,
    /// `c_d (d-2)/2 · w(r_end)²/r_end`, the free-end term of the truncated cone.
    pub truncation: f64,
    /// `((d-2)/2)² c_d ∫ w²/r² dr`
    pub hardy: f64,
    /// `gradient + truncation - hardy`
    pub slack: f64,
    /// `c_d ∫ [(u_r + u_t)² + u²/r² + |u|^{p+1}] r^{d-1} dr` along the cone.
    pub flux_bound_integral: f64,
    /// `flux_bound_integral / E`
    pub flux_ratio: f64,
    /// `½(gradient + truncation) + (a/2)·c_d ∫ w²/r² dr`, nonnegative when `a > -(d-2)²/4`.
    pub combined: f64,
    pub energy: f64,
}

fn cone_of(traj: &Trajectory, eta: f64) -> Result<&ConeTrace> {
    match traj.cone(eta) {
        Some(c) if c.t.len() >= 2 => Ok(c),
        _ => Err(Error::ConeNotSampled { eta }),
    }
}

/// Flux density on the cone at sample `i`, in the `t`-parameterisation.
fn density(cone: &ConeTrace, i: usize, config: &SolverConfig) -> f64 {
    let r = cone.t[i] - cone.eta;
    let k = half_dim(config.params.d);
    let (w, w_r, w_t) = (cone.w[i], cone.w_r[i], cone.w_t[i]);
    let s = w_t + w_r - k * w / r;
    let mut f = 0.5 * s * s + 0.5 * config.a_eff() * w * w / (r * r);
    if config.nonlinearity_on {
        let p = config.params.p;
        f += inv_pow(r, config.nonlinear_weight_exponent()) * abs_pow(w, p + 1.0) / (p + 1.0);
    }
    config.grid.c_d() * f
}

/// Compares the energy gained by `B(0, t - η)` over `[t1, t2]` with the flux through its boundary.
/// The window is shrunk to the first sample at or after `t1` and the last at or before `t2`.
pub fn cone_flux(traj: &Trajectory, eta: f64, t1: f64, t2: f64) -> Result<FluxReport> {
    let section = ConeSection::new(eta, t1, t2)?;
    let cone = cone_of(traj, eta)?;
    let slack = 1e-9 * (1.0 + t2.abs());
    let i1 = cone.t.partition_point(|&t| t < t1 - slack);
    let i2 = cone.t.partition_point(|&t| t <= t2 + slack);
    if i2 < i1 + 2 {
        return Err(Error::ConeNotSampled { eta });
    }
    let config = &traj.config;
    let ts = &cone.t[i1..i2];
    let fs: Vec<f64> = (i1..i2).map(|i| density(cone, i, config)).collect();
    let flux_value = trapezoid(ts, &fs);

    // Every other sample, sharing both endpoints when the count allows.
    let coarse: Vec<usize> = (0..ts.len()).step_by(2).collect();
    let budget_raw = if coarse.len() >= 2 && *coarse.last().unwrap() == ts.len() - 1 {
        let tc: Vec<f64> = coarse.iter().map(|&i| ts[i]).collect();
        let fc: Vec<f64> = coarse.iter().map(|&i| fs[i]).collect();
        (trapezoid(&tc, &fc) - flux_value).abs() / 3.0
    } else {
        0.0
    };

    let e1 = cone.ball_energy[i1];
    let e2 = cone.ball_energy[i2 - 1];
    let energy_delta = e2 - e1;
    let scale = e1.abs().max(e2.abs()).max(flux_value.abs());
    Ok(FluxReport {
        cone: section,
        flux_value,
        energy_delta,
        residual: (flux_value - energy_delta).abs(),
        t1_used: ts[0],
        t2_used: ts[ts.len() - 1],
        samples: ts.len(),
        budget: budget_raw.max(1e-10 * scale),
    })
}

/// Integral of the samples `f` over `r`, with the stretch `0 < r < r_0` closed by the
/// power law through the first two samples.
fn cone_integral(r: &[f64], f: &[f64]) -> f64 {
    let mut total = trapezoid(r, f);
    if r.len() >= 2 && f[0] > 0.0 && f[1] > 0.0 && r[0] > 0.0 {
        let beta = (f[1] / f[0]).ln() / (r[1] / r[0]).ln();
        total += if beta > -1.0 { f[0] * r[0] / (beta + 1.0) } else { f[0] * r[0] };
    } else if !r.is_empty() {
        total += 0.5 * f[0] * r[0];
    }
    total
}

/// Sharp Hardy inequality for the trace `r ↦ u(r, r + η)` on the recorded part of the cone.
pub fn cone_hardy_check(traj: &Trajectory, eta: f64) -> Result<ConeHardyReport> {
    let cone = cone_of(traj, eta)?;
    let config = &traj.config;
    let c_d = config.grid.c_d();
    let d = config.params.d as f64;
    let k = half_dim(config.params.d);
    let h = 0.5 * (d - 2.0);
    let p = config.params.p;
    let gamma = config.nonlinear_weight_exponent();

    let n = cone.t.len();
    let r: Vec<f64> = cone.t.iter().map(|&t| t - eta).collect();
    let mut grad = Vec::with_capacity(n);
    let mut inv_sq = Vec::with_capacity(n);
    let mut nonlin = Vec::with_capacity(n);
    for i in 0..n {
        let (w, ri) = (cone.w[i], r[i]);
        let s = cone.w_r[i] + cone.w_t[i] - k * w / ri;
        grad.push(s * s);
        inv_sq.push(w * w / (ri * ri));
        nonlin.push(inv_pow(ri, gamma) * abs_pow(w, p + 1.0));
    }
    let g = c_d * cone_integral(&r, &grad);
    let q = c_d * cone_integral(&r, &inv_sq);
    let nl = c_d * trapezoid(&r, &nonlin);
    let r_end = r[n - 1];
    let truncation = c_d * h * cone.w[n - 1] * cone.w[n - 1] / r_end;
    let hardy = h * h * q;
    let energy = traj.energy.first().map_or(0.0, |e| e.1);
    let flux_bound_integral = g + q + nl;
    Ok(ConeHardyReport {
        eta,
        r_end,
        gradient: g,
        truncation,
        hardy,
        slack: g + truncation - hardy,
        flux_bound_integral,
        flux_ratio: if energy != 0.0 { flux_bound_integral / energy } else { 0.0 },
        combined: 0.5 * (g + truncation) + 0.5 * config.a_eff() * q,
        energy,
    })
}
