//! Local Hardy form and the virial functional.
//!
//! The form on `B(0, R)` is discretised through the ground state `ρ = r^α`,
//! `α = (d-1)/2 - σ`: with `φ = w/ρ`, summation by parts gives
//! `Σ(Δw)²/dr + Σ (D²ρ/ρ) w² dr = Σ ρ_j ρ_{j+1} (Δφ)²/dr + (Δρ/dr)/ρ · w_J²`
//! exactly, and `D²ρ/ρ` is a second-order approximation of `(λ_d + a)/r²`.

use serde::{Deserialize, Serialize};

use super::{energy_between, half_dim};
use crate::error::{Error, Result};
use crate::exponents::sigma;
use crate::mesh::{line_integral_with, RadialGrid};
use crate::solver::{FieldState, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    /// Node radius used (the requested radius rounded to the grid).
    pub radius: f64,
    pub f_r: f64,
    /// `∫_{|x|<R} |∇u + σ x/|x|² u|²`
    pub identity_value: f64,
    /// `σ ∫_{|x|=R} u²/|x| dS`
    pub boundary_term: f64,
    /// `∫_{|x|<R} (|∇u|² + a u²/|x|²)`
    pub quadratic_form: f64,
    /// `-c_d σ R^{d-2} u(R)²`, the lower bound for `quadratic_form`.
    pub cor42_bound: f64,
    /// `∫_{|x|<R} (|∇u|² + u²/|x|²)`
    pub strengthened_lhs: f64,
    /// `strengthened_lhs / (f_r + ∫_{|x|=R} u²/|x| dS)`
    pub strengthened_ratio: f64,
    pub residual: f64,
    /// Sum of magnitudes of the terms entering `f_r`.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialBound {
    pub radius: f64,
    pub virial: f64,
    /// `R·E - (μ_d + a - 2σ)/(2R) ∫_{|x|≤R} u² - (λ_d + a)(R/2) ∫_{|x|>R} u²/|x|²`
    pub bound: f64,
    pub slack: f64,
    pub energy: f64,
}

/// Ground-state discretisation of the form on `[0, r_J]`, before the factor `c_d`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BallForm {
    /// `Σ(Δw)²/dr + Σ (D²ρ/ρ) w² dr - (Δρ/dr)/ρ · w_J²`
    pub f: f64,
    pub identity: f64,
    pub cells: f64,
    pub scale: f64,
}

pub(crate) fn ground_exponent(d: u32, a: f64) -> Result<f64> {
    let h = 0.5 * (d as f64 - 2.0);
    let threshold = -h * h;
    if !(a > threshold) {
        return Err(Error::PotentialBelowThreshold { a, threshold });
    }
    Ok(0.5 + (h * h + a).sqrt())
}

pub(crate) fn snap(grid: &RadialGrid, radius: f64) -> Result<usize> {
    grid.check_range(0.0, radius)?;
    let j = (radius / grid.dr).round() as usize;
    if j == 0 {
        return Err(Error::RangeOutsideGrid { lo: 0.0, hi: radius, r_max: grid.r_max });
    }
    Ok(j.min(grid.n))
}

pub(crate) fn ball_form(grid: &RadialGrid, w: &[f64], alpha: f64, node: usize) -> BallForm {
    let dr = grid.dr;
    let rho = |j: usize| if j == 0 { 0.0 } else { grid.r(j).powf(alpha) };
    let mut cells = 0.0;
    for j in 0..node {
        let s = w[j + 1] - w[j];
        cells += s * s;
    }
    cells /= dr;

    let (mut pot, mut pot_abs, mut identity) = (0.0, 0.0, 0.0);
    let (mut r_prev, mut r_here) = (0.0, rho(1));
    for j in 1..node {
        let r_next = rho(j + 1);
        let v = (r_next - 2.0 * r_here + r_prev) / (dr * dr * r_here);
        pot += v * w[j] * w[j];
        pot_abs += v.abs() * w[j] * w[j];
        let dphi = w[j + 1] / r_next - w[j] / r_here;
        identity += r_here * r_next * dphi * dphi;
        r_prev = r_here;
        r_here = r_next;
    }
    pot *= dr;
    pot_abs *= dr;
    identity /= dr;
    let edge = (rho(node) - rho(node - 1)) / (dr * rho(node)) * w[node] * w[node];
    BallForm {
        f: cells + pot - edge,
        identity,
        cells,
        scale: cells + pot_abs + edge.abs(),
    }
}

/// `f(R)`, its ground-state identity and the companion bounds, for the reduced field of `state`.
pub fn hardy_local(state: &FieldState, grid: &RadialGrid, radius: f64, a: f64) -> Result<HardyReport> {
    let d = grid.d;
    let alpha = ground_exponent(d, a)?;
    let node = snap(grid, radius)?;
    let form = ball_form(grid, &state.w, alpha, node);
    let c_d = grid.c_d();
    let r = grid.r(node);
    let w_r = state.w[node];
    let sig = sigma(d, a);
    let boundary_term = c_d * sig * w_r * w_r / r;
    let f_r = c_d * form.f;
    let identity_value = c_d * form.identity;
    let quadratic_form = f_r - boundary_term;

    let k = half_dim(d);
    let lambda = (d as f64 - 1.0) * (d as f64 - 3.0) / 4.0;
    let w = &state.w;
    let inv_sq = line_integral_with(grid, 0.0, r, |j| if j == 0 { 0.0 } else { w[j] * w[j] / (grid.r(j) * grid.r(j)) });
    let strengthened_lhs = c_d * (form.cells + (lambda + 1.0) * inv_sq - k * w_r * w_r / r);
    let denominator = f_r + c_d * w_r * w_r / r;
    Ok(HardyReport {
        radius: r,
        f_r,
        identity_value,
        boundary_term,
        quadratic_form,
        cor42_bound: -boundary_term,
        strengthened_lhs,
        strengthened_ratio: if denominator > 0.0 { strengthened_lhs / denominator } else { 0.0 },
        residual: (f_r - identity_value).abs(),
        scale: c_d * form.scale + boundary_term.abs(),
    })
}

/// Centered `w_r` at interior nodes, one-sided at the ends.
pub(crate) fn nodal_slope(grid: &RadialGrid, w: &[f64], j: usize) -> f64 {
    let n = grid.n;
    let dr = grid.dr;
    if j == 0 {
        (w[1] - w[0]) / dr
    } else if j == n {
        (w[n] - w[n - 1]) / dr
    } else {
        (w[j + 1] - w[j - 1]) / (2.0 * dr)
    }
}

/// `M(t) = c_d ∫ min(r, R) w_t w_r dr`, the radial form of the two-piece virial.
pub fn virial(state: &FieldState, config: &SolverConfig, radius: f64) -> Result<f64> {
    let grid = &config.grid;
    grid.check_range(0.0, radius)?;
    let (w, wt) = (&state.w, &state.wt);
    Ok(grid.c_d()
        * line_integral_with(grid, 0.0, grid.r_max, |j| {
            grid.r(j).min(radius) * wt[j] * nodal_slope(grid, w, j)
        }))
}

/// The pointwise-in-time bound on `|M(t)|` used to close the Morawetz estimate.
pub fn virial_bound(state: &FieldState, config: &SolverConfig, radius: f64) -> Result<VirialBound> {
    let grid = &config.grid;
    let m = virial(state, config, radius)?;
    let d = config.params.d as f64;
    let a = config.a_eff();
    let mu = (d * d - 1.0) / 4.0;
    let lambda = config.lambda_d();
    let sig = sigma(config.params.d, a);
    let c_d = grid.c_d();
    let w = &state.w;
    let inner = c_d * line_integral_with(grid, 0.0, radius, |j| w[j] * w[j]);
    let outer = c_d
        * line_integral_with(grid, radius, grid.r_max, |j| {
            if j == 0 {
                0.0
            } else {
                w[j] * w[j] / (grid.r(j) * grid.r(j))
            }
        });
    let energy = energy_between(state, config, 0.0, grid.r_max).total;
    let bound = radius * energy - (mu + a - 2.0 * sig) / (2.0 * radius) * inner - (lambda + a) * 0.5 * radius * outer;
    Ok(VirialBound {
        radius,
        virial: m,
        bound,
        slack: bound - m.abs(),
        energy,
    })
}
