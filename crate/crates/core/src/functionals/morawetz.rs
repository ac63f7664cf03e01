//! Space-time Morawetz estimate and its retarded-energy corollary.

use serde::{Deserialize, Serialize};

use super::hardy::{ball_form, ground_exponent, snap, virial};
use super::{abs_pow, energy_between, inv_pow, trapezoid, window};
use crate::error::{Error, Result};
use crate::exponents::sigma;
use crate::mesh::line_integral_with;
use crate::solver::{FieldState, SolverConfig, Trajectory};

/// Left-hand side of the estimate, one entry per term, each already integrated in time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MorawetzTerms {
    /// `(1/2R) ∫∫_{|x|<R} (|∇u|² + a u²/|x|² + u_t² + ((d-1)(p-1)-2)/(p+1) |u|^{p+1})`
    pub interior: f64,
    /// `(d-1)/(4R²) ∫∫_{|x|=R} u² dS`
    pub boundary: f64,
    /// `(d-1)(p-1)/(2(p+1)) ∫∫_{|x|≥R} |u|^{p+1}/|x|`
    pub exterior_nonlinear: f64,
    /// `(a + λ_d) ∫∫_{|x|≥R} u²/|x|³`, signed.
    pub exterior_hardy: f64,
    /// `(μ_d + a - 2σ)/(2R²) ∫_{|x|≤R} (u(T₁)² + u(T₂)²)`
    pub endpoint: f64,
}

impl MorawetzTerms {
    pub fn total(&self) -> f64 {
        self.interior + self.boundary + self.exterior_nonlinear + self.exterior_hardy + self.endpoint
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorawetzReport {
    /// Node radius used.
    pub radius: f64,
    pub t1: f64,
    pub t2: f64,
    pub lhs_terms: MorawetzTerms,
    pub lhs_total: f64,
    /// `2E + ½(|a| - λ_d) ∫_{|x|>R} (u(T₁)² + u(T₂)²)/|x|²`
    pub rhs: f64,
    pub energy: f64,
    pub virial_t1: f64,
    pub virial_t2: f64,
    /// First two lines minus `(M(T₁) - M(T₂))/R`.
    pub identity_residual: f64,
    pub slack: f64,
    pub budget: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetardedEnergyReport {
    pub radius: f64,
    pub t_end: f64,
    /// `∫_R^T E(t; B(0, R)) dt`
    pub lhs: f64,
    /// `∫_{-R}^R E(t; |x| > R) dt`
    pub exterior_energy: f64,
    /// `R(|a| - λ_d) ∫_{-R}^T ∫_{|x|>R} u²/|x|³`
    pub hardy_flux: f64,
    /// `R(|a| - λ_d)·½ ∫_{|x|>R} (u(-R)² + u(T)²)/|x|²`
    pub endpoints: f64,
    pub rhs: f64,
    pub slack: f64,
    pub budget: f64,
}

/// Per-state spatial integrals entering the time-integrated lines.
#[derive(Debug, Clone, Copy, Default)]
struct Lines {
    interior: f64,
    boundary: f64,
    exterior_nonlinear: f64,
    exterior_hardy: f64,
}

struct Setup {
    node: usize,
    radius: f64,
    alpha: f64,
    sigma: f64,
    lambda: f64,
    mu: f64,
    a: f64,
}

impl Setup {
    fn new(config: &SolverConfig, radius: f64) -> Result<Self> {
        let d = config.params.d;
        let a = config.a_eff();
        let node = snap(&config.grid, radius)?;
        let df = d as f64;
        Ok(Self {
            node,
            radius: config.grid.r(node),
            alpha: ground_exponent(d, a)?,
            sigma: sigma(d, a),
            lambda: config.lambda_d(),
            mu: (df * df - 1.0) / 4.0,
            a,
        })
    }
}

fn lines(state: &FieldState, config: &SolverConfig, s: &Setup) -> Lines {
    let grid = &config.grid;
    let c_d = grid.c_d();
    let (w, wt) = (&state.w, &state.wt);
    let r = s.radius;
    let d = config.params.d as f64;
    let p = config.params.p;
    let gamma = config.nonlinear_weight_exponent();

    let form = ball_form(grid, w, s.alpha, s.node);
    let w_edge = w[s.node];
    let quadratic = form.f - s.sigma * w_edge * w_edge / r;
    let kinetic = line_integral_with(grid, 0.0, r, |j| wt[j] * wt[j]);
    let (inner_nl, outer_nl) = if config.nonlinearity_on {
        let inner = line_integral_with(grid, 0.0, r, |j| {
            if j == 0 {
                0.0
            } else {
                inv_pow(grid.r(j), gamma) * abs_pow(w[j], p + 1.0)
            }
        });
        let outer = line_integral_with(grid, r, grid.r_max, |j| inv_pow(grid.r(j), gamma + 1.0) * abs_pow(w[j], p + 1.0));
        (inner, outer)
    } else {
        (0.0, 0.0)
    };
    let cubic = line_integral_with(grid, r, grid.r_max, |j| {
        let x = grid.r(j);
        w[j] * w[j] / (x * x * x)
    });
    Lines {
        interior: c_d * (quadratic + kinetic + (2.0 * gamma - 2.0) / (p + 1.0) * inner_nl) / (2.0 * r),
        boundary: c_d * (d - 1.0) / (4.0 * r * r) * w_edge * w_edge,
        exterior_nonlinear: c_d * gamma / (p + 1.0) * outer_nl,
        exterior_hardy: c_d * (s.a + s.lambda) * cubic,
    }
}

fn outer_inv_sq(state: &FieldState, config: &SolverConfig, r: f64) -> f64 {
    let grid = &config.grid;
    let w = &state.w;
    grid.c_d()
        * line_integral_with(grid, r, grid.r_max, |j| {
            if j == 0 {
                0.0
            } else {
                w[j] * w[j] / (grid.r(j) * grid.r(j))
            }
        })
}

/// Trapezoid on all samples and the Richardson estimate from every other one.
fn integrate_with_budget(t: &[f64], f: &[f64]) -> (f64, f64) {
    let fine = trapezoid(t, f);
    if t.len() < 3 || (t.len() - 1) % 2 != 0 {
        return (fine, 0.0);
    }
    let tc: Vec<f64> = t.iter().step_by(2).copied().collect();
    let fc: Vec<f64> = f.iter().step_by(2).copied().collect();
    (fine, (trapezoid(&tc, &fc) - fine).abs() / 3.0)
}

/// Every term of the Morawetz estimate on `[T1, T2]` from the recorded states.
pub fn morawetz_check(traj: &Trajectory, radius: f64, t1: f64, t2: f64) -> Result<MorawetzReport> {
    let config = &traj.config;
    let s = Setup::new(config, radius)?;
    let states = window(traj, t1, t2)?;
    let first = &states[0];
    let last = &states[states.len() - 1];
    let c_d = config.grid.c_d();
    let r = s.radius;

    let ts: Vec<f64> = states.iter().map(|x| x.t).collect();
    let per: Vec<Lines> = states.iter().map(|x| lines(x, config, &s)).collect();
    let col = |f: fn(&Lines) -> f64| per.iter().map(f).collect::<Vec<f64>>();
    let (interior, b1) = integrate_with_budget(&ts, &col(|l| l.interior));
    let (boundary, b2) = integrate_with_budget(&ts, &col(|l| l.boundary));
    let (exterior_nonlinear, b3) = integrate_with_budget(&ts, &col(|l| l.exterior_nonlinear));
    let (exterior_hardy, b4) = integrate_with_budget(&ts, &col(|l| l.exterior_hardy));

    let inner_sq = |x: &FieldState| c_d * line_integral_with(&config.grid, 0.0, r, |j| x.w[j] * x.w[j]);
    let endpoint = (s.mu + s.a - 2.0 * s.sigma) / (2.0 * r * r) * (inner_sq(first) + inner_sq(last));
    let terms = MorawetzTerms {
        interior,
        boundary,
        exterior_nonlinear,
        exterior_hardy,
        endpoint,
    };

    let energy = energy_between(first, config, 0.0, config.grid.r_max).total;
    let rhs = 2.0 * energy
        + 0.5 * (s.a.abs() - s.lambda) * (outer_inv_sq(first, config, r) + outer_inv_sq(last, config, r));
    let m1 = virial(first, config, r)?;
    let m2 = virial(last, config, r)?;
    let lhs_total = terms.total();
    let scale = rhs.abs().max(lhs_total.abs());
    Ok(MorawetzReport {
        radius: r,
        t1: first.t,
        t2: last.t,
        lhs_terms: terms,
        lhs_total,
        rhs,
        energy,
        virial_t1: m1,
        virial_t2: m2,
        identity_residual: interior + boundary + exterior_nonlinear + exterior_hardy - (m1 - m2) / r,
        slack: rhs - lhs_total,
        budget: (b1 + b2 + b3 + b4).max(1e-10 * scale),
    })
}

/// Retarded local-energy bound over `[R, T]`, from a trajectory covering `[-R, T]`.
pub fn retarded_energy_check(traj: &Trajectory, radius: f64, t_end: f64) -> Result<RetardedEnergyReport> {
    if !(radius > 0.0 && radius < t_end) {
        return Err(Error::InvalidConfig(format!("need 0 < R < T, got R = {radius}, T = {t_end}")));
    }
    let config = &traj.config;
    let grid = &config.grid;
    grid.check_range(0.0, radius)?;
    let c_d = grid.c_d();
    let lambda = config.lambda_d();
    let coef = radius * (config.a_eff().abs() - lambda);

    let all = window(traj, -radius, t_end)?;
    let ts: Vec<f64> = all.iter().map(|s| s.t).collect();
    let slice = |lo: f64, hi: f64| {
        let slack = 1e-9 * (1.0 + hi.abs());
        let a = ts.partition_point(|&t| t < lo - slack);
        let b = ts.partition_point(|&t| t <= hi + slack);
        a..b
    };

    let inner = slice(radius, t_end);
    let inner_e: Vec<f64> = all[inner.clone()].iter().map(|s| energy_between(s, config, 0.0, radius).total).collect();
    let (lhs, b1) = integrate_with_budget(&ts[inner], &inner_e);

    let early = slice(-radius, radius);
    let outer_e: Vec<f64> =
        all[early.clone()].iter().map(|s| energy_between(s, config, radius, grid.r_max).total).collect();
    let (exterior_energy, b2) = integrate_with_budget(&ts[early], &outer_e);

    let cubic: Vec<f64> = all
        .iter()
        .map(|s| {
            c_d * line_integral_with(grid, radius, grid.r_max, |j| {
                let x = grid.r(j);
                s.w[j] * s.w[j] / (x * x * x)
            })
        })
        .collect();
    let (cubic_int, b3) = integrate_with_budget(&ts, &cubic);
    let hardy_flux = coef * cubic_int;
    let endpoints = coef * 0.5 * (outer_inv_sq(&all[0], config, radius) + outer_inv_sq(&all[all.len() - 1], config, radius));
    let rhs = exterior_energy + hardy_flux + endpoints;
    let scale = lhs.abs().max(rhs.abs());
    Ok(RetardedEnergyReport {
        radius,
        t_end: ts[ts.len() - 1],
        lhs,
        exterior_energy,
        hardy_flux,
        endpoints,
        rhs,
        slack: rhs - lhs,
        budget: (b1 + b2 + coef.abs() * b3).max(1e-10 * scale),
    })
}
