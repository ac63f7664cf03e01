use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use wavelab_core::exponents::{a_min, nonlinearity_triple, p_conf, p_energy, sigma};
use wavelab_core::functionals::{
    cone_flux, cone_hardy_check, hardy_local, morawetz_check, retarded_energy_check, HardyReport,
};
use wavelab_core::solver::{dalembert_free_d3, from_physical, to_physical, Sampling};

use super::{data_energy, energy_series, to_value, trajectory, Check, Outcome, Quantity};
use crate::config::{Dynamics, ExperimentConfig};
use crate::error::CliError;
use crate::output::Series;

pub(super) fn params(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let params = cfg.model()?;
    let derived = params.derive();
    let d = params.d;
    let identity_a = (derived.sigma * derived.sigma - (d as f64 - 2.0) * derived.sigma - params.a).abs();
    let identity_kappa = (1.0 - derived.kappa_0 - 2.0 * derived.beta).abs();
    let margin = derived.mu_d + params.a - 2.0 * derived.sigma;
    Ok(Outcome {
        result: json!({
            "params": params,
            "derived": derived,
            "p_conf": p_conf(d),
            "p_energy": p_energy(d),
            "a_min": a_min(d, params.p),
            "nonlinearity_triple": nonlinearity_triple(d, params.p),
            "virial_margin": margin,
        }),
        checks: vec![
            Check::new("sigma_identity", identity_a <= 1e-12, format!("|σ² - (d-2)σ - a| = {identity_a:e}")),
            Check::new("kappa_beta_identity", identity_kappa <= 1e-12, format!("|1 - κ₀ - 2β| = {identity_kappa:e}")),
            Check::new("virial_margin", margin >= 0.75, format!("μ_d + a - 2σ = {margin}")),
        ],
        ..Outcome::default()
    })
}

pub(super) fn simulate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let traj = trajectory(cfg, &Sampling::states_only())?;
    let grid = traj.config.grid;
    let last = traj.last();
    let (u, ut) = to_physical(last, &grid);
    let mut field = Series::new("final", &["r", "u", "u_t"]);
    for j in 0..grid.len() {
        field.push(vec![grid.r(j), u[j], ut[j]]);
    }

    let e0 = data_energy(&traj);
    let drift = traj.energy_drift();
    let mut quantities = vec![Quantity { name: "energy_drift".into(), value: drift, scale: 1.0 }];
    let mut result = json!({
        "energy_initial": e0,
        "energy_final": traj.energy.last().map(|e| e.1),
        "energy_drift": drift,
        "t_start": traj.t_start(),
        "t_end": traj.t_end(),
        "steps": traj.energy.len() - 1,
        "states": traj.states.len(),
    });

    // The closed form covers the three-dimensional free wave from t = 0.
    if cfg.dynamics == Dynamics::Free && grid.d == 3 && cfg.t_back == 0.0 {
        let (_, data) = cfg.solver()?;
        let mut err = 0.0f64;
        let mut peak = 0.0f64;
        for j in 1..grid.len() {
            let exact = dalembert_free_d3(&data, grid.r(j), last.t);
            err = err.max((u[j] - exact.u).abs());
            peak = peak.max(exact.u.abs());
        }
        result["oracle_sup_error"] = json!(err);
        quantities.push(Quantity { name: "oracle_sup_error".into(), value: err, scale: peak.max(1e-300) });
    }

    let mut checks = Vec::new();
    if let Some(tol) = cfg.tolerance {
        if let Some(err) = result["oracle_sup_error"].as_f64() {
            checks.push(Check::new("oracle_sup_error", err <= tol, format!("{err:e} vs {tol:e}")));
        } else {
            checks.push(Check::new("energy_drift", drift < tol, format!("{drift:e} vs {tol:e}")));
        }
    }
    Ok(Outcome { result, series: vec![energy_series(&traj), field], checks, quantities })
}

fn default_etas(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.eta.is_empty() {
        vec![0.5, 1.0, 2.0]
    } else {
        cfg.eta.clone()
    }
}

pub(super) fn flux_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let etas = default_etas(cfg);
    let traj = trajectory(cfg, &Sampling::default().with_cones(&etas))?;
    let e0 = data_energy(&traj);
    let tol = cfg.tolerance.unwrap_or(1e-4);
    let mut checks = Vec::new();
    let mut quantities = Vec::new();
    let mut fluxes = Vec::new();
    let mut hardy = Vec::new();
    let mut series = vec![energy_series(&traj)];

    for &eta in &etas {
        let windows: Vec<[f64; 2]> = if cfg.windows.is_empty() { vec![[eta + 1.0, eta + 5.0]] } else { cfg.windows.clone() };
        for [t1, t2] in windows {
            let rep = cone_flux(&traj, eta, t1, t2)?;
            let rel = rep.residual / e0;
            checks.push(Check::new(
                format!("flux[eta={eta},t=({t1},{t2})]"),
                rel <= tol,
                format!("residual/E = {rel:e} vs {tol:e}"),
            ));
            quantities.push(Quantity { name: format!("flux_residual[eta={eta},t=({t1},{t2})]"), value: rel, scale: 1.0 });
            fluxes.push(json!({ "eta": eta, "report": rep, "relative_residual": rel, "relative_budget": rep.budget / e0 }));
        }
        let h = cone_hardy_check(&traj, eta)?;
        checks.push(Check::new(
            format!("cone_hardy[eta={eta}]"),
            h.slack >= -1e-8 * e0,
            format!("slack/E = {:e}", h.slack / e0),
        ));
        hardy.push(h);

        let cone = traj.cone(eta).expect("cone sampled");
        let mut s = Series::new(format!("cone_eta_{eta}"), &["t", "w", "w_r", "w_t", "ball_energy"]);
        for i in 0..cone.t.len() {
            s.push(vec![cone.t[i], cone.w[i], cone.w_r[i], cone.w_t[i], cone.ball_energy[i]]);
        }
        series.push(s);
    }
    let drift = traj.energy_drift();
    quantities.push(Quantity { name: "energy_drift".into(), value: drift, scale: 1.0 });
    Ok(Outcome {
        result: json!({ "energy": e0, "energy_drift": drift, "flux": fluxes, "cone_hardy": hardy }),
        series,
        checks,
        quantities,
    })
}

pub(super) fn morawetz(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let traj = trajectory(cfg, &Sampling::states_only())?;
    let e0 = data_energy(&traj);
    let radii = if cfg.radius.is_empty() { vec![1.0, 2.0, 4.0] } else { cfg.radius.clone() };
    let base: Vec<[f64; 2]> = if cfg.windows.is_empty() { vec![[0.0, cfg.t_final]] } else { cfg.windows.clone() };
    let tol = cfg.tolerance.unwrap_or(1e-4);
    let mut checks = Vec::new();
    let mut quantities = Vec::new();
    let mut reports = Vec::new();
    let mut retarded = Vec::new();
    let mut table = Series::new("morawetz", &["radius", "t1", "t2", "lhs", "rhs", "slack", "identity_residual"]);

    for &r in &radii {
        let mut windows = base.clone();
        // Each radius is also checked from the retarded start when the backward run reaches it.
        if cfg.t_back >= r {
            windows.push([-r, cfg.t_final]);
        }
        for [t1, t2] in windows {
            let rep = morawetz_check(&traj, r, t1, t2)?;
            checks.push(Check::new(
                format!("morawetz[R={r},t=({t1},{t2})]"),
                rep.slack >= -tol * e0,
                format!("slack/E = {:e}", rep.slack / e0),
            ));
            quantities.push(Quantity {
                name: format!("morawetz_identity[R={r},t=({t1},{t2})]"),
                value: rep.identity_residual / e0,
                scale: 1.0,
            });
            table.push(vec![r, t1, t2, rep.lhs_total, rep.rhs, rep.slack, rep.identity_residual]);
            reports.push(rep);
        }
        if cfg.t_back >= r && cfg.t_final > r {
            let rep = retarded_energy_check(&traj, r, cfg.t_final)?;
            checks.push(Check::new(
                format!("retarded_energy[R={r}]"),
                rep.slack >= -tol * e0,
                format!("slack/E = {:e}", rep.slack / e0),
            ));
            retarded.push(rep);
        }
    }
    Ok(Outcome {
        result: json!({ "energy": e0, "morawetz": reports, "retarded_energy": retarded }),
        series: vec![table],
        checks,
        quantities,
    })
}

/// Sum of one to four Gaussians with random amplitude, centre and width.
fn random_field(rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    let count = rng.gen_range(1..=4);
    (0..count)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.0..6.0), rng.gen_range(0.3..2.0)))
        .collect()
}

pub(super) fn hardy(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let params = cfg.model()?;
    let grid = cfg.grid()?;
    let a = params.a;
    let radii = if cfg.radius.is_empty() { vec![0.5, 1.0, 2.0, 4.0] } else { cfg.radius.clone() };
    let samples = cfg.samples.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let fields: Vec<Vec<(f64, f64, f64)>> = (0..samples).map(|_| random_field(&mut rng)).collect();
    let zero = vec![0.0; grid.len()];

    let rows: Vec<Vec<HardyReport>> = fields
        .par_iter()
        .map(|bumps| {
            let u0 = grid.sample(|x| bumps.iter().map(|&(c, m, s)| c * (-((x - m) / s).powi(2)).exp()).sum());
            let st = from_physical(&u0, &zero, &grid);
            radii.iter().map(|&r| hardy_local(&st, &grid, r, a)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let s = sigma(params.d, a);
    let witnesses: Vec<HardyReport> = radii
        .iter()
        .map(|&r| {
            let u0 = grid.sample(|x| {
                let cut = if x <= r { 1.0 } else { (-(x - r) * (x - r)).exp() };
                if x == 0.0 { 0.0 } else { x.powf(-s) * cut }
            });
            hardy_local(&from_physical(&u0, &zero, &grid), &grid, r, a)
        })
        .collect::<Result<_, _>>()?;

    let mut table = Series::new("hardy", &["field", "radius", "f_r", "identity_value", "scale"]);
    let mut worst_identity = 0.0f64;
    let mut worst_sign = f64::INFINITY;
    for (i, reps) in rows.iter().enumerate() {
        for rep in reps {
            worst_identity = worst_identity.max(rep.residual / rep.scale);
            worst_sign = worst_sign.min(rep.f_r / rep.scale);
            table.push(vec![i as f64, rep.radius, rep.f_r, rep.identity_value, rep.scale]);
        }
    }
    let worst_witness = witnesses.iter().map(|w| w.f_r / w.scale).fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome {
        result: json!({
            "samples": samples,
            "radii": radii,
            "max_identity_residual": worst_identity,
            "min_form": worst_sign,
            "witness": witnesses,
            "max_witness_form": worst_witness,
            "first_field": to_value(&rows.first()),
        }),
        series: vec![table],
        checks: vec![
            Check::new("identity", worst_identity <= 1e-8, format!("max |f - identity|/scale = {worst_identity:e}")),
            Check::new("nonnegative", worst_sign >= -1e-10, format!("min f/scale = {worst_sign:e}")),
            Check::new("witness", worst_witness <= 1e-6, format!("max witness f/scale = {worst_witness:e}")),
        ],
        quantities: Vec::new(),
    })
}
