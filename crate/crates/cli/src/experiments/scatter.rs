use rayon::prelude::*;
use serde_json::json;
use wavelab_core::functionals::{interior_energy_series, pointwise_envelopes, tail_decay_check};
use wavelab_core::scattering::{
    band_check, cauchy_series, exterior_scattering_check, extract_radiation, horizon_stability, variation_rate,
    Comparator, RadiationProfile, ScatteringReport,
};
use wavelab_core::solver::{radiation_free_d3, CharacteristicLine, Sampling, Trajectory};

use super::{data_energy, strictly_decreasing, to_value, trajectory, Check, Outcome, Quantity};
use crate::config::{DataSpec, Dynamics, ExperimentConfig};
use crate::error::CliError;
use crate::output::Series;

fn profile_of(cfg: &ExperimentConfig, traj: &Trajectory) -> Result<RadiationProfile, CliError> {
    let (solver, data) = cfg.solver()?;
    let etas = RadiationProfile::default_grid(data.support(), traj.t_end(), solver.grid.dr);
    Ok(extract_radiation(traj, &etas)?)
}

fn profile_series(profile: &RadiationProfile, exact: Option<&dyn Fn(f64) -> f64>) -> Series {
    let mut s = Series::new("g_plus", if exact.is_some() { &["eta", "g_plus", "g_exact"] } else { &["eta", "g_plus"] });
    for (&e, &g) in profile.eta.iter().zip(&profile.g_plus) {
        match exact {
            Some(f) => s.push(vec![e, g, f(e)]),
            None => s.push(vec![e, g]),
        }
    }
    s
}

pub(super) fn radiation(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let lines: Vec<CharacteristicLine> = cfg.tau.iter().map(|&tau| CharacteristicLine::Outgoing { tau }).collect();
    let traj = trajectory(cfg, &Sampling::default().with_lines(&lines))?;
    let profile = profile_of(cfg, &traj)?;
    let (solver, data) = cfg.solver()?;
    let t_end = traj.t_end();
    let mut checks = Vec::new();
    let mut quantities = Vec::new();

    let free_d3 = cfg.dynamics == Dynamics::Free && solver.params.d == 3 && cfg.t_back == 0.0;
    let exact = |e: f64| radiation_free_d3(&data, e);
    let oracle_error = free_d3.then(|| profile.l2_distance(exact));
    if let Some(err) = oracle_error {
        let tol = cfg.tolerance.unwrap_or(1e-3);
        checks.push(Check::new("oracle_l2", err <= tol, format!("{err:e} vs {tol:e}")));
        quantities.push(Quantity { name: "oracle_l2".into(), value: err, scale: profile.norm_sq.sqrt() });
    }

    let horizons = if cfg.times.is_empty() { vec![t_end / 8.0, t_end / 4.0, t_end / 2.0] } else { cfg.times.clone() };
    let stability = horizon_stability(&traj, &profile.eta, &horizons)?;
    if cfg.dynamics == Dynamics::Nonlinear {
        let beta = stability.beta;
        let ok = strictly_decreasing(&stability.diff_l2) && stability.exponent.is_some_and(|e| (e - beta).abs() <= 0.15);
        checks.push(Check::new(
            "horizon_stability",
            ok,
            format!("diffs {:?}, exponent {:?}, beta {beta}", stability.diff_l2, stability.exponent),
        ));
    }
    checks.push(Check::new("c_ratio_finite", profile.c_ratio.is_finite(), format!("C = {}", profile.c_ratio)));

    let mut rates = Vec::new();
    for &tau in &cfg.tau {
        let t1: Vec<f64> = [2.0, 4.0, 8.0, 16.0].iter().map(|s| tau + s).filter(|&t| t < t_end - 1.0).collect();
        rates.push(variation_rate(&traj, tau, &t1)?);
    }

    let mut stab = Series::new("horizon_stability", &["t", "diff_l2"]);
    for (t, d) in stability.t.iter().zip(&stability.diff_l2) {
        stab.push(vec![*t, *d]);
    }
    let horizon_summary: Vec<_> = profile.horizons.iter().map(|h| json!({ "t": h.t, "l2": h.l2 })).collect();
    Ok(Outcome {
        result: json!({
            "t_used": profile.t_used,
            "norm_sq": profile.norm_sq,
            "energy": profile.energy,
            "c_ratio": profile.c_ratio,
            "horizons": horizon_summary,
            "oracle_l2": oracle_error,
            "stability": stability,
            "variation_rates": rates,
        }),
        series: vec![profile_series(&profile, free_d3.then_some(&exact as &dyn Fn(f64) -> f64)), stab],
        checks,
        quantities,
    })
}

/// Value of `(t, v)` at the sample closest to each ladder time, with the times actually used.
fn on_ladder(t: &[f64], v: &[f64], ladder: &[f64]) -> (Vec<f64>, Vec<f64>) {
    ladder
        .iter()
        .filter_map(|&x| {
            let i = (0..t.len()).min_by(|&a, &b| (t[a] - x).abs().total_cmp(&(t[b] - x).abs()))?;
            Some((t[i], v[i]))
        })
        .unzip()
}

fn exterior(cfg: &ExperimentConfig, traj: &Trajectory, etas: &[f64]) -> Result<(ScatteringReport, Option<RadiationProfile>), CliError> {
    let d = traj.config.params.d;
    let profile = if d == 3 { Some(profile_of(cfg, traj)?) } else { None };
    let comparator = cfg.comparator.unwrap_or(if d == 3 {
        Comparator::RadiationBuilt
    } else {
        Comparator::MatchedData { t_match: traj.t_end() }
    });
    Ok((exterior_scattering_check(traj, etas, comparator, profile.as_ref())?, profile))
}

pub(super) fn scatter(cfg: &ExperimentConfig, linear: bool) -> Result<Outcome, CliError> {
    let mut cfg = cfg.clone();
    if linear {
        if cfg.dynamics == Dynamics::Free {
            return Err(CliError::ConfigInvalid {
                path: "dynamics".into(),
                message: "linear-scatter keeps the potential".into(),
            });
        }
        cfg.dynamics = Dynamics::Linear;
    }
    let traj = trajectory(&cfg, &Sampling::states_only())?;
    let t_end = traj.t_end();
    let etas = if cfg.eta.is_empty() { vec![1.0] } else { cfg.eta.clone() };
    let times = if cfg.times.is_empty() { vec![6.0, 12.0, 24.0] } else { cfg.times.clone() };
    let ladder: Vec<f64> = if cfg.ladder.is_empty() { vec![8.0, 12.0, 16.0, 20.0, 24.0] } else { cfg.ladder.clone() }
        .into_iter()
        .filter(|&t| t <= t_end + 1e-9)
        .collect();

    let (mut report, profile) = exterior(&cfg, &traj, &etas)?;
    report.cauchy = cauchy_series(&traj, &times)?;
    if let Some(p) = &profile {
        let c_list = if cfg.c.is_empty() { vec![0.5, 1.0, 2.0] } else { cfg.c.clone() };
        report.band = Some(band_check(&traj, p, &c_list, cfg.radius.first().copied().unwrap_or(1.0))?);
    }

    // Floor: change of the final exterior distance when the grid is halved.
    let coarse_cfg = cfg.coarsened()?;
    let coarse = trajectory(&coarse_cfg, &Sampling::states_only())?;
    let (coarse_report, _) = exterior(&coarse_cfg, &coarse, &etas[..1])?;
    let fine_final = *report.series[0].distance.last().unwrap_or(&f64::NAN);
    let coarse_final = *coarse_report.series[0].distance.last().unwrap_or(&f64::NAN);
    let floor = (fine_final - coarse_final).abs();

    let interior = interior_energy_series(&traj, 1.0)?;
    let (ladder_t, ladder_interior) = on_ladder(&interior.t, &interior.energy, &ladder);
    let ext0 = &report.series[0];
    let (_, ladder_exterior) = on_ladder(&ext0.t, &ext0.distance, &ladder);

    let cauchy: Vec<f64> = report.cauchy.iter().map(|c| c.distance).collect();
    let mut checks = vec![
        Check::new("exterior_decreasing", strictly_decreasing(&ladder_exterior), format!("{ladder_exterior:?}")),
        Check::new(
            "exterior_floor",
            fine_final <= 10.0 * floor,
            format!("final {fine_final:e}, floor {floor:e} (coarse {coarse_final:e})"),
        ),
        Check::new("cauchy_decreasing", strictly_decreasing(&cauchy), format!("{cauchy:?}")),
        Check::new("interior_decreasing", strictly_decreasing(&ladder_interior), format!("{ladder_interior:?}")),
    ];
    if let Some(b) = &report.band {
        checks.push(Check::new("band_proportional", b.spread <= 2.0, format!("spread {}", b.spread)));
    }

    let mut series = Vec::new();
    for s in &report.series {
        let name = match s.eta {
            Some(e) => format!("exterior_eta_{e}"),
            None => "distance_all_space".to_string(),
        };
        let mut out = Series::new(name, &["t", "distance"]);
        for (t, d) in s.t.iter().zip(&s.distance) {
            out.push(vec![*t, *d]);
        }
        series.push(out);
    }
    let mut ie = Series::new("interior_energy", &["t", "radius", "energy"]);
    for i in 0..interior.t.len() {
        ie.push(vec![interior.t[i], interior.radius[i], interior.energy[i]]);
    }
    series.push(ie);
    if let Some(p) = &profile {
        series.push(profile_series(p, None));
    }

    Ok(Outcome {
        result: json!({
            "energy": data_energy(&traj),
            "scattering": report,
            "floor": { "fine": fine_final, "coarse": coarse_final, "floor": floor },
            "ladder": { "t": ladder_t, "interior_energy": ladder_interior, "exterior_distance": ladder_exterior },
            "interior_estimates": interior.integral_estimates,
            "c_ratio": profile.as_ref().map(|p| p.c_ratio),
        }),
        series,
        checks,
        quantities: Vec::new(),
    })
}

fn decay_one(cfg: &ExperimentConfig) -> Result<serde_json::Value, CliError> {
    let traj = trajectory(cfg, &Sampling::states_only())?;
    let kappa_0 = traj.config.params.derive().kappa_0;
    let kappas = if cfg.kappa.is_empty() { vec![kappa_0] } else { cfg.kappa.clone() };
    let r_max = traj.config.grid.r_max;
    let radii = if cfg.radius.is_empty() { vec![r_max / 16.0, r_max / 8.0, r_max / 4.0] } else { cfg.radius.clone() };
    let tails = kappas.iter().map(|&k| tail_decay_check(&traj, k, &radii)).collect::<Result<Vec<_>, _>>()?;
    let envelopes: Vec<_> = traj
        .states
        .iter()
        .step_by((traj.states.len() / 16).max(1))
        .filter_map(|s| pointwise_envelopes(s, &traj.config).ok().map(|e| json!({ "t": s.t, "envelopes": e })))
        .collect();
    let interior = interior_energy_series(&traj, 1.0)?;
    Ok(json!({
        "energy": data_energy(&traj),
        "tail_decay": tails,
        "envelopes": envelopes,
        "interior_energy": { "t": interior.t, "energy": interior.energy },
    }))
}

pub(super) fn decay_sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let runs: Vec<ExperimentConfig> = if cfg.epsilon.is_empty() {
        vec![cfg.clone()]
    } else {
        cfg.epsilon
            .iter()
            .map(|&epsilon| ExperimentConfig { data: Some(DataSpec::PolynomialTail { epsilon }), ..cfg.clone() })
            .collect()
    };
    let results: Vec<serde_json::Value> = runs.par_iter().map(decay_one).collect::<Result<_, _>>()?;

    let mut table = Series::new("tail_decay", &["run", "kappa", "r", "max_energy_ratio", "max_pointwise_ratio"]);
    let mut checks = Vec::new();
    for (i, res) in results.iter().enumerate() {
        for tail in res["tail_decay"].as_array().into_iter().flatten() {
            let kappa = tail["kappa"].as_f64().unwrap_or(f64::NAN);
            let mut worst = 0.0f64;
            for row in tail["rows"].as_array().into_iter().flatten() {
                let ratio = row["max_energy_ratio"].as_f64().unwrap_or(f64::NAN);
                let point = row["max_pointwise_ratio"].as_f64().unwrap_or(f64::NAN);
                worst = worst.max(ratio).max(point);
                table.push(vec![i as f64, kappa, row["r"].as_f64().unwrap_or(f64::NAN), ratio, point]);
            }
            checks.push(Check::new(format!("tail_bounded[run={i},kappa={kappa}]"), worst.is_finite(), format!("max ratio {worst}")));
        }
    }
    Ok(Outcome {
        result: json!({ "runs": to_value(&runs.iter().map(|r| r.data).collect::<Vec<_>>()), "results": results }),
        series: vec![table],
        checks,
        quantities: Vec::new(),
    })
}
