use serde::{Deserialize, Serialize};

use super::log_slope;
use crate::error::{Error, Result};
use crate::solver::{CharacteristicLine, CharacteristicTrace, Trajectory};

/// Variation of `w_t + w_r` along an incoming line, or of `w_t - w_r` along an outgoing one,
/// measured from `t1` and divided by the decay bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSeries {
    pub line: CharacteristicLine,
    pub t1: f64,
    pub beta: f64,
    pub t: Vec<f64>,
    pub residual: Vec<f64>,
    pub bound: Vec<f64>,
    pub ratio: Vec<f64>,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub tau: f64,
    pub t1: Vec<f64>,
    /// `sup_{t₂ > t₁} |(w_t - w_r)(t₂ - τ, t₂) - (w_t - w_r)(t₁ - τ, t₁)|`
    pub sup_variation: Vec<f64>,
    /// Fitted decay exponent in `t₁ - τ`; `None` with fewer than two usable points.
    pub exponent: Option<f64>,
    pub beta: f64,
}

fn trace_of(traj: &Trajectory, line: CharacteristicLine) -> Result<&CharacteristicTrace> {
    match traj.line(line) {
        Some(tr) if tr.t.len() >= 2 => Ok(tr),
        _ => Err(Error::LineNotSampled(format!("{line:?}"))),
    }
}

fn value_at(t: &[f64], v: &[f64], at: f64) -> Option<f64> {
    let i = t.partition_point(|&x| x < at);
    if i == t.len() {
        return None;
    }
    if i == 0 {
        return ((t[0] - at).abs() <= 1e-9 * (1.0 + at.abs())).then(|| v[0]);
    }
    let th = (at - t[i - 1]) / (t[i] - t[i - 1]);
    Some(v[i - 1] + th * (v[i] - v[i - 1]))
}

pub fn characteristic_variation(traj: &Trajectory, line: CharacteristicLine, t1: f64) -> Result<VariationSeries> {
    let trace = trace_of(traj, line)?;
    let beta = traj.config.params.derive().beta;
    let (values, end) = match line {
        CharacteristicLine::Incoming { s } => {
            if t1 >= s - 1.0 {
                return Err(Error::InvalidConfig(format!("incoming line s = {s} needs t1 < s - 1, got {t1}")));
            }
            (&trace.plus, s - 1.0)
        }
        CharacteristicLine::Outgoing { tau } => {
            if t1 <= tau + 1.0 {
                return Err(Error::InvalidConfig(format!("outgoing line tau = {tau} needs t1 > tau + 1, got {t1}")));
            }
            (&trace.minus, f64::INFINITY)
        }
    };
    let v1 = value_at(&trace.t, values, t1).ok_or_else(|| Error::LineNotSampled(format!("{line:?} at t = {t1}")))?;

    let mut out = VariationSeries {
        line,
        t1,
        beta,
        t: Vec::new(),
        residual: Vec::new(),
        bound: Vec::new(),
        ratio: Vec::new(),
        max_ratio: 0.0,
    };
    for (i, &t2) in trace.t.iter().enumerate() {
        if t2 <= t1 || t2 >= end {
            continue;
        }
        let residual = (values[i] - v1).abs();
        let bound = match line {
            CharacteristicLine::Incoming { s } => (s - t2).powf(-beta),
            CharacteristicLine::Outgoing { tau } => (t1 - tau).powf(-beta),
        };
        let ratio = residual / bound;
        out.max_ratio = out.max_ratio.max(ratio);
        out.t.push(t2);
        out.residual.push(residual);
        out.bound.push(bound);
        out.ratio.push(ratio);
    }
    Ok(out)
}

/// Decay of the outgoing-line variation in `t₁ - τ`, fitted over the given starting times.
pub fn variation_rate(traj: &Trajectory, tau: f64, t1_list: &[f64]) -> Result<RateFit> {
    let line = CharacteristicLine::Outgoing { tau };
    let mut t1s = Vec::new();
    let mut sup = Vec::new();
    for &t1 in t1_list {
        let series = characteristic_variation(traj, line, t1)?;
        t1s.push(t1);
        sup.push(series.residual.iter().fold(0.0f64, |m, &r| m.max(r)));
    }
    let x: Vec<f64> = t1s.iter().map(|t| t - tau).collect();
    Ok(RateFit {
        tau,
        t1: t1s,
        sup_variation: sup.clone(),
        exponent: log_slope(&x, &sup).map(|s| -s),
        beta: traj.config.params.derive().beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ModelParams;
    use crate::mesh::RadialGrid;
    use crate::solver::{evolve, FieldState, InitialData, Sampling, SolverConfig};

    fn run(cfg: SolverConfig, data: Option<InitialData>, lines: &[CharacteristicLine]) -> Trajectory {
        let s = data.map_or_else(|| FieldState::zero(&cfg.grid), |d| d.state(&cfg.params, &cfg.grid));
        evolve(&s, &cfg, &Sampling::default().with_lines(lines), &mut []).unwrap()
    }

    fn config(n: usize, t_final: f64) -> SolverConfig {
        let params = ModelParams::validate(3, 3.0, -0.2).unwrap();
        SolverConfig::new(params, RadialGrid::new(3, n, 24.0).unwrap(), 0.25, t_final).with_record_every(usize::MAX)
    }

    #[test]
    fn zero_solution_does_not_vary() {
        let line = CharacteristicLine::Incoming { s: 10.0 };
        let traj = run(config(400, 8.0), None, &[line]);
        let v = characteristic_variation(&traj, line, 2.0).unwrap();
        assert!(!v.t.is_empty());
        assert!(v.residual.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn free_wave_is_constant_on_incoming_lines() {
        let line = CharacteristicLine::Incoming { s: 5.5 };
        let data = InitialData::bump(1.0, 5.0, 1.5);
        let traj = run(config(2400, 7.0).free(), Some(data), &[line]);
        let v = characteristic_variation(&traj, line, 0.5).unwrap();
        let peak = traj.line(line).unwrap().plus.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(peak > 0.1);
        assert!(v.residual.iter().all(|&r| r < 5e-3 * peak), "{}", v.max_ratio);
    }

    #[test]
    fn missing_line_and_bad_window() {
        let line = CharacteristicLine::Outgoing { tau: 1.0 };
        let traj = run(config(200, 4.0), None, &[line]);
        assert!(matches!(
            characteristic_variation(&traj, CharacteristicLine::Incoming { s: 3.0 }, 1.0),
            Err(Error::LineNotSampled(_))
        ));
        assert!(characteristic_variation(&traj, line, 1.5).is_err());
        assert!(characteristic_variation(&traj, line, 2.5).is_ok());
    }

    #[test]
    fn outgoing_variation_decays() {
        let line = CharacteristicLine::Outgoing { tau: 0.0 };
        let traj = run(config(1600, 16.0), Some(InitialData::gaussian(1.0, 0.0, 1.0)), &[line]);
        let fit = variation_rate(&traj, 0.0, &[2.0, 4.0, 8.0]).unwrap();
        assert!(fit.sup_variation.windows(2).all(|w| w[1] < w[0]), "{fit:?}");
        assert!(fit.exponent.unwrap() > 0.0);
        assert_eq!(fit.beta, 0.25);
    }
}
