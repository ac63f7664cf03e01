use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{execute, log_slope, Check, Outcome};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Series;

const EXPECTED_ORDER: f64 = 2.0;
const ORDER_BAND: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
struct OrderFit {
    name: String,
    values: Vec<f64>,
    /// `log₂(e_k / e_{k+1})` for consecutive levels.
    orders: Vec<f64>,
    fitted_order: Option<f64>,
    /// Set when the finest value sits at round-off and is left out of the order checks.
    round_off: bool,
}

pub(super) fn converge(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let levels = cfg.levels.unwrap_or(3);
    if levels < 3 {
        return Err(CliError::ConfigInvalid { path: "levels".into(), message: format!("need at least 3, got {levels}") });
    }
    let base = cfg.base.clone().unwrap_or_else(|| "simulate".into());
    if base == "converge" {
        return Err(CliError::ConfigInvalid { path: "base".into(), message: "converge cannot nest".into() });
    }
    let configs: Vec<ExperimentConfig> = (0..levels)
        .map(|k| {
            let mut c = cfg.refined(1 << k)?;
            c.experiment = None;
            Ok(c)
        })
        .collect::<Result<_, CliError>>()?;
    let outcomes: Vec<Outcome> = configs.par_iter().map(|c| execute(&base, c)).collect::<Result<_, _>>()?;

    let drs: Vec<f64> = configs.iter().map(|c| c.grid().map(|g| g.dr)).collect::<Result<_, _>>()?;
    let mut fits = Vec::new();
    for q in &outcomes[0].quantities {
        let values: Vec<f64> = outcomes
            .iter()
            .map(|o| o.quantities.iter().find(|x| x.name == q.name).map_or(f64::NAN, |x| x.value))
            .collect();
        let orders = values.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        let finest = outcomes[levels - 1].quantities.iter().find(|x| x.name == q.name);
        let round_off = finest.is_some_and(|x| x.value.abs() <= 1e-12 * x.scale);
        fits.push(OrderFit {
            name: q.name.clone(),
            fitted_order: log_slope(&drs, &values),
            values,
            orders,
            round_off,
        });
    }

    let mut checks: Vec<Check> = fits
        .iter()
        .filter(|f| !f.round_off)
        .map(|f| {
            let ok = f.fitted_order.is_some_and(|p| (p - EXPECTED_ORDER).abs() <= ORDER_BAND);
            Check::new(format!("order[{}]", f.name), ok, format!("fitted {:?}, pairwise {:?}", f.fitted_order, f.orders))
        })
        .collect();
    let finest = &outcomes[levels - 1];
    checks.extend(finest.checks.iter().map(|c| Check::new(format!("finest:{}", c.name), c.passed, c.detail.clone())));

    let mut table = Series::new("orders", &["level", "dr"]);
    table.columns.extend(fits.iter().map(|f| f.name.clone()));
    for (k, dr) in drs.iter().enumerate() {
        let mut row = vec![k as f64, *dr];
        row.extend(fits.iter().map(|f| f.values[k]));
        table.push(row);
    }
    let mut series = vec![table];
    series.extend(finest.series.iter().cloned());
    Ok(Outcome {
        result: json!({
            "base": base,
            "levels": levels,
            "dr": drs,
            "quantities": fits,
            "finest": finest.result,
        }),
        series,
        checks,
        quantities: Vec::new(),
    })
}
