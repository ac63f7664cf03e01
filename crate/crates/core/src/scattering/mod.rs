//! Characteristic-line variation, radiation fields, free-wave comparators and
//! the energy-norm distances used to observe scattering.

mod characteristic;
mod comparator;
mod radiation;

pub use characteristic::{characteristic_variation, variation_rate, RateFit, VariationSeries};
pub use comparator::{
    band_check, cauchy_criterion, cauchy_series, exterior_scattering_check, free_comparator, BandPoint, BandReport,
    CauchyPoint, Comparator, ExteriorSeries, ScatteringReport,
};
pub use radiation::{
    extract_radiation, horizon_stability, radiation_built_state, radiation_residual, HorizonStability,
    RadiationHorizon, RadiationProfile,
};

use crate::mesh::{cell_integral_with, line_integral_with, RadialGrid};
use crate::solver::{to_physical, FieldState};

/// `‖(u - v, u_t - v_t)‖²_{Ḣ¹×L²}` restricted to `|x| > r_lo`, in physical variables:
/// cell differences for the gradient, trapezoid for the velocity.
pub fn energy_distance(a: &FieldState, b: &FieldState, grid: &RadialGrid, r_lo: f64) -> f64 {
    let diff = FieldState {
        t: a.t,
        w: a.w.iter().zip(&b.w).map(|(x, y)| x - y).collect(),
        wt: a.wt.iter().zip(&b.wt).map(|(x, y)| x - y).collect(),
    };
    let (u, ut) = to_physical(&diff, grid);
    let dr = grid.dr;
    let m = grid.d as i32 - 1;
    let grad = cell_integral_with(grid, r_lo, grid.r_max, |j| {
        let s = (u[j + 1] - u[j]) / dr;
        s * s * ((j as f64 + 0.5) * dr).powi(m)
    });
    let kin = line_integral_with(grid, r_lo, grid.r_max, |j| ut[j] * ut[j] * grid.r(j).powi(m));
    grid.c_d() * (grad + kin)
}

/// Least-squares slope of `ln y` against `ln x` over the pairs with both positive.
pub(crate) fn log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Every `factor`-th node of `state`, as a state on the coarser grid.
pub fn restrict(state: &FieldState, factor: usize) -> FieldState {
    FieldState {
        t: state.t,
        w: state.w.iter().step_by(factor).copied().collect(),
        wt: state.wt.iter().step_by(factor).copied().collect(),
    }
}
