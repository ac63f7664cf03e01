//! Shared fixtures for the kernel benchmarks.

use wavelab_core::solver::{FieldState, InitialData, SolverConfig};
use wavelab_core::{ModelParams, RadialGrid};

/// Reference model `d = 3, p = 3, a = -0.2` on `[0, 40]` with `n` cells.
pub fn reference_config(n: usize) -> SolverConfig {
    let params = ModelParams::validate(3, 3.0, -0.2).expect("reference parameters are valid");
    let grid = RadialGrid::new(3, n, 40.0).expect("reference grid is valid");
    SolverConfig::new(params, grid, 0.25, 1.0)
}

/// Gaussian `u0 = e^{-r²}`, `u1 = 0` lifted onto the grid of `config`.
pub fn reference_state(config: &SolverConfig) -> FieldState {
    InitialData::gaussian(1.0, 0.0, 1.0).state(&config.params, &config.grid)
}
