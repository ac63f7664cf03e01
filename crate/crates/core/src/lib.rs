//! Radial semilinear wave equation with an inverse-square potential: solver,
//! conserved and monotone functionals, and scattering diagnostics.

pub mod error;
pub mod exponents;
pub mod functionals;
pub mod mesh;
pub mod scattering;
pub mod solver;

pub use error::{Error, Result};
pub use exponents::{DerivedConstants, ModelParams};
pub use mesh::{ConeSection, RadialGrid};
pub use solver::{
    evolve, evolve_two_sided, CharacteristicLine, FieldState, InitialData, Profile, Sampling, SolverConfig, Trajectory,
};
