use serde::{Deserialize, Serialize};

use super::{from_physical, FieldState};
use crate::exponents::ModelParams;
use crate::mesh::RadialGrid;

/// Radial profile of one initial datum in physical variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// `A·exp(-((r - r0)/s)²)`
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// `A·exp(-1/(1 - ((r - r0)/s)²))` on `|r - r0| < s`, zero outside.
    Bump { amplitude: f64, center: f64, width: f64 },
    /// `(1 + r)^{-exponent}` multiplied by a smooth step that vanishes beyond `cutoff`.
    PowerTail { exponent: f64, cutoff: f64, ramp: f64 },
}

/// Relative amplitude below which a Gaussian counts as vanished.
const GAUSSIAN_FLOOR: f64 = 36.0;

fn bump_core(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    let f = |y: f64| if y <= 0.0 { 0.0 } else { (-1.0 / y).exp() };
    let (a, b) = (f(x), f(1.0 - x));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

impl Profile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { amplitude, center, width } => {
                let x = (r - center) / width;
                amplitude * (-x * x).exp()
            }
            Profile::Bump { amplitude, center, width } => amplitude * bump_core((r - center) / width),
            Profile::PowerTail { exponent, cutoff, ramp } => {
                (1.0 + r).powf(-exponent) * smooth_step((cutoff - r) / ramp)
            }
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { amplitude, center, width } => {
                let x = (r - center) / width;
                -2.0 * x / width * amplitude * (-x * x).exp()
            }
            _ => self.numeric(r, 1),
        }
    }

    pub fn second_derivative(&self, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { amplitude, center, width } => {
                let x = (r - center) / width;
                (4.0 * x * x - 2.0) / (width * width) * amplitude * (-x * x).exp()
            }
            _ => self.numeric(r, 2),
        }
    }

    fn numeric(&self, r: f64, order: u8) -> f64 {
        let h = 1e-3;
        let f = |k: f64| self.value(r + k * h);
        match order {
            1 => (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h),
            _ => (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0)) / (12.0 * h * h),
        }
    }

    /// Radius beyond which the profile is zero, or below `e^{-36}` of its amplitude.
    pub fn support(&self) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { center, width, .. } => center.max(0.0) + width.abs() * GAUSSIAN_FLOOR.sqrt(),
            Profile::Bump { center, width, .. } => (center + width.abs()).max(0.0),
            Profile::PowerTail { cutoff, .. } => cutoff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub u0: Profile,
    #[serde(default = "zero_profile")]
    pub u1: Profile,
}

fn zero_profile() -> Profile {
    Profile::Zero
}

impl InitialData {
    pub fn new(u0: Profile, u1: Profile) -> Self {
        Self { u0, u1 }
    }

    pub fn zero() -> Self {
        Self::new(Profile::Zero, Profile::Zero)
    }

    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Self {
        Self::new(Profile::Gaussian { amplitude, center, width }, Profile::Zero)
    }

    pub fn bump(amplitude: f64, center: f64, width: f64) -> Self {
        Self::new(Profile::Bump { amplitude, center, width }, Profile::Zero)
    }

    /// `u0 = (1 + r)^{-q}` with `q = 2(p + d + 1)/(p + 1)² + ε`, `u1 = 0`,
    /// cut off smoothly so that it vanishes from `r_max/2` on.
    pub fn polynomial_tail(params: &ModelParams, epsilon: f64, r_max: f64) -> Self {
        let cutoff = r_max / 2.0;
        Self::new(
            Profile::PowerTail {
                exponent: tail_exponent(params, epsilon),
                cutoff,
                ramp: cutoff / 5.0,
            },
            Profile::Zero,
        )
    }

    pub fn support(&self) -> f64 {
        self.u0.support().max(self.u1.support())
    }

    /// Samples both profiles and lifts them to the reduced field at `t = 0`.
    pub fn state(&self, params: &ModelParams, grid: &RadialGrid) -> FieldState {
        debug_assert_eq!(params.d, grid.d);
        let u0 = grid.sample(|r| self.u0.value(r));
        let u1 = grid.sample(|r| self.u1.value(r));
        from_physical(&u0, &u1, grid)
    }
}

/// `2(p + d + 1)/(p + 1)² + ε`
pub fn tail_exponent(params: &ModelParams, epsilon: f64) -> f64 {
    let (d, p) = (params.d as f64, params.p);
    2.0 * (p + d + 1.0) / ((p + 1.0) * (p + 1.0)) + epsilon
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tail_exponent_d3_p3() {
        let params = ModelParams::validate(3, 3.0, -0.2).unwrap();
        assert_relative_eq!(tail_exponent(&params, 0.0), 0.875, epsilon = 1e-15);
        assert_relative_eq!(tail_exponent(&params, 0.1), 0.975, epsilon = 1e-15);
    }

    #[test]
    fn polynomial_tail_vanishes_past_half_radius() {
        let params = ModelParams::validate(3, 3.0, -0.2).unwrap();
        let data = InitialData::polynomial_tail(&params, 0.1, 60.0);
        assert_eq!(data.u0.value(30.0), 0.0);
        assert_eq!(data.u0.value(45.0), 0.0);
        assert_relative_eq!(data.u0.value(5.0), 6f64.powf(-0.975), max_relative = 1e-15);
        assert_eq!(data.support(), 30.0);
    }

    #[test]
    fn profile_derivatives() {
        let g = Profile::Gaussian { amplitude: 1.5, center: 0.5, width: 0.8 };
        for &r in &[0.0, 0.3, 1.7] {
            assert_relative_eq!(g.derivative(r), g.numeric(r, 1), epsilon = 1e-9);
            assert_relative_eq!(g.second_derivative(r), g.numeric(r, 2), epsilon = 1e-6);
        }
    }

    #[test]
    fn bump_is_compact() {
        let b = Profile::Bump { amplitude: 2.0, center: 3.0, width: 1.0 };
        assert_eq!(b.value(1.99), 0.0);
        assert_eq!(b.value(4.0), 0.0);
        assert_relative_eq!(b.value(3.0), 2.0 * (-1f64).exp(), max_relative = 1e-15);
        assert_eq!(b.support(), 4.0);
    }

    #[test]
    fn serde_round_trip() {
        let data = InitialData::gaussian(1.0, 0.0, 1.0);
        let json = serde_json::to_string(&data).unwrap();
        let back: InitialData = serde_json::from_str(&json).unwrap();
        assert_eq!(back, data);
        let short: InitialData =
            serde_json::from_str(r#"{"u0": {"family": "bump", "amplitude": 1, "center": 2, "width": 0.5}}"#).unwrap();
        assert_eq!(short.u1, Profile::Zero);
        assert!(serde_json::from_str::<InitialData>(r#"{"u0": {"family": "zero"}, "u2": 1}"#).is_err());
    }
}
