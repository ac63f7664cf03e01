//! Parameter algebra for the model `u_tt - Δu + a u/|x|² = -|u|^{p-1} u` in
//! dimension `d`: validation of `(d, p, a)`, every derived exponent and
//! constant, and the Strichartz admissibility decision procedure.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_DIM: u32 = 3;
pub const MAX_DIM: u32 = 6;

/// Distance to a window endpoint below which admissibility reports a note.
pub const ENDPOINT_NOTE_TOL: f64 = 1e-9;

/// Validated model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: u32,
    pub p: f64,
    pub a: f64,
}

/// Conformal exponent `1 + 4/(d-1)`.
pub fn p_conf(d: u32) -> f64 {
    1.0 + 4.0 / (d as f64 - 1.0)
}

/// Energy-critical exponent `1 + 4/(d-2)`.
pub fn p_energy(d: u32) -> f64 {
    1.0 + 4.0 / (d as f64 - 2.0)
}

/// Lower bound on `a` required for the Strichartz theory:
/// `-(d-2)²/4 + (((d-2)p - d) / (2p))²`.
pub fn a_min(d: u32, p: f64) -> f64 {
    let df = d as f64;
    let shift = ((df - 2.0) * p - df) / (2.0 * p);
    -(df - 2.0).powi(2) / 4.0 + shift * shift
}

/// `σ = (d-2)/2 - sqrt(((d-2)/2)² + a)`, the exponent of the local Hardy form.
pub fn sigma(d: u32, a: f64) -> f64 {
    let half = (d as f64 - 2.0) / 2.0;
    half - (half * half + a).sqrt()
}

/// Surface area of the unit sphere in `R^d`, `2 π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: u32) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d)
}

/// `Γ(d/2)` for a positive integer `d`, by the half-integer recursion.
fn gamma_half_integer(d: u32) -> f64 {
    let (mut value, mut x) = if d % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = d as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

impl ModelParams {
    /// Checks `3 ≤ d ≤ 6`, `p_conf ≤ p < p_e` and `a > a_min(d, p)` in that order.
    pub fn validate(d: u32, p: f64, a: f64) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&d) {
            return Err(Error::DimensionOutOfRange {
                d,
                min: MIN_DIM,
                max: MAX_DIM,
            });
        }
        let (lower, upper) = (p_conf(d), p_energy(d));
        if !(p >= lower && p < upper) {
            return Err(Error::ExponentOutOfRange { p, lower, upper });
        }
        let threshold = a_min(d, p);
        if !(a > threshold) {
            return Err(Error::PotentialBelowThreshold { a, threshold });
        }
        Ok(Self { d, p, a })
    }

    /// Same parameters with the potential switched off (`a = 0`). Always valid.
    pub fn free(&self) -> Self {
        Self { a: 0.0, ..*self }
    }

    pub fn derive(&self) -> DerivedConstants {
        DerivedConstants::from_params(self)
    }
}

/// Every closed-form constant attached to a parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Critical regularity `d/2 - 2/(p-1)`.
    pub s_p: f64,
    pub sigma: f64,
    /// `(d-1)(d-3)/4`, the centrifugal coefficient of the reduced field.
    pub lambda_d: f64,
    /// `(d²-1)/4`.
    pub mu_d: f64,
    /// Minimal weight exponent `((d+2) - (d-2)p)/(p+1)`.
    pub kappa_0: f64,
    /// Characteristic decay rate `((d-1)(p-1) - 2)/(2(p+1))`.
    pub beta: f64,
    pub a_min: f64,
    /// Unit-sphere surface area.
    pub c_d: f64,
    /// Sharp Hardy constant `(d-2)²/4`.
    pub hardy_const: f64,
}

impl DerivedConstants {
    pub fn from_params(params: &ModelParams) -> Self {
        let ModelParams { d, p, a } = *params;
        let df = d as f64;
        Self {
            s_p: df / 2.0 - 2.0 / (p - 1.0),
            sigma: sigma(d, a),
            lambda_d: (df - 1.0) * (df - 3.0) / 4.0,
            mu_d: (df * df - 1.0) / 4.0,
            kappa_0: ((df + 2.0) - (df - 2.0) * p) / (p + 1.0),
            beta: ((df - 1.0) * (p - 1.0) - 2.0) / (2.0 * (p + 1.0)),
            a_min: a_min(d, p),
            c_d: sphere_area(d),
            hardy_const: (df - 2.0).powi(2) / 4.0,
        }
    }
}

/// A Lebesgue exponent that may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Infinite(InfiniteTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfiniteTag {
    #[serde(rename = "inf")]
    Inf,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent::Infinite(InfiniteTag::Inf);

    /// `1/q`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(q) => 1.0 / q,
            Exponent::Infinite(_) => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite(_))
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(q) => q,
            Exponent::Infinite(_) => f64::INFINITY,
        }
    }
}

impl From<f64> for Exponent {
    fn from(q: f64) -> Self {
        if q.is_infinite() && q > 0.0 {
            Exponent::INFINITY
        } else {
            Exponent::Finite(q)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinite(_) => write!(f, "inf"),
        }
    }
}

/// Time exponent, space exponent and regularity of a Strichartz norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzTriple {
    pub q: Exponent,
    pub r: Exponent,
    pub gamma: f64,
}

impl StrichartzTriple {
    /// Residual of `1/q + d/r = d/2 - γ`.
    pub fn scaling_residual(&self, d: u32) -> f64 {
        let df = d as f64;
        self.q.reciprocal() + df * self.r.reciprocal() - (df / 2.0 - self.gamma)
    }
}

/// The triple `(2p/((d-2)p - d), 2p, 1)` used for the nonlinearity; `q = ∞`
/// exactly when `(d-2)p = d`.
pub fn nonlinearity_triple(d: u32, p: f64) -> StrichartzTriple {
    let df = d as f64;
    let denom = (df - 2.0) * p - df;
    let q = if denom == 0.0 {
        Exponent::INFINITY
    } else {
        Exponent::Finite(2.0 * p / denom)
    };
    StrichartzTriple {
        q,
        r: Exponent::Finite(2.0 * p),
        gamma: 1.0,
    }
}

/// Open interval of admissible regularities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaWindow {
    pub lower: f64,
    pub upper: f64,
}

/// The `γ` window, with the `d = 3` and `d ≥ 4` branches written out separately.
pub fn gamma_window(d: u32, q: Exponent, a: f64) -> GammaWindow {
    let inv_q = q.reciprocal();
    if d == 3 {
        let s94 = (a + 9.0 / 4.0).sqrt();
        let s14 = (a + 0.25).sqrt();
        GammaWindow {
            lower: -(1.0f64).min(s94 - 0.5).min(s14 + 1.0),
            upper: (2.0f64).min(s94 + 0.5).min(s14 + 1.0 - inv_q),
        }
    } else {
        let df = d as f64;
        let shift = (df + 3.0) / (2.0 * (df - 1.0));
        let s_d = (a + df * df / 4.0).sqrt();
        let s_dm2 = (a + (df - 2.0).powi(2) / 4.0).sqrt();
        GammaWindow {
            lower: -(df / 2.0 - shift).min(s_d - shift).min(s_dm2 + 1.0),
            upper: ((df + 1.0) / 2.0).min(s_d + 0.5).min(s_dm2 + 1.0 - inv_q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub violations: Vec<String>,
    pub window: GammaWindow,
    /// Conditions satisfied or violated within [`ENDPOINT_NOTE_TOL`] of equality.
    pub endpoint_notes: Vec<String>,
}

const SCALING_TOL: f64 = 1e-12;

/// Decides whether `(q, r, γ)` is admissible for the propagator of
/// `-Δ + a/|x|²` in dimension `d`.
pub fn strichartz_admissible(d: u32, q: Exponent, r: Exponent, gamma: f64, a: f64) -> Admissibility {
    let df = d as f64;
    let mut violations = Vec::new();
    let mut notes = Vec::new();

    if let Exponent::Finite(qv) = q {
        if qv < 2.0 {
            violations.push(format!("q = {qv} < 2"));
        }
    }
    match r {
        Exponent::Infinite(_) => violations.push("r must be finite".to_string()),
        Exponent::Finite(rv) if rv < 2.0 => violations.push(format!("r = {rv} < 2")),
        _ => {}
    }
    if d == 3 {
        let strict = match q {
            Exponent::Finite(qv) => qv > 2.0,
            Exponent::Infinite(_) => true,
        };
        if !strict {
            violations.push("q>2 required when d=3".to_string());
        }
    }

    let lhs = q.reciprocal() + (df - 1.0) / 2.0 * r.reciprocal();
    let rhs = (df - 1.0) / 4.0;
    if lhs > rhs {
        violations.push(format!("1/q + (d-1)/(2r) = {lhs} exceeds (d-1)/4 = {rhs}"));
    }
    if (lhs - rhs).abs() < ENDPOINT_NOTE_TOL {
        notes.push("admissibility holds with equality".to_string());
    }

    let triple = StrichartzTriple { q, r, gamma };
    let scaling = triple.scaling_residual(d);
    if scaling.abs() > SCALING_TOL {
        violations.push(format!("scaling relation off by {scaling}"));
    }

    let window = gamma_window(d, q, a);
    if !(gamma > window.lower) {
        violations.push(format!("gamma = {gamma} not above {}", window.lower));
    }
    if !(gamma < window.upper) {
        violations.push(format!("gamma = {gamma} not below {}", window.upper));
    }
    if (gamma - window.lower).abs() < ENDPOINT_NOTE_TOL {
        notes.push(format!("gamma within {ENDPOINT_NOTE_TOL:e} of lower endpoint"));
    }
    if (gamma - window.upper).abs() < ENDPOINT_NOTE_TOL {
        notes.push(format!("gamma within {ENDPOINT_NOTE_TOL:e} of upper endpoint"));
    }

    Admissibility {
        admissible: violations.is_empty(),
        violations,
        window,
        endpoint_notes: notes,
    }
}
