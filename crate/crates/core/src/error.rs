use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension d = {d} outside [{min}, {max}]")]
    DimensionOutOfRange { d: u32, min: u32, max: u32 },

    #[error("exponent p = {p} outside [{lower}, {upper})")]
    ExponentOutOfRange { p: f64, lower: f64, upper: f64 },

    #[error("potential coefficient a = {a} must exceed {threshold}")]
    PotentialBelowThreshold { a: f64, threshold: f64 },

    #[error("range [{lo}, {hi}] is outside the grid [0, {r_max}]")]
    RangeOutsideGrid { lo: f64, hi: f64, r_max: f64 },

    #[error("energy grew by a factor {growth} in one step at t = {t}")]
    StabilityViolation { t: f64, growth: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("no cone samples recorded for eta = {eta}")]
    ConeNotSampled { eta: f64 },

    #[error("no characteristic samples recorded for {0}")]
    LineNotSampled(String),

    #[error("field is identically zero")]
    ZeroField,

    #[error("trajectory horizon {t_final} too short for eta up to {eta_max}")]
    InsufficientHorizon { t_final: f64, eta_max: f64 },

    #[error("time window [{t1}, {t2}] not covered by the trajectory [{t_start}, {t_end}]")]
    WindowOutsideTrajectory {
        t1: f64,
        t2: f64,
        t_start: f64,
        t_end: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
