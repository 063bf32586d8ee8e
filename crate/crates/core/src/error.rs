//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while evaluating curves or building mates.
///
/// Errors that carry a parameter value name the first grid node at which the
/// violated condition was detected.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value encountered")]
    NonFinite,

    #[error("frame vectors are parallel within tolerance; cannot orthonormalize")]
    DegenerateFrame,

    #[error("parameter t = {0} is outside the curve domain")]
    OutOfDomain(f64),

    #[error("need at least {needed} uniform samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("sample parameters are not uniformly spaced")]
    NonUniformGrid,

    #[error("singular point: |γ̇| vanishes at t = {0}")]
    SingularPoint(f64),

    #[error("degenerate point: γ̇ × γ̈ vanishes at t = {0}")]
    DegeneratePoint(f64),

    #[error("ODE state became non-finite at t = {0}")]
    NonFiniteState(f64),

    #[error("frame violation: γ̇ not orthogonal to the frame at t = {0}")]
    FrameViolation(f64),

    #[error("torsion vanishes at t = {0}; construction requires τ ≠ 0")]
    TorsionVanishes(f64),

    #[error("mate speed factor h vanishes at t = {0}")]
    HVanishes(f64),

    #[error("coefficient η vanishes at t = {0}; construction requires η ≠ 0")]
    EtaVanishes(f64),

    #[error("1 − λκ vanishes at t = {0}; mate would be singular")]
    OsculatingDegeneracy(f64),

    #[error("Bishop coefficient m̄ vanishes at t = {0}")]
    MbarVanishes(f64),

    #[error("frame is not a Bishop frame: ℓ does not vanish on the grid")]
    NotBishop,

    #[error("frame degenerate: m² + n² vanishes at t = {0}")]
    FrameDegenerate(f64),

    #[error("{kind} condition infeasible at t = {t}")]
    ConditionInfeasible { kind: &'static str, t: f64 },

    #[error("{quantity} changes sign on the grid; a single sign case is required")]
    SignChange { quantity: &'static str },

    #[error("coefficients (λ, η) are identically zero on the grid")]
    ZeroCoefficients,

    #[error("unknown verification check: {0}")]
    UnknownCheck(String),

    #[error("unknown catalog curve: {0}")]
    UnknownCurve(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
