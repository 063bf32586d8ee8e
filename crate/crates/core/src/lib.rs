//! Numerical toolkit for evolutes, involutes and Bertrand-type mate
//! constructions of space curves and framed curves.
//!
//! The crate works on uniform parameter grids with 64-bit floats throughout.
//! Curves come either from an analytic catalog (exact jets to order 3) or
//! from sampled tables (finite-difference jets). Mate constructions that are
//! governed by linear ODE systems are integrated with fixed-step RK4 and the
//! moving frames are re-orthonormalized after every step.
//!
//! Strict pointwise conditions ("nonzero for all t") are realized as
//! thresholded checks at every grid node; all thresholds live in
//! [`config::Tolerances`].

pub mod config;
pub mod curvekit;
pub mod error;
pub mod evolute_involute;
pub mod framedkit;
pub mod frenet;
pub mod geom3;
pub mod mates;
pub mod odeint;
pub mod verify;

pub use config::Tolerances;
pub use error::Error;
pub use geom3::{Frame3, Vec3};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
