//! Centralized numeric thresholds.
//!
//! Every strict condition ("κ > 0", "τ(t) ≠ 0 for all t", orthonormality)
//! becomes a thresholded check against one of the tolerances below, so the
//! numeric reading of the geometry lives in exactly one place.

/// Environment variable prefix for tolerance overrides.
pub const ENV_PREFIX: &str = "CURVEMATES_";

/// Numeric thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Unit-length and orthonormality tolerance for frames (`εᵤ`).
    pub unit: f64,
    /// Threshold standing in for strict pointwise conditions such as
    /// "τ(t) ≠ 0 at every node" (`tolᶜ`).
    pub cond: f64,
    /// Target RK4 step length. Integrations subdivide grid intervals so the
    /// effective step never exceeds this, keeping the h⁴ global error far
    /// below the 1e-6 residual budgets.
    pub max_rk4_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unit: 1e-10,
            cond: 1e-8,
            max_rk4_step: 1e-4,
        }
    }
}

impl Tolerances {
    /// Default tolerances with overrides from the environment:
    /// `CURVEMATES_TOL_UNIT`, `CURVEMATES_TOL_COND`, `CURVEMATES_MAX_RK4_STEP`.
    /// Unparseable values are ignored.
    pub fn from_env() -> Self {
        let mut tol = Tolerances::default();
        if let Some(v) = env_f64("TOL_UNIT") {
            tol.unit = v;
        }
        if let Some(v) = env_f64("TOL_COND") {
            tol.cond = v;
        }
        if let Some(v) = env_f64("MAX_RK4_STEP") {
            tol.max_rk4_step = v;
        }
        tol
    }
}

fn env_f64(name: &str) -> Option<f64> {
    std::env::var(format!("{ENV_PREFIX}{name}"))
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = Tolerances::default();
        assert_eq!(t.unit, 1e-10);
        assert_eq!(t.cond, 1e-8);
        assert_eq!(t.max_rk4_step, 1e-4);
    }
}
