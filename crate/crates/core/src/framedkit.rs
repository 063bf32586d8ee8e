//! Framed curves (γ, ν₁, ν₂): curvature quadruple (ℓ, m, n, α),
//! reconstruction from curvature data, rotated frames and Bishop frames,
//! frame sign/order transforms, and singular-point scans.
//!
//! A framed curve pairs a (possibly singular) curve with two unit orthogonal
//! normal fields; μ = ν₁ × ν₂ plays the tangent role and γ̇ = αμ, so the
//! zeros of α are exactly the singular points of γ.

use std::io::BufRead;
use std::sync::Arc;

use crate::curvekit::{
    fd_derivative, fd_second_derivative, read_csv_rows, FdAccuracy, SampleGrid, ScalarTable,
};
use crate::geom3::{orthonormalize, OrthoPair, Vec3};
use crate::odeint::{rk4_solve_projected, VectorField};
use crate::{Error, Result, Tolerances};

/// A framed curve evaluated at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramedState {
    pub t: f64,
    pub gamma: Vec3,
    pub nu1: Vec3,
    pub nu2: Vec3,
    /// μ = ν₁ × ν₂
    pub mu: Vec3,
}

impl FramedState {
    pub fn new(t: f64, gamma: Vec3, nu1: Vec3, nu2: Vec3) -> Self {
        FramedState {
            t,
            gamma,
            nu1,
            nu2,
            mu: nu1.cross(nu2),
        }
    }

    /// Checks the frame invariants: (ν₁, ν₂) orthonormal within `tol.unit`.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        OrthoPair::new(self.nu1, self.nu2, tol)?;
        Ok(())
    }
}

/// First derivatives of the framed-curve data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramedDerivs {
    pub gamma_dot: Vec3,
    pub nu1_dot: Vec3,
    pub nu2_dot: Vec3,
}

/// The curvature quadruple of a framed curve:
/// ℓ = ν̇₁·ν₂, m = ν̇₁·μ, n = ν̇₂·μ, α = γ̇·μ.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FramedCurvature {
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub alpha: f64,
}

/// Evaluation interface behind [`FramedCurveSource`].
pub trait FramedEval: Send + Sync {
    fn state(&self, t: f64) -> Result<FramedState>;
    fn derivs(&self, t: f64) -> Result<FramedDerivs>;
    fn domain(&self) -> Option<(f64, f64)> {
        None
    }
}

/// A framed curve, analytic or table-backed. Cheap to clone.
#[derive(Clone)]
pub struct FramedCurveSource {
    eval: Arc<dyn FramedEval>,
}

impl std::fmt::Debug for FramedCurveSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FramedCurveSource").finish_non_exhaustive()
    }
}

impl FramedCurveSource {
    pub fn new(eval: impl FramedEval + 'static) -> Self {
        FramedCurveSource {
            eval: Arc::new(eval),
        }
    }

    pub fn state(&self, t: f64) -> Result<FramedState> {
        self.eval.state(t)
    }

    pub fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        self.eval.derivs(t)
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.eval.domain()
    }

    /// Resolves a catalog name. `params` are positional and curve-specific.
    pub fn by_name(name: &str, params: &[f64]) -> Result<Self> {
        let p = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        match name {
            "framed-astroid" => Ok(FramedCurveSource::new(FramedAstroid {
                a: p(0, 28.0 / 3.0),
                b: p(1, -21.0 / 4.0),
            })),
            "framed-circle" => Ok(FramedCurveSource::new(FramedCircle)),
            "framed-rotator" => Ok(FramedCurveSource::new(FramedRotator)),
            other => Err(Error::UnknownCurve(other.to_string())),
        }
    }

    /// Names available through [`FramedCurveSource::by_name`].
    pub fn catalog_names() -> &'static [&'static str] {
        &["framed-astroid", "framed-circle", "framed-rotator"]
    }

    /// Table-backed framed curve from per-node states (uniform parameters).
    pub fn from_states(states: Vec<FramedState>) -> Result<Self> {
        Ok(FramedCurveSource::new(TableFramed::from_states(states)?))
    }

    /// Reads a `t,gx,gy,gz,n1x,n1y,n1z,n2x,n2y,n2z` CSV table.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let header = [
            "t", "gx", "gy", "gz", "n1x", "n1y", "n1z", "n2x", "n2y", "n2z",
        ];
        let (ts, rows) = read_csv_rows(reader, &header)?;
        let states = ts
            .iter()
            .zip(&rows)
            .map(|(&t, r)| {
                FramedState::new(
                    t,
                    Vec3::new(r[0], r[1], r[2]),
                    Vec3::new(r[3], r[4], r[5]),
                    Vec3::new(r[6], r[7], r[8]),
                )
            })
            .collect();
        FramedCurveSource::from_states(states)
    }

    /// The frame transform (ν₁, ν₂) → (ν₂, ν₁); flips μ, maps the curvature
    /// to (−ℓ, −n, −m, −α).
    pub fn swap_normals(&self) -> Self {
        FramedCurveSource::new(SwapNormals {
            inner: self.clone(),
        })
    }

    /// ν₁ → −ν₁; flips μ, maps the curvature to (−ℓ, m, −n, −α).
    pub fn negate_nu1(&self) -> Self {
        FramedCurveSource::new(NegateNormal {
            inner: self.clone(),
            first: true,
        })
    }

    /// ν₂ → −ν₂; flips μ, maps the curvature to (−ℓ, −m, n, −α).
    pub fn negate_nu2(&self) -> Self {
        FramedCurveSource::new(NegateNormal {
            inner: self.clone(),
            first: false,
        })
    }
}

/// (a cos³t, a sin³t, b cos 2t) with the constant-inclination frame.
struct FramedAstroid {
    a: f64,
    b: f64,
}

impl FramedEval for FramedAstroid {
    fn state(&self, t: f64) -> Result<FramedState> {
        let (s, c) = t.sin_cos();
        let k = (9.0 * self.a * self.a + 16.0 * self.b * self.b).sqrt();
        let gamma = Vec3::new(
            self.a * c * c * c,
            self.a * s * s * s,
            self.b * (2.0 * t).cos(),
        );
        let nu1 = Vec3::new(-s, -c, 0.0);
        let nu2 = Vec3::new(-4.0 * self.b * c, 4.0 * self.b * s, 3.0 * self.a) / k;
        Ok(FramedState::new(t, gamma, nu1, nu2))
    }

    fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        let (s, c) = t.sin_cos();
        let k = (9.0 * self.a * self.a + 16.0 * self.b * self.b).sqrt();
        Ok(FramedDerivs {
            gamma_dot: Vec3::new(
                -3.0 * self.a * c * c * s,
                3.0 * self.a * s * s * c,
                -2.0 * self.b * (2.0 * t).sin(),
            ),
            nu1_dot: Vec3::new(-c, s, 0.0),
            nu2_dot: Vec3::new(4.0 * self.b * s, 4.0 * self.b * c, 0.0) / k,
        })
    }
}

/// Unit circle with ν₁ the vertical direction and ν₂ the radial direction;
/// curvature (0, 0, 1, 1).
struct FramedCircle;

impl FramedEval for FramedCircle {
    fn state(&self, t: f64) -> Result<FramedState> {
        let (s, c) = t.sin_cos();
        Ok(FramedState::new(
            t,
            Vec3::new(c, s, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(c, s, 0.0),
        ))
    }

    fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        let (s, c) = t.sin_cos();
        Ok(FramedDerivs {
            gamma_dot: Vec3::new(-s, c, 0.0),
            nu1_dot: Vec3::ZERO,
            nu2_dot: Vec3::new(-s, c, 0.0),
        })
    }
}

/// Constant curve with a rotating frame: everywhere singular (α ≡ 0), ℓ = 1.
struct FramedRotator;

impl FramedEval for FramedRotator {
    fn state(&self, t: f64) -> Result<FramedState> {
        let (s, c) = t.sin_cos();
        Ok(FramedState::new(
            t,
            Vec3::ZERO,
            Vec3::new(c, s, 0.0),
            Vec3::new(-s, c, 0.0),
        ))
    }

    fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        let (s, c) = t.sin_cos();
        Ok(FramedDerivs {
            gamma_dot: Vec3::ZERO,
            nu1_dot: Vec3::new(-s, c, 0.0),
            nu2_dot: Vec3::new(-c, -s, 0.0),
        })
    }
}

struct SwapNormals {
    inner: FramedCurveSource,
}

impl FramedEval for SwapNormals {
    fn state(&self, t: f64) -> Result<FramedState> {
        let s = self.inner.state(t)?;
        Ok(FramedState::new(t, s.gamma, s.nu2, s.nu1))
    }

    fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        let d = self.inner.derivs(t)?;
        Ok(FramedDerivs {
            gamma_dot: d.gamma_dot,
            nu1_dot: d.nu2_dot,
            nu2_dot: d.nu1_dot,
        })
    }

    fn domain(&self) -> Option<(f64, f64)> {
        self.inner.domain()
    }
}

struct NegateNormal {
    inner: FramedCurveSource,
    first: bool,
}

impl FramedEval for NegateNormal {
    fn state(&self, t: f64) -> Result<FramedState> {
        let s = self.inner.state(t)?;
        if self.first {
            Ok(FramedState::new(t, s.gamma, -s.nu1, s.nu2))
        } else {
            Ok(FramedState::new(t, s.gamma, s.nu1, -s.nu2))
        }
    }

    fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        let d = self.inner.derivs(t)?;
        if self.first {
            Ok(FramedDerivs {
                gamma_dot: d.gamma_dot,
                nu1_dot: -d.nu1_dot,
                nu2_dot: d.nu2_dot,
            })
        } else {
            Ok(FramedDerivs {
                gamma_dot: d.gamma_dot,
                nu1_dot: d.nu1_dot,
                nu2_dot: -d.nu2_dot,
            })
        }
    }

    fn domain(&self) -> Option<(f64, f64)> {
        self.inner.domain()
    }
}

/// Table-backed framed curve with order-4 finite-difference derivatives and
/// cubic Hermite interpolation between nodes (frame re-orthonormalized).
struct TableFramed {
    ts: Vec<f64>,
    states: Vec<FramedState>,
    d1: [Vec<Vec3>; 3],
    d2: [Vec<Vec3>; 3],
    h: f64,
}

impl TableFramed {
    fn from_states(states: Vec<FramedState>) -> Result<Self> {
        let ts: Vec<f64> = states.iter().map(|s| s.t).collect();
        if ts.len() < 7 {
            return Err(Error::InsufficientSamples {
                needed: 7,
                got: ts.len(),
            });
        }
        let columns: [Vec<Vec3>; 3] = [
            states.iter().map(|s| s.gamma).collect(),
            states.iter().map(|s| s.nu1).collect(),
            states.iter().map(|s| s.nu2).collect(),
        ];
        let mut d1: Vec<Vec<Vec3>> = Vec::new();
        let mut d2: Vec<Vec<Vec3>> = Vec::new();
        for col in &columns {
            d1.push(fd_derivative(&ts, col, FdAccuracy::Four)?);
            d2.push(fd_second_derivative(&ts, col, FdAccuracy::Four)?);
        }
        let h = ts[1] - ts[0];
        Ok(TableFramed {
            ts,
            states,
            d1: d1.try_into().unwrap(),
            d2: d2.try_into().unwrap(),
            h,
        })
    }

    fn cell(&self, t: f64) -> Result<(usize, f64)> {
        let (a, b) = (self.ts[0], *self.ts.last().unwrap());
        let slack = 1e-9 * self.h;
        if t < a - slack || t > b + slack {
            return Err(Error::OutOfDomain(t));
        }
        let lo = (((t - a) / self.h).floor() as usize).min(self.ts.len() - 2);
        Ok((lo, (t - self.ts[lo]) / self.h))
    }

    fn hermite(&self, vals: &[Vec3], ders: &[Vec3], lo: usize, u: f64) -> Vec3 {
        let (p0, p1) = (vals[lo], vals[lo + 1]);
        let (m0, m1) = (ders[lo] * self.h, ders[lo + 1] * self.h);
        let u2 = u * u;
        let u3 = u2 * u;
        p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + p1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2)
    }
}

impl FramedEval for TableFramed {
    fn state(&self, t: f64) -> Result<FramedState> {
        let (lo, u) = self.cell(t)?;
        let i = ((t - self.ts[0]) / self.h).round() as usize;
        let i = i.min(self.ts.len() - 1);
        if (t - self.ts[i]).abs() <= 1e-9 * self.h {
            let s = self.states[i];
            return Ok(FramedState::new(t, s.gamma, s.nu1, s.nu2));
        }
        let gamma = self.hermite(
            &self.states.iter().map(|s| s.gamma).collect::<Vec<_>>(),
            &self.d1[0],
            lo,
            u,
        );
        let nu1 = self.hermite(
            &self.states.iter().map(|s| s.nu1).collect::<Vec<_>>(),
            &self.d1[1],
            lo,
            u,
        );
        let nu2 = self.hermite(
            &self.states.iter().map(|s| s.nu2).collect::<Vec<_>>(),
            &self.d1[2],
            lo,
            u,
        );
        let frame = orthonormalize(nu1, nu2)?;
        Ok(FramedState::new(t, gamma, frame.e1, frame.e2))
    }

    fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        let (lo, u) = self.cell(t)?;
        Ok(FramedDerivs {
            gamma_dot: self.hermite(&self.d1[0], &self.d2[0], lo, u),
            nu1_dot: self.hermite(&self.d1[1], &self.d2[1], lo, u),
            nu2_dot: self.hermite(&self.d1[2], &self.d2[2], lo, u),
        })
    }

    fn domain(&self) -> Option<(f64, f64)> {
        Some((self.ts[0], *self.ts.last().unwrap()))
    }
}

/// Curvature (ℓ, m, n, α) at `t`.
///
/// Errors with [`Error::FrameViolation`] when γ̇ is not orthogonal to the
/// frame within a consistency threshold (relative to 1 + |γ̇|). The threshold
/// is deliberately loose: it guards against mislabeled or corrupted frames,
/// whose violations are O(1), while tolerating the finite-difference and
/// interpolation error of table-backed sources.
pub fn framed_curvature(
    source: &FramedCurveSource,
    t: f64,
    tol: &Tolerances,
) -> Result<FramedCurvature> {
    const FRAME_CONSISTENCY: f64 = 1e-4;
    let s = source.state(t)?;
    s.validate(tol)?;
    let d = source.derivs(t)?;
    let scale = 1.0 + d.gamma_dot.norm();
    if d.gamma_dot.dot(s.nu1).abs() > FRAME_CONSISTENCY * scale
        || d.gamma_dot.dot(s.nu2).abs() > FRAME_CONSISTENCY * scale
    {
        return Err(Error::FrameViolation(t));
    }
    Ok(FramedCurvature {
        l: d.nu1_dot.dot(s.nu2),
        m: d.nu1_dot.dot(s.mu),
        n: d.nu2_dot.dot(s.mu),
        alpha: d.gamma_dot.dot(s.mu),
    })
}

/// Curvature at every grid node.
pub fn curvature_on_grid(
    source: &FramedCurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<Vec<FramedCurvature>> {
    grid.nodes()
        .iter()
        .map(|&t| framed_curvature(source, t, tol))
        .collect()
}

/// States at every grid node.
pub fn states_on_grid(source: &FramedCurveSource, grid: &SampleGrid) -> Result<Vec<FramedState>> {
    grid.nodes().iter().map(|&t| source.state(t)).collect()
}

/// Curvature data (ℓ, m, n, α) given as functions of the parameter.
#[derive(Clone)]
pub struct CurvatureFns {
    pub l: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub m: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub n: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub alpha: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CurvatureFns {
    pub fn new(
        l: impl Fn(f64) -> f64 + Send + Sync + 'static,
        m: impl Fn(f64) -> f64 + Send + Sync + 'static,
        n: impl Fn(f64) -> f64 + Send + Sync + 'static,
        alpha: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CurvatureFns {
            l: Arc::new(l),
            m: Arc::new(m),
            n: Arc::new(n),
            alpha: Arc::new(alpha),
        }
    }

    pub fn constant(l: f64, m: f64, n: f64, alpha: f64) -> Self {
        CurvatureFns::new(move |_| l, move |_| m, move |_| n, move |_| alpha)
    }
}

struct FrenetTypeField {
    curv: CurvatureFns,
}

// state layout: [ν₁ | ν₂ | μ | γ], 12 components
impl VectorField for FrenetTypeField {
    fn dim(&self) -> usize {
        12
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let v = |o: usize| Vec3::new(y[o], y[o + 1], y[o + 2]);
        let (nu1, nu2, mu) = (v(0), v(3), v(6));
        let (l, m, n, a) = (
            (self.curv.l)(t),
            (self.curv.m)(t),
            (self.curv.n)(t),
            (self.curv.alpha)(t),
        );
        let put = |dy: &mut [f64], o: usize, w: Vec3| {
            dy[o] = w.x;
            dy[o + 1] = w.y;
            dy[o + 2] = w.z;
        };
        put(dy, 0, nu2 * l + mu * m);
        put(dy, 3, -nu1 * l + mu * n);
        put(dy, 6, -nu1 * m - nu2 * n);
        put(dy, 9, mu * a);
    }
}

/// Integrates the Frenet-type system
/// ν̇₁ = ℓν₂ + mμ, ν̇₂ = −ℓν₁ + nμ, μ̇ = −mν₁ − nν₂, γ̇ = αμ
/// from `init`, re-orthonormalizing the frame after every RK4 substep.
pub fn reconstruct(
    curv: &CurvatureFns,
    init: &FramedState,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<Vec<FramedState>> {
    init.validate(tol)?;
    if (init.t - grid.t0).abs() > 1e-12 * (1.0 + grid.t0.abs()) {
        return Err(Error::InvalidInput(
            "initial state must sit at the grid start".into(),
        ));
    }
    let y0 = [
        init.nu1.x, init.nu1.y, init.nu1.z, init.nu2.x, init.nu2.y, init.nu2.z, init.mu.x,
        init.mu.y, init.mu.z, init.gamma.x, init.gamma.y, init.gamma.z,
    ];
    let field = FrenetTypeField { curv: curv.clone() };
    let project = |_t: f64, y: &mut [f64]| {
        let nu1 = Vec3::new(y[0], y[1], y[2]);
        let nu2 = Vec3::new(y[3], y[4], y[5]);
        if let Ok(f) = orthonormalize(nu1, nu2) {
            let mu = f.e1.cross(f.e2);
            let vals = [f.e1, f.e2, mu];
            for (k, v) in vals.iter().enumerate() {
                y[3 * k] = v.x;
                y[3 * k + 1] = v.y;
                y[3 * k + 2] = v.z;
            }
        }
    };
    let traj = rk4_solve_projected(&field, &y0, grid, tol.max_rk4_step, project)?;
    Ok(traj
        .ts
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| {
            FramedState::new(
                t,
                Vec3::new(y[9], y[10], y[11]),
                Vec3::new(y[0], y[1], y[2]),
                Vec3::new(y[3], y[4], y[5]),
            )
        })
        .collect())
}

/// A rotation angle θ(t) with its derivative.
#[derive(Clone)]
pub struct Theta {
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    deriv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Theta {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Theta {
            value: Arc::new(value),
            deriv: Arc::new(deriv),
        }
    }

    pub fn constant(c: f64) -> Self {
        Theta::new(move |_| c, |_| 0.0)
    }

    /// θ(t) = θ₀ + rate·t
    pub fn linear(theta0: f64, rate: f64) -> Self {
        Theta::new(move |t| theta0 + rate * t, move |_| rate)
    }

    pub fn from_table(table: ScalarTable) -> Self {
        let t2 = table.clone();
        Theta::new(
            move |t| table.value(t).unwrap_or(f64::NAN),
            move |t| t2.deriv(t).unwrap_or(f64::NAN),
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.deriv)(t)
    }
}

struct RotatedFrame {
    inner: FramedCurveSource,
    theta: Theta,
}

impl FramedEval for RotatedFrame {
    fn state(&self, t: f64) -> Result<FramedState> {
        let s = self.inner.state(t)?;
        let (sin, cos) = self.theta.value(t).sin_cos();
        Ok(FramedState::new(
            t,
            s.gamma,
            s.nu1 * cos - s.nu2 * sin,
            s.nu1 * sin + s.nu2 * cos,
        ))
    }

    fn derivs(&self, t: f64) -> Result<FramedDerivs> {
        let s = self.inner.state(t)?;
        let d = self.inner.derivs(t)?;
        let (sin, cos) = self.theta.value(t).sin_cos();
        let td = self.theta.deriv(t);
        Ok(FramedDerivs {
            gamma_dot: d.gamma_dot,
            nu1_dot: d.nu1_dot * cos - d.nu2_dot * sin - (s.nu1 * sin + s.nu2 * cos) * td,
            nu2_dot: d.nu1_dot * sin + d.nu2_dot * cos + (s.nu1 * cos - s.nu2 * sin) * td,
        })
    }

    fn domain(&self) -> Option<(f64, f64)> {
        self.inner.domain()
    }
}

/// Rotates the normal pair by θ: (v, w) = (cosθ ν₁ − sinθ ν₂, sinθ ν₁ + cosθ ν₂).
/// The rotated curvature is (ℓ − θ̇, m cosθ − n sinθ, m sinθ + n cosθ, α).
pub fn rotate_frame(source: &FramedCurveSource, theta: Theta) -> FramedCurveSource {
    FramedCurveSource::new(RotatedFrame {
        inner: source.clone(),
        theta,
    })
}

/// Rotates the frame into a Bishop frame by integrating θ̇ = ℓ with
/// θ(t₀) = `theta0`; the rotated curvature has ℓ̄ = 0, so both normal fields
/// have derivatives parallel to μ.
pub fn bishop_frame(
    source: &FramedCurveSource,
    theta0: f64,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<(FramedCurveSource, Theta)> {
    struct LField {
        source: FramedCurveSource,
        tol: Tolerances,
    }
    impl VectorField for LField {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, t: f64, _y: &[f64], dy: &mut [f64]) {
            dy[0] = framed_curvature(&self.source, t, &self.tol)
                .map(|c| c.l)
                .unwrap_or(f64::NAN);
        }
    }
    let field = LField {
        source: source.clone(),
        tol: *tol,
    };
    let traj = rk4_solve_projected(&field, &[theta0], grid, tol.max_rk4_step, |_, _| {})?;
    let thetas: Vec<f64> = traj.states.iter().map(|s| s[0]).collect();
    let lvals: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| framed_curvature(source, t, tol).map(|c| c.l))
        .collect::<Result<_>>()?;
    let table = ScalarTable::new(traj.ts, thetas, lvals)?;
    let theta = Theta::from_table(table);
    Ok((rotate_frame(source, theta.clone()), theta))
}

/// Parameters where α changes sign or vanishes: the singular points of γ.
/// Sign-change roots are located by linear interpolation within the cell.
pub fn singular_scan(
    source: &FramedCurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    let alphas: Vec<f64> = nodes
        .iter()
        .map(|&t| framed_curvature(source, t, tol).map(|c| c.alpha))
        .collect::<Result<_>>()?;
    let mut roots = Vec::new();
    let h = grid.spacing();
    let mut push = |t: f64| {
        if roots.last().map_or(true, |&r: &f64| t - r > h) {
            roots.push(t);
        }
    };
    for i in 0..nodes.len() {
        if alphas[i].abs() <= tol.cond {
            push(nodes[i]);
        } else if i + 1 < nodes.len()
            && alphas[i + 1].abs() > tol.cond
            && alphas[i] * alphas[i + 1] < 0.0
        {
            let u = alphas[i] / (alphas[i] - alphas[i + 1]);
            push(nodes[i] + u * h);
        }
    }
    Ok(roots)
}
