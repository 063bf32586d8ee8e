//! Bertrand-type mate constructions.
//!
//! Non-degenerate kinds displace along Frenet frame vectors and require the
//! mate's frame vector x̄ to align with v × w; framed kinds do the same with
//! the (ν₁, ν₂, μ) frame. Each construction returns the mate samples, the
//! coefficient functions (λ, η[, θ]), the predicted mate frame and curvature,
//! and the residuals of the defining condition equations.

use std::io::Write;

use crate::curvekit::{fd_derivative, CurveSource, FdAccuracy, SampleGrid};
use crate::framedkit::{
    curvature_on_grid, framed_curvature, states_on_grid, FramedCurvature, FramedCurveSource,
    FramedState, Theta,
};
use crate::frenet::{apparatus_on_grid, frenet_apparatus, kappa_dot, FrenetData};
use crate::geom3::{Frame3, Vec3};
use crate::odeint::{rk4_solve_projected, VectorField};
use crate::{Error, Result, Tolerances};

/// All mate constructions, non-degenerate and framed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MateKind {
    /// displace along (n, b), mate binormal aligns with t
    Nbb,
    /// displace along (t, n), mate tangent aligns with b
    Tnt,
    /// displace along (n, b), mate tangent aligns with t
    Nbt,
    /// framed: displace along (ν₁, ν₂), mate ν̄₂ = μ
    N1N2N2,
    /// framed: displace along (μ, ν₁), mate μ̄ = ν₂
    MuN1Mu,
    /// framed: displace along (μ, ν₁), mate ν̄₂ = ν₂
    MuN1N2,
    /// framed: displace along (ν₁, ν₂), mate μ̄ = μ
    N1N2Mu,
}

impl MateKind {
    pub fn is_framed(self) -> bool {
        matches!(
            self,
            MateKind::N1N2N2 | MateKind::MuN1Mu | MateKind::MuN1N2 | MateKind::N1N2Mu
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            MateKind::Nbb => "nbb",
            MateKind::Tnt => "tnt",
            MateKind::Nbt => "nbt",
            MateKind::N1N2N2 => "n1n2-n2",
            MateKind::MuN1Mu => "mu-n1-mu",
            MateKind::MuN1N2 => "mu-n1-n2",
            MateKind::N1N2Mu => "n1n2-mu",
        }
    }
}

/// One condition equation's worst residual over the grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionResidual {
    pub name: String,
    pub max: f64,
    /// Node at which the max is attained.
    pub at: f64,
}

fn max_residual(name: &str, ts: &[f64], vals: impl Iterator<Item = f64>) -> ConditionResidual {
    let mut max = 0.0_f64;
    let mut at = ts[0];
    for (t, v) in ts.iter().zip(vals) {
        if v.abs() > max {
            max = v.abs();
            at = *t;
        }
    }
    ConditionResidual {
        name: name.to_string(),
        max,
        at,
    }
}

/// Mate of a non-degenerate curve, with predicted Frenet data.
#[derive(Debug, Clone)]
pub struct FrenetMateResult {
    pub kind: MateKind,
    pub ts: Vec<f64>,
    pub mate: Vec<Vec3>,
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    /// Predicted mate Frenet frame (t̄, n̄, b̄) per node.
    pub frame: Vec<Frame3>,
    /// Predicted mate curvature; signed as printed in the closed forms.
    pub kappa_bar: Vec<f64>,
    pub tau_bar: Vec<f64>,
    /// The mate speed factor h (n,b,b̄ construction only).
    pub h: Option<Vec<f64>>,
    pub conditions: Vec<ConditionResidual>,
}

impl FrenetMateResult {
    /// Writes `t,x,y,z,lambda,eta,kappa_bar,tau_bar` rows (17 significant digits).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,y,z,lambda,eta,kappa_bar,tau_bar")?;
        for i in 0..self.ts.len() {
            let p = self.mate[i];
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.ts[i], p.x, p.y, p.z, self.lambda[i], self.eta[i], self.kappa_bar[i],
                self.tau_bar[i]
            )?;
        }
        Ok(())
    }
}

/// Mate of a framed curve, with predicted framed curvature.
#[derive(Debug, Clone)]
pub struct FramedMateResult {
    pub kind: MateKind,
    pub ts: Vec<f64>,
    pub states: Vec<FramedState>,
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    pub theta: Vec<f64>,
    /// Predicted mate curvature per node.
    pub curvature: Vec<FramedCurvature>,
    pub conditions: Vec<ConditionResidual>,
}

impl FramedMateResult {
    /// Table-backed framed curve built from the mate states.
    pub fn as_source(&self) -> Result<FramedCurveSource> {
        FramedCurveSource::from_states(self.states.clone())
    }

    /// Writes `t,x,y,z,l,m,n,alpha` rows (17 significant digits).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,y,z,l,m,n,alpha")?;
        for i in 0..self.ts.len() {
            let p = self.states[i].gamma;
            let c = self.curvature[i];
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.ts[i], p.x, p.y, p.z, c.l, c.m, c.n, c.alpha
            )?;
        }
        Ok(())
    }
}

/// Derivative of `f` at the grid nodes by order-4 central differences.
///
/// When `f` evaluates beyond the grid ends (analytic sources), two ghost
/// nodes per side keep the high-order central stencil at every real node;
/// otherwise boundary nodes fall back to one-sided stencils.
pub fn derivative_on_grid(
    grid: &SampleGrid,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<Vec<f64>> {
    let h = grid.spacing();
    let mut ts_ext = Vec::with_capacity(grid.count + 4);
    for k in (1..=2).rev() {
        ts_ext.push(grid.t0 - k as f64 * h);
    }
    ts_ext.extend(grid.nodes());
    for k in 1..=2 {
        ts_ext.push(grid.t1 + k as f64 * h);
    }
    let ghosts_ok = f(ts_ext[0]).is_ok()
        && f(ts_ext[1]).is_ok()
        && f(ts_ext[ts_ext.len() - 2]).is_ok()
        && f(ts_ext[ts_ext.len() - 1]).is_ok();
    if ghosts_ok {
        let vals: Vec<f64> = ts_ext.iter().map(|&t| f(t)).collect::<Result<_>>()?;
        let d = fd_derivative(&ts_ext, &vals, FdAccuracy::Four)?;
        Ok(d[2..2 + grid.count].to_vec())
    } else {
        let ts = grid.nodes();
        let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect::<Result<_>>()?;
        fd_derivative(&ts, &vals, FdAccuracy::Four)
    }
}

/// Derivative of a pointwise-evaluable function at each grid node by a
/// five-point stencil with a small step decoupled from the grid spacing, so
/// closed-form coefficient functions are differentiated to near machine
/// precision regardless of how coarse the sampling grid is. Nodes where the
/// stencil leaves the evaluable domain fall back to the grid-spacing stencil.
pub fn derivative_pointwise(
    grid: &SampleGrid,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.count);
    let mut fallback: Option<Vec<f64>> = None;
    for (i, &t) in grid.nodes().iter().enumerate() {
        let d = 1e-4 * (1.0 + t.abs());
        let stencil = (|| -> Result<f64> {
            Ok(
                (-f(t + 2.0 * d)? + 8.0 * f(t + d)? - 8.0 * f(t - d)? + f(t - 2.0 * d)?)
                    / (12.0 * d),
            )
        })();
        match stencil {
            Ok(v) => out.push(v),
            Err(_) => {
                if fallback.is_none() {
                    fallback = Some(derivative_on_grid(grid, |t| f(t))?);
                }
                out.push(fallback.as_ref().unwrap()[i]);
            }
        }
    }
    Ok(out)
}

fn sign_of(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn check_constant_sign(vals: &[f64], quantity: &'static str) -> Result<f64> {
    let s = sign_of(vals[0]);
    if vals.iter().any(|v| sign_of(*v) != s) {
        return Err(Error::SignChange { quantity });
    }
    Ok(s)
}

/// The density condition (λ, η) ≢ (0, 0): at least 1% of the nodes must
/// exceed the threshold.
fn check_density(lambda: &[f64], eta: &[f64], tol: &Tolerances) -> Result<()> {
    let hits = lambda
        .iter()
        .zip(eta)
        .filter(|(l, e)| l.abs() + e.abs() > tol.cond)
        .count();
    if hits * 100 < lambda.len() {
        return Err(Error::ZeroCoefficients);
    }
    Ok(())
}

/// (n, b, b̄)-Bertrand mate: λ = 1/κ, η = −κ̇/(|γ̇|κ²τ),
/// γ̄ = γ + λn + ηb. This is the evolute of the curve.
///
/// Requires τ ≠ 0 and the mate speed factor h = |γ̇|τ/κ − d/dt(κ̇/(κ²|γ̇|τ))
/// nonzero at every node; both must keep a constant sign across the grid.
pub fn nbb_mate(curve: &CurveSource, grid: &SampleGrid, tol: &Tolerances) -> Result<FrenetMateResult> {
    let ts = grid.nodes();
    let apparatus = apparatus_on_grid(curve, grid, tol)?;
    for fd in &apparatus {
        if fd.tau.abs() <= tol.cond {
            return Err(Error::TorsionVanishes(fd.t));
        }
    }
    let eta_of = |t: f64| -> Result<f64> {
        let jet = curve.jet(t)?;
        let fd = frenet_apparatus(&jet, tol)?;
        if fd.tau.abs() <= tol.cond {
            return Err(Error::TorsionVanishes(t));
        }
        Ok(-kappa_dot(&jet, tol)? / (fd.speed * fd.kappa * fd.kappa * fd.tau))
    };
    let eta: Vec<f64> = ts.iter().map(|&t| eta_of(t)).collect::<Result<_>>()?;
    let eta_dot = derivative_on_grid(grid, eta_of)?;
    let lambda: Vec<f64> = apparatus.iter().map(|fd| 1.0 / fd.kappa).collect();
    // h = |γ̇|τ/κ + η̇ since η = −κ̇/(κ²|γ̇|τ)
    let h: Vec<f64> = apparatus
        .iter()
        .zip(&eta_dot)
        .map(|(fd, ed)| fd.speed * fd.tau / fd.kappa + ed)
        .collect();
    for (fd, hv) in apparatus.iter().zip(&h) {
        if hv.abs() <= tol.cond {
            return Err(Error::HVanishes(fd.t));
        }
    }
    let s_tau = check_constant_sign(&apparatus.iter().map(|f| f.tau).collect::<Vec<_>>(), "tau")?;
    let s_h = check_constant_sign(&h, "h")?;
    check_density(&lambda, &eta, tol)?;

    let mut mate = Vec::with_capacity(ts.len());
    let mut frame = Vec::with_capacity(ts.len());
    let mut kappa_bar = Vec::with_capacity(ts.len());
    let mut tau_bar = Vec::with_capacity(ts.len());
    for (i, fd) in apparatus.iter().enumerate() {
        let jet = curve.jet(ts[i])?;
        mate.push(jet.d0 + fd.normal * lambda[i] + fd.binormal * eta[i]);
        // γ̄̇ = h b, so t̄ = sign(h) b, n̄ = −sign(h)sign(τ) n, b̄ = sign(τ) t
        frame.push(Frame3 {
            e1: fd.binormal * s_h,
            e2: fd.normal * (-s_h * s_tau),
            e3: fd.tangent * s_tau,
        });
        kappa_bar.push(fd.speed * fd.tau.abs() / h[i].abs());
        tau_bar.push(fd.speed * fd.kappa / h[i]);
    }
    let conditions = vec![
        max_residual(
            "lambda - 1/kappa",
            &ts,
            apparatus
                .iter()
                .zip(&lambda)
                .map(|(fd, l)| l - 1.0 / fd.kappa),
        ),
        max_residual("h - |dg|tau/kappa - d(eta)/dt", &ts, (0..ts.len()).map(|_| 0.0)),
    ];
    Ok(FrenetMateResult {
        kind: MateKind::Nbb,
        ts,
        mate,
        lambda,
        eta,
        frame,
        kappa_bar,
        tau_bar,
        h: Some(h),
        conditions,
    })
}

struct FrenetCoeffField {
    curve: CurveSource,
    tol: Tolerances,
    /// false: (t,n,t̄) system λ̇ = η|γ̇|κ − |γ̇|, η̇ = −λ|γ̇|κ
    /// true:  (n,b,t̄) system λ̇ = η|γ̇|τ, η̇ = −λ|γ̇|τ
    torsion_driven: bool,
}

impl VectorField for FrenetCoeffField {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        match self
            .curve
            .jet(t)
            .and_then(|j| frenet_apparatus(&j, &self.tol))
        {
            Ok(fd) => {
                if self.torsion_driven {
                    let w = fd.speed * fd.tau;
                    dy[0] = y[1] * w;
                    dy[1] = -y[0] * w;
                } else {
                    let w = fd.speed * fd.kappa;
                    dy[0] = y[1] * w - fd.speed;
                    dy[1] = -y[0] * w;
                }
            }
            Err(_) => {
                dy[0] = f64::NAN;
                dy[1] = f64::NAN;
            }
        }
    }
}

/// (t, n, t̄)-Bertrand mate: integrates λ̇ = η|γ̇|κ − |γ̇|, η̇ = −λ|γ̇|κ from
/// `init`, then γ̄ = γ + λt + ηn. This is an involute of the curve.
///
/// Requires τ ≠ 0 on the grid and η bounded away from zero (η₀ included).
pub fn tnt_mate(
    curve: &CurveSource,
    init: (f64, f64),
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<FrenetMateResult> {
    if init.1.abs() <= tol.cond {
        return Err(Error::EtaVanishes(grid.t0));
    }
    let ts = grid.nodes();
    let apparatus = apparatus_on_grid(curve, grid, tol)?;
    for fd in &apparatus {
        if fd.tau.abs() <= tol.cond {
            return Err(Error::TorsionVanishes(fd.t));
        }
    }
    let field = FrenetCoeffField {
        curve: curve.clone(),
        tol: *tol,
        torsion_driven: false,
    };
    let traj = rk4_solve_projected(&field, &[init.0, init.1], grid, tol.max_rk4_step, |_, _| {})?;
    let lambda = traj.component(0);
    let eta = traj.component(1);
    for (t, e) in ts.iter().zip(&eta) {
        if e.abs() <= tol.cond {
            return Err(Error::EtaVanishes(*t));
        }
    }
    let s_eta = check_constant_sign(&eta, "eta")?;
    let s_tau = check_constant_sign(&apparatus.iter().map(|f| f.tau).collect::<Vec<_>>(), "tau")?;
    check_density(&lambda, &eta, tol)?;

    let mut mate = Vec::with_capacity(ts.len());
    let mut frame = Vec::with_capacity(ts.len());
    let mut kappa_bar = Vec::with_capacity(ts.len());
    let mut tau_bar = Vec::with_capacity(ts.len());
    for (i, fd) in apparatus.iter().enumerate() {
        let jet = curve.jet(ts[i])?;
        mate.push(jet.d0 + fd.tangent * lambda[i] + fd.normal * eta[i]);
        // γ̄̇ = η|γ̇|τ b
        frame.push(Frame3 {
            e1: fd.binormal * (s_eta * s_tau),
            e2: fd.normal * (-s_eta),
            e3: fd.tangent * s_tau,
        });
        kappa_bar.push(1.0 / eta[i].abs());
        tau_bar.push(fd.kappa / (eta[i] * fd.tau));
    }
    let lambda_dot = fd_derivative(&ts, &lambda, FdAccuracy::Four)?;
    let eta_dot = fd_derivative(&ts, &eta, FdAccuracy::Four)?;
    let conditions = vec![
        max_residual(
            "|dg| + dlambda/dt - eta|dg|kappa",
            &ts,
            (0..ts.len()).map(|i| {
                apparatus[i].speed + lambda_dot[i] - eta[i] * apparatus[i].speed * apparatus[i].kappa
            }),
        ),
        max_residual(
            "deta/dt + lambda|dg|kappa",
            &ts,
            (0..ts.len())
                .map(|i| eta_dot[i] + lambda[i] * apparatus[i].speed * apparatus[i].kappa),
        ),
    ];
    Ok(FrenetMateResult {
        kind: MateKind::Tnt,
        ts,
        mate,
        lambda,
        eta,
        frame,
        kappa_bar,
        tau_bar,
        h: None,
        conditions,
    })
}

/// (n, b, t̄)-Bertrand mate: integrates the skew system λ̇ = η|γ̇|τ,
/// η̇ = −λ|γ̇|τ (which conserves λ² + η² exactly), then γ̄ = γ + λn + ηb.
///
/// Requires 1 − λκ ≠ 0 at every node after integration.
pub fn nbt_mate(
    curve: &CurveSource,
    init: (f64, f64),
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<FrenetMateResult> {
    if init.0.abs() <= tol.cond && init.1.abs() <= tol.cond {
        return Err(Error::ZeroCoefficients);
    }
    let ts = grid.nodes();
    let apparatus = apparatus_on_grid(curve, grid, tol)?;
    let field = FrenetCoeffField {
        curve: curve.clone(),
        tol: *tol,
        torsion_driven: true,
    };
    let traj = rk4_solve_projected(&field, &[init.0, init.1], grid, tol.max_rk4_step, |_, _| {})?;
    let lambda = traj.component(0);
    let eta = traj.component(1);
    let denom: Vec<f64> = apparatus
        .iter()
        .zip(&lambda)
        .map(|(fd, l)| 1.0 - l * fd.kappa)
        .collect();
    for (fd, d) in apparatus.iter().zip(&denom) {
        if d.abs() <= tol.cond {
            return Err(Error::OsculatingDegeneracy(fd.t));
        }
    }
    let s_d = check_constant_sign(&denom, "1 - lambda*kappa")?;
    check_density(&lambda, &eta, tol)?;

    let mut mate = Vec::with_capacity(ts.len());
    let mut frame = Vec::with_capacity(ts.len());
    let mut kappa_bar = Vec::with_capacity(ts.len());
    let mut tau_bar = Vec::with_capacity(ts.len());
    for (i, fd) in apparatus.iter().enumerate() {
        let jet = curve.jet(ts[i])?;
        mate.push(jet.d0 + fd.normal * lambda[i] + fd.binormal * eta[i]);
        // γ̄̇ = |γ̇|(1 − λκ) t
        frame.push(Frame3 {
            e1: fd.tangent * s_d,
            e2: fd.normal * s_d,
            e3: fd.binormal,
        });
        kappa_bar.push(fd.kappa / denom[i]);
        tau_bar.push(fd.tau / denom[i]);
    }
    let lambda_dot = fd_derivative(&ts, &lambda, FdAccuracy::Four)?;
    let eta_dot = fd_derivative(&ts, &eta, FdAccuracy::Four)?;
    let conditions = vec![
        max_residual(
            "dlambda/dt - eta|dg|tau",
            &ts,
            (0..ts.len())
                .map(|i| lambda_dot[i] - eta[i] * apparatus[i].speed * apparatus[i].tau),
        ),
        max_residual(
            "deta/dt + lambda|dg|tau",
            &ts,
            (0..ts.len()).map(|i| eta_dot[i] + lambda[i] * apparatus[i].speed * apparatus[i].tau),
        ),
        max_residual(
            "lambda^2 + eta^2 drift",
            &ts,
            lambda
                .iter()
                .zip(&eta)
                .map(|(l, e)| l * l + e * e - (init.0 * init.0 + init.1 * init.1)),
        ),
    ];
    Ok(FrenetMateResult {
        kind: MateKind::Nbt,
        ts,
        mate,
        lambda,
        eta,
        frame,
        kappa_bar,
        tau_bar,
        h: None,
        conditions,
    })
}

/// Inputs for [`framed_mate`]; the existence conditions constrain (λ, η, θ)
/// without fully selecting them, so each kind exposes the free data it needs.
pub enum FramedMateInputs {
    /// γ̄ = γ + λν₁ + ην₂ with ν̄₂ = μ. θ is free; the algebraic condition
    /// α + λm + ηn = 0 is solved for (λ, η) as the minimum-norm solution
    /// plus `null_coeff` times the null direction (n, −m)/√(m²+n²); the
    /// differential condition is then enforced as a residual check.
    N1N2N2 {
        theta: Theta,
        null_coeff: Option<Theta>,
    },
    /// γ̄ = γ + λμ + ην₁ with μ̄ = ν₂. Integrates λ̇ = −α − ηm, η̇ = λm.
    MuN1Mu { lambda0: f64, eta0: f64, theta: Theta },
    /// γ̄ = γ + λμ + ην₁ with ν̄₂ = ν₂. η and θ are free; λ = ηℓ/n from the
    /// algebraic condition; the differential condition is a residual check.
    MuN1N2 { eta: Theta, theta: Theta },
    /// γ̄ = γ + λν₁ + ην₂ with μ̄ = μ. Integrates λ̇ = ηℓ, η̇ = −λℓ
    /// (conserves λ² + η²).
    N1N2Mu { lambda0: f64, eta0: f64, theta: Theta },
}

impl FramedMateInputs {
    pub fn kind(&self) -> MateKind {
        match self {
            FramedMateInputs::N1N2N2 { .. } => MateKind::N1N2N2,
            FramedMateInputs::MuN1Mu { .. } => MateKind::MuN1Mu,
            FramedMateInputs::MuN1N2 { .. } => MateKind::MuN1N2,
            FramedMateInputs::N1N2Mu { .. } => MateKind::N1N2Mu,
        }
    }
}

struct FramedCoeffField {
    source: FramedCurveSource,
    tol: Tolerances,
    /// false: λ̇ = −α − ηm, η̇ = λm (μ,ν₁,μ̄ system)
    /// true:  λ̇ = ηℓ, η̇ = −λℓ (ν₁,ν₂,μ̄ system)
    l_driven: bool,
}

impl VectorField for FramedCoeffField {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        match framed_curvature(&self.source, t, &self.tol) {
            Ok(c) => {
                if self.l_driven {
                    dy[0] = y[1] * c.l;
                    dy[1] = -y[0] * c.l;
                } else {
                    dy[0] = -c.alpha - y[1] * c.m;
                    dy[1] = y[0] * c.m;
                }
            }
            Err(_) => {
                dy[0] = f64::NAN;
                dy[1] = f64::NAN;
            }
        }
    }
}

/// Builds the framed Bertrand mate of the requested kind.
pub fn framed_mate(
    source: &FramedCurveSource,
    inputs: &FramedMateInputs,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<FramedMateResult> {
    let ts = grid.nodes();
    let curv = curvature_on_grid(source, grid, tol)?;
    let states = states_on_grid(source, grid)?;
    match inputs {
        FramedMateInputs::N1N2N2 { theta, null_coeff } => {
            let coeff_at = |t: f64, pick_lambda: bool| -> Result<f64> {
                let c = framed_curvature(source, t, tol)?;
                let q = c.m * c.m + c.n * c.n;
                let cc = null_coeff.as_ref().map_or(0.0, |f| f.value(t));
                if q <= tol.cond * tol.cond {
                    if c.alpha.abs() > tol.cond {
                        return Err(Error::ConditionInfeasible {
                            kind: "n1n2-n2",
                            t,
                        });
                    }
                    return Ok(0.0);
                }
                let sq = q.sqrt();
                Ok(if pick_lambda {
                    -c.alpha * c.m / q + cc * c.n / sq
                } else {
                    -c.alpha * c.n / q - cc * c.m / sq
                })
            };
            let lambda: Vec<f64> = ts.iter().map(|&t| coeff_at(t, true)).collect::<Result<_>>()?;
            let eta: Vec<f64> = ts.iter().map(|&t| coeff_at(t, false)).collect::<Result<_>>()?;
            let lambda_dot = derivative_pointwise(grid, |t| coeff_at(t, true))?;
            let eta_dot = derivative_pointwise(grid, |t| coeff_at(t, false))?;
            check_density(&lambda, &eta, tol)?;
            let thetas: Vec<f64> = ts.iter().map(|&t| theta.value(t)).collect();

            let algebraic = max_residual(
                "alpha + lambda*m + eta*n",
                &ts,
                (0..ts.len()).map(|i| curv[i].alpha + lambda[i] * curv[i].m + eta[i] * curv[i].n),
            );
            let differential = max_residual(
                "(dlambda - eta*l)sin + (lambda*l + deta)cos",
                &ts,
                (0..ts.len()).map(|i| {
                    let (sin, cos) = thetas[i].sin_cos();
                    (lambda_dot[i] - eta[i] * curv[i].l) * sin
                        + (lambda[i] * curv[i].l + eta_dot[i]) * cos
                }),
            );
            if differential.max > tol.cond {
                return Err(Error::ConditionInfeasible {
                    kind: "n1n2-n2",
                    t: differential.at,
                });
            }
            let mut mates = Vec::with_capacity(ts.len());
            let mut curvature = Vec::with_capacity(ts.len());
            for i in 0..ts.len() {
                let s = &states[i];
                let (sin, cos) = thetas[i].sin_cos();
                let pos = s.gamma + s.nu1 * lambda[i] + s.nu2 * eta[i];
                mates.push(FramedState::new(ts[i], pos, s.nu1 * sin + s.nu2 * cos, s.mu));
                curvature.push(FramedCurvature {
                    l: curv[i].m * sin + curv[i].n * cos,
                    m: theta.deriv(ts[i]) - curv[i].l,
                    n: curv[i].n * sin - curv[i].m * cos,
                    alpha: (lambda_dot[i] - eta[i] * curv[i].l) * cos
                        - (lambda[i] * curv[i].l + eta_dot[i]) * sin,
                });
            }
            Ok(FramedMateResult {
                kind: MateKind::N1N2N2,
                ts,
                states: mates,
                lambda,
                eta,
                theta: thetas,
                curvature,
                conditions: vec![algebraic, differential],
            })
        }
        FramedMateInputs::MuN1Mu {
            lambda0,
            eta0,
            theta,
        } => {
            let field = FramedCoeffField {
                source: source.clone(),
                tol: *tol,
                l_driven: false,
            };
            let traj =
                rk4_solve_projected(&field, &[*lambda0, *eta0], grid, tol.max_rk4_step, |_, _| {})?;
            let lambda = traj.component(0);
            let eta = traj.component(1);
            check_density(&lambda, &eta, tol)?;
            let thetas: Vec<f64> = ts.iter().map(|&t| theta.value(t)).collect();
            let lambda_dot = fd_derivative(&ts, &lambda, FdAccuracy::Four)?;
            let eta_dot = fd_derivative(&ts, &eta, FdAccuracy::Four)?;
            let conditions = vec![
                max_residual(
                    "-lambda*m + deta/dt",
                    &ts,
                    (0..ts.len()).map(|i| -lambda[i] * curv[i].m + eta_dot[i]),
                ),
                max_residual(
                    "alpha + dlambda/dt + eta*m",
                    &ts,
                    (0..ts.len()).map(|i| curv[i].alpha + lambda_dot[i] + eta[i] * curv[i].m),
                ),
            ];
            let mut mates = Vec::with_capacity(ts.len());
            let mut curvature = Vec::with_capacity(ts.len());
            for i in 0..ts.len() {
                let s = &states[i];
                let (sin, cos) = thetas[i].sin_cos();
                let pos = s.gamma + s.mu * lambda[i] + s.nu1 * eta[i];
                mates.push(FramedState::new(
                    ts[i],
                    pos,
                    s.mu * cos - s.nu1 * sin,
                    s.mu * sin + s.nu1 * cos,
                ));
                curvature.push(FramedCurvature {
                    l: -theta.deriv(ts[i]) - curv[i].m,
                    m: -(curv[i].l * sin + curv[i].n * cos),
                    n: curv[i].l * cos - curv[i].n * sin,
                    alpha: -lambda[i] * curv[i].n + eta[i] * curv[i].l,
                });
            }
            Ok(FramedMateResult {
                kind: MateKind::MuN1Mu,
                ts,
                states: mates,
                lambda,
                eta,
                theta: thetas,
                curvature,
                conditions,
            })
        }
        FramedMateInputs::MuN1N2 { eta, theta } => {
            let lambda_at = |t: f64| -> Result<f64> {
                let c = framed_curvature(source, t, tol)?;
                if c.n.abs() <= tol.cond {
                    if (eta.value(t) * c.l).abs() <= tol.cond {
                        return Ok(0.0);
                    }
                    return Err(Error::ConditionInfeasible {
                        kind: "mu-n1-n2",
                        t,
                    });
                }
                Ok(eta.value(t) * c.l / c.n)
            };
            let lambda: Vec<f64> = ts.iter().map(|&t| lambda_at(t)).collect::<Result<_>>()?;
            let etav: Vec<f64> = ts.iter().map(|&t| eta.value(t)).collect();
            let eta_dot: Vec<f64> = ts.iter().map(|&t| eta.deriv(t)).collect();
            let lambda_dot = derivative_pointwise(grid, lambda_at)?;
            check_density(&lambda, &etav, tol)?;
            let thetas: Vec<f64> = ts.iter().map(|&t| theta.value(t)).collect();

            let algebraic = max_residual(
                "-lambda*n + eta*l",
                &ts,
                (0..ts.len()).map(|i| -lambda[i] * curv[i].n + etav[i] * curv[i].l),
            );
            let differential = max_residual(
                "(alpha + dlambda + eta*m)sin + (-lambda*m + deta)cos",
                &ts,
                (0..ts.len()).map(|i| {
                    let (sin, cos) = thetas[i].sin_cos();
                    (curv[i].alpha + lambda_dot[i] + etav[i] * curv[i].m) * sin
                        + (-lambda[i] * curv[i].m + eta_dot[i]) * cos
                }),
            );
            if differential.max > tol.cond {
                return Err(Error::ConditionInfeasible {
                    kind: "mu-n1-n2",
                    t: differential.at,
                });
            }
            let mut mates = Vec::with_capacity(ts.len());
            let mut curvature = Vec::with_capacity(ts.len());
            for i in 0..ts.len() {
                let s = &states[i];
                let (sin, cos) = thetas[i].sin_cos();
                let pos = s.gamma + s.mu * lambda[i] + s.nu1 * etav[i];
                mates.push(FramedState::new(
                    ts[i],
                    pos,
                    s.mu * sin + s.nu1 * cos,
                    s.nu2,
                ));
                curvature.push(FramedCurvature {
                    l: curv[i].l * cos - curv[i].n * sin,
                    m: theta.deriv(ts[i]) + curv[i].m,
                    n: curv[i].l * sin + curv[i].n * cos,
                    alpha: (curv[i].alpha + lambda_dot[i] + etav[i] * curv[i].m) * cos
                        + (lambda[i] * curv[i].m - eta_dot[i]) * sin,
                });
            }
            Ok(FramedMateResult {
                kind: MateKind::MuN1N2,
                ts,
                states: mates,
                lambda,
                eta: etav,
                theta: thetas,
                curvature,
                conditions: vec![algebraic, differential],
            })
        }
        FramedMateInputs::N1N2Mu {
            lambda0,
            eta0,
            theta,
        } => {
            if lambda0.abs() <= tol.cond && eta0.abs() <= tol.cond {
                return Err(Error::ZeroCoefficients);
            }
            let field = FramedCoeffField {
                source: source.clone(),
                tol: *tol,
                l_driven: true,
            };
            let traj =
                rk4_solve_projected(&field, &[*lambda0, *eta0], grid, tol.max_rk4_step, |_, _| {})?;
            let lambda = traj.component(0);
            let eta = traj.component(1);
            check_density(&lambda, &eta, tol)?;
            let thetas: Vec<f64> = ts.iter().map(|&t| theta.value(t)).collect();
            let lambda_dot = fd_derivative(&ts, &lambda, FdAccuracy::Four)?;
            let eta_dot = fd_derivative(&ts, &eta, FdAccuracy::Four)?;
            let conditions = vec![
                max_residual(
                    "dlambda/dt - eta*l",
                    &ts,
                    (0..ts.len()).map(|i| lambda_dot[i] - eta[i] * curv[i].l),
                ),
                max_residual(
                    "lambda*l + deta/dt",
                    &ts,
                    (0..ts.len()).map(|i| lambda[i] * curv[i].l + eta_dot[i]),
                ),
                max_residual(
                    "lambda^2 + eta^2 drift",
                    &ts,
                    lambda
                        .iter()
                        .zip(&eta)
                        .map(|(l, e)| l * l + e * e - (lambda0 * lambda0 + eta0 * eta0)),
                ),
            ];
            let mut mates = Vec::with_capacity(ts.len());
            let mut curvature = Vec::with_capacity(ts.len());
            for i in 0..ts.len() {
                let s = &states[i];
                let (sin, cos) = thetas[i].sin_cos();
                let pos = s.gamma + s.nu1 * lambda[i] + s.nu2 * eta[i];
                mates.push(FramedState::new(
                    ts[i],
                    pos,
                    s.nu1 * cos - s.nu2 * sin,
                    s.nu1 * sin + s.nu2 * cos,
                ));
                curvature.push(FramedCurvature {
                    l: curv[i].l - theta.deriv(ts[i]),
                    m: curv[i].m * cos - curv[i].n * sin,
                    n: curv[i].m * sin + curv[i].n * cos,
                    alpha: curv[i].alpha + lambda[i] * curv[i].m + eta[i] * curv[i].n,
                });
            }
            Ok(FramedMateResult {
                kind: MateKind::N1N2Mu,
                ts,
                states: mates,
                lambda,
                eta,
                theta: thetas,
                curvature,
                conditions,
            })
        }
    }
}

/// Diagnostic report for a claimed mate pair.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MateResidualReport {
    pub kind: String,
    /// Sign resolving v × w = ±x̄ (or v = ±w̄), fixed at the first node.
    pub sign: f64,
    /// Max over nodes of |v × w − sign·x̄| (alignment of the frames).
    pub alignment: f64,
    /// Max over nodes of |γ̄ − γ − λv − ηw| with (λ, η) recovered by projection.
    pub positional: f64,
    pub conditions: Vec<ConditionResidual>,
}

impl MateResidualReport {
    pub fn max_over_all(&self) -> f64 {
        self.conditions
            .iter()
            .map(|c| c.max)
            .fold(self.alignment.max(self.positional), f64::max)
    }
}

fn frenet_vw(fd: &FrenetData, kind: MateKind) -> (Vec3, Vec3) {
    match kind {
        MateKind::Nbb | MateKind::Nbt => (fd.normal, fd.binormal),
        MateKind::Tnt => (fd.tangent, fd.normal),
        _ => unreachable!("framed kind"),
    }
}

fn frenet_xbar(fd: &FrenetData, kind: MateKind) -> Vec3 {
    match kind {
        MateKind::Nbb => fd.binormal,
        MateKind::Tnt | MateKind::Nbt => fd.tangent,
        _ => unreachable!("framed kind"),
    }
}

/// Checks whether `mate` is a (v, w, x̄)-mate of `original` for a
/// non-degenerate kind: frame alignment, positional identity, and the kind's
/// condition system with (λ, η) recovered by projection.
pub fn mate_residual(
    original: &CurveSource,
    mate: &CurveSource,
    kind: MateKind,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<MateResidualReport> {
    if kind.is_framed() {
        return Err(Error::InvalidInput(format!(
            "{} is a framed kind; use framed_mate_residual",
            kind.name()
        )));
    }
    let ts = grid.nodes();
    let coeff = |t: f64, pick_lambda: bool| -> Result<f64> {
        let fd = frenet_apparatus(&original.jet(t)?, tol)?;
        let d = mate.jet(t)?.d0 - original.jet(t)?.d0;
        let (v, w) = frenet_vw(&fd, kind);
        Ok(if pick_lambda { d.dot(v) } else { d.dot(w) })
    };
    let mut sign = 0.0;
    let mut alignment = 0.0_f64;
    let mut positional = 0.0_f64;
    let mut lambda = Vec::with_capacity(ts.len());
    let mut eta = Vec::with_capacity(ts.len());
    let mut apparatus = Vec::with_capacity(ts.len());
    for &t in &ts {
        let fd = frenet_apparatus(&original.jet(t)?, tol)?;
        let fd_bar = frenet_apparatus(&mate.jet(t)?, tol)?;
        let (v, w) = frenet_vw(&fd, kind);
        let xbar = frenet_xbar(&fd_bar, kind);
        let cross = v.cross(w);
        if sign == 0.0 {
            sign = sign_of(cross.dot(xbar));
        }
        alignment = alignment.max((cross - xbar * sign).norm());
        let d = mate.jet(t)?.d0 - original.jet(t)?.d0;
        let (l, e) = (d.dot(v), d.dot(w));
        positional = positional.max((d - v * l - w * e).norm());
        lambda.push(l);
        eta.push(e);
        apparatus.push(fd);
    }
    let lambda_dot = derivative_on_grid(grid, |t| coeff(t, true))?;
    let eta_dot = derivative_on_grid(grid, |t| coeff(t, false))?;
    let conditions = match kind {
        MateKind::Nbb => vec![
            max_residual(
                "lambda - 1/kappa",
                &ts,
                (0..ts.len()).map(|i| lambda[i] - 1.0 / apparatus[i].kappa),
            ),
            max_residual(
                "eta + dkappa/(kappa^2|dg|tau)",
                &ts,
                (0..ts.len())
                    .map(|i| -> Result<f64> {
                        let jet = original.jet(ts[i])?;
                        let kd = kappa_dot(&jet, tol)?;
                        let fd = &apparatus[i];
                        Ok(eta[i] + kd / (fd.speed * fd.kappa * fd.kappa * fd.tau))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter(),
            ),
        ],
        MateKind::Tnt => vec![
            max_residual(
                "|dg| + dlambda/dt - eta|dg|kappa",
                &ts,
                (0..ts.len()).map(|i| {
                    apparatus[i].speed + lambda_dot[i]
                        - eta[i] * apparatus[i].speed * apparatus[i].kappa
                }),
            ),
            max_residual(
                "deta/dt + lambda|dg|kappa",
                &ts,
                (0..ts.len())
                    .map(|i| eta_dot[i] + lambda[i] * apparatus[i].speed * apparatus[i].kappa),
            ),
        ],
        MateKind::Nbt => vec![
            max_residual(
                "dlambda/dt - eta|dg|tau",
                &ts,
                (0..ts.len())
                    .map(|i| lambda_dot[i] - eta[i] * apparatus[i].speed * apparatus[i].tau),
            ),
            max_residual(
                "deta/dt + lambda|dg|tau",
                &ts,
                (0..ts.len())
                    .map(|i| eta_dot[i] + lambda[i] * apparatus[i].speed * apparatus[i].tau),
            ),
        ],
        _ => unreachable!(),
    };
    Ok(MateResidualReport {
        kind: kind.name().to_string(),
        sign,
        alignment,
        positional,
        conditions,
    })
}

fn framed_vw(s: &FramedState, kind: MateKind) -> (Vec3, Vec3) {
    match kind {
        MateKind::N1N2N2 | MateKind::N1N2Mu => (s.nu1, s.nu2),
        MateKind::MuN1Mu | MateKind::MuN1N2 => (s.mu, s.nu1),
        _ => unreachable!("non-degenerate kind"),
    }
}

fn framed_xbar(s: &FramedState, kind: MateKind) -> Vec3 {
    match kind {
        MateKind::N1N2N2 | MateKind::MuN1N2 => s.nu2,
        MateKind::MuN1Mu | MateKind::N1N2Mu => s.mu,
        _ => unreachable!("non-degenerate kind"),
    }
}

/// Checks whether `mate` is a (v, w, x̄)-mate of `original` for a framed kind.
///
/// θ is recovered from the mate frame per the kind's construction before
/// evaluating the condition equations.
pub fn framed_mate_residual(
    original: &FramedCurveSource,
    mate: &FramedCurveSource,
    kind: MateKind,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<MateResidualReport> {
    if !kind.is_framed() {
        return Err(Error::InvalidInput(format!(
            "{} is a non-degenerate kind; use mate_residual",
            kind.name()
        )));
    }
    let ts = grid.nodes();
    let coeff = |t: f64, pick_lambda: bool| -> Result<f64> {
        let s = original.state(t)?;
        let d = mate.state(t)?.gamma - s.gamma;
        let (v, w) = framed_vw(&s, kind);
        Ok(if pick_lambda { d.dot(v) } else { d.dot(w) })
    };
    let mut sign = 0.0;
    let mut alignment = 0.0_f64;
    let mut positional = 0.0_f64;
    let mut lambda = Vec::with_capacity(ts.len());
    let mut eta = Vec::with_capacity(ts.len());
    let mut thetas = Vec::with_capacity(ts.len());
    let curv = curvature_on_grid(original, grid, tol)?;
    for &t in &ts {
        let s = original.state(t)?;
        let sbar = mate.state(t)?;
        let (v, w) = framed_vw(&s, kind);
        let xbar = framed_xbar(&sbar, kind);
        let cross = v.cross(w);
        if sign == 0.0 {
            sign = sign_of(cross.dot(xbar));
        }
        alignment = alignment.max((cross - xbar * sign).norm());
        let d = sbar.gamma - s.gamma;
        let (l, e) = (d.dot(v), d.dot(w));
        positional = positional.max((d - v * l - w * e).norm());
        lambda.push(l);
        eta.push(e);
        // recover θ from the mate frame per the construction of each kind
        let theta = match kind {
            // ν̄₁ = sinθ ν₁ + cosθ ν₂
            MateKind::N1N2N2 => f64::atan2(sbar.nu1.dot(s.nu1), sbar.nu1.dot(s.nu2)),
            // ν̄₁ = cosθ μ − sinθ ν₁
            MateKind::MuN1Mu => f64::atan2(-sbar.nu1.dot(s.nu1), sbar.nu1.dot(s.mu)),
            // ν̄₁ = sinθ μ + cosθ ν₁
            MateKind::MuN1N2 => f64::atan2(sbar.nu1.dot(s.mu), sbar.nu1.dot(s.nu1)),
            // ν̄₁ = cosθ ν₁ − sinθ ν₂
            MateKind::N1N2Mu => f64::atan2(-sbar.nu1.dot(s.nu2), sbar.nu1.dot(s.nu1)),
            _ => unreachable!(),
        };
        thetas.push(theta);
    }
    let lambda_dot = derivative_on_grid(grid, |t| coeff(t, true))?;
    let eta_dot = derivative_on_grid(grid, |t| coeff(t, false))?;
    let n = ts.len();
    let conditions = match kind {
        MateKind::N1N2N2 => vec![
            max_residual(
                "alpha + lambda*m + eta*n",
                &ts,
                (0..n).map(|i| curv[i].alpha + lambda[i] * curv[i].m + eta[i] * curv[i].n),
            ),
            max_residual(
                "(dlambda - eta*l)sin + (lambda*l + deta)cos",
                &ts,
                (0..n).map(|i| {
                    let (sin, cos) = thetas[i].sin_cos();
                    (lambda_dot[i] - eta[i] * curv[i].l) * sin
                        + (lambda[i] * curv[i].l + eta_dot[i]) * cos
                }),
            ),
        ],
        MateKind::MuN1Mu => vec![
            max_residual(
                "-lambda*m + deta/dt",
                &ts,
                (0..n).map(|i| -lambda[i] * curv[i].m + eta_dot[i]),
            ),
            max_residual(
                "alpha + dlambda/dt + eta*m",
                &ts,
                (0..n).map(|i| curv[i].alpha + lambda_dot[i] + eta[i] * curv[i].m),
            ),
        ],
        MateKind::MuN1N2 => vec![
            max_residual(
                "-lambda*n + eta*l",
                &ts,
                (0..n).map(|i| -lambda[i] * curv[i].n + eta[i] * curv[i].l),
            ),
            max_residual(
                "(alpha + dlambda + eta*m)sin + (-lambda*m + deta)cos",
                &ts,
                (0..n).map(|i| {
                    let (sin, cos) = thetas[i].sin_cos();
                    (curv[i].alpha + lambda_dot[i] + eta[i] * curv[i].m) * sin
                        + (-lambda[i] * curv[i].m + eta_dot[i]) * cos
                }),
            ),
        ],
        MateKind::N1N2Mu => vec![
            max_residual(
                "dlambda/dt - eta*l",
                &ts,
                (0..n).map(|i| lambda_dot[i] - eta[i] * curv[i].l),
            ),
            max_residual(
                "lambda*l + deta/dt",
                &ts,
                (0..n).map(|i| lambda[i] * curv[i].l + eta_dot[i]),
            ),
        ],
        _ => unreachable!(),
    };
    Ok(MateResidualReport {
        kind: kind.name().to_string(),
        sign,
        alignment,
        positional,
        conditions,
    })
}

/// The two-vector mate relations of framed curves: the mate is displaced
/// along a single frame vector v and v must equal the mate's w̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PairKind {
    /// (ν₁, ν̄₁)-mates with constant λ
    Bertrand,
    /// (ν₁, ν̄₂)-mates with constant λ
    Mannheim,
    /// (ν₁, μ̄)-mates: requires ℓ = 0 and α + λm = 0
    Nu1MuBar,
    /// (ν₂, μ̄)-mates: requires ℓ = 0 and α + λn = 0
    Nu2MuBar,
    /// (μ, ν̄₁)-mates: requires m cosθ − n sinθ = 0
    MuNu1Bar,
    /// (μ, ν̄₂)-mates: same condition as (μ, ν̄₁)
    MuNu2Bar,
}

impl PairKind {
    pub fn name(self) -> &'static str {
        match self {
            PairKind::Bertrand => "bertrand-framed",
            PairKind::Mannheim => "mannheim-framed",
            PairKind::Nu1MuBar => "nu1-mubar",
            PairKind::Nu2MuBar => "nu2-mubar",
            PairKind::MuNu1Bar => "mu-nu1bar",
            PairKind::MuNu2Bar => "mu-nu2bar",
        }
    }
}

/// Checks whether `mate` is a (v, w̄)-mate of `original`: alignment v = ±w̄,
/// positional identity with a single coefficient λ, and the kind's
/// existence-condition residuals.
pub fn pair_mate_residual(
    original: &FramedCurveSource,
    mate: &FramedCurveSource,
    kind: PairKind,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<MateResidualReport> {
    let ts = grid.nodes();
    let curv = curvature_on_grid(original, grid, tol)?;
    let mut sign = 0.0;
    let mut alignment = 0.0_f64;
    let mut positional = 0.0_f64;
    let mut lambda = Vec::with_capacity(ts.len());
    let mut extras: Vec<f64> = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let s = original.state(t)?;
        let sbar = mate.state(t)?;
        let v = match kind {
            PairKind::Bertrand | PairKind::Mannheim | PairKind::Nu1MuBar => s.nu1,
            PairKind::Nu2MuBar => s.nu2,
            PairKind::MuNu1Bar | PairKind::MuNu2Bar => s.mu,
        };
        let wbar = match kind {
            PairKind::Bertrand => sbar.nu1,
            PairKind::Mannheim | PairKind::MuNu2Bar => sbar.nu2,
            PairKind::Nu1MuBar | PairKind::Nu2MuBar => sbar.mu,
            PairKind::MuNu1Bar => sbar.nu1,
        };
        if sign == 0.0 {
            sign = sign_of(v.dot(wbar));
        }
        alignment = alignment.max((v - wbar * sign).norm());
        let d = sbar.gamma - s.gamma;
        let l = d.dot(v);
        positional = positional.max((d - v * l).norm());
        lambda.push(l);
        let c = &curv[i];
        let extra = match kind {
            // θ from ν̄₂ = cosθ ν₂ − sinθ μ
            PairKind::Bertrand => {
                let theta = f64::atan2(-sbar.nu2.dot(s.mu), sbar.nu2.dot(s.nu2));
                l * c.l * theta.cos() - (c.alpha + l * c.m) * theta.sin()
            }
            // θ from ν̄₁ = sinθ ν₂ + cosθ μ
            PairKind::Mannheim => {
                let theta = f64::atan2(sbar.nu1.dot(s.nu2), sbar.nu1.dot(s.mu));
                l * c.l * theta.sin() + (c.alpha + l * c.m) * theta.cos()
            }
            PairKind::Nu1MuBar => c.alpha + l * c.m,
            PairKind::Nu2MuBar => c.alpha + l * c.n,
            // θ from μ̄ = cosθ ν₁ − sinθ ν₂
            PairKind::MuNu1Bar | PairKind::MuNu2Bar => {
                let theta = f64::atan2(-sbar.mu.dot(s.nu2), sbar.mu.dot(s.nu1));
                c.m * theta.cos() - c.n * theta.sin()
            }
        };
        extras.push(extra);
    }
    let mut conditions = vec![max_residual("existence condition", &ts, extras.into_iter())];
    match kind {
        PairKind::Bertrand | PairKind::Mannheim => {
            let mean = lambda.iter().sum::<f64>() / lambda.len() as f64;
            conditions.push(max_residual(
                "lambda constant",
                &ts,
                lambda.iter().map(|l| l - mean),
            ));
        }
        PairKind::Nu1MuBar | PairKind::Nu2MuBar => {
            conditions.push(max_residual(
                "l = 0",
                &ts,
                curv.iter().map(|c| c.l),
            ));
        }
        PairKind::MuNu1Bar | PairKind::MuNu2Bar => {}
    }
    Ok(MateResidualReport {
        kind: kind.name().to_string(),
        sign,
        alignment,
        positional,
        conditions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::AnalyticCurve;
    use crate::framedkit::FramedEval;

    const PI: f64 = std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn helix() -> CurveSource {
        CurveSource::Analytic(AnalyticCurve::Helix { a: 1.0, b: 1.0 })
    }

    fn astroid_framed() -> FramedCurveSource {
        FramedCurveSource::by_name("framed-astroid", &[]).unwrap()
    }

    #[test]
    fn nbb_helix_constant_coefficients() {
        let grid = SampleGrid::new(0.0, 2.0, 201).unwrap();
        let r = nbb_mate(&helix(), &grid, &tol()).unwrap();
        for i in 0..r.ts.len() {
            assert!((r.lambda[i] - 2.0).abs() < 1e-12);
            assert!(r.eta[i].abs() < 1e-10);
            // mate = γ + 2n = (−cos t, −sin t, t)
            let t = r.ts[i];
            let want = Vec3::new(-t.cos(), -t.sin(), t);
            assert!((r.mate[i] - want).norm() < 1e-10);
            // h = |γ̇|τ/κ = √2
            assert!((r.h.as_ref().unwrap()[i] - 2.0_f64.sqrt()).abs() < 1e-8);
            assert!((r.kappa_bar[i] - 0.5).abs() < 1e-8);
            assert!((r.tau_bar[i] - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn nbb_rejects_planar_curve() {
        let c = CurveSource::Analytic(AnalyticCurve::Circle { radius: 1.0 });
        let grid = SampleGrid::new(0.0, 2.0, 51).unwrap();
        assert!(matches!(
            nbb_mate(&c, &grid, &tol()),
            Err(Error::TorsionVanishes(_))
        ));
    }

    #[test]
    fn tnt_helix_mate_tangent_parallel_to_binormal() {
        let grid = SampleGrid::new(0.0, 2.0, 201).unwrap();
        let r = tnt_mate(&helix(), (0.0, 3.0), &grid, &tol()).unwrap();
        // fd tangent of the mate vs predicted frame e1
        let h = grid.spacing();
        for i in (2..199).step_by(13) {
            let d = (r.mate[i + 1] - r.mate[i - 1]) / (2.0 * h);
            let t_fd = d / d.norm();
            assert!(
                (t_fd - r.frame[i].e1).norm() < 1e-4,
                "node {i}: {:?} vs {:?}",
                t_fd,
                r.frame[i].e1
            );
            // |γ̄̇| = η|γ̇|τ
            let fd = frenet_apparatus(&helix().jet(r.ts[i]).unwrap(), &tol()).unwrap();
            assert!((d.norm() - r.eta[i] * fd.speed * fd.tau).abs() < 1e-4);
        }
        // conditions hold along the trajectory
        for c in &r.conditions {
            assert!(c.max < 1e-6, "{}: {}", c.name, c.max);
        }
    }

    #[test]
    fn tnt_rejects_zero_eta_and_planar() {
        let grid = SampleGrid::new(0.0, 1.0, 51).unwrap();
        assert!(matches!(
            tnt_mate(&helix(), (1.0, 0.0), &grid, &tol()),
            Err(Error::EtaVanishes(_))
        ));
        let circle = CurveSource::Analytic(AnalyticCurve::Circle { radius: 1.0 });
        assert!(matches!(
            tnt_mate(&circle, (0.0, 1.0), &grid, &tol()),
            Err(Error::TorsionVanishes(_))
        ));
    }

    #[test]
    fn nbt_conserves_radius_and_predicts_curvature() {
        let grid = SampleGrid::new(0.0, 1.0, 101).unwrap();
        let r = nbt_mate(&helix(), (0.5, 0.5), &grid, &tol()).unwrap();
        let drift = r
            .conditions
            .iter()
            .find(|c| c.name.contains("drift"))
            .unwrap();
        assert!(drift.max <= 1e-10, "drift {}", drift.max);
        for i in 0..r.ts.len() {
            let denom = 1.0 - r.lambda[i] * 0.5;
            assert!((r.kappa_bar[i] - 0.5 / denom).abs() < 1e-9);
            assert!((r.tau_bar[i] - 0.5 / denom).abs() < 1e-9);
        }
    }

    #[test]
    fn nbt_rejects_zero_init() {
        let grid = SampleGrid::new(0.0, 1.0, 51).unwrap();
        assert!(matches!(
            nbt_mate(&helix(), (0.0, 0.0), &grid, &tol()),
            Err(Error::ZeroCoefficients)
        ));
    }

    #[test]
    fn mu_n1_mu_reproduces_small_astroid() {
        // λ = 125 cos 2t/12, η = 25 cos t sin t/3; base = (cos³t, sin³t, cos 2t)
        let grid = SampleGrid::new(0.0, 2.0 * PI, 401).unwrap();
        let inputs = FramedMateInputs::MuN1Mu {
            lambda0: 125.0 / 12.0,
            eta0: 0.0,
            theta: Theta::constant(0.0),
        };
        let r = framed_mate(&astroid_framed(), &inputs, &grid, &tol()).unwrap();
        for i in (0..r.ts.len()).step_by(17) {
            let t = r.ts[i];
            assert!(
                (r.lambda[i] - 125.0 * (2.0 * t).cos() / 12.0).abs() < 1e-7,
                "lambda at t = {t}"
            );
            assert!((r.eta[i] - 25.0 * t.cos() * t.sin() / 3.0).abs() < 1e-7);
            let want = Vec3::new(
                t.cos().powi(3),
                t.sin().powi(3),
                (2.0 * t).cos(),
            );
            assert!((r.states[i].gamma - want).norm() < 1e-7, "base at t = {t}");
        }
        // residual limited by the one-sided boundary stencil of the check
        for c in &r.conditions {
            assert!(c.max < 1e-5, "{}: {}", c.name, c.max);
        }
    }

    #[test]
    fn n1n2_mu_conserves_radius() {
        let grid = SampleGrid::new(0.0, 1.0, 101).unwrap();
        let inputs = FramedMateInputs::N1N2Mu {
            lambda0: 1.0,
            eta0: 2.0,
            theta: Theta::constant(0.3),
        };
        let r = framed_mate(&astroid_framed(), &inputs, &grid, &tol()).unwrap();
        let drift = r
            .conditions
            .iter()
            .find(|c| c.name.contains("drift"))
            .unwrap();
        assert!(drift.max <= 1e-10);
        // ℓ = −3/5 constant: λ̇ = ηℓ, η̇ = −λℓ rotates (λ, η) by angle −ℓt = 3t/5
        for i in (0..r.ts.len()).step_by(10) {
            let a = 0.6 * r.ts[i];
            let want_l = 1.0 * a.cos() - 2.0 * a.sin();
            let want_e = 1.0 * a.sin() + 2.0 * a.cos();
            assert!((r.lambda[i] - want_l).abs() < 1e-9);
            assert!((r.eta[i] - want_e).abs() < 1e-9);
        }
    }

    #[test]
    fn n1n2_mu_rejects_zero_init() {
        let grid = SampleGrid::new(0.0, 1.0, 51).unwrap();
        let inputs = FramedMateInputs::N1N2Mu {
            lambda0: 0.0,
            eta0: 0.0,
            theta: Theta::constant(0.0),
        };
        assert!(matches!(
            framed_mate(&astroid_framed(), &inputs, &grid, &tol()),
            Err(Error::ZeroCoefficients)
        ));
    }

    #[test]
    fn mu_n1_n2_on_framed_circle() {
        // (ℓ,m,n,α) = (0,0,1,1): λ = 0 and the differential condition forces
        // η̇ = −tanθ, giving ᾱ = 1/cosθ.
        let src = FramedCurveSource::by_name("framed-circle", &[]).unwrap();
        let grid = SampleGrid::new(0.0, 2.0, 101).unwrap();
        let theta0 = 0.4_f64;
        let inputs = FramedMateInputs::MuN1N2 {
            eta: Theta::linear(1.0, -theta0.tan()),
            theta: Theta::constant(theta0),
        };
        let r = framed_mate(&src, &inputs, &grid, &tol()).unwrap();
        for i in (0..r.ts.len()).step_by(10) {
            assert!(r.lambda[i].abs() < 1e-12);
            assert!((r.curvature[i].alpha - 1.0 / theta0.cos()).abs() < 1e-8);
        }
        for c in &r.conditions {
            assert!(c.max < 1e-8, "{}: {}", c.name, c.max);
        }
    }

    #[test]
    fn mu_n1_n2_infeasible_theta_errors() {
        let src = FramedCurveSource::by_name("framed-circle", &[]).unwrap();
        let grid = SampleGrid::new(0.0, 2.0, 101).unwrap();
        // η̇ inconsistent with θ: differential condition cannot hold
        let inputs = FramedMateInputs::MuN1N2 {
            eta: Theta::linear(1.0, 1.0),
            theta: Theta::constant(0.4),
        };
        assert!(matches!(
            framed_mate(&src, &inputs, &grid, &tol()),
            Err(Error::ConditionInfeasible { .. })
        ));
    }

    #[test]
    fn n1n2_n2_astroid_evolute_coefficients() {
        // θ = π/2 with null coefficient −(875/12)cos 2t reproduces
        // λ = −(175/4) cos t sin t, η = (875/12) cos 2t.
        let grid = SampleGrid::new(0.0, 2.0 * PI, 401).unwrap();
        let inputs = FramedMateInputs::N1N2N2 {
            theta: Theta::constant(PI / 2.0),
            null_coeff: Some(Theta::new(
                |t| -875.0 / 12.0 * (2.0 * t).cos(),
                |t| 875.0 / 6.0 * (2.0 * t).sin(),
            )),
        };
        let r = framed_mate(&astroid_framed(), &inputs, &grid, &tol()).unwrap();
        for i in (0..r.ts.len()).step_by(17) {
            let t = r.ts[i];
            assert!(
                (r.lambda[i] + 175.0 / 4.0 * t.cos() * t.sin()).abs() < 1e-9,
                "lambda at t = {t}"
            );
            assert!((r.eta[i] - 875.0 / 12.0 * (2.0 * t).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn constructed_mates_pass_their_residual_check() {
        let grid = SampleGrid::new(0.0, 2.0, 201).unwrap();
        let r = nbb_mate(&helix(), &grid, &tol()).unwrap();
        // mate of the helix is again analytic: γ + 2n = (−cos t, −sin t, t)
        let mate = CurveSource::Analytic(AnalyticCurve::Helix { a: -1.0, b: 1.0 });
        for (p, t) in r.mate.iter().zip(&r.ts) {
            assert!((mate.jet(*t).unwrap().d0 - *p).norm() < 1e-10);
        }
        let rep = mate_residual(&helix(), &mate, MateKind::Nbb, &grid, &tol()).unwrap();
        assert!(rep.alignment < 1e-10, "alignment {}", rep.alignment);
        assert!(rep.positional < 1e-10);
        for c in &rep.conditions {
            assert!(c.max < 1e-8, "{}: {}", c.name, c.max);
        }
    }

    #[test]
    fn translated_mate_fails_positionally() {
        let grid = SampleGrid::new(0.0, 2.0, 101).unwrap();
        // helix translated along x by 1: displacement has components off the
        // (n, b) plane in general
        let shifted = CurveSource::Analytic(AnalyticCurve::TrigPoly(Box::new([
            crate::curvekit::TrigComponent {
                constant: 1.0,
                harmonics: vec![(1.0, 1.0, 0.0)],
            },
            crate::curvekit::TrigComponent {
                constant: 0.0,
                harmonics: vec![(1.0, 0.0, 1.0)],
            },
            crate::curvekit::TrigComponent {
                constant: 0.0,
                harmonics: vec![],
            },
        ])));
        // z-component differs (helix has z = t, this curve has z = 0), so use
        // alignment only as the discriminator: frames differ grossly.
        let rep = mate_residual(&helix(), &shifted, MateKind::Nbb, &grid, &tol());
        match rep {
            Ok(rep) => assert!(rep.max_over_all() > 1e-2),
            Err(_) => {} // degenerate frames on the candidate also count as failure
        }
    }

    #[test]
    fn pair_residual_bertrand_framed_circle() {
        // framed-circle has ℓ = 0; γ̄ = γ + λν₁ with constant λ and the same
        // frame is a Bertrand mate with θ = 0.
        struct Lifted;
        impl FramedEval for Lifted {
            fn state(&self, t: f64) -> Result<FramedState> {
                let base = FramedCurveSource::by_name("framed-circle", &[])
                    .unwrap()
                    .state(t)?;
                Ok(FramedState::new(
                    t,
                    base.gamma + Vec3::new(0.0, 0.0, 2.0),
                    base.nu1,
                    base.nu2,
                ))
            }
            fn derivs(&self, t: f64) -> Result<crate::framedkit::FramedDerivs> {
                FramedCurveSource::by_name("framed-circle", &[])
                    .unwrap()
                    .derivs(t)
            }
        }
        let src = FramedCurveSource::by_name("framed-circle", &[]).unwrap();
        let mate = FramedCurveSource::new(Lifted);
        let grid = SampleGrid::new(0.0, 2.0 * PI, 101).unwrap();
        let rep = pair_mate_residual(&src, &mate, PairKind::Bertrand, &grid, &tol()).unwrap();
        assert!(rep.alignment < 1e-12);
        assert!(rep.positional < 1e-12);
        for c in &rep.conditions {
            assert!(c.max < 1e-10, "{}: {}", c.name, c.max);
        }
    }

    #[test]
    fn frenet_kind_rejected_by_framed_checker() {
        let src = astroid_framed();
        let grid = SampleGrid::new(0.0, 1.0, 51).unwrap();
        assert!(framed_mate_residual(&src, &src, MateKind::Nbb, &grid, &tol()).is_err());
    }
}
