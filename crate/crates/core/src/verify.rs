//! Verification harness: residual checks of the frame ODEs against
//! finite-difference oracles, plus a registry of named end-to-end checks
//! used by the CLI and the acceptance tests.

use crate::curvekit::{fd_derivative, AnalyticCurve, CurveSource, FdAccuracy, SampleGrid};
use crate::evolute_involute::{
    framed_evolute, framed_involute, framed_roundtrips, roundtrip_ev_of_inv, roundtrip_inv_of_ev,
    t0_involute, FramedRoundTripParams, RoundTripDirection,
};
use crate::framedkit::{
    bishop_frame, curvature_on_grid, reconstruct, states_on_grid, CurvatureFns, FramedCurveSource,
    FramedState, Theta,
};
use crate::frenet::apparatus_on_grid;
use crate::geom3::Vec3;
use crate::mates::nbt_mate;
use crate::{Error, Result, Tolerances};

/// Outcome of one residual check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub max_residual: f64,
    /// Grid node at which the max residual occurred.
    pub node_of_max: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

impl ResidualReport {
    fn new(name: &str, max_residual: f64, node_of_max: f64, tolerance: f64) -> Self {
        ResidualReport {
            name: name.to_string(),
            max_residual,
            node_of_max,
            tolerance,
            verdict: max_residual <= tolerance,
        }
    }
}

fn track(max: &mut f64, at: &mut f64, t: f64, v: f64) {
    if v > *max {
        *max = v;
        *at = t;
    }
}

/// Widens the grid by 4 nodes per side when the curve is defined there, so
/// boundary derivatives keep the high-order central stencil.
fn fd_grid_for(domain: Option<(f64, f64)>, grid: &SampleGrid) -> Result<(SampleGrid, usize)> {
    let h = grid.spacing();
    let fits = match domain {
        None => true,
        Some((a, b)) => grid.t0 - 4.0 * h >= a && grid.t1 + 4.0 * h <= b,
    };
    if fits {
        Ok((
            SampleGrid::new(grid.t0 - 4.0 * h, grid.t1 + 4.0 * h, grid.count + 8)?,
            4,
        ))
    } else {
        Ok((grid.clone(), 0))
    }
}

/// Compares finite differences of the Frenet frame (t, n, b) against the
/// Frenet–Serret right-hand side ṫ = |γ̇|κn, ṅ = −|γ̇|κt + |γ̇|τb, ḃ = −|γ̇|τn.
pub fn frenet_ode_residual(
    curve: &CurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<ResidualReport> {
    let (fd_grid, off) = fd_grid_for(curve.domain(), grid)?;
    let apparatus = apparatus_on_grid(curve, &fd_grid, tol)?;
    let ts = fd_grid.nodes();
    let tangents: Vec<Vec3> = apparatus.iter().map(|f| f.tangent).collect();
    let normals: Vec<Vec3> = apparatus.iter().map(|f| f.normal).collect();
    let binormals: Vec<Vec3> = apparatus.iter().map(|f| f.binormal).collect();
    let dt = fd_derivative(&ts, &tangents, FdAccuracy::Four)?;
    let dn = fd_derivative(&ts, &normals, FdAccuracy::Four)?;
    let db = fd_derivative(&ts, &binormals, FdAccuracy::Four)?;
    let mut max = 0.0_f64;
    let mut at = grid.t0;
    for i in off..off + grid.count {
        let f = &apparatus[i];
        let vk = f.speed * f.kappa;
        let vt = f.speed * f.tau;
        track(&mut max, &mut at, f.t, (dt[i] - f.normal * vk).norm());
        track(
            &mut max,
            &mut at,
            f.t,
            (dn[i] + f.tangent * vk - f.binormal * vt).norm(),
        );
        track(&mut max, &mut at, f.t, (db[i] + f.normal * vt).norm());
    }
    Ok(ResidualReport::new("frenet-ode", max, at, 1e-5))
}

/// Compares finite differences of (ν₁, ν₂, μ, γ) against the Frenet-type
/// right-hand side ν̇₁ = ℓν₂ + mμ, ν̇₂ = −ℓν₁ + nμ, μ̇ = −mν₁ − nν₂, γ̇ = αμ.
pub fn framed_ode_residual(
    source: &FramedCurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<ResidualReport> {
    let (fd_grid, off) = fd_grid_for(source.domain(), grid)?;
    let states = states_on_grid(source, &fd_grid)?;
    let curv = curvature_on_grid(source, &fd_grid, tol)?;
    let ts = fd_grid.nodes();
    let nu1: Vec<Vec3> = states.iter().map(|s| s.nu1).collect();
    let nu2: Vec<Vec3> = states.iter().map(|s| s.nu2).collect();
    let mu: Vec<Vec3> = states.iter().map(|s| s.mu).collect();
    let gamma: Vec<Vec3> = states.iter().map(|s| s.gamma).collect();
    let d1 = fd_derivative(&ts, &nu1, FdAccuracy::Four)?;
    let d2 = fd_derivative(&ts, &nu2, FdAccuracy::Four)?;
    let dm = fd_derivative(&ts, &mu, FdAccuracy::Four)?;
    let dg = fd_derivative(&ts, &gamma, FdAccuracy::Four)?;
    let mut max = 0.0_f64;
    let mut at = grid.t0;
    for i in off..off + grid.count {
        let s = &states[i];
        let c = &curv[i];
        track(
            &mut max,
            &mut at,
            s.t,
            (d1[i] - s.nu2 * c.l - s.mu * c.m).norm(),
        );
        track(
            &mut max,
            &mut at,
            s.t,
            (d2[i] + s.nu1 * c.l - s.mu * c.n).norm(),
        );
        track(
            &mut max,
            &mut at,
            s.t,
            (dm[i] + s.nu1 * c.m + s.nu2 * c.n).norm(),
        );
        track(&mut max, &mut at, s.t, (dg[i] - s.mu * c.alpha).norm());
    }
    Ok(ResidualReport::new("framed-ode", max, at, 1e-6))
}

const PI: f64 = std::f64::consts::PI;

type Check = fn(&Tolerances) -> Result<ResidualReport>;

fn check_helix_frenet(tol: &Tolerances) -> Result<ResidualReport> {
    let curve = CurveSource::Analytic(AnalyticCurve::Helix { a: 1.0, b: 1.0 });
    let grid = SampleGrid::new(0.0, 2.0 * PI, 2001)?;
    let mut r = frenet_ode_residual(&curve, &grid, tol)?;
    r.name = "helix-frenet-ode".into();
    Ok(r)
}

fn check_circle_frenet(tol: &Tolerances) -> Result<ResidualReport> {
    let curve = CurveSource::Analytic(AnalyticCurve::Circle { radius: 1.0 });
    let grid = SampleGrid::new(0.0, 2.0 * PI, 2001)?;
    let mut r = frenet_ode_residual(&curve, &grid, tol)?;
    r.name = "circle-frenet-ode".into();
    r.tolerance = 1e-6;
    r.verdict = r.max_residual <= r.tolerance;
    Ok(r)
}

fn check_astroid_framed_ode(tol: &Tolerances) -> Result<ResidualReport> {
    let source = FramedCurveSource::by_name("framed-astroid", &[])?;
    let grid = SampleGrid::new(0.0, 2.0 * PI, 2001)?;
    let mut r = framed_ode_residual(&source, &grid, tol)?;
    r.name = "astroid-framed-ode".into();
    Ok(r)
}

fn check_reconstructed_framed_ode(tol: &Tolerances) -> Result<ResidualReport> {
    // rebuild the unit-circle framed curve from its constant curvature, then
    // check the table-backed result against the frame ODE on the interior
    let curv = CurvatureFns::constant(0.0, 0.0, 1.0, 1.0);
    let init = FramedState::new(
        0.0,
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(1.0, 0.0, 0.0),
    );
    let grid = SampleGrid::new(0.0, 2.0 * PI, 629)?;
    let states = reconstruct(&curv, &init, &grid, tol)?;
    let source = FramedCurveSource::from_states(states)?;
    let h = grid.spacing();
    let inner = SampleGrid::new(grid.t0 + 5.0 * h, grid.t1 - 5.0 * h, grid.count - 10)?;
    let mut r = framed_ode_residual(&source, &inner, tol)?;
    r.name = "reconstructed-framed-ode".into();
    Ok(r)
}

fn check_astroid_involute(tol: &Tolerances) -> Result<ResidualReport> {
    let source = FramedCurveSource::by_name("framed-astroid", &[])?;
    let grid = SampleGrid::new(0.0, 2.0 * PI, 2001)?;
    let (r, data) = framed_involute(
        &source,
        Some((125.0 / 12.0, 0.0)),
        &Theta::constant(0.0),
        &grid,
        tol,
    )?;
    let mut max = 0.0_f64;
    let mut at = grid.t0;
    for (i, &t) in r.ts.iter().enumerate() {
        track(
            &mut max,
            &mut at,
            t,
            (data.lambda[i] - 125.0 * (2.0 * t).cos() / 12.0).abs(),
        );
        track(
            &mut max,
            &mut at,
            t,
            (data.eta[i] - 25.0 * t.cos() * t.sin() / 3.0).abs(),
        );
        let base = Vec3::new(t.cos().powi(3), t.sin().powi(3), (2.0 * t).cos());
        track(&mut max, &mut at, t, (r.states[i].gamma - base).norm());
    }
    Ok(ResidualReport::new("astroid-involute", max, at, 1e-8))
}

fn check_astroid_evolute(tol: &Tolerances) -> Result<ResidualReport> {
    let source = FramedCurveSource::by_name("framed-astroid", &[])?;
    let grid = SampleGrid::new(0.0, 2.0 * PI, 2001)?;
    let null_coeff = Theta::new(
        |t| -875.0 / 12.0 * (2.0 * t).cos(),
        |t| 875.0 / 6.0 * (2.0 * t).sin(),
    );
    let (r, data) = framed_evolute(&source, &Theta::constant(PI / 2.0), Some(&null_coeff), &grid, tol)?;
    let mut max = 0.0_f64;
    let mut at = grid.t0;
    for (i, &t) in r.ts.iter().enumerate() {
        let want = Vec3::new(t.cos().powi(3), t.sin().powi(3), (2.0 * t).cos()) * (637.0 / 12.0);
        track(&mut max, &mut at, t, (r.states[i].gamma - want).norm());
        track(
            &mut max,
            &mut at,
            t,
            (data.lambda[i] + 175.0 / 4.0 * t.cos() * t.sin()).abs(),
        );
        track(
            &mut max,
            &mut at,
            t,
            (data.eta[i] - 875.0 / 12.0 * (2.0 * t).cos()).abs(),
        );
    }
    Ok(ResidualReport::new("astroid-evolute", max, at, 1e-8))
}

fn check_circle_t0_involute(tol: &Tolerances) -> Result<ResidualReport> {
    let source = FramedCurveSource::by_name("framed-circle", &[])?;
    let grid = SampleGrid::new(0.0, 2.0 * PI, 1001)?;
    let r = t0_involute(&source, 0.0, &grid, tol)?;
    let mut max = 0.0_f64;
    let mut at = grid.t0;
    for (i, &t) in r.ts.iter().enumerate() {
        let want = Vec3::new(t.cos() + t * t.sin(), t.sin() - t * t.cos(), 0.0);
        track(&mut max, &mut at, t, (r.states[i].gamma - want).norm());
    }
    Ok(ResidualReport::new("circle-t0-involute", max, at, 1e-8))
}

fn check_helix_roundtrips(tol: &Tolerances) -> Result<ResidualReport> {
    let curve = CurveSource::Analytic(AnalyticCurve::Helix { a: 1.0, b: 1.0 });
    let grid = SampleGrid::new(0.0, 2.0, 201)?;
    let a = roundtrip_ev_of_inv(&curve, (0.0, 3.0), &grid, tol)?;
    let b = roundtrip_inv_of_ev(&curve, &grid, tol)?;
    let max = a.max_position_error.max(b.max_position_error);
    Ok(ResidualReport::new("helix-roundtrips", max, grid.t0, 1e-5))
}

fn check_astroid_framed_roundtrips(tol: &Tolerances) -> Result<ResidualReport> {
    let source = FramedCurveSource::by_name("framed-astroid", &[])?;
    let grid = SampleGrid::new(0.0, 2.0 * PI, 401)?;
    let a = framed_roundtrips(
        &source,
        RoundTripDirection::InvThenEv,
        &FramedRoundTripParams {
            theta: Theta::constant(0.3),
            init: (125.0 / 12.0, 0.0),
            null_coeff: None,
        },
        &grid,
        tol,
    )?;
    let b = framed_roundtrips(
        &source,
        RoundTripDirection::EvThenInv,
        &FramedRoundTripParams {
            theta: Theta::constant(PI / 2.0),
            init: (0.0, 0.0),
            null_coeff: Some(Theta::new(
                |t| -875.0 / 12.0 * (2.0 * t).cos(),
                |t| 875.0 / 6.0 * (2.0 * t).sin(),
            )),
        },
        &grid,
        tol,
    )?;
    let max = a
        .max_position_error
        .max(a.max_frame_error)
        .max(b.max_position_error)
        .max(b.max_frame_error);
    Ok(ResidualReport::new(
        "astroid-framed-roundtrips",
        max,
        grid.t0,
        1e-6,
    ))
}

fn check_nbt_conservation(tol: &Tolerances) -> Result<ResidualReport> {
    let curve = CurveSource::Analytic(AnalyticCurve::Helix { a: 1.0, b: 1.0 });
    let grid = SampleGrid::new(0.0, 1.0, 101)?;
    let r = nbt_mate(&curve, (0.5, 0.5), &grid, tol)?;
    let mut max = 0.0_f64;
    let mut at = grid.t0;
    for (i, &t) in r.ts.iter().enumerate() {
        let drift = (r.lambda[i] * r.lambda[i] + r.eta[i] * r.eta[i] - 0.5).abs();
        track(&mut max, &mut at, t, drift);
    }
    Ok(ResidualReport::new("nbt-conservation", max, at, 1e-10))
}

fn check_bishop_lbar(tol: &Tolerances) -> Result<ResidualReport> {
    let source = FramedCurveSource::by_name("framed-astroid", &[])?;
    let grid = SampleGrid::new(0.0, 2.0 * PI, 1001)?;
    let (rotated, _) = bishop_frame(&source, 0.2, &grid, tol)?;
    let h = grid.spacing();
    let inner = SampleGrid::new(grid.t0 + 2.0 * h, grid.t1 - 2.0 * h, grid.count - 4)?;
    let curv = curvature_on_grid(&rotated, &inner, tol)?;
    let mut max = 0.0_f64;
    let mut at = inner.t0;
    for (c, &t) in curv.iter().zip(inner.nodes().iter()) {
        track(&mut max, &mut at, t, c.l.abs());
    }
    Ok(ResidualReport::new("bishop-lbar", max, at, 1e-8))
}

const REGISTRY: &[(&str, Check)] = &[
    ("helix-frenet-ode", check_helix_frenet),
    ("circle-frenet-ode", check_circle_frenet),
    ("astroid-framed-ode", check_astroid_framed_ode),
    ("reconstructed-framed-ode", check_reconstructed_framed_ode),
    ("astroid-involute", check_astroid_involute),
    ("astroid-evolute", check_astroid_evolute),
    ("circle-t0-involute", check_circle_t0_involute),
    ("helix-roundtrips", check_helix_roundtrips),
    ("astroid-framed-roundtrips", check_astroid_framed_roundtrips),
    ("nbt-conservation", check_nbt_conservation),
    ("bishop-lbar", check_bishop_lbar),
];

/// Names of all registered checks, in execution order.
pub fn suite_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

/// Runs the named checks (or all of them for the single name "all") in
/// registry order and returns their reports.
pub fn run_suite(names: &[&str], tol: &Tolerances) -> Result<Vec<ResidualReport>> {
    let selected: Vec<&str> = if names == ["all"] {
        suite_names()
    } else {
        for n in names {
            if !REGISTRY.iter().any(|(name, _)| name == n) {
                return Err(Error::UnknownCheck((*n).to_string()));
            }
        }
        names.to_vec()
    };
    let mut reports = Vec::with_capacity(selected.len());
    for (name, check) in REGISTRY {
        if selected.contains(name) {
            reports.push(check(tol)?);
        }
    }
    Ok(reports)
}
