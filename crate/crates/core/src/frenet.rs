//! Frenet apparatus for non-degenerate space curves in a general parameter,
//! node-by-node non-degeneracy diagnostics, and the classical existence
//! checks (Bertrand, Mannheim, planar mate conditions) in arclength form.

use crate::curvekit::{
    arclength, equal_arclength_parameters, fd_derivative, CurveJet, CurveSource, FdAccuracy,
    SampleGrid,
};
use crate::geom3::{triple, Frame3, Vec3};
use crate::{Error, Result, Tolerances};

/// Frenet data of a non-degenerate curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub t: f64,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    /// κ = |γ̇ × γ̈| / |γ̇|³ > 0
    pub kappa: f64,
    /// τ = det(γ̇, γ̈, γ⃛) / |γ̇ × γ̈|²
    pub tau: f64,
    /// |γ̇|
    pub speed: f64,
}

impl FrenetData {
    pub fn frame(&self) -> Frame3 {
        Frame3 {
            e1: self.tangent,
            e2: self.normal,
            e3: self.binormal,
        }
    }
}

/// Frenet apparatus from an order-3 jet.
pub fn frenet_apparatus(jet: &CurveJet, tol: &Tolerances) -> Result<FrenetData> {
    if !jet.is_finite() {
        return Err(Error::NonFinite);
    }
    let speed = jet.d1.norm();
    if speed <= tol.unit {
        return Err(Error::SingularPoint(jet.t));
    }
    let c = jet.d1.cross(jet.d2);
    let cn = c.norm();
    if cn <= tol.unit {
        return Err(Error::DegeneratePoint(jet.t));
    }
    let tangent = jet.d1 / speed;
    let binormal = c / cn;
    let normal = binormal.cross(tangent);
    let kappa = cn / (speed * speed * speed);
    let tau = triple(jet.d1, jet.d2, jet.d3) / (cn * cn);
    Ok(FrenetData {
        t: jet.t,
        tangent,
        normal,
        binormal,
        kappa,
        tau,
        speed,
    })
}

/// dκ/dt in the curve parameter, from the order-3 jet:
/// with c = γ̇ × γ̈ and v = |γ̇|, κ̇ = (c·(γ̇ × γ⃛))/(|c| v³) − 3|c|(γ̇·γ̈)/v⁵.
pub fn kappa_dot(jet: &CurveJet, tol: &Tolerances) -> Result<f64> {
    let v = jet.d1.norm();
    if v <= tol.unit {
        return Err(Error::SingularPoint(jet.t));
    }
    let c = jet.d1.cross(jet.d2);
    let cn = c.norm();
    if cn <= tol.unit {
        return Err(Error::DegeneratePoint(jet.t));
    }
    let c_dot = jet.d1.cross(jet.d3);
    Ok(c.dot(c_dot) / (cn * v.powi(3)) - 3.0 * cn * jet.d1.dot(jet.d2) / v.powi(5))
}

/// Frenet data at every node of the grid.
pub fn apparatus_on_grid(
    curve: &CurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<Vec<FrenetData>> {
    grid.nodes()
        .iter()
        .map(|&t| frenet_apparatus(&curve.jet(t)?, tol))
        .collect()
}

/// Classification of a single grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum NodeClass {
    /// |γ̇| > εᵤ and |γ̇ × γ̈| > εᵤ
    Regular,
    /// |γ̇| ≤ εᵤ
    Singular,
    /// regular but |γ̇ × γ̈| ≤ εᵤ
    Degenerate,
}

/// Per-node non-degeneracy diagnostic.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NondegeneracyReport {
    pub nodes: Vec<f64>,
    pub classes: Vec<NodeClass>,
}

impl NondegeneracyReport {
    pub fn all_regular(&self) -> bool {
        self.classes.iter().all(|c| *c == NodeClass::Regular)
    }

    /// Nodes with the given classification.
    pub fn nodes_of(&self, class: NodeClass) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.classes)
            .filter(|(_, c)| **c == class)
            .map(|(t, _)| *t)
            .collect()
    }

    /// Maximal runs of consecutive non-regular nodes, as (t_start, t_end).
    pub fn offending_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut run: Option<(f64, f64)> = None;
        for (t, c) in self.nodes.iter().zip(&self.classes) {
            if *c == NodeClass::Regular {
                if let Some(r) = run.take() {
                    out.push(r);
                }
            } else {
                run = Some(match run {
                    Some((a, _)) => (a, *t),
                    None => (*t, *t),
                });
            }
        }
        if let Some(r) = run {
            out.push(r);
        }
        out
    }
}

/// Classifies every grid node as regular, singular or degenerate.
pub fn nondegeneracy_scan(
    curve: &CurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<NondegeneracyReport> {
    let nodes = grid.nodes();
    let mut classes = Vec::with_capacity(nodes.len());
    for &t in &nodes {
        let jet = curve.jet(t)?;
        let class = if jet.d1.norm() <= tol.unit {
            NodeClass::Singular
        } else if jet.d1.cross(jet.d2).norm() <= tol.unit {
            NodeClass::Degenerate
        } else {
            NodeClass::Regular
        };
        classes.push(class);
    }
    Ok(NondegeneracyReport { nodes, classes })
}

/// The classical mate-existence conditions, stated in arclength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ClassicalKind {
    /// ∃ A ≠ 0, B with Aκ + Bτ = 1 and τ(Bκ − Aτ) ≠ 0
    Bertrand,
    /// ∃ A with A(κ² + τ²) = κ and τ(κτ′ − κ′τ) ≠ 0
    Mannheim,
    /// τ ≡ 0 and ∃ c with −s + c ≠ 0
    PlanarTN,
    /// τ ≡ 0 and κ′ ≠ 0 everywhere
    PlanarNT,
}

/// Outcome of a classical condition check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassicalCheck {
    pub kind: ClassicalKind,
    /// Fitted constants, where applicable for the kind.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    /// Max absolute defect of the fitted equality over the arclength nodes.
    pub residual: f64,
    /// Min absolute value of the strict side condition over the nodes.
    pub side_condition_min: f64,
    pub verdict: bool,
}

/// Checks one of the classical conditions on the curve, after resampling at
/// equal arclength so the arclength derivatives in the condition are meaningful.
pub fn classical_condition_check(
    curve: &CurveSource,
    grid: &SampleGrid,
    kind: ClassicalKind,
    tol: &Tolerances,
) -> Result<ClassicalCheck> {
    let s_table = arclength(curve, grid, tol)?;
    let total = *s_table.last().unwrap();
    let ts = equal_arclength_parameters(grid, &s_table, grid.count);
    let ds = total / (grid.count - 1) as f64;
    let s_nodes: Vec<f64> = (0..grid.count).map(|i| i as f64 * ds).collect();

    let mut kappa = Vec::with_capacity(ts.len());
    let mut tau = Vec::with_capacity(ts.len());
    for &t in &ts {
        let fd = frenet_apparatus(&curve.jet(t)?, tol)?;
        kappa.push(fd.kappa);
        tau.push(fd.tau);
    }

    match kind {
        ClassicalKind::Bertrand => {
            let (a, b) = fit_bertrand(&kappa, &tau, tol);
            let residual = kappa
                .iter()
                .zip(&tau)
                .map(|(k, t)| (a * k + b * t - 1.0).abs())
                .fold(0.0_f64, f64::max);
            let side = kappa
                .iter()
                .zip(&tau)
                .map(|(k, t)| (t * (b * k - a * t)).abs())
                .fold(f64::INFINITY, f64::min);
            let verdict = a.abs() > tol.cond && residual <= tol.cond && side > tol.cond;
            Ok(ClassicalCheck {
                kind,
                a: Some(a),
                b: Some(b),
                c: None,
                residual,
                side_condition_min: side,
                verdict,
            })
        }
        ClassicalKind::Mannheim => {
            // scalar least squares for A(κ² + τ²) = κ
            let mut num = 0.0;
            let mut den = 0.0;
            for (k, t) in kappa.iter().zip(&tau) {
                let q = k * k + t * t;
                num += k * q;
                den += q * q;
            }
            let a = num / den;
            let residual = kappa
                .iter()
                .zip(&tau)
                .map(|(k, t)| (a * (k * k + t * t) - k).abs())
                .fold(0.0_f64, f64::max);
            let kp = fd_derivative(&s_nodes, &kappa, FdAccuracy::Four)?;
            let tp = fd_derivative(&s_nodes, &tau, FdAccuracy::Four)?;
            let side = (0..kappa.len())
                .map(|i| (tau[i] * (kappa[i] * tp[i] - kp[i] * tau[i])).abs())
                .fold(f64::INFINITY, f64::min);
            let verdict = residual <= tol.cond && side > tol.cond;
            Ok(ClassicalCheck {
                kind,
                a: Some(a),
                b: None,
                c: None,
                residual,
                side_condition_min: side,
                verdict,
            })
        }
        ClassicalKind::PlanarTN => {
            let residual = tau.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
            // any c beyond the arclength range makes −s + c ≠ 0 on [0, total]
            let c = total + 1.0;
            let side = s_nodes
                .iter()
                .map(|s| (c - s).abs())
                .fold(f64::INFINITY, f64::min);
            let verdict = residual <= tol.cond && side > tol.cond;
            Ok(ClassicalCheck {
                kind,
                a: None,
                b: None,
                c: Some(c),
                residual,
                side_condition_min: side,
                verdict,
            })
        }
        ClassicalKind::PlanarNT => {
            let residual = tau.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
            let kp = fd_derivative(&s_nodes, &kappa, FdAccuracy::Four)?;
            let side = kp.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
            let verdict = residual <= tol.cond && side > tol.cond;
            Ok(ClassicalCheck {
                kind,
                a: None,
                b: None,
                c: None,
                residual,
                side_condition_min: side,
                verdict,
            })
        }
    }
}

/// Least-squares (A, B) for Aκ + Bτ = 1 via 2×2 normal equations. When the
/// normal matrix is rank deficient (κ, τ constant), the solution set is a
/// line; the minimum-norm point is shifted along the null direction until the
/// side condition τ(Bκ − Aτ) ≠ 0 holds, if possible.
fn fit_bertrand(kappa: &[f64], tau: &[f64], tol: &Tolerances) -> (f64, f64) {
    let n = kappa.len() as f64;
    let (mut skk, mut skt, mut stt, mut sk, mut st) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, t) in kappa.iter().zip(tau) {
        skk += k * k;
        skt += k * t;
        stt += t * t;
        sk += *k;
        st += *t;
    }
    let det = skk * stt - skt * skt;
    let scale = (skk + stt).max(1e-300);
    if det.abs() > 1e-12 * scale * scale / n {
        return (
            (stt * sk - skt * st) / det,
            (skk * st - skt * sk) / det,
        );
    }
    // rank one: κ and τ are proportional to a fixed direction (constant case)
    let k0 = sk / n;
    let t0 = st / n;
    let q = k0 * k0 + t0 * t0;
    if q <= tol.unit {
        return (0.0, 0.0);
    }
    let (a0, b0) = (k0 / q, t0 / q);
    // null direction of the constraint line
    let (na, nb) = (-t0 / q.sqrt(), k0 / q.sqrt());
    for alpha in [0.0, 1.0, -1.0, 0.5, 2.0] {
        let (a, b) = (a0 + alpha * na, b0 + alpha * nb);
        let side_ok = kappa
            .iter()
            .zip(tau)
            .all(|(k, t)| (t * (b * k - a * t)).abs() > tol.cond);
        if a.abs() > tol.cond && side_ok {
            return (a, b);
        }
    }
    (a0, b0)
}
