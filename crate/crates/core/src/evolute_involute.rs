//! Evolutes and involutes of non-degenerate and framed curves, together with
//! numeric certification of the round-trip identities.
//!
//! For a non-degenerate curve, the evolute is γ + (1/κ)n − (κ̇/(|γ̇|κ²τ))b and
//! the involute integrates the (λ, η) system of the (t, n, t̄) construction.
//! For framed curves the evolute/involute are the (ν₁, ν₂, ν̄₂) and (μ, ν₁, μ̄)
//! mates with specific parameter selections; the circular evolute and the
//! t₀-involute are the classical specializations recovered from Bishop frames.

use std::io::Write;

use crate::curvekit::{fd_derivative, CurveSource, FdAccuracy, SampleGrid, SampledCurve};
use crate::framedkit::{
    framed_curvature, states_on_grid, FramedCurvature, FramedCurveSource, FramedState, Theta,
};
use crate::frenet::{frenet_apparatus, kappa_dot};
use crate::geom3::Vec3;
use crate::mates::{
    derivative_on_grid, framed_mate, nbb_mate, tnt_mate, FramedMateInputs, FramedMateResult,
};
use crate::odeint::{rk4_solve_two_sided, VectorField};
use crate::{Error, Result, Tolerances};

/// Coefficient functions of an evolute.
#[derive(Debug, Clone)]
pub struct EvoluteData {
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    /// Speed factor of the evolute (γ̄̇ = h b); empty in the framed case.
    pub h: Vec<f64>,
    /// Rotation angle θᴱ per node (framed case only).
    pub theta: Option<Vec<f64>>,
    /// First node where |h| fell below the condition tolerance, if any: the
    /// evolute exists but degenerates as a mate there.
    pub h_vanishes_at: Option<f64>,
}

/// Coefficient functions of an involute.
#[derive(Debug, Clone)]
pub struct InvoluteData {
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    /// Rotation angle θᴵ per node (framed case only).
    pub theta: Option<Vec<f64>>,
    pub init: (f64, f64),
}

/// Outcome of a round-trip identity check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RoundTripReport {
    /// Which sign case or direction applied ("i".."iv", "inv-then-ev", ...).
    pub case_tag: String,
    pub max_position_error: f64,
    pub max_frame_error: f64,
    /// Max deviation of the inner speed factor from |γ̇| (Ev∘Inv only).
    pub h_error: Option<f64>,
}

/// The Bishop pair (ξ, η̃ = ξ×μ) along a t₀-involute and the function f
/// appearing in its curvature.
#[derive(Debug, Clone)]
pub struct InvoluteFrame {
    pub xi: Vec<Vec3>,
    pub eta_vec: Vec<Vec3>,
    pub f: Vec<f64>,
}

/// Writes `t,x,y,z,lambda,eta` sample rows (17 significant digits).
pub fn write_samples_csv<W: Write>(
    mut w: W,
    ts: &[f64],
    points: &[Vec3],
    lambda: &[f64],
    eta: &[f64],
) -> Result<()> {
    writeln!(w, "t,x,y,z,lambda,eta")?;
    for i in 0..ts.len() {
        let p = points[i];
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            ts[i], p.x, p.y, p.z, lambda[i], eta[i]
        )?;
    }
    Ok(())
}

/// Evolute γ + (1/κ)n − (κ̇/(|γ̇|κ²τ))b of a non-degenerate curve.
///
/// Unlike the (n, b, b̄) mate construction, a vanishing speed factor h is not
/// an error here: the locus still exists, it just degenerates as a Bertrand
/// mate, which is reported through `h_vanishes_at`.
pub fn evolute(
    curve: &CurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<(Vec<Vec3>, EvoluteData)> {
    let ts = grid.nodes();
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
    let mut points = Vec::with_capacity(ts.len());
    let mut lambda = Vec::with_capacity(ts.len());
    let mut h = Vec::with_capacity(ts.len());
    let mut h_vanishes_at = None;
    for (i, &t) in ts.iter().enumerate() {
        let jet = curve.jet(t)?;
        let fd = frenet_apparatus(&jet, tol)?;
        let l = 1.0 / fd.kappa;
        let hv = fd.speed * fd.tau / fd.kappa + eta_dot[i];
        if hv.abs() <= tol.cond && h_vanishes_at.is_none() {
            h_vanishes_at = Some(t);
        }
        points.push(jet.d0 + fd.normal * l + fd.binormal * eta[i]);
        lambda.push(l);
        h.push(hv);
    }
    Ok((
        points,
        EvoluteData {
            lambda,
            eta,
            h,
            theta: None,
            h_vanishes_at,
        },
    ))
}

/// Involute from `init = (λ0, η0)`: the (t, n, t̄) mate construction with the
/// involute interpretation.
pub fn involute(
    curve: &CurveSource,
    init: (f64, f64),
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<(Vec<Vec3>, InvoluteData)> {
    let r = tnt_mate(curve, init, grid, tol)?;
    Ok((
        r.mate,
        InvoluteData {
            lambda: r.lambda,
            eta: r.eta,
            theta: None,
            init,
        },
    ))
}

/// Grid widened by `extra` nodes of the same spacing on each side.
fn extended_grid(grid: &SampleGrid, extra: usize) -> Result<SampleGrid> {
    let h = grid.spacing();
    SampleGrid::new(
        grid.t0 - extra as f64 * h,
        grid.t1 + extra as f64 * h,
        grid.count + 2 * extra,
    )
}

struct InvoluteField<'a> {
    curve: &'a CurveSource,
    tol: &'a Tolerances,
}

impl VectorField for InvoluteField<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        match self
            .curve
            .jet(t)
            .and_then(|j| frenet_apparatus(&j, self.tol))
        {
            Ok(fd) => {
                let w = fd.speed * fd.kappa;
                dy[0] = y[1] * w - fd.speed;
                dy[1] = -y[0] * w;
            }
            Err(_) => {
                dy[0] = f64::NAN;
                dy[1] = f64::NAN;
            }
        }
    }
}

/// Samples `f` on a widened copy of `grid` (4 ghost nodes per side when the
/// curve's domain allows it) so that later finite differences stay high-order
/// at the real boundary. Returns the grid used and the node index of
/// `grid.t0` within it.
fn widened_for(curve: &CurveSource, grid: &SampleGrid) -> Result<(SampleGrid, usize)> {
    match curve.domain() {
        None => Ok((extended_grid(grid, 4)?, 4)),
        Some((a, b)) => {
            let h = grid.spacing();
            if grid.t0 - 4.0 * h >= a && grid.t1 + 4.0 * h <= b {
                Ok((extended_grid(grid, 4)?, 4))
            } else {
                Ok((grid.clone(), 0))
            }
        }
    }
}

/// Certifies that the evolute of the involute returns the original curve.
///
/// The involute is integrated onto a widened grid and resampled as a
/// table-backed curve, so all Frenet data of the involute comes from the
/// finite-difference oracle rather than closed forms.
pub fn roundtrip_ev_of_inv(
    curve: &CurveSource,
    init: (f64, f64),
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<RoundTripReport> {
    // Run the checked construction first so precondition errors (planar
    // curve, vanishing η) surface with their specific variants.
    let checked = tnt_mate(curve, init, grid, tol)?;
    // sample the involute on a refined copy of the widened grid so the
    // table-backed finite-difference oracle carries spare accuracy; the
    // original grid nodes coincide with every REFINE-th refined node
    const REFINE: usize = 2;
    let (wide, wide_index) = widened_for(curve, grid)?;
    let ext = SampleGrid::new(wide.t0, wide.t1, (wide.count - 1) * REFINE + 1)?;
    let init_index = wide_index * REFINE;
    let field = InvoluteField { curve, tol };
    let traj = rk4_solve_two_sided(&field, &[init.0, init.1], &ext, init_index, tol.max_rk4_step)?;
    let mut points = Vec::with_capacity(ext.count);
    for (i, &t) in traj.ts.iter().enumerate() {
        let jet = curve.jet(t)?;
        let fd = frenet_apparatus(&jet, tol)?;
        points.push(jet.d0 + fd.tangent * traj.states[i][0] + fd.normal * traj.states[i][1]);
    }
    let inv = CurveSource::Sampled(SampledCurve::from_points(traj.ts, points)?);

    let ts = grid.nodes();
    // η̄ needs κ̇ of the sampled involute; differencing κ on the table nodes
    // is far better conditioned than the third-derivative closed form, whose
    // roundoff noise would be amplified again by the η̄̇ differentiation
    let kappa_of = |t: f64| -> Result<f64> { Ok(frenet_apparatus(&inv.jet(t)?, tol)?.kappa) };
    let (eta_grid, eta_off) = if wide_index > 0 {
        (extended_grid(grid, 2)?, 2usize)
    } else {
        (grid.clone(), 0usize)
    };
    let kdot = derivative_on_grid(&eta_grid, kappa_of)?;
    let mut eta_bar_ext = Vec::with_capacity(eta_grid.count);
    for (i, &t) in eta_grid.nodes().iter().enumerate() {
        let fd = frenet_apparatus(&inv.jet(t)?, tol)?;
        if fd.tau.abs() <= tol.cond {
            return Err(Error::TorsionVanishes(t));
        }
        eta_bar_ext.push(-kdot[i] / (fd.speed * fd.kappa * fd.kappa * fd.tau));
    }
    let eta_bar_dot_ext = fd_derivative(&eta_grid.nodes(), &eta_bar_ext, FdAccuracy::Four)?;
    let eta_bar = &eta_bar_ext[eta_off..eta_off + grid.count];
    let eta_bar_dot = &eta_bar_dot_ext[eta_off..eta_off + grid.count];

    let mut max_position_error = 0.0_f64;
    let mut h_error = 0.0_f64;
    let mut pred_frames = Vec::with_capacity(ts.len());
    let mut orig_frames = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let jet = inv.jet(t)?;
        let fd = frenet_apparatus(&jet, tol)?;
        let ev = jet.d0 + fd.normal / fd.kappa + fd.binormal * eta_bar[i];
        let orig = curve.jet(t)?;
        max_position_error = max_position_error.max((ev - orig.d0).norm());
        let h = fd.speed * fd.tau / fd.kappa + eta_bar_dot[i];
        h_error = h_error.max((h.abs() - orig.d1.norm()).abs());
        let (sh, st) = (h.signum(), fd.tau.signum());
        pred_frames.push((
            fd.binormal * sh,
            fd.normal * (-sh * st),
            fd.tangent * st,
        ));
        let ofd = frenet_apparatus(&orig, tol)?;
        orig_frames.push((ofd.tangent, ofd.normal, ofd.binormal));
    }
    let max_frame_error = signed_triple_error(&pred_frames, &orig_frames);
    // the checked construction and the widened integration must agree
    debug_assert!(checked
        .lambda
        .iter()
        .zip(traj.states[init_index..].iter().step_by(REFINE))
        .all(|(a, s)| (a - s[0]).abs() < 1e-9));
    Ok(RoundTripReport {
        case_tag: "ev-of-inv".to_string(),
        max_position_error,
        max_frame_error,
        h_error: Some(h_error),
    })
}

/// Max deviation of predicted frames from targets, with one sign per vector
/// resolved at the first node.
fn signed_triple_error(pred: &[(Vec3, Vec3, Vec3)], target: &[(Vec3, Vec3, Vec3)]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    let s = (
        pred[0].0.dot(target[0].0).signum(),
        pred[0].1.dot(target[0].1).signum(),
        pred[0].2.dot(target[0].2).signum(),
    );
    let mut max = 0.0_f64;
    for (p, q) in pred.iter().zip(target) {
        max = max.max((p.0 - q.0 * s.0).norm());
        max = max.max((p.1 - q.1 * s.1).norm());
        max = max.max((p.2 - q.2 * s.2).norm());
    }
    max
}

/// Certifies that the involute of the evolute returns the original curve,
/// using the sign case of (τ, h) to select the involute's initial values:
/// (i) τ>0, h>0: (−ηᴱ, λᴱ); (ii) τ>0, h<0: (ηᴱ, −λᴱ);
/// (iii) τ<0, h>0: (−ηᴱ, −λᴱ); (iv) τ<0, h<0: (ηᴱ, λᴱ).
pub fn roundtrip_inv_of_ev(
    curve: &CurveSource,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<RoundTripReport> {
    let base = nbb_mate(curve, grid, tol)?;
    let tau0 = frenet_apparatus(&curve.jet(grid.t0)?, tol)?.tau;
    let h0 = base.h.as_ref().expect("nbb mate always carries h")[0];
    let (le, ee) = (base.lambda[0], base.eta[0]);
    let (case_tag, init) = match (tau0 > 0.0, h0 > 0.0) {
        (true, true) => ("i", (-ee, le)),
        (true, false) => ("ii", (ee, -le)),
        (false, true) => ("iii", (-ee, -le)),
        (false, false) => ("iv", (ee, le)),
    };

    let (ext, _) = widened_for(curve, grid)?;
    let mut points = Vec::with_capacity(ext.count);
    let ext_ts = ext.nodes();
    let (ev_ext, _) = evolute(curve, &ext, tol)?;
    points.extend(ev_ext);
    let ev = CurveSource::Sampled(SampledCurve::from_points(ext_ts, points)?);

    let r = tnt_mate(&ev, init, grid, tol)?;
    let mut max_position_error = 0.0_f64;
    let mut orig_frames = Vec::with_capacity(r.ts.len());
    let mut pred_frames = Vec::with_capacity(r.ts.len());
    for (i, &t) in r.ts.iter().enumerate() {
        let jet = curve.jet(t)?;
        max_position_error = max_position_error.max((r.mate[i] - jet.d0).norm());
        let fd = frenet_apparatus(&jet, tol)?;
        orig_frames.push((fd.tangent, fd.normal, fd.binormal));
        pred_frames.push((r.frame[i].e1, r.frame[i].e2, r.frame[i].e3));
    }
    let max_frame_error = signed_triple_error(&pred_frames, &orig_frames);
    Ok(RoundTripReport {
        case_tag: case_tag.to_string(),
        max_position_error,
        max_frame_error,
        h_error: None,
    })
}

/// Framed evolute 𝓔 = (γ + λᴱν₁ + ηᴱν₂, sinθᴱν₁ + cosθᴱν₂, μ).
///
/// Given θᴱ, the algebraic condition α + λm + ηn = 0 is solved for (λ, η) as
/// the minimum-norm solution plus `null_coeff` times the null direction
/// (n, −m)/√(m²+n²); the differential condition is enforced as a residual.
pub fn framed_evolute(
    source: &FramedCurveSource,
    theta_e: &Theta,
    null_coeff: Option<&Theta>,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<(FramedMateResult, EvoluteData)> {
    let inputs = FramedMateInputs::N1N2N2 {
        theta: theta_e.clone(),
        null_coeff: null_coeff.cloned(),
    };
    let r = framed_mate(source, &inputs, grid, tol)?;
    let data = EvoluteData {
        lambda: r.lambda.clone(),
        eta: r.eta.clone(),
        h: Vec::new(),
        theta: Some(r.theta.clone()),
        h_vanishes_at: None,
    };
    Ok((r, data))
}

/// Framed involute 𝓘 = (γ + λᴵμ + ηᴵν₁, cosθᴵμ − sinθᴵν₁, sinθᴵμ + cosθᴵν₁),
/// integrating λ̇ = −α − ηm, η̇ = λm from `init` (default (0, 0), which
/// reproduces the t₀-involute at the grid start when m ≡ 0).
pub fn framed_involute(
    source: &FramedCurveSource,
    init: Option<(f64, f64)>,
    theta_i: &Theta,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<(FramedMateResult, InvoluteData)> {
    let init = init.unwrap_or((0.0, 0.0));
    let inputs = FramedMateInputs::MuN1Mu {
        lambda0: init.0,
        eta0: init.1,
        theta: theta_i.clone(),
    };
    let r = framed_mate(source, &inputs, grid, tol)?;
    let data = InvoluteData {
        lambda: r.lambda.clone(),
        eta: r.eta.clone(),
        theta: Some(r.theta.clone()),
        init,
    };
    Ok((r, data))
}

/// Which normal field serves as the Bishop direction v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BishopDirection {
    Nu1,
    Nu2,
}

/// Circular evolute E_γ[v] = γ − (α/m̄)v and its output framed curve.
#[derive(Debug, Clone)]
pub struct CircularEvolute {
    pub ts: Vec<f64>,
    /// (E_γ[v], w, μ) with w = μ × v.
    pub states: Vec<FramedState>,
    /// Predicted curvature (n̄, 0, −m̄, −d/dt(α/m̄)).
    pub curvature: Vec<FramedCurvature>,
    /// −α/m̄ per node (the displacement along v).
    pub coefficient: Vec<f64>,
}

/// Circular evolute of a framed curve whose frame is already Bishop
/// (ℓ ≡ 0 within the condition tolerance).
pub fn circular_evolute(
    source: &FramedCurveSource,
    direction: BishopDirection,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<CircularEvolute> {
    let ts = grid.nodes();
    for &t in &ts {
        let c = framed_curvature(source, t, tol)?;
        if c.l.abs() > tol.cond {
            return Err(Error::NotBishop);
        }
        let mbar = match direction {
            BishopDirection::Nu1 => c.m,
            BishopDirection::Nu2 => c.n,
        };
        if mbar.abs() <= tol.cond {
            return Err(Error::MbarVanishes(t));
        }
    }
    let coeff_of = |t: f64| -> Result<f64> {
        let c = framed_curvature(source, t, tol)?;
        let mbar = match direction {
            BishopDirection::Nu1 => c.m,
            BishopDirection::Nu2 => c.n,
        };
        Ok(c.alpha / mbar)
    };
    let coeff: Vec<f64> = ts.iter().map(|&t| coeff_of(t)).collect::<Result<_>>()?;
    let coeff_dot = derivative_on_grid(grid, coeff_of)?;
    let mut states = Vec::with_capacity(ts.len());
    let mut curvature = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let s = source.state(t)?;
        let c = framed_curvature(source, t, tol)?;
        let v = match direction {
            BishopDirection::Nu1 => s.nu1,
            BishopDirection::Nu2 => s.nu2,
        };
        let w = s.mu.cross(v);
        let (mbar, nbar) = match direction {
            BishopDirection::Nu1 => (c.m, c.n),
            BishopDirection::Nu2 => (c.n, -c.m),
        };
        states.push(FramedState::new(t, s.gamma - v * coeff[i], w, s.mu));
        curvature.push(FramedCurvature {
            l: nbar,
            m: 0.0,
            n: -mbar,
            alpha: -coeff_dot[i],
        });
    }
    Ok(CircularEvolute {
        ts,
        states,
        curvature,
        coefficient: coeff.iter().map(|c| -c).collect(),
    })
}

/// Composite Simpson quadrature of `f` over `[a, b]` with `nsub` panels.
fn simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, nsub: usize) -> Result<f64> {
    let n = nsub.max(1);
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * h;
        total += h / 6.0 * (f(lo)? + 4.0 * f(lo + 0.5 * h)? + f(lo + h)?);
    }
    Ok(total)
}

/// t₀-involute I_γ[t₀] = γ − (∫_{t₀}^t α)μ and its Bishop pair along it.
#[derive(Debug, Clone)]
pub struct T0Involute {
    pub ts: Vec<f64>,
    /// (I_γ[t₀], ξ, μ).
    pub states: Vec<FramedState>,
    pub frame: InvoluteFrame,
    /// Predicted curvature (0, f, √(m²+n²), −(∫α)√(m²+n²)).
    pub curvature: Vec<FramedCurvature>,
    /// ∫_{t₀}^t α per node (composite Simpson on the grid).
    pub alpha_integral: Vec<f64>,
}

/// t₀-involute of a framed curve; requires m² + n² bounded away from zero.
pub fn t0_involute(
    source: &FramedCurveSource,
    t0: f64,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<T0Involute> {
    if t0 < grid.t0 || t0 > grid.t1 {
        return Err(Error::InvalidInput(format!(
            "t0 = {t0} outside grid [{}, {}]",
            grid.t0, grid.t1
        )));
    }
    let ts = grid.nodes();
    let alpha_of = |t: f64| -> Result<f64> { Ok(framed_curvature(source, t, tol)?.alpha) };
    // cumulative integral from grid.t0, then shift so it vanishes at t0
    let mut cum = Vec::with_capacity(ts.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for i in 1..ts.len() {
        acc += simpson(&alpha_of, ts[i - 1], ts[i], 1)?;
        cum.push(acc);
    }
    let h = grid.spacing();
    let offset = simpson(
        &alpha_of,
        grid.t0,
        t0,
        ((t0 - grid.t0) / h).ceil().max(1.0) as usize,
    )?;
    let a_int: Vec<f64> = cum.iter().map(|c| c - offset).collect();

    let m_of = |t: f64| -> Result<f64> { Ok(framed_curvature(source, t, tol)?.m) };
    let n_of = |t: f64| -> Result<f64> { Ok(framed_curvature(source, t, tol)?.n) };
    let m_dot = derivative_on_grid(grid, m_of)?;
    let n_dot = derivative_on_grid(grid, n_of)?;

    let mut states = Vec::with_capacity(ts.len());
    let mut curvature = Vec::with_capacity(ts.len());
    let mut xi = Vec::with_capacity(ts.len());
    let mut eta_vec = Vec::with_capacity(ts.len());
    let mut f_vals = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let s = source.state(t)?;
        let c = framed_curvature(source, t, tol)?;
        let q = c.m * c.m + c.n * c.n;
        if q <= tol.cond {
            return Err(Error::FrameDegenerate(t));
        }
        let sq = q.sqrt();
        let xi_t = (s.nu1 * c.n - s.nu2 * c.m) / sq;
        let eta_t = (s.nu1 * (-c.m) - s.nu2 * c.n) / sq;
        let f = (m_dot[i] * c.n - c.m * n_dot[i] - c.l * q) / q;
        states.push(FramedState::new(t, s.gamma - s.mu * a_int[i], xi_t, s.mu));
        curvature.push(FramedCurvature {
            l: 0.0,
            m: f,
            n: sq,
            alpha: -a_int[i] * sq,
        });
        xi.push(xi_t);
        eta_vec.push(eta_t);
        f_vals.push(f);
    }
    Ok(T0Involute {
        ts,
        states,
        frame: InvoluteFrame {
            xi,
            eta_vec,
            f: f_vals,
        },
        curvature,
        alpha_integral: a_int,
    })
}

/// Which composition of the framed operations to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundTripDirection {
    InvThenEv,
    EvThenInv,
}

/// Free parameters of [`framed_roundtrips`].
pub struct FramedRoundTripParams {
    /// θᴵ for InvThenEv, θᴱ for EvThenInv.
    pub theta: Theta,
    /// Inner involute initial values (InvThenEv only).
    pub init: (f64, f64),
    /// Inner evolute null-direction coefficient (EvThenInv only).
    pub null_coeff: Option<Theta>,
}

/// Certifies 𝓔(𝓘(γ,ν₁,ν₂)) = (γ,ν₁,ν₂) or 𝓘(𝓔(γ,ν₁,ν₂)) = (γ,ν₁,ν₂).
///
/// The outer operation's parameters are the unique choice inverting the inner:
/// (λᴱ, ηᴱ) = −R(−θᴵ)(λᴵ, ηᴵ), θᴱ = −θᴵ (and symmetrically for the other
/// direction), where R is the plane rotation. Frame deviation is measured
/// after resolving the best per-field sign at the first node, since framed
/// curves are defined up to those sign changes.
pub fn framed_roundtrips(
    source: &FramedCurveSource,
    direction: RoundTripDirection,
    params: &FramedRoundTripParams,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<RoundTripReport> {
    let originals = states_on_grid(source, grid)?;
    let (outer_states, case_tag) = match direction {
        RoundTripDirection::InvThenEv => {
            let (inner, _) = framed_involute(source, Some(params.init), &params.theta, grid, tol)?;
            let mut out = Vec::with_capacity(inner.ts.len());
            for i in 0..inner.ts.len() {
                let s = &inner.states[i];
                let (sin_i, cos_i) = inner.theta[i].sin_cos();
                let le = -(inner.lambda[i] * cos_i - inner.eta[i] * sin_i);
                let ee = -(inner.lambda[i] * sin_i + inner.eta[i] * cos_i);
                // θᴱ = −θᴵ
                let (sin_e, cos_e) = (-inner.theta[i]).sin_cos();
                out.push(FramedState::new(
                    inner.ts[i],
                    s.gamma + s.nu1 * le + s.nu2 * ee,
                    s.nu1 * sin_e + s.nu2 * cos_e,
                    s.mu,
                ));
            }
            (out, "inv-then-ev")
        }
        RoundTripDirection::EvThenInv => {
            let (inner, _) =
                framed_evolute(source, &params.theta, params.null_coeff.as_ref(), grid, tol)?;
            let mut out = Vec::with_capacity(inner.ts.len());
            for i in 0..inner.ts.len() {
                let s = &inner.states[i];
                let (sin_e, cos_e) = inner.theta[i].sin_cos();
                let li = -(inner.lambda[i] * cos_e - inner.eta[i] * sin_e);
                let ei = -(inner.lambda[i] * sin_e + inner.eta[i] * cos_e);
                // θᴵ = −θᴱ
                let (sin_i, cos_i) = (-inner.theta[i]).sin_cos();
                out.push(FramedState::new(
                    inner.ts[i],
                    s.gamma + s.mu * li + s.nu1 * ei,
                    s.mu * cos_i - s.nu1 * sin_i,
                    s.mu * sin_i + s.nu1 * cos_i,
                ));
            }
            (out, "ev-then-inv")
        }
    };
    let mut max_position_error = 0.0_f64;
    for (o, s) in outer_states.iter().zip(&originals) {
        max_position_error = max_position_error.max((o.gamma - s.gamma).norm());
    }
    let s1 = outer_states[0].nu1.dot(originals[0].nu1).signum();
    let s2 = outer_states[0].nu2.dot(originals[0].nu2).signum();
    let mut max_frame_error = 0.0_f64;
    for (o, s) in outer_states.iter().zip(&originals) {
        max_frame_error = max_frame_error.max((o.nu1 - s.nu1 * s1).norm());
        max_frame_error = max_frame_error.max((o.nu2 - s.nu2 * s2).norm());
    }
    Ok(RoundTripReport {
        case_tag: case_tag.to_string(),
        max_position_error,
        max_frame_error,
        h_error: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::AnalyticCurve;
    use crate::mates::{framed_mate_residual, mate_residual, MateKind};

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
    fn evolute_matches_nbb_mate() {
        let grid = SampleGrid::new(0.0, 2.0, 101).unwrap();
        let (points, data) = evolute(&helix(), &grid, &tol()).unwrap();
        let r = nbb_mate(&helix(), &grid, &tol()).unwrap();
        for i in 0..points.len() {
            assert!((points[i] - r.mate[i]).norm() < 1e-12);
            assert!((data.h[i] - r.h.as_ref().unwrap()[i]).abs() < 1e-12);
        }
        assert!(data.h_vanishes_at.is_none());
        // κ̇ ≡ 0 on the helix, so the binormal coefficient vanishes
        assert!(data.eta.iter().all(|e| e.abs() < 1e-10));
    }

    #[test]
    fn evolute_tangent_parallel_to_binormal() {
        let grid = SampleGrid::new(0.0, 2.0, 201).unwrap();
        let (points, _) = evolute(&helix(), &grid, &tol()).unwrap();
        let h = grid.spacing();
        for i in (2..199).step_by(11) {
            let d = (points[i - 2] - points[i + 2] + (points[i + 1] - points[i - 1]) * 8.0)
                / (12.0 * h);
            let fd = frenet_apparatus(&helix().jet(grid.node(i)).unwrap(), &tol()).unwrap();
            assert!(d.cross(fd.binormal).norm() < 1e-6);
        }
    }

    #[test]
    fn involute_equals_tnt_mate() {
        let grid = SampleGrid::new(0.0, 1.5, 101).unwrap();
        let (points, data) = involute(&helix(), (0.5, 2.0), &grid, &tol()).unwrap();
        let r = tnt_mate(&helix(), (0.5, 2.0), &grid, &tol()).unwrap();
        assert_eq!(points, r.mate);
        assert_eq!(data.lambda, r.lambda);
        assert_eq!(data.eta, r.eta);
    }

    #[test]
    fn two_involutes_are_nbt_mates() {
        // build both involutes on a widened grid, then measure residuals on
        // the interior so all stencils stay high-order
        let inner = SampleGrid::new(0.2, 1.8, 81).unwrap();
        let wide = SampleGrid::new(0.0, 2.0, 101).unwrap();
        let curve = helix();
        let mk = |init: (f64, f64)| -> CurveSource {
            let r = tnt_mate(&curve, init, &wide, &tol()).unwrap();
            CurveSource::Sampled(SampledCurve::from_points(r.ts, r.mate).unwrap())
        };
        let inv1 = mk((0.0, 3.0));
        let inv2 = mk((0.5, 2.5));
        let rep = mate_residual(&inv1, &inv2, MateKind::Nbt, &inner, &tol()).unwrap();
        assert!(rep.alignment < 1e-6, "alignment {}", rep.alignment);
        assert!(rep.positional < 1e-6, "positional {}", rep.positional);
        for c in &rep.conditions {
            assert!(c.max < 1e-6, "{}: {}", c.name, c.max);
        }
    }

    #[test]
    fn ev_of_inv_returns_original_helix() {
        let grid = SampleGrid::new(0.0, 2.0, 201).unwrap();
        let rep = roundtrip_ev_of_inv(&helix(), (0.0, 3.0), &grid, &tol()).unwrap();
        assert!(
            rep.max_position_error <= 1e-5,
            "position {}",
            rep.max_position_error
        );
        assert!(rep.max_frame_error <= 1e-4, "frame {}", rep.max_frame_error);
        assert!(rep.h_error.unwrap() <= 1e-5, "h {}", rep.h_error.unwrap());
    }

    #[test]
    fn ev_of_inv_rejects_degenerate_init() {
        let grid = SampleGrid::new(0.0, 1.0, 51).unwrap();
        assert!(matches!(
            roundtrip_ev_of_inv(&helix(), (1.0, 0.0), &grid, &tol()),
            Err(Error::EtaVanishes(_))
        ));
    }

    #[test]
    fn inv_of_ev_returns_original_helix_case_i() {
        let grid = SampleGrid::new(0.0, 2.0, 201).unwrap();
        let rep = roundtrip_inv_of_ev(&helix(), &grid, &tol()).unwrap();
        assert_eq!(rep.case_tag, "i");
        assert!(
            rep.max_position_error <= 1e-5,
            "position {}",
            rep.max_position_error
        );
        assert!(rep.max_frame_error <= 1e-4, "frame {}", rep.max_frame_error);
    }

    #[test]
    fn inv_of_ev_mirrored_helix_selects_negative_tau_case() {
        let mirrored = CurveSource::Analytic(AnalyticCurve::Helix { a: 1.0, b: -1.0 });
        let grid = SampleGrid::new(0.0, 2.0, 201).unwrap();
        let rep = roundtrip_inv_of_ev(&mirrored, &grid, &tol()).unwrap();
        assert_eq!(rep.case_tag, "iv");
        assert!(rep.max_position_error <= 1e-5);
    }

    #[test]
    fn framed_involute_reproduces_astroid_example() {
        let grid = SampleGrid::new(0.0, 2.0 * PI, 401).unwrap();
        let (r, data) = framed_involute(
            &astroid_framed(),
            Some((125.0 / 12.0, 0.0)),
            &Theta::constant(0.0),
            &grid,
            &tol(),
        )
        .unwrap();
        for i in (0..r.ts.len()).step_by(25) {
            let t = r.ts[i];
            assert!((data.lambda[i] - 125.0 * (2.0 * t).cos() / 12.0).abs() < 1e-8);
            assert!((data.eta[i] - 25.0 * t.cos() * t.sin() / 3.0).abs() < 1e-8);
            let base = Vec3::new(t.cos().powi(3), t.sin().powi(3), (2.0 * t).cos());
            assert!((r.states[i].gamma - base).norm() < 1e-8);
        }
    }

    #[test]
    fn framed_roundtrip_inv_then_ev() {
        let grid = SampleGrid::new(0.0, 2.0 * PI, 201).unwrap();
        let params = FramedRoundTripParams {
            theta: Theta::constant(0.3),
            init: (125.0 / 12.0, 0.0),
            null_coeff: None,
        };
        let rep = framed_roundtrips(
            &astroid_framed(),
            RoundTripDirection::InvThenEv,
            &params,
            &grid,
            &tol(),
        )
        .unwrap();
        assert!(
            rep.max_position_error <= 1e-6,
            "position {}",
            rep.max_position_error
        );
        assert!(rep.max_frame_error <= 1e-6, "frame {}", rep.max_frame_error);
    }

    #[test]
    fn framed_roundtrip_ev_then_inv() {
        let grid = SampleGrid::new(0.0, 2.0 * PI, 201).unwrap();
        let params = FramedRoundTripParams {
            theta: Theta::constant(PI / 2.0),
            init: (0.0, 0.0),
            null_coeff: Some(Theta::new(
                |t| -875.0 / 12.0 * (2.0 * t).cos(),
                |t| 875.0 / 6.0 * (2.0 * t).sin(),
            )),
        };
        let rep = framed_roundtrips(
            &astroid_framed(),
            RoundTripDirection::EvThenInv,
            &params,
            &grid,
            &tol(),
        )
        .unwrap();
        assert!(
            rep.max_position_error <= 1e-6,
            "position {}",
            rep.max_position_error
        );
        assert!(rep.max_frame_error <= 1e-6, "frame {}", rep.max_frame_error);
    }

    #[test]
    fn two_framed_involutes_are_n1n2_mu_mates() {
        let grid = SampleGrid::new(0.0, 2.0 * PI, 201).unwrap();
        let src = astroid_framed();
        let theta = Theta::constant(0.0);
        let (r1, _) = framed_involute(&src, Some((125.0 / 12.0, 0.0)), &theta, &grid, &tol()).unwrap();
        let (r2, _) = framed_involute(&src, Some((5.0, 1.0)), &theta, &grid, &tol()).unwrap();
        let m1 = r1.as_source().unwrap();
        let m2 = r2.as_source().unwrap();
        // shrink by five nodes per side at the same spacing, so residual
        // evaluation lands exactly on stored table nodes
        let inner = SampleGrid::new(grid.t0 + 5.0 * grid.spacing(), grid.t1 - 5.0 * grid.spacing(), 191)
            .unwrap();
        let rep = framed_mate_residual(&m1, &m2, MateKind::N1N2Mu, &inner, &tol()).unwrap();
        assert!(rep.alignment < 1e-6, "alignment {}", rep.alignment);
        assert!(rep.positional < 1e-6, "positional {}", rep.positional);
        for c in &rep.conditions {
            assert!(c.max < 1e-5, "{}: {}", c.name, c.max);
        }
    }

    #[test]
    fn circular_evolute_of_circle_is_center() {
        let src = FramedCurveSource::by_name("framed-circle", &[]).unwrap();
        let grid = SampleGrid::new(0.0, 2.0 * PI, 101).unwrap();
        let ce = circular_evolute(&src, BishopDirection::Nu2, &grid, &tol()).unwrap();
        for s in &ce.states {
            assert!(s.gamma.norm() < 1e-12, "{:?}", s.gamma);
        }
        for c in &ce.curvature {
            // (n̄, 0, −m̄, −d/dt(α/m̄)) = (0, 0, −1, 0) for the unit circle
            assert!(c.l.abs() < 1e-12);
            assert!(c.m.abs() < 1e-12);
            assert!((c.n + 1.0).abs() < 1e-12);
            assert!(c.alpha.abs() < 1e-8);
        }
    }

    #[test]
    fn circular_evolute_rejects_non_bishop_frame() {
        let grid = SampleGrid::new(0.0, 1.0, 51).unwrap();
        assert!(matches!(
            circular_evolute(&astroid_framed(), BishopDirection::Nu1, &grid, &tol()),
            Err(Error::NotBishop)
        ));
    }

    #[test]
    fn framed_evolute_agrees_with_circular_evolute_on_circle() {
        let src = FramedCurveSource::by_name("framed-circle", &[]).unwrap();
        let grid = SampleGrid::new(0.0, 2.0 * PI, 101).unwrap();
        let (r, _) = framed_evolute(&src, &Theta::constant(-PI / 2.0), None, &grid, &tol()).unwrap();
        let ce = circular_evolute(&src, BishopDirection::Nu2, &grid, &tol()).unwrap();
        for i in 0..r.ts.len() {
            assert!((r.states[i].gamma - ce.states[i].gamma).norm() < 1e-8);
            assert!((r.states[i].nu1 - ce.states[i].nu1).norm() < 1e-8);
            assert!((r.states[i].nu2 - ce.states[i].nu2).norm() < 1e-8);
        }
    }

    #[test]
    fn t0_involute_of_circle_is_string_involute() {
        let src = FramedCurveSource::by_name("framed-circle", &[]).unwrap();
        let grid = SampleGrid::new(0.0, 2.0 * PI, 201).unwrap();
        let r = t0_involute(&src, 0.0, &grid, &tol()).unwrap();
        for (i, &t) in r.ts.iter().enumerate() {
            let want = Vec3::new(
                t.cos() + t * t.sin(),
                t.sin() - t * t.cos(),
                0.0,
            );
            assert!((r.states[i].gamma - want).norm() < 1e-8, "t = {t}");
            assert!(r.frame.f[i].abs() < 1e-8);
        }
        // I(t0) = γ(t0)
        let g0 = src.state(0.0).unwrap().gamma;
        assert!((r.states[0].gamma - g0).norm() < 1e-12);
    }

    #[test]
    fn t0_involute_rejects_degenerate_normal_curvature() {
        let src = FramedCurveSource::by_name("framed-rotator", &[]).unwrap();
        let grid = SampleGrid::new(0.0, 1.0, 51).unwrap();
        assert!(matches!(
            t0_involute(&src, 0.0, &grid, &tol()),
            Err(Error::FrameDegenerate(_))
        ));
    }

    #[test]
    fn framed_involute_with_m_zero_is_t0_involute() {
        // framed-circle has m ≡ 0, so the default init traces γ − (∫α)μ
        let src = FramedCurveSource::by_name("framed-circle", &[]).unwrap();
        let grid = SampleGrid::new(0.0, 2.0 * PI, 201).unwrap();
        let (r, data) = framed_involute(&src, None, &Theta::constant(0.0), &grid, &tol()).unwrap();
        let t0 = t0_involute(&src, 0.0, &grid, &tol()).unwrap();
        for i in (0..r.ts.len()).step_by(20) {
            assert!((r.states[i].gamma - t0.states[i].gamma).norm() < 1e-8);
            assert!(data.eta[i].abs() < 1e-10);
            assert!((data.lambda[i] + t0.alpha_integral[i]).abs() < 1e-8);
        }
    }
}
