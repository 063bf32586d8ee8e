//! Fixed-step classical RK4 integration over sample grids.
//!
//! Every mate construction in this crate is governed by a linear ODE system
//! with smooth coefficients, so the classical fourth-order Runge–Kutta scheme
//! with a conservative step cap is accurate far beyond the residual budgets
//! and keeps the numerics reproducible (no adaptive step controller state).

use crate::curvekit::SampleGrid;
use crate::{Error, Result};

/// Right-hand side y' = f(t, y) of a first-order system.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

/// States of an integrated system at the grid nodes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// Component `k` of the state at every node.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }
}

fn rk4_step(field: &dyn VectorField, t: f64, h: f64, y: &mut [f64], work: &mut Rk4Work) {
    let n = y.len();
    let Rk4Work { k1, k2, k3, k4, tmp } = work;
    field.rhs(t, y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    field.rhs(t + 0.5 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    field.rhs(t + 0.5 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    field.rhs(t + h, tmp, k4);
    for i in 0..n {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

struct Rk4Work {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(n: usize) -> Self {
        Rk4Work {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

/// Integrates from `grid.t0` with one RK4 step per grid interval.
pub fn rk4_solve(field: &dyn VectorField, y0: &[f64], grid: &SampleGrid) -> Result<Trajectory> {
    rk4_solve_projected(field, y0, grid, grid.spacing(), |_, _| {})
}

/// Integrates with grid intervals subdivided so the effective RK4 step never
/// exceeds `max_step`; states are recorded at the grid nodes only.
pub fn rk4_solve_substeps(
    field: &dyn VectorField,
    y0: &[f64],
    grid: &SampleGrid,
    max_step: f64,
) -> Result<Trajectory> {
    rk4_solve_projected(field, y0, grid, max_step, |_, _| {})
}

/// Like [`rk4_solve_substeps`], but applies `project` to the state after
/// every substep (used to re-orthonormalize moving frames).
pub fn rk4_solve_projected(
    field: &dyn VectorField,
    y0: &[f64],
    grid: &SampleGrid,
    max_step: f64,
    mut project: impl FnMut(f64, &mut [f64]),
) -> Result<Trajectory> {
    if y0.len() != field.dim() {
        return Err(Error::InvalidInput(format!(
            "initial state has dimension {}, field expects {}",
            y0.len(),
            field.dim()
        )));
    }
    if !(max_step.is_finite() && max_step > 0.0) {
        return Err(Error::InvalidInput("max_step must be positive".into()));
    }
    let h_node = grid.spacing();
    let substeps = (h_node / max_step).ceil().max(1.0) as usize;
    let h = h_node / substeps as f64;

    let mut work = Rk4Work::new(y0.len());
    let mut y = y0.to_vec();
    let mut ts = Vec::with_capacity(grid.count);
    let mut states = Vec::with_capacity(grid.count);
    ts.push(grid.node(0));
    states.push(y.clone());
    for i in 0..grid.count - 1 {
        let t_lo = grid.node(i);
        for j in 0..substeps {
            let t = t_lo + j as f64 * h;
            rk4_step(field, t, h, &mut y, &mut work);
            project(t + h, &mut y);
            if !y.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFiniteState(t + h));
            }
        }
        ts.push(grid.node(i + 1));
        states.push(y.clone());
    }
    Ok(Trajectory { ts, states })
}

/// Like [`rk4_solve_substeps`], but the initial state is given at grid node
/// `init_index`; integration runs forward to `grid.t1` and backward (negative
/// steps) to `grid.t0`, recording states at every node.
pub fn rk4_solve_two_sided(
    field: &dyn VectorField,
    y_init: &[f64],
    grid: &SampleGrid,
    init_index: usize,
    max_step: f64,
) -> Result<Trajectory> {
    if y_init.len() != field.dim() {
        return Err(Error::InvalidInput(format!(
            "initial state has dimension {}, field expects {}",
            y_init.len(),
            field.dim()
        )));
    }
    if init_index >= grid.count {
        return Err(Error::InvalidInput(format!(
            "init_index {} out of range for grid of {} nodes",
            init_index, grid.count
        )));
    }
    let h_node = grid.spacing();
    let substeps = (h_node / max_step).ceil().max(1.0) as usize;
    let mut work = Rk4Work::new(y_init.len());
    let mut states = vec![Vec::new(); grid.count];
    states[init_index] = y_init.to_vec();
    for (dir, range) in [(1.0, init_index..grid.count - 1), (-1.0, 0..init_index)] {
        let h = dir * h_node / substeps as f64;
        let mut y = y_init.to_vec();
        let nodes: Vec<usize> = if dir > 0.0 {
            range.collect()
        } else {
            range.rev().collect()
        };
        for i in nodes {
            let (from, to) = if dir > 0.0 { (i, i + 1) } else { (i + 1, i) };
            let t_lo = grid.node(from);
            for j in 0..substeps {
                let t = t_lo + j as f64 * h;
                rk4_step(field, t, h, &mut y, &mut work);
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFiniteState(t + h));
                }
            }
            states[to] = y.clone();
        }
    }
    Ok(Trajectory {
        ts: grid.nodes(),
        states,
    })
}

/// Result of an empirical convergence-order estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    Order(f64),
    /// Differences were at rounding level, so no slope can be read off.
    NotApplicable,
}

/// Estimates the convergence order of the integrator on `field` by comparing
/// terminal states at `n`, `2n` and `4n` steps over `[t0, t1]`:
/// p = log₂(‖y_n − y_{2n}‖ / ‖y_{2n} − y_{4n}‖).
pub fn convergence_order(
    field: &dyn VectorField,
    y0: &[f64],
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<OrderEstimate> {
    let terminal = |steps: usize| -> Result<Vec<f64>> {
        let grid = SampleGrid::new(t0, t1, steps + 1)?;
        let traj = rk4_solve(field, y0, &grid)?;
        Ok(traj.states.last().unwrap().clone())
    };
    let ya = terminal(n)?;
    let yb = terminal(2 * n)?;
    let yc = terminal(4 * n)?;
    let diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let e1 = diff(&ya, &yb);
    let e2 = diff(&yb, &yc);
    if e1 < 1e-13 || e2 < 1e-13 {
        return Ok(OrderEstimate::NotApplicable);
    }
    Ok(OrderEstimate::Order((e1 / e2).log2()))
}
