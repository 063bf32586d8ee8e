//! Curve representations and grid utilities.
//!
//! Curves are either analytic catalog entries carrying hand-coded jets to
//! order 3, or sampled tables with order-4 finite-difference jets on uniform
//! grids. Arclength is computed by composite Simpson quadrature on the speed.

use std::io::BufRead;

use crate::geom3::Vec3;
use crate::{Error, Result, Tolerances};

/// Uniform parameter grid tᵢ = t0 + i·(t1−t0)/(count−1).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SampleGrid {
    pub t0: f64,
    pub t1: f64,
    pub count: usize,
}

impl SampleGrid {
    pub fn new(t0: f64, t1: f64, count: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) {
            return Err(Error::NonFinite);
        }
        if t1 <= t0 {
            return Err(Error::InvalidInput(format!(
                "grid requires t1 > t0, got [{t0}, {t1}]"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidInput(format!(
                "grid requires at least 2 nodes, got {count}"
            )));
        }
        Ok(SampleGrid { t0, t1, count })
    }

    pub fn spacing(&self) -> f64 {
        (self.t1 - self.t0) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Position and derivatives of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub t: f64,
    /// γ(t)
    pub d0: Vec3,
    /// γ̇(t)
    pub d1: Vec3,
    /// γ̈(t)
    pub d2: Vec3,
    /// γ⃛(t)
    pub d3: Vec3,
}

impl CurveJet {
    pub fn is_finite(&self) -> bool {
        self.d0.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()
    }

    pub fn speed(&self) -> f64 {
        self.d1.norm()
    }
}

/// One trigonometric component c + Σ aₖ cos(ωₖ t) + bₖ sin(ωₖ t).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigComponent {
    pub constant: f64,
    /// (frequency, cos amplitude, sin amplitude)
    pub harmonics: Vec<(f64, f64, f64)>,
}

impl TrigComponent {
    fn eval(&self, t: f64, order: usize) -> f64 {
        let mut acc = if order == 0 { self.constant } else { 0.0 };
        for &(w, a0, b0) in &self.harmonics {
            // repeated differentiation rotates (a, b) -> (bω, -aω)
            let (mut a, mut b) = (a0, b0);
            for _ in 0..order {
                let (na, nb) = (b * w, -a * w);
                a = na;
                b = nb;
            }
            acc += a * (w * t).cos() + b * (w * t).sin();
        }
        acc
    }
}

/// Analytic catalog entry with exact jets to order 3.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticCurve {
    /// origin + t · dir
    Line { origin: Vec3, dir: Vec3 },
    /// (r cos t, r sin t, 0)
    Circle { radius: f64 },
    /// (a cos t, a sin t, b t)
    Helix { a: f64, b: f64 },
    /// (t, t², t³)
    TwistedCubic,
    /// (t, t², 0) — planar with κ′ ≠ 0 away from t = 0
    Parabola,
    /// (t², t³, 0) — singular at t = 0
    Cusp,
    /// (a cos³ t, a sin³ t, b cos 2t)
    Astroid { a: f64, b: f64 },
    /// Per-component trigonometric polynomial
    TrigPoly(Box<[TrigComponent; 3]>),
}

impl AnalyticCurve {
    /// Resolves a catalog name. `params` are positional and curve-specific.
    pub fn by_name(name: &str, params: &[f64]) -> Result<Self> {
        let p = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        match name {
            "line" => Ok(AnalyticCurve::Line {
                origin: Vec3::ZERO,
                dir: Vec3::new(p(0, 1.0), p(1, 0.0), p(2, 0.0)),
            }),
            "circle" => Ok(AnalyticCurve::Circle { radius: p(0, 1.0) }),
            "helix" => Ok(AnalyticCurve::Helix {
                a: p(0, 1.0),
                b: p(1, 1.0),
            }),
            "twisted-cubic" => Ok(AnalyticCurve::TwistedCubic),
            "parabola" => Ok(AnalyticCurve::Parabola),
            "cusp" => Ok(AnalyticCurve::Cusp),
            "astroid" => Ok(AnalyticCurve::Astroid {
                a: p(0, 1.0),
                b: p(1, 1.0),
            }),
            other => Err(Error::UnknownCurve(other.to_string())),
        }
    }

    /// Names available through [`AnalyticCurve::by_name`].
    pub fn catalog_names() -> &'static [&'static str] {
        &[
            "line",
            "circle",
            "helix",
            "twisted-cubic",
            "parabola",
            "cusp",
            "astroid",
        ]
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        match self {
            AnalyticCurve::Line { origin, dir } => CurveJet {
                t,
                d0: *origin + *dir * t,
                d1: *dir,
                d2: Vec3::ZERO,
                d3: Vec3::ZERO,
            },
            AnalyticCurve::Circle { radius } => {
                let (s, c) = t.sin_cos();
                let d0 = Vec3::new(radius * c, radius * s, 0.0);
                let d1 = Vec3::new(-radius * s, radius * c, 0.0);
                CurveJet {
                    t,
                    d0,
                    d1,
                    d2: -d0,
                    d3: -d1,
                }
            }
            AnalyticCurve::Helix { a, b } => {
                let (s, c) = t.sin_cos();
                CurveJet {
                    t,
                    d0: Vec3::new(a * c, a * s, b * t),
                    d1: Vec3::new(-a * s, a * c, *b),
                    d2: Vec3::new(-a * c, -a * s, 0.0),
                    d3: Vec3::new(a * s, -a * c, 0.0),
                }
            }
            AnalyticCurve::TwistedCubic => CurveJet {
                t,
                d0: Vec3::new(t, t * t, t * t * t),
                d1: Vec3::new(1.0, 2.0 * t, 3.0 * t * t),
                d2: Vec3::new(0.0, 2.0, 6.0 * t),
                d3: Vec3::new(0.0, 0.0, 6.0),
            },
            AnalyticCurve::Parabola => CurveJet {
                t,
                d0: Vec3::new(t, t * t, 0.0),
                d1: Vec3::new(1.0, 2.0 * t, 0.0),
                d2: Vec3::new(0.0, 2.0, 0.0),
                d3: Vec3::ZERO,
            },
            AnalyticCurve::Cusp => CurveJet {
                t,
                d0: Vec3::new(t * t, t * t * t, 0.0),
                d1: Vec3::new(2.0 * t, 3.0 * t * t, 0.0),
                d2: Vec3::new(2.0, 6.0 * t, 0.0),
                d3: Vec3::new(0.0, 6.0, 0.0),
            },
            AnalyticCurve::Astroid { a, b } => {
                // cos³t = (3 cos t + cos 3t)/4, sin³t = (3 sin t − sin 3t)/4
                let comps = [
                    TrigComponent {
                        constant: 0.0,
                        harmonics: vec![(1.0, 0.75 * a, 0.0), (3.0, 0.25 * a, 0.0)],
                    },
                    TrigComponent {
                        constant: 0.0,
                        harmonics: vec![(1.0, 0.0, 0.75 * a), (3.0, 0.0, -0.25 * a)],
                    },
                    TrigComponent {
                        constant: 0.0,
                        harmonics: vec![(2.0, *b, 0.0)],
                    },
                ];
                trig_jet(&comps, t)
            }
            AnalyticCurve::TrigPoly(comps) => trig_jet(comps.as_ref(), t),
        }
    }
}

fn trig_jet(comps: &[TrigComponent; 3], t: f64) -> CurveJet {
    let at = |order: usize| {
        Vec3::new(
            comps[0].eval(t, order),
            comps[1].eval(t, order),
            comps[2].eval(t, order),
        )
    };
    CurveJet {
        t,
        d0: at(0),
        d1: at(1),
        d2: at(2),
        d3: at(3),
    }
}

/// Accuracy of the finite-difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdAccuracy {
    /// Truncation error O(h²)
    Two,
    /// Truncation error O(h⁴) in the interior
    Four,
}

/// Anything finite differences can act on (scalars and 3-vectors).
pub trait Linear: Copy {
    fn zero() -> Self;
    fn add(self, o: Self) -> Self;
    fn scale(self, k: f64) -> Self;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

impl Linear for Vec3 {
    fn zero() -> Self {
        Vec3::ZERO
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

fn check_uniform(ts: &[f64], min_len: usize) -> Result<f64> {
    if ts.len() < min_len {
        return Err(Error::InsufficientSamples {
            needed: min_len,
            got: ts.len(),
        });
    }
    let h = ts[1] - ts[0];
    if h <= 0.0 {
        return Err(Error::NonUniformGrid);
    }
    for w in ts.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-8 * h.abs() {
            return Err(Error::NonUniformGrid);
        }
    }
    Ok(h)
}

fn lincomb<T: Linear>(terms: &[(f64, T)], scale: f64) -> T {
    let mut acc = T::zero();
    for &(c, v) in terms {
        acc = acc.add(v.scale(c));
    }
    acc.scale(scale)
}

/// First derivative by central differences on a uniform grid.
///
/// Interior stencils are order 2 (or order 4 with [`FdAccuracy::Four`]);
/// boundary nodes fall back to one-sided order-2 stencils.
pub fn fd_derivative<T: Linear>(ts: &[f64], vals: &[T], accuracy: FdAccuracy) -> Result<Vec<T>> {
    if ts.len() != vals.len() {
        return Err(Error::InvalidInput("table length mismatch".into()));
    }
    let h = check_uniform(ts, 5)?;
    let n = vals.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if accuracy == FdAccuracy::Four && i >= 2 && i + 2 < n {
            lincomb(
                &[
                    (-1.0, vals[i + 2]),
                    (8.0, vals[i + 1]),
                    (-8.0, vals[i - 1]),
                    (1.0, vals[i - 2]),
                ],
                1.0 / (12.0 * h),
            )
        } else if accuracy == FdAccuracy::Four && i == 0 {
            lincomb(
                &[
                    (-25.0, vals[0]),
                    (48.0, vals[1]),
                    (-36.0, vals[2]),
                    (16.0, vals[3]),
                    (-3.0, vals[4]),
                ],
                1.0 / (12.0 * h),
            )
        } else if accuracy == FdAccuracy::Four && i == 1 {
            lincomb(
                &[
                    (-3.0, vals[0]),
                    (-10.0, vals[1]),
                    (18.0, vals[2]),
                    (-6.0, vals[3]),
                    (1.0, vals[4]),
                ],
                1.0 / (12.0 * h),
            )
        } else if accuracy == FdAccuracy::Four && i == n - 2 {
            lincomb(
                &[
                    (3.0, vals[n - 1]),
                    (10.0, vals[n - 2]),
                    (-18.0, vals[n - 3]),
                    (6.0, vals[n - 4]),
                    (-1.0, vals[n - 5]),
                ],
                1.0 / (12.0 * h),
            )
        } else if accuracy == FdAccuracy::Four && i == n - 1 {
            lincomb(
                &[
                    (25.0, vals[n - 1]),
                    (-48.0, vals[n - 2]),
                    (36.0, vals[n - 3]),
                    (-16.0, vals[n - 4]),
                    (3.0, vals[n - 5]),
                ],
                1.0 / (12.0 * h),
            )
        } else if i >= 1 && i + 1 < n {
            lincomb(&[(1.0, vals[i + 1]), (-1.0, vals[i - 1])], 1.0 / (2.0 * h))
        } else if i == 0 {
            lincomb(
                &[(-3.0, vals[0]), (4.0, vals[1]), (-1.0, vals[2])],
                1.0 / (2.0 * h),
            )
        } else {
            lincomb(
                &[(3.0, vals[n - 1]), (-4.0, vals[n - 2]), (1.0, vals[n - 3])],
                1.0 / (2.0 * h),
            )
        };
        out.push(d);
    }
    Ok(out)
}

/// Second derivative by central differences on a uniform grid.
pub fn fd_second_derivative<T: Linear>(
    ts: &[f64],
    vals: &[T],
    accuracy: FdAccuracy,
) -> Result<Vec<T>> {
    if ts.len() != vals.len() {
        return Err(Error::InvalidInput("table length mismatch".into()));
    }
    let h = check_uniform(ts, 5)?;
    let h2 = h * h;
    let n = vals.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if accuracy == FdAccuracy::Four && i >= 2 && i + 2 < n {
            lincomb(
                &[
                    (-1.0, vals[i + 2]),
                    (16.0, vals[i + 1]),
                    (-30.0, vals[i]),
                    (16.0, vals[i - 1]),
                    (-1.0, vals[i - 2]),
                ],
                1.0 / (12.0 * h2),
            )
        } else if accuracy == FdAccuracy::Four && n >= 6 && i <= 1 {
            let c: [(f64, T); 6] = if i == 0 {
                [
                    (45.0, vals[0]),
                    (-154.0, vals[1]),
                    (214.0, vals[2]),
                    (-156.0, vals[3]),
                    (61.0, vals[4]),
                    (-10.0, vals[5]),
                ]
            } else {
                [
                    (10.0, vals[0]),
                    (-15.0, vals[1]),
                    (-4.0, vals[2]),
                    (14.0, vals[3]),
                    (-6.0, vals[4]),
                    (1.0, vals[5]),
                ]
            };
            lincomb(&c, 1.0 / (12.0 * h2))
        } else if accuracy == FdAccuracy::Four && n >= 6 && i + 2 >= n {
            let c: [(f64, T); 6] = if i == n - 1 {
                [
                    (45.0, vals[n - 1]),
                    (-154.0, vals[n - 2]),
                    (214.0, vals[n - 3]),
                    (-156.0, vals[n - 4]),
                    (61.0, vals[n - 5]),
                    (-10.0, vals[n - 6]),
                ]
            } else {
                [
                    (10.0, vals[n - 1]),
                    (-15.0, vals[n - 2]),
                    (-4.0, vals[n - 3]),
                    (14.0, vals[n - 4]),
                    (-6.0, vals[n - 5]),
                    (1.0, vals[n - 6]),
                ]
            };
            lincomb(&c, 1.0 / (12.0 * h2))
        } else if i >= 1 && i + 1 < n {
            lincomb(
                &[(1.0, vals[i + 1]), (-2.0, vals[i]), (1.0, vals[i - 1])],
                1.0 / h2,
            )
        } else if i == 0 {
            lincomb(
                &[
                    (2.0, vals[0]),
                    (-5.0, vals[1]),
                    (4.0, vals[2]),
                    (-1.0, vals[3]),
                ],
                1.0 / h2,
            )
        } else {
            lincomb(
                &[
                    (2.0, vals[n - 1]),
                    (-5.0, vals[n - 2]),
                    (4.0, vals[n - 3]),
                    (-1.0, vals[n - 4]),
                ],
                1.0 / h2,
            )
        };
        out.push(d);
    }
    Ok(out)
}

/// A curve given by a uniform table of samples, with finite-difference jets.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    ts: Vec<f64>,
    d0: Vec<Vec3>,
    d1: Vec<Vec3>,
    d2: Vec<Vec3>,
    d3: Vec<Vec3>,
    h: f64,
}

impl SampledCurve {
    /// Builds the jet tables from position samples. Requires at least 7
    /// uniformly spaced, strictly increasing parameters.
    pub fn from_points(ts: Vec<f64>, points: Vec<Vec3>) -> Result<Self> {
        if ts.len() != points.len() {
            return Err(Error::InvalidInput("table length mismatch".into()));
        }
        if ts.len() < 7 {
            return Err(Error::InsufficientSamples {
                needed: 7,
                got: ts.len(),
            });
        }
        let h = check_uniform(&ts, 7)?;
        if !points.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let d1 = fd_derivative(&ts, &points, FdAccuracy::Four)?;
        let d2 = fd_second_derivative(&ts, &points, FdAccuracy::Four)?;
        // third derivative by differencing the second
        let d3 = fd_derivative(&ts, &d2, FdAccuracy::Four)?;
        Ok(SampledCurve {
            ts,
            d0: points,
            d1,
            d2,
            d3,
            h,
        })
    }

    /// Reads a `t,x,y,z` CSV table (UTF-8, LF, strictly increasing t).
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let (ts, rows) = read_csv_rows(reader, &["t", "x", "y", "z"])?;
        let points = rows
            .iter()
            .map(|r| Vec3::new(r[0], r[1], r[2]))
            .collect::<Vec<_>>();
        SampledCurve::from_points(ts, points)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.ts[0], *self.ts.last().unwrap())
    }

    pub fn parameters(&self) -> &[f64] {
        &self.ts
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (a, b) = self.domain();
        let slack = 1e-9 * self.h;
        if t < a - slack || t > b + slack {
            return Err(Error::OutOfDomain(t));
        }
        let i = ((t - a) / self.h).round() as isize;
        Ok(i.clamp(0, self.ts.len() as isize - 1) as usize)
    }

    /// Jet at `t`. On a node the tabulated values are returned; between nodes
    /// the position uses cubic Hermite interpolation and higher derivatives
    /// interpolate one order down.
    pub fn jet(&self, t: f64) -> Result<CurveJet> {
        let i = self.locate(t)?;
        if (t - self.ts[i]).abs() <= 1e-9 * self.h {
            return Ok(CurveJet {
                t,
                d0: self.d0[i],
                d1: self.d1[i],
                d2: self.d2[i],
                d3: self.d3[i],
            });
        }
        let lo = ((t - self.ts[0]) / self.h).floor() as usize;
        let lo = lo.min(self.ts.len() - 2);
        let u = (t - self.ts[lo]) / self.h;
        let hermite = |v: &[Vec3], d: &[Vec3]| -> Vec3 {
            let (p0, p1) = (v[lo], v[lo + 1]);
            let (m0, m1) = (d[lo] * self.h, d[lo + 1] * self.h);
            let u2 = u * u;
            let u3 = u2 * u;
            p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
                + m0 * (u3 - 2.0 * u2 + u)
                + p1 * (-2.0 * u3 + 3.0 * u2)
                + m1 * (u3 - u2)
        };
        let lerp = |v: &[Vec3]| v[lo] * (1.0 - u) + v[lo + 1] * u;
        Ok(CurveJet {
            t,
            d0: hermite(&self.d0, &self.d1),
            d1: hermite(&self.d1, &self.d2),
            d2: hermite(&self.d2, &self.d3),
            d3: lerp(&self.d3),
        })
    }
}

/// A curve, analytic or sampled.
#[derive(Debug, Clone)]
pub enum CurveSource {
    Analytic(AnalyticCurve),
    Sampled(SampledCurve),
}

impl CurveSource {
    pub fn jet(&self, t: f64) -> Result<CurveJet> {
        match self {
            CurveSource::Analytic(c) => Ok(c.jet(t)),
            CurveSource::Sampled(c) => c.jet(t),
        }
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            CurveSource::Analytic(_) => None,
            CurveSource::Sampled(c) => Some(c.domain()),
        }
    }

    /// Jets at every grid node.
    pub fn jets(&self, grid: &SampleGrid) -> Result<Vec<CurveJet>> {
        grid.nodes().iter().map(|&t| self.jet(t)).collect()
    }
}

/// Cumulative arclength s(tᵢ) over the grid, s(t₀) = 0, by composite Simpson
/// quadrature of the speed on each interval (midpoints included).
///
/// Errors with [`Error::SingularPoint`] when the speed drops below `tol.unit`
/// at any evaluation point.
pub fn arclength(curve: &CurveSource, grid: &SampleGrid, tol: &Tolerances) -> Result<Vec<f64>> {
    let speed = |t: f64| -> Result<f64> {
        let v = curve.jet(t)?.speed();
        if v <= tol.unit {
            return Err(Error::SingularPoint(t));
        }
        Ok(v)
    };
    let h = grid.spacing();
    let mut s = Vec::with_capacity(grid.count);
    s.push(0.0);
    let mut acc = 0.0;
    let mut f_lo = speed(grid.node(0))?;
    for i in 0..grid.count - 1 {
        let t_lo = grid.node(i);
        let f_mid = speed(t_lo + 0.5 * h)?;
        let f_hi = speed(grid.node(i + 1))?;
        acc += h / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
        s.push(acc);
        f_lo = f_hi;
    }
    Ok(s)
}

/// Inverts a monotone arclength table: returns parameters t(sⱼ) at `count`
/// equally spaced arclength values by linear interpolation.
pub fn equal_arclength_parameters(grid: &SampleGrid, s: &[f64], count: usize) -> Vec<f64> {
    let total = *s.last().unwrap();
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    for j in 0..count {
        let target = total * j as f64 / (count - 1) as f64;
        while k + 2 < s.len() && s[k + 1] < target {
            k += 1;
        }
        let (s0, s1) = (s[k], s[k + 1]);
        let u = if s1 > s0 { (target - s0) / (s1 - s0) } else { 0.0 };
        out.push(grid.node(k) + u.clamp(0.0, 1.0) * grid.spacing());
    }
    out
}

/// A scalar function tabulated with its derivative on a uniform grid,
/// evaluated between nodes by cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct ScalarTable {
    ts: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    h: f64,
}

impl ScalarTable {
    pub fn new(ts: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        if ts.len() != values.len() || ts.len() != derivs.len() {
            return Err(Error::InvalidInput("table length mismatch".into()));
        }
        let h = check_uniform(&ts, 2)?;
        Ok(ScalarTable {
            ts,
            values,
            derivs,
            h,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.ts[0], *self.ts.last().unwrap())
    }

    fn cell(&self, t: f64) -> Result<(usize, f64)> {
        let (a, b) = self.domain();
        let slack = 1e-9 * self.h;
        if t < a - slack || t > b + slack {
            return Err(Error::OutOfDomain(t));
        }
        let lo = (((t - a) / self.h).floor() as usize).min(self.ts.len() - 2);
        Ok((lo, (t - self.ts[lo]) / self.h))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let (lo, u) = self.cell(t)?;
        let (p0, p1) = (self.values[lo], self.values[lo + 1]);
        let (m0, m1) = (self.derivs[lo] * self.h, self.derivs[lo + 1] * self.h);
        let u2 = u * u;
        let u3 = u2 * u;
        Ok(p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + p1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2))
    }

    /// Derivative of the interpolant (exact at nodes, O(h³) between).
    pub fn deriv(&self, t: f64) -> Result<f64> {
        let (lo, u) = self.cell(t)?;
        let (p0, p1) = (self.values[lo], self.values[lo + 1]);
        let (m0, m1) = (self.derivs[lo] * self.h, self.derivs[lo + 1] * self.h);
        let u2 = u * u;
        Ok((p0 * (6.0 * u2 - 6.0 * u)
            + m0 * (3.0 * u2 - 4.0 * u + 1.0)
            + p1 * (-6.0 * u2 + 6.0 * u)
            + m1 * (3.0 * u2 - 2.0 * u))
            / self.h)
    }
}

/// Parses a CSV table with the given header columns into (t, remaining values).
pub(crate) fn read_csv_rows<R: BufRead>(
    reader: R,
    header: &[&str],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut ts = Vec::new();
    let mut rows = Vec::new();
    let expected = header.join(",");
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 {
            if line != expected {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header `{expected}`, got `{line}`"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected {} fields, got {}", header.len(), fields.len()),
            });
        }
        let mut vals = Vec::with_capacity(fields.len());
        for f in &fields {
            vals.push(f.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?);
        }
        if let Some(&prev) = ts.last() {
            if vals[0] <= prev {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "t values must be strictly increasing".into(),
                });
            }
        }
        ts.push(vals[0]);
        rows.push(vals[1..].to_vec());
    }
    if ts.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "empty table".into(),
        });
    }
    Ok((ts, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn circle_jet_closed_form() {
        let c = AnalyticCurve::Circle { radius: 1.0 };
        let j = c.jet(0.0);
        assert_eq!(j.d0, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(j.d1, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(j.d2, Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(j.d3, Vec3::new(0.0, -1.0, 0.0));
    }

    #[test]
    fn line_higher_jets_vanish() {
        let c = AnalyticCurve::by_name("line", &[]).unwrap();
        let j = c.jet(3.7);
        assert_eq!(j.d2, Vec3::ZERO);
        assert_eq!(j.d3, Vec3::ZERO);
    }

    #[test]
    fn helix_jet_hand_differentiation() {
        let c = AnalyticCurve::Helix { a: 1.0, b: 1.0 };
        let j = c.jet(PI / 2.0);
        assert!((j.d1 - Vec3::new(-1.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn astroid_matches_direct_formula() {
        let c = AnalyticCurve::Astroid { a: 28.0 / 3.0, b: -21.0 / 4.0 };
        for k in 0..17 {
            let t = k as f64 * 0.4 - 3.0;
            let j = c.jet(t);
            let want = Vec3::new(
                28.0 / 3.0 * t.cos().powi(3),
                28.0 / 3.0 * t.sin().powi(3),
                -21.0 / 4.0 * (2.0 * t).cos(),
            );
            assert!((j.d0 - want).norm() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn arclength_unit_circle() {
        let c = CurveSource::Analytic(AnalyticCurve::Circle { radius: 1.0 });
        let grid = SampleGrid::new(0.0, 2.0 * PI, 501).unwrap();
        let s = arclength(&c, &grid, &tol()).unwrap();
        assert!((s.last().unwrap() - 2.0 * PI).abs() < 1e-10);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn arclength_constant_speed_line() {
        let c = CurveSource::Analytic(AnalyticCurve::Line {
            origin: Vec3::ZERO,
            dir: Vec3::new(2.0, 0.0, 0.0),
        });
        let grid = SampleGrid::new(0.0, 1.0, 11).unwrap();
        let s = arclength(&c, &grid, &tol()).unwrap();
        assert!((s.last().unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn arclength_helix_sqrt2() {
        let c = CurveSource::Analytic(AnalyticCurve::Helix { a: 1.0, b: 1.0 });
        let grid = SampleGrid::new(0.0, 1.0, 101).unwrap();
        let s = arclength(&c, &grid, &tol()).unwrap();
        assert!((s.last().unwrap() - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn arclength_detects_singular_point() {
        let c = CurveSource::Analytic(AnalyticCurve::Cusp);
        let grid = SampleGrid::new(-1.0, 1.0, 11).unwrap();
        let r = arclength(&c, &grid, &tol());
        assert!(matches!(r, Err(Error::SingularPoint(_))));
    }

    #[test]
    fn fd_exact_on_quadratic() {
        let ts: Vec<f64> = (0..9).map(|i| i as f64 * 0.25).collect();
        let vals: Vec<f64> = ts.iter().map(|t| t * t).collect();
        let d = fd_derivative(&ts, &vals, FdAccuracy::Two).unwrap();
        for (t, dv) in ts.iter().zip(&d) {
            assert!((dv - 2.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn fd_constant_is_zero() {
        let ts: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let vals = vec![4.2_f64; 9];
        let d = fd_derivative(&ts, &vals, FdAccuracy::Four).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn fd_sin_truncation_budget() {
        let h = 1e-3;
        let ts: Vec<f64> = (0..2001).map(|i| i as f64 * h).collect();
        let vals: Vec<f64> = ts.iter().map(|t| t.sin()).collect();
        let d = fd_derivative(&ts, &vals, FdAccuracy::Two).unwrap();
        let max_err = ts
            .iter()
            .zip(&d)
            .skip(1)
            .take(1999)
            .map(|(t, dv)| (dv - t.cos()).abs())
            .fold(0.0_f64, f64::max);
        assert!(max_err < 1e-6, "max interior error {max_err}");
    }

    #[test]
    fn fd_halving_reduces_error_by_four() {
        // order-2 convergence on sin
        let err_for = |h: f64| {
            let n = (1.0 / h) as usize;
            let ts: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
            let vals: Vec<f64> = ts.iter().map(|t| t.sin()).collect();
            let d = fd_derivative(&ts, &vals, FdAccuracy::Two).unwrap();
            ts.iter()
                .zip(&d)
                .skip(1)
                .take(n - 2)
                .map(|(t, dv)| (dv - t.cos()).abs())
                .fold(0.0_f64, f64::max)
        };
        let ratio = err_for(1e-2) / err_for(5e-3);
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn fd_rejects_nonuniform() {
        let ts = vec![0.0, 1.0, 2.0, 3.5, 4.0];
        let vals = vec![0.0; 5];
        assert!(matches!(
            fd_derivative(&ts, &vals, FdAccuracy::Two),
            Err(Error::NonUniformGrid)
        ));
    }

    #[test]
    fn sampled_jets_match_analytic_helix() {
        let helix = AnalyticCurve::Helix { a: 1.0, b: 1.0 };
        let n = 2001;
        let h = 2.0 * PI / (n - 1) as f64;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let pts: Vec<Vec3> = ts.iter().map(|&t| helix.jet(t).d0).collect();
        let sampled = SampledCurve::from_points(ts.clone(), pts).unwrap();
        let mut worst1 = 0.0_f64;
        let mut worst2 = 0.0_f64;
        for &t in ts.iter().skip(4).take(n - 8) {
            let sj = sampled.jet(t).unwrap();
            let aj = helix.jet(t);
            worst1 = worst1.max((sj.d1 - aj.d1).norm());
            worst2 = worst2.max((sj.d2 - aj.d2).norm());
        }
        assert!(worst1 < 1e-8, "d1 error {worst1}");
        assert!(worst2 < 1e-6, "d2 error {worst2}");
    }

    #[test]
    fn csv_roundtrip() {
        let mut text = String::from("t,x,y,z\n");
        let helix = AnalyticCurve::Helix { a: 2.0, b: 0.5 };
        for i in 0..11 {
            let t = i as f64 * 0.1;
            let p = helix.jet(t).d0;
            text.push_str(&format!("{t:.17e},{:.17e},{:.17e},{:.17e}\n", p.x, p.y, p.z));
        }
        let c = SampledCurve::from_csv(text.as_bytes()).unwrap();
        assert_eq!(c.parameters().len(), 11);
        let j = c.jet(0.5).unwrap();
        assert!((j.d0 - helix.jet(0.5).d0).norm() < 1e-12);
    }

    #[test]
    fn csv_rejects_bad_header() {
        let r = SampledCurve::from_csv("a,b,c,d\n1,2,3,4\n".as_bytes());
        assert!(matches!(r, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn scalar_table_reproduces_sin() {
        let n = 101;
        let h = 1.0 / (n - 1) as f64;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let vals: Vec<f64> = ts.iter().map(|t| t.sin()).collect();
        let ders: Vec<f64> = ts.iter().map(|t| t.cos()).collect();
        let tab = ScalarTable::new(ts, vals, ders).unwrap();
        for k in 0..50 {
            let t = 0.013 + k as f64 * 0.019;
            assert!((tab.value(t).unwrap() - t.sin()).abs() < 1e-9);
            assert!((tab.deriv(t).unwrap() - t.cos()).abs() < 1e-6);
        }
        assert!(matches!(tab.value(1.5), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn equal_arclength_inversion_is_monotone() {
        let c = CurveSource::Analytic(AnalyticCurve::Parabola);
        let grid = SampleGrid::new(-1.0, 2.0, 301).unwrap();
        let s = arclength(&c, &grid, &tol()).unwrap();
        let ts = equal_arclength_parameters(&grid, &s, 101);
        assert!((ts[0] - grid.t0).abs() < 1e-12);
        assert!((ts.last().unwrap() - grid.t1).abs() < 1e-9);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }
}
