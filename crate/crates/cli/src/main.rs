//! Command-line surface: curve catalog, computation commands, verification
//! runner and CSV/JSON export.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage error.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use curvemates::curvekit::{AnalyticCurve, CurveSource, SampleGrid, SampledCurve};
use curvemates::evolute_involute::{
    evolute, framed_evolute, framed_involute, framed_roundtrips, involute, roundtrip_ev_of_inv,
    roundtrip_inv_of_ev, write_samples_csv, FramedRoundTripParams, RoundTripDirection,
    RoundTripReport,
};
use curvemates::framedkit::{
    reconstruct, CurvatureFns, FramedCurveSource, FramedState, Theta,
};
use curvemates::frenet::apparatus_on_grid;
use curvemates::mates::{framed_mate, nbb_mate, nbt_mate, tnt_mate, FramedMateInputs};
use curvemates::verify::{run_suite, suite_names};
use curvemates::{Tolerances, Vec3};

/// Error that indicates wrong invocation rather than failed computation.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser)]
#[command(
    name = "curvemates",
    version,
    about = "Evolutes, involutes and Bertrand-type mates of space curves and framed curves",
    after_help = "Tolerances can be overridden through environment variables with the \
                  CURVEMATES_ prefix: CURVEMATES_TOL_UNIT, CURVEMATES_TOL_COND, \
                  CURVEMATES_MAX_RK4_STEP."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CurveArgs {
    /// Catalog curve name (see `catalog`); `framed-*` names select framed curves
    #[arg(long)]
    curve: Option<String>,
    /// Positional curve parameters, comma separated (e.g. `--params 1,2`)
    #[arg(long)]
    params: Option<String>,
    /// JSON curve specification file (alternative to --curve)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Uniform grid as `t0:t1:count`
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Frenet apparatus per node: t, κ, τ, speed and the frame columns
    Frenet {
        #[command(flatten)]
        curve: CurveArgs,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolute samples; framed curves need --theta
    Evolute {
        #[command(flatten)]
        curve: CurveArgs,
        /// Rotation angle θᴱ (constant; framed curves only)
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Involute from initial coefficients (λ0, η0)
    Involute {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        lambda0: f64,
        #[arg(long)]
        eta0: f64,
        /// Rotation angle θᴵ (constant; framed curves only, default 0)
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One of the seven mate constructions
    Mate {
        #[command(flatten)]
        curve: CurveArgs,
        /// nbb | tnt | nbt | n1n2-n2 | mu-n1-mu | mu-n1-n2 | n1n2-mu
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0.0)]
        lambda0: f64,
        #[arg(long, default_value_t = 0.0)]
        eta0: f64,
        /// Constant rotation angle θ (framed kinds)
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Linear rate of η(t) = η0 + rate·t (mu-n1-n2 only)
        #[arg(long, default_value_t = 0.0)]
        eta_rate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round-trip identity check; prints a JSON report
    Roundtrip {
        #[command(flatten)]
        curve: CurveArgs,
        /// ev-of-inv | inv-of-ev (non-degenerate) or inv-then-ev | ev-then-inv (framed)
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 0.0)]
        lambda0: f64,
        #[arg(long, default_value_t = 0.0)]
        eta0: f64,
        /// Constant rotation angle θ (framed directions)
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Acceptance bound on the reported errors
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f64,
    },
    /// Run named verification checks; prints a JSON report array
    Verify {
        /// Check names (repeatable or comma separated), or `all`
        #[arg(long, value_delimiter = ',', required = true)]
        suite: Vec<String>,
    },
    /// List the curve catalog
    Catalog {
        /// Machine-readable JSON output
        #[arg(long)]
        json: bool,
    },
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    t0: f64,
    t1: f64,
    count: usize,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct InitSpec {
    t: f64,
    gamma: [f64; 3],
    nu1: [f64; 3],
    nu2: [f64; 3],
}

/// Wire format of `--spec` files.
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveSpec {
    /// analytic | sampled | framed-analytic | framed-sampled | curvature
    kind: String,
    name: Option<String>,
    params: Option<Vec<f64>>,
    path: Option<String>,
    /// Constant curvature quadruple (ℓ, m, n, α) for kind = curvature
    curvature: Option<[f64; 4]>,
    /// Initial framed state for kind = curvature
    init: Option<InitSpec>,
    grid: Option<GridSpec>,
}

enum Resolved {
    Plain(CurveSource),
    Framed(FramedCurveSource),
}

fn parse_grid(text: &str) -> anyhow::Result<SampleGrid> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("grid must be t0:t1:count, got `{text}`")));
    }
    let t0: f64 = parts[0].parse().map_err(|_| usage("grid t0 is not a number"))?;
    let t1: f64 = parts[1].parse().map_err(|_| usage("grid t1 is not a number"))?;
    let count: usize = parts[2].parse().map_err(|_| usage("grid count is not an integer"))?;
    SampleGrid::new(t0, t1, count).map_err(|e| usage(format!("bad grid: {e}")))
}

fn parse_params(text: &Option<String>) -> anyhow::Result<Vec<f64>> {
    match text {
        None => Ok(Vec::new()),
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("bad parameter `{p}`"))))
            .collect(),
    }
}

fn resolve(args: &CurveArgs, tol: &Tolerances) -> anyhow::Result<(Resolved, SampleGrid)> {
    if let Some(path) = &args.spec {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let spec: CurveSpec = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| usage(format!("invalid curve spec: {e}")))?;
        let grid = match (&args.grid, &spec.grid) {
            (Some(g), _) => parse_grid(g)?,
            (None, Some(g)) => SampleGrid::new(g.t0, g.t1, g.count)
                .map_err(|e| usage(format!("bad grid in spec: {e}")))?,
            (None, None) => return Err(usage("no grid: pass --grid or put one in the spec")),
        };
        let need_name = || spec.name.clone().ok_or_else(|| usage("spec needs a `name`"));
        let need_path = || spec.path.clone().ok_or_else(|| usage("spec needs a `path`"));
        let resolved = match spec.kind.as_str() {
            "analytic" => Resolved::Plain(CurveSource::Analytic(AnalyticCurve::by_name(
                &need_name()?,
                spec.params.as_deref().unwrap_or(&[]),
            )?)),
            "sampled" => {
                let f = File::open(need_path()?)?;
                Resolved::Plain(CurveSource::Sampled(SampledCurve::from_csv(BufReader::new(f))?))
            }
            "framed-analytic" => Resolved::Framed(FramedCurveSource::by_name(
                &need_name()?,
                spec.params.as_deref().unwrap_or(&[]),
            )?),
            "framed-sampled" => {
                let f = File::open(need_path()?)?;
                Resolved::Framed(FramedCurveSource::from_csv(BufReader::new(f))?)
            }
            "curvature" => {
                let q = spec
                    .curvature
                    .ok_or_else(|| usage("kind `curvature` needs a `curvature` quadruple"))?;
                let init = spec
                    .init
                    .ok_or_else(|| usage("kind `curvature` needs an `init` state"))?;
                let state = FramedState::new(
                    init.t,
                    Vec3::new(init.gamma[0], init.gamma[1], init.gamma[2]),
                    Vec3::new(init.nu1[0], init.nu1[1], init.nu1[2]),
                    Vec3::new(init.nu2[0], init.nu2[1], init.nu2[2]),
                );
                let states = reconstruct(
                    &CurvatureFns::constant(q[0], q[1], q[2], q[3]),
                    &state,
                    &grid,
                    tol,
                )?;
                Resolved::Framed(FramedCurveSource::from_states(states)?)
            }
            other => return Err(usage(format!("unknown spec kind `{other}`"))),
        };
        return Ok((resolved, grid));
    }
    let name = args
        .curve
        .as_deref()
        .ok_or_else(|| usage("pass --curve NAME or --spec FILE"))?;
    let grid = parse_grid(
        args.grid
            .as_deref()
            .ok_or_else(|| usage("pass --grid t0:t1:count"))?,
    )?;
    let params = parse_params(&args.params)?;
    let resolved = if name.starts_with("framed-") {
        Resolved::Framed(FramedCurveSource::by_name(name, &params)?)
    } else {
        Resolved::Plain(CurveSource::Analytic(AnalyticCurve::by_name(name, &params)?))
    };
    Ok((resolved, grid))
}

fn out_writer(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn report_passes(rep: &RoundTripReport, tolerance: f64) -> bool {
    rep.max_position_error <= tolerance
        && rep.max_frame_error <= tolerance
        && rep.h_error.map_or(true, |h| h <= tolerance)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let tol = Tolerances::from_env();
    match cli.cmd {
        Cmd::Frenet { curve, out } => {
            let (resolved, grid) = resolve(&curve, &tol)?;
            let Resolved::Plain(source) = resolved else {
                return Err(usage("frenet works on non-degenerate curves; use a plain catalog name"));
            };
            let apparatus = apparatus_on_grid(&source, &grid, &tol)?;
            let mut w = out_writer(&out)?;
            writeln!(w, "t,kappa,tau,speed,tx,ty,tz,nx,ny,nz,bx,by,bz")?;
            for f in &apparatus {
                writeln!(
                    w,
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                    f.t, f.kappa, f.tau, f.speed,
                    f.tangent.x, f.tangent.y, f.tangent.z,
                    f.normal.x, f.normal.y, f.normal.z,
                    f.binormal.x, f.binormal.y, f.binormal.z,
                )?;
            }
            Ok(0)
        }
        Cmd::Evolute { curve, theta, out } => {
            let (resolved, grid) = resolve(&curve, &tol)?;
            let mut w = out_writer(&out)?;
            match resolved {
                Resolved::Plain(source) => {
                    let (points, data) = evolute(&source, &grid, &tol)?;
                    if let Some(t) = data.h_vanishes_at {
                        eprintln!("note: speed factor h vanishes near t = {t}");
                    }
                    write_samples_csv(&mut w, &grid.nodes(), &points, &data.lambda, &data.eta)?;
                }
                Resolved::Framed(source) => {
                    let theta = theta.ok_or_else(|| usage("framed evolute needs --theta"))?;
                    let (r, _) = framed_evolute(&source, &Theta::constant(theta), None, &grid, &tol)?;
                    r.write_csv(&mut w)?;
                }
            }
            Ok(0)
        }
        Cmd::Involute {
            curve,
            lambda0,
            eta0,
            theta,
            out,
        } => {
            let (resolved, grid) = resolve(&curve, &tol)?;
            let mut w = out_writer(&out)?;
            match resolved {
                Resolved::Plain(source) => {
                    let (points, data) = involute(&source, (lambda0, eta0), &grid, &tol)?;
                    write_samples_csv(&mut w, &grid.nodes(), &points, &data.lambda, &data.eta)?;
                }
                Resolved::Framed(source) => {
                    let (r, _) = framed_involute(
                        &source,
                        Some((lambda0, eta0)),
                        &Theta::constant(theta),
                        &grid,
                        &tol,
                    )?;
                    r.write_csv(&mut w)?;
                }
            }
            Ok(0)
        }
        Cmd::Mate {
            curve,
            kind,
            lambda0,
            eta0,
            theta,
            eta_rate,
            out,
        } => {
            let (resolved, grid) = resolve(&curve, &tol)?;
            let mut w = out_writer(&out)?;
            match (kind.as_str(), resolved) {
                ("nbb", Resolved::Plain(source)) => nbb_mate(&source, &grid, &tol)?.write_csv(&mut w)?,
                ("tnt", Resolved::Plain(source)) => {
                    tnt_mate(&source, (lambda0, eta0), &grid, &tol)?.write_csv(&mut w)?
                }
                ("nbt", Resolved::Plain(source)) => {
                    nbt_mate(&source, (lambda0, eta0), &grid, &tol)?.write_csv(&mut w)?
                }
                (k @ ("n1n2-n2" | "mu-n1-mu" | "mu-n1-n2" | "n1n2-mu"), Resolved::Framed(source)) => {
                    let inputs = match k {
                        "n1n2-n2" => FramedMateInputs::N1N2N2 {
                            theta: Theta::constant(theta),
                            null_coeff: None,
                        },
                        "mu-n1-mu" => FramedMateInputs::MuN1Mu {
                            lambda0,
                            eta0,
                            theta: Theta::constant(theta),
                        },
                        "mu-n1-n2" => FramedMateInputs::MuN1N2 {
                            eta: Theta::linear(eta0, eta_rate),
                            theta: Theta::constant(theta),
                        },
                        _ => FramedMateInputs::N1N2Mu {
                            lambda0,
                            eta0,
                            theta: Theta::constant(theta),
                        },
                    };
                    framed_mate(&source, &inputs, &grid, &tol)?.write_csv(&mut w)?
                }
                ("nbb" | "tnt" | "nbt", Resolved::Framed(_)) => {
                    return Err(usage(format!("kind `{kind}` needs a non-degenerate curve")))
                }
                ("n1n2-n2" | "mu-n1-mu" | "mu-n1-n2" | "n1n2-mu", Resolved::Plain(_)) => {
                    return Err(usage(format!("kind `{kind}` needs a framed curve")))
                }
                (other, _) => return Err(usage(format!("unknown mate kind `{other}`"))),
            }
            Ok(0)
        }
        Cmd::Roundtrip {
            curve,
            direction,
            lambda0,
            eta0,
            theta,
            tolerance,
        } => {
            let (resolved, grid) = resolve(&curve, &tol)?;
            let rep = match (direction.as_str(), resolved) {
                ("ev-of-inv", Resolved::Plain(source)) => {
                    roundtrip_ev_of_inv(&source, (lambda0, eta0), &grid, &tol)?
                }
                ("inv-of-ev", Resolved::Plain(source)) => roundtrip_inv_of_ev(&source, &grid, &tol)?,
                (d @ ("inv-then-ev" | "ev-then-inv"), Resolved::Framed(source)) => {
                    let dir = if d == "inv-then-ev" {
                        RoundTripDirection::InvThenEv
                    } else {
                        RoundTripDirection::EvThenInv
                    };
                    let params = FramedRoundTripParams {
                        theta: Theta::constant(theta),
                        init: (lambda0, eta0),
                        null_coeff: None,
                    };
                    framed_roundtrips(&source, dir, &params, &grid, &tol)?
                }
                ("ev-of-inv" | "inv-of-ev", Resolved::Framed(_)) => {
                    return Err(usage(format!("direction `{direction}` needs a non-degenerate curve")))
                }
                ("inv-then-ev" | "ev-then-inv", Resolved::Plain(_)) => {
                    return Err(usage(format!("direction `{direction}` needs a framed curve")))
                }
                (other, _) => return Err(usage(format!("unknown direction `{other}`"))),
            };
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(if report_passes(&rep, tolerance) { 0 } else { 1 })
        }
        Cmd::Verify { suite } => {
            let names: Vec<&str> = suite.iter().map(|s| s.as_str()).collect();
            let reports = run_suite(&names, &tol)?;
            println!("{}", serde_json::to_string_pretty(&reports)?);
            Ok(if reports.iter().all(|r| r.verdict) { 0 } else { 1 })
        }
        Cmd::Catalog { json } => {
            let plain = AnalyticCurve::catalog_names();
            let framed = FramedCurveSource::catalog_names();
            if json {
                let doc = serde_json::json!({
                    "analytic": plain,
                    "framed": framed,
                    "checks": suite_names(),
                    "grid": "t0:t1:count",
                    "params": {
                        "line": ["dir_x", "dir_y", "dir_z"],
                        "circle": ["radius"],
                        "helix": ["a", "b"],
                        "astroid": ["a", "b"],
                    },
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                println!("analytic curves (any real parameter t):");
                for n in plain {
                    println!("  {n}");
                }
                println!("framed curves (any real parameter t):");
                for n in framed {
                    println!("  {n}");
                }
                println!("verification checks:");
                for n in suite_names() {
                    println!("  {n}");
                }
            }
            Ok(0)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            // A closed stdout (e.g. piping into `head`) is not a failure.
            if e.root_cause()
                .downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            {
                std::process::exit(0);
            }
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<UsageError>().is_some()
                || matches!(
                    e.downcast_ref::<curvemates::Error>(),
                    Some(curvemates::Error::UnknownCheck(_) | curvemates::Error::UnknownCurve(_))
                ) {
                2
            } else {
                1
            };
            std::process::exit(code);
        }
    }
}
