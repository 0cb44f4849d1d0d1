//! The `bgrowth` command line: JSON in, CSV or JSON out.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::ball::{ball_extend, cap_mass, project_pushforward, BallPoint, SphereMeasure};
use crate::error::{Error, Result};
use crate::halfspace::{extend, normal_trace_convolution, HalfSpacePoint};
use crate::harness::{
    beurling_report, verify_ball_growth, verify_theorem1_converse, verify_theorem1_forward, VerificationCase,
};
use crate::measures::{
    beurling_sum, m_profile, separation_index, strong_derivative_probe, symmetric_derivative, BoundaryMeasure,
    PointSequence,
};
use crate::mellin::{k_hat_closed, k_hat_numeric};
use crate::quad::{linear_grid, log_grid};
use crate::specfun::{tauberian_constant, Dimension};

/// Largest |closed - numeric| accepted by `mellin`.
pub const MELLIN_TOLERANCE: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "bgrowth", version, about = "Boundary growth of positive harmonic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the Poisson extension of a half-space measure at one point.
    Extend {
        #[arg(long)]
        measure: PathBuf,
        /// Boundary coordinates followed by the height, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Normal trace u(0, t) on a grid of heights, as CSV.
    Trace(TraceArgs),
    /// Closed-form against numeric transform of the trace kernel, as CSV.
    Mellin {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the forward and converse growth checks of a case file.
    Verify {
        #[arg(long)]
        case: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetric and strong derivative reports of a measure at the origin.
    Derivative {
        #[arg(long)]
        measure: PathBuf,
        /// Radii, largest first.
        #[arg(long, default_value = "1e-1:1e-5:log17")]
        r: String,
        /// Regularity constants K of the probed balls, comma separated.
        #[arg(long, default_value = "2")]
        k: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Beurling sum and separation of a point sequence, with point-mass checks.
    Beurling {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measures on the unit sphere.
    #[command(subcommand)]
    Ball(BallCommand),
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[arg(long)]
    measure: PathBuf,
    /// Heights: `a:b:N` (linear), `a:b:logN` (logarithmic) or a comma list.
    #[arg(long)]
    t: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BallCommand {
    /// Evaluate the ball extension at one interior point.
    Extend {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// u(x0 (1 - t)) along the normal at the base point, as CSV.
    Trace(TraceArgs),
    /// Push the measure forward to the tangent plane; prints measure JSON.
    Project {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cap power measure in R^3 against its projection at one height.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.1)]
        cap: f64,
        #[arg(long, default_value_t = 1e-3)]
        t: f64,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `a:b:N`, `a:b:logN` or `v1,v2,...`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("cannot parse grid {spec:?}; use a:b:N, a:b:logN or a comma list"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, count] => {
            let (a, b) = (num(a)?, num(b)?);
            let (log, count) = match count.trim().strip_prefix("log") {
                Some(c) => (true, c),
                None => (false, count.trim()),
            };
            let count: usize = count.parse().map_err(|_| bad())?;
            if count == 0 {
                return Err(bad());
            }
            if log {
                if !(a > 0.0 && b > 0.0) {
                    return Err(Error::InvalidInput(format!("log grid {spec:?} needs positive ends")));
                }
                log_grid(a, b, count)
            } else {
                linear_grid(a, b, count)
            }
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

fn parse_point(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("cannot parse point {spec:?}")))
        })
        .collect()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn decreasing(mut grid: Vec<f64>) -> Vec<f64> {
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    grid
}

fn num(v: f64) -> String {
    format!("{v:.15e}")
}

struct Output<'a> {
    stdout: &'a mut dyn Write,
}

impl Output<'_> {
    fn emit(&mut self, out: &Option<PathBuf>, text: &str) -> Result<()> {
        match out {
            Some(path) => fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::InvalidInput(format!("stdout: {e}"))),
        }
    }

    fn json<T: Serialize>(&mut self, out: &Option<PathBuf>, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
        text.push('\n');
        self.emit(out, &text)
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut text = format!("{header}\n");
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let stderr = std::io::stderr();
    let mut err = stderr.lock();
    run_with(args, &mut lock, &mut err)
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let mut out = Output { stdout };
    match dispatch(cli.command, &mut out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn trace_rows(args: &TraceArgs, n: Dimension, mut u: impl FnMut(f64) -> Result<f64>, mut m: impl FnMut(f64) -> Result<f64>) -> Result<String> {
    let grid = parse_grid(&args.t)?;
    if grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidInput("heights must be positive".into()));
    }
    let c = tauberian_constant(args.alpha, n)?;
    let rows = grid
        .iter()
        .map(|&t| {
            let value = u(t)?;
            let scale = t.powf(args.alpha);
            Ok(vec![t, value, value * scale, m(t)? * scale / c])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(csv("t,u,u_t_alpha,target", rows))
}

fn dispatch(command: Command, out: &mut Output<'_>) -> Result<bool> {
    match command {
        Command::Extend { measure, point } => {
            let mu: BoundaryMeasure = read_json(&measure)?;
            let mut coords = parse_point(&point)?;
            if coords.len() != mu.dim().get() as usize {
                return Err(Error::InvalidInput(format!("point needs {} coordinates", mu.dim())));
            }
            let t = coords.pop().unwrap_or(f64::NAN);
            let value = extend(&mu, &HalfSpacePoint::new(coords, t)?)?;
            out.emit(&None, &format!("{}\n", num(value)))?;
            Ok(true)
        }
        Command::Trace(args) => {
            let mu: BoundaryMeasure = read_json(&args.measure)?;
            let text = trace_rows(&args, mu.dim(), |t| normal_trace_convolution(&mu, t), |t| m_profile(&mu, t))?;
            out.emit(&args.out, &text)?;
            Ok(true)
        }
        Command::Mellin { alpha, n, y, out: path } => {
            let n = Dimension::new(n)?;
            let mut worst: f64 = 0.0;
            let rows = parse_grid(&y)?
                .into_iter()
                .map(|y| {
                    let c = k_hat_closed(y, alpha, n)?;
                    let v = k_hat_numeric(y, alpha, n)?;
                    let diff = (c - v).norm();
                    worst = worst.max(diff);
                    Ok(vec![y, c.re, c.im, v.re, v.im, diff])
                })
                .collect::<Result<Vec<_>>>()?;
            out.emit(&path, &csv("y,closed_re,closed_im,numeric_re,numeric_im,abs_diff", rows))?;
            Ok(worst <= MELLIN_TOLERANCE)
        }
        Command::Verify { case, out: path } => {
            let case: VerificationCase = read_json(&case)?;
            case.validate()?;
            let forward = verify_theorem1_forward(&case)?;
            let converse = verify_theorem1_converse(&case)?;
            let passed = forward.passed && converse.passed;
            #[derive(Serialize)]
            struct Report<'a> {
                passed: bool,
                forward: &'a crate::harness::ForwardReport,
                converse: &'a crate::harness::ConverseReport,
            }
            out.json(
                &path,
                &Report {
                    passed,
                    forward: &forward,
                    converse: &converse,
                },
            )?;
            Ok(passed)
        }
        Command::Derivative { measure, r, k, out: path } => {
            let mu: BoundaryMeasure = read_json(&measure)?;
            let grid = decreasing(parse_grid(&r)?);
            let ks = parse_grid(&k)?;
            let d = mu.dim().boundary();
            let directions: Vec<Vec<f64>> = (0..d)
                .flat_map(|i| {
                    [1.0, -1.0].map(|s| {
                        let mut e = vec![0.0; d];
                        e[i] = s;
                        e
                    })
                })
                .collect();
            let symmetric = symmetric_derivative(&mu, &grid)?;
            let strong = strong_derivative_probe(&mu, &ks, &directions, &grid)?;
            #[derive(Serialize)]
            struct Report {
                symmetric: crate::report::ConvergenceReport,
                strong: crate::measures::StrongDerivativeReport,
            }
            out.json(&path, &Report { symmetric, strong })?;
            Ok(true)
        }
        Command::Beurling {
            sequence,
            measure,
            kappa,
            out: path,
        } => {
            let seq: PointSequence = read_json(&sequence)?;
            match measure {
                Some(m) => {
                    let mu: BoundaryMeasure = read_json(&m)?;
                    let report = beurling_report(&seq, &mu, kappa)?;
                    out.json(&path, &report)?;
                    Ok(report.atom_inequality != Some(false) && report.implication != Some(false))
                }
                None => {
                    #[derive(Serialize)]
                    struct Report {
                        separation_index: Option<f64>,
                        sum: crate::measures::BeurlingSum,
                    }
                    let report = Report {
                        separation_index: separation_index(&seq).ok(),
                        sum: beurling_sum(&seq),
                    };
                    out.json(&path, &report)?;
                    Ok(true)
                }
            }
        }
        Command::Ball(cmd) => ball(cmd, out),
    }
}

fn ball(command: BallCommand, out: &mut Output<'_>) -> Result<bool> {
    match command {
        BallCommand::Extend { measure, point } => {
            let mu: SphereMeasure = read_json(&measure)?;
            let y = BallPoint::new(parse_point(&point)?)?;
            out.emit(&None, &format!("{}\n", num(ball_extend(&mu, &y)?)))?;
            Ok(true)
        }
        BallCommand::Trace(args) => {
            let mu: SphereMeasure = read_json(&args.measure)?;
            let n = mu.dim();
            let d = n.boundary() as i32;
            let text = trace_rows(
                &args,
                n,
                |t| ball_extend(&mu, &BallPoint::along_normal(mu.base_point(), t)?),
                |t| Ok(cap_mass(&mu, t.min(2.0))? / t.powi(d)),
            )?;
            out.emit(&args.out, &text)?;
            Ok(true)
        }
        BallCommand::Project { measure, epsilon, out: path } => {
            let mu: SphereMeasure = read_json(&measure)?;
            out.json(&path, &project_pushforward(&mu, epsilon)?)?;
            Ok(true)
        }
        BallCommand::Verify {
            alpha,
            b,
            cap,
            t,
            tolerance,
            out: path,
        } => {
            let report = verify_ball_growth(alpha, b, cap, t, tolerance)?;
            out.json(&path, &report)?;
            Ok(report.passed)
        }
    }
}
