//! Command-line front end.
//!
//! Every subcommand prints JSON on stdout. Failures print
//! `{"error": kind, "message": text}` on stderr and exit with 1 for invalid
//! input, 2 for numerical non-convergence. `verify-harnack` and
//! `isoradial --check` also exit with 1 when the check fails.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::amoeba::{amoeba_area, amoeba_membership, random_interior_points, rasterize_amoeba, Window};
use crate::bivariate::BivariatePolynomial;
use crate::divisor::vertex_divisor;
use crate::error::{Error, Result};
use crate::genus0::{invert_boundary_detailed, BoundaryTriple};
use crate::harnack::{verify_harnack_with, HarnackOptions};
use crate::holes::detect_holes;
use crate::io::{read_json, to_json_string, write_json, write_pgm, write_svg};
use crate::isoradial::{isoradial_spectral_check, isoradial_weights, IsoradialAngles};
use crate::kasteleyn::{characteristic_polynomial, verify_boundary_vs_zigzag};
use crate::lattice::EdgeWeights;
use crate::ronkin::{monge_ampere_residual, ronkin_detailed, ronkin_gradient, volume_difference};

/// Environment variable that seeds every randomized sampling step.
pub const SEED_VAR: &str = "HARNACK_SEED";

#[derive(Parser, Debug)]
#[command(name = "harnack", version, about = "Spectral curves of hexagonal dimer models and their amoebas")]
pub struct Cli {
    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Characteristic polynomial det K(z, w) of a weighted fundamental domain.
    Spectral {
        /// Edge weights JSON: {"d", "a", "b", "c"}, arrays indexed [y][x].
        #[arg(long)]
        weights: PathBuf,
        /// Write the polynomial here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary points as roots and as zig-zag products, with their discrepancy.
    Boundary {
        #[arg(long)]
        weights: PathBuf,
    },
    /// Rasterize the amoeba to PGM (and optionally SVG) and report its area.
    Amoeba {
        /// Polynomial JSON: {"d", "coeffs": [{"i", "j", "v"}]}.
        #[arg(long)]
        poly: PathBuf,
        /// Pixels per side.
        #[arg(long, default_value_t = 600)]
        grid: usize,
        /// "auto" or x0,x1,y0,y1 in log coordinates.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        window: String,
        /// Padding of the automatic window, in log units.
        #[arg(long, default_value_t = 2.0)]
        pad: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write an SVG with hole labels.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Ronkin function and its gradient at one point.
    Ronkin {
        #[arg(long)]
        poly: PathBuf,
        /// Point x,y in log coordinates.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Monge-Ampère residual det Hess R - 1/π² at random interior points.
    MaCheck {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
    },
    /// Holes of the amoeba with their orders and Ronkin intercepts.
    Holes {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 400)]
        grid: usize,
    },
    /// Numerical certificate that the curve is Harnack; exit 0 iff it passes.
    VerifyHarnack {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 600)]
        resolution: usize,
    },
    /// Genus-zero curve with prescribed boundary values {"A", "B", "C"}.
    Genus0Fit {
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Isoradial weights from angles {"alpha", "beta", "gamma"}.
    Isoradial {
        #[arg(long)]
        angles: PathBuf,
        #[arg(long)]
        weights_out: Option<PathBuf>,
        /// Check that the sine parametrization lies on the spectral curve; exit 0 iff it does.
        #[arg(long)]
        check: bool,
    },
    /// Divisor of a white vertex on the compact ovals.
    Divisor {
        #[arg(long)]
        weights: PathBuf,
        /// White vertex x,y.
        #[arg(long)]
        vertex: String,
    },
    /// Integral of R1 - R2 for two curves with equal boundary coefficients.
    VolumeDiff {
        #[arg(long)]
        poly1: PathBuf,
        #[arg(long)]
        poly2: PathBuf,
    },
}

fn seed() -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| Error::invalid(format!("{SEED_VAR} must be an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::invalid(format!("{what} must be two comma-separated numbers, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    Ok((parts[0].parse().map_err(|_| bad())?, parts[1].parse().map_err(|_| bad())?))
}

fn poly(path: &PathBuf) -> Result<BivariatePolynomial> {
    read_json(path)
}

/// Output of a subcommand and whether its check passed.
struct Outcome {
    json: String,
    pass: bool,
}

fn emit<T: Serialize + ?Sized>(v: &T) -> Result<Outcome> {
    Ok(Outcome { json: to_json_string(v)?, pass: true })
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Spectral { weights, out } => {
            let p = characteristic_polynomial(&read_json::<EdgeWeights>(&weights)?)?;
            match out {
                Some(path) => {
                    write_json(&path, &p)?;
                    emit(&json!({ "d": p.d(), "out": path }))
                }
                None => emit(&p),
            }
        }
        Command::Boundary { weights } => emit(&verify_boundary_vs_zigzag(&read_json(&weights)?)?),
        Command::Amoeba { poly: path, grid, window, pad, out, svg } => {
            let p = poly(&path)?;
            let window = if window == "auto" { Window::auto(&p, pad)? } else { Window::parse(&window)? };
            let g = rasterize_amoeba(&p, window, grid, grid)?;
            write_pgm(&out, &g)?;
            if let Some(svg) = svg {
                write_svg(svg, &g, detect_holes(&p, &g).ok().as_ref())?;
            }
            emit(
                &json!({ "window": window, "nx": g.nx, "ny": g.ny, "members": g.member_count(), "area": amoeba_area(&g) }),
            )
        }
        Command::Ronkin { poly: path, at } => {
            let p = poly(&path)?;
            let (x, y) = pair::<f64>(&at, "--at")?;
            let r = ronkin_detailed(&p, x, y)?;
            let g = ronkin_gradient(&p, x, y)?;
            emit(
                &json!({ "x": x, "y": y, "value": r.value, "error": r.error, "converged": r.converged, "gradient": [g.0, g.1] }),
            )
        }
        Command::MaCheck { poly: path, points, step } => {
            let p = poly(&path)?;
            let g = rasterize_amoeba(&p, Window::auto(&p, 1.0)?, 300, 300)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed()?);
            // keep the stencil inside the amoeba
            let margin = ((3.0 * step / g.dx().min(g.dy())).ceil() as usize).max(2);
            let mut rows = Vec::new();
            for (x, y) in random_interior_points(&g, points, margin, &mut rng) {
                rows.push(json!({ "x": x, "y": y, "residual": monge_ampere_residual(&p, x, y, step)? }));
            }
            let mut abs: Vec<f64> = rows.iter().map(|r| r["residual"].as_f64().unwrap_or(f64::NAN).abs()).collect();
            abs.sort_by(f64::total_cmp);
            let median = if abs.is_empty() { f64::NAN } else { abs[abs.len() / 2] };
            emit(&json!({ "step": step, "points": rows, "median_abs_residual": median }))
        }
        Command::Holes { poly: path, grid } => {
            let p = poly(&path)?;
            let g = rasterize_amoeba(&p, Window::auto(&p, 1.0)?, grid, grid)?;
            emit(&detect_holes(&p, &g)?)
        }
        Command::VerifyHarnack { poly: path, resolution } => {
            let opts = HarnackOptions { seed: seed()?, resolution, ..HarnackOptions::default() };
            let cert = verify_harnack_with(&poly(&path)?, &opts)?;
            Ok(Outcome { pass: cert.pass, ..emit(&cert)? })
        }
        Command::Genus0Fit { boundary, out } => {
            let target: BoundaryTriple = read_json(&boundary)?;
            let inv = invert_boundary_detailed(&target)?;
            write_json(&out, &inv.curve)?;
            emit(&json!({ "curve": inv.curve, "steps": inv.steps, "residual": inv.residual }))
        }
        Command::Isoradial { angles, weights_out, check } => {
            let ang: IsoradialAngles = read_json(&angles)?;
            let w = isoradial_weights(&ang)?;
            let coincident = ang.coincidences();
            let mut report = json!({ "weights": w, "coincident_families": coincident });
            if let Some(path) = weights_out {
                write_json(&path, &w)?;
                report["weights"] = json!(path);
            }
            let mut pass = true;
            if check {
                let c = isoradial_spectral_check(&ang)?;
                let p = characteristic_polynomial(&w)?;
                let origin = amoeba_membership(&p, 0.0, 0.0)?;
                pass = c.pass && origin;
                report["check"] = json!(c);
                report["origin_in_amoeba"] = json!(origin);
            }
            Ok(Outcome { pass, ..emit(&report)? })
        }
        Command::Divisor { weights, vertex } => {
            let v = pair::<usize>(&vertex, "--vertex")?;
            emit(&vertex_divisor(&read_json(&weights)?, v)?)
        }
        Command::VolumeDiff { poly1, poly2 } => emit(&volume_difference(&poly(&poly1)?, &poly(&poly2)?)?),
    }
}

fn error_json(e: &Error) -> String {
    to_json_string(&json!({ "error": e.kind(), "message": e.to_string() })).unwrap_or_else(|_| e.to_string())
}

/// Runs the CLI on `argv` (program name first), printing to stdout and
/// stderr, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n.max(1));
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(cli.command)),
        Err(e) => Err(Error::invalid(format!("thread pool: {e}"))),
    };
    match result {
        Ok(out) => {
            print!("{}", out.json);
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprint!("{}", error_json(&e));
            e.exit_code()
        }
    }
}
