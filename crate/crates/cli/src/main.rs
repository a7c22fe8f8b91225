#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use hencky::convexity::Suite;
use hencky::sampling::DEFAULT_SEED;
use hencky::MaterialParams;

mod commands;

/// Exit code for malformed input and inadmissible data.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hencky",
    version,
    about = "Planar exponentiated Hencky elasticity toolkit"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Shear modulus μ.
    #[arg(long, global = true, default_value_t = 1.0, value_parser = positive)]
    mu: f64,

    /// Bulk modulus κ.
    #[arg(long, global = true, default_value_t = 1.0, value_parser = positive)]
    kappa: f64,

    /// Isochoric exponent k.
    #[arg(long, global = true, default_value_t = 0.25, value_parser = positive)]
    k: f64,

    /// Volumetric exponent k̂.
    #[arg(long = "k-hat", global = true, default_value_t = 0.125, value_parser = positive)]
    k_hat: f64,

    /// Seed for every randomized step (decimal or 0x-prefixed hex).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,

    /// Samples per randomized scan.
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,

    /// Output directory for written artifacts.
    #[arg(long, global = true, default_value = "hencky-out")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy, its parts and the first Piola-Kirchhoff stress of one F.
    Eval {
        /// Row-major entries F11 F12 F21 F22.
        #[arg(num_args = 4, required = true, allow_negative_numbers = true,
              value_names = ["F11", "F12", "F21", "F22"])]
        entries: Vec<f64>,
    },

    /// Samples of Y(θ) = exp(k/2 · log²θ) on a log-spaced grid, one CSV per k.
    CurveY {
        #[arg(long, value_delimiter = ',', default_values_t = [0.125, 0.25, 0.5], value_parser = positive)]
        ks: Vec<f64>,

        #[arg(long = "theta-max", default_value_t = 1000.0)]
        theta_max: f64,

        #[arg(long, default_value_t = 400)]
        points: usize,
    },

    /// Runs a certification suite and writes its JSON reports.
    Certify {
        /// rank-one, polyconvex-witness, von-neumann, lambda-max, coercivity,
        /// volumetric or all.
        suite: Suite,
    },

    /// Minimizes the total energy on a rectangle with Dirichlet data.
    #[command(group(ArgGroup::new("boundary").required(true).args(["affine", "shear"])))]
    Solve {
        /// Cell counts, e.g. `8x8`.
        #[arg(long, default_value = "8x8", value_parser = parse_mesh)]
        mesh: (usize, usize),

        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        width: f64,

        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        height: f64,

        /// φ₀(x) = F₀x with F₀ given row-major.
        #[arg(long, num_args = 4, allow_negative_numbers = true,
              value_names = ["A11", "A12", "A21", "A22"])]
        affine: Option<Vec<f64>>,

        /// φ₀(x, y) = (x + γy, y).
        #[arg(long, allow_negative_numbers = true, value_name = "GAMMA")]
        shear: Option<f64>,

        /// Uniform random offset of interior nodes before solving.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,

        #[arg(long, default_value_t = 1e-7)]
        tol: f64,

        #[arg(long = "max-iter", default_value_t = 100_000)]
        max_iter: usize,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive and finite, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| e.to_string())
}

fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (nx, ny) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NXxNY, got `{s}`"))?;
    let nx: usize = nx.parse().map_err(|_| format!("bad cell count `{nx}`"))?;
    let ny: usize = ny.parse().map_err(|_| format!("bad cell count `{ny}`"))?;
    if nx == 0 || ny == 0 {
        return Err("cell counts must be at least 1".into());
    }
    Ok((nx, ny))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let params = match MaterialParams::new(g.mu, g.kappa, g.k, g.k_hat) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match &cli.command {
        Command::Eval { entries } => commands::eval(&params, entries),
        Command::CurveY {
            ks,
            theta_max,
            points,
        } => commands::curve_y(ks, *theta_max, *points, &g.out),
        Command::Certify { suite } => commands::certify(&params, *suite, g.samples, g.seed, &g.out),
        Command::Solve {
            mesh,
            width,
            height,
            affine,
            shear,
            perturb,
            tol,
            max_iter,
        } => commands::solve(
            &params,
            &commands::SolveArgs {
                cells: *mesh,
                size: (*width, *height),
                affine: affine.clone(),
                shear: *shear,
                perturb: *perturb,
                tol: *tol,
                max_iter: *max_iter,
                seed: g.seed,
            },
            &g.out,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
