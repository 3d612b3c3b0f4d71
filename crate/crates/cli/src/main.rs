//! `ek`: evaluate Eisenstein–Kronecker–Lerch series and theta functions, and
//! run the limit-formula and distribution checks.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{CliConfig, Output, Overrides};

#[derive(Parser, Debug)]
#[command(name = "ek", version, about = "Eisenstein–Kronecker series, theta functions and limit-formula checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Flat key=value file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Lattice generators as re1,im1,re2,im2.
    #[arg(long, global = true, allow_hyphen_values = true)]
    lattice: Option<String>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    /// Seed for sampled test points, decimal or 0x-hex.
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    truncation_radius_factor: Option<f64>,
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true)]
    target_abs_error: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a single function value.
    Eval {
        #[command(subcommand)]
        what: EvalCommand,
    },
    /// Run verification checks and print their reports.
    Verify(VerifyArgs),
    /// CSV of K*_0(0,0,s) over a real grid of s.
    Table(TableArgs),
}

#[derive(Subcommand, Debug)]
pub enum EvalCommand {
    /// K*_a(z0, w0, s).
    Kstar {
        #[arg(long)]
        a: u32,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        w0: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Regularized value lim_{s→1}(A K*_0(0,0,s) - 1/(s-1)).
    KstarRegularized,
    /// Reduced theta function θ(z).
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Weierstrass σ(z).
    Sigma {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Weierstrass ℘(z).
    Wp {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    FirstLimit,
    SecondLimit,
    Distribution,
    PropC,
    Kronecker,
    ThetaDist2,
    PadicDist,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    /// Point for single-point checks; sampled points are used when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Second point for the Kronecker check.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Torsion order for the distribution check (default: 2, 3 and 5).
    #[arg(long)]
    pub n: Option<i64>,
    /// Number of sampled points per check.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value = "4", allow_hyphen_values = true)]
    pub g2: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub g3: String,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    /// p-adic precision of the congruence.
    #[arg(long = "N", default_value_t = 8)]
    pub big_n: u32,
    /// t-adic order of the congruence.
    #[arg(long = "M", default_value_t = 16)]
    pub big_m: usize,
    /// Replace the constant Δ² by Δ² + shift (negative control when nonzero).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub constant_shift: String,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long)]
    pub step: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let flags = Overrides {
        lattice: g.lattice,
        truncation_radius_factor: g.truncation_radius_factor,
        quad_tol: g.quad_tol,
        target_abs_error: g.target_abs_error,
        seed: g.seed,
        output: g.output,
    };
    let result = CliConfig::resolve(g.config.as_deref(), &flags).and_then(|cfg| match cli.command {
        Command::Eval { what } => commands::eval(&what, &cfg),
        Command::Verify(args) => commands::verify(&args, &cfg),
        Command::Table(args) => commands::table(&args, &cfg),
    });
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("ek: one or more checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("ek: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
