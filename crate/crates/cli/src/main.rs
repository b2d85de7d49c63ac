//! `girthlab` command-line frontend.

mod commands;
mod output;
mod params;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "girthlab", version, about = "Walks, percolation and self-avoiding walks on free-product Cayley graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a ball, report degree and girth, export the edge list.
    Graph(GraphArgs),
    /// Random-walk kernels, spectral radius and the kernel inequalities.
    Kernel(KernelArgs),
    /// Bond percolation experiments.
    Perc(PercArgs),
    /// Self-avoiding walk census, generating functions, decay and speed.
    Saw(SawArgs),
    /// Run every check and write a certificate.
    Verify(VerifyArgs),
    /// Render SVG plots from CSV outputs.
    Report(ReportArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// key = value file with one section per subcommand; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory (default: $GIRTHLAB_OUT).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub spec: Option<String>,
    /// Ball radius to export.
    #[arg(long = "R")]
    pub radius: Option<usize>,
    #[arg(long = "girth-rmax")]
    pub girth_rmax: Option<usize>,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long = "R")]
    pub radius: Option<usize>,
    /// Number of steps (default R).
    #[arg(long = "N")]
    pub steps: Option<usize>,
    /// srw, nbw or both.
    #[arg(long)]
    pub walk: Option<String>,
    /// Rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    #[arg(long = "rho-ub")]
    pub rho_ub: Option<f64>,
    /// Return-probability horizon for the spectral radius sequence.
    #[arg(long = "rho-steps")]
    pub rho_steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PercArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub spec: Option<String>,
    /// crossing, pc, theta, two-point, witness, triangle, tail or susceptibility.
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long = "R")]
    pub radius: Option<usize>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma list or `lo:hi:count`.
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long = "theta-star")]
    pub theta_star: Option<f64>,
    #[arg(long = "rho-ub")]
    pub rho_ub: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SawArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Truncation length for generating functions (default nmax).
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "z-grid")]
    pub z_grid: Option<String>,
    /// Rosenbluth trials; 0 skips sampling.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "rho-ub")]
    pub rho_ub: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated graph specs.
    #[arg(long)]
    pub spec: Option<String>,
    /// Applied to every spec given with --spec.
    #[arg(long = "rho-ub")]
    pub rho_ub: Option<f64>,
    #[arg(long = "bnp-C")]
    pub bnp_c: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    /// crossing-vs-p, tail-loglog, chi-ratio, speed-vs-n or decay-rate.
    #[arg(long)]
    pub kind: Option<String>,
    /// CSV to plot; without it every known CSV in the output directory is plotted.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Graph(a) => commands::graph(a),
        Cmd::Kernel(a) => commands::kernel(a),
        Cmd::Perc(a) => commands::perc(a),
        Cmd::Saw(a) => commands::saw(a),
        Cmd::Verify(a) => commands::verify(a),
        Cmd::Report(a) => commands::report(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
