mod commands;
mod report;
mod rho;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::rho::RhoSpec;

#[derive(Parser, Debug)]
#[command(name = "spinwright", version, about = "Spin transformations and Bonnet-pair diagnostics for triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative residual at which eigenpairs are accepted.
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Seed of the eigensolver start block.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a test mesh as OBJ.
    Generate {
        #[command(subcommand)]
        shape: Shape,
    },
    /// Change the mean-curvature half-density by a prescribed potential.
    Transform {
        input: PathBuf,
        /// Potential, e.g. `const:0.2`, `lobe:z:0.3:0.25`, `own+const:1` or a values file.
        #[arg(long, allow_hyphen_values = true)]
        rho: RhoSpec,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON report path; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Curvature, Hopf differential and umbilic indices of one mesh.
    Diagnose {
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Relative principal-curvature gap below which a vertex is umbilic.
        #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
        umbilic_tol: f64,
    },
    /// Isometry, shape distortion, congruence and Gauss-map tests for a pair.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Relative edge-length tolerance for the isometry check.
        #[arg(long, default_value_t = 1e-6, allow_negative_numbers = true)]
        iso_tol: f64,
        /// Also accept congruence by an orientation-reversing motion.
        #[arg(long)]
        allow_reflection: bool,
    },
    /// Low Dirac spectrum and numerical kernel dimension.
    Kernel {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "own")]
        rho: RhoSpec,
        /// Eigenvalues `λ ≤ zero_tol` count as kernel.
        #[arg(long, default_value_t = 5e-2, allow_negative_numbers = true)]
        zero_tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Subcommand, Debug)]
enum Shape {
    Icosphere {
        #[arg(long)]
        level: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Ellipsoid {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        level: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Torus {
        /// Major radius.
        #[arg(long = "R")]
        major: f64,
        /// Minor radius.
        #[arg(long = "r")]
        minor: f64,
        #[arg(long)]
        nu: usize,
        #[arg(long)]
        nv: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let raw: Vec<String> = std::env::args().collect();
    match commands::run(cli.command, raw) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("spinwright: {e}");
            commands::Status::BadInput.into()
        }
    }
}
