mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "fq", version, about = "Real-rooted trigonometric maps, root multisets and their spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// output directory for artifacts and the run manifest
    #[arg(long, global = true, default_value = "fq-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// worker threads for parallel kernels (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// recorded in the manifest; randomized kernels use fixed internal seeds
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// validate inputs and exit without computing
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Build an Example-1 map from a spec: model, root lattice at t = 0, roots in a window
    Construct {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 50.0)]
        window: f64,
    },
    /// Real roots in [-window, window]: contour search for a model, parametric for a spec
    Roots {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        model: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        window: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Fourier-Bohr spectrum: contour integrals for a spec, rational approximant for a model
    Spectrum {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        model: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 5.0)]
        window: f64,
        /// coefficients at or below this modulus are dropped
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Cut-and-project multisets on [0, window] with closed-form and empirical spectra
    Cutproject {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        window: f64,
        /// labels (l1, l2) range over [-labels, labels]^2
        #[arg(long, default_value_t = 3)]
        labels: i64,
    },
    /// Genericity (or uniform genericity when M is present and not square)
    Generic {
        #[arg(long)]
        model: PathBuf,
        /// transverse grid resolution for uniform genericity
        #[arg(long, default_value_t = 8)]
        grid: usize,
    },
    /// Unfoldedness of a tuple of polytopes
    Unfolded {
        #[arg(long)]
        polytopes: PathBuf,
    },
    /// Mixed volume of a tuple of polytopes
    Mixedvol {
        #[arg(long)]
        polytopes: PathBuf,
    },
    /// Amoeba membership on a grid of Log-space points for the first component
    Amoeba {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        window: f64,
        /// sample points per axis
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// fibre grid per torus variable
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Lee-Yang test for the first component
    Leeyang {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// M-stability probe: perturb M by up to delta and look for amoeba crossings
    Stability {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// End-to-end check: real-rootedness, density and Poisson summation
    Verify {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        model: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 100.0)]
        window: f64,
        /// relative density tolerance for model verification
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
    /// SVG plot of a CSV produced by another subcommand
    Plot {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
