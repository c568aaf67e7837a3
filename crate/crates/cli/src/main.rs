//! `steptunnel`: transmission spectra, resonance catalogs, alias audits and
//! parameter scans for piecewise constant potentials.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use steptunnel::scan::GridAxis;
use thiserror::Error;

const UNITS: &str = "All physics flags are in natural units with 2m/ħ² = 1: energies and \
potential levels share one unit, lengths are its inverse square root, and the lead wave \
number is κ = sqrt(E).";

#[derive(Debug, Parser)]
#[command(name = "steptunnel", version, about = "Exact 1D tunneling through piecewise constant potentials", long_about = UNITS, after_help = UNITS)]
pub struct Cli {
    /// Output path (file or, for `alias`, directory)
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Peak refinement tolerance in κ
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

/// Exactly one of `--potential` or `--mbp` (with `--wells`).
#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    /// JSON potential file (`{"kind":"explicit",...}` or `{"kind":"mbp",...}`)
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// Inline multi-barrier train as `m,V0,delta`
    #[arg(long, value_name = "M,V0,DELTA")]
    pub mbp: Option<String>,
    /// Well widths for `--mbp`, left to right
    #[arg(long, value_name = "LIST")]
    pub wells: Option<String>,
    /// Position of the first breakpoint for `--mbp`
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission spectrum T(κ) at E = κ², written as CSV
    Spectrum {
        #[command(flatten)]
        potential: PotentialArgs,
        /// κ grid as lo:hi:count
        #[arg(long)]
        kappa: GridAxis,
    },
    /// Locate resonant peaks of ln T(κ) and report counts and estimates
    Peaks {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Search grid as lo:hi:count (default 0.02:1.2*sqrt(V0):20000)
        #[arg(long)]
        kappa: Option<GridAxis>,
    },
    /// Compare resonances across rearrangements of the well widths
    Alias {
        #[command(flatten)]
        potential: PotentialArgs,
        /// One ordering of the well widths; repeat for several
        #[arg(long = "perm", value_name = "LIST")]
        perms: Vec<String>,
        /// Every distinct ordering of the wells
        #[arg(long, conflicts_with = "perms")]
        all: bool,
        /// Search grid as lo:hi:count
        #[arg(long)]
        kappa: Option<GridAxis>,
    },
    /// ln T over κ and a well-width parameter, as long-form CSV plus a graymap
    Scan2d {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Vary every well together over lo:hi:count
        #[arg(long, conflicts_with = "single_well")]
        uniform_tau: Option<GridAxis>,
        /// Vary one well: `base_tau,index` with index counted from 1
        #[arg(long, value_name = "BASE_TAU,INDEX", requires = "tau_prime")]
        single_well: Option<String>,
        /// Range of the varied well width as lo:hi:count
        #[arg(long)]
        tau_prime: Option<GridAxis>,
        /// κ grid as lo:hi:count
        #[arg(long)]
        kappa: GridAxis,
        /// Graymap path (default: the CSV path with a .pgm extension)
        #[arg(long)]
        raster: Option<PathBuf>,
    },
    /// Wave function ψ(x) for one energy
    Wavefunction {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Energy E
        #[arg(long, conflicts_with = "at_kappa")]
        energy: Option<f64>,
        /// Lead wave number κ, E = κ²
        #[arg(long = "at-kappa")]
        at_kappa: Option<f64>,
        /// Sample positions as lo:hi:count (default: the potential span padded by a quarter each side)
        #[arg(long, allow_hyphen_values = true)]
        x: Option<GridAxis>,
        #[arg(long, value_enum, default_value_t = Side::Left)]
        incidence: Side,
        /// Amplitude of the incident-side outgoing wave
        #[arg(long, default_value_t = 1.0)]
        seed: f64,
        /// Rescale ψ so that max |ψ| equals the highest potential level
        #[arg(long)]
        scale_to_barrier: bool,
    },
    /// Staircase approximation of a sampled potential, written as JSON
    Discretize {
        /// CSV of `x,V` samples, optional header
        #[arg(long)]
        samples: PathBuf,
        /// Number of equal-width steps
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
