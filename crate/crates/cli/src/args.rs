use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use phlab_core::config::RawConfig;

#[derive(Debug, Parser)]
#[command(name = "phlab", version, about = "Polyharmonic Dirichlet/Neumann eigenvalue laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact interval spectrum.
    Oned(Flags),
    /// Galerkin spectrum on a square or rectangle.
    Spectrum2d(Flags),
    /// Run one named claim set at the configured parameters.
    Verify {
        /// Claim set name, or `all`.
        set: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Markdown report of a claim set (default: the acceptance suite).
    Report {
        #[arg(default_value = "all")]
        set: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run the complete acceptance suite.
    All(Flags),
}

impl Command {
    pub fn flags(&self) -> &Flags {
        match self {
            Command::Oned(f) | Command::Spectrum2d(f) | Command::All(f) => f,
            Command::Verify { flags, .. } | Command::Report { flags, .. } => flags,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Oned(_) => "oned",
            Command::Spectrum2d(_) => "spectrum2d",
            Command::Verify { .. } => "verify",
            Command::Report { .. } => "report",
            Command::All(_) => "all",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub m: Option<u32>,
    /// dirichlet | neumann
    #[arg(long)]
    pub bc: Option<String>,
    /// Basis functions per axis.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// square | rectangle | interval
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub lx: Option<f64>,
    #[arg(long)]
    pub ly: Option<f64>,
    /// Interval length.
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub tol_zero: Option<f64>,
    #[arg(long)]
    pub tol_root: Option<f64>,
    #[arg(long)]
    pub tol_identity: Option<f64>,
    #[arg(long)]
    pub margin_factor: Option<f64>,
    /// json | csv | markdown
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the keys above (snake_case).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Zero the runtime field so repeated runs are byte-identical.
    #[arg(long)]
    pub stable_output: bool,
    /// Multiply every computed Neumann eigenvalue by this factor (fault injection).
    #[arg(long)]
    pub perturb: Option<f64>,
}

impl Flags {
    pub fn raw(&self) -> RawConfig {
        RawConfig {
            m: self.m,
            bc: self.bc.clone(),
            n: self.n,
            count: self.count,
            k_max: self.k_max,
            domain: self.domain.clone(),
            lx: self.lx,
            ly: self.ly,
            length: self.length,
            seed: self.seed,
            samples: self.samples,
            tol_zero: self.tol_zero,
            tol_root: self.tol_root,
            tol_identity: self.tol_identity,
            margin_factor: self.margin_factor,
            format: self.format.clone(),
            out: self.out.clone(),
        }
    }
}
