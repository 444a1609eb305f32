//! Library side of the `besselkit` command: argument model, config merge
//! and the command implementations. `main.rs` only maps errors to exit
//! codes.

pub mod commands;
pub mod config;
pub mod output;
pub mod suite;

use std::path::PathBuf;

use besselkit_core::Error;
use clap::{Args, Parser, Subcommand};

pub use config::{Format, RunConfig};

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

/// Process exit code for an outcome or error: 0 pass, 1 experiment
/// failure, 2 configuration error, 3 numerical error.
pub fn exit_code(result: &Result<Outcome, Error>) -> i32 {
    match result {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) if e.is_config() => 2,
        Err(_) => 3,
    }
}

#[derive(Debug, Parser)]
#[command(name = "besselkit", version, about = "Bessel potentials, fractional norms and K-functionals on periodic grids")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (directory for suite-all). Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args, Default, Clone)]
pub struct InputArgs {
    /// Grid as `n:N`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Function spec; repeatable.
    #[arg(long = "fn")]
    pub functions: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Norm table, one row per (function, space).
    Norm {
        #[command(flatten)]
        input: InputArgs,
        /// Space tag; repeatable.
        #[arg(long = "space")]
        spaces: Vec<String>,
    },
    /// Samples of a potential-type operator applied to each function.
    Potential {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        op: commands::Operator,
        /// Real order `s`.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        order: f64,
        /// Imaginary order `t` (Bessel potential only).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        imag: f64,
    },
    /// K-functional curve of one function for a named couple.
    Kcurve {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        couple: commands::CoupleName,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long = "t-min", default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long = "t-max", default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Relative gap for the numerical solver.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Force the convex solver on the (L1, Linf) couple.
        #[arg(long)]
        numeric: bool,
    },
    /// Decreasing rearrangement of each function.
    Rearrange {
        #[command(flatten)]
        input: InputArgs,
    },
    /// One seeded experiment, report-v1 output.
    Experiment(ExperimentArgs),
    /// Every standard experiment, one report file per run.
    SuiteAll {
        /// Random members per inequality ensemble.
        #[arg(long, default_value_t = 50)]
        seeds: usize,
    },
}

#[derive(Debug, Args, Default, Clone)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub tag: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "N")]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub s1: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Random ensemble members.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Skip the 2N refinement pass.
    #[arg(long)]
    pub no_refine: bool,
}

/// Parses `args`, runs the command and returns its outcome. Messages go to
/// standard error.
pub fn run<I, T>(args: I) -> Result<Outcome, Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(Outcome::Pass);
            }
            return Err(Error::Parse(e.to_string()));
        }
    };
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(t) = cli.global.threads {
        cfg.threads = Some(t);
    }
    if let Some(s) = cli.global.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &cli.global.out {
        cfg.output.path = Some(o.clone());
    }
    if let Some(f) = cli.global.format {
        cfg.output.format = Some(f);
    }
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    commands::dispatch(cli.command, cfg)
}
