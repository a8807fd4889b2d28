//! Command-line front end: argument parsing, configuration layering and the
//! command implementations.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Ctx;
use crate::config::{ConfigFile, RunConfig};
pub use crate::error::{CliError, ExitCode};

#[derive(Debug, Parser)]
#[command(name = "pentatile", version, about = "Edge-to-edge tilings by convex pentagons")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Ring depth to complete around the seed tile.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Placement budget per search.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Samples per free dimension of a solution family.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Seed for family sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Keep ordered pattern pairs.
    #[arg(long, global = true)]
    pub no_dedup: bool,
    /// Also identify patterns under relabelings of the pentagon.
    #[arg(long, global = true)]
    pub dihedral: bool,
    /// Place only unmirrored copies.
    #[arg(long, global = true)]
    pub no_reflections: bool,
    /// Forbid nodes of valence five or more.
    #[arg(long, global = true)]
    pub corollary1_prune: bool,
    /// Also write an SVG figure here.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Leave node markers out of SVG figures.
    #[arg(long, global = true)]
    pub no_markers: bool,
    /// Type table to use instead of the shipped one.
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
    /// Angle tolerance in degrees.
    #[arg(long, global = true)]
    pub tol_angle: Option<f64>,
    /// Length tolerance.
    #[arg(long, global = true)]
    pub tol_len: Option<f64>,
    /// Report destination; standard output when absent.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file whose keys override every flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the candidate patterns.
    Enumerate,
    /// Run the first-stage sort over all patterns.
    Sort,
    /// Split one pattern by extra edge conditions and sort the pieces.
    Refine {
        id: usize,
        /// Hypotheses such as `a=c`, `b=d=e` or `A+B+D=360`, comma separated.
        #[arg(long)]
        edge_condition: Option<String>,
    },
    /// Classify every pentagon of a spec file.
    Classify { spec: PathBuf },
    /// Grow a patch around one pentagon.
    Tile {
        spec: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Produce a periodicity certificate for one pentagon.
    Certify {
        spec: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Draw a patch dump or certificate as SVG.
    Render { input: PathBuf },
    /// Recheck a certificate independently.
    VerifyCertificate { input: PathBuf },
}

impl Flags {
    pub fn apply(&self, c: &mut RunConfig) {
        if self.depth.is_some() {
            c.depth = self.depth;
        }
        if self.budget.is_some() {
            c.budget = self.budget;
        }
        if let Some(s) = self.samples {
            c.samples = s;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        c.dedup &= !self.no_dedup;
        c.dihedral |= self.dihedral;
        c.reflections &= !self.no_reflections;
        c.corollary1_prune |= self.corollary1_prune;
        c.markers &= !self.no_markers;
        for (dst, src) in [(&mut c.svg, &self.svg), (&mut c.table, &self.table), (&mut c.output, &self.output)] {
            if src.is_some() {
                *dst = src.clone();
            }
        }
        if let Some(a) = self.tol_angle {
            c.tol.angle = a;
        }
        if let Some(l) = self.tol_len {
            c.tol.len = l;
        }
    }
}

/// Layer defaults, flags, the worker variable and the config file.
pub fn resolve_config(flags: &Flags) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    flags.apply(&mut c);
    c.workers_from_env()?;
    if let Some(path) = &flags.config {
        ConfigFile::load(path)?.apply(&mut c);
    }
    c.validate()?;
    Ok(c)
}

pub fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let config = resolve_config(&cli.flags)?;
    if let Some(n) = config.workers {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Ctx::new(config);
    match &cli.command {
        Command::Enumerate => commands::enumerate(&ctx),
        Command::Sort => commands::sort(&ctx),
        Command::Refine { id, edge_condition } => commands::refine_cmd(&ctx, *id, edge_condition.as_deref()),
        Command::Classify { spec } => commands::classify_cmd(&ctx, spec),
        Command::Tile { spec, name } => commands::tile(&ctx, spec, name.as_deref()),
        Command::Certify { spec, name } => commands::certify_cmd(&ctx, spec, name.as_deref()),
        Command::Render { input } => commands::render(&ctx, input),
        Command::VerifyCertificate { input } => commands::verify_cmd(&ctx, input),
    }
}
