//! Run configuration: defaults, command-line flags, the worker-count
//! environment variable and an optional TOML file, applied in that order.

use std::path::{Path, PathBuf};

use pentatile_core::Tolerance;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, ExitCode};

pub const WORKERS_ENV: &str = "PENTATILE_WORKERS";

pub const MAX_ANGLE_TOL: f64 = 1e-2;
pub const MAX_LEN_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tol: Tolerance,
    /// Ring depth; each command has its own default when unset.
    pub depth: Option<u32>,
    /// Placement budget per search; each command has its own default.
    pub budget: Option<u64>,
    pub samples: usize,
    pub seed: u64,
    pub reflections: bool,
    pub corollary1_prune: bool,
    pub dedup: bool,
    pub dihedral: bool,
    pub workers: Option<usize>,
    pub table: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub markers: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: Tolerance::default(),
            depth: None,
            budget: None,
            samples: 5,
            seed: 0,
            reflections: true,
            corollary1_prune: false,
            dedup: true,
            dihedral: false,
            workers: None,
            table: None,
            output: None,
            svg: None,
            markers: true,
        }
    }
}

/// File form of [`RunConfig`]: every key optional, unknown keys rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub tol_angle: Option<f64>,
    pub tol_len: Option<f64>,
    pub depth: Option<u32>,
    pub budget: Option<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub reflections: Option<bool>,
    pub corollary1_prune: Option<bool>,
    pub dedup: Option<bool>,
    pub dihedral: Option<bool>,
    pub workers: Option<usize>,
    pub table: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub markers: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(ExitCode::Io, format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::new(ExitCode::Parse, format!("{}: {e}", path.display())))
    }

    pub fn apply(self, c: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f; } )* };
        }
        set!(samples, seed, reflections, corollary1_prune, dedup, dihedral, markers);
        set_opt!(depth, budget, workers, table, output, svg);
        if let Some(a) = self.tol_angle {
            c.tol.angle = a;
        }
        if let Some(l) = self.tol_len {
            c.tol.len = l;
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::new(ExitCode::Config, m));
        if !(self.tol.angle > 0.0 && self.tol.angle <= MAX_ANGLE_TOL) {
            return bad(format!("angle tolerance {} outside (0, {MAX_ANGLE_TOL}]", self.tol.angle));
        }
        if !(self.tol.len > 0.0 && self.tol.len <= MAX_LEN_TOL) {
            return bad(format!("length tolerance {} outside (0, {MAX_LEN_TOL}]", self.tol.len));
        }
        if self.depth == Some(0) {
            return bad("depth must be at least 1".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("worker count must be at least 1".into());
        }
        Ok(())
    }

    pub fn workers_from_env(&mut self) -> Result<(), CliError> {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            let n = v
                .trim()
                .parse()
                .map_err(|_| CliError::new(ExitCode::Config, format!("{WORKERS_ENV}=`{v}` is not a count")))?;
            self.workers = Some(n);
        }
        Ok(())
    }
}
