//! Settings shared by all subcommands, resolved from flags, `AUXETIKIT_*`
//! environment variables, `auxetikit.toml` and built-in defaults, in that
//! order.

use std::path::{Path, PathBuf};

use auxetikit::Regime;
use serde::Deserialize;

pub const DEFAULT_CONFIG_FILE: &str = "auxetikit.toml";

/// Keys accepted in the config file. All optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub regime: Option<Regime>,
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
    pub model_dir: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("{}: {e}", origin.display()))
    }

    /// Read `path`. A missing file is an error only if it was asked for
    /// explicitly.
    pub fn load(path: &Path, explicit: bool) -> Result<Self, String> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::parse(&text, path),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound && !explicit => Ok(FileConfig::default()),
            Err(e) => Err(format!("{}: {e}", path.display())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub regime: Regime,
    pub grid_n: usize,
    pub tol: f64,
    pub model_dir: PathBuf,
    pub data_dir: PathBuf,
    pub seed: u64,
    /// 0 uses every core.
    pub workers: usize,
    pub paper_scale: bool,
}

impl Config {
    pub fn defaults(paper_scale: bool) -> Self {
        Config {
            regime: Regime::PlaneStrain,
            grid_n: if paper_scale { 256 } else { 128 },
            tol: auxetikit::fft::DEFAULT_TOLERANCE,
            model_dir: PathBuf::from("models"),
            data_dir: PathBuf::from("data"),
            seed: 0,
            workers: 0,
            paper_scale,
        }
    }

    /// `flags` already hold flag-or-environment values (clap reads both).
    pub fn resolve(flags: &FileConfig, file: &FileConfig, paper_scale: bool) -> Result<Self, String> {
        let d = Self::defaults(paper_scale);
        let c = Config {
            regime: flags.regime.or(file.regime).unwrap_or(d.regime),
            grid_n: flags.grid_n.or(file.grid_n).unwrap_or(d.grid_n),
            tol: flags.tol.or(file.tol).unwrap_or(d.tol),
            model_dir: flags.model_dir.clone().or_else(|| file.model_dir.clone()).unwrap_or(d.model_dir),
            data_dir: flags.data_dir.clone().or_else(|| file.data_dir.clone()).unwrap_or(d.data_dir),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            workers: flags.workers.or(file.workers).unwrap_or(d.workers),
            paper_scale,
        };
        if c.grid_n < 4 {
            return Err(format!("grid size must be at least 4, got {}", c.grid_n));
        }
        if !(c.tol > 0.0 && c.tol.is_finite()) {
            return Err(format!("tolerance must be positive, got {}", c.tol));
        }
        Ok(c)
    }
}
