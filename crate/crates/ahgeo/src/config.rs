//! Run configuration: defaults, `AHGEO_TOL`, a flat TOML file, then flags.

use std::path::Path;

use ahgeo_core::fit::Ladder;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const TOL_ENV: &str = "AHGEO_TOL";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Plotdata,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    /// Classification tolerance and threshold for the generic identity checks.
    pub tol: f64,
    pub seed: u64,
    /// Arclength range of catenoid profiles.
    pub smax: f64,
    pub ladder_rmin: f64,
    pub ladder_rungs: usize,
    /// Boundary or interior sample points per check.
    pub points: usize,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config { tol: 1e-6, seed: 0, smax: 12.0, ladder_rmin: 1e-3, ladder_rungs: 6, points: 20, format: Format::Json }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    tol: Option<f64>,
    seed: Option<u64>,
    smax: Option<f64>,
    ladder_rmin: Option<f64>,
    ladder_rungs: Option<usize>,
    points: Option<usize>,
    format: Option<Format>,
}

/// Values given on the command line; `None` leaves the lower layers alone.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub smax: Option<f64>,
    pub ladder_rmin: Option<f64>,
    pub format: Option<Format>,
}

impl Config {
    pub fn ladder(&self) -> Ladder {
        Ladder { r_min: self.ladder_rmin, rungs: self.ladder_rungs }
    }

    /// Parses a TOML document laid over the given base values.
    pub fn parse_toml(text: &str, source_name: &str, base: &Config) -> CliResult<Config> {
        let f: FileConfig = toml::from_str(text).map_err(|e| parse_error(text, source_name, &e))?;
        let mut c = base.clone();
        c.tol = f.tol.unwrap_or(c.tol);
        c.seed = f.seed.unwrap_or(c.seed);
        c.smax = f.smax.unwrap_or(c.smax);
        c.ladder_rmin = f.ladder_rmin.unwrap_or(c.ladder_rmin);
        c.ladder_rungs = f.ladder_rungs.unwrap_or(c.ladder_rungs);
        c.points = f.points.unwrap_or(c.points);
        c.format = f.format.unwrap_or(c.format);
        Ok(c)
    }

    pub fn resolve(file: Option<&Path>, env_tol: Option<&str>, flags: &Overrides) -> CliResult<Config> {
        let mut cfg = Config::default();
        if let Some(v) = env_tol {
            cfg.tol = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{TOL_ENV} = `{v}` is not a number")))?;
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)?;
            cfg = Config::parse_toml(&text, &path.display().to_string(), &cfg)?;
        }
        if let Some(v) = flags.tol {
            cfg.tol = v;
        }
        if let Some(v) = flags.seed {
            cfg.seed = v;
        }
        if let Some(v) = flags.smax {
            cfg.smax = v;
        }
        if let Some(v) = flags.ladder_rmin {
            cfg.ladder_rmin = v;
        }
        if let Some(v) = flags.format {
            cfg.format = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tol", self.tol)?;
        positive("smax", self.smax)?;
        positive("ladder-rmin", self.ladder_rmin)?;
        if self.ladder_rungs < 6 {
            return Err(CliError::Config(format!("ladder-rungs must be at least 6, got {}", self.ladder_rungs)));
        }
        if self.points == 0 {
            return Err(CliError::Config("points must be at least 1".into()));
        }
        Ok(())
    }
}

fn parse_error(text: &str, source_name: &str, e: &toml::de::Error) -> CliError {
    let (line, column) = match e.span() {
        Some(span) => line_column(text, span.start),
        None => (1, 1),
    };
    CliError::ConfigParse { source_name: source_name.to_string(), line, column, message: e.message().to_string() }
}

/// One-based line and column of a byte offset.
pub fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let head = &text[..offset.min(text.len())];
    let line = head.matches('\n').count() + 1;
    let column = head.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
