use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use ahgeo::catalog::{catalog_get, catalog_list, catalog_names};
use ahgeo::config::{Config, Format, Overrides, TOL_ENV};
use ahgeo::report::{emit, Check, Report};
use ahgeo::runners::*;
use ahgeo::CliError;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ahgeo", version, about = "Numerical checks on asymptotically hyperbolic geometries")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Flat TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Numerical tolerance for classification flags (also AHGEO_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for sample points and random embeddings.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Arclength at which catenoid profiles stop.
    #[arg(long, global = true)]
    smax: Option<f64>,
    /// Smallest radius of the extrapolation ladder.
    #[arg(long = "ladder-rmin", global = true)]
    ladder_rmin: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the normal-form expansion and compare it with its curvature prediction.
    Expand { entry: String },
    /// Classify a normal-form family.
    Classify { entry: String },
    /// Integrate a catenoid profile and run the end-to-end checks.
    Catenoid { entry: String },
    /// Cheeger bounds for an entry, or for asymptotically CMC data given by `--k` and `--c`.
    Cheeger {
        entry: Option<String>,
        /// Hypersurface dimension.
        #[arg(long, requires = "c", conflicts_with = "entry")]
        k: Option<usize>,
        /// Mean curvature constant, `|c| < k + 1`.
        #[arg(long, requires = "k")]
        c: Option<f64>,
    },
    /// Run every identity suite that applies to an entry.
    Verify { entry: String },
    /// List the catalog, or describe one entry.
    Catalog { entry: Option<String> },
}

fn run(cli: &Cli) -> Result<(Report, Format), CliError> {
    let g = &cli.global;
    let flags = Overrides { tol: g.tol, seed: g.seed, smax: g.smax, ladder_rmin: g.ladder_rmin, format: g.format };
    let env_tol = std::env::var(TOL_ENV).ok();
    let cfg = Config::resolve(g.config.as_deref(), env_tol.as_deref(), &flags)?;
    let entries = catalog_list()?;
    let report = match &cli.command {
        Command::Expand { entry } => run_expand(&catalog_get(entry)?, &cfg)?,
        Command::Classify { entry } => run_classify(&catalog_get(entry)?, &cfg)?,
        Command::Catenoid { entry } => run_catenoid(&catalog_get(entry)?, &cfg)?,
        Command::Cheeger { entry: Some(entry), .. } => run_cheeger(&catalog_get(entry)?, &cfg)?,
        Command::Cheeger { entry: None, k: Some(k), c: Some(c) } => run_cheeger_cmc(*k, *c, &cfg).map_err(|e| match e {
            CliError::Geometry(g) => CliError::Usage(g.to_string()),
            other => other,
        })?,
        Command::Cheeger { .. } => return Err(CliError::Usage("cheeger needs an entry or both --k and --c".into())),
        Command::Verify { entry } => run_verify(&catalog_get(entry)?, &cfg)?,
        Command::Catalog { entry } => {
            let mut r = Report::new("catalog", &cfg);
            let list: Vec<_> = match entry {
                Some(name) => vec![catalog_get(name)?],
                None => entries,
            };
            for e in &list {
                r.check(Check::flag(format!("{} constructs", e.name), true, true, ahgeo::report::Basis::Convention));
            }
            r.datum(
                "entries",
                list.iter()
                    .map(|e| json!({ "name": e.name, "kind": e.kind, "parameters": e.parameters, "note": e.note }))
                    .collect::<Vec<_>>(),
            );
            r.datum("patterns", catalog_names());
            r
        }
    };
    Ok((report, cfg.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, format) = match run(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("ahgeo: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let bytes = emit(&report, format);
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("ahgeo: {e}");
        return ExitCode::from(2);
    }
    for c in report.failures() {
        eprintln!("ahgeo: check failed: {}", c.name);
    }
    ExitCode::from(report.exit_code() as u8)
}
