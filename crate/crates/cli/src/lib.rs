//! Command-line front end for the `limitcycle` library.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;
pub mod report;
pub mod svg;

use commands::CycleOptions;
use config::{parse_grid, Method, RunConfig, System};
use limitcycle::irgm::IrgmPreset;

pub use commands::exit_code;

#[derive(Debug, Parser)]
#[command(name = "limitcycle", version, about = "Limit-cycle amplitudes of the Rayleigh and Van der Pol oscillators")]
pub struct Cli {
    /// Output directory (overrides the config file and LIMITCYCLE_OUTPUT_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplitude at one epsilon by one method.
    Amplitude {
        #[arg(long, value_enum)]
        system: System,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        #[arg(long, value_enum)]
        method: Method,
        /// Integration constant for `irgm`.
        #[arg(long, value_parser = parse_preset)]
        preset: Option<IrgmPreset>,
        /// Nonlinear-time exponent for `irgm` away from eps = 1.
        #[arg(long, allow_hyphen_values = true)]
        h_rg: Option<f64>,
    },
    /// Compare methods over an epsilon grid.
    Sweep {
        #[arg(long, value_enum)]
        system: Option<System>,
        /// Comma list of numbers and `start:end:step` ranges.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_parser = parse_preset)]
        preset: Option<IrgmPreset>,
    },
    /// Exact limit cycle, optionally with a piecewise fit or the bundled curves.
    Cycle(CycleArgs),
    /// Piecewise arc/segment fit of the exact cycle.
    Fit {
        #[arg(long, value_enum)]
        system: System,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        #[arg(long, default_value_t = 40)]
        max_pieces: usize,
    },
    /// Full reproduction bundle: figures, tables and discrepancy notes.
    Report {
        /// Rayleigh grid (default: the configured grid).
        #[arg(long)]
        grid: Option<String>,
        /// VdP grid (default: 0.1 then the configured grid).
        #[arg(long)]
        vdp_grid: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct CycleArgs {
    #[arg(long, value_enum)]
    pub system: System,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    /// Fit tolerance.
    #[arg(long, value_name = "TOL")]
    pub fit: Option<f64>,
    /// Overlay and score the bundled eps = 5 curves.
    #[arg(long)]
    pub appendix_c: bool,
    #[arg(long, default_value_t = 40)]
    pub max_pieces: usize,
}

fn parse_preset(s: &str) -> Result<IrgmPreset, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = IrgmPreset::ALL.iter().map(|p| p.as_str()).collect();
        format!("unknown preset `{s}` (expected one of {})", names.join(", "))
    })
}

/// Runs a parsed command and returns what it prints on stdout.
pub fn run(cli: Cli) -> Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = cfg.resolve_output_dir(cli.out.as_deref());
    let json = match cli.command {
        Command::Amplitude {
            system,
            eps,
            method,
            preset,
            h_rg,
        } => {
            cfg.system = system;
            cfg.irgm_preset = preset.or(cfg.irgm_preset);
            cfg.irgm_h = h_rg.or(cfg.irgm_h);
            cfg.validate()?;
            let rec = commands::cmd_amplitude(system, eps, method, &cfg)?;
            serde_json::to_string(&rec)?
        }
        Command::Sweep {
            system,
            grid,
            methods,
            jobs,
            preset,
        } => {
            if let Some(s) = system {
                if s != cfg.system && preset.is_none() && cfg.irgm_preset.is_some() {
                    cfg.irgm_preset = None;
                }
                cfg.system = s;
            }
            if let Some(g) = grid {
                cfg.eps_grid = parse_grid(&g)?;
            }
            if let Some(m) = methods {
                cfg.methods = m;
            }
            cfg.irgm_preset = preset.or(cfg.irgm_preset);
            let summary = commands::cmd_sweep(&cfg, &out, jobs)?;
            serde_json::to_string_pretty(&summary)?
        }
        Command::Cycle(a) => {
            let opts = CycleOptions {
                fit_tol: a.fit,
                max_pieces: a.max_pieces,
                appendix_c: a.appendix_c,
            };
            let summary = commands::cmd_cycle(a.system, a.eps, opts, &cfg, &out)?;
            serde_json::to_string_pretty(&summary)?
        }
        Command::Fit {
            system,
            eps,
            tol,
            max_pieces,
        } => {
            let opts = CycleOptions {
                fit_tol: Some(tol),
                max_pieces,
                appendix_c: false,
            };
            let summary = commands::cmd_cycle(system, eps, opts, &cfg, &out)?;
            serde_json::to_string_pretty(&summary)?
        }
        Command::Report {
            grid,
            vdp_grid,
            jobs,
        } => {
            let ray = grid.as_deref().map(parse_grid).transpose()?;
            let vdp = vdp_grid.as_deref().map(parse_grid).transpose()?;
            let summary = report::cmd_report(&cfg, &out, ray, vdp, jobs)?;
            serde_json::to_string_pretty(&summary)?
        }
    };
    Ok(json)
}
