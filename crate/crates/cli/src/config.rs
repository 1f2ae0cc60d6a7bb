//! Run configuration: a TOML file whose keys mirror [`RunConfig`]. Every key
//! is optional.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::ValueEnum;
use limitcycle::curve::linear_grid;
use limitcycle::ham::HamControl;
use limitcycle::integrator::{validate_grid, IntegratorConfig};
use limitcycle::irgm::IrgmPreset;
use limitcycle::oscillators::SystemKind;
use serde::{Deserialize, Serialize};

/// Overrides `output_dir` from the config file.
pub const OUTPUT_DIR_ENV: &str = "LIMITCYCLE_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Rayleigh,
    Vdp,
}

impl System {
    pub fn kind(self) -> SystemKind {
        match self {
            System::Rayleigh => SystemKind::Rayleigh,
            System::Vdp => SystemKind::VanDerPol,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            System::Rayleigh => "rayleigh",
            System::Vdp => "vdp",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Ham,
    Rg,
    Irgm,
    Fit,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Ham => "ham",
            Method::Rg => "rg",
            Method::Irgm => "irgm",
            Method::Fit => "fit",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: System,
    pub eps_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub integrator: IntegratorConfig,
    pub ham_control: HamControl,
    /// Integration constant preset; defaults per system.
    pub irgm_preset: Option<IrgmPreset>,
    /// Nonlinear-time exponent for the Rayleigh `irgm` method away from ε = 1.
    pub irgm_h: Option<f64>,
    pub output_dir: PathBuf,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut grid = vec![0.5];
        grid.extend((1..=50).map(f64::from));
        Self {
            system: System::Rayleigh,
            eps_grid: grid,
            methods: vec![Method::Exact, Method::Ham, Method::Rg],
            integrator: IntegratorConfig::default(),
            ham_control: HamControl::default(),
            irgm_preset: None,
            irgm_h: None,
            output_dir: PathBuf::from("out"),
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.eps_grid)?;
        self.integrator.validate()?;
        self.ham_control.validate()?;
        ensure!(!self.methods.is_empty(), "at least one method is required");
        if let Some(h) = self.irgm_h {
            ensure!(h.is_finite(), "irgm_h must be finite");
        }
        if let Some(j) = self.jobs {
            ensure!(j > 0, "jobs must be positive");
        }
        Ok(())
    }

    pub fn preset(&self) -> IrgmPreset {
        self.irgm_preset
            .unwrap_or_else(|| IrgmPreset::for_system(&self.system.kind()))
    }

    /// `flag`, else the environment override, else the configured directory.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output_dir.clone(),
        }
    }
}

/// Comma-separated items, each a number or a `start:end:step` range.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number `{s}` in grid"))
    };
    let mut grid = Vec::new();
    for item in spec.split(',') {
        if !item.contains(':') {
            grid.push(num(item)?);
            continue;
        }
        let parts: Vec<&str> = item.split(':').collect();
        if parts.len() != 3 {
            bail!("range must be start:end:step, got `{item}`");
        }
        let (a, b, st) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        ensure!(st > 0.0 && b >= a, "range `{item}` needs step > 0 and end >= start");
        ensure!((b - a) / st <= 1e6, "range `{item}` has too many points");
        grid.extend(linear_grid(a, b, st));
    }
    validate_grid(&grid)?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
        assert_eq!(RunConfig::from_toml_str("").unwrap(), cfg);
    }

    #[test]
    fn partial_file() {
        let cfg = RunConfig::from_toml_str(
            "system = \"vdp\"\neps_grid = [0.1, 0.5]\nmethods = [\"exact\", \"fit\"]\n[integrator]\nrel_tol = 1e-8\n",
        )
        .unwrap();
        assert_eq!(cfg.system, System::Vdp);
        assert_eq!(cfg.integrator.rel_tol, 1e-8);
        assert_eq!(cfg.integrator.abs_tol, IntegratorConfig::default().abs_tol);
        assert_eq!(cfg.preset(), IrgmPreset::VdpConsistent);
        assert!(RunConfig::from_toml_str("eps_grid = [2.0, 1.0]").is_err());
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5:2:0.5").unwrap(), vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("5").unwrap(), vec![5.0]);
        assert_eq!(parse_grid("0.1, 1,2").unwrap(), vec![0.1, 1.0, 2.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("2,1").is_err());
        assert!(parse_grid("a").is_err());
        assert_eq!(parse_grid("0.1,0.5,1:3:1").unwrap(), vec![0.1, 0.5, 1.0, 2.0, 3.0]);
        assert!(parse_grid("1:3:1,2").is_err());
        assert!(parse_grid("1:2").is_err());
    }
}
