//! Run configuration: JSON file schema, command-line overrides and
//! validation into solver inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use radaim_core::{AimOptions, OracleOptions, Potential, PotentialModel, UnitSystem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Verify {
    #[default]
    None,
    Aim,
    Oracle,
    All,
}

impl Verify {
    pub fn aim(self) -> bool {
        matches!(self, Verify::Aim | Verify::All)
    }

    pub fn oracle(self) -> bool {
        matches!(self, Verify::Oracle | Verify::All)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Units {
    pub hbar: f64,
    pub mu: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, mu: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AimConfig {
    pub k_min: usize,
    pub k_step: usize,
    pub k_max: usize,
    pub grid_points: usize,
    pub energy_tol: f64,
    pub stability_tol: f64,
    pub rho0: Option<f64>,
    /// Energy bracket override, applied to every ℓ.
    pub bracket: Option<(f64, f64)>,
    /// Angular momentum of the `aim-table` diagnostic.
    pub l: usize,
    /// Trial energy of the `aim-table` diagnostic.
    pub energy: Option<f64>,
}

impl Default for AimConfig {
    fn default() -> Self {
        let d = AimOptions::default();
        Self {
            k_min: d.k_min,
            k_step: d.k_step,
            k_max: d.k_max,
            grid_points: d.grid_points,
            energy_tol: d.energy_tol,
            stability_tol: d.stability_tol,
            rho0: None,
            bracket: None,
            l: 0,
            energy: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    /// Explicit outer radius; disables automatic extension.
    pub r_max: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points: radaim_core::GridSpec::DEFAULT_POINTS, r_max: None }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub verify: Verify,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub units: Units,
    /// `(n, ℓ)` pairs.
    pub levels: Vec<(usize, usize)>,
    pub aim: AimConfig,
    pub grid: GridConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: path.into(), source })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn model(&self) -> Result<PotentialModel, ConfigError> {
        let Some(name) = self.potential.as_deref() else {
            return invalid("no potential given (use --potential)");
        };
        let keys: &[&str] = match name {
            "mie" => &["V0", "a"],
            "kratzer" => &["De", "re"],
            "coulomb" => &["coupling"],
            "pseudoharmonic" => &["V0", "r0"],
            other => return invalid(format!("unknown potential '{other}' (mie, kratzer, coulomb, pseudoharmonic)")),
        };
        if let Some(k) = self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            return invalid(format!("unknown parameter '{k}' for {name}; expected {}", keys.join(", ")));
        }
        let get = |k: &str| {
            self.params
                .get(k)
                .copied()
                .ok_or_else(|| ConfigError::Invalid(format!("missing parameter {k} for {name} (use --param {k}=VALUE)")))
        };
        let potential = match name {
            "mie" => Potential::Mie { v0: get("V0")?, a: get("a")? },
            "kratzer" => Potential::Kratzer { de: get("De")?, re: get("re")? },
            "coulomb" => Potential::Coulomb { coupling: get("coupling")? },
            _ => Potential::Pseudoharmonic { v0: get("V0")?, r0: get("r0")? },
        };
        let units = UnitSystem::new(self.units.hbar, self.units.mu).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        PotentialModel::new(potential, units).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn aim_options(&self) -> Result<AimOptions, ConfigError> {
        let a = &self.aim;
        let opts = AimOptions {
            k_min: a.k_min,
            k_step: a.k_step,
            k_max: a.k_max,
            grid_points: a.grid_points,
            energy_tol: a.energy_tol,
            stability_tol: a.stability_tol,
            rho0: a.rho0,
            ..AimOptions::default()
        };
        opts.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some((lo, hi)) = a.bracket {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return invalid(format!("invalid aim bracket [{lo}, {hi}]"));
            }
        }
        Ok(opts)
    }

    pub fn oracle_options(&self) -> Result<OracleOptions, ConfigError> {
        self.check_grid()?;
        Ok(OracleOptions { points: self.grid.points, r_max: self.grid.r_max, ..OracleOptions::default() })
    }

    pub fn check_grid(&self) -> Result<(), ConfigError> {
        if self.grid.points < radaim_core::RadialGrid::MIN_POINTS {
            return invalid(format!(
                "grid points must be at least {}, got {}",
                radaim_core::RadialGrid::MIN_POINTS,
                self.grid.points
            ));
        }
        if let Some(r) = self.grid.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return invalid(format!("r_max must be positive, got {r}"));
            }
        }
        Ok(())
    }

    pub fn check_levels(&self) -> Result<(), ConfigError> {
        if self.levels.is_empty() {
            return invalid("no levels requested (use --levels n:l[,n:l...])");
        }
        Ok(())
    }
}

/// Parses `n:l[,n:l...]`.
pub fn parse_levels(s: &str) -> Result<Vec<(usize, usize)>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (n, l) = t.split_once(':').ok_or_else(|| ConfigError::Invalid(format!("level '{t}' is not n:l")))?;
            let num = |x: &str| {
                x.trim().parse::<usize>().map_err(|_| ConfigError::Invalid(format!("level '{t}': '{x}' is not a nonnegative integer")))
            };
            Ok((num(n)?, num(l)?))
        })
        .collect()
}

/// Parses `key=value`.
pub fn parse_param(s: &str) -> Result<(String, f64), ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::Invalid(format!("parameter '{s}' is not key=value")))?;
    let v: f64 = v.trim().parse().map_err(|_| ConfigError::Invalid(format!("parameter '{s}': value is not a number")))?;
    Ok((k.trim().to_string(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_syntax() {
        assert_eq!(parse_levels("0:0, 1:0,2:1").unwrap(), vec![(0, 0), (1, 0), (2, 1)]);
        assert!(parse_levels("").unwrap().is_empty());
        assert!(parse_levels("1").is_err());
        assert!(parse_levels("1:-1").is_err());
    }

    #[test]
    fn param_syntax() {
        assert_eq!(parse_param("V0=1.5").unwrap(), ("V0".into(), 1.5));
        assert!(parse_param("V0").is_err());
        assert!(parse_param("V0=x").is_err());
    }

    #[test]
    fn schema_round_trip() {
        let mut c = RunConfig { potential: Some("mie".into()), levels: vec![(0, 1)], ..Default::default() };
        c.params.insert("V0".into(), 1.0);
        c.aim.bracket = Some((-1.0, -0.1));
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn model_validation() {
        let mut c = RunConfig { potential: Some("coulomb".into()), ..Default::default() };
        assert!(c.model().is_err());
        c.params.insert("coupling".into(), 1.0);
        assert!(c.model().is_ok());
        c.params.insert("a".into(), 1.0);
        assert!(c.model().is_err());
        c.potential = Some("morse".into());
        assert!(c.model().is_err());
    }
}
