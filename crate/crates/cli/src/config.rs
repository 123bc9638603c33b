//! Run configuration: TOML file, then command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use twoproduct_core::phasepoly::HBar;

use crate::suites;

/// Only this variable is read from the environment.
pub const REPORT_DIR_ENV: &str = "TWOPRODUCT_REPORT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown suite `{0}` (see `twoproduct suites`)")]
    UnknownSuite(String),
    #[error("`{0}` must be positive")]
    NonPositive(&'static str),
    #[error("unknown report format `{0}` (expected json or md)")]
    UnknownFormat(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Md,
}

impl std::str::FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(ConfigError::UnknownFormat(other.to_string())),
        }
    }
}

/// Numerical tolerances of the floating-point suites. Exact suites have none.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub matrix_identities: f64,
    pub matrix_product: f64,
    pub cstar: f64,
    pub normalization: f64,
    pub berezin: f64,
    pub correspondence: f64,
    pub quantion: f64,
    pub envariance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            matrix_identities: 1e-12,
            matrix_product: 1e-14,
            cstar: 1e-10,
            normalization: 1e-10,
            berezin: 1e-6,
            correspondence: 1e-5,
            quantion: 1e-12,
            envariance: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BerezinConfig {
    pub levels: usize,
    pub hbar: f64,
    /// Radial cutoff of the quadrature grid; derived from `levels` when unset.
    pub cutoff: Option<f64>,
}

impl Default for BerezinConfig {
    fn default() -> Self {
        BerezinConfig {
            levels: 16,
            hbar: 1.0,
            cutoff: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    /// Suites to run; empty means the whole catalog.
    pub suites: Vec<String>,
    pub seed: u64,
    pub hbar: Vec<HBar>,
    pub max_degree: u32,
    pub max_dim: usize,
    /// Random tuples per identity sweep.
    pub samples: usize,
    pub ghost_bound: i64,
    pub berezin: BerezinConfig,
    pub tolerances: Tolerances,
    /// Output settings stay out of the echoed config so that the report
    /// location never changes the report bytes.
    #[serde(skip_serializing)]
    pub report: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub format: Format,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Vec::new(),
            seed: 0x7770_5072,
            hbar: vec![
                HBar::from_ratio(1, 2).expect("positive"),
                HBar::from_ratio(2, 1).expect("positive"),
                HBar::from_ratio(3, 1).expect("positive"),
            ],
            max_degree: 4,
            max_dim: 8,
            samples: 200,
            ghost_bound: 2,
            berezin: BerezinConfig::default(),
            tolerances: Tolerances::default(),
            report: None,
            format: Format::Json,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: SuiteConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for name in &self.suites {
            if suites::find(name).is_none() {
                return Err(ConfigError::UnknownSuite(name.clone()));
            }
        }
        let positive = [
            ("hbar", !self.hbar.is_empty()),
            ("max_degree", self.max_degree > 0),
            ("max_dim", self.max_dim >= 2),
            ("samples", self.samples > 0),
            ("ghost_bound", self.ghost_bound > 0),
            ("berezin.levels", self.berezin.levels >= 4),
            ("berezin.hbar", self.berezin.hbar > 0.0),
            ("berezin.cutoff", self.berezin.cutoff.is_none_or(|r| r > 0.0)),
        ];
        if let Some((field, _)) = positive.iter().find(|(_, ok)| !ok) {
            return Err(ConfigError::NonPositive(field));
        }
        let t = &self.tolerances;
        let tols = [
            t.matrix_identities,
            t.matrix_product,
            t.cstar,
            t.normalization,
            t.berezin,
            t.correspondence,
            t.quantion,
            t.envariance,
        ];
        if tols.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(ConfigError::NonPositive("tolerances"));
        }
        Ok(())
    }

    /// Suite names in catalog order.
    pub fn selected(&self) -> Vec<&'static str> {
        suites::CATALOG
            .iter()
            .map(|s| s.name)
            .filter(|n| self.suites.is_empty() || self.suites.iter().any(|s| s == n))
            .collect()
    }

    /// Where to write the report: explicit path, else the report directory
    /// from the environment, else stdout.
    pub fn report_path(&self) -> Option<PathBuf> {
        if let Some(p) = &self.report {
            return Some(p.clone());
        }
        let ext = match self.format {
            Format::Json => "json",
            Format::Md => "md",
        };
        std::env::var_os(REPORT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("report.{ext}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SuiteConfig::default().validate().unwrap();
        assert_eq!(SuiteConfig::from_toml("").unwrap(), SuiteConfig::default());
    }

    #[test]
    fn file_values_parse() {
        let c = SuiteConfig::from_toml(
            "suites = [\"ghost-hyperbolic\"]\nseed = 9\nhbar = [\"1/3\"]\n[tolerances]\ncstar = 1e-9\n",
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.hbar, vec![HBar::from_ratio(1, 3).unwrap()]);
        assert_eq!(c.tolerances.cstar, 1e-9);
        assert_eq!(c.selected(), vec!["ghost-hyperbolic"]);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            SuiteConfig::from_toml("suites = [\"nope\"]"),
            Err(ConfigError::UnknownSuite(_))
        ));
        assert!(matches!(
            SuiteConfig::from_toml("samples = 0"),
            Err(ConfigError::NonPositive("samples"))
        ));
        assert!(matches!(
            SuiteConfig::from_toml("hbar = [\"-1\"]"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            SuiteConfig::from_toml("colour = 1"),
            Err(ConfigError::Parse(_))
        ));
    }
}
