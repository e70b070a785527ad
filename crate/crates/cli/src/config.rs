//! Run configuration: field definition, numeric knobs, output layout.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use cubic_splitting::field::{CubicField, FieldError};
use cubic_splitting::rat::parse_ratio;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("cannot parse config {0}: {1}")]
    Parse(PathBuf, String),
    #[error("invalid rational '{0}' for key {1}")]
    BadRational(String, &'static str),
    #[error("rho must be positive (got {0})")]
    BadRho(f64),
    #[error("precision_digits must be in 17..=31 (got {0}); the extended-precision backend carries ~31 digits")]
    BadPrecision(u32),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("zeta range is empty")]
    EmptyRange,
    #[error("unknown preset '{0}' (available: cubic-golden, cubic-golden-delta0)")]
    UnknownPreset(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// On-disk form: rationals as "p/q" strings, everything optional.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub field: Option<RawField>,
    pub precision_digits: Option<u32>,
    pub rho: Option<f64>,
    pub gamma_cut: Option<f64>,
    pub kmax: Option<u64>,
    pub zeta_min: Option<f64>,
    pub zeta_max: Option<f64>,
    pub zeta_step: Option<f64>,
    pub torus_resolution: Option<usize>,
    pub estimate_eps: Option<Vec<f64>>,
    pub mu_exponent: Option<f64>,
    pub out_dir: Option<String>,
    pub preset: Option<String>,
    pub delta_zero: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RawField {
    pub r0: String,
    pub r1: String,
    pub r2: String,
    pub a0: String,
    pub a1: String,
    pub a2: String,
}

/// Validated configuration used by the pipeline.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub r: [BigRational; 3],
    pub a: [BigRational; 3],
    pub precision_digits: u32,
    pub rho: f64,
    pub gamma_cut: f64,
    pub kmax: u64,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub zeta_step: f64,
    pub torus_resolution: usize,
    pub estimate_eps: Vec<f64>,
    pub mu_exponent: f64,
    pub out_dir: PathBuf,
    pub preset: Option<String>,
    /// Diagnostic mode: force δ = 0 in the envelope model.
    pub delta_zero: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let golden = preset_raw("cubic-golden").unwrap();
        AnalysisConfig::from_raw(golden).unwrap()
    }
}

pub fn preset_raw(name: &str) -> Result<RawConfig, ConfigError> {
    let field = RawField {
        r0: "1".into(),
        r1: "-1".into(),
        r2: "0".into(),
        a0: "0".into(),
        a1: "0".into(),
        a2: "1".into(),
    };
    match name {
        "cubic-golden" => Ok(RawConfig {
            field: Some(field),
            preset: Some(name.into()),
            ..RawConfig::default()
        }),
        "cubic-golden-delta0" => Ok(RawConfig {
            field: Some(field),
            preset: Some(name.into()),
            delta_zero: Some(true),
            ..RawConfig::default()
        }),
        other => Err(ConfigError::UnknownPreset(other.into())),
    }
}

impl AnalysisConfig {
    pub fn from_raw(raw: RawConfig) -> Result<AnalysisConfig, ConfigError> {
        let field = raw.field.unwrap_or(RawField {
            r0: "1".into(),
            r1: "-1".into(),
            r2: "0".into(),
            a0: "0".into(),
            a1: "0".into(),
            a2: "1".into(),
        });
        let rat = |s: &str, key: &'static str| {
            parse_ratio(s).ok_or_else(|| ConfigError::BadRational(s.into(), key))
        };
        let r = [
            rat(&field.r0, "r0")?,
            rat(&field.r1, "r1")?,
            rat(&field.r2, "r2")?,
        ];
        let a = [
            rat(&field.a0, "a0")?,
            rat(&field.a1, "a1")?,
            rat(&field.a2, "a2")?,
        ];
        let precision_digits = raw.precision_digits.unwrap_or(30);
        if !(17..=31).contains(&precision_digits) {
            return Err(ConfigError::BadPrecision(precision_digits));
        }
        let rho = raw.rho.unwrap_or(1.0);
        if rho <= 0.0 {
            return Err(ConfigError::BadRho(rho));
        }
        let gamma_cut = raw.gamma_cut.unwrap_or(6.0);
        if gamma_cut <= 0.0 {
            return Err(ConfigError::NonPositive("gamma_cut"));
        }
        let (zeta_min, zeta_max) = (raw.zeta_min.unwrap_or(0.0), raw.zeta_max.unwrap_or(24.0));
        let zeta_step = raw.zeta_step.unwrap_or(1e-3);
        if zeta_step <= 0.0 {
            return Err(ConfigError::NonPositive("zeta_step"));
        }
        if zeta_max <= zeta_min {
            return Err(ConfigError::EmptyRange);
        }
        let torus_resolution = raw.torus_resolution.unwrap_or(1024);
        if torus_resolution < 16 {
            return Err(ConfigError::NonPositive("torus_resolution"));
        }
        let estimate_eps = raw
            .estimate_eps
            .unwrap_or_else(|| vec![1e-4, 1e-6, 1e-8]);
        if estimate_eps.iter().any(|&e| e <= 0.0) {
            return Err(ConfigError::NonPositive("estimate_eps"));
        }
        Ok(AnalysisConfig {
            r,
            a,
            precision_digits,
            rho,
            gamma_cut,
            kmax: raw.kmax.unwrap_or(200),
            zeta_min,
            zeta_max,
            zeta_step,
            torus_resolution,
            estimate_eps,
            mu_exponent: raw.mu_exponent.unwrap_or(4.0),
            out_dir: PathBuf::from(raw.out_dir.unwrap_or_else(|| "out".into())),
            preset: raw.preset,
            delta_zero: raw.delta_zero.unwrap_or(false),
        })
    }

    pub fn load(path: &Path) -> Result<AnalysisConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        let raw: RawConfig = if path.extension().and_then(|e| e.to_str()) == Some("json") {
            serde_json::from_str(&text)
                .map_err(|e| ConfigError::Parse(path.to_path_buf(), e.to_string()))?
        } else {
            toml::from_str(&text)
                .map_err(|e| ConfigError::Parse(path.to_path_buf(), e.to_string()))?
        };
        AnalysisConfig::from_raw(raw)
    }

    pub fn preset(name: &str) -> Result<AnalysisConfig, ConfigError> {
        AnalysisConfig::from_raw(preset_raw(name)?)
    }

    pub fn build_field(&self) -> Result<CubicField, FieldError> {
        CubicField::new(
            self.r[0].clone(),
            self.r[1].clone(),
            self.r[2].clone(),
            self.a[0].clone(),
            self.a[1].clone(),
            self.a[2].clone(),
        )
    }

    /// Canonical one-line form; hashed into the report manifest.
    pub fn canonical_string(&self) -> String {
        use cubic_splitting::rat::ratio_to_string;
        format!(
            "r=[{},{},{}];a=[{},{},{}];prec={};rho={:e};cut={:e};kmax={};zeta=[{:e},{:e},{:e}];res={};eps={:?};mu_r={:e};delta0={}",
            ratio_to_string(&self.r[0]),
            ratio_to_string(&self.r[1]),
            ratio_to_string(&self.r[2]),
            ratio_to_string(&self.a[0]),
            ratio_to_string(&self.a[1]),
            ratio_to_string(&self.a[2]),
            self.precision_digits,
            self.rho,
            self.gamma_cut,
            self.kmax,
            self.zeta_min,
            self.zeta_max,
            self.zeta_step,
            self.torus_resolution,
            self.estimate_eps,
            self.mu_exponent,
            self.delta_zero,
        )
    }

    /// FNV-1a of the canonical string (stable across runs and platforms).
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.canonical_string().into_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}
