//! Run configuration: strict JSON file, command-line overrides, validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stokesheat::spectral::{default_k_max, SpectralSettings};
use stokesheat::{Kernel, ObservationRegion, Rect};

/// A configuration problem, reported with the dotted key it concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub density: f64,
    pub degeneracy_rel: f64,
    pub root_tol: f64,
    pub nullspace_gate: f64,
    pub quadrature_nodes: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = SpectralSettings::default();
        Tolerances {
            density: s.density,
            degeneracy_rel: s.degeneracy_rel,
            root_tol: s.root_tol,
            nullspace_gate: s.nullspace_gate,
            quadrature_nodes: s.quadrature_nodes,
        }
    }
}

impl Tolerances {
    pub fn settings(&self) -> SpectralSettings {
        SpectralSettings {
            density: self.density,
            degeneracy_rel: self.degeneracy_rel,
            root_tol: self.root_tol,
            nullspace_gate: self.nullspace_gate,
            quadrature_nodes: self.quadrature_nodes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSection {
    #[serde(rename = "Lambda_max")]
    pub lambda_max: Option<f64>,
    /// Defaults to the smallest sector range guaranteed complete.
    pub k_max: Option<u32>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionSection {
    pub x1: [f64; 2],
    pub x2: [f64; 2],
}

impl Default for RegionSection {
    fn default() -> Self {
        RegionSection { x1: [0.0, std::f64::consts::PI], x2: [0.3, 0.7] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    #[serde(rename = "S0")]
    pub s0: f64,
    /// Defaults to `[S0/4, 3 S0/4]`.
    pub support: Option<[f64; 2]>,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { s0: 1.0, support: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub gamma: f64,
    pub epsilon: f64,
    #[serde(rename = "Lambda_cap")]
    pub lambda_cap: f64,
    pub reg_threshold: f64,
    /// Pass criterion of `control`: `‖z(T)‖ ≤ tolerance · ‖z0‖`.
    pub tolerance: f64,
    /// `z0` is a normalised random mix of this many lowest modes (0: `z0 = 0`).
    pub z0_modes: usize,
    pub z0_seed: u64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection {
            horizon: 1.0,
            gamma: 1.5,
            epsilon: 0.5,
            lambda_cap: 1024.0,
            reg_threshold: 1e-12,
            tolerance: 1e-4,
            z0_modes: 30,
            z0_seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    #[serde(rename = "Lambda_list")]
    pub lambda_list: Vec<f64>,
    #[serde(rename = "T_list")]
    pub t_list: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { lambda_list: vec![25.0, 50.0, 100.0, 200.0, 400.0], t_list: vec![0.1, 0.2, 0.4, 0.8] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoSection {
    pub cache_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Default for IoSection {
    fn default() -> Self {
        IoSection { cache_path: None, out_dir: PathBuf::from("out"), format: Format::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub basis: BasisSection,
    pub region: RegionSection,
    pub kernel: KernelSection,
    pub schedule: ScheduleSection,
    pub sweeps: SweepSection,
    pub io: IoSection,
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lambda_max: Option<f64>,
    pub k_max: Option<u32>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub horizon: Option<f64>,
    pub lambda_cap: Option<f64>,
    pub region: Option<[f64; 4]>,
    pub lambda_list: Option<Vec<f64>>,
    pub t_list: Option<Vec<f64>>,
    pub out_dir: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Reads the file (if any), applies the overrides and validates.
pub fn parse_config(path: Option<&Path>, over: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ConfigError::new("", format!("cannot read config {}: {e}", p.display())))?;
            from_json(&text)?
        }
        None => RunConfig::default(),
    };
    over.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

pub fn from_json(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { String::new() } else { path };
        ConfigError::new(key, e.into_inner().to_string())
    })
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.lambda_max {
            cfg.basis.lambda_max = Some(v);
        }
        if let Some(v) = self.k_max {
            cfg.basis.k_max = Some(v);
        }
        if let Some(v) = self.gamma {
            cfg.schedule.gamma = v;
        }
        if let Some(v) = self.epsilon {
            cfg.schedule.epsilon = v;
        }
        if let Some(v) = self.horizon {
            cfg.schedule.horizon = v;
        }
        if let Some(v) = self.lambda_cap {
            cfg.schedule.lambda_cap = v;
        }
        if let Some([a1, b1, a2, b2]) = self.region {
            cfg.region = RegionSection { x1: [a1, b1], x2: [a2, b2] };
        }
        if let Some(v) = &self.lambda_list {
            cfg.sweeps.lambda_list = v.clone();
        }
        if let Some(v) = &self.t_list {
            cfg.sweeps.t_list = v.clone();
        }
        if let Some(v) = &self.out_dir {
            cfg.io.out_dir = v.clone();
        }
        if let Some(v) = &self.cache {
            cfg.io.cache_path = Some(v.clone());
        }
        if let Some(v) = self.format {
            cfg.io.format = v;
        }
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be positive and finite, got {v}")))
    }
}

fn open_unit(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must lie in (0, 1), got {v}")))
    }
}

impl RunConfig {
    pub fn lambda_max(&self) -> f64 {
        self.basis.lambda_max.expect("validated")
    }

    pub fn k_max(&self) -> u32 {
        self.basis.k_max.unwrap_or_else(|| default_k_max(self.lambda_max()))
    }

    pub fn rect(&self) -> Rect {
        Rect { x1: (self.region.x1[0], self.region.x1[1]), x2: (self.region.x2[0], self.region.x2[1]) }
    }

    pub fn kernel(&self) -> Kernel {
        let s0 = self.kernel.s0;
        let support = self.kernel.support.map(|[a, b]| (a, b)).unwrap_or((0.25 * s0, 0.75 * s0));
        Kernel::new(s0, support).expect("validated")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let lm = self.basis.lambda_max.ok_or_else(|| ConfigError::new("basis.Lambda_max", "missing required key"))?;
        positive("basis.Lambda_max", lm)?;
        if let Some(k) = self.basis.k_max {
            if k < 1 {
                return Err(ConfigError::new("basis.k_max", "must be at least 1"));
            }
        }
        let t = &self.basis.tolerances;
        positive("basis.tolerances.density", t.density)?;
        open_unit("basis.tolerances.degeneracy_rel", t.degeneracy_rel)?;
        open_unit("basis.tolerances.root_tol", t.root_tol)?;
        open_unit("basis.tolerances.nullspace_gate", t.nullspace_gate)?;
        if !(8..=512).contains(&t.quadrature_nodes) {
            return Err(ConfigError::new(
                "basis.tolerances.quadrature_nodes",
                format!("must lie in [8, 512], got {}", t.quadrature_nodes),
            ));
        }

        let [a1, b1] = self.region.x1;
        if !(a1.is_finite() && b1.is_finite() && 0.0 <= a1 && a1 < b1 && b1 <= 2.0 * std::f64::consts::PI) {
            return Err(ConfigError::new("region.x1", format!("need 0 <= a < b <= 2π, got [{a1}, {b1}]")));
        }
        let [a2, b2] = self.region.x2;
        if !(a2.is_finite() && b2.is_finite() && 0.0 < a2 && a2 < b2 && b2 < 1.0) {
            return Err(ConfigError::new("region.x2", format!("need 0 < a < b < 1, got [{a2}, {b2}]")));
        }
        ObservationRegion::new((a1, b1), (a2, b2)).map_err(|e| ConfigError::new("region", e.to_string()))?;

        positive("kernel.S0", self.kernel.s0)?;
        if let Some([a, b]) = self.kernel.support {
            Kernel::new(self.kernel.s0, (a, b)).map_err(|e| ConfigError::new("kernel.support", e.to_string()))?;
        }

        let s = &self.schedule;
        if !(s.horizon > 0.0 && s.horizon <= 1.0) {
            return Err(ConfigError::new("schedule.T", format!("must lie in (0, 1], got {}", s.horizon)));
        }
        if !(s.gamma > 1.0 && s.gamma.is_finite()) {
            return Err(ConfigError::new("schedule.gamma", format!("must exceed 1, got {}", s.gamma)));
        }
        open_unit("schedule.epsilon", s.epsilon)?;
        positive("schedule.Lambda_cap", s.lambda_cap)?;
        if !(s.reg_threshold >= 0.0 && s.reg_threshold < 1.0) {
            return Err(ConfigError::new("schedule.reg_threshold", format!("must lie in [0, 1), got {}", s.reg_threshold)));
        }
        positive("schedule.tolerance", s.tolerance)?;

        for (i, &l) in self.sweeps.lambda_list.iter().enumerate() {
            positive(&format!("sweeps.Lambda_list[{i}]"), l)?;
        }
        for (i, &t) in self.sweeps.t_list.iter().enumerate() {
            positive(&format!("sweeps.T_list[{i}]"), t)?;
        }
        Ok(())
    }

    /// Pretty JSON of the effective configuration.
    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = from_json(r#"{"basis": {"Lambda_max": 50}}"#).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.lambda_max(), 50.0);
        assert_eq!(cfg.schedule, ScheduleSection::default());
        assert_eq!(cfg.k_max(), default_k_max(50.0));
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = from_json(r#"{"schedule": {"gama": 2}}"#).unwrap_err();
        assert_eq!(e.key, "schedule.gama");
        assert!(e.message.contains("gama"));
        let e = from_json(r#"{"basis": {"Lambda_max": "x"}}"#).unwrap_err();
        assert_eq!(e.key, "basis.Lambda_max");
    }

    #[test]
    fn gamma_one_is_rejected() {
        let mut cfg = from_json(r#"{"basis": {"Lambda_max": 50}, "schedule": {"gamma": 1.0}}"#).unwrap();
        assert_eq!(cfg.validate().unwrap_err().key, "schedule.gamma");
        cfg.schedule.gamma = 1.5;
        cfg.region.x1 = [1.0, 1.0];
        assert_eq!(cfg.validate().unwrap_err().key, "region.x1");
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("stokesheat-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.json");
        std::fs::write(&p, r#"{"basis": {"Lambda_max": 50}}"#).unwrap();
        let over = Overrides { lambda_max: Some(100.0), ..Default::default() };
        assert_eq!(parse_config(Some(&p), &over).unwrap().lambda_max(), 100.0);
        assert_eq!(parse_config(None, &Overrides::default()).unwrap_err().key, "basis.Lambda_max");
        std::fs::remove_dir_all(dir).unwrap();
    }
}
