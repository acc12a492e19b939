//! Experiment configuration: one JSON document, overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bandcorr::ensemble::BandProfile;
use bandcorr::limits::{A0Mode, DEFAULT_TRUNCATION};
use bandcorr::transferop::{KernelNormalization, MIN_SU2_ORDER};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError};

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNum {
    Real(f64),
    Pair([f64; 2]),
}

impl CNum {
    pub fn value(self) -> Complex64 {
        match self {
            CNum::Real(x) => Complex64::new(x, 0.0),
            CNum::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl Default for CNum {
    fn default() -> Self {
        CNum::Real(0.0)
    }
}

impl FromStr for CNum {
    type Err = String;

    /// `re` or `re,im`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        match s.split_once(',') {
            None => Ok(CNum::Real(parse(s)?)),
            Some((re, im)) => Ok(CNum::Pair([parse(re)?, parse(im)?])),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Covariance,
    Simulate,
    Limits,
    Spectrum,
    Su2,
    Blockgate,
    Verify,
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().expect("string variant"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<CommandKind>,
    pub seed: u64,
    /// worker threads; speed only
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub covariance: CovarianceConfig,
    pub simulate: SimulateConfig,
    pub limits: LimitsConfig,
    pub spectrum: SpectrumConfig,
    pub su2: Su2Config,
    pub blockgate: BlockgateConfig,
    pub verify: VerifyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            seed: 1,
            threads: None,
            out: PathBuf::from("out"),
            covariance: CovarianceConfig::default(),
            simulate: SimulateConfig::default(),
            limits: LimitsConfig::default(),
            spectrum: SpectrumConfig::default(),
            su2: Su2Config::default(),
            blockgate: BlockgateConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        serde_json::from_str(&text).map_err(|e| usage("config", format!("{}: {e}", path.display())))
    }

    /// Checks the section belonging to `command`.
    pub fn validate(&self, command: CommandKind) -> Result<(), CliError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(usage("command", format!("config is for '{c}' but '{command}' was requested")));
            }
        }
        if self.threads == Some(0) {
            return Err(usage("threads", "must be at least 1"));
        }
        match command {
            CommandKind::Covariance => {
                bandwidth(self.covariance.w, self.covariance.kappa, "covariance")?;
                if self.covariance.n == 0 {
                    return Err(usage("covariance.n", "must be at least 1"));
                }
            }
            CommandKind::Simulate => self.simulate.validate()?,
            CommandKind::Limits => self.limits.validate()?,
            CommandKind::Spectrum => {}
            CommandKind::Su2 => self.su2.validate()?,
            CommandKind::Blockgate => {
                if let Some(v) = self.blockgate.violate {
                    if !(1..=4).contains(&v) {
                        return Err(usage("blockgate.violate", format!("hypothesis {v} does not exist (1-4)")));
                    }
                }
            }
            CommandKind::Verify => self.verify.validate()?,
        }
        Ok(())
    }
}

/// How the bandwidth was requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    W(f64),
    Kappa(f64),
}

impl Bandwidth {
    pub fn profile(self, n: usize) -> bandcorr::Result<BandProfile> {
        match self {
            Bandwidth::W(w) => BandProfile::new(n, w),
            Bandwidth::Kappa(k) => BandProfile::from_kappa(n, k),
        }
    }
}

/// Exactly one of `w`, `kappa`; `κ = 1` when neither is given.
pub fn bandwidth(w: Option<f64>, kappa: Option<f64>, section: &str) -> Result<Bandwidth, CliError> {
    match (w, kappa) {
        (Some(_), Some(_)) => Err(usage(&format!("{section}.w"), "give either w or kappa, not both")),
        (Some(w), None) if w > 0.0 && w.is_finite() => Ok(Bandwidth::W(w)),
        (Some(w), None) => Err(usage(&format!("{section}.w"), format!("W = {w} must be positive"))),
        (None, Some(k)) if k > 0.0 && k.is_finite() => Ok(Bandwidth::Kappa(k)),
        (None, Some(k)) => Err(usage(&format!("{section}.kappa"), format!("κ = {k} must be positive"))),
        (None, None) => Ok(Bandwidth::Kappa(1.0)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceConfig {
    pub n: usize,
    pub w: Option<f64>,
    pub kappa: Option<f64>,
}

impl Default for CovarianceConfig {
    fn default() -> Self {
        Self { n: 16, w: Some(2.0), kappa: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// one run per size
    pub n: Vec<usize>,
    pub w: Option<f64>,
    pub kappa: Option<f64>,
    pub z: CNum,
    pub zeta: Vec<CNum>,
    pub n_samples: usize,
    pub truncation: usize,
    pub mode: A0Mode,
    pub plot: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n: vec![128],
            w: None,
            kappa: Some(1.0),
            z: CNum::Real(0.0),
            zeta: [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().map(CNum::Real).collect(),
            n_samples: 2000,
            truncation: DEFAULT_TRUNCATION,
            mode: A0Mode::default(),
            plot: false,
        }
    }
}

impl SimulateConfig {
    fn validate(&self) -> Result<(), CliError> {
        bandwidth(self.w, self.kappa, "simulate")?;
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(usage("simulate.n", "need at least one size, all positive"));
        }
        if self.zeta.is_empty() {
            return Err(usage("simulate.zeta", "grid is empty"));
        }
        if !(self.z.value().norm() < 1.0) {
            return Err(usage("simulate.z", "|z| must be below 1"));
        }
        if self.n_samples < 2 {
            return Err(usage("simulate.n_samples", "at least 2 samples are required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsConfig {
    pub kappa_u: Vec<f64>,
    pub zeta: Vec<CNum>,
    pub truncation: usize,
    pub modes: Vec<A0Mode>,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        Self {
            kappa_u: vec![0.1, 0.3, 1.0, 3.0, 10.0],
            zeta: [0.0, 0.25, 0.5, 1.0, 2.0].into_iter().map(CNum::Real).collect(),
            truncation: DEFAULT_TRUNCATION,
            modes: A0Mode::ALL.to_vec(),
        }
    }
}

impl LimitsConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.zeta.is_empty() {
            return Err(usage("limits.zeta", "grid is empty"));
        }
        if self.kappa_u.is_empty() || self.kappa_u.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(usage("limits.kappa_u", "need at least one value, all positive"));
        }
        if self.modes.is_empty() {
            return Err(usage("limits.modes", "need at least one mode"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub u_star: f64,
    pub w: f64,
    pub quad_order: usize,
    pub k_max: usize,
    pub normalization: KernelNormalization,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { u_star: 1.0, w: 50.0, quad_order: 200, k_max: 7, normalization: KernelNormalization::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Su2Config {
    pub w: Vec<f64>,
    pub ells: Vec<usize>,
    pub u_star: f64,
    pub tr_s: f64,
    pub orders: [usize; 3],
}

impl Default for Su2Config {
    fn default() -> Self {
        Self { w: vec![20.0, 40.0, 80.0], ells: vec![1, 2, 3], u_star: 1.0, tr_s: 2.0, orders: [MIN_SU2_ORDER; 3] }
    }
}

impl Su2Config {
    fn validate(&self) -> Result<(), CliError> {
        if self.w.is_empty() {
            return Err(usage("su2.w", "need at least one bandwidth"));
        }
        if self.ells.is_empty() {
            return Err(usage("su2.ells", "need at least one ℓ"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockgateConfig {
    pub scenarios: usize,
    pub norm_scenarios: usize,
    pub norm_max_dim: usize,
    /// generate scenarios that break this hypothesis (1-4)
    pub violate: Option<usize>,
}

impl Default for BlockgateConfig {
    fn default() -> Self {
        Self { scenarios: 200, norm_scenarios: 200, norm_max_dim: 80, violate: None }
    }
}

/// Knobs of the acceptance suite; the defaults are the pinned values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// criteria to run, by number or name; empty means all
    pub only: Vec<String>,
    /// `m` in the truncation criterion, compared against `2m`
    pub truncation: usize,
    pub cs_runs: usize,
    pub cs_samples: usize,
    pub oracle_samples: usize,
    pub gate_scenarios: usize,
    pub trend_sizes: Vec<usize>,
    pub trend_samples: usize,
    /// rerun with a second thread count and compare result files
    pub determinism: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            only: Vec::new(),
            truncation: 40,
            cs_runs: 50,
            cs_samples: 200,
            oracle_samples: 20_000,
            gate_scenarios: 1000,
            trend_sizes: vec![64, 128, 256],
            trend_samples: 4000,
            determinism: true,
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<(), CliError> {
        for name in &self.only {
            if crate::verify::Criterion::parse(name).is_none() {
                return Err(usage("verify.only", format!("unknown criterion '{name}'")));
            }
        }
        if self.truncation < bandcorr::limits::MIN_TRUNCATION {
            return Err(usage(
                "verify.truncation",
                format!("must be at least {}", bandcorr::limits::MIN_TRUNCATION),
            ));
        }
        if self.trend_sizes.is_empty() {
            return Err(usage("verify.trend_sizes", "need at least one size"));
        }
        Ok(())
    }
}
