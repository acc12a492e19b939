use std::path::PathBuf;

use bandcorr::limits::A0Mode;
use bandcorr::transferop::KernelNormalization;
use clap::{Args, Parser, Subcommand};

use crate::config::{CNum, CommandKind, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "bandcorr", version, about = "Correlator ratios, regime limits and spectral checks for random band matrices")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON experiment configuration; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// worker threads (affects speed only)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// more log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the variance profile J for one (N, W)
    Covariance(CovarianceArgs),
    /// Monte Carlo correlator ratios next to the three regime limits
    Simulate(SimulateArgs),
    /// Tabulate the Ginibre, factorized and critical limits
    Limits(LimitsArgs),
    /// Nyström spectrum of the quadratic-approximation kernel
    Spectrum(SpectrumArgs),
    /// SU(2) averages of t_00 against the eigenvalue law
    Su2(Su2Args),
    /// Randomized block-matrix proposition checks (JSON lines)
    Blockgate(BlockgateArgs),
    /// Run the acceptance suite
    Verify(VerifyArgs),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Covariance(_) => CommandKind::Covariance,
            Command::Simulate(_) => CommandKind::Simulate,
            Command::Limits(_) => CommandKind::Limits,
            Command::Spectrum(_) => CommandKind::Spectrum,
            Command::Su2(_) => CommandKind::Su2,
            Command::Blockgate(_) => CommandKind::Blockgate,
            Command::Verify(_) => CommandKind::Verify,
        }
    }

    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        match self {
            Command::Covariance(a) => a.apply(cfg),
            Command::Simulate(a) => a.apply(cfg),
            Command::Limits(a) => a.apply(cfg),
            Command::Spectrum(a) => a.apply(cfg),
            Command::Su2(a) => a.apply(cfg),
            Command::Blockgate(a) => a.apply(cfg),
            Command::Verify(a) => a.apply(cfg),
        }
    }
}

impl CommonArgs {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        set(&mut cfg.seed, self.seed);
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        set(&mut cfg.out, self.out.clone());
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_vec<T: Clone>(slot: &mut Vec<T>, v: &[T]) {
    if !v.is_empty() {
        *slot = v.to_vec();
    }
}

/// A flag for `w` replaces a configured `kappa` and vice versa.
fn set_bandwidth(w_slot: &mut Option<f64>, k_slot: &mut Option<f64>, w: Option<f64>, kappa: Option<f64>) {
    if w.is_some() || kappa.is_some() {
        *w_slot = w;
        *k_slot = kappa;
    }
}

fn mode(s: &str) -> Result<A0Mode, String> {
    s.parse().map_err(|e: bandcorr::Error| e.to_string())
}

fn normalization(s: &str) -> Result<KernelNormalization, String> {
    s.parse().map_err(|e: bandcorr::Error| e.to_string())
}

fn triple(s: &str) -> Result<[usize; 3], String> {
    let v: Vec<usize> = s.split(',').map(|p| p.trim().parse().map_err(|e| format!("'{p}': {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<usize>| format!("expected three orders, got {}", v.len()))
}

#[derive(Debug, Args)]
pub struct CovarianceArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, conflicts_with = "kappa")]
    pub w: Option<f64>,
    /// W = round(κ √N)
    #[arg(long)]
    pub kappa: Option<f64>,
}

impl CovarianceArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let c = &mut cfg.covariance;
        set(&mut c.n, self.n);
        set_bandwidth(&mut c.w, &mut c.kappa, self.w, self.kappa);
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// matrix sizes (repeat or comma-separate for a sweep)
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, conflicts_with = "kappa")]
    pub w: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// spectral centre as `re` or `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<CNum>,
    /// offset ζ as `re` or `re,im`; repeat for a grid
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Vec<CNum>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long, value_parser = mode)]
    pub mode: Option<A0Mode>,
    /// also write simulate.svg
    #[arg(long)]
    pub plot: bool,
}

impl SimulateArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let s = &mut cfg.simulate;
        set_vec(&mut s.n, &self.n);
        set_bandwidth(&mut s.w, &mut s.kappa, self.w, self.kappa);
        set(&mut s.z, self.z);
        set_vec(&mut s.zeta, &self.zeta);
        set(&mut s.n_samples, self.samples);
        set(&mut s.truncation, self.truncation);
        set(&mut s.mode, self.mode);
        s.plot |= self.plot;
    }
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(long = "kappa-u", value_delimiter = ',')]
    pub kappa_u: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Vec<CNum>,
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long, value_parser = mode)]
    pub mode: Vec<A0Mode>,
}

impl LimitsArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let l = &mut cfg.limits;
        set_vec(&mut l.kappa_u, &self.kappa_u);
        set_vec(&mut l.zeta, &self.zeta);
        set(&mut l.truncation, self.truncation);
        set_vec(&mut l.modes, &self.mode);
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "u-star")]
    pub u_star: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long = "quad-order")]
    pub quad_order: Option<usize>,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long, value_parser = normalization)]
    pub normalization: Option<KernelNormalization>,
}

impl SpectrumArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let s = &mut cfg.spectrum;
        set(&mut s.u_star, self.u_star);
        set(&mut s.w, self.w);
        set(&mut s.quad_order, self.quad_order);
        set(&mut s.k_max, self.k_max);
        set(&mut s.normalization, self.normalization);
    }
}

#[derive(Debug, Args)]
pub struct Su2Args {
    #[arg(long, value_delimiter = ',')]
    pub w: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<usize>,
    #[arg(long = "u-star")]
    pub u_star: Option<f64>,
    #[arg(long = "tr-s")]
    pub tr_s: Option<f64>,
    /// per-panel orders for θ, σ, γ
    #[arg(long, value_parser = triple, value_name = "A,B,C")]
    pub orders: Option<[usize; 3]>,
}

impl Su2Args {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let s = &mut cfg.su2;
        set_vec(&mut s.w, &self.w);
        set_vec(&mut s.ells, &self.ell);
        set(&mut s.u_star, self.u_star);
        set(&mut s.tr_s, self.tr_s);
        set(&mut s.orders, self.orders);
    }
}

#[derive(Debug, Args)]
pub struct BlockgateArgs {
    #[arg(long)]
    pub scenarios: Option<usize>,
    #[arg(long = "norm-scenarios")]
    pub norm_scenarios: Option<usize>,
    /// break hypothesis 1-4 and report the rejections
    #[arg(long)]
    pub violate: Option<usize>,
}

impl BlockgateArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let b = &mut cfg.blockgate;
        set(&mut b.scenarios, self.scenarios);
        set(&mut b.norm_scenarios, self.norm_scenarios);
        if self.violate.is_some() {
            b.violate = self.violate;
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// criteria by number or name (e.g. `8` or `blockgate`); repeatable
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// truncation m of the convergence criterion
    #[arg(long)]
    pub truncation: Option<usize>,
    /// skip the thread-count rerun
    #[arg(long = "no-determinism")]
    pub no_determinism: bool,
}

impl VerifyArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let v = &mut cfg.verify;
        set_vec(&mut v.only, &self.only);
        set(&mut v.truncation, self.truncation);
        if self.no_determinism {
            v.determinism = false;
        }
    }
}
