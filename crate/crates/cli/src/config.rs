//! TOML experiment configuration.
//!
//! Top-level keys hold the run settings shared by every experiment; each
//! experiment reads its own table. Unknown keys are rejected everywhere.

use crate::error::CliError;
use clap::ValueEnum;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// When present, must name the subcommand being run.
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub paths: Option<usize>,
    pub steps: Option<usize>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub quantiles: QuantilesConfig,
    #[serde(default)]
    pub credit: CreditConfig,
    #[serde(default)]
    pub bivariate: BivariateConfig,
    #[serde(default)]
    pub collapse: CollapseConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Param(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Param(format!("invalid config: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SimulateMode {
    /// Euler on the latent SDE with the score drift, mapped through `F`.
    #[default]
    Conic,
    /// Exact Gaussian transitions of the latent process (Φ mapping only).
    Exact,
    /// The Doléans-Φ map with constant σ.
    Doleans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MappingKind {
    #[default]
    Phi,
    Logistic,
    Tanh,
    Exp,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub mode: SimulateMode,
    pub mapping: MappingKind,
    pub y0: Vec<f64>,
    pub eta: Vec<f64>,
    pub horizon: f64,
    pub paths: usize,
    pub steps: usize,
    /// Logistic scale `c`.
    pub c: f64,
    /// Exponential-mapping rate.
    pub lambda: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            mode: SimulateMode::Conic,
            mapping: MappingKind::Phi,
            y0: vec![0.5, 0.75],
            eta: vec![0.2, 0.8],
            horizon: 5.0,
            paths: 10,
            steps: 500,
            c: 1.0,
            lambda: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantilesConfig {
    pub eta: f64,
    pub y0: Vec<f64>,
    /// Start of the exponential martingale.
    pub m0: f64,
    pub horizon: f64,
    pub steps: usize,
}

impl Default for QuantilesConfig {
    fn default() -> Self {
        Self { eta: 0.5, y0: vec![0.4, 0.5, 0.6], m0: 1.0, horizon: 20.0, steps: 200 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreditConfig {
    /// Piecewise-constant hazard records `[end time, rate]`.
    pub curve: Vec<(f64, f64)>,
    /// Alternative to `curve`: a `t,h` CSV file.
    pub curve_file: Option<PathBuf>,
    pub eta: Vec<f64>,
    /// Conditioning time of `Q(t, T; z)` and of the terminal histogram.
    pub t: f64,
    pub maturity: f64,
    /// Maturities of the conditional-survival curves run from `t` to here.
    pub max_maturity: f64,
    pub bins: usize,
    pub paths: usize,
    pub steps: usize,
    pub quadrature_nodes: usize,
    pub azema_eta: f64,
    pub azema_hazard: f64,
    pub azema_horizon: f64,
    pub azema_paths: usize,
    pub azema_steps: usize,
}

impl Default for CreditConfig {
    fn default() -> Self {
        Self {
            curve: vec![(1.0, 0.05), (3.0, 0.06), (5.0, 0.08), (7.0, 0.085), (10.0, 0.065)],
            curve_file: None,
            eta: vec![0.1, 0.25],
            t: 1.0,
            maturity: 5.0,
            max_maturity: 10.0,
            bins: 50,
            paths: 10_000,
            steps: 50,
            quadrature_nodes: 16,
            azema_eta: 0.15,
            azema_hazard: 0.08,
            azema_horizon: 5.0,
            azema_paths: 10,
            azema_steps: 500,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BivariateConfig {
    pub h1: f64,
    pub h2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub rho: Vec<f64>,
    pub dt: f64,
    pub horizon: f64,
    /// Fixed maturity of `G_t(T, T)`.
    pub maturity: f64,
    pub paths: usize,
    /// Paths written out per file; the summary uses all of them.
    pub shown_paths: usize,
}

impl Default for BivariateConfig {
    fn default() -> Self {
        Self {
            h1: 0.08,
            h2: 0.125,
            eta1: 0.15,
            eta2: 0.25,
            rho: vec![-0.8, 0.0, 0.8],
            dt: 0.05,
            horizon: 5.0,
            maturity: 5.0,
            paths: 1000,
            shown_paths: 10,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollapseConfig {
    pub y0: f64,
    pub eta: f64,
    pub horizon: f64,
    pub steps: usize,
    pub paths: usize,
    pub eps: f64,
    /// Half-distance between the two modes of the bimodal mapping.
    pub bimodal_mu: f64,
    pub bimodal_s: f64,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        Self { y0: 0.5, eta: 0.5, horizon: 200.0, steps: 2000, paths: 10_000, eps: 1e-3, bimodal_mu: 3.0, bimodal_s: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub paths: usize,
    pub yor_paths: usize,
    pub yor_bins: usize,
    /// Use `r = ρ` instead of the drift-killing copula correlation, which
    /// the suite must flag.
    pub corrupt_copula: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { paths: 20_000, yor_paths: 200_000, yor_bins: 10, corrupt_copula: false }
    }
}

/// Settings after merging flags over the config file over defaults.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub paths: Option<usize>,
    pub steps: Option<usize>,
}
