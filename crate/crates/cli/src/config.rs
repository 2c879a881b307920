//! Run configuration: a JSON document with one section per task kind.
//! Unknown keys are rejected everywhere so that typos surface as config
//! errors (exit 2) instead of silently falling back to defaults.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Scene file for scene-based tasks (coeff, dini, spectral).
    #[serde(default)]
    pub scene: Option<PathBuf>,
    /// Master seed; per-item seeds are derived from it by task index.
    #[serde(default)]
    pub seed: u64,
    /// Worker count; `None` lets rayon choose. Never affects values.
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Output directory for reports and the manifest.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub coeff: Option<CoeffTask>,
    #[serde(default)]
    pub dini: Option<DiniTask>,
    #[serde(default)]
    pub beta: Option<BetaTask>,
    #[serde(default)]
    pub corona: Option<CoronaTask>,
    #[serde(default)]
    pub capacity: Option<CapacityTask>,
    #[serde(default)]
    pub slice: Option<SliceTask>,
    #[serde(default)]
    pub spectral: Option<SpectralTask>,
    #[serde(default)]
    pub fourier: Option<FourierTask>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    /// Multiplicative step; defaults to 2^(1/4).
    #[serde(default = "default_factor")]
    pub factor: f64,
}

pub fn default_factor() -> f64 {
    2.0_f64.powf(0.25)
}

impl GridSpec {
    pub fn radii(&self) -> Vec<f64> {
        eps2_core::dini::log_grid(self.r_min, self.r_max, self.factor)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XrRequest {
    pub x: [f64; 3],
    /// A single radius, or a grid of radii; exactly one must be present.
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub r_grid: Option<GridSpec>,
}

impl XrRequest {
    pub fn radii(&self) -> Result<Vec<f64>, String> {
        match (self.r, &self.r_grid) {
            (Some(r), None) => Ok(vec![r]),
            (None, Some(g)) => Ok(g.radii()),
            _ => Err("each batch entry needs exactly one of `r`, `r_grid`".into()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffTask {
    pub batch: Vec<XrRequest>,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_radial")]
    pub radial_grid: usize,
}

pub fn default_nodes() -> usize {
    2048
}

pub fn default_radial() -> usize {
    96
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiniTask {
    pub x: [f64; 3],
    pub r_grid: GridSpec,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

pub fn default_tol() -> f64 {
    1e-9
}

/// Point-cloud source: a CSV file (x1..xd, weight) or a seeded generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum CloudSource {
    Csv { path: PathBuf, dim: usize },
    /// Uniform samples of a sinusoidal Lipschitz graph over [-r0, r0].
    Graph { n: usize, r0: f64, slope: f64, #[serde(default)] seed: Option<u64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaTask {
    pub cloud: CloudSource,
    pub balls: Vec<BallSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoronaTask {
    pub cloud: CloudSource,
    pub center: [f64; 3],
    pub r0: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
}

/// Point-net source for capacity tasks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum NetSource {
    Csv { path: PathBuf, dim: usize },
    Ball { center: [f64; 3], radius: f64, dim: usize, target: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityTask {
    pub net: NetSource,
    pub s: f64,
    #[serde(default)]
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceTask {
    pub k: NetSource,
    /// Weighted points of the set G, as (x, y, z, weight) rows.
    pub g: PathBuf,
    pub r0: f64,
    pub s: f64,
    pub r_grid: GridSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralTask {
    pub x: [f64; 3],
    pub r_grid: GridSpec,
    #[serde(default = "default_pinned_c")]
    pub pinned_c: f64,
}

pub fn default_pinned_c() -> f64 {
    10.0
}

/// 1-D function source for the Fourier tasks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum FunctionSource {
    Bump { n: usize, window: f64, half_width: f64, height: f64 },
    Random { n: usize, window: f64, slope: f64, #[serde(default)] seed: Option<u64> },
    /// CSV grid dump with columns (x, value); spacing must be uniform.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourierCheck {
    Identity,
    SecondDiff,
    Lips,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTask {
    pub function: FunctionSource,
    pub check: FourierCheck,
    #[serde(default = "default_fourier_tol")]
    pub tol: f64,
}

pub fn default_fourier_tol() -> f64 {
    0.03
}
