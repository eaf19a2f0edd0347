use nsclab_core::sim::{DataRecipe, SchemeOrder};
use nsclab_core::symbol::{FluidParams, PressureLaw};
use nsclab_core::{Error as CoreError, TorusGrid};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Flat key-value experiment configuration (TOML on disk, every field
/// overridable from the command line). `schema_version` guards the hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    // grid
    pub n: usize,
    pub box_length: f64,
    // physical parameters
    pub mu: f64,
    pub omega: f64,
    pub eps: f64,
    pub gamma: f64,
    // norm suite
    pub q: f64,
    pub r: f64,
    /// 0 => derived (max(2 |Omega| eps, smallest resolvable band))
    pub alpha: f64,
    pub beta0: f64,
    // initial data
    pub recipe: String,
    pub amplitude: f64,
    pub seed: u64,
    pub j_lo: i32,
    pub j_hi: i32,
    pub mode_k: [i64; 3],
    pub bump_width: f64,
    // time stepping
    pub horizon: f64,
    /// 0 => automatic from the scheme's acoustic resolution bound
    pub dt: f64,
    pub cadence: usize,
    pub scheme: usize,
    pub dealias: bool,
    pub positivity_floor: f64,
    // decay / dispersion experiments
    pub beta: f64,
    pub mode_samples: usize,
    pub band: i32,
    pub strichartz_q: f64,
    pub strichartz_r: f64,
    pub time_samples: usize,
    // sweep grids
    pub omegas: Vec<f64>,
    pub epss: Vec<f64>,
    pub seeds: Vec<u64>,
    pub multiplier: f64,
    // io
    pub outdir: String,
    pub oversample: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: 1,
            n: 32,
            box_length: 2.0 * std::f64::consts::PI,
            mu: 0.25,
            omega: 10.0,
            eps: 0.1,
            gamma: 1.4,
            q: 2.8,
            r: 8.0,
            alpha: 0.0,
            beta0: 1.0,
            recipe: "random-band".into(),
            amplitude: 1.0,
            seed: 42,
            j_lo: 1,
            j_hi: 3,
            mode_k: [8, 0, 0],
            bump_width: 0.7,
            horizon: 1.0,
            dt: 0.0,
            cadence: 50,
            scheme: 2,
            dealias: true,
            positivity_floor: 0.05,
            beta: 1.0,
            mode_samples: 200,
            band: 0,
            strichartz_q: 4.0,
            strichartz_r: 4.0,
            time_samples: 129,
            omegas: vec![0.0, 5.0, 10.0, 20.0, 40.0],
            epss: vec![0.05, 0.1],
            seeds: vec![1, 2, 3, 4, 5],
            multiplier: 4.0,
            outdir: "out".into(),
            oversample: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("malformed config: {e}"))
    }

    /// Canonical flat serialization: sorted `key = value` lines, with the
    /// output location excluded (it names where artifacts go, not what the
    /// experiment is). The config hash is the first 16 hex digits of the
    /// SHA-256 of this text.
    pub fn canonical(&self) -> String {
        let value = toml::Value::try_from(self).expect("config serializes");
        let table = value.as_table().expect("flat table");
        let mut lines: Vec<String> = table
            .iter()
            .filter(|(k, _)| k.as_str() != "outdir")
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        lines.sort();
        lines.join("\n")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..16].to_string()
    }

    pub fn grid(&self) -> Result<TorusGrid, CoreError> {
        TorusGrid::new(self.n, self.box_length)
    }

    pub fn params(&self) -> Result<FluidParams, CoreError> {
        FluidParams::new(self.mu, self.omega, self.eps, PressureLaw::gamma_law(self.gamma)?)
    }

    pub fn scheme_order(&self) -> Result<SchemeOrder, String> {
        match self.scheme {
            2 => Ok(SchemeOrder::Two),
            4 => Ok(SchemeOrder::Four),
            other => Err(format!("scheme must be 2 or 4, got {other}")),
        }
    }

    pub fn recipe(&self) -> Result<DataRecipe, String> {
        match self.recipe.as_str() {
            "single-mode" => Ok(DataRecipe::SingleMode {
                k: self.mode_k,
                amp_a: self.amplitude,
                amp_u: [self.amplitude, 0.0, 0.0],
            }),
            "random-band" => Ok(DataRecipe::RandomBand {
                j_lo: self.j_lo,
                j_hi: self.j_hi,
                amplitude: self.amplitude,
                seed: self.seed,
            }),
            "gaussian-bump" => Ok(DataRecipe::GaussianBump {
                width: self.bump_width,
                amplitude: self.amplitude,
            }),
            "large-data" => Ok(DataRecipe::LargeData {
                target_u_norm: self.amplitude,
                seed: self.seed,
            }),
            other => Err(format!(
                "unknown recipe '{other}' (single-mode | random-band | gaussian-bump | large-data)"
            )),
        }
    }

    /// Derived low/mid split when `alpha = 0`: twice the rotation threshold,
    /// at least the smallest resolvable band, strictly below `beta0 / eps`.
    pub fn effective_alpha(&self, grid: &TorusGrid) -> f64 {
        if self.alpha > 0.0 {
            return self.alpha;
        }
        let oe = (self.omega * self.eps).abs();
        let (j_min, _) = grid.band_range();
        let lowest = 2f64.powi(j_min);
        let upper = self.beta0 / self.eps;
        (2.0 * oe).max(lowest).min(0.99 * upper)
    }

    /// Output directory honoring the `NSCLAB_OUT` root.
    pub fn out_path(&self) -> PathBuf {
        let base = std::env::var("NSCLAB_OUT").unwrap_or_default();
        if base.is_empty() {
            PathBuf::from(&self.outdir)
        } else {
            PathBuf::from(base).join(&self.outdir)
        }
    }
}
