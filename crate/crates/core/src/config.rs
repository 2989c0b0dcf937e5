//! Run configuration: one TOML file with `[model]`, `[sector]`, `[vqe]`,
//! `[sweep]` and `[output]` tables. Every field has a default.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{default_occupation, hamming_check};
use crate::error::{Error, Result};
use crate::lattice::{validate, HubbardModel, SpinSector};
use crate::vqe::sweep::uniform_grid;
use crate::vqe::{CostMode, GradientMethod, OptimizerKind, VqeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(rename = "N")]
    pub colors: usize,
    /// Hopping amplitudes by range.
    pub t: Vec<f64>,
    #[serde(rename = "U")]
    pub onsite: f64,
    /// Density-density couplings by range.
    #[serde(rename = "V")]
    pub density: Vec<f64>,
    /// Flux used by `map`.
    pub phi: f64,
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock {
            sites: 3,
            colors: 3,
            t: vec![1.0],
            onsite: 5.0,
            density: vec![],
            phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SectorBlock {
    /// Fermions per color; empty means one per color.
    pub counts: Vec<usize>,
    /// Occupied qubits of the prepared state; empty means the default filling.
    pub occupied: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeBlock {
    pub layers: usize,
    pub optimizer: OptimizerKind,
    pub mode: ModeName,
    /// Shots per measurement group.
    pub shots: u64,
    pub seeds: Vec<u64>,
    pub starts: usize,
    /// Evaluations per point; 0 picks the optimizer default.
    pub budget: u64,
    pub tolerance: f64,
    pub gradient: GradientMethod,
    pub two_harmonic: bool,
}

impl Default for VqeBlock {
    fn default() -> Self {
        VqeBlock {
            layers: 3,
            optimizer: OptimizerKind::QuasiNewton,
            mode: ModeName::Exact,
            shots: 32_768,
            seeds: vec![0],
            starts: 5,
            budget: 0,
            tolerance: 1e-5,
            gradient: GradientMethod::FiniteDifference,
            two_harmonic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    /// Explicit grid; empty means `points` equally spaced values on `[0, 1)`.
    pub phi: Vec<f64>,
    pub points: usize,
    pub mirror: bool,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            phi: vec![],
            points: 21,
            mirror: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: String,
    /// Entropy bipartition as qubit indices; empty means the first half.
    pub entropy_cut: Vec<usize>,
    pub log_base: LogBase,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: "results".into(),
            entropy_cut: vec![],
            log_base: LogBase::Natural,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    pub sector: SectorBlock,
    pub vqe: VqeBlock,
    pub sweep: SweepBlock,
    pub output: OutputBlock,
}

impl RunConfig {
    /// Parses and validates TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {}", path.display(), e)))?;
        Ok((Self::from_toml(&text)?, text))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn model(&self) -> HubbardModel {
        HubbardModel {
            sites: self.model.sites,
            colors: self.model.colors,
            hopping: self.model.t.clone(),
            onsite: self.model.onsite,
            density: self.model.density.clone(),
            flux: self.model.phi,
        }
    }

    pub fn sector(&self) -> SpinSector {
        if self.sector.counts.is_empty() {
            SpinSector::uniform(self.model.colors, 1)
        } else {
            SpinSector::new(self.sector.counts.clone())
        }
    }

    pub fn occupation(&self) -> u64 {
        if self.sector.occupied.is_empty() {
            default_occupation(self.model.sites, &self.sector())
        } else {
            self.sector.occupied.iter().fold(0, |w, &q| w | 1 << q)
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.sweep.phi.is_empty() {
            uniform_grid(self.sweep.points)
        } else {
            self.sweep.phi.clone()
        }
    }

    pub fn cut(&self) -> Vec<usize> {
        if self.output.entropy_cut.is_empty() {
            (0..self.model.sites * self.model.colors / 2).collect()
        } else {
            self.output.entropy_cut.clone()
        }
    }

    /// Optimizer settings for one seed.
    pub fn vqe_config(&self, seed: u64) -> VqeConfig {
        let v = &self.vqe;
        VqeConfig {
            layers: v.layers,
            optimizer: v.optimizer,
            mode: match v.mode {
                ModeName::Exact => CostMode::Exact,
                ModeName::Sampled => CostMode::Sampled { shots: v.shots },
            },
            tolerance: v.tolerance,
            max_evaluations: if v.budget == 0 { None } else { Some(v.budget) },
            seed,
            starts: v.starts,
            gradient: v.gradient,
            two_harmonic: v.two_harmonic,
        }
    }

    /// Revalidates every block against the module invariants.
    pub fn check(&self) -> Result<()> {
        let (model, sector) = validate(self.model(), self.sector())?;
        let q = model.qubits();
        if q > 30 {
            return Err(Error::QubitCap { qubits: q, cap: 30 });
        }
        for &b in &self.sector.occupied {
            if b >= q {
                return Err(Error::range(
                    "sector.occupied",
                    format!("qubit {} outside [0, {})", b, q),
                ));
            }
        }
        if !hamming_check(self.occupation(), model.sites, &sector) {
            return Err(Error::range(
                "sector.occupied",
                "per-color counts differ from sector.counts",
            ));
        }
        if self.vqe.seeds.is_empty() {
            return Err(Error::range("vqe.seeds", "at least one seed"));
        }
        if self.vqe.shots == 0 {
            return Err(Error::range("vqe.shots", "must be >= 1"));
        }
        if self.sweep.phi.is_empty() && self.sweep.points == 0 {
            return Err(Error::range("sweep.points", "must be >= 1"));
        }
        let grid = self.grid();
        if grid.iter().any(|f| !(0.0..1.0).contains(f)) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::range("sweep.phi", "strictly increasing values in [0, 1)"));
        }
        let cut = self.cut();
        if cut.is_empty() || cut.len() >= q || cut.iter().any(|&c| c >= q) {
            return Err(Error::range(
                "output.entropy_cut",
                "a proper nonempty subset of the qubits",
            ));
        }
        if self.vqe.mode == ModeName::Sampled && self.vqe.optimizer == OptimizerKind::QuasiNewton {
            return Err(Error::range("vqe.optimizer", "sampled mode needs \"nft\""));
        }
        self.vqe_config(self.vqe.seeds[0]).check().map_err(|e| match e {
            Error::Range { field, reason } => Error::Range {
                field: format!("vqe.{}", field),
                reason,
            },
            other => other,
        })
    }
}

/// Hex SHA-256 of the configuration text.
pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
