//! Experiment configuration: a JSON file describing a grid of cells
//! (n x model x adversary), trial counts, seeding, and output paths.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use smoothflood_core::adversary::AdversaryKind;
use smoothflood_core::smoothing::SmoothingModel;

/// Axis a scaling fit runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitAxis {
    N,
    K,
    Epsilon,
}

impl FitAxis {
    pub fn label(self) -> &'static str {
        match self {
            FitAxis::N => "n",
            FitAxis::K => "k",
            FitAxis::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub models: Vec<SmoothingModel>,
    pub adversaries: Vec<AdversaryKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: Grid,
    pub trials: u64,
    pub base_seed: u64,
    /// Round cap; defaults to 4n per cell when absent.
    #[serde(default)]
    pub max_rounds: Option<u64>,
    /// Emit one JSONL row per trial next to the summary.
    #[serde(default)]
    pub emit_trials: bool,
    /// Scaling fits to compute during `sweep`.
    #[serde(default)]
    pub fits: Vec<FitAxis>,
    /// Directory the CSV/JSONL files go to.
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every cell against the model and pairing premises; the
    /// first violation is reported with the offending cell named.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            bail!("config name must be non-empty");
        }
        if self.grid.n.is_empty() || self.grid.models.is_empty() || self.grid.adversaries.is_empty()
        {
            bail!("grid axes must all be non-empty");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.max_rounds == Some(0) {
            bail!("max_rounds must be at least 1");
        }
        for cell in self.cells() {
            cell.adversary
                .validate(cell.n, &cell.model)
                .map_err(|e| anyhow::anyhow!("cell {}: {e}", cell.key()))?;
        }
        Ok(())
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.grid.n.iter().flat_map(move |&n| {
            self.grid.models.iter().flat_map(move |model| {
                self.grid.adversaries.iter().map(move |adversary| Cell {
                    n,
                    model: model.clone(),
                    adversary: adversary.clone(),
                })
            })
        })
    }

    pub fn max_rounds_for(&self, n: usize) -> u64 {
        self.max_rounds.unwrap_or(4 * n as u64)
    }
}

/// One point of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub model: SmoothingModel,
    pub adversary: AdversaryKind,
}

impl Cell {
    pub fn model_label(&self) -> String {
        match &self.model {
            SmoothingModel::KSmooth { k } => format!("k_smooth(k={k})"),
            SmoothingModel::Proportional { epsilon, cap } => {
                format!("proportional(eps={epsilon};cap={cap})")
            }
            SmoothingModel::Targeted { epsilon } => format!("targeted(eps={epsilon})"),
        }
    }

    pub fn adversary_label(&self) -> String {
        match &self.adversary {
            AdversaryKind::Cassette { c } => format!("cassette(c={c})"),
            AdversaryKind::StarRecenter { period } => format!("star_recenter(period={period})"),
            other => other.name().to_string(),
        }
    }

    pub fn key(&self) -> String {
        format!(
            "n={};model={};adversary={}",
            self.n,
            self.model_label(),
            self.adversary_label()
        )
    }

    /// Seed for this cell: FNV-1a over the key bytes, mixed with the
    /// experiment base seed. Stable across platforms and runs.
    pub fn seed(&self, base_seed: u64) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ base_seed.rotate_left(17);
        for b in self.key().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^ base_seed
    }

    /// The value of a fit axis for this cell, when the cell lies on it.
    pub fn axis_value(&self, axis: FitAxis) -> Option<f64> {
        match (axis, &self.model) {
            (FitAxis::N, _) => Some(self.n as f64),
            (FitAxis::K, SmoothingModel::KSmooth { k }) => Some(*k),
            (FitAxis::Epsilon, SmoothingModel::Proportional { epsilon, .. }) => Some(*epsilon),
            (FitAxis::Epsilon, SmoothingModel::Targeted { epsilon }) => Some(*epsilon),
            _ => None,
        }
    }

    /// Grouping key for a fit: everything except the axis coordinate.
    pub fn axis_group(&self, axis: FitAxis) -> String {
        match axis {
            FitAxis::N => format!("model={};adversary={}", self.model_label(), self.adversary_label()),
            FitAxis::K | FitAxis::Epsilon => {
                let kind = match &self.model {
                    SmoothingModel::KSmooth { .. } => "k_smooth",
                    SmoothingModel::Proportional { cap, .. } => {
                        return format!(
                            "n={};model=proportional(cap={cap});adversary={}",
                            self.n,
                            self.adversary_label()
                        );
                    }
                    SmoothingModel::Targeted { .. } => "targeted",
                };
                format!("n={};model={kind};adversary={}", self.n, self.adversary_label())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            r#"{{
              "name": "t",
              "grid": {{
                "n": [32],
                "models": [{{"k_smooth": {{"k": 1.0}}}}],
                "adversaries": ["spooling"]
              }},
              "trials": 2,
              "base_seed": 1,
              "output_dir": "out"{extra}
            }}"#
        )
    }

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::from_str(&minimal("")).unwrap();
        assert_eq!(c.cells().count(), 1);
        assert_eq!(c.max_rounds_for(32), 128);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = ExperimentConfig::from_str(&minimal(r#", "bogus": 3"#)).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn rejects_premise_violations_naming_the_cell() {
        let text = r#"{
          "name": "t",
          "grid": {
            "n": [8],
            "models": [{"k_smooth": {"k": 4.0}}],
            "adversaries": ["spooling"]
          },
          "trials": 1,
          "base_seed": 1,
          "output_dir": "out"
        }"#;
        let err = ExperimentConfig::from_str(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n=8") && msg.contains("n/16"), "{msg}");
    }

    #[test]
    fn cell_seed_depends_on_key_and_base() {
        let c = ExperimentConfig::from_str(&minimal("")).unwrap();
        let cell = c.cells().next().unwrap();
        assert_ne!(cell.seed(1), cell.seed(2));
        let mut other = cell.clone();
        other.n = 48;
        assert_ne!(cell.seed(1), other.seed(1));
    }
}
