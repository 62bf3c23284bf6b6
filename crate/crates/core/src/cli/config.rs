use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use crate::mfdfa::{q_grid, AnalysisConfig};

/// Everything that determines an `analyze` run. Stored as `run.json` next to
/// the outputs; feeding that file back through `--config` reproduces the run.
///
/// The output directory is deliberately not part of it, so the same run
/// written to two places yields identical `run.json` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scale_min: usize,
    /// `None` means `floor(N/4)` of each segment.
    pub scale_max: Option<usize>,
    pub n_scales: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub detrend_order: usize,
    pub min_fit_r2: f64,
    pub segment_seconds: f64,
    pub seed: u64,
    pub emit_plots: bool,
    pub manifest: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let analysis = AnalysisConfig::default();
        Self {
            scale_min: analysis.scale_min,
            scale_max: analysis.scale_max,
            n_scales: analysis.n_scales,
            q_min: -5.0,
            q_max: 5.0,
            q_step: 0.5,
            detrend_order: analysis.detrend_order,
            min_fit_r2: analysis.min_fit_r2,
            segment_seconds: 45.0,
            seed: 0,
            emit_plots: false,
            manifest: None,
        }
    }
}

impl RunConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        config.analysis_config()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn analysis_config(&self) -> anyhow::Result<AnalysisConfig> {
        if self.segment_seconds.is_nan() || self.segment_seconds <= 0.0 {
            bail!("segment_seconds must be positive, got {}", self.segment_seconds);
        }
        let config = AnalysisConfig {
            scale_min: self.scale_min,
            scale_max: self.scale_max,
            n_scales: self.n_scales,
            q_values: q_grid(self.q_min, self.q_max, self.q_step)?,
            detrend_order: self.detrend_order,
            min_fit_r2: self.min_fit_r2,
        };
        config.validate()?;
        Ok(config)
    }
}
