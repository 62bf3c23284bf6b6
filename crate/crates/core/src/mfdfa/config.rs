use serde::{Deserialize, Serialize};

use super::MfdfaError;

/// Knobs of one MFDFA run. `scale_max = None` resolves to `floor(N/4)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub scale_min: usize,
    pub scale_max: Option<usize>,
    pub n_scales: usize,
    pub q_values: Vec<f64>,
    pub detrend_order: usize,
    pub min_fit_r2: f64,
}

pub const MIN_SCALES: usize = 8;
pub const MAX_DETREND_ORDER: usize = 3;

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            scale_min: 16,
            scale_max: None,
            n_scales: 30,
            q_values: q_grid(-5.0, 5.0, 0.5).expect("default q grid is valid"),
            detrend_order: 1,
            min_fit_r2: 0.97,
        }
    }
}

/// `q_min, q_min + step, ..., q_max`; values within 1e-9 of an integer
/// multiple of 0.5 are snapped so that `q = 0` and `q = 2` come out exact.
pub fn q_grid(q_min: f64, q_max: f64, step: f64) -> Result<Vec<f64>, MfdfaError> {
    if step.is_nan() || step <= 0.0 || !q_min.is_finite() || !q_max.is_finite() || q_max < q_min {
        return Err(MfdfaError::InvalidConfig(format!(
            "q grid [{q_min}, {q_max}] step {step} is empty"
        )));
    }
    let count = ((q_max - q_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let q = q_min + i as f64 * step;
            let snapped = (q * 2.0).round() / 2.0;
            if (q - snapped).abs() < 1e-9 {
                snapped
            } else {
                q
            }
        })
        .collect())
}

/// Scale bounds after resolving defaults against a series length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleBounds {
    pub min: usize,
    pub max: usize,
}

impl AnalysisConfig {
    /// Checks everything that does not depend on the series length.
    pub fn validate(&self) -> Result<(), MfdfaError> {
        let bad = |m: String| Err(MfdfaError::InvalidConfig(m));
        if !(1..=MAX_DETREND_ORDER).contains(&self.detrend_order) {
            return bad(format!(
                "detrend order must be in 1..={MAX_DETREND_ORDER}, got {}",
                self.detrend_order
            ));
        }
        let min_allowed = 2 * (self.detrend_order + 2);
        if self.scale_min < min_allowed {
            return bad(format!(
                "scale_min {} below 2*(order+2) = {min_allowed}",
                self.scale_min
            ));
        }
        if self.n_scales < MIN_SCALES {
            return bad(format!("n_scales must be >= {MIN_SCALES}, got {}", self.n_scales));
        }
        if !(0.0..=1.0).contains(&self.min_fit_r2) {
            return bad(format!("min_fit_r2 must lie in [0, 1], got {}", self.min_fit_r2));
        }
        if self.q_values.iter().any(|q| !q.is_finite()) {
            return bad("q values must be finite".into());
        }
        if self.q_values.windows(2).any(|w| w[1] <= w[0]) {
            return bad("q values must be strictly increasing".into());
        }
        if self.q_values.len() < 3 {
            return bad("at least 3 distinct q values are required".into());
        }
        if !self.q_values.contains(&2.0) {
            return bad("q grid must contain q = 2".into());
        }
        Ok(())
    }

    /// Validates the config for a series of length `n` and resolves `scale_max`.
    pub fn resolve(&self, n: usize) -> Result<ScaleBounds, MfdfaError> {
        self.validate()?;
        let quarter = n / 4;
        let max = self.scale_max.unwrap_or(quarter);
        if max > quarter {
            return Err(MfdfaError::InvalidConfig(format!(
                "scale_max {max} exceeds N/4 = {quarter} for N = {n}"
            )));
        }
        if self.scale_min >= max {
            return Err(MfdfaError::InvalidConfig(format!(
                "scale_min {} must be below scale_max {max} (N = {n})",
                self.scale_min
            )));
        }
        Ok(ScaleBounds {
            min: self.scale_min,
            max,
        })
    }

    pub fn q2_index(&self) -> Option<usize> {
        self.q_values.iter().position(|&q| q == 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let cfg = AnalysisConfig::default();
        assert_eq!(cfg.q_values.len(), 21);
        assert_eq!(cfg.q_values[0], -5.0);
        assert_eq!(cfg.q_values[10], 0.0);
        assert_eq!(cfg.q_values[14], 2.0);
        assert_eq!(cfg.q_values[20], 5.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn resolve_defaults_to_quarter_length() {
        let cfg = AnalysisConfig::default();
        assert_eq!(cfg.resolve(65_536).unwrap(), ScaleBounds { min: 16, max: 16_384 });
        assert!(cfg.resolve(60).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let base = AnalysisConfig::default();
        let cases = [
            AnalysisConfig {
                detrend_order: 0,
                ..base.clone()
            },
            AnalysisConfig {
                detrend_order: 4,
                ..base.clone()
            },
            AnalysisConfig {
                scale_min: 5,
                ..base.clone()
            },
            AnalysisConfig {
                n_scales: 7,
                ..base.clone()
            },
            AnalysisConfig {
                q_values: vec![1.0, 2.0],
                ..base.clone()
            },
            AnalysisConfig {
                q_values: vec![-1.0, 1.0, 3.0],
                ..base.clone()
            },
            AnalysisConfig {
                q_values: vec![2.0, 1.0, 3.0],
                ..base.clone()
            },
            AnalysisConfig {
                min_fit_r2: 1.5,
                ..base.clone()
            },
        ];
        for cfg in cases {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        let too_big = AnalysisConfig {
            scale_max: Some(20_000),
            ..base
        };
        assert!(too_big.resolve(65_536).is_err());
    }

    #[test]
    fn q_grid_snaps() {
        let g = q_grid(-1.0, 3.0, 0.1).unwrap();
        assert_eq!(g.len(), 41);
        assert!(g.contains(&0.0) && g.contains(&2.0));
        assert!(q_grid(1.0, 0.0, 0.5).is_err());
    }
}
