//! Log-log scaling fits: generalized Hurst exponents and mass exponents.

use serde::{Deserialize, Serialize};

use super::config::{AnalysisConfig, MIN_SCALES};
use super::fluctuation::FluctuationSurface;
use super::linalg::fit_line;
use super::MfdfaError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstSpectrum {
    pub q_values: Vec<f64>,
    /// Generalized Hurst exponents `h(q)`.
    pub h: Vec<f64>,
    pub fit_r2: Vec<f64>,
    /// `tau(q) = q h(q) - 1`.
    pub tau: Vec<f64>,
    /// Scales that entered the fits.
    pub scales_used: Vec<usize>,
    /// True when some `fit_r2` falls below the configured minimum.
    pub low_fit_quality: bool,
}

impl HurstSpectrum {
    /// Builds a spectrum from known exponents, with perfect fits.
    pub fn from_exponents(q_values: Vec<f64>, h: Vec<f64>) -> Self {
        let tau = mass_exponents(&q_values, &h);
        let fit_r2 = vec![1.0; h.len()];
        Self {
            q_values,
            h,
            fit_r2,
            tau,
            scales_used: Vec::new(),
            low_fit_quality: false,
        }
    }

    pub fn h_at(&self, q: f64) -> Option<f64> {
        self.q_values.iter().position(|&v| v == q).map(|i| self.h[i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,h,tau,fit_r2\n");
        for i in 0..self.q_values.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.q_values[i], self.h[i], self.tau[i], self.fit_r2[i]
            ));
        }
        out
    }
}

pub fn mass_exponents(q_values: &[f64], h: &[f64]) -> Vec<f64> {
    q_values.iter().zip(h).map(|(&q, &h)| q * h - 1.0).collect()
}

/// Slope of `ln F_q(s)` against `ln s` over the usable scales, for every q.
pub fn hurst_spectrum(surface: &FluctuationSurface, config: &AnalysisConfig) -> Result<HurstSpectrum, MfdfaError> {
    let usable = surface.usable_scales();
    if usable.len() < MIN_SCALES {
        return Err(MfdfaError::InsufficientScales {
            usable: usable.len(),
            required: MIN_SCALES,
        });
    }
    let log_s: Vec<f64> = usable.iter().map(|&si| (surface.scales[si] as f64).ln()).collect();
    let mut h = Vec::with_capacity(surface.q_values.len());
    let mut fit_r2 = Vec::with_capacity(surface.q_values.len());
    for row in &surface.f {
        let log_f: Vec<f64> = usable.iter().map(|&si| row[si].ln()).collect();
        let fit = fit_line(&log_s, &log_f).ok_or(MfdfaError::InsufficientScales {
            usable: usable.len(),
            required: MIN_SCALES,
        })?;
        h.push(fit.slope);
        fit_r2.push(fit.r2);
    }
    let tau = mass_exponents(&surface.q_values, &h);
    let low_fit_quality = fit_r2.iter().any(|&r2| r2 < config.min_fit_r2);
    Ok(HurstSpectrum {
        q_values: surface.q_values.clone(),
        h,
        fit_r2,
        tau,
        scales_used: usable.iter().map(|&si| surface.scales[si]).collect(),
        low_fit_quality,
    })
}
