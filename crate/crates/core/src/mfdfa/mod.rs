//! Multifractal detrended fluctuation analysis.
//!
//! The pipeline is
//!
//! 1. [`profile`]: cumulative sum of the mean-removed signal;
//! 2. [`local_fluctuations`]: per-window variance around a degree-`m`
//!    polynomial trend, over `2 floor(N/s)` windows taken from both ends;
//! 3. [`fluctuation_function`]: q-order average `F_q(s)`;
//! 4. [`hurst_spectrum`]: `h(q)` as the log-log slope of `F_q(s)` versus `s`,
//!    and `tau(q) = q h(q) - 1`;
//! 5. [`singularity_spectrum`]: `alpha = h + q h'`, `f = q (alpha - h) + 1`,
//!    and the width between the zeros of a parabola fitted to `f(alpha)`.
//!
//! [`analyze`] runs all of it on one series.

mod config;
mod detrend;
mod fluctuation;
mod linalg;
mod profile;
mod scaling;
mod spectrum;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::signal_io::TimeSeries;

pub use config::{q_grid, AnalysisConfig, ScaleBounds, MAX_DETREND_ORDER, MIN_SCALES};
pub use detrend::{local_fluctuations, window_starts, DetrendBasis};
pub use fluctuation::{fluctuation_function, fluctuation_surface, zero_windows, FluctuationSurface, MAX_ZERO_FRACTION};
pub use linalg::{fit_line, least_squares, LineFit};
pub use profile::{profile, scale_grid, terminal_tolerance, Profile};
pub use scaling::{hurst_spectrum, mass_exponents, HurstSpectrum};
pub use spectrum::{
    finite_difference, singularity_spectrum, spectrum_width, QuadraticCoeffs, QuadraticFit, SingularitySpectrum,
    WidthStatus,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MfdfaError {
    #[error("invalid analysis config: {0}")]
    InvalidConfig(String),
    #[error("series of length {len} is too short (need {required})")]
    SignalTooShort { len: usize, required: usize },
    #[error("series contains non-finite samples")]
    NonFiniteInput,
    #[error("constant signal: every fluctuation would be zero")]
    DegenerateSignal,
    #[error("scale grid [{scale_min}, {scale_max}] collapses to {got} distinct scales ({requested} requested)")]
    EmptyGrid {
        scale_min: usize,
        scale_max: usize,
        requested: usize,
        got: usize,
    },
    #[error("scale {scale} exceeds N/4 = {max}")]
    ScaleTooLarge { scale: usize, max: usize },
    #[error("scale {scale} is too small for detrend order {order} (need >= {})", 2 * (order + 2))]
    ScaleTooSmallForOrder { scale: usize, order: usize },
    #[error("window variances must be finite and non-negative")]
    InvalidFluctuation,
    #[error("every window has zero fluctuation")]
    AllZeroFluctuations,
    #[error("only {usable} usable scales, need {required}")]
    InsufficientScales { usable: usize, required: usize },
    #[error("need at least 3 q values, got {0}")]
    TooFewQ(usize),
    #[error("fitted spectrum is not concave (A = {})", .0.a)]
    NonConcaveSpectrum(QuadraticCoeffs),
    #[error("fitted spectrum has no real zeros")]
    ComplexRoots(QuadraticCoeffs),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("analysis invariant violated: {0}")]
    InvariantViolated(String),
}

/// Relative slack allowed on the power-mean ordering of `F_q(s)` in q.
pub const MONOTONICITY_TOLERANCE: f64 = 1e-9;
/// `max f(alpha)` above `1 + F_MAX_TOLERANCE` is flagged.
pub const F_MAX_TOLERANCE: f64 = 0.1;

pub mod flags {
    pub const LOW_FIT_R2: &str = "low_fit_r2";
    pub const ZERO_WINDOWS: &str = "zero_windows";
    pub const UNUSABLE_SCALES: &str = "unusable_scales";
    pub const F_MAX_EXCEEDED: &str = "f_max_exceeded";
    pub const FIT_C_OFF: &str = "fit_c_off";
    /// Set together with `width_<status>` whenever the quadratic width is unavailable.
    pub const WIDTH_INVALID: &str = "width_invalid";
}

/// Everything one MFDFA run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub n: usize,
    pub scale_grid: Vec<usize>,
    pub profile_terminal: f64,
    pub surface: FluctuationSurface,
    pub hurst: HurstSpectrum,
    pub spectrum: SingularitySpectrum,
    pub flags: BTreeSet<String>,
}

impl Analysis {
    pub fn h2(&self) -> f64 {
        self.hurst.h_at(2.0).expect("validated configs contain q = 2")
    }
}

/// Runs the full pipeline on `ts` and checks the algebraic invariants.
pub fn analyze(ts: &TimeSeries, config: &AnalysisConfig) -> Result<Analysis, MfdfaError> {
    let n = ts.samples.len();
    let bounds = config.resolve(n)?;
    let grid = scale_grid(bounds.min, bounds.max, config.n_scales)?;
    if grid.len() < MIN_SCALES {
        return Err(MfdfaError::EmptyGrid {
            scale_min: bounds.min,
            scale_max: bounds.max,
            requested: config.n_scales,
            got: grid.len(),
        });
    }
    let profile = profile(&ts.samples)?;
    let profile_terminal = *profile.values.last().expect("profile is non-empty");
    let surface = fluctuation_surface(&profile, &grid, &config.q_values, config.detrend_order)?;
    drop(profile);
    let hurst = hurst_spectrum(&surface, config)?;
    let spectrum = singularity_spectrum(&hurst)?;

    let mut flags = BTreeSet::new();
    if hurst.low_fit_quality {
        flags.insert(flags::LOW_FIT_R2.to_string());
    }
    if surface.zero_windows.iter().any(|&z| z > 0) {
        flags.insert(flags::ZERO_WINDOWS.to_string());
    }
    if !surface.excluded_scales.is_empty() || surface.usable_scales().len() < surface.scales.len() {
        flags.insert(flags::UNUSABLE_SCALES.to_string());
    }
    if spectrum.max_f() > 1.0 + F_MAX_TOLERANCE {
        flags.insert(flags::F_MAX_EXCEEDED.to_string());
    }
    if let Some(c) = spectrum.fit_coeffs {
        if (c.c - 1.0).abs() > F_MAX_TOLERANCE {
            flags.insert(flags::FIT_C_OFF.to_string());
        }
    }
    if spectrum.width_status != WidthStatus::Valid {
        flags.insert(flags::WIDTH_INVALID.to_string());
        flags.insert(format!("width_{}", spectrum.width_status.as_str()));
    }

    let analysis = Analysis {
        n,
        scale_grid: grid,
        profile_terminal,
        surface,
        hurst,
        spectrum,
        flags,
    };
    check_invariants(&analysis, terminal_tolerance(&ts.samples))?;
    Ok(analysis)
}

fn check_invariants(a: &Analysis, terminal_tol: f64) -> Result<(), MfdfaError> {
    let fail = |m: String| Err(MfdfaError::InvariantViolated(m));
    if a.profile_terminal.abs() > terminal_tol {
        return fail(format!(
            "profile ends at {} (tolerance {terminal_tol})",
            a.profile_terminal
        ));
    }
    let drop = a.surface.max_monotonicity_violation();
    if drop > MONOTONICITY_TOLERANCE {
        return fail(format!("F_q(s) decreases in q by a relative {drop:e}"));
    }
    for (i, (&q, &h)) in a.hurst.q_values.iter().zip(&a.hurst.h).enumerate() {
        if a.hurst.tau[i] != q * h - 1.0 {
            return fail(format!("tau({q}) != q h(q) - 1"));
        }
    }
    if a.surface.f.iter().flatten().any(|v| !(v.is_finite() && *v > 0.0)) {
        return fail("non-positive or non-finite F_q(s)".into());
    }
    if a.spectrum.width_w.is_some_and(|w| w < 0.0) || a.spectrum.width_direct < 0.0 {
        return fail("negative spectrum width".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen;

    #[test]
    fn deterministic() {
        let ts = synthgen::white_noise(8192, 4).unwrap();
        let cfg = AnalysisConfig::default();
        assert_eq!(analyze(&ts, &cfg).unwrap(), analyze(&ts, &cfg).unwrap());
    }

    #[test]
    fn linear_ramp_is_rejected() {
        // Constant increments: the profile is a parabola minus a line, which
        // m = 2 removes exactly, so no usable scale remains.
        let ts = TimeSeries::new((0..4096).map(|i| i as f64).collect());
        let cfg = AnalysisConfig {
            detrend_order: 2,
            ..AnalysisConfig::default()
        };
        assert!(matches!(analyze(&ts, &cfg), Err(MfdfaError::InsufficientScales { .. })));
    }

    #[test]
    fn constant_is_rejected() {
        let ts = TimeSeries::new(vec![0.25; 4096]);
        assert_eq!(
            analyze(&ts, &AnalysisConfig::default()).unwrap_err(),
            MfdfaError::DegenerateSignal
        );
    }

    #[test]
    fn short_series_is_rejected() {
        let ts = synthgen::white_noise(60, 1).unwrap();
        assert!(matches!(
            analyze(&ts, &AnalysisConfig::default()),
            Err(MfdfaError::InvalidConfig(_)) | Err(MfdfaError::EmptyGrid { .. })
        ));
    }

    #[test]
    fn surface_csv_shape() {
        let ts = synthgen::white_noise(4096, 2).unwrap();
        let a = analyze(&ts, &AnalysisConfig::default()).unwrap();
        let csv = a.surface.to_csv();
        assert_eq!(
            csv.lines().count(),
            1 + a.surface.scales.len() * a.surface.q_values.len()
        );
        assert!(csv.starts_with("scale,q,F\n"));
    }
}
