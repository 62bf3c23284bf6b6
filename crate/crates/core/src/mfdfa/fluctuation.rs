//! q-order fluctuation function and the (q, s) surface.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::detrend::local_fluctuations;
use super::profile::Profile;
use super::MfdfaError;

/// Fraction of zero-variance windows above which a scale is unusable.
pub const MAX_ZERO_FRACTION: f64 = 0.05;

/// `F_q(s)` from the window variances `F²(s, v)`.
///
/// Zero variances are left out of the average (see [`zero_windows`]). The
/// mean of `(F²)^{q/2}` is taken in log space, so extreme `q` neither
/// overflows nor underflows; `q = 0` uses the geometric-mean limit.
pub fn fluctuation_function(f2: &[f64], q: f64) -> Result<f64, MfdfaError> {
    if f2.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(MfdfaError::InvalidFluctuation);
    }
    let logs: Vec<f64> = f2.iter().filter(|&&v| v > 0.0).map(|v| v.ln()).collect();
    if logs.is_empty() {
        return Err(MfdfaError::AllZeroFluctuations);
    }
    let n = logs.len() as f64;
    if q == 0.0 {
        return Ok((0.5 * logs.iter().sum::<f64>() / n).exp());
    }
    let half_q = 0.5 * q;
    let peak = logs.iter().map(|l| half_q * l).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (half_q * l - peak).exp()).sum();
    Ok(((peak + (sum / n).ln()) / q).exp())
}

pub fn zero_windows(f2: &[f64]) -> usize {
    f2.iter().filter(|&&v| v == 0.0).count()
}

/// `F_q(s)` over the analysis grid. Scales whose windows are all zero carry no
/// information and are listed in `excluded_scales` instead of `scales`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSurface {
    pub scales: Vec<usize>,
    pub q_values: Vec<f64>,
    /// `f[qi][si]`, all finite and positive.
    pub f: Vec<Vec<f64>>,
    /// Windows per scale, `2 * floor(N/s)`.
    pub segments_used: Vec<usize>,
    pub zero_windows: Vec<usize>,
    pub excluded_scales: Vec<usize>,
}

impl FluctuationSurface {
    /// Whether scale index `si` has at most 5% zero-variance windows.
    pub fn is_usable(&self, si: usize) -> bool {
        self.zero_windows[si] as f64 <= MAX_ZERO_FRACTION * self.segments_used[si] as f64
    }

    pub fn usable_scales(&self) -> Vec<usize> {
        (0..self.scales.len()).filter(|&si| self.is_usable(si)).collect()
    }

    /// Largest relative drop of `F_q(s)` between consecutive q at any scale;
    /// zero when the power-mean ordering holds everywhere.
    pub fn max_monotonicity_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for si in 0..self.scales.len() {
            for w in self.f.windows(2) {
                let (lo, hi) = (w[0][si], w[1][si]);
                if hi < lo {
                    worst = worst.max((lo - hi) / lo);
                }
            }
        }
        worst
    }

    /// Long-format `scale,q,F` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,q,F\n");
        for (si, s) in self.scales.iter().enumerate() {
            for (qi, q) in self.q_values.iter().enumerate() {
                out.push_str(&format!("{s},{q},{}\n", self.f[qi][si]));
            }
        }
        out
    }
}

/// Evaluates the surface. Scales are processed in parallel; each scale's
/// windows and averages are summed in a fixed order, so the result does not
/// depend on the thread count.
pub fn fluctuation_surface(
    profile: &Profile,
    scales: &[usize],
    q_values: &[f64],
    order: usize,
) -> Result<FluctuationSurface, MfdfaError> {
    let per_scale: Vec<(usize, usize, usize, Option<Vec<f64>>)> = scales
        .par_iter()
        .map(|&s| {
            let f2 = local_fluctuations(profile, s, order)?;
            let zeros = zero_windows(&f2);
            if zeros == f2.len() {
                return Ok((s, f2.len(), zeros, None));
            }
            let fq = q_values
                .iter()
                .map(|&q| fluctuation_function(&f2, q))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((s, f2.len(), zeros, Some(fq)))
        })
        .collect::<Result<_, MfdfaError>>()?;

    let mut surface = FluctuationSurface {
        scales: Vec::new(),
        q_values: q_values.to_vec(),
        f: vec![Vec::new(); q_values.len()],
        segments_used: Vec::new(),
        zero_windows: Vec::new(),
        excluded_scales: Vec::new(),
    };
    for (s, windows, zeros, fq) in per_scale {
        match fq {
            None => surface.excluded_scales.push(s),
            Some(fq) => {
                surface.scales.push(s);
                surface.segments_used.push(windows);
                surface.zero_windows.push(zeros);
                for (row, v) in surface.f.iter_mut().zip(fq) {
                    row.push(v);
                }
            }
        }
    }
    Ok(surface)
}
