//! Windowed polynomial detrending of the profile.

use super::profile::Profile;
use super::MfdfaError;

/// Residual energies below this fraction of the window energy are rounding
/// noise of an exact polynomial fit and are reported as exactly zero.
const ZERO_RELATIVE_ENERGY: f64 = 1e-24;

/// Start offsets of the `2 * floor(n/s)` windows: first from the start of the
/// series, then from the end, so trailing samples are covered too.
pub fn window_starts(n: usize, scale: usize) -> Vec<usize> {
    if scale == 0 {
        return Vec::new();
    }
    let count = n / scale;
    let forward = (0..count).map(|v| v * scale);
    let backward = (0..count).map(|v| n - (v + 1) * scale);
    forward.chain(backward).collect()
}

/// Orthonormal polynomial basis (degree `0..=order`) on `len` equispaced points.
#[derive(Debug, Clone)]
pub struct DetrendBasis {
    rows: Vec<Vec<f64>>,
}

impl DetrendBasis {
    pub fn new(len: usize, order: usize) -> Self {
        let denom = (len.max(2) - 1) as f64;
        let t: Vec<f64> = (0..len).map(|i| (2.0 * i as f64 - denom) / denom).collect();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for degree in 0..=order {
            let mut v: Vec<f64> = t.iter().map(|&x| x.powi(degree as i32)).collect();
            // Two passes of modified Gram-Schmidt keep the basis orthogonal to
            // working precision.
            for _ in 0..2 {
                for q in &rows {
                    let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= dot * qi);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            rows.push(v);
        }
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of squared residuals after the least-squares polynomial fit.
    pub fn residual_energy(&self, window: &[f64]) -> f64 {
        debug_assert_eq!(window.len(), self.len());
        let coef: Vec<f64> = self
            .rows
            .iter()
            .map(|q| q.iter().zip(window).map(|(a, b)| a * b).sum())
            .collect();
        let mut energy = 0.0;
        let mut total = 0.0;
        for (i, &y) in window.iter().enumerate() {
            let fit: f64 = self.rows.iter().zip(&coef).map(|(q, c)| c * q[i]).sum();
            let r = y - fit;
            energy += r * r;
            total += y * y;
        }
        if energy <= ZERO_RELATIVE_ENERGY * total {
            0.0
        } else {
            energy
        }
    }
}

/// Variance `F²(s, v)` of each window around its degree-`order` trend.
pub fn local_fluctuations(profile: &Profile, scale: usize, order: usize) -> Result<Vec<f64>, MfdfaError> {
    let n = profile.len();
    if scale < 2 * (order + 2) {
        return Err(MfdfaError::ScaleTooSmallForOrder { scale, order });
    }
    if scale > n / 4 {
        return Err(MfdfaError::ScaleTooLarge { scale, max: n / 4 });
    }
    let basis = DetrendBasis::new(scale, order);
    Ok(window_starts(n, scale)
        .into_iter()
        .map(|start| basis.residual_energy(&profile.values[start..start + scale]) / scale as f64)
        .collect())
}
