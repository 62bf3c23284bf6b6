use super::config::MIN_SCALES;
use super::MfdfaError;

/// Cumulative sum of the mean-subtracted signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub values: Vec<f64>,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Y(i) = sum_{k<=i} (x_k - mean(x))`.
pub fn profile(samples: &[f64]) -> Result<Profile, MfdfaError> {
    if samples.len() < 2 {
        return Err(MfdfaError::SignalTooShort {
            len: samples.len(),
            required: 2,
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(MfdfaError::NonFiniteInput);
    }
    let first = samples[0];
    if samples.iter().all(|&x| x == first) {
        return Err(MfdfaError::DegenerateSignal);
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mut acc = 0.0;
    let values = samples
        .iter()
        .map(|&x| {
            acc += x - mean;
            acc
        })
        .collect();
    Ok(Profile { values })
}

/// Bound on `|Y(N)|` implied by floating-point accumulation.
pub fn terminal_tolerance(samples: &[f64]) -> f64 {
    let peak = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-9 * samples.len() as f64 * peak
}

/// `n_scales` log-spaced integer scales in `[scale_min, scale_max]`, rounded
/// and deduplicated.
///
/// Fails with `EmptyGrid` when rounding leaves fewer than
/// `min(n_scales, 8)` distinct scales.
pub fn scale_grid(scale_min: usize, scale_max: usize, n_scales: usize) -> Result<Vec<usize>, MfdfaError> {
    let empty = |got| MfdfaError::EmptyGrid {
        scale_min,
        scale_max,
        requested: n_scales,
        got,
    };
    if scale_min == 0 || scale_max < scale_min || n_scales == 0 {
        return Err(empty(0));
    }
    if n_scales == 1 {
        return Ok(vec![scale_min]);
    }
    let (lo, hi) = ((scale_min as f64).ln(), (scale_max as f64).ln());
    let step = (hi - lo) / (n_scales - 1) as f64;
    let mut grid: Vec<usize> = (0..n_scales)
        .map(|i| {
            let s = (lo + step * i as f64).exp().round() as usize;
            s.clamp(scale_min, scale_max)
        })
        .collect();
    grid.dedup();
    if grid.len() < n_scales.min(MIN_SCALES) {
        return Err(empty(grid.len()));
    }
    Ok(grid)
}
