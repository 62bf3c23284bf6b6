//! Seeded generators with analytically known scaling, used as ground truth for
//! the MFDFA estimator.
//!
//! Every generator draws from `ChaCha20Rng::seed_from_u64(seed)` (rand_chacha
//! 0.9) with Gaussian variates from `rand_distr::StandardNormal` (ziggurat).
//! Both are platform independent, so a `(parameters, seed)` pair names one
//! exact series.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::signal_io::TimeSeries;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "circulant embedding has a negative eigenvalue ({min_eigenvalue:.3e}); \
         retry with a larger power-of-two length or a Hurst exponent further from the bounds"
    )]
    EmbeddingFailure { min_eigenvalue: f64 },
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// `n` i.i.d. standard Gaussian samples.
pub fn white_noise(n: usize, seed: u64) -> Result<TimeSeries, SynthError> {
    if n < 2 {
        return Err(SynthError::InvalidParameter(format!(
            "white noise length must be >= 2, got {n}"
        )));
    }
    let mut rng = rng(seed);
    let samples = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    Ok(TimeSeries::new(samples).labeled(format!("white(n={n},seed={seed})")))
}

/// Autocovariance of unit-variance fractional Gaussian noise at integer lag `k`.
pub fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let k = k as f64;
    let two_h = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Fractional Gaussian noise by circulant embedding (Davies-Harte).
///
/// The first row of the `2n` circulant is `γ(0..=n)` followed by `γ(n-1..=1)`.
/// Its eigenvalues come from one FFT; weighting complex Gaussians by
/// `sqrt(λ/2n)` and transforming back gives a vector whose real part has
/// exactly the fGn covariance.
pub fn fgn(n: usize, hurst: f64, seed: u64) -> Result<TimeSeries, SynthError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(SynthError::InvalidParameter(format!(
            "fgn length must be a power of two >= 2, got {n}"
        )));
    }
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(SynthError::InvalidParameter(format!(
            "Hurst exponent must lie in (0, 1), got {hurst}"
        )));
    }
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex::new(fgn_autocovariance(lag, hurst), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let scale = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let min_eigenvalue = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -1e-10 * scale {
        return Err(SynthError::EmbeddingFailure { min_eigenvalue });
    }

    let mut rng = rng(seed);
    let mut w: Vec<Complex<f64>> = row
        .iter()
        .map(|lambda| {
            let amp = (lambda.re.max(0.0) / m as f64).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(amp * re, amp * im)
        })
        .collect();
    fft.process(&mut w);
    let samples = w[..n].iter().map(|c| c.re).collect();
    Ok(TimeSeries::new(samples).labeled(format!("fgn(n={n},H={hurst},seed={seed})")))
}

/// Parameters of the deterministic binomial multiplicative cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeParams {
    levels: u32,
    weight: f64,
}

impl CascadeParams {
    pub const MAX_LEVELS: u32 = 24;

    pub fn new(levels: u32, weight: f64) -> Result<Self, SynthError> {
        if !(1..=Self::MAX_LEVELS).contains(&levels) {
            return Err(SynthError::InvalidParameter(format!(
                "cascade levels must be in 1..={}, got {levels}",
                Self::MAX_LEVELS
            )));
        }
        if !(weight > 0.5 && weight < 1.0) {
            return Err(SynthError::InvalidParameter(format!(
                "cascade weight must lie in (0.5, 1), got {weight}"
            )));
        }
        Ok(Self { levels, weight })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// Splits each cell `x` into `(x*a, x*(1-a))` for `k` levels, starting from `[1]`.
pub fn binomial_cascade(params: CascadeParams) -> TimeSeries {
    let a = params.weight;
    let b = 1.0 - a;
    let mut cells = vec![1.0];
    for _ in 0..params.levels {
        cells = cells.iter().flat_map(|&x| [x * a, x * b]).collect();
    }
    TimeSeries::new(cells).labeled(format!("cascade(k={},a={a})", params.levels))
}

/// Exact generalized Hurst exponent of the binomial cascade,
/// `h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2)`.
///
/// At `q = 0` the limit `-(ln a + ln(1-a)) / (2 ln 2)` is returned; near zero
/// the quotient is evaluated through its series to avoid cancellation.
pub fn analytic_cascade_hurst(q: f64, a: f64) -> f64 {
    let b = 1.0 - a;
    let (la, lb) = (a.ln(), b.ln());
    let ln2 = std::f64::consts::LN_2;
    if q.abs() < 1e-6 {
        // ln(a^q + b^q) = ln 2 + q m1 + q^2 v / 2 + O(q^3) with m1 the mean
        // and v the variance of {ln a, ln b}.
        let m1 = 0.5 * (la + lb);
        let var = 0.25 * (la - lb).powi(2);
        return -(m1 + 0.5 * q * var) / ln2;
    }
    1.0 / q - (a.powf(q) + b.powf(q)).ln() / (q * ln2)
}

/// Uniform random permutation (Fisher-Yates) of the samples.
pub fn shuffle(ts: &TimeSeries, seed: u64) -> TimeSeries {
    let mut samples = ts.samples.clone();
    samples.shuffle(&mut rng(seed));
    TimeSeries {
        samples,
        sample_rate: ts.sample_rate,
        label: ts.label.as_ref().map(|l| format!("shuffle({l},seed={seed})")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn white_noise_is_deterministic() {
        assert_eq!(white_noise(4, 7).unwrap(), white_noise(4, 7).unwrap());
        assert_ne!(white_noise(4, 7).unwrap(), white_noise(4, 8).unwrap());
    }

    #[test]
    fn white_noise_moments() {
        let ts = white_noise(65_536, 1).unwrap();
        let (mean, var) = mean_var(&ts.samples);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn white_noise_rejects_short() {
        assert!(matches!(white_noise(1, 0), Err(SynthError::InvalidParameter(_))));
    }

    #[test]
    fn fgn_half_is_uncorrelated() {
        let ts = fgn(65_536, 0.5, 11).unwrap();
        let (mean, var) = mean_var(&ts.samples);
        let lag1 = ts
            .samples
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>()
            / (ts.len() as f64 - 1.0)
            / var;
        assert!(lag1.abs() < 0.02, "lag-1 autocorrelation {lag1}");
    }

    #[test]
    fn fgn_autocovariance_matches_theory() {
        let n = 1 << 16;
        for &h in &[0.3, 0.8] {
            let mut acc = [0.0; 6];
            for seed in 0..10 {
                let x = fgn(n, h, seed).unwrap().samples;
                for (lag, slot) in acc.iter_mut().enumerate() {
                    let c = x.iter().zip(&x[lag..]).map(|(a, b)| a * b).sum::<f64>() / (n - lag) as f64;
                    *slot += c / 10.0;
                }
            }
            for (lag, got) in acc.iter().enumerate() {
                let want = fgn_autocovariance(lag, h);
                assert!((got - want).abs() < 0.05, "H={h} lag={lag}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn fgn_validation() {
        assert!(fgn(1000, 0.5, 0).is_err());
        assert!(fgn(1024, 1.0, 0).is_err());
        assert!(fgn(1024, 0.0, 0).is_err());
        assert_eq!(fgn(256, 0.7, 3).unwrap(), fgn(256, 0.7, 3).unwrap());
    }

    #[test]
    fn cascade_small_levels() {
        let p1 = CascadeParams::new(1, 0.75).unwrap();
        assert_eq!(binomial_cascade(p1).samples, vec![0.75, 0.25]);
        let p2 = CascadeParams::new(2, 0.75).unwrap();
        assert_eq!(binomial_cascade(p2).samples, vec![0.5625, 0.1875, 0.1875, 0.0625]);
    }

    #[test]
    fn cascade_conserves_measure() {
        for k in [1, 5, 12, 16] {
            let x = binomial_cascade(CascadeParams::new(k, 0.7).unwrap()).samples;
            assert_eq!(x.len(), 1 << k);
            assert!(x.iter().all(|&v| v > 0.0));
            assert_relative_eq!(x.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn cascade_param_validation() {
        assert!(CascadeParams::new(0, 0.75).is_err());
        assert!(CascadeParams::new(25, 0.75).is_err());
        assert!(CascadeParams::new(4, 0.5).is_err());
        assert!(CascadeParams::new(4, 1.0).is_err());
    }

    #[test]
    fn analytic_hurst_values() {
        // 0.5 - ln(0.625) / (2 ln 2), evaluated independently.
        let want = 0.5 - (0.625f64).ln() / (2.0 * std::f64::consts::LN_2);
        assert_relative_eq!(analytic_cascade_hurst(2.0, 0.75), want, epsilon = 1e-14);
        assert!((analytic_cascade_hurst(2.0, 0.75) - 0.839).abs() < 1e-3);
        // a = 1/2 is the uniform measure, whose integrated profile is a straight line.
        assert!((analytic_cascade_hurst(2.0, 0.5 + 1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn analytic_hurst_is_continuous_at_zero() {
        let at_zero = analytic_cascade_hurst(0.0, 0.75);
        let limit = -((0.75f64).ln() + (0.25f64).ln()) / (2.0 * std::f64::consts::LN_2);
        assert_relative_eq!(at_zero, limit, epsilon = 1e-14);
        for q in [1e-3, -1e-3, 2e-6, -2e-6] {
            assert!((analytic_cascade_hurst(q, 0.75) - at_zero).abs() < 1e-3);
        }
    }

    #[test]
    fn analytic_hurst_decreasing() {
        let grid: Vec<f64> = (0..=40).map(|i| -5.0 + 0.25 * i as f64).collect();
        for w in grid.windows(2) {
            assert!(analytic_cascade_hurst(w[1], 0.75) < analytic_cascade_hurst(w[0], 0.75));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let ts = white_noise(1000, 5).unwrap();
        let s = shuffle(&ts, 9);
        assert_eq!(s, shuffle(&ts, 9));
        assert_ne!(s.samples, ts.samples);
        let mut a = ts.samples.clone();
        let mut b = s.samples.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }
}
