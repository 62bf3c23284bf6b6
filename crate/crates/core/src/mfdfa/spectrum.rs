//! Singularity spectrum `f(alpha)` and its quadratic width.

use serde::{Deserialize, Serialize};

use super::linalg::least_squares;
use super::scaling::HurstSpectrum;
use super::MfdfaError;

/// Coefficients of `f(alpha) = A (alpha - alpha0)^2 + B (alpha - alpha0) + C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub coeffs: QuadraticCoeffs,
    pub alpha0: f64,
    /// Larger and smaller zero of the fitted parabola.
    pub alpha1: f64,
    pub alpha2: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthStatus {
    Valid,
    NonConcave,
    ComplexRoots,
    /// Too few distinct positive points, or a flat spectrum.
    Degenerate,
}

impl WidthStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            WidthStatus::Valid => "valid",
            WidthStatus::NonConcave => "non_concave",
            WidthStatus::ComplexRoots => "complex_roots",
            WidthStatus::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularitySpectrum {
    pub q_values: Vec<f64>,
    pub alpha: Vec<f64>,
    pub f_alpha: Vec<f64>,
    pub alpha0: f64,
    pub width_direct: f64,
    /// Present whenever the least-squares solve succeeded, even if the
    /// parabola turned out unusable.
    pub fit_coeffs: Option<QuadraticCoeffs>,
    pub width_w: Option<f64>,
    pub width_status: WidthStatus,
}

impl SingularitySpectrum {
    pub fn asymmetry_b(&self) -> Option<f64> {
        self.fit_coeffs.map(|c| c.b)
    }

    pub fn max_f(&self) -> f64 {
        self.f_alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,alpha,f_alpha\n");
        for i in 0..self.q_values.len() {
            out.push_str(&format!("{},{},{}\n", self.q_values[i], self.alpha[i], self.f_alpha[i]));
        }
        out
    }
}

/// First derivative of `y` sampled on the (possibly non-uniform) grid `x`:
/// central differences inside, one-sided at the ends.
pub fn finite_difference(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (lo, hi) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (y[hi] - y[lo]) / (x[hi] - x[lo])
        })
        .collect()
}

/// Index of the largest `f`; ties go to the smallest alpha.
fn peak_index(alpha: &[f64], f: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..f.len() {
        if f[i] > f[best] || (f[i] == f[best] && alpha[i] < alpha[best]) {
            best = i;
        }
    }
    best
}

/// Least-squares parabola through the points with `f > 0`, centred on the
/// alpha of the spectrum maximum, and the distance between its zeros.
pub fn spectrum_width(alpha: &[f64], f_alpha: &[f64]) -> Result<QuadraticFit, MfdfaError> {
    if alpha.len() != f_alpha.len() || alpha.is_empty() {
        return Err(MfdfaError::DegenerateSpectrum("mismatched or empty spectrum".into()));
    }
    let alpha0 = alpha[peak_index(alpha, f_alpha)];
    let (u, f): (Vec<f64>, Vec<f64>) = alpha
        .iter()
        .zip(f_alpha)
        .filter(|(_, &f)| f > 0.0)
        .map(|(&a, &f)| (a - alpha0, f))
        .unzip();

    let mut distinct = u.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(MfdfaError::DegenerateSpectrum(format!(
            "{} distinct alpha values with f > 0, need 3",
            distinct.len()
        )));
    }
    if f.iter().all(|&v| v == f[0]) {
        return Err(MfdfaError::DegenerateSpectrum("f(alpha) is constant".into()));
    }

    let columns = vec![u.iter().map(|v| v * v).collect(), u.clone(), vec![1.0; u.len()]];
    let c = least_squares(&columns, &f)
        .ok_or_else(|| MfdfaError::DegenerateSpectrum("rank-deficient quadratic fit".into()))?;
    let coeffs = QuadraticCoeffs {
        a: c[0],
        b: c[1],
        c: c[2],
    };
    if coeffs.a >= 0.0 {
        return Err(MfdfaError::NonConcaveSpectrum(coeffs));
    }
    let disc = coeffs.b * coeffs.b - 4.0 * coeffs.a * coeffs.c;
    if disc < 0.0 {
        return Err(MfdfaError::ComplexRoots(coeffs));
    }
    let root = disc.sqrt();
    // A < 0, so (-B - root) / 2A is the larger zero.
    let alpha1 = alpha0 + (-coeffs.b - root) / (2.0 * coeffs.a);
    let alpha2 = alpha0 + (-coeffs.b + root) / (2.0 * coeffs.a);
    Ok(QuadraticFit {
        coeffs,
        alpha0,
        alpha1,
        alpha2,
        width: root / -coeffs.a,
    })
}

/// Legendre transform of `h(q)`: `alpha = h + q h'`, `f = q (alpha - h) + 1`.
pub fn singularity_spectrum(hs: &HurstSpectrum) -> Result<SingularitySpectrum, MfdfaError> {
    let q = &hs.q_values;
    if q.len() < 3 || hs.h.len() != q.len() {
        return Err(MfdfaError::TooFewQ(q.len()));
    }
    let dh = finite_difference(q, &hs.h);
    let alpha: Vec<f64> = (0..q.len()).map(|i| hs.h[i] + q[i] * dh[i]).collect();
    let f_alpha: Vec<f64> = (0..q.len()).map(|i| q[i] * (alpha[i] - hs.h[i]) + 1.0).collect();
    let alpha0 = alpha[peak_index(&alpha, &f_alpha)];
    let lo = alpha.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let (fit_coeffs, width_w, width_status) = match spectrum_width(&alpha, &f_alpha) {
        Ok(fit) => (Some(fit.coeffs), Some(fit.width), WidthStatus::Valid),
        Err(MfdfaError::NonConcaveSpectrum(c)) => (Some(c), None, WidthStatus::NonConcave),
        Err(MfdfaError::ComplexRoots(c)) => (Some(c), None, WidthStatus::ComplexRoots),
        Err(MfdfaError::DegenerateSpectrum(_)) => (None, None, WidthStatus::Degenerate),
        Err(e) => return Err(e),
    };
    Ok(SingularitySpectrum {
        q_values: q.clone(),
        alpha,
        f_alpha,
        alpha0,
        width_direct: hi - lo,
        fit_coeffs,
        width_w,
        width_status,
    })
}
