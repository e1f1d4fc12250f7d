//! Sliding-window power-law features.
//!
//! Each window of a series is mean-centred, transformed with the DFT and its
//! amplitude spectrum is fitted in log-log space over the positive frequencies
//! `0 < f <= 1/2`:
//!
//! ```text
//! log A(f) = a - lambda * log f
//! ```
//!
//! The per-window `(a, lambda)` pairs form two new series that carry the
//! slowly varying spectral shape of the original signal.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{chi2_sf, solve_least_squares, AmplitudeTransform, Spectrum};

/// Smallest window that still leaves three positive frequencies to fit.
pub const MIN_WINDOW: usize = 8;
/// Floor for data-driven window selection.
pub const MIN_SELECTABLE_WINDOW: usize = 50;

pub const DEFAULT_WINDOW: usize = 50;
pub const DEFAULT_STRIDE: usize = 1;

const WINDOWS_PER_TASK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub length: usize,
    pub stride: usize,
}

impl Default for WindowPlan {
    fn default() -> Self {
        Self {
            length: DEFAULT_WINDOW,
            stride: DEFAULT_STRIDE,
        }
    }
}

impl WindowPlan {
    pub fn new(length: usize, stride: usize) -> Result<Self> {
        if length < MIN_WINDOW {
            return Err(Error::InvalidInput(format!(
                "window length {length} is below the minimum of {MIN_WINDOW}"
            )));
        }
        if stride == 0 || stride >= length {
            return Err(Error::InvalidInput(format!(
                "stride must satisfy 1 <= stride < window length, got stride {stride} for length {length}"
            )));
        }
        Ok(Self { length, stride })
    }

    /// `floor((L - l) / s) + 1`, or `None` when the series is shorter than a window.
    pub fn window_count(&self, series_len: usize) -> Option<usize> {
        (series_len >= self.length).then(|| (series_len - self.length) / self.stride + 1)
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.length, self.stride).map(|_| ())
    }
}

/// Log-log power-law fit of one amplitude spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFit {
    /// `a`, the log-amplitude intercept.
    pub intercept: f64,
    /// `lambda`, the negated log-log slope.
    pub exponent: f64,
    /// Wald p-value for a zero slope.
    pub slope_p_value: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSeries {
    pub a_series: Vec<f64>,
    pub lambda_series: Vec<f64>,
    pub plan: WindowPlan,
}

impl FeatureSeries {
    pub fn len(&self) -> usize {
        self.lambda_series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_series.is_empty()
    }
}

fn fit_points(log_freqs: &[f64], amps: &[f64]) -> Result<SpectralFit> {
    if amps.iter().all(|&a| a == 0.0) {
        return Err(Error::DegenerateSpectrum);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = log_freqs
        .iter()
        .zip(amps)
        .filter(|(_, &a)| a > 0.0)
        .map(|(&lf, &a)| (lf, a.ln()))
        .unzip();
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientSpectrum { usable: n });
    }

    let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
    let targets = DVector::from_vec(ys);
    let fit = solve_least_squares(&design, &targets)?;
    let slope = fit.coeffs[1];
    let var = fit.coeff_covariance[(1, 1)];

    let stat = slope * slope / var;
    let slope_p_value = if stat.is_finite() {
        chi2_sf(stat, 1)?
    } else if slope == 0.0 {
        1.0
    } else {
        0.0
    };

    let mean = targets.mean();
    let tss: f64 = targets.iter().map(|y| (y - mean).powi(2)).sum();
    let r_squared = if tss > 0.0 {
        (1.0 - fit.rss / tss).clamp(0.0, 1.0)
    } else {
        1.0
    };

    Ok(SpectralFit {
        intercept: fit.coeffs[0],
        exponent: -slope,
        slope_p_value,
        r_squared,
    })
}

/// Fits `log A(f) = a - lambda log f` over the points with `0 < f <= 1/2`
/// and strictly positive amplitude.
pub fn fit_power_law(spectrum: &Spectrum) -> Result<SpectralFit> {
    let (log_freqs, amps): (Vec<f64>, Vec<f64>) = spectrum
        .freqs
        .iter()
        .zip(&spectrum.amps)
        .filter(|(&f, _)| f > 0.0 && f <= 0.5)
        .map(|(&f, &a)| (f.ln(), a))
        .unzip();
    if amps.is_empty() {
        return Err(Error::InsufficientSpectrum { usable: 0 });
    }
    fit_points(&log_freqs, &amps)
}

fn check_series(series: &[f64], plan: &WindowPlan) -> Result<usize> {
    plan.validate()?;
    let count = plan.window_count(series.len()).ok_or(Error::SeriesTooShort {
        len: series.len(),
        required: plan.length,
    })?;
    if let Some(index) = series.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(count)
}

/// Spectral fit of every window, in window order.
pub fn window_fits(series: &[f64], plan: &WindowPlan) -> Result<Vec<SpectralFit>> {
    let count = check_series(series, plan)?;
    let l = plan.length;
    let half = l / 2;
    let log_freqs: Vec<f64> = (1..=half).map(|k| (k as f64 / l as f64).ln()).collect();

    let starts: Vec<usize> = (0..count).collect();
    let chunks: Vec<Result<Vec<SpectralFit>>> = starts
        .par_chunks(WINDOWS_PER_TASK)
        .map(|chunk| {
            let mut transform = AmplitudeTransform::new(l);
            let mut amps = Vec::with_capacity(l);
            chunk
                .iter()
                .map(|&k| {
                    let window = &series[k * plan.stride..k * plan.stride + l];
                    let mean = window.iter().sum::<f64>() / l as f64;
                    transform.amplitudes_into(window, mean, &mut amps);
                    fit_points(&log_freqs, &amps[1..=half]).map_err(|e| e.in_window(k))
                })
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(count);
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}

/// Builds the `(a, lambda)` feature series of `series` under `plan`.
pub fn extract_features(series: &[f64], plan: &WindowPlan) -> Result<FeatureSeries> {
    let fits = window_fits(series, plan)?;
    Ok(FeatureSeries {
        a_series: fits.iter().map(|f| f.intercept).collect(),
        lambda_series: fits.iter().map(|f| f.exponent).collect(),
        plan: *plan,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSelection {
    pub length: usize,
    /// False when no candidate reached the significance level and the
    /// largest candidate was returned as a fallback.
    pub significant: bool,
    /// Median slope p-value for every candidate that was evaluated.
    pub median_p_values: Vec<(usize, f64)>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Picks the shortest candidate window whose median slope p-value (stride 1)
/// is at most `alpha`.
pub fn select_window_length(series: &[f64], candidates: &[usize], alpha: f64) -> Result<WindowSelection> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate window lengths".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("candidate lengths must be strictly ascending".into()));
    }
    for &l in candidates {
        if l < MIN_SELECTABLE_WINDOW {
            return Err(Error::InvalidInput(format!(
                "candidate window {l} is below the floor of {MIN_SELECTABLE_WINDOW}"
            )));
        }
        if l > series.len() {
            return Err(Error::InvalidInput(format!(
                "candidate window {l} exceeds series length {}",
                series.len()
            )));
        }
    }

    let mut evaluated = Vec::with_capacity(candidates.len());
    for &l in candidates {
        let plan = WindowPlan::new(l, 1)?;
        let mut p: Vec<f64> = window_fits(series, &plan)?
            .iter()
            .map(|f| f.slope_p_value)
            .collect();
        let med = median(&mut p);
        evaluated.push((l, med));
        if med <= alpha {
            return Ok(WindowSelection {
                length: l,
                significant: true,
                median_p_values: evaluated,
            });
        }
    }
    Ok(WindowSelection {
        length: *candidates.last().unwrap(),
        significant: false,
        median_p_values: evaluated,
    })
}
