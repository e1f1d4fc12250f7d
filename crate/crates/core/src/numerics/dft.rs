use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitude spectrum of a real window: `amps[k] = |phi(k)|` at `freqs[k] = k / l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub amps: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from explicit frequency/amplitude pairs.
    pub fn new(freqs: Vec<f64>, amps: Vec<f64>) -> Result<Self> {
        if freqs.len() != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: freqs.len(),
                found: amps.len(),
            });
        }
        for (i, (&f, &a)) in freqs.iter().zip(&amps).enumerate() {
            if !f.is_finite() || !a.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if a < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "negative amplitude {a} at index {i}"
                )));
            }
        }
        Ok(Self { freqs, amps })
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }
}

/// Reusable forward transform for windows of one fixed length.
///
/// Holds the FFT plan and scratch buffers so that sliding-window extraction
/// does not re-plan or re-allocate per window.
pub struct AmplitudeTransform {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl AmplitudeTransform {
    pub fn new(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            len,
            fft,
            buffer: vec![Complex::default(); len],
            scratch,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Writes `|phi(k)|` for `k = 0..l` into `out`, after subtracting `offset`
    /// from every sample.
    pub(crate) fn amplitudes_into(&mut self, window: &[f64], offset: f64, out: &mut Vec<f64>) {
        debug_assert_eq!(window.len(), self.len);
        for (slot, &x) in self.buffer.iter_mut().zip(window) {
            *slot = Complex::new(x - offset, 0.0);
        }
        self.fft
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        out.clear();
        out.extend(self.buffer.iter().map(|c| c.norm()));
    }

    pub fn amplitudes(&mut self, window: &[f64]) -> Result<Spectrum> {
        if window.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: window.len(),
            });
        }
        check_window(window)?;
        let mut amps = Vec::with_capacity(self.len);
        self.amplitudes_into(window, 0.0, &mut amps);
        Ok(Spectrum {
            freqs: frequencies(self.len),
            amps,
        })
    }
}

pub(crate) fn frequencies(len: usize) -> Vec<f64> {
    (0..len).map(|k| k as f64 / len as f64).collect()
}

pub(crate) fn check_window(window: &[f64]) -> Result<()> {
    if window.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "window length {} is below 2",
            window.len()
        )));
    }
    match window.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Amplitudes of the unnormalised DFT `phi(k) = sum_t x(t) exp(-i 2 pi k t / l)`.
pub fn dft_amplitudes(window: &[f64]) -> Result<Spectrum> {
    check_window(window)?;
    AmplitudeTransform::new(window.len()).amplitudes(window)
}
