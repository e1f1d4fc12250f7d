//! Numerical kernels shared by the spectral fit and the Granger tests.

mod chi2;
mod dft;
mod ols;

pub use chi2::{chi2_sf, ln_gamma, regularized_gamma_q};
pub use dft::{dft_amplitudes, AmplitudeTransform, Spectrum};
pub use ols::{solve_least_squares, LeastSquaresFit, RANK_TOLERANCE};
