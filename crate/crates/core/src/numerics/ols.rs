use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Designs whose column-normalised condition ratio (smallest singular value
/// over largest) falls below this are rejected as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LeastSquaresFit {
    pub coeffs: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    /// `RSS / (n - p)`.
    pub residual_variance: f64,
    /// `residual_variance * (X^T X)^{-1}`.
    pub coeff_covariance: DMatrix<f64>,
    pub n_obs: usize,
    pub n_params: usize,
}

impl LeastSquaresFit {
    pub fn fitted(&self, design: &DMatrix<f64>) -> DVector<f64> {
        design * &self.coeffs
    }

    pub fn std_error(&self, index: usize) -> f64 {
        self.coeff_covariance[(index, index)].max(0.0).sqrt()
    }
}

/// Ordinary least squares through a Householder QR of the column-scaled design.
///
/// Columns are scaled to unit norm before factorisation so the rank test does
/// not depend on the units of individual regressors.
pub fn solve_least_squares(design: &DMatrix<f64>, targets: &DVector<f64>) -> Result<LeastSquaresFit> {
    let (n, p) = design.shape();
    if targets.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: targets.len(),
        });
    }
    if p == 0 || n <= p {
        return Err(Error::Underdetermined {
            n_obs: n,
            n_params: p,
        });
    }
    if let Some(index) = design.iter().chain(targets.iter()).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }

    let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    if norms.contains(&0.0) {
        return Err(Error::DegenerateDesign { ratio: 0.0 });
    }
    let mut scaled = design.clone();
    for (mut col, &norm) in scaled.column_iter_mut().zip(&norms) {
        col /= norm;
    }

    let qr = scaled.qr();
    let r = qr.r();
    let sv = r.singular_values();
    let max = sv.max();
    let min = sv.min();
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if !(ratio >= RANK_TOLERANCE) {
        return Err(Error::DegenerateDesign { ratio });
    }

    let mut qty = targets.clone();
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, p).into_owned();
    let scaled_coeffs = r
        .solve_upper_triangular(&head)
        .ok_or(Error::DegenerateDesign { ratio })?;
    let coeffs = DVector::from_iterator(
        p,
        scaled_coeffs.iter().zip(&norms).map(|(b, s)| b / s),
    );

    let residuals = targets - design * &coeffs;
    let rss = residuals.norm_squared();
    let residual_variance = rss / (n - p) as f64;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(Error::DegenerateDesign { ratio })?;
    let mut cov = &r_inv * r_inv.transpose();
    for i in 0..p {
        for j in 0..p {
            cov[(i, j)] *= residual_variance / (norms[i] * norms[j]);
        }
    }
    // Force exact symmetry; the product above is symmetric only up to rounding.
    for i in 0..p {
        for j in (i + 1)..p {
            let m = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = m;
            cov[(j, i)] = m;
        }
    }

    Ok(LeastSquaresFit {
        coeffs,
        residuals,
        rss,
        residual_variance,
        coeff_covariance: cov,
        n_obs: n,
        n_params: p,
    })
}
