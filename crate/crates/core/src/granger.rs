//! Granger causality through a single-equation VAR fit and a joint Wald test
//! on the lag coefficients of the causing block.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{chi2_sf, solve_least_squares};

pub const DEFAULT_MAX_LAG: usize = 10;

/// One directed hypothesis over a block of aligned series, addressed by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSpec {
    pub max_lag: usize,
    pub caused: usize,
    pub causing: Vec<usize>,
    /// Lagged regressors present in the model but not restricted by the test.
    pub covariates: Vec<usize>,
}

impl VarSpec {
    pub fn new(max_lag: usize, caused: usize, causing: Vec<usize>, covariates: Vec<usize>) -> Result<Self> {
        let spec = Self {
            max_lag,
            caused,
            causing,
            covariates,
        };
        spec.validate(None)?;
        Ok(spec)
    }

    pub fn pairwise(max_lag: usize, caused: usize, causing: usize) -> Result<Self> {
        Self::new(max_lag, caused, vec![causing], Vec::new())
    }

    /// Number of regression coefficients, intercept included.
    pub fn n_params(&self) -> usize {
        1 + self.max_lag * (1 + self.causing.len() + self.covariates.len())
    }

    /// Number of restrictions tested.
    pub fn df(&self) -> usize {
        self.max_lag * self.causing.len()
    }

    fn validate(&self, n_series: Option<usize>) -> Result<()> {
        if self.max_lag == 0 {
            return Err(Error::InvalidInput("max_lag must be at least 1".into()));
        }
        if self.causing.is_empty() {
            return Err(Error::InvalidInput("causing block is empty".into()));
        }
        let mut ids: Vec<usize> = std::iter::once(self.caused)
            .chain(self.causing.iter().copied())
            .chain(self.covariates.iter().copied())
            .collect();
        if let Some(n) = n_series {
            if let Some(&bad) = ids.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidInput(format!(
                    "series index {bad} out of range for a block of {n}"
                )));
            }
        }
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(
                "caused, causing and covariate series must be distinct".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaldResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub n_effective: usize,
}

/// Lagged regression design for `spec`.
///
/// Rows are times `T..L'`; columns are the intercept, then lags `1..=T` of the
/// caused series, of each causing series and of each covariate, in that order.
pub fn build_lagged_design(block: &[&[f64]], spec: &VarSpec) -> Result<(DMatrix<f64>, DVector<f64>)> {
    spec.validate(Some(block.len()))?;
    let len = block[spec.caused].len();
    for &i in spec.causing.iter().chain(&spec.covariates) {
        if block[i].len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: block[i].len(),
            });
        }
    }
    let lag = spec.max_lag;
    if len <= lag {
        return Err(Error::InsufficientSamples {
            len,
            required: lag + 1,
        });
    }

    let rows = len - lag;
    let order: Vec<usize> = std::iter::once(spec.caused)
        .chain(spec.causing.iter().copied())
        .chain(spec.covariates.iter().copied())
        .collect();
    let mut design = DMatrix::zeros(rows, spec.n_params());
    design.column_mut(0).fill(1.0);
    let mut col = 1;
    for &series in &order {
        let data = block[series];
        for tau in 1..=lag {
            let mut column = design.column_mut(col);
            for r in 0..rows {
                column[r] = data[lag + r - tau];
            }
            col += 1;
        }
    }
    let target = DVector::from_column_slice(&block[spec.caused][lag..]);
    Ok((design, target))
}

/// Wald test of `H0: every lag coefficient of the causing block is zero`,
/// using the coefficient covariance of the unrestricted OLS fit.
pub fn wald_granger_test(spec: &VarSpec, block: &[&[f64]]) -> Result<WaldResult> {
    spec.validate(Some(block.len()))?;
    let len = block[spec.caused].len();
    let required = spec.max_lag + spec.n_params() + 1;
    if len < required {
        return Err(Error::InsufficientSamples { len, required });
    }
    let (design, target) = build_lagged_design(block, spec)?;
    let fit = solve_least_squares(&design, &target)?;

    let start = 1 + spec.max_lag;
    let q = spec.df();
    let beta = fit.coeffs.rows(start, q).into_owned();
    let restricted_cov = fit.coeff_covariance.view((start, start), (q, q)).into_owned();
    let chol = restricted_cov.cholesky().ok_or(Error::SingularRestriction)?;
    let whitened = chol
        .l()
        .solve_lower_triangular(&beta)
        .ok_or(Error::SingularRestriction)?;
    let statistic = whitened.norm_squared();
    if !statistic.is_finite() {
        return Err(Error::SingularRestriction);
    }

    Ok(WaldResult {
        statistic,
        df: q,
        p_value: chi2_sf(statistic, q as u32)?,
        n_effective: fit.n_obs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn white(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..len).map(|_| StandardNormal.sample(rng)).collect()
    }

    fn lagged_pair(seed: u64, len: usize, coef: f64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = white(len, &mut rng);
        let e = white(len, &mut rng);
        let y = (0..len)
            .map(|t| if t == 0 { e[0] } else { coef * x[t - 1] + 0.1 * e[t] })
            .collect();
        (x, y)
    }

    #[test]
    fn single_lag_design_layout() {
        let caused = [1.0, 2.0, 3.0, 4.0];
        let causing = [10.0, 20.0, 30.0, 40.0];
        let spec = VarSpec::pairwise(1, 0, 1).unwrap();
        let (x, y) = build_lagged_design(&[&caused, &causing], &spec).unwrap();
        assert_eq!(x.shape(), (3, 3));
        assert_eq!(x.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0, 10.0]);
        assert_eq!(y[0], 2.0);
        assert_eq!(y.as_slice(), &[2.0, 3.0, 4.0]);
    }

    #[test]
    fn two_lag_design_shape() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [5.0, 4.0, 3.0, 2.0, 1.0];
        let spec = VarSpec::pairwise(2, 0, 1).unwrap();
        let (x, _) = build_lagged_design(&[&a, &b], &spec).unwrap();
        assert_eq!(x.shape(), (3, 5));
        // Row at t = 2: intercept, a(1), a(0), b(1), b(0).
        assert_eq!(x.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 2.0, 1.0, 4.0, 5.0]);
    }

    #[test]
    fn design_independent_of_storage_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let series: Vec<Vec<f64>> = (0..4).map(|_| white(30, &mut rng)).collect();
        let spec = VarSpec::new(3, 2, vec![0, 3], vec![1]).unwrap();
        let block: Vec<&[f64]> = series.iter().map(Vec::as_slice).collect();
        let reference = build_lagged_design(&block, &spec).unwrap();

        let perm = [3usize, 1, 0, 2];
        let permuted: Vec<&[f64]> = perm.iter().map(|&i| series[i].as_slice()).collect();
        let pos = |orig: usize| perm.iter().position(|&p| p == orig).unwrap();
        let remapped = VarSpec::new(3, pos(2), vec![pos(0), pos(3)], vec![pos(1)]).unwrap();
        assert_eq!(build_lagged_design(&permuted, &remapped).unwrap(), reference);
    }

    #[test]
    fn invalid_specs() {
        assert!(VarSpec::pairwise(0, 0, 1).is_err());
        assert!(VarSpec::pairwise(1, 0, 0).is_err());
        assert!(VarSpec::new(1, 0, vec![], vec![]).is_err());
        assert!(VarSpec::new(1, 0, vec![1], vec![1]).is_err());
        let spec = VarSpec::pairwise(1, 0, 5).unwrap();
        assert!(build_lagged_design(&[&[1.0, 2.0], &[1.0, 2.0]], &spec).is_err());
    }

    #[test]
    fn short_series_reports_minimum() {
        let a = vec![0.0; 16];
        let spec = VarSpec::pairwise(5, 0, 1).unwrap();
        match wald_granger_test(&spec, &[&a, &a]) {
            Err(Error::InsufficientSamples { len: 16, required }) => assert_eq!(required, 5 + 11 + 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn detects_lagged_driver() {
        let (x, y) = lagged_pair(17, 500, 0.8);
        let spec = VarSpec::pairwise(5, 1, 0).unwrap();
        let res = wald_granger_test(&spec, &[&x, &y]).unwrap();
        assert!(res.p_value < 1e-3);
        assert_eq!(res.df, 5);
        assert_eq!(res.n_effective, 495);
        assert_eq!(res.p_value, chi2_sf(res.statistic, 5).unwrap());
    }

    #[test]
    fn null_rejection_rate_is_near_alpha() {
        let trials = 400;
        let rejections = (0..trials)
            .filter(|&seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
                let x = white(500, &mut rng);
                let y = white(500, &mut rng);
                let spec = VarSpec::pairwise(5, 1, 0).unwrap();
                wald_granger_test(&spec, &[&x, &y]).unwrap().p_value < 0.05
            })
            .count();
        let rate = rejections as f64 / trials as f64;
        let band = 3.0 * (0.05f64 * 0.95 / trials as f64).sqrt();
        assert!((rate - 0.05).abs() < band, "rate {rate}");
    }

    #[test]
    fn deterministic_target_never_yields_false_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = white(200, &mut rng);
        let y = vec![2.5; 200];
        let spec = VarSpec::pairwise(3, 1, 0).unwrap();
        match wald_granger_test(&spec, &[&x, &y]) {
            Err(Error::DegenerateDesign { .. }) | Err(Error::SingularRestriction) => {}
            Ok(r) => assert!(r.p_value > 0.05),
            Err(other) => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicated_series_is_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = white(200, &mut rng);
        let spec = VarSpec::pairwise(3, 1, 0).unwrap();
        assert!(matches!(
            wald_granger_test(&spec, &[&x, &x]),
            Err(Error::DegenerateDesign { .. })
        ));
    }

    #[test]
    fn covariates_are_not_restricted() {
        let (x, y) = lagged_pair(8, 400, 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let z = white(400, &mut rng);
        // x drives y, but x is only a covariate here; the test is on z.
        let spec = VarSpec::new(2, 1, vec![2], vec![0]).unwrap();
        let res = wald_granger_test(&spec, &[&x, &y, &z]).unwrap();
        assert_eq!(res.df, 2);
        assert!(res.p_value > 0.01);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn statistic_is_scale_invariant(
            seed in 0u64..10_000,
            lag in 1usize..6,
            sx in prop::sample::select(vec![0.5, -3.0, 1e3, -1e-3]),
            sy in prop::sample::select(vec![2.0, -0.25, 1e4]),
        ) {
            let (x, y) = lagged_pair(seed, 200, 0.3);
            let spec = VarSpec::pairwise(lag, 1, 0).unwrap();
            let base = wald_granger_test(&spec, &[&x, &y]).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v * sx).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * sy).collect();
            let scaled = wald_granger_test(&spec, &[&xs, &ys]).unwrap();
            prop_assert!(base.statistic >= 0.0);
            prop_assert_eq!(base.df, lag);
            prop_assert!((scaled.statistic - base.statistic).abs() <= 1e-8 * base.statistic.max(1.0));
            prop_assert!((scaled.p_value - base.p_value).abs() <= 1e-8);
        }
    }
}
