use serde::{Deserialize, Serialize};

use super::{check_query, check_training};
use crate::linalg::{dot, lstsq_qr, Matrix};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OlsModel<T> {
    pub coefficients: Vec<T>,
    pub intercept: T,
}

/// Least squares with an intercept, solved by Householder QR on `[1 | X]`.
pub fn fit_ols<T: Scalar>(x: &Matrix<T>, y: &[T]) -> Result<OlsModel<T>> {
    let p = x.n_cols();
    check_training(x, y, p + 1)?;
    let mut design = Matrix::zeros(x.n_rows(), p + 1);
    for (i, row) in x.rows().enumerate() {
        design.set(i, 0, T::one());
        for (j, &v) in row.iter().enumerate() {
            design.set(i, j + 1, v);
        }
    }
    let beta = lstsq_qr(&design, y).map_err(|j| {
        Error::RankDeficient(if j == 0 { "intercept".to_string() } else { format!("feature {}", j - 1) })
    })?;
    Ok(OlsModel { intercept: beta[0], coefficients: beta[1..].to_vec() })
}

impl<T: Scalar> OlsModel<T> {
    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        check_query(x, self.coefficients.len())?;
        Ok(x.rows().map(|r| self.intercept + dot(r, &self.coefficients)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [5.0]]).unwrap();
        let y: Vec<f64> = x.column(0).iter().map(|v| 2.0 * v + 1.0).collect();
        let m = fit_ols(&x, &y).unwrap();
        assert!((m.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((m.intercept - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_target() {
        let x = Matrix::<f64>::from_rows(&[[0.0, 3.0], [1.0, -1.0], [2.0, 4.0], [5.0, 0.5]]).unwrap();
        let m = fit_ols(&x, &[7.0; 4]).unwrap();
        assert!(m.coefficients.iter().all(|w| w.abs() < 1e-12));
        assert!((m.intercept - 7.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_column_is_reported() {
        let x = Matrix::from_rows(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]]).unwrap();
        let err = fit_ols(&x, &[1.0, 2.0, 3.0, 5.0]).unwrap_err();
        assert_eq!(err.to_string(), "design matrix is rank deficient at column `feature 1`");
    }

    #[test]
    fn constant_column_collides_with_intercept() {
        let x = Matrix::from_rows(&[[2.0], [2.0], [2.0]]).unwrap();
        assert!(matches!(fit_ols(&x, &[1.0, 2.0, 3.0]), Err(Error::RankDeficient(c)) if c == "feature 0"));
    }

    #[test]
    fn too_few_rows() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert!(matches!(fit_ols(&x, &[1.0, 2.0]), Err(Error::TooShort { .. })));
    }
}
