use serde::{Deserialize, Serialize};

use super::{check_query, check_training};
use crate::linalg::{squared_distance, Matrix};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self { k: 5 }
    }
}

impl KnnConfig {
    pub fn problems(&self) -> Vec<String> {
        if self.k == 0 {
            vec!["knn k must be at least 1".into()]
        } else {
            Vec::new()
        }
    }
}

/// Retained training set; prediction averages the `k` nearest targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct KnnModel<T> {
    pub k: usize,
    pub x: Matrix<T>,
    pub y: Vec<T>,
}

pub fn fit_knn<T: Scalar>(x: &Matrix<T>, y: &[T], config: &KnnConfig) -> Result<KnnModel<T>> {
    check_training(x, y, 1)?;
    if config.k == 0 || config.k > x.n_rows() {
        return Err(Error::InvalidParameter(format!(
            "k = {} must be between 1 and the {} training rows",
            config.k,
            x.n_rows()
        )));
    }
    Ok(KnnModel { k: config.k, x: x.clone(), y: y.to_vec() })
}

impl<T: Scalar> KnnModel<T> {
    /// Indices of the `k` nearest training rows, nearest first. Equal
    /// distances keep training order (stable sort).
    pub fn neighbours(&self, query: &[T]) -> Vec<usize> {
        let mut d: Vec<(T, usize)> = self.x.rows().enumerate().map(|(i, r)| (squared_distance(r, query), i)).collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
        d.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        check_query(x, self.x.n_cols())?;
        let k = T::from_count(self.k);
        // summed nearest-first so the result does not depend on training order
        Ok(x.rows().map(|q| self.neighbours(q).into_iter().map(|i| self.y[i]).sum::<T>() / k).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> Matrix<f64> {
        Matrix::from_columns(&[v]).unwrap()
    }

    #[test]
    fn exact_match_with_k1() {
        let m = fit_knn(&col(&[0.0, 1.0, 2.0]), &[5.0, 6.0, 7.0], &KnnConfig { k: 1 }).unwrap();
        assert_eq!(m.predict(&col(&[1.0])).unwrap(), vec![6.0]);
    }

    #[test]
    fn uniform_average() {
        let m = fit_knn(&col(&[0.0, 1.0]), &[0.0, 10.0], &KnnConfig { k: 2 }).unwrap();
        assert_eq!(m.predict(&col(&[0.5])).unwrap(), vec![5.0]);
    }

    #[test]
    fn tie_goes_to_lower_index() {
        let m = fit_knn(&col(&[-1.0, 1.0]), &[3.0, 7.0], &KnnConfig { k: 1 }).unwrap();
        assert_eq!(m.predict(&col(&[0.0])).unwrap(), vec![3.0]);
    }

    #[test]
    fn errors() {
        assert!(fit_knn(&col(&[0.0]), &[1.0], &KnnConfig { k: 2 }).is_err());
        let m = fit_knn(&col(&[0.0, 1.0]), &[1.0, 2.0], &KnnConfig { k: 1 }).unwrap();
        assert!(m.predict(&Matrix::zeros(0, 1)).is_err());
        assert!(m.predict(&Matrix::zeros(1, 2)).is_err());
    }
}
