//! Bootstrap-aggregated regression trees.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_on, MaxFeatures, Tree, TreeConfig};
use super::{check_query, check_training};
use crate::linalg::Matrix;
use crate::rng::{derive_seed, seeded};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub seed: u64,
    pub max_features: MaxFeatures,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { n_trees: 100, seed: 42, max_features: MaxFeatures::All, min_leaf: 1, max_depth: None, bootstrap: true }
    }
}

impl ForestConfig {
    pub fn tree_config(&self) -> TreeConfig {
        TreeConfig { max_features: self.max_features, min_leaf: self.min_leaf, max_depth: self.max_depth }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if self.n_trees == 0 {
            p.push("forest n_trees must be at least 1".into());
        }
        p.extend(self.tree_config().problems());
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ForestModel<T> {
    pub trees: Vec<Tree<T>>,
}

/// Tree `t` draws from its own stream seeded by `derive_seed(seed, t)`, so the
/// fitted forest is identical for any thread count.
pub fn fit_forest<T: Scalar>(x: &Matrix<T>, y: &[T], config: &ForestConfig) -> Result<ForestModel<T>> {
    let problems = config.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")));
    }
    check_training(x, y, 1)?;
    let n = x.n_rows();
    let tree_cfg = config.tree_config();
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(derive_seed(config.seed, t as u64));
            let rows: Vec<usize> =
                if config.bootstrap { (0..n).map(|_| rng.random_range(0..n)).collect() } else { (0..n).collect() };
            fit_tree_on(x, y, rows, &tree_cfg, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel { trees })
}

impl<T: Scalar> ForestModel<T> {
    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        check_query(x, self.trees[0].n_features)?;
        Ok(x
            .rows()
            .map(|row| {
                let v0 = self.trees[0].predict_row(row);
                let (mut lo, mut hi, mut acc) = (v0, v0, T::zero());
                for t in &self.trees[1..] {
                    let v = t.predict_row(row);
                    lo = lo.min(v);
                    hi = hi.max(v);
                    acc = acc + (v - v0);
                }
                (v0 + acc / T::from_count(self.trees.len())).max(lo).min(hi)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regressors::fit_tree;

    fn data() -> (Matrix<f64>, Vec<f64>) {
        let rows: Vec<[f64; 2]> = (0..40).map(|i| [(i as f64 * 0.37).sin(), (i % 7) as f64]).collect();
        let y = rows.iter().map(|r| 3.0 * r[0] + r[1] * r[1]).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn predictions_stay_within_target_range() {
        let (x, y) = data();
        let m = fit_forest(&x, &y, &ForestConfig { n_trees: 25, ..ForestConfig::default() }).unwrap();
        let (lo, hi) = y.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        for p in m.predict(&x).unwrap() {
            assert!(p >= lo && p <= hi);
        }
    }

    #[test]
    fn without_bootstrap_every_tree_matches_a_single_tree() {
        let (x, y) = data();
        let cfg = ForestConfig { n_trees: 5, bootstrap: false, ..ForestConfig::default() };
        let m = fit_forest(&x, &y, &cfg).unwrap();
        let single = fit_tree(&x, &y, &cfg.tree_config(), &mut seeded(0)).unwrap();
        assert_eq!(m.predict(&x).unwrap(), single.predict(&x).unwrap());
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = data();
        let cfg = ForestConfig { n_trees: 10, max_features: MaxFeatures::Sqrt, ..ForestConfig::default() };
        assert_eq!(fit_forest(&x, &y, &cfg).unwrap(), fit_forest(&x, &y, &cfg).unwrap());
        let other = ForestConfig { seed: 7, ..cfg.clone() };
        assert_ne!(fit_forest(&x, &y, &cfg).unwrap(), fit_forest(&x, &y, &other).unwrap());
    }

    #[test]
    fn zero_trees_rejected() {
        let (x, y) = data();
        assert!(fit_forest(&x, &y, &ForestConfig { n_trees: 0, ..ForestConfig::default() }).is_err());
    }
}
