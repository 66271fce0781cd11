//! Regression models behind a common fit/predict contract.
//!
//! | config            | model                                   |
//! |-------------------|-----------------------------------------|
//! | [`ModelConfig::Ols`]    | least squares with intercept (QR)  |
//! | [`ModelConfig::Knn`]    | uniform k-nearest-neighbour mean   |
//! | [`ModelConfig::Svr`]    | epsilon-SVR solved by SMO          |
//! | [`ModelConfig::Forest`] | bagged CART regression trees       |

mod forest;
mod knn;
mod ols;
mod svr;
mod tree;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Error, Result, Scalar};

pub use forest::{fit_forest, ForestConfig, ForestModel};
pub use knn::{fit_knn, KnnConfig, KnnModel};
pub use ols::{fit_ols, OlsModel};
pub use svr::{
    dual_objective, fit_svr, gram_matrix, kkt_violations, solve_dual, DualSolution, Gamma, Kernel, KernelKind,
    SvrConfig, SvrModel,
};
pub use tree::{fit_tree, fit_tree_on, MaxFeatures, Node, Tree, TreeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Ols,
    Knn(KnnConfig),
    Svr(SvrConfig),
    Forest(ForestConfig),
}

impl ModelConfig {
    /// kNN, polynomial SVR, linear SVR and random forest with their defaults.
    pub fn table_defaults() -> Vec<ModelConfig> {
        vec![
            ModelConfig::Knn(KnnConfig::default()),
            ModelConfig::Svr(SvrConfig::poly()),
            ModelConfig::Svr(SvrConfig::linear()),
            ModelConfig::Forest(ForestConfig::default()),
        ]
    }

    /// Row label used in result tables.
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Ols => "OLS",
            ModelConfig::Knn(_) => "kNN",
            ModelConfig::Svr(c) if c.kernel == KernelKind::Linear => "Linear SVR",
            ModelConfig::Svr(_) => "SVR",
            ModelConfig::Forest(_) => "Random Forest",
        }
    }

    /// Every out-of-range field, as human-readable messages.
    pub fn problems(&self) -> Vec<String> {
        match self {
            ModelConfig::Ols => Vec::new(),
            ModelConfig::Knn(c) => c.problems(),
            ModelConfig::Svr(c) => c.problems(),
            ModelConfig::Forest(c) => c.problems(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(p.join("; ")))
        }
    }

    pub fn fit<T: Scalar>(&self, x: &Matrix<T>, y: &[T]) -> Result<FittedModel<T>> {
        self.validate()?;
        Ok(match self {
            ModelConfig::Ols => FittedModel::Ols(fit_ols(x, y)?),
            ModelConfig::Knn(c) => FittedModel::Knn(fit_knn(x, y, c)?),
            ModelConfig::Svr(c) => FittedModel::Svr(fit_svr(x, y, c)?),
            ModelConfig::Forest(c) => FittedModel::Forest(fit_forest(x, y, c)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum FittedModel<T> {
    Ols(OlsModel<T>),
    Knn(KnnModel<T>),
    Svr(SvrModel<T>),
    Forest(ForestModel<T>),
}

impl<T: Scalar> FittedModel<T> {
    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        match self {
            FittedModel::Ols(m) => m.predict(x),
            FittedModel::Knn(m) => m.predict(x),
            FittedModel::Svr(m) => m.predict(x),
            FittedModel::Forest(m) => m.predict(x),
        }
    }

    /// Non-fatal issues from fitting (currently: SMO hit its iteration cap).
    pub fn warnings(&self) -> Vec<String> {
        match self {
            FittedModel::Svr(m) if !m.converged => vec![format!(
                "SMO stopped after {} iterations with KKT gap {} above tolerance",
                m.iterations, m.kkt_gap
            )],
            _ => Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub(crate) fn check_training<T: Scalar>(x: &Matrix<T>, y: &[T], min_rows: usize) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch(x.n_rows(), y.len()));
    }
    if x.n_rows() < min_rows {
        return Err(Error::TooShort { needed: min_rows, got: x.n_rows() });
    }
    if let Some(i) = x.as_slice().iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

pub(crate) fn check_query<T: Scalar>(x: &Matrix<T>, n_cols: usize) -> Result<()> {
    if x.n_rows() == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    if x.n_cols() != n_cols {
        return Err(Error::DimensionMismatch { expected: n_cols, got: x.n_cols() });
    }
    Ok(())
}
