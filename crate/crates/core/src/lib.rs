//! Cross-market index regression toolkit.
//!
//! The crate covers the full study pipeline for two daily or weekly OHLC
//! series (an S&P 500 / S&P/ASX 200 corpus ships embedded):
//!
//! * [`market_data`]: CSV ingestion, validation, de-duplication and date alignment.
//! * [`descriptive_stats`]: summary statistics, Pearson correlation and a
//!   least-squares line with a mean-response confidence band.
//! * [`features`]: lag and rolling-window features, train/test splitting and
//!   z-score standardization.
//! * [`regressors`]: OLS, k-nearest neighbours, epsilon-SVR (SMO) and a
//!   random forest of CART trees behind one fit/predict contract.
//! * [`evaluation`]: regression metrics, the experiment driver and seed sweeps.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the command-line tool uses.

pub mod descriptive_stats;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod linalg;
pub mod market_data;
pub mod regressors;
pub mod rng;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Summary = descriptive_stats::DescriptiveSummary<f64>;
pub type Correlations = descriptive_stats::CorrelationMatrix<f64>;
pub type Line = descriptive_stats::LineFit<f64>;
pub type Features = features::FeatureMatrix<f64>;
pub type Scaler = features::Standardizer<f64>;
pub type Mat = linalg::Matrix<f64>;
pub type Model = regressors::FittedModel<f64>;
pub type Metrics = evaluation::MetricsReport<f64>;
pub type Experiment = evaluation::ExperimentResult<f64>;
pub type Sweep = evaluation::SweepSummary<f64>;
