//! Regression metrics, the end-to-end experiment and seed sweeps.

use std::fmt::Write as _;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::{assemble, split, standardize_apply, standardize_fit, FeatureSpec, SplitMode, SplitSpec};
use crate::market_data::{AlignedPair, Side};
use crate::regressors::ModelConfig;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MetricsReport<T> {
    pub n_test: usize,
    pub mse: T,
    pub rmse: T,
    pub mae: T,
    /// Absent when the actual values are constant.
    pub r2: Option<T>,
    /// Percent. Absent (like the relative errors) when an actual value is 0.
    pub mape: Option<T>,
    pub rel_err_mean: Option<T>,
    pub rel_err_std: Option<T>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn compute_metrics<T: Scalar>(actual: &[T], predicted: &[T]) -> Result<MetricsReport<T>> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch(actual.len(), predicted.len()));
    }
    let n = actual.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let nf = T::from_count(n);
    let mut sse = T::zero();
    let mut sae = T::zero();
    for (&z, &p) in actual.iter().zip(predicted) {
        sse = sse + (z - p) * (z - p);
        sae = sae + (z - p).abs();
    }
    let mse = sse / nf;
    let mut warnings = Vec::new();

    let z_bar = actual.iter().copied().sum::<T>() / nf;
    let sst: T = actual.iter().map(|&z| (z - z_bar) * (z - z_bar)).sum();
    let r2 = if sst > T::zero() {
        Some(T::one() - sse / sst)
    } else {
        warnings.push("R² undefined: actual values are constant".to_string());
        None
    };

    let (mut rel_mean, mut rel_std, mut mape) = (None, None, None);
    if actual.iter().any(|z| *z == T::zero()) {
        warnings.push("relative errors undefined: an actual value is 0".to_string());
    } else {
        let e: Vec<T> = actual.iter().zip(predicted).map(|(&z, &p)| (z - p).abs() / z.abs()).collect();
        let m = e.iter().copied().sum::<T>() / nf;
        let var = e.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / T::from_count(n - 1);
        rel_mean = Some(m);
        rel_std = Some(var.sqrt());
        mape = Some(T::lit(100.0) * m);
    }

    Ok(MetricsReport {
        n_test: n,
        mse,
        rmse: mse.sqrt(),
        mae: sae / nf,
        r2,
        mape,
        rel_err_mean: rel_mean,
        rel_err_std: rel_std,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub features: FeatureSpec,
    pub split: SplitSpec,
    pub models: Vec<ModelConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { features: FeatureSpec::default(), split: SplitSpec::default(), models: ModelConfig::table_defaults() }
    }
}

impl ExperimentConfig {
    /// Every invalid setting across the split and all models.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if let Err(Error::InvalidParameter(m)) = self.split.validate() {
            p.push(m);
        }
        if self.features.window < 2 {
            p.push(format!("rolling window {} must be at least 2", self.features.window));
        }
        if self.features.lags.contains(&0) {
            p.push("lags must be at least 1".to_string());
        }
        for m in &self.models {
            for problem in m.problems() {
                if !p.contains(&problem) {
                    p.push(problem);
                }
            }
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Prediction<T> {
    pub date: NaiveDate,
    pub actual: T,
    pub predicted: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ModelOutcome<T> {
    pub name: String,
    pub config: ModelConfig,
    /// Absent when fitting or prediction failed; see `error`.
    pub metrics: Option<MetricsReport<T>>,
    pub error: Option<String>,
    pub warnings: Vec<String>,
    pub predictions: Vec<Prediction<T>>,
}

impl<T: Scalar> ModelOutcome<T> {
    /// `date,actual,predicted`, one row per test date in chronological order.
    pub fn predictions_csv(&self) -> String {
        let mut rows: Vec<&Prediction<T>> = self.predictions.iter().collect();
        rows.sort_by_key(|p| p.date);
        let mut out = String::from("date,actual,predicted\n");
        for p in rows {
            let _ = writeln!(out, "{},{},{}", p.date, p.actual, p.predicted);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ExperimentResult<T> {
    pub corpus: String,
    pub config: ExperimentConfig,
    pub n_rows: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub models: Vec<ModelOutcome<T>>,
}

/// Assemble, split, standardize on the training rows, then fit and score
/// every model on the same partition. A model that fails is recorded with
/// its error and the rest still run.
pub fn run_experiment<T: Scalar>(pair: &AlignedPair, config: &ExperimentConfig) -> Result<ExperimentResult<T>> {
    let problems = config.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")));
    }
    let fm = assemble::<T>(pair, &config.features)?;
    let (train, test) = split(&fm, &config.split)?;
    let scaler = standardize_fit(&train)?;
    let (train, test) = (standardize_apply(&scaler, &train)?, standardize_apply(&scaler, &test)?);

    let models = config
        .models
        .par_iter()
        .map(|mc| {
            let mut outcome = ModelOutcome {
                name: mc.name().to_string(),
                config: mc.clone(),
                metrics: None,
                error: None,
                warnings: Vec::new(),
                predictions: Vec::new(),
            };
            let scored = mc.fit(&train.x, &train.target).and_then(|model| {
                outcome.warnings = model.warnings();
                let pred = model.predict(&test.x)?;
                let metrics = compute_metrics(&test.target, &pred)?;
                Ok((pred, metrics))
            });
            match scored {
                Ok((pred, metrics)) => {
                    outcome.warnings.extend(metrics.warnings.iter().cloned());
                    outcome.predictions = test
                        .row_dates
                        .iter()
                        .zip(&test.target)
                        .zip(pred)
                        .map(|((&date, &actual), predicted)| Prediction { date, actual, predicted })
                        .collect();
                    outcome.metrics = Some(metrics);
                }
                Err(e) => outcome.error = Some(e.to_string()),
            }
            outcome
        })
        .collect();

    Ok(ExperimentResult {
        corpus: format!("{}->{}", pair.label(Side::A), pair.label(Side::B)),
        config: config.clone(),
        n_rows: fm.n_rows(),
        n_train: train.n_rows(),
        n_test: test.n_rows(),
        models,
    })
}

pub const TABLE_COLUMNS: [&str; 6] = ["Model", "MSE", "MAE", "R²", "Rel. Error Mean", "Rel. Error Std"];

fn fmt_opt<T: Scalar>(v: Option<T>, prec: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{:.prec$}", v.as_f64()))
}

fn metric_cells<T: Scalar>(m: &MetricsReport<T>) -> [String; 5] {
    [
        format!("{:.2}", m.mse.as_f64()),
        format!("{:.2}", m.mae.as_f64()),
        fmt_opt(m.r2, 3),
        fmt_opt(m.rel_err_mean, 6),
        fmt_opt(m.rel_err_std, 6),
    ]
}

fn render_table(rows: &[Vec<String>]) -> String {
    // widths come from complete rows; a failure message just runs on
    let ncol = rows.first().map_or(0, Vec::len);
    let full = || rows.iter().filter(|r| r.len() == ncol);
    let widths: Vec<usize> =
        (0..ncol).map(|c| full().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, cell) in r.iter().enumerate() {
            let pad = widths.get(c).copied().unwrap_or(0).saturating_sub(cell.chars().count());
            if c == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

impl<T: Scalar> ExperimentResult<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Config echo followed by the aligned results table.
    pub fn to_text(&self) -> String {
        let s = &self.config.split;
        let mode = match s.mode {
            SplitMode::Shuffled => "shuffled",
            SplitMode::Chronological => "chronological",
        };
        let mut out = String::new();
        let _ = writeln!(out, "# corpus: {}", self.corpus);
        let _ = writeln!(out, "# lags: {:?}, window: {}", self.config.features.lags, self.config.features.window);
        let _ = writeln!(
            out,
            "# split: {mode}, test fraction {}, seed {}; rows {} = {} train + {} test",
            s.test_fraction, s.seed, self.n_rows, self.n_train, self.n_test
        );
        for m in &self.models {
            let _ = writeln!(out, "# {}: {}", m.name, serde_json::to_string(&m.config).unwrap_or_default());
        }
        let mut rows = vec![TABLE_COLUMNS.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
        for m in &self.models {
            let mut row = vec![m.name.clone()];
            match (&m.metrics, &m.error) {
                (Some(metrics), _) => row.extend(metric_cells(metrics)),
                (None, e) => row.push(format!("failed: {}", e.as_deref().unwrap_or("unknown error"))),
            }
            rows.push(row);
        }
        out.push_str(&render_table(&rows));
        out
    }

    /// Header row plus one row per model; failed models keep empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,mse,mae,r2,rel_err_mean,rel_err_std,rmse,mape,n_test,error\n");
        for m in &self.models {
            let opt = |v: Option<T>| v.map_or_else(String::new, |v| v.to_string());
            match &m.metrics {
                Some(x) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},",
                        m.name,
                        x.mse,
                        x.mae,
                        opt(x.r2),
                        opt(x.rel_err_mean),
                        opt(x.rel_err_std),
                        x.rmse,
                        opt(x.mape),
                        x.n_test
                    );
                }
                None => {
                    let err = m.error.clone().unwrap_or_default().replace('"', "'");
                    let _ = writeln!(out, "{},,,,,,,,,\"{err}\"", m.name);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Spread<T> {
    pub median: T,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> Spread<T> {
    pub fn of(values: &[T]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite metric"));
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0) };
        Some(Spread { median, min: v[0], max: v[n - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepRow<T> {
    pub name: String,
    /// Seeds on which the model produced metrics.
    pub runs: usize,
    pub failures: usize,
    pub mse: Option<Spread<T>>,
    pub mae: Option<Spread<T>>,
    pub r2: Option<Spread<T>>,
    pub rel_err_mean: Option<Spread<T>>,
    pub rel_err_std: Option<Spread<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepSummary<T> {
    pub corpus: String,
    pub seeds: Vec<u64>,
    pub models: Vec<SweepRow<T>>,
}

/// Re-runs the experiment with a shuffled split for each seed and summarizes
/// each metric per model.
pub fn seed_sweep<T: Scalar>(pair: &AlignedPair, base: &ExperimentConfig, seeds: &[u64]) -> Result<SweepSummary<T>> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("seed sweep needs at least one seed".into()));
    }
    let runs = seeds
        .iter()
        .map(|&seed| {
            let mut cfg = base.clone();
            cfg.split.seed = seed;
            cfg.split.mode = SplitMode::Shuffled;
            run_experiment::<T>(pair, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let models = base
        .models
        .iter()
        .enumerate()
        .map(|(i, mc)| {
            let reports: Vec<&MetricsReport<T>> = runs.iter().filter_map(|r| r.models[i].metrics.as_ref()).collect();
            let pick = |f: &dyn Fn(&MetricsReport<T>) -> Option<T>| {
                let v: Vec<T> = reports.iter().filter_map(|m| f(m)).collect();
                Spread::of(&v)
            };
            SweepRow {
                name: mc.name().to_string(),
                runs: reports.len(),
                failures: runs.len() - reports.len(),
                mse: pick(&|m| Some(m.mse)),
                mae: pick(&|m| Some(m.mae)),
                r2: pick(&|m| m.r2),
                rel_err_mean: pick(&|m| m.rel_err_mean),
                rel_err_std: pick(&|m| m.rel_err_std),
            }
        })
        .collect();
    Ok(SweepSummary { corpus: runs[0].corpus.clone(), seeds: seeds.to_vec(), models })
}

impl<T: Scalar> SweepSummary<T> {
    pub fn row(&self, name: &str) -> Option<&SweepRow<T>> {
        self.models.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Median with `[min, max]` for every table metric.
    pub fn to_text(&self) -> String {
        let mut out = format!("# corpus: {}\n# seeds: {:?}\n", self.corpus, self.seeds);
        let mut rows = vec![TABLE_COLUMNS.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
        for r in &self.models {
            let cell = |s: Option<Spread<T>>, prec: usize| {
                s.map_or_else(
                    || "n/a".to_string(),
                    |s| {
                        format!(
                            "{:.prec$} [{:.prec$}, {:.prec$}]",
                            s.median.as_f64(),
                            s.min.as_f64(),
                            s.max.as_f64()
                        )
                    },
                )
            };
            let mut row = vec![r.name.clone()];
            row.extend([cell(r.mse, 2), cell(r.mae, 2), cell(r.r2, 3), cell(r.rel_err_mean, 6), cell(r.rel_err_std, 6)]);
            if r.failures > 0 {
                row.push(format!("({} failed)", r.failures));
            }
            rows.push(row);
        }
        out.push_str(&render_table(&rows));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,metric,median,min,max,runs,failures\n");
        for r in &self.models {
            for (metric, s) in [
                ("mse", r.mse),
                ("mae", r.mae),
                ("r2", r.r2),
                ("rel_err_mean", r.rel_err_mean),
                ("rel_err_std", r.rel_err_std),
            ] {
                if let Some(s) = s {
                    let _ = writeln!(out, "{},{metric},{},{},{},{},{}", r.name, s.median, s.min, s.max, r.runs, r.failures);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::{align_by_date, embedded_corpus, Corpus};

    #[test]
    fn perfect_fit() {
        let m = compute_metrics(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((m.mse, m.mae, m.r2, m.mape), (0.0, 0.0, Some(1.0), Some(0.0)));
    }

    #[test]
    fn hand_worked_pair() {
        let m = compute_metrics::<f64>(&[2.0, 4.0], &[3.0, 3.0]).unwrap();
        assert_eq!((m.mse, m.mae, m.r2), (1.0, 1.0, Some(0.0)));
        assert!((m.mape.unwrap() - 37.5).abs() < 1e-12);
        assert!((m.rel_err_mean.unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn mean_prediction_scores_zero() {
        let a = [3.0, 1.0, 4.0, 1.0, 5.0];
        let m = compute_metrics::<f64>(&a, &[2.8; 5]).unwrap();
        assert!(m.r2.unwrap().abs() < 1e-15);
    }

    #[test]
    fn undefined_metrics_are_absent() {
        let m = compute_metrics(&[2.0, 2.0], &[1.0, 3.0]).unwrap();
        assert_eq!(m.r2, None);
        let m = compute_metrics(&[0.0, 2.0], &[1.0, 3.0]).unwrap();
        assert_eq!((m.mape, m.rel_err_mean, m.rel_err_std), (None, None, None));
        assert_eq!(m.warnings.len(), 1);
        assert!(matches!(compute_metrics(&[1.0], &[1.0]), Err(Error::TooShort { .. })));
        assert!(matches!(compute_metrics(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1))));
    }

    fn daily() -> AlignedPair {
        let (a, b) = (embedded_corpus(Corpus::UsaDaily), embedded_corpus(Corpus::AusDaily));
        align_by_date(&a, &b).unwrap()
    }

    #[test]
    fn empty_model_list_echoes_config() {
        let cfg = ExperimentConfig { models: vec![], ..ExperimentConfig::default() };
        let r = run_experiment::<f64>(&daily(), &cfg).unwrap();
        assert!(r.models.is_empty());
        assert_eq!(r.config, cfg);
        assert_eq!((r.n_train, r.n_test), (98, 24));
    }

    #[test]
    fn failing_model_does_not_abort_others() {
        let cfg = ExperimentConfig {
            models: vec![ModelConfig::Ols, ModelConfig::Knn(Default::default())],
            ..ExperimentConfig::default()
        };
        let r = run_experiment::<f64>(&daily(), &cfg).unwrap();
        assert!(r.models[0].error.as_deref().unwrap().contains("rank deficient"));
        assert_eq!(r.models[1].metrics.as_ref().unwrap().n_test, 24);
        assert!(r.to_text().contains("failed: "));
    }

    #[test]
    fn single_seed_sweep_equals_run() {
        let cfg = ExperimentConfig { models: vec![ModelConfig::Knn(Default::default())], ..Default::default() };
        let s = seed_sweep::<f64>(&daily(), &cfg, &[7]).unwrap();
        let run = run_experiment::<f64>(&daily(), &ExperimentConfig { split: SplitSpec { seed: 7, ..cfg.split }, ..cfg })
            .unwrap();
        let m = run.models[0].metrics.as_ref().unwrap();
        let mse = s.models[0].mse.unwrap();
        assert_eq!((mse.median, mse.min, mse.max), (m.mse, m.mse, m.mse));
    }

    #[test]
    fn spread_order_statistics() {
        let s = Spread::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.median, s.min, s.max), (2.5, 1.0, 4.0));
        assert!(Spread::<f64>::of(&[]).is_none());
    }
}
