//! Lag and rolling-window features, train/test partitioning and z-scoring.

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::descriptive_stats::{mean, sample_std};
use crate::linalg::Matrix;
use crate::market_data::AlignedPair;
use crate::rng::seeded;
use crate::{Error, Result, Scalar};

/// `xs` shifted back by `k`; the first `k` slots are missing.
pub fn lag<T: Scalar>(xs: &[T], k: usize) -> Result<Sparse<T>> {
    if k == 0 || k >= xs.len() {
        return Err(Error::InvalidParameter(format!("lag {k} must be in 1..{}", xs.len())));
    }
    Ok((0..xs.len()).map(|i| i.checked_sub(k).map(|j| xs[j])).collect())
}

/// A feature column with missing warm-up slots.
pub type Sparse<T> = Vec<Option<T>>;

/// Trailing-window mean and sample standard deviation; the first `w - 1`
/// slots are missing.
pub fn rolling_stats<T: Scalar>(xs: &[T], w: usize) -> Result<(Sparse<T>, Sparse<T>)> {
    if w < 2 || w > xs.len() {
        return Err(Error::InvalidParameter(format!("window {w} must be in 2..={}", xs.len())));
    }
    let mut means = vec![None; xs.len()];
    let mut stds = vec![None; xs.len()];
    for i in w - 1..xs.len() {
        let win = &xs[i + 1 - w..=i];
        means[i] = Some(mean(win));
        stds[i] = Some(sample_std(win));
    }
    Ok((means, stds))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub lags: Vec<usize>,
    pub window: usize,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self { lags: vec![1, 2, 3], window: 3 }
    }
}

impl FeatureSpec {
    /// Leading rows lost to lags and the rolling window.
    pub fn warmup(&self) -> usize {
        self.lags.iter().copied().max().unwrap_or(0).max(self.window.saturating_sub(1))
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names = vec!["A".to_string()];
        names.extend(self.lags.iter().map(|k| format!("A_lag_{k}")));
        names.push(format!("A_roll_mean_{}", self.window));
        names.push(format!("A_roll_std_{}", self.window));
        names
    }
}

/// Predictors derived from series A with series B as target, one row per date.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    pub column_names: Vec<String>,
    pub x: Matrix<T>,
    pub target: Vec<T>,
    pub row_dates: Vec<NaiveDate>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.x.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.x.n_cols()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            column_names: self.column_names.clone(),
            x: self.x.select_rows(idx),
            target: idx.iter().map(|&i| self.target[i]).collect(),
            row_dates: idx.iter().map(|&i| self.row_dates[i]).collect(),
        }
    }

    /// `date,<columns>,target`
    pub fn to_csv(&self) -> String {
        let mut out = format!("date,{},target\n", self.column_names.join(","));
        for (i, row) in self.x.rows().enumerate() {
            out.push_str(&self.row_dates[i].format("%Y-%m-%d").to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{}\n", self.target[i]));
        }
        out
    }
}

/// Builds `[A, A_lag_k.., A_roll_mean_w, A_roll_std_w]` from the close of
/// series A with the close of series B as target, dropping warm-up rows.
pub fn assemble<T: Scalar>(pair: &AlignedPair, spec: &FeatureSpec) -> Result<FeatureMatrix<T>> {
    let warmup = spec.warmup();
    let needed = warmup + 2;
    if pair.len() < needed {
        return Err(Error::TooShort { needed, got: pair.len() });
    }
    let a = pair.series_a::<T>();
    let b = pair.series_b::<T>();
    let mut cols: Vec<Sparse<T>> = vec![a.iter().copied().map(Some).collect()];
    for &k in &spec.lags {
        cols.push(lag(&a, k)?);
    }
    let (means, stds) = rolling_stats(&a, spec.window)?;
    cols.push(means);
    cols.push(stds);

    let mut data = Vec::with_capacity((a.len() - warmup) * cols.len());
    for i in warmup..a.len() {
        for c in &cols {
            data.push(c[i].expect("defined past warm-up"));
        }
    }
    Ok(FeatureMatrix {
        column_names: spec.column_names(),
        x: Matrix::from_vec(a.len() - warmup, cols.len(), data)?,
        target: b[warmup..].to_vec(),
        row_dates: pair.dates()[warmup..].to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Shuffled,
    Chronological,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub mode: SplitMode,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { test_fraction: 0.2, mode: SplitMode::Shuffled, seed: 42 }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "test fraction {} must lie strictly between 0 and 1",
                self.test_fraction
            )));
        }
        Ok(())
    }

    /// Training rows: `ceil((1 - f) n)`.
    pub fn n_train(&self, n: usize) -> usize {
        // guard against 0.8 * 100 = 80.000000000000001
        ((1.0 - self.test_fraction) * n as f64 - 1e-9).ceil().max(0.0) as usize
    }

    /// Row indices of (train, test).
    pub fn partition(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        self.validate()?;
        let n_train = self.n_train(n).min(n);
        if n_train == 0 || n_train == n {
            return Err(Error::EmptyPartition(format!(
                "{n} rows with test fraction {} leave {n_train} for training",
                self.test_fraction
            )));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        if self.mode == SplitMode::Shuffled {
            idx.shuffle(&mut seeded(self.seed));
        }
        let test = idx.split_off(n_train);
        Ok((idx, test))
    }
}

pub fn split<T: Scalar>(fm: &FeatureMatrix<T>, spec: &SplitSpec) -> Result<(FeatureMatrix<T>, FeatureMatrix<T>)> {
    let (train, test) = spec.partition(fm.n_rows())?;
    Ok((fm.select_rows(&train), fm.select_rows(&test)))
}

/// Per-column mean and sample standard deviation learned on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Standardizer<T> {
    pub means: Vec<T>,
    pub stds: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn fit(x: &Matrix<T>) -> Result<Self> {
        if x.n_rows() < 2 {
            return Err(Error::TooShort { needed: 2, got: x.n_rows() });
        }
        let mut means = Vec::with_capacity(x.n_cols());
        let mut stds = Vec::with_capacity(x.n_cols());
        for j in 0..x.n_cols() {
            let col = x.column(j);
            let sd = sample_std(&col);
            if sd.is_nan() || sd <= T::zero() {
                return Err(Error::ZeroVariance(format!("training column {j}")));
            }
            means.push(mean(&col));
            stds.push(sd);
        }
        Ok(Self { means, stds })
    }

    fn check(&self, x: &Matrix<T>) -> Result<()> {
        if x.n_cols() != self.means.len() {
            return Err(Error::DimensionMismatch { expected: self.means.len(), got: x.n_cols() });
        }
        Ok(())
    }

    pub fn transform(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.check(x)?;
        Ok(x.map_rows(|src, dst| {
            for (j, (d, &s)) in dst.iter_mut().zip(src).enumerate() {
                *d = (s - self.means[j]) / self.stds[j];
            }
        }))
    }

    pub fn inverse_transform(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.check(x)?;
        Ok(x.map_rows(|src, dst| {
            for (j, (d, &s)) in dst.iter_mut().zip(src).enumerate() {
                *d = s * self.stds[j] + self.means[j];
            }
        }))
    }
}

pub fn standardize_fit<T: Scalar>(train: &FeatureMatrix<T>) -> Result<Standardizer<T>> {
    Standardizer::fit(&train.x)
}

/// Scales the predictors only; the target stays in price units.
pub fn standardize_apply<T: Scalar>(s: &Standardizer<T>, fm: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
    Ok(FeatureMatrix { x: s.transform(&fm.x)?, ..fm.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::{align_by_date, MarketSeries, OhlcBar};

    fn pair(n: usize) -> AlignedPair {
        let mk = |id: &str, off: i64| {
            let bars = (0..n)
                .map(|i| {
                    let p: rust_decimal::Decimal = (100 + off + (i as i64 * 7) % 13).into();
                    OhlcBar {
                        date: NaiveDate::from_ymd_opt(2025, 1, 1).unwrap() + chrono::Days::new(i as u64),
                        open: p,
                        high: p,
                        low: p,
                        close: p,
                    }
                })
                .collect();
            MarketSeries::new(id, bars).unwrap()
        };
        align_by_date(&mk("USA", 0), &mk("AUS", 50)).unwrap()
    }

    #[test]
    fn lag_shifts() {
        let xs = [10.0, 20.0, 30.0, 40.0];
        assert_eq!(lag(&xs, 1).unwrap(), vec![None, Some(10.0), Some(20.0), Some(30.0)]);
        assert_eq!(lag(&xs, 3).unwrap(), vec![None, None, None, Some(10.0)]);
        assert!(lag(&xs, 4).is_err());
        assert!(lag(&xs, 0).is_err());
    }

    #[test]
    fn lag_composes() {
        let xs = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        let once = lag(&xs, 1).unwrap();
        let defined: Vec<f64> = once.iter().flatten().copied().collect();
        let twice = lag(&defined, 1).unwrap();
        let direct = lag(&xs, 2).unwrap();
        assert_eq!(&twice[1..], &direct[2..]);
    }

    #[test]
    fn rolling_windows() {
        let (m, _) = rolling_stats(&[1.0, 2.0, 3.0, 4.0], 3).unwrap();
        assert_eq!(m, vec![None, None, Some(2.0), Some(3.0)]);
        let (_, s) = rolling_stats(&[7.0; 5], 2).unwrap();
        assert!(s.iter().flatten().all(|&v| v == 0.0));
        let (_, s) = rolling_stats(&[1.0, 2.0, 4.0], 3).unwrap();
        assert!((s[2].unwrap() - (7.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(rolling_stats(&[1.0, 2.0], 3).is_err());
        assert!(rolling_stats(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn assemble_prunes_three_rows() {
        let fm = assemble::<f64>(&pair(10), &FeatureSpec::default()).unwrap();
        assert_eq!((fm.n_rows(), fm.n_cols()), (7, 6));
        assert_eq!(fm.column_names, ["A", "A_lag_1", "A_lag_2", "A_lag_3", "A_roll_mean_3", "A_roll_std_3"]);
        assert_eq!(fm.target.len(), 7);
        // A_lag_1 equals the previous aligned close
        assert_eq!(fm.x.get(1, 1), fm.x.get(0, 0));
        assert!(matches!(assemble::<f64>(&pair(4), &FeatureSpec::default()), Err(Error::TooShort { .. })));
    }

    #[test]
    fn split_sizes_and_determinism() {
        let spec = SplitSpec::default();
        let (tr, te) = spec.partition(100).unwrap();
        assert_eq!((tr.len(), te.len()), (80, 20));
        assert_eq!(spec.partition(100).unwrap(), (tr, te));
        assert_eq!(SplitSpec::default().n_train(122), 98);
    }

    #[test]
    fn chronological_split_orders_dates() {
        let fm = assemble::<f64>(&pair(30), &FeatureSpec::default()).unwrap();
        let spec = SplitSpec { mode: SplitMode::Chronological, ..Default::default() };
        let (tr, te) = split(&fm, &spec).unwrap();
        assert!(tr.row_dates.iter().max() < te.row_dates.iter().min());
    }

    #[test]
    fn bad_fractions_rejected() {
        for f in [0.0, 1.0, 1.5, -0.2, f64::NAN] {
            let spec = SplitSpec { test_fraction: f, ..Default::default() };
            assert!(spec.partition(10).is_err(), "{f}");
        }
        let spec = SplitSpec { test_fraction: 0.01, ..Default::default() };
        assert!(matches!(spec.partition(10), Err(Error::EmptyPartition(_))));
    }

    #[test]
    fn standardize_simple_column() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
        let s = Standardizer::fit(&x).unwrap();
        assert_eq!(s.transform(&x).unwrap().as_slice(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn standardize_errors() {
        let x = Matrix::from_rows(&[[1.0, 5.0], [2.0, 5.0]]).unwrap();
        assert!(matches!(Standardizer::fit(&x), Err(Error::ZeroVariance(_))));
        let s = Standardizer::fit(&Matrix::from_rows(&[[1.0], [2.0]]).unwrap()).unwrap();
        assert!(matches!(s.transform(&x), Err(Error::DimensionMismatch { expected: 1, got: 2 })));
    }
}
