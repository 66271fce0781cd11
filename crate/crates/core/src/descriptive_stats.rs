//! Summary statistics, Pearson correlation and a least-squares line with a
//! mean-response confidence band.
//!
//! Conventions: sample (n-1) variance; quantiles interpolate linearly between
//! order statistics at `h = (n-1)p`; skewness is the adjusted Fisher-Pearson
//! `G1`; kurtosis is the bias-corrected excess `G2`.

use serde::Serialize;

use crate::special::student_t_quantile;
use crate::{Error, Result, Scalar};

fn check_finite<T: Scalar>(xs: &[T]) -> Result<()> {
    match xs.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

fn require_len(n: usize, needed: usize) -> Result<()> {
    if n < needed {
        Err(Error::TooShort { needed, got: n })
    } else {
        Ok(())
    }
}

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::from_count(xs.len())
}

/// Sample variance (n-1 denominator), two-pass.
pub fn sample_variance<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / T::from_count(xs.len() - 1)
}

pub fn sample_std<T: Scalar>(xs: &[T]) -> T {
    sample_variance(xs).sqrt()
}

/// Central moments m2, m3, m4 with the n denominator.
fn central_moments<T: Scalar>(xs: &[T]) -> (T, T, T) {
    let n = T::from_count(xs.len());
    let m = mean(xs);
    let (mut s2, mut s3, mut s4) = (T::zero(), T::zero(), T::zero());
    for &x in xs {
        let d = x - m;
        let d2 = d * d;
        s2 = s2 + d2;
        s3 = s3 + d2 * d;
        s4 = s4 + d2 * d2;
    }
    (s2 / n, s3 / n, s4 / n)
}

pub fn quantile<T: Scalar>(xs: &[T], p: T) -> Result<T> {
    require_len(xs.len(), 1)?;
    check_finite(xs)?;
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    quantile_sorted(&sorted, p)
}

/// [`quantile`] on data already sorted ascending.
pub fn quantile_sorted<T: Scalar>(sorted: &[T], p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidParameter(format!("quantile fraction {p} outside [0, 1]")));
    }
    require_len(sorted.len(), 1)?;
    let h = T::from_count(sorted.len() - 1) * p;
    let lo = h.floor();
    let i = lo.to_usize().expect("index");
    if i + 1 >= sorted.len() {
        return Ok(sorted[sorted.len() - 1]);
    }
    let frac = h - lo;
    Ok(sorted[i] + frac * (sorted[i + 1] - sorted[i]))
}

/// Adjusted Fisher-Pearson skewness `G1`.
pub fn skewness<T: Scalar>(xs: &[T]) -> Result<T> {
    require_len(xs.len(), 3)?;
    check_finite(xs)?;
    let (m2, m3, _) = central_moments(xs);
    if m2 <= T::zero() {
        return Err(Error::ZeroVariance("skewness input".into()));
    }
    let n = T::from_count(xs.len());
    let g1 = m3 / m2.powf(T::lit(1.5));
    Ok(g1 * (n * (n - T::one())).sqrt() / (n - T::lit(2.0)))
}

/// Bias-corrected excess kurtosis `G2`.
pub fn excess_kurtosis<T: Scalar>(xs: &[T]) -> Result<T> {
    require_len(xs.len(), 4)?;
    check_finite(xs)?;
    let (m2, _, m4) = central_moments(xs);
    if m2 <= T::zero() {
        return Err(Error::ZeroVariance("kurtosis input".into()));
    }
    let n = T::from_count(xs.len());
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let g2 = m4 / (m2 * m2) - three;
    Ok(((n + one) * g2 + T::lit(6.0)) * (n - one) / ((n - two) * (n - three)))
}

/// Field names follow the row labels of the reference summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct DescriptiveSummary<T> {
    #[serde(rename = "Count")]
    pub count: usize,
    #[serde(rename = "Mean")]
    pub mean: T,
    #[serde(rename = "Std Dev")]
    pub std_dev: T,
    #[serde(rename = "Min")]
    pub min: T,
    #[serde(rename = "25%")]
    pub q25: T,
    #[serde(rename = "Median")]
    pub median: T,
    #[serde(rename = "75%")]
    pub q75: T,
    #[serde(rename = "Max")]
    pub max: T,
    #[serde(rename = "Range")]
    pub range: T,
    #[serde(rename = "Variance")]
    pub variance: T,
    /// Absent for a constant series.
    #[serde(rename = "Skewness")]
    pub skewness: Option<T>,
    #[serde(rename = "Kurtosis")]
    pub excess_kurtosis: Option<T>,
}

pub fn summarize<T: Scalar>(xs: &[T]) -> Result<DescriptiveSummary<T>> {
    require_len(xs.len(), 4)?;
    check_finite(xs)?;
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let variance = sample_variance(xs);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let constant = min == max;
    Ok(DescriptiveSummary {
        count: xs.len(),
        mean: mean(xs),
        std_dev: variance.sqrt(),
        min,
        q25: quantile_sorted(&sorted, T::lit(0.25))?,
        median: quantile_sorted(&sorted, T::lit(0.5))?,
        q75: quantile_sorted(&sorted, T::lit(0.75))?,
        max,
        range: max - min,
        variance,
        skewness: if constant { None } else { Some(skewness(xs)?) },
        excess_kurtosis: if constant { None } else { Some(excess_kurtosis(xs)?) },
    })
}

impl<T: Scalar> DescriptiveSummary<T> {
    /// `(row label, formatted value)` pairs in table order, two decimals.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        let f = |v: T| format!("{:.2}", v.as_f64());
        let opt = |v: Option<T>| v.map_or_else(|| "n/a".to_string(), f);
        vec![
            ("Count", self.count.to_string()),
            ("Mean", f(self.mean)),
            ("Std Dev", f(self.std_dev)),
            ("Min", f(self.min)),
            ("25%", f(self.q25)),
            ("Median", f(self.median)),
            ("75%", f(self.q75)),
            ("Max", f(self.max)),
            ("Range", f(self.range)),
            ("Variance", f(self.variance)),
            ("Skewness", opt(self.skewness)),
            ("Kurtosis", opt(self.excess_kurtosis)),
        ]
    }

    /// Two-column text table headed `Statistic  <label>`.
    pub fn to_text(&self, label: &str) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0).max(label.len());
        let mut out = format!("{:<10}{:>width$}\n", "Statistic", label);
        for (name, value) in rows {
            out.push_str(&format!("{name:<10}{value:>width$}\n"));
        }
        out
    }
}

pub fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    require_len(xs.len(), 2)?;
    check_finite(xs)?;
    check_finite(ys)?;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::ZeroVariance("correlation input".into()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CorrelationMatrix<T> {
    pub labels: Vec<String>,
    pub r: Vec<Vec<T>>,
}

/// Pairwise Pearson matrix; the upper triangle is mirrored so the result is
/// exactly symmetric with a unit diagonal.
pub fn correlation_matrix<T: Scalar>(columns: &[(String, Vec<T>)]) -> Result<CorrelationMatrix<T>> {
    require_len(columns.len(), 2)?;
    let n = columns[0].1.len();
    if let Some((_, c)) = columns.iter().find(|(_, c)| c.len() != n) {
        return Err(Error::LengthMismatch(c.len(), n));
    }
    let k = columns.len();
    let mut r = vec![vec![T::one(); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = pearson(&columns[i].1, &columns[j].1)?;
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(CorrelationMatrix { labels: columns.iter().map(|(l, _)| l.clone()).collect(), r })
}

impl<T: Scalar> CorrelationMatrix<T> {
    /// Heatmap-ready long form: `row,col,r`, row-major.
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("row,col,r\n");
        for (i, a) in self.labels.iter().enumerate() {
            for (j, b) in self.labels.iter().enumerate() {
                out.push_str(&format!("{a},{b},{}\n", self.r[i][j]));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let w = self.labels.iter().map(String::len).max().unwrap_or(0).max(7);
        let mut out = format!("{:w$}", "");
        for l in &self.labels {
            out.push_str(&format!(" {l:>w$}"));
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.r) {
            out.push_str(&format!("{l:<w$}"));
            for v in row {
                out.push_str(&format!(" {:>w$.4}", v.as_f64()));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct BandPoint<T> {
    pub x: T,
    pub fit: T,
    pub lower: T,
    pub upper: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct LineFit<T> {
    pub n: usize,
    pub slope: T,
    pub intercept: T,
    /// Absent when `ys` is constant.
    pub r: Option<T>,
    pub residual_std: T,
    pub confidence: T,
    pub t_quantile: T,
    pub x_mean: T,
    pub sxx: T,
    /// One point per observation, ascending in x.
    pub band: Vec<BandPoint<T>>,
}

impl<T: Scalar> LineFit<T> {
    pub fn predict(&self, x: T) -> T {
        self.intercept + self.slope * x
    }

    /// Mean-response interval half-width at `x`.
    pub fn half_width(&self, x: T) -> T {
        let d = x - self.x_mean;
        self.t_quantile * self.residual_std * (T::one() / T::from_count(self.n) + d * d / self.sxx).sqrt()
    }

    pub fn point(&self, x: T) -> BandPoint<T> {
        let fit = self.predict(x);
        let hw = self.half_width(x);
        BandPoint { x, fit, lower: fit - hw, upper: fit + hw }
    }

    pub fn band_csv(&self) -> String {
        let mut out = String::from("x,fit,lower,upper\n");
        for p in &self.band {
            out.push_str(&format!("{},{},{},{}\n", p.x, p.fit, p.lower, p.upper));
        }
        out
    }
}

/// OLS line of `ys` on `xs` with a `confidence` mean-response band
/// `fit ± t(1-α/2, n-2) · s · sqrt(1/n + (x - x̄)² / Sxx)`.
pub fn fit_line_with_ci<T: Scalar>(xs: &[T], ys: &[T], confidence: T) -> Result<LineFit<T>> {
    if !(confidence > T::zero() && confidence < T::one()) {
        return Err(Error::InvalidParameter(format!("confidence {confidence} outside (0, 1)")));
    }
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    require_len(xs.len(), 3)?;
    check_finite(xs)?;
    check_finite(ys)?;
    let n = xs.len();
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if sxx == T::zero() {
        return Err(Error::ZeroVariance("line-fit x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: T = xs.iter().zip(ys).map(|(&x, &y)| (y - intercept - slope * x).powi(2)).sum();
    let residual_std = (ss_res / T::from_count(n - 2)).sqrt();
    let alpha = T::one() - confidence;
    let t_quantile = student_t_quantile(T::one() - alpha / T::lit(2.0), T::from_count(n - 2));
    let r = pearson(xs, ys).ok();

    let mut fit = LineFit {
        n,
        slope,
        intercept,
        r,
        residual_std,
        confidence,
        t_quantile,
        x_mean: mx,
        sxx,
        band: Vec::new(),
    };
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    fit.band = sorted.into_iter().map(|x| fit.point(x)).collect();
    Ok(fit)
}
