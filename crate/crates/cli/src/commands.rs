use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;
use xmarket_core::descriptive_stats::{correlation_matrix, fit_line_with_ci, summarize, DescriptiveSummary};
use xmarket_core::evaluation::{run_experiment, seed_sweep, ExperimentConfig, ExperimentResult};
use xmarket_core::features::{assemble, FeatureSpec, SplitMode, SplitSpec};
use xmarket_core::market_data::{corpus_manifest, PriceField};
use xmarket_core::regressors::{ForestConfig, Gamma, KnnConfig, MaxFeatures, ModelConfig, SvrConfig};

use crate::output::{default_dir, resolve, write_file};
use crate::source::{CorpusSel, SourceArgs};
use crate::{Failure, Format, OutputArgs};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Open,
    High,
    Low,
    Close,
}

impl From<Field> for PriceField {
    fn from(f: Field) -> Self {
        match f {
            Field::Open => PriceField::Open,
            Field::High => PriceField::High,
            Field::Low => PriceField::Low,
            Field::Close => PriceField::Close,
        }
    }
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Price column to summarize.
    #[arg(long, value_enum, default_value = "close")]
    field: Field,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn stats(a: StatsArgs) -> Result<(), Failure> {
    let (series, _) = a.source.load_all(CorpusSel::Daily)?;
    let field = PriceField::from(a.field);
    let mut cols: Vec<(String, DescriptiveSummary<f64>)> = Vec::new();
    for s in &series {
        cols.push((s.market_id().to_string(), summarize(&s.column::<f64>(field))?));
    }
    let body = match a.out.format_or(Format::Text) {
        Format::Json if cols.len() == 1 => serde_json::to_string_pretty(&cols[0].1).map_err(json_failure)? + "\n",
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = cols
                .iter()
                .map(|(k, v)| Ok((k.clone(), serde_json::to_value(v)?)))
                .collect::<Result<_, serde_json::Error>>()
                .map_err(json_failure)?;
            serde_json::to_string_pretty(&map).map_err(json_failure)? + "\n"
        }
        Format::Csv => {
            let mut out = String::from("statistic");
            for (k, _) in &cols {
                let _ = write!(out, ",{k}");
            }
            out.push('\n');
            let tables: Vec<_> = cols.iter().map(|(_, s)| s.rows()).collect();
            for (i, (name, _)) in tables[0].iter().enumerate() {
                out.push_str(name);
                for t in &tables {
                    let _ = write!(out, ",{}", t[i].1);
                }
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let tables: Vec<_> = cols.iter().map(|(_, s)| s.rows()).collect();
            let width = tables.iter().flatten().map(|(_, v)| v.len()).chain(cols.iter().map(|(k, _)| k.len())).max();
            let width = width.unwrap_or(0);
            let mut out = format!("{:<10}", "Statistic");
            for (k, _) in &cols {
                let _ = write!(out, "  {k:>width$}");
            }
            out.push('\n');
            for (i, (name, _)) in tables[0].iter().enumerate() {
                let _ = write!(out, "{name:<10}");
                for t in &tables {
                    let _ = write!(out, "  {:>width$}", t[i].1);
                }
                out.push('\n');
            }
            out
        }
    };
    a.out.emit(&body)
}

#[derive(Args, Debug)]
pub struct CorrArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn corr(a: CorrArgs) -> Result<(), Failure> {
    let pair = a.source.load_pair(CorpusSel::Daily)?;
    let m = correlation_matrix(&pair.ohlc_columns::<f64>())?;
    let body = match a.out.format_or(Format::Csv) {
        Format::Csv => m.to_long_csv(),
        Format::Text => m.to_text(),
        Format::Json => serde_json::to_string_pretty(&m).map_err(json_failure)? + "\n",
    };
    a.out.emit(&body)
}

#[derive(Args, Debug, Clone)]
pub struct FeatureArgs {
    /// Lags of the predictor close, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    lags: Vec<usize>,
    /// Rolling mean / std window length.
    #[arg(long, default_value_t = 3)]
    window: usize,
}

impl FeatureArgs {
    fn spec(&self) -> FeatureSpec {
        FeatureSpec { lags: self.lags.clone(), window: self.window }
    }
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn features(a: FeaturesArgs) -> Result<(), Failure> {
    let spec = a.features.spec();
    let problems = ExperimentConfig { features: spec.clone(), models: vec![], ..Default::default() }.problems();
    if !problems.is_empty() {
        return Err(Failure::config(problems));
    }
    let pair = a.source.load_pair(CorpusSel::Daily)?;
    let fm = assemble::<f64>(&pair, &spec)?;
    let body = match a.out.format_or(Format::Csv) {
        Format::Csv | Format::Text => fm.to_csv(),
        Format::Json => {
            let rows: Vec<_> = (0..fm.n_rows())
                .map(|i| json!({ "date": fm.row_dates[i], "features": fm.x.row(i), "target": fm.target[i] }))
                .collect();
            let doc = json!({ "columns": fm.column_names, "rows": rows });
            serde_json::to_string_pretty(&doc).map_err(json_failure)? + "\n"
        }
    };
    a.out.emit(&body)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Knn,
    SvrPoly,
    SvrLinear,
    Forest,
    Ols,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Shuffled,
    Chronological,
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    features: FeatureArgs,
    /// Fraction of rows held out for testing, strictly between 0 and 1.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long, value_enum, default_value = "shuffled")]
    split: SplitArg,
    /// Models to fit, comma separated, in table order.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "knn,svr-poly,svr-linear,forest")]
    models: Vec<ModelKind>,
    #[arg(long, default_value_t = 5)]
    knn_k: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    svr_c: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.1)]
    svr_epsilon: f64,
    /// `scale` or a positive number.
    #[arg(long, allow_hyphen_values = true, default_value = "scale")]
    svr_gamma: String,
    #[arg(long, default_value_t = 3)]
    svr_degree: u32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    svr_coef0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1e-3)]
    svr_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    svr_max_iter: usize,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Seed of the forest's bootstrap and feature sampling.
    #[arg(long, default_value_t = 42)]
    forest_seed: u64,
    /// `all`, `sqrt` or a fraction in (0, 1].
    #[arg(long, default_value = "all")]
    max_features: String,
    #[arg(long, default_value_t = 1)]
    min_leaf: usize,
    #[arg(long)]
    max_depth: Option<usize>,
}

impl ExperimentArgs {
    /// The full configuration, or every problem found in it.
    fn config(&self, seed: u64) -> Result<ExperimentConfig, Failure> {
        let mut problems = Vec::new();
        let gamma = match self.svr_gamma.as_str() {
            "scale" => Gamma::Scale,
            s => match s.parse::<f64>() {
                Ok(g) => Gamma::Value(g),
                Err(_) => {
                    problems.push(format!("--svr-gamma `{s}` is neither `scale` nor a number"));
                    Gamma::Scale
                }
            },
        };
        let max_features = match self.max_features.as_str() {
            "all" => MaxFeatures::All,
            "sqrt" => MaxFeatures::Sqrt,
            s => match s.parse::<f64>() {
                Ok(f) => MaxFeatures::Fraction(f),
                Err(_) => {
                    problems.push(format!("--max-features `{s}` is not all, sqrt or a fraction"));
                    MaxFeatures::All
                }
            },
        };
        let svr = SvrConfig {
            c: self.svr_c,
            epsilon: self.svr_epsilon,
            gamma,
            degree: self.svr_degree,
            coef0: self.svr_coef0,
            tol: self.svr_tol,
            max_iter: self.svr_max_iter,
            ..SvrConfig::poly()
        };
        let models = self
            .models
            .iter()
            .map(|m| match m {
                ModelKind::Knn => ModelConfig::Knn(KnnConfig { k: self.knn_k }),
                ModelKind::SvrPoly => ModelConfig::Svr(svr.clone()),
                ModelKind::SvrLinear => ModelConfig::Svr(SvrConfig { kernel: SvrConfig::linear().kernel, ..svr.clone() }),
                ModelKind::Forest => ModelConfig::Forest(ForestConfig {
                    n_trees: self.trees,
                    seed: self.forest_seed,
                    max_features,
                    min_leaf: self.min_leaf,
                    max_depth: self.max_depth,
                    ..ForestConfig::default()
                }),
                ModelKind::Ols => ModelConfig::Ols,
            })
            .collect();
        let mode = match self.split {
            SplitArg::Shuffled => SplitMode::Shuffled,
            SplitArg::Chronological => SplitMode::Chronological,
        };
        let config = ExperimentConfig {
            features: self.features.spec(),
            split: SplitSpec { test_fraction: self.test_fraction, mode, seed },
            models,
        };
        problems.extend(config.problems());
        if problems.is_empty() {
            Ok(config)
        } else {
            Err(Failure::config(problems))
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Split seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory for per-model `date,actual,predicted` files (default: $XMARKET_OUT_DIR if set).
    #[arg(long)]
    predictions_dir: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

fn slug(name: &str) -> String {
    name.to_ascii_lowercase().replace(|c: char| !c.is_ascii_alphanumeric(), "_")
}

fn report_warnings(result: &ExperimentResult<f64>) {
    for m in &result.models {
        for w in &m.warnings {
            eprintln!("warning: {}: {w}", m.name);
        }
        if let Some(e) = &m.error {
            eprintln!("warning: {} failed: {e}", m.name);
        }
    }
}

pub fn run(a: RunArgs) -> Result<(), Failure> {
    let config = a.exp.config(a.seed)?;
    let pair = a.exp.source.load_pair(CorpusSel::Daily)?;
    let result = run_experiment::<f64>(&pair, &config)?;
    report_warnings(&result);
    let dir = a.predictions_dir.as_deref().map(resolve).or_else(default_dir);
    if let Some(dir) = dir {
        for m in result.models.iter().filter(|m| m.metrics.is_some()) {
            write_file(&dir.join(format!("{}_predictions.csv", slug(&m.name))), &m.predictions_csv())?;
        }
    }
    let body = match a.out.format_or(Format::Text) {
        Format::Text => result.to_text(),
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json()? + "\n",
    };
    a.out.emit(&body)
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Split seeds: a list (`1,4,9`) or an inclusive range (`1-10`).
    #[arg(long, default_value = "1-10")]
    seeds: String,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("--seeds `{s}` is not a list like 1,2,3 or a range like 1-10");
    if let Some((lo, hi)) = s.split_once('-') {
        let (lo, hi): (u64, u64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

pub fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let seeds = parse_seeds(&a.seeds);
    let config = a.exp.config(0);
    let (seeds, config) = match (seeds, config) {
        (Ok(s), Ok(c)) => (s, c),
        (s, c) => {
            let mut problems: Vec<String> = s.err().into_iter().collect();
            if let Err(f) = c {
                problems.extend(f.message.lines().map(String::from));
            }
            return Err(Failure::config(problems));
        }
    };
    let pair = a.exp.source.load_pair(CorpusSel::Daily)?;
    let summary = seed_sweep::<f64>(&pair, &config, &seeds)?;
    for r in summary.models.iter().filter(|r| r.failures > 0) {
        eprintln!("warning: {} failed on {} of {} seeds", r.name, r.failures, seeds.len());
    }
    let body = match a.out.format_or(Format::Text) {
        Format::Text => summary.to_text(),
        Format::Csv => summary.to_csv(),
        Format::Json => summary.to_json()? + "\n",
    };
    a.out.emit(&body)
}

#[derive(Args, Debug)]
pub struct FitLineArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Confidence level of the band, strictly between 0 and 1.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.95)]
    confidence: f64,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn fit_line(a: FitLineArgs) -> Result<(), Failure> {
    if !(a.confidence > 0.0 && a.confidence < 1.0) {
        return Err(Failure::config(vec![format!(
            "confidence {} must lie strictly between 0 and 1",
            a.confidence
        )]));
    }
    let pair = a.source.load_pair(CorpusSel::Weekly)?;
    let (x, y) = (pair.series_a::<f64>(), pair.series_b::<f64>());
    let fit = fit_line_with_ci(&x, &y, a.confidence)?;
    let body = match a.out.format_or(Format::Csv) {
        Format::Csv => fit.band_csv(),
        Format::Json => serde_json::to_string_pretty(&fit).map_err(json_failure)? + "\n",
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "n          {}", fit.n);
            let _ = writeln!(out, "slope      {:.6}", fit.slope);
            let _ = writeln!(out, "intercept  {:.4}", fit.intercept);
            let _ = writeln!(out, "r          {}", fit.r.map_or("n/a".to_string(), |r| format!("{r:.6}")));
            let _ = writeln!(out, "resid std  {:.4}", fit.residual_std);
            let _ = writeln!(out, "t({})     {:.6}", fit.confidence, fit.t_quantile);
            out
        }
    };
    a.out.emit(&body)
}

pub fn manifest(o: OutputArgs) -> Result<(), Failure> {
    let body = serde_json::to_string_pretty(&corpus_manifest()).map_err(json_failure)? + "\n";
    o.emit(&body)
}

fn json_failure(e: serde_json::Error) -> Failure {
    Failure { code: 4, message: e.to_string() }
}
