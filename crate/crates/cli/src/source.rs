use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use xmarket_core::market_data::{
    align_by_date, align_by_week, load_csv, load_embedded, validate_bars, AlignedPair, Corpus, DateFormat,
    LoadedSeries, MarketSeries,
};

use crate::Failure;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CorpusSel {
    AusDaily,
    UsaDaily,
    AusWeekly,
    UsaWeekly,
    /// USA daily (predictor) with AUS daily (target), joined on date.
    Daily,
    /// USA weekly (predictor) with AUS weekly (target), joined on ISO week.
    Weekly,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlignKey {
    Date,
    Week,
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Embedded series or pair.
    #[arg(long, value_enum, conflicts_with = "csv")]
    pub corpus: Option<CorpusSel>,
    /// OHLC CSV file (Date,Open,High,Low,Close). For pairs give two: predictor first, then target.
    #[arg(long)]
    pub csv: Vec<PathBuf>,
    /// Date spelling in CSV input: auto, iso, dd-mm-yy or dd-mon-yyyy.
    #[arg(long, default_value = "auto")]
    pub date_format: String,
    /// Join key for CSV pairs.
    #[arg(long, value_enum, default_value = "date")]
    pub align: AlignKey,
}

impl SourceArgs {
    fn date_format(&self) -> Result<DateFormat, Failure> {
        Ok(DateFormat::from_str(&self.date_format)?)
    }

    fn corpus_list(sel: CorpusSel) -> (Vec<Corpus>, AlignKey) {
        match sel {
            CorpusSel::AusDaily => (vec![Corpus::AusDaily], AlignKey::Date),
            CorpusSel::UsaDaily => (vec![Corpus::UsaDaily], AlignKey::Date),
            CorpusSel::AusWeekly => (vec![Corpus::AusWeekly], AlignKey::Week),
            CorpusSel::UsaWeekly => (vec![Corpus::UsaWeekly], AlignKey::Week),
            CorpusSel::Daily => (vec![Corpus::UsaDaily, Corpus::AusDaily], AlignKey::Date),
            CorpusSel::Weekly => (vec![Corpus::UsaWeekly, Corpus::AusWeekly], AlignKey::Week),
        }
    }

    /// Every requested series, reporting warnings and dropped duplicates on stderr.
    pub fn load_all(&self, default: CorpusSel) -> Result<(Vec<MarketSeries>, AlignKey), Failure> {
        let (loaded, key): (Vec<LoadedSeries>, AlignKey) = if self.csv.is_empty() {
            let (list, key) = Self::corpus_list(self.corpus.unwrap_or(default));
            (list.into_iter().map(load_embedded).collect(), key)
        } else {
            let fmt = self.date_format()?;
            let loaded = self.csv.iter().map(|p| load_csv(p, fmt)).collect::<Result<Vec<_>, _>>()?;
            (loaded, self.align)
        };
        let mut out = Vec::new();
        for l in loaded {
            if l.duplicates_removed > 0 {
                eprintln!(
                    "warning: {}: {} repeated date(s) dropped, {} of {} rows kept",
                    l.series.market_id(),
                    l.duplicates_removed,
                    l.series.len(),
                    l.raw_rows
                );
            }
            for w in l.warnings.iter().chain(&validate_bars(&l.series)).take(20) {
                eprintln!("warning: {w}");
            }
            out.push(l.series);
        }
        Ok((out, key))
    }

    pub fn load_pair(&self, default: CorpusSel) -> Result<AlignedPair, Failure> {
        if let Some(sel @ (CorpusSel::AusDaily | CorpusSel::UsaDaily | CorpusSel::AusWeekly | CorpusSel::UsaWeekly)) =
            self.corpus
        {
            return Err(Failure::config(vec![format!(
                "--corpus {} is a single series; this command needs a pair (daily or weekly)",
                sel.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
            )]));
        }
        let (series, key) = self.load_all(default)?;
        if series.len() != 2 {
            return Err(Failure::config(vec![format!("expected two --csv files, got {}", series.len())]));
        }
        let pair = match key {
            AlignKey::Date => align_by_date(&series[0], &series[1])?,
            AlignKey::Week => align_by_week(&series[0], &series[1])?,
        };
        Ok(pair)
    }
}
