//! Embedded S&P/ASX 200 and S&P 500 tables (21 Jan to 25 Jul 2025).
//!
//! The CSV files under `data/` hold the published rows in their original
//! order and date spelling, thousands separators removed. The daily AUS table
//! repeats a block of dates; loading collapses those (first occurrence wins).

use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;

use super::{align_by_date, align_by_week, read_csv, DateFormat, LoadedSeries, MarketSeries};
use crate::descriptive_stats::pearson;
use crate::features::{assemble, FeatureSpec};
use crate::{Error, Result};

/// Observation count published alongside the daily summary statistics.
pub const PUBLISHED_DAILY_COUNT: usize = 130;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Corpus {
    AusDaily,
    UsaDaily,
    AusWeekly,
    UsaWeekly,
}

impl Corpus {
    pub const ALL: [Corpus; 4] = [Corpus::AusDaily, Corpus::UsaDaily, Corpus::AusWeekly, Corpus::UsaWeekly];

    pub fn id(self) -> &'static str {
        match self {
            Corpus::AusDaily => "aus-daily",
            Corpus::UsaDaily => "usa-daily",
            Corpus::AusWeekly => "aus-weekly",
            Corpus::UsaWeekly => "usa-weekly",
        }
    }

    pub fn market(self) -> &'static str {
        match self {
            Corpus::AusDaily | Corpus::AusWeekly => "AUS",
            Corpus::UsaDaily | Corpus::UsaWeekly => "USA",
        }
    }

    pub fn is_daily(self) -> bool {
        matches!(self, Corpus::AusDaily | Corpus::UsaDaily)
    }

    fn raw(self) -> &'static str {
        match self {
            Corpus::AusDaily => include_str!("../../data/aus_daily.csv"),
            Corpus::UsaDaily => include_str!("../../data/usa_daily.csv"),
            Corpus::AusWeekly => include_str!("../../data/aus_weekly.csv"),
            Corpus::UsaWeekly => include_str!("../../data/usa_weekly.csv"),
        }
    }
}

impl FromStr for Corpus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Corpus::ALL
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown corpus `{s}`")))
    }
}

pub fn load_embedded(which: Corpus) -> LoadedSeries {
    read_csv(which.raw().as_bytes(), which.id(), which.market(), DateFormat::Auto)
        .expect("embedded corpus parses")
}

pub fn embedded_corpus(which: Corpus) -> MarketSeries {
    load_embedded(which).series
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetEntry {
    pub id: &'static str,
    pub market: &'static str,
    pub source_rows: usize,
    pub rows: usize,
    pub duplicates_removed: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
    pub bar_warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentEntry {
    pub key: &'static str,
    pub rows: usize,
    pub first_date: NaiveDate,
    pub last_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusManifest {
    pub datasets: Vec<DatasetEntry>,
    pub daily_alignment: AlignmentEntry,
    pub weekly_alignment: AlignmentEntry,
    /// Rows left after lag/rolling pruning of the daily alignment.
    pub daily_feature_rows: usize,
    /// Pearson r between aligned USA and AUS daily closes.
    pub daily_close_pearson: f64,
    pub notes: Vec<String>,
}

/// Row counts, date ranges and derived sizes of the embedded corpus.
pub fn corpus_manifest() -> CorpusManifest {
    let mut notes = Vec::new();
    let datasets: Vec<DatasetEntry> = Corpus::ALL
        .into_iter()
        .map(|c| {
            let l = load_embedded(c);
            if c.is_daily() && l.series.len() != PUBLISHED_DAILY_COUNT {
                notes.push(format!(
                    "{}: {} distinct dates, while the published summary statistics report {} observations",
                    c.id(),
                    l.series.len(),
                    PUBLISHED_DAILY_COUNT
                ));
            }
            DatasetEntry {
                id: c.id(),
                market: c.market(),
                source_rows: l.raw_rows,
                rows: l.series.len(),
                duplicates_removed: l.duplicates_removed,
                first_date: l.series.first_date(),
                last_date: l.series.last_date(),
                bar_warnings: l.warnings.len(),
            }
        })
        .collect();

    let daily = align_by_date(&embedded_corpus(Corpus::UsaDaily), &embedded_corpus(Corpus::AusDaily))
        .expect("daily tables overlap");
    let weekly = align_by_week(&embedded_corpus(Corpus::UsaWeekly), &embedded_corpus(Corpus::AusWeekly))
        .expect("weekly tables overlap");
    let features = assemble::<f64>(&daily, &FeatureSpec::default()).expect("daily alignment long enough");
    let r = pearson(&daily.series_a::<f64>(), &daily.series_b::<f64>()).expect("closes vary");
    notes.push(
        "feature matrix keeps the same-day USA close as a predictor alongside its lags, so the AUS close is \
         regressed partly on contemporaneous information"
            .to_string(),
    );

    let entry = |key, p: &super::AlignedPair| AlignmentEntry {
        key,
        rows: p.len(),
        first_date: p.dates()[0],
        last_date: p.dates()[p.len() - 1],
    };
    CorpusManifest {
        datasets,
        daily_alignment: entry("date", &daily),
        weekly_alignment: entry("iso-week", &weekly),
        daily_feature_rows: features.n_rows(),
        daily_close_pearson: r,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weekly_tables() {
        let aus = embedded_corpus(Corpus::AusWeekly);
        assert_eq!(aus.len(), 27);
        let closes = aus.closes::<f64>();
        assert_eq!(closes[0], 8408.9);
        assert_eq!(closes[26], 8666.9);
        let usa = embedded_corpus(Corpus::UsaWeekly);
        assert_eq!(usa.len(), 27);
        assert_eq!(usa.closes::<f64>()[0], 6101.24);
    }

    #[test]
    fn daily_tables_collapse_repeats() {
        let aus = load_embedded(Corpus::AusDaily);
        assert_eq!(aus.raw_rows, 134);
        assert_eq!(aus.series.len(), 130);
        let usa = load_embedded(Corpus::UsaDaily);
        assert_eq!((usa.raw_rows, usa.series.len()), (129, 129));
        assert_eq!(aus.series.first_date().to_string(), "2025-01-20");
        assert_eq!(usa.series.last_date().to_string(), "2025-07-25");
    }

    #[test]
    fn committed_manifest_is_current() {
        let fresh = serde_json::to_string_pretty(&corpus_manifest()).unwrap();
        let committed = include_str!("../../data/manifest.json");
        assert_eq!(fresh.trim_end(), committed.trim_end(), "regenerate data/manifest.json with `xmarket manifest`");
    }

    #[test]
    fn corpus_ids_parse() {
        for c in Corpus::ALL {
            assert_eq!(c.id().parse::<Corpus>().unwrap(), c);
        }
        assert!("nyse".parse::<Corpus>().is_err());
    }
}
