//! OHLC series: ingestion, validation, de-duplication and date alignment.
//!
//! Prices are kept as exact decimals (the digits that appeared in the source
//! file) and converted to floating point only when a numeric column is
//! requested.

mod align;
mod corpus;
mod csv_io;

use std::fmt;

use chrono::NaiveDate;
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::Serialize;

use crate::{Error, Result, Scalar};

pub use align::{align_by_date, align_by_week, AlignedPair, Side};
pub use corpus::{corpus_manifest, embedded_corpus, load_embedded, Corpus, CorpusManifest, DatasetEntry};
pub use csv_io::{load_csv, parse_date, read_csv, write_csv, DateFormat, LoadedSeries};

/// One trading period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OhlcBar {
    pub date: NaiveDate,
    pub open: Decimal,
    pub high: Decimal,
    pub low: Decimal,
    pub close: Decimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PriceField {
    Open,
    High,
    Low,
    Close,
}

impl PriceField {
    pub const ALL: [PriceField; 4] = [PriceField::Open, PriceField::High, PriceField::Low, PriceField::Close];

    pub fn name(self) -> &'static str {
        match self {
            PriceField::Open => "Open",
            PriceField::High => "High",
            PriceField::Low => "Low",
            PriceField::Close => "Close",
        }
    }
}

impl OhlcBar {
    pub fn price(&self, field: PriceField) -> Decimal {
        match field {
            PriceField::Open => self.open,
            PriceField::High => self.high,
            PriceField::Low => self.low,
            PriceField::Close => self.close,
        }
    }
}

pub(crate) fn decimal_to<T: Scalar>(d: Decimal) -> T {
    T::lit(d.to_f64().expect("decimal fits in f64"))
}

/// Date-ordered bars of one market, at most one per calendar date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketSeries {
    market_id: String,
    bars: Vec<OhlcBar>,
}

impl MarketSeries {
    /// Sorts by date and drops repeated dates, keeping the first occurrence
    /// in input order.
    pub fn new(market_id: impl Into<String>, bars: Vec<OhlcBar>) -> Result<Self> {
        let market_id = market_id.into();
        let bars = dedup_bars(bars);
        if bars.is_empty() {
            return Err(Error::EmptySeries(market_id));
        }
        Ok(Self { market_id, bars })
    }

    pub fn market_id(&self) -> &str {
        &self.market_id
    }

    pub fn bars(&self) -> &[OhlcBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.bars.iter().map(|b| b.date).collect()
    }

    pub fn column<T: Scalar>(&self, field: PriceField) -> Vec<T> {
        self.bars.iter().map(|b| decimal_to(b.price(field))).collect()
    }

    pub fn closes<T: Scalar>(&self) -> Vec<T> {
        self.column(PriceField::Close)
    }

    pub fn first_date(&self) -> NaiveDate {
        self.bars[0].date
    }

    pub fn last_date(&self) -> NaiveDate {
        self.bars[self.bars.len() - 1].date
    }
}

/// Stable sort by date, then keep the first bar of each date.
pub fn dedup_bars(mut bars: Vec<OhlcBar>) -> Vec<OhlcBar> {
    bars.sort_by_key(|b| b.date);
    bars.dedup_by_key(|b| b.date);
    bars
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BarRule {
    NonPositivePrice,
    HighBelowLow,
    OpenAboveHigh,
    CloseAboveHigh,
    OpenBelowLow,
    CloseBelowLow,
}

impl BarRule {
    pub fn label(self) -> &'static str {
        match self {
            BarRule::NonPositivePrice => "non-positive price",
            BarRule::HighBelowLow => "high<low",
            BarRule::OpenAboveHigh => "open>high",
            BarRule::CloseAboveHigh => "close>high",
            BarRule::OpenBelowLow => "open<low",
            BarRule::CloseBelowLow => "close<low",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarWarning {
    pub market_id: String,
    pub date: NaiveDate,
    pub rule: BarRule,
}

impl fmt::Display for BarWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.market_id, self.date, self.rule.label())
    }
}

/// Reports OHLC ordering violations and non-positive prices.
///
/// Each bar yields at most one warning per rule. A bar with a non-positive
/// price reports only that; a bar with `high < low` reports only `high<low`.
/// The open/close bounds are checked once the high/low range is consistent.
pub fn validate_bars(series: &MarketSeries) -> Vec<BarWarning> {
    check_bars(series.market_id(), series.bars())
}

pub(crate) fn check_bars(market_id: &str, bars: &[OhlcBar]) -> Vec<BarWarning> {
    let mut out = Vec::new();
    for bar in bars {
        let mut push = |rule| out.push(BarWarning { market_id: market_id.to_string(), date: bar.date, rule });
        if PriceField::ALL.iter().any(|&f| bar.price(f) <= Decimal::ZERO) {
            push(BarRule::NonPositivePrice);
            continue;
        }
        if bar.high < bar.low {
            push(BarRule::HighBelowLow);
            continue;
        }
        if bar.open > bar.high {
            push(BarRule::OpenAboveHigh);
        }
        if bar.close > bar.high {
            push(BarRule::CloseAboveHigh);
        }
        if bar.open < bar.low {
            push(BarRule::OpenBelowLow);
        }
        if bar.close < bar.low {
            push(BarRule::CloseBelowLow);
        }
    }
    out
}

#[cfg(test)]
pub(crate) fn bar(date: &str, o: &str, h: &str, l: &str, c: &str) -> OhlcBar {
    OhlcBar {
        date: date.parse().unwrap(),
        open: o.parse().unwrap(),
        high: h.parse().unwrap(),
        low: l.parse().unwrap(),
        close: c.parse().unwrap(),
    }
}
