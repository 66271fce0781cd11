use std::collections::HashMap;

use chrono::{Datelike, IsoWeek, NaiveDate};

use super::{decimal_to, MarketSeries, OhlcBar, PriceField};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Two markets observed on the same periods.
///
/// Series A is the predictor market (USA in the study), series B the target
/// market (AUS). Row `i` of both sides belongs to `dates[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedPair {
    label_a: String,
    label_b: String,
    dates: Vec<NaiveDate>,
    a: Vec<OhlcBar>,
    b: Vec<OhlcBar>,
}

impl AlignedPair {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn label(&self, side: Side) -> &str {
        match side {
            Side::A => &self.label_a,
            Side::B => &self.label_b,
        }
    }

    pub fn bars(&self, side: Side) -> &[OhlcBar] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn column<T: Scalar>(&self, side: Side, field: PriceField) -> Vec<T> {
        self.bars(side).iter().map(|b| decimal_to(b.price(field))).collect()
    }

    pub fn series_a<T: Scalar>(&self) -> Vec<T> {
        self.column(Side::A, PriceField::Close)
    }

    pub fn series_b<T: Scalar>(&self) -> Vec<T> {
        self.column(Side::B, PriceField::Close)
    }

    /// The eight OHLC columns, labelled `<market>_<Field>`, A's first.
    pub fn ohlc_columns<T: Scalar>(&self) -> Vec<(String, Vec<T>)> {
        [Side::A, Side::B]
            .into_iter()
            .flat_map(|side| {
                PriceField::ALL
                    .into_iter()
                    .map(move |f| (format!("{}_{}", self.label(side), f.name()), self.column(side, f)))
            })
            .collect()
    }
}

fn join_on<K: std::hash::Hash + Eq>(
    a: &MarketSeries,
    b: &MarketSeries,
    key: impl Fn(NaiveDate) -> K,
) -> Result<AlignedPair> {
    let mut by_key: HashMap<K, &OhlcBar> = HashMap::with_capacity(b.len());
    for bar in b.bars() {
        if by_key.insert(key(bar.date), bar).is_some() {
            return Err(Error::InvalidParameter(format!(
                "series `{}` has more than one bar for the join key of {}",
                b.market_id(),
                bar.date
            )));
        }
    }
    let mut pair = AlignedPair {
        label_a: a.market_id().to_string(),
        label_b: b.market_id().to_string(),
        dates: Vec::new(),
        a: Vec::new(),
        b: Vec::new(),
    };
    let mut seen = std::collections::HashSet::new();
    for bar in a.bars() {
        let k = key(bar.date);
        if let Some(other) = by_key.get(&k) {
            if !seen.insert(k) {
                return Err(Error::InvalidParameter(format!(
                    "series `{}` has more than one bar for the join key of {}",
                    a.market_id(),
                    bar.date
                )));
            }
            pair.dates.push(bar.date);
            pair.a.push(bar.clone());
            pair.b.push((*other).clone());
        }
    }
    if pair.is_empty() {
        return Err(Error::EmptyIntersection { a: pair.label_a, b: pair.label_b });
    }
    Ok(pair)
}

/// Inner join on calendar date.
pub fn align_by_date(a: &MarketSeries, b: &MarketSeries) -> Result<AlignedPair> {
    join_on(a, b, |d| d)
}

/// Inner join on ISO week, for weekly series stamped on different weekdays.
/// Row dates are taken from series `a`; each series may hold one bar per week.
pub fn align_by_week(a: &MarketSeries, b: &MarketSeries) -> Result<AlignedPair> {
    join_on(a, b, |d| -> IsoWeek { d.iso_week() })
}
