use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use rust_decimal::Decimal;

use super::{check_bars, BarWarning, MarketSeries, OhlcBar};
use crate::{Error, Result};

/// Accepted date spellings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DateFormat {
    /// Try ISO, then `DD-Mon-YYYY`, then `DD-MM-YY`.
    #[default]
    Auto,
    /// `YYYY-MM-DD`
    Iso,
    /// `DD-MM-YY`, two-digit years mapped to 20YY.
    DayMonthShortYear,
    /// `DD-Mon-YYYY`, e.g. `20-Jan-2025`.
    DayMonthNameYear,
}

impl FromStr for DateFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(DateFormat::Auto),
            "iso" | "yyyy-mm-dd" => Ok(DateFormat::Iso),
            "dd-mm-yy" => Ok(DateFormat::DayMonthShortYear),
            "dd-mon-yyyy" => Ok(DateFormat::DayMonthNameYear),
            other => Err(Error::InvalidParameter(format!(
                "unknown date format `{other}` (expected auto, iso, dd-mm-yy or dd-mon-yyyy)"
            ))),
        }
    }
}

fn parse_short_year(s: &str) -> Option<NaiveDate> {
    let mut parts = s.split('-');
    let (d, m, y) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || [d, m, y].iter().any(|p| p.len() != 2 || !p.bytes().all(|b| b.is_ascii_digit())) {
        return None;
    }
    NaiveDate::from_ymd_opt(2000 + y.parse::<i32>().ok()?, m.parse().ok()?, d.parse().ok()?)
}

pub fn parse_date(s: &str, format: DateFormat) -> Option<NaiveDate> {
    let s = s.trim();
    match format {
        DateFormat::Iso => {
            let four_digit_year = s.len() == 10 && s.as_bytes()[4] == b'-';
            four_digit_year.then(|| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()).flatten()
        }
        DateFormat::DayMonthNameYear => NaiveDate::parse_from_str(s, "%d-%b-%Y").ok(),
        DateFormat::DayMonthShortYear => parse_short_year(s),
        DateFormat::Auto => parse_date(s, DateFormat::Iso)
            .or_else(|| parse_date(s, DateFormat::DayMonthNameYear))
            .or_else(|| parse_date(s, DateFormat::DayMonthShortYear)),
    }
}

/// A parsed series plus what happened on the way in.
#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: MarketSeries,
    pub warnings: Vec<BarWarning>,
    /// Data records in the source before de-duplication.
    pub raw_rows: usize,
    pub duplicates_removed: usize,
}

const COLUMNS: [&str; 5] = ["date", "open", "high", "low", "close"];

/// Parses OHLC records from any reader; `source_name` labels errors.
pub fn read_csv<R: Read>(reader: R, source_name: &str, market_id: &str, format: DateFormat) -> Result<LoadedSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let parse_err = |row: usize, message: String| Error::Parse { source_name: source_name.to_string(), row, message };

    let header = rdr.headers().map_err(|e| parse_err(0, e.to_string()))?.clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn { source_name: source_name.to_string(), column: name.to_string() })?;
    }

    let mut bars = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse_err(row, e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field = |k: usize| rec.get(idx[k]).ok_or_else(|| parse_err(row, format!("missing `{}` field", COLUMNS[k])));
        let raw_date = field(0)?;
        let date = parse_date(raw_date, format).ok_or_else(|| parse_err(row, format!("unparsable date `{raw_date}`")))?;
        let mut prices = [Decimal::ZERO; 4];
        for (k, p) in prices.iter_mut().enumerate() {
            let raw = field(k + 1)?;
            *p = Decimal::from_str_exact(raw)
                .map_err(|_| parse_err(row, format!("unparsable {} `{raw}`", COLUMNS[k + 1])))?;
        }
        bars.push(OhlcBar { date, open: prices[0], high: prices[1], low: prices[2], close: prices[3] });
    }

    let raw_rows = bars.len();
    let series = MarketSeries::new(market_id, bars)?;
    let warnings = check_bars(market_id, series.bars());
    Ok(LoadedSeries { duplicates_removed: raw_rows - series.len(), series, warnings, raw_rows })
}

/// Loads a CSV file; the market id defaults to the file stem.
pub fn load_csv(path: impl AsRef<Path>, format: DateFormat) -> Result<LoadedSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_csv(file, &path.display().to_string(), &id, format)
}

/// Writes `date,open,high,low,close` with ISO dates; prices keep their scale.
pub fn write_csv<W: Write>(series: &MarketSeries, writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for b in series.bars() {
        w.write_record([
            b.date.format("%Y-%m-%d").to_string(),
            b.open.to_string(),
            b.high.to_string(),
            b.low.to_string(),
            b.close.to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<LoadedSeries> {
        read_csv(s.as_bytes(), "test", "T", DateFormat::Auto)
    }

    #[test]
    fn parses_all_date_styles() {
        let d = NaiveDate::from_ymd_opt(2025, 1, 24).unwrap();
        assert_eq!(parse_date("24-01-25", DateFormat::Auto), Some(d));
        assert_eq!(parse_date("24-Jan-2025", DateFormat::Auto), Some(d));
        assert_eq!(parse_date("2025-01-24", DateFormat::Auto), Some(d));
        assert_eq!(parse_date("2025-01-24", DateFormat::DayMonthShortYear), None);
        assert_eq!(parse_date("31-02-25", DateFormat::Auto), None);
        // two-digit years always land in the 2000s
        assert_eq!(parse_date("01-01-99", DateFormat::DayMonthShortYear), NaiveDate::from_ymd_opt(2099, 1, 1));
    }

    #[test]
    fn single_row_from_weekly_table() {
        let l = read("date,open,high,low,close\n24-01-25,8383.2,8455.6,8356.7,8408.9\n").unwrap();
        assert_eq!(l.series.len(), 1);
        assert_eq!(l.series.first_date(), NaiveDate::from_ymd_opt(2025, 1, 24).unwrap());
        assert_eq!(l.series.bars()[0].close.to_string(), "8408.9");
        assert!(l.warnings.is_empty());
    }

    #[test]
    fn duplicate_date_keeps_first() {
        let l = read("Date,Open,High,Low,Close\n2025-01-02,1,2,1,2\n2025-01-02,5,6,5,6\n").unwrap();
        assert_eq!(l.series.len(), 1);
        assert_eq!(l.raw_rows, 2);
        assert_eq!(l.duplicates_removed, 1);
        assert_eq!(l.series.bars()[0].open.to_string(), "1");
    }

    #[test]
    fn high_below_low_loads_with_warning() {
        let l = read("date,open,high,low,close\n2025-01-02,10,9,12,11\n2025-01-03,10,12,9,11\n").unwrap();
        assert_eq!(l.series.len(), 2);
        assert_eq!(l.warnings.len(), 1);
    }

    #[test]
    fn header_is_case_insensitive_and_order_free() {
        let l = read("CLOSE,Low,HIGH,open,Volume,DATE\n4,1,5,2,100,2025-03-04\n").unwrap();
        let b = &l.series.bars()[0];
        assert_eq!((b.open.to_string(), b.close.to_string()), ("2".into(), "4".into()));
    }

    #[test]
    fn bad_number_reports_row() {
        let err = read("date,open,high,low,close\n2025-01-02,1,2,1,2\n2025-01-03,1,2,x,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }), "{err}");
    }

    #[test]
    fn bad_date_reports_row() {
        let err = read("date,open,high,low,close\n2025/01/02,1,2,1,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
    }

    #[test]
    fn missing_column_is_error() {
        assert!(matches!(read("date,open,high,close\n"), Err(Error::MissingColumn { .. })));
    }

    #[test]
    fn header_only_is_empty_error() {
        assert!(matches!(read("date,open,high,low,close\n"), Err(Error::EmptySeries(_))));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_csv("/no/such/file.csv", DateFormat::Auto).unwrap_err();
        assert!(err.to_string().contains("/no/such/file.csv"));
    }

    #[test]
    fn write_uses_iso_dates() {
        let l = read("date,open,high,low,close\n20-Jan-2025,6014.12,6128.18,6006.88,6101.24\n").unwrap();
        let mut out = Vec::new();
        write_csv(&l.series, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "date,open,high,low,close\n2025-01-20,6014.12,6128.18,6006.88,6101.24\n");
    }
}
