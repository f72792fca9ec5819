//! `date,value` CSV files (UTF-8, ISO-8601 dates, LF line endings) and the
//! tidy long-format files emitted by reports.

use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::{Frequency, Observation, TimeSeries, Unit};

use super::SeriesSpec;

/// Parsed series plus the number of rows skipped for missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvLoad {
    pub series: TimeSeries,
    pub dropped: usize,
}

/// FRED writes "." for a missing observation.
pub fn is_missing(value: &str) -> bool {
    let v = value.trim();
    v.is_empty() || v == "."
}

pub(crate) fn parse_date(s: &str, line: u64) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| Error::Parse { line, message: format!("bad date '{}': {e}", s.trim()) })
}

pub(crate) fn parse_value(s: &str, line: u64) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad value '{}'", s.trim()) })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse { line, message: format!("non-finite value '{}'", s.trim()) })
    }
}

fn reader(text: &str) -> ::csv::Reader<&[u8]> {
    ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.strip_prefix('\u{feff}').unwrap_or(text).as_bytes())
}

fn csv_err(e: ::csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse { line, message: e.to_string() }
}

pub fn parse_csv(text: &str, id: &str, freq: Frequency, unit: Unit) -> Result<CsvLoad> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.len() != 2 || headers[0].trim() != "date" || headers[1].trim() != "value" {
        return Err(Error::Parse { line: 1, message: "header must be 'date,value'".into() });
    }
    let mut points = Vec::new();
    let mut dropped = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let date = parse_date(&rec[0], line)?;
        if is_missing(&rec[1]) {
            dropped += 1;
            continue;
        }
        points.push(Observation::new(date, parse_value(&rec[1], line)?));
    }
    let series = TimeSeries::new(id, freq, unit, points)?;
    Ok(CsvLoad { series, dropped })
}

/// Reads a `date,value` file and applies the spec's scale and transform.
pub fn load_csv(path: impl AsRef<Path>, spec: &SeriesSpec) -> Result<CsvLoad> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let load = parse_csv(&text, &spec.id, spec.freq, spec.unit)?;
    Ok(CsvLoad { series: spec.finish(load.series)?, dropped: load.dropped })
}

/// Serializes with the shortest representation that parses back to the same `f64`.
pub fn write_csv(s: &TimeSeries) -> String {
    let mut out = String::from("date,value\n");
    for p in s.points() {
        writeln!(out, "{},{}", p.date, p.value).expect("writing to String");
    }
    out
}

/// One row of a tidy long-format file: `series,date,value,facet`.
#[derive(Debug, Clone, PartialEq)]
pub struct TidyRow {
    pub series: String,
    pub date: NaiveDate,
    pub value: f64,
    pub facet: String,
}

pub fn write_tidy(rows: &[TidyRow]) -> String {
    let mut w = ::csv::WriterBuilder::new().terminator(::csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["series", "date", "value", "facet"]).expect("in-memory write");
    for r in rows {
        w.write_record([r.series.as_str(), &r.date.to_string(), &r.value.to_string(), r.facet.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to Vec")).expect("utf-8 fields")
}

/// Splits a tidy file into one series per `(series, facet)`, in first-seen order.
///
/// Rows go through the same date/value parsing as [`parse_csv`], and each
/// group must satisfy the usual series invariants at `freq`.
pub fn parse_tidy(text: &str, freq: Frequency, unit: Unit) -> Result<Vec<(String, String, TimeSeries)>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let expected = ["series", "date", "value", "facet"];
    if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(Error::Parse { line: 1, message: "header must be 'series,date,value,facet'".into() });
    }
    let mut groups: Vec<(String, String, Vec<Observation>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let date = parse_date(&rec[1], line)?;
        if is_missing(&rec[2]) {
            continue;
        }
        let value = parse_value(&rec[2], line)?;
        let key = (rec[0].to_string(), rec[3].to_string());
        match groups.iter_mut().find(|g| g.0 == key.0 && g.1 == key.1) {
            Some(g) => g.2.push(Observation::new(date, value)),
            None => groups.push((key.0, key.1, vec![Observation::new(date, value)])),
        }
    }
    groups
        .into_iter()
        .map(|(series, facet, points)| {
            let id = format!("{series}/{facet}");
            Ok((series, facet, TimeSeries::new(id, freq, unit, points)?))
        })
        .collect()
}

/// Reads a tidy file written by a report; see [`parse_tidy`].
pub fn load_tidy(path: impl AsRef<Path>, freq: Frequency, unit: Unit) -> Result<Vec<(String, String, TimeSeries)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tidy(&text, freq, unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::test_support::quarterly;
    use proptest::prelude::*;

    #[test]
    fn parses_two_quarters() {
        let load = parse_csv("date,value\n1980-01-01,11.0\n1980-04-01,10.2\n", "x", Frequency::Quarterly, Unit::PercentPoints).unwrap();
        assert_eq!(load.series.len(), 2);
        assert_eq!(load.dropped, 0);
    }

    #[test]
    fn bad_date_reports_line() {
        let err = parse_csv("date,value\n1980-13-01,1.0\n", "x", Frequency::Monthly, Unit::Ratio).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_csv("date,value\n1980-01-01,1.0\n1980-02-01,abc\n", "x", Frequency::Monthly, Unit::Ratio).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn missing_marker_is_dropped() {
        let load = parse_csv("date,value\n1980-01-01,.\n1980-04-01,2\n1980-07-01,\n", "x", Frequency::Quarterly, Unit::Ratio).unwrap();
        assert_eq!(load.series.len(), 1);
        assert_eq!(load.dropped, 2);
    }

    #[test]
    fn header_and_frequency_checked() {
        assert!(matches!(parse_csv("when,value\n", "x", Frequency::Annual, Unit::Ratio), Err(Error::Parse { line: 1, .. })));
        let err = parse_csv("date,value\n1980-02-01,1\n", "x", Frequency::Quarterly, Unit::Ratio).unwrap_err();
        assert!(matches!(err, Error::FrequencyMismatch(_)));
    }

    #[test]
    fn tidy_groups_by_series_and_facet() {
        let s = quarterly("a", 1980, &[1.0, 2.0]);
        let mut rows = Vec::new();
        for facet in ["level", "trend"] {
            for p in s.points() {
                rows.push(TidyRow { series: "a".into(), date: p.date, value: p.value, facet: facet.into() });
            }
        }
        let text = write_tidy(&rows);
        assert!(text.starts_with("series,date,value,facet\na,1980-01-01,1,level\n"));
        let groups = parse_tidy(&text, Frequency::Quarterly, Unit::Ratio).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[1].1, "trend");
        assert_eq!(groups[1].2.values().collect::<Vec<_>>(), vec![1.0, 2.0]);
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(v in prop::collection::vec(-1e12f64..1e12, 0..60)) {
            let s = quarterly("p", 1975, &v);
            let back = parse_csv(&write_csv(&s), "p", Frequency::Quarterly, Unit::PercentPoints).unwrap();
            prop_assert_eq!(back.series, s);
            prop_assert_eq!(back.dropped, 0);
        }
    }
}
