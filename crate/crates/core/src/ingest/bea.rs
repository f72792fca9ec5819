//! BEA interactive-table CSV exports.
//!
//! An export has a few title lines, then a header row starting with `Line`
//! followed by one column per period (`1980`, `1980Q1` or `1980M01`), then
//! one row per line item: line number, description, values. Values may carry
//! thousands separators; footnote markers such as `(D)` or `---` mean missing.

use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::{Frequency, Observation, TimeSeries};

use super::SeriesSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct BeaLine {
    pub line: u32,
    pub description: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeaTable {
    pub freq: Frequency,
    pub periods: Vec<NaiveDate>,
    pub lines: Vec<BeaLine>,
}

fn parse_period(label: &str) -> Option<(Frequency, NaiveDate)> {
    let label = label.trim();
    if let Some((y, q)) = label.split_once('Q') {
        let q: u32 = q.parse().ok().filter(|q| (1..=4).contains(q))?;
        return Some((Frequency::Quarterly, NaiveDate::from_ymd_opt(y.parse().ok()?, 3 * q - 2, 1)?));
    }
    if let Some((y, m)) = label.split_once('M') {
        return Some((Frequency::Monthly, NaiveDate::from_ymd_opt(y.parse().ok()?, m.parse().ok()?, 1)?));
    }
    if label.len() == 4 {
        return Some((Frequency::Annual, NaiveDate::from_ymd_opt(label.parse().ok()?, 1, 1)?));
    }
    None
}

fn parse_cell(cell: &str) -> Option<f64> {
    let cleaned: String = cell.trim().chars().filter(|c| *c != ',').collect();
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_bea_table(text: &str) -> Result<BeaTable> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.strip_prefix('\u{feff}').unwrap_or(text).as_bytes());
    let mut header: Option<(Frequency, Vec<NaiveDate>)> = None;
    let mut lines = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line_no = rec.position().map(|p| p.line()).unwrap_or(0);
        let first = rec.get(0).unwrap_or("").trim();
        match &header {
            None if first.eq_ignore_ascii_case("line") => {
                let mut freq = None;
                let mut periods = Vec::new();
                for label in rec.iter().skip(2) {
                    let (f, date) = parse_period(label).ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: format!("unrecognised period column '{label}'"),
                    })?;
                    if freq.is_some_and(|g| g != f) {
                        return Err(Error::FrequencyMismatch(format!("mixed period columns at line {line_no}")));
                    }
                    freq = Some(f);
                    periods.push(date);
                }
                let freq = freq.ok_or(Error::Parse { line: line_no, message: "no period columns".into() })?;
                header = Some((freq, periods));
            }
            None => {}
            Some((_, periods)) => {
                let Ok(line) = first.parse::<u32>() else {
                    // footnotes and trailing notes
                    continue;
                };
                let values: Vec<Option<f64>> =
                    (0..periods.len()).map(|k| rec.get(k + 2).and_then(parse_cell)).collect();
                lines.push(BeaLine {
                    line,
                    description: rec.get(1).unwrap_or("").trim().to_string(),
                    values,
                });
            }
        }
    }
    let (freq, periods) = header.ok_or(Error::Parse { line: 0, message: "no 'Line' header row".into() })?;
    Ok(BeaTable { freq, periods, lines })
}

/// Splits a `path#line` source id.
pub fn split_source_id(source_id: &str) -> Result<(&str, u32)> {
    let (path, line) = source_id
        .rsplit_once('#')
        .ok_or_else(|| Error::Config(format!("BEA source '{source_id}' must look like 'path#line'")))?;
    let line = line
        .parse()
        .map_err(|_| Error::Config(format!("BEA source '{source_id}' has a non-numeric line")))?;
    Ok((path, line))
}

/// Pulls one line item out of a table as a series (before scale/transform).
pub fn extract_line(table: &BeaTable, spec: &SeriesSpec, line: u32) -> Result<TimeSeries> {
    if table.freq != spec.freq {
        return Err(Error::FrequencyMismatch(format!(
            "series '{}' declared {} but the table is {}",
            spec.id, spec.freq, table.freq
        )));
    }
    let item = table
        .lines
        .iter()
        .find(|l| l.line == line)
        .ok_or_else(|| Error::InvalidSeries { id: spec.id.clone(), reason: format!("no line {line} in table") })?;
    if let Some(expected) = &spec.description {
        if !item.description.eq_ignore_ascii_case(expected.trim()) {
            return Err(Error::InvalidSeries {
                id: spec.id.clone(),
                reason: format!("line {line} is '{}', expected '{expected}'", item.description),
            });
        }
    }
    let points = table
        .periods
        .iter()
        .zip(&item.values)
        .filter_map(|(d, v)| v.map(|v| Observation::new(*d, v)))
        .collect();
    TimeSeries::new(spec.id.clone(), table.freq, spec.unit, points)
}

/// Parses a table export and applies the spec's scale and transform to one line.
pub fn series_from_table_text(text: &str, spec: &SeriesSpec) -> Result<TimeSeries> {
    let (_, line) = split_source_id(&spec.source_id)?;
    let table = parse_bea_table(text)?;
    spec.finish(extract_line(&table, spec, line)?)
}

pub fn load_bea_csv(base_dir: &Path, spec: &SeriesSpec) -> Result<TimeSeries> {
    let (path, _) = split_source_id(&spec.source_id)?;
    let path = base_dir.join(path);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    series_from_table_text(&text, spec)
}
