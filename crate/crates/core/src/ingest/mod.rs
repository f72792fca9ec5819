//! Data acquisition: `date,value` CSV files, BEA table exports, the FRED
//! observations endpoint and pinned snapshots.

pub mod bea;
pub mod csv;
pub mod fred;
pub mod snapshot;

use std::collections::BTreeMap;

use chrono::Months;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{resample_annual, year_start, Annualization, Frequency, Observation, TimeSeries, Unit};

pub use self::csv::{load_csv, load_tidy, parse_csv, parse_tidy, write_csv, write_tidy, CsvLoad, TidyRow};
pub use self::snapshot::{snapshot_create, snapshot_load, CreateOptions, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Local `date,value` file; `source_id` is its path.
    Csv,
    /// FRED series; `source_id` is the series id.
    Fred,
    /// BEA table export; `source_id` is `path#line`.
    BeaCsv,
}

/// Named transform applied after parsing and scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// Percent change from one year earlier.
    PctYoy,
    AnnualMean,
    AnnualLast,
    /// Annual values held constant across the four quarters of each year.
    QuarterlyStep,
}

/// Declares where one series comes from and what it should look like.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    /// Key under which the series is stored and looked up.
    pub id: String,
    pub source: Source,
    pub source_id: String,
    pub unit: Unit,
    /// Frequency of the raw data as fetched.
    pub freq: Frequency,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
    /// Multiplier applied to raw values (e.g. 1e9 for "billions of dollars").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Expected BEA line description, checked on extraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl SeriesSpec {
    pub fn new(id: &str, source: Source, source_id: &str, unit: Unit, freq: Frequency) -> Self {
        SeriesSpec {
            id: id.to_string(),
            source,
            source_id: source_id.to_string(),
            unit,
            freq,
            transform: None,
            scale: None,
            description: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let valid_id = !self.id.is_empty()
            && self.id.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c));
        if !valid_id {
            return Err(Error::Config(format!(
                "series id '{}' must be non-empty and use only [A-Za-z0-9_.-]",
                self.id
            )));
        }
        if self.source_id.trim().is_empty() {
            return Err(Error::Config(format!("series '{}' has an empty source_id", self.id)));
        }
        if let Some(scale) = self.scale {
            if !scale.is_finite() || scale == 0.0 {
                return Err(Error::Config(format!("series '{}' has invalid scale {scale}", self.id)));
            }
        }
        Ok(())
    }

    /// Applies `scale` then `transform` to a parsed series.
    pub fn finish(&self, raw: TimeSeries) -> Result<TimeSeries> {
        let scaled = match self.scale {
            Some(k) => raw.map_values(|v| v * k)?,
            None => raw,
        };
        let out = match self.transform {
            None => scaled,
            Some(t) => apply_transform(&scaled, t)?,
        };
        Ok(out.with_id(self.id.clone()))
    }
}

pub fn apply_transform(s: &TimeSeries, t: Transform) -> Result<TimeSeries> {
    match t {
        Transform::PctYoy => {
            let points = s
                .points()
                .iter()
                .filter_map(|p| {
                    let prev = s.get(p.date.checked_sub_months(Months::new(12))?)?;
                    (prev != 0.0).then(|| Observation::new(p.date, 100.0 * (p.value / prev - 1.0)))
                })
                .collect();
            TimeSeries::new(s.id(), s.freq(), Unit::PercentPoints, points)
        }
        Transform::AnnualMean => Ok(resample_annual(s, Annualization::Mean).series),
        Transform::AnnualLast => Ok(resample_annual(s, Annualization::Last).series),
        Transform::QuarterlyStep => {
            if s.freq() != Frequency::Annual {
                return Err(Error::FrequencyMismatch(format!(
                    "quarterly_step needs annual input, '{}' is {}",
                    s.id(),
                    s.freq()
                )));
            }
            let points = s
                .points()
                .iter()
                .flat_map(|p| {
                    let start = year_start(chrono::Datelike::year(&p.date));
                    (0..4).map(move |q| {
                        Observation::new(start + Months::new(3 * q), p.value)
                    })
                })
                .collect();
            TimeSeries::new(s.id(), Frequency::Quarterly, s.unit(), points)
        }
    }
}

/// Series keyed by id.
pub type SeriesMap = BTreeMap<String, TimeSeries>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::test_support::{annual, d};

    #[test]
    fn spec_validation() {
        let ok = SeriesSpec::new("GS10", Source::Fred, "GS10", Unit::PercentPoints, Frequency::Quarterly);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.id = "a/b".into();
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let mut empty = ok.clone();
        empty.source_id = " ".into();
        assert!(empty.validate().is_err());
    }

    #[test]
    fn transforms() {
        let a = annual("a", 2000, &[100.0, 110.0, 121.0]);
        let yoy = apply_transform(&a, Transform::PctYoy).unwrap();
        let v: Vec<f64> = yoy.values().collect();
        assert_eq!(v.len(), 2);
        assert!((v[0] - 10.0).abs() < 1e-12 && (v[1] - 10.0).abs() < 1e-12);

        let q = apply_transform(&a, Transform::QuarterlyStep).unwrap();
        assert_eq!(q.len(), 12);
        assert_eq!(q.get(d(2001, 7, 1)), Some(110.0));
        assert!(apply_transform(&q, Transform::QuarterlyStep).is_err());
        let back = apply_transform(&q, Transform::AnnualMean).unwrap();
        assert_eq!(back.values().collect::<Vec<_>>(), vec![100.0, 110.0, 121.0]);
    }

    #[test]
    fn finish_scales_then_renames() {
        let mut spec = SeriesSpec::new("y", Source::Csv, "y.csv", Unit::Dollars, Frequency::Annual);
        spec.scale = Some(1e9);
        let out = spec.finish(annual("raw", 2000, &[1.5])).unwrap();
        assert_eq!(out.id(), "y");
        assert_eq!(out.points()[0].value, 1.5e9);
    }
}
