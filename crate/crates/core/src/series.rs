//! Frequency-aware time-series container and the window primitives built on it.
//!
//! Observations are stamped with calendar dates. Quarterly and monthly data
//! use the first day of the period (FRED convention), annual data uses
//! January 1. Values are always finite; missing observations are simply
//! absent from the series.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Annual,
    Quarterly,
    Monthly,
    Daily,
}

impl Frequency {
    /// Observations per calendar year, `None` for daily data.
    pub fn periods_per_year(self) -> Option<u32> {
        match self {
            Frequency::Annual => Some(1),
            Frequency::Quarterly => Some(4),
            Frequency::Monthly => Some(12),
            Frequency::Daily => None,
        }
    }

    /// Whether `date` is a legal stamp for this frequency.
    pub fn accepts(self, date: NaiveDate) -> bool {
        match self {
            Frequency::Annual => date.month() == 1 && date.day() == 1,
            Frequency::Quarterly => date.day() == 1 && (date.month() - 1).is_multiple_of(3),
            Frequency::Monthly => date.day() == 1,
            Frequency::Daily => true,
        }
    }

    /// FRED `frequency` query code.
    pub fn fred_code(self) -> &'static str {
        match self {
            Frequency::Annual => "a",
            Frequency::Quarterly => "q",
            Frequency::Monthly => "m",
            Frequency::Daily => "d",
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Frequency::Annual => "annual",
            Frequency::Quarterly => "quarterly",
            Frequency::Monthly => "monthly",
            Frequency::Daily => "daily",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    PercentPoints,
    Ratio,
    Dollars,
    Index,
    /// Head counts such as employment.
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub date: NaiveDate,
    pub value: f64,
}

impl Observation {
    pub fn new(date: NaiveDate, value: f64) -> Self {
        Observation { date, value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    freq: Frequency,
    unit: Unit,
    points: Vec<Observation>,
}

impl TimeSeries {
    /// Builds a series, checking date order, frequency stamps and finiteness.
    pub fn new(
        id: impl Into<String>,
        freq: Frequency,
        unit: Unit,
        points: Vec<Observation>,
    ) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: String| Error::InvalidSeries { id: id.clone(), reason };
        for (i, p) in points.iter().enumerate() {
            if !p.value.is_finite() {
                return Err(invalid(format!("non-finite value at {}", p.date)));
            }
            if !freq.accepts(p.date) {
                return Err(Error::FrequencyMismatch(format!(
                    "series '{id}': {} is not a {freq} date stamp",
                    p.date
                )));
            }
            if i > 0 && points[i - 1].date >= p.date {
                return Err(invalid(format!(
                    "dates not strictly increasing at {} (after {})",
                    p.date,
                    points[i - 1].date
                )));
            }
        }
        Ok(TimeSeries { id, freq, unit, points })
    }

    pub fn from_pairs(
        id: impl Into<String>,
        freq: Frequency,
        unit: Unit,
        pairs: impl IntoIterator<Item = (NaiveDate, f64)>,
    ) -> Result<Self> {
        let points = pairs.into_iter().map(|(d, v)| Observation::new(d, v)).collect();
        Self::new(id, freq, unit, points)
    }

    /// Points already known to satisfy the invariants (subsets of a valid series).
    fn derived(&self, points: Vec<Observation>) -> Self {
        TimeSeries { id: self.id.clone(), freq: self.freq, unit: self.unit, points }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn freq(&self) -> Frequency {
        self.freq
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.points.iter().map(|p| p.date)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.points.first().map(|p| p.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.points.last().map(|p| p.date)
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.points
            .binary_search_by_key(&date, |p| p.date)
            .ok()
            .map(|i| self.points[i].value)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    /// Applies `f` to every value, keeping dates. Fails if `f` produces a non-finite value.
    pub fn map_values(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| Observation::new(p.date, f(p.value)))
            .collect();
        Self::new(self.id.clone(), self.freq, self.unit, points)
    }

    /// Values at a common set of dates; both series must already be aligned.
    pub fn zip_with(
        &self,
        other: &TimeSeries,
        id: impl Into<String>,
        unit: Unit,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Result<Self> {
        if self.freq != other.freq {
            return Err(Error::FrequencyMismatch(format!(
                "'{}' is {} but '{}' is {}",
                self.id, self.freq, other.id, other.freq
            )));
        }
        if self.len() != other.len() || self.dates().ne(other.dates()) {
            return Err(Error::InvalidSeries {
                id: other.id.clone(),
                reason: format!("dates not aligned with '{}'", self.id),
            });
        }
        let points = self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| Observation::new(a.date, f(a.value, b.value)))
            .collect();
        Self::new(id, self.freq, unit, points)
    }
}

/// Fractional calendar year of a date: `year + (month-1)/12 + (day-1)/(12·days_in_month)`.
///
/// Period-start stamps of quarterly or monthly data land on exact multiples
/// of 1/4 or 1/12, so evenly spaced observations stay evenly spaced.
pub fn decimal_year(date: NaiveDate) -> f64 {
    let month0 = date.month0() as f64;
    let dim = days_in_month(date.year(), date.month()) as f64;
    date.year() as f64 + month0 / 12.0 + (date.day0() as f64) / (dim * 12.0)
}

fn days_in_month(year: i32, month: u32) -> u32 {
    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    let first_next = NaiveDate::from_ymd_opt(ny, nm, 1).expect("valid month start");
    first_next.pred_opt().expect("valid date").day()
}

pub fn year_start(year: i32) -> NaiveDate {
    NaiveDate::from_ymd_opt(year, 1, 1).expect("year in chrono range")
}

pub fn year_end(year: i32) -> NaiveDate {
    NaiveDate::from_ymd_opt(year, 12, 31).expect("year in chrono range")
}

/// Inclusive calendar window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WindowFields")]
pub struct Window {
    start: NaiveDate,
    end: NaiveDate,
}

#[derive(Deserialize)]
struct WindowFields {
    start: NaiveDate,
    end: NaiveDate,
}

impl TryFrom<WindowFields> for Window {
    type Error = Error;

    fn try_from(w: WindowFields) -> Result<Self> {
        Window::new(w.start, w.end)
    }
}

impl Window {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidWindow { start: start.to_string(), end: end.to_string() });
        }
        Ok(Window { start, end })
    }

    /// January 1 of `first` through December 31 of `last`.
    pub fn years(first: i32, last: i32) -> Result<Self> {
        Self::new(year_start(first), year_end(last))
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        Window::new(self.start.max(other.start), self.end.min(other.end)).ok()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

pub fn slice(s: &TimeSeries, w: &Window) -> TimeSeries {
    let lo = s.points.partition_point(|p| p.date < w.start);
    let hi = s.points.partition_point(|p| p.date <= w.end);
    s.derived(s.points[lo..hi.max(lo)].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Annualization {
    #[default]
    Mean,
    Last,
}

/// Annual series plus the years that had fewer observations than a full year.
#[derive(Debug, Clone, PartialEq)]
pub struct Annualized {
    pub series: TimeSeries,
    pub how: Annualization,
    pub partial_years: Vec<i32>,
}

pub fn resample_annual(s: &TimeSeries, how: Annualization) -> Annualized {
    if s.freq == Frequency::Annual {
        return Annualized { series: s.clone(), how, partial_years: Vec::new() };
    }
    let mut by_year: BTreeMap<i32, Vec<&Observation>> = BTreeMap::new();
    for p in &s.points {
        by_year.entry(p.date.year()).or_default().push(p);
    }
    let mut points = Vec::with_capacity(by_year.len());
    let mut partial_years = Vec::new();
    for (year, obs) in by_year {
        let value = match how {
            Annualization::Mean => obs.iter().map(|p| p.value).sum::<f64>() / obs.len() as f64,
            Annualization::Last => obs.last().expect("non-empty group").value,
        };
        let full = match s.freq.periods_per_year() {
            Some(per_year) => obs.len() == per_year as usize,
            None => {
                let first = obs.first().expect("non-empty group").date;
                let last = obs.last().expect("non-empty group").date;
                first.ordinal() <= 7 && last >= year_end(year) - chrono::Duration::days(7)
            }
        };
        if !full {
            partial_years.push(year);
        }
        points.push(Observation::new(year_start(year), value));
    }
    let series = TimeSeries { id: s.id.clone(), freq: Frequency::Annual, unit: s.unit, points };
    Annualized { series, how, partial_years }
}

fn years_before(date: NaiveDate, years: u32) -> NaiveDate {
    date.checked_sub_months(Months::new(12 * years))
        .expect("date arithmetic within chrono range")
}

/// Runs `reduce` over every full trailing window `(date - years, date]`.
///
/// A window is full when it holds exactly `years · periods_per_year`
/// observations. Daily series have no fixed count, so a daily window is full
/// when the series starts no later than the window does.
fn trailing_windows(
    s: &TimeSeries,
    years: u32,
    mut reduce: impl FnMut(&[Observation]) -> f64,
) -> Vec<Observation> {
    let expected = s.freq.periods_per_year().map(|p| (p * years) as usize);
    let first = match s.first_date() {
        Some(d) => d,
        None => return Vec::new(),
    };
    let mut out = Vec::new();
    let mut lo = 0;
    for hi in 0..s.points.len() {
        let date = s.points[hi].date;
        let lower = years_before(date, years);
        while s.points[lo].date <= lower {
            lo += 1;
        }
        let window = &s.points[lo..=hi];
        let full = match expected {
            Some(n) => window.len() == n,
            None => first <= lower + chrono::Duration::days(1),
        };
        if full {
            out.push(Observation::new(date, reduce(window)));
        }
    }
    out
}

/// Trailing moving average; windows short of the full count are dropped.
pub fn moving_average(s: &TimeSeries, years: u32) -> Result<TimeSeries> {
    if years == 0 {
        return Err(Error::Domain("moving-average window must be positive".into()));
    }
    if s.is_empty() {
        return Err(Error::EmptySeries(Some(s.id.clone())));
    }
    let points = trailing_windows(s, years, |w| {
        w.iter().map(|p| p.value).sum::<f64>() / w.len() as f64
    });
    Ok(s.derived(points))
}

/// Trailing sample standard deviation (divisor n - 1) over full windows.
pub fn rolling_std(s: &TimeSeries, years: u32) -> Result<TimeSeries> {
    if years == 0 {
        return Err(Error::Domain("rolling-std window must be positive".into()));
    }
    let points: Vec<Observation> = trailing_windows(s, years, sample_std)
        .into_iter()
        .filter(|p| !p.value.is_nan())
        .collect();
    if points.is_empty() {
        return Err(Error::NoFullWindow { years, needed: 2 });
    }
    Ok(s.derived(points))
}

fn sample_std(w: &[Observation]) -> f64 {
    let n = w.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = w.iter().map(|p| p.value).sum::<f64>() / n as f64;
    let ss: f64 = w.iter().map(|p| (p.value - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// `value(end_year) - value(end_year - span)` on the annualized series.
pub fn long_difference(
    s: &TimeSeries,
    span: u32,
    end_year: i32,
    how: Annualization,
) -> Result<f64> {
    let annual = resample_annual(s, how).series;
    let start_year = end_year - span as i32;
    let at = |year: i32| {
        annual
            .get(year_start(year))
            .ok_or_else(|| Error::MissingYear { series: s.id.clone(), year })
    };
    let start = at(start_year)?;
    let end = at(end_year)?;
    Ok(end - start)
}

/// Restricts every series to the dates they all share.
pub fn align(series: &[&TimeSeries]) -> Result<Vec<TimeSeries>> {
    let Some(first) = series.first() else {
        return Ok(Vec::new());
    };
    if let Some(other) = series.iter().find(|s| s.freq != first.freq) {
        return Err(Error::FrequencyMismatch(format!(
            "'{}' is {} but '{}' is {}",
            first.id, first.freq, other.id, other.freq
        )));
    }
    let mut common: Vec<NaiveDate> = first.dates().collect();
    for s in &series[1..] {
        common.retain(|d| s.points.binary_search_by_key(d, |p| p.date).is_ok());
    }
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(series
        .iter()
        .map(|s| {
            let points = s
                .points
                .iter()
                .filter(|p| common.binary_search(&p.date).is_ok())
                .copied()
                .collect();
            s.derived(points)
        })
        .collect())
}
