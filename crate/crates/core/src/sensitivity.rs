//! Sample-window sweeps, long-difference tables and the volatility/influence
//! join used to explain which observations drive a trend.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::{
    long_difference, rolling_std, year_end, year_start, Annualization, TimeSeries,
    Window,
};
use crate::trend::{fit_linear, fit_quadratic, influence_report, QuadraticFit, TrendFit};

/// Smallest base slope magnitude, in y-units per year, that can anchor a percent change.
pub const MIN_BASE_SLOPE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Common end date, varying start year.
    StartSweep,
    /// Common start date, varying end year.
    EndSweep,
}

#[derive(Debug, Clone)]
pub struct SensitivitySweep {
    pub series_id: String,
    pub mode: SweepMode,
    pub base_year: i32,
    /// The endpoint every window shares.
    pub fixed: NaiveDate,
    pub fits: BTreeMap<i32, TrendFit>,
    /// `100·(β_y - β_base) / β_base`: positive when the trend is steeper
    /// in the base slope's direction, negative when it flattens or reverses.
    pub pct_change: BTreeMap<i32, f64>,
    /// Quadratic through the `(year, pct_change)` points; `None` with fewer than three years.
    pub overlay: Option<QuadraticFit>,
}

impl SensitivitySweep {
    pub fn base_slope(&self) -> f64 {
        self.fits[&self.base_year].slope()
    }

    pub fn slope(&self, year: i32) -> Option<f64> {
        self.fits.get(&year).map(TrendFit::slope)
    }

    /// Difference between the trend rise implied by `year`'s slope and the
    /// base slope, both taken over the base sample's time span.
    pub fn trend_gap(&self, year: i32) -> Option<f64> {
        let base = &self.fits[&self.base_year];
        let span = base.line.times.last()? - base.line.times.first()?;
        Some((self.slope(year)? - base.slope()) * span)
    }
}

pub fn start_date_sweep(
    s: &TimeSeries,
    start_years: &[i32],
    end: NaiveDate,
    base_year: i32,
) -> Result<SensitivitySweep> {
    sweep(s, start_years, base_year, SweepMode::StartSweep, end, |y| {
        Window::new(year_start(y), end)
    })
}

pub fn end_date_sweep(
    s: &TimeSeries,
    end_years: &[i32],
    start: NaiveDate,
    base_year: i32,
) -> Result<SensitivitySweep> {
    sweep(s, end_years, base_year, SweepMode::EndSweep, start, |y| {
        Window::new(start, year_end(y))
    })
}

fn sweep(
    s: &TimeSeries,
    years: &[i32],
    base_year: i32,
    mode: SweepMode,
    fixed: NaiveDate,
    window_for: impl Fn(i32) -> Result<Window> + Sync,
) -> Result<SensitivitySweep> {
    let mut years = years.to_vec();
    years.sort_unstable();
    years.dedup();
    if !years.contains(&base_year) {
        return Err(Error::Config(format!(
            "base year {base_year} is not among the sweep years {years:?}"
        )));
    }
    let fits: Vec<(i32, TrendFit)> = years
        .par_iter()
        .map(|&year| {
            window_for(year)
                .and_then(|w| fit_linear(s, &w))
                .map(|fit| (year, fit))
                .map_err(|e| Error::YearFit { year, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let fits: BTreeMap<i32, TrendFit> = fits.into_iter().collect();

    let base = fits[&base_year].slope();
    if base.abs() < MIN_BASE_SLOPE {
        return Err(Error::BaseSlopeZero { year: base_year, slope: base });
    }
    let pct_change: BTreeMap<i32, f64> = fits
        .iter()
        .map(|(&y, f)| {
            let pct = if y == base_year { 0.0 } else { 100.0 * (f.slope() - base) / base };
            (y, pct)
        })
        .collect();
    let overlay = if pct_change.len() >= 3 {
        let pts: Vec<(f64, f64)> = pct_change.iter().map(|(&y, &p)| (y as f64, p)).collect();
        Some(fit_quadratic(&pts)?)
    } else {
        None
    };
    Ok(SensitivitySweep {
        series_id: s.id().to_string(),
        mode,
        base_year,
        fixed,
        fits,
        pct_change,
        overlay,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongDiffRow {
    pub start_year: i32,
    pub end_year: i32,
    /// One entry per table column, in column order.
    pub values: Vec<f64>,
}

impl LongDiffRow {
    /// `"1997-2012"`
    pub fn label(&self) -> String {
        format!("{}-{}", self.start_year, self.end_year)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongDiffTable {
    pub span: u32,
    pub how: Annualization,
    pub columns: Vec<String>,
    pub rows: Vec<LongDiffRow>,
    /// One message per omitted row.
    pub warnings: Vec<String>,
}

impl LongDiffTable {
    pub fn cell(&self, end_year: i32, column: &str) -> Option<f64> {
        let col = self.columns.iter().position(|c| c == column)?;
        self.rows.iter().find(|r| r.end_year == end_year).map(|r| r.values[col])
    }
}

/// Long differences over a shifting window, one row per end year.
///
/// A row is dropped, with a warning, when any column lacks either endpoint.
pub fn long_difference_table(
    series: &[(String, TimeSeries)],
    span: u32,
    end_years: &[i32],
    how: Annualization,
) -> LongDiffTable {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &end_year in end_years {
        let cells: Result<Vec<f64>> = series
            .iter()
            .map(|(_, s)| long_difference(s, span, end_year, how))
            .collect();
        match cells {
            Ok(values) => rows.push(LongDiffRow { start_year: end_year - span as i32, end_year, values }),
            Err(e) => {
                let msg = format!("row {}-{end_year} omitted: {e}", end_year - span as i32);
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }
    LongDiffTable {
        span,
        how,
        columns: series.iter().map(|(label, _)| label.clone()).collect(),
        rows,
        warnings,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityRow {
    pub date: NaiveDate,
    pub value: f64,
    /// `None` during the rolling-window warm-up.
    pub rolling_std: Option<f64>,
    pub influence: f64,
    pub cooks_d: f64,
    pub leverage: f64,
}

#[derive(Debug, Clone)]
pub struct VolatilityReport {
    pub fit: TrendFit,
    pub rows: Vec<VolatilityRow>,
    /// Spearman correlation between rolling volatility and |IF|, when defined.
    pub rank_correlation: Option<f64>,
}

/// Per-date join of value, rolling volatility and trend-influence diagnostics.
///
/// Volatility is computed on the whole series, so windows reaching back
/// before `w` still produce values inside it.
pub fn volatility_influence_report(
    s: &TimeSeries,
    w: &Window,
    vol_window: u32,
) -> Result<VolatilityReport> {
    let fit = fit_linear(s, w)?;
    let vol = rolling_std(s, vol_window)?;
    let infl = influence_report(&fit, s)?;
    let rows: Vec<VolatilityRow> = (0..fit.n())
        .map(|i| VolatilityRow {
            date: fit.dates[i],
            value: fit.line.values[i],
            rolling_std: vol.get(fit.dates[i]),
            influence: infl.influence[i],
            cooks_d: infl.cooks_d[i],
            leverage: infl.leverage[i],
        })
        .collect();
    let (vols, abs_if): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.rolling_std.map(|v| (v, r.influence.abs())))
        .unzip();
    let rank_correlation = spearman(&vols, &abs_if);
    Ok(VolatilityReport { fit, rows, rank_correlation })
}

/// Average ranks (1-based), ties sharing their mean rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 3 {
        return None;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        None
    } else {
        Some(sab / (saa * sbb).sqrt())
    }
}
