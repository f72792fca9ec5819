//! Report bundles: tidy figure data, the long-difference table, headline
//! numbers and a run manifest tying every file to the snapshot and config.
//!
//! Bundles are assembled in memory and contain no timestamps, so the same
//! snapshot and config always give byte-identical files.

pub mod config;
pub mod pipeline;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::csv::{write_tidy, TidyRow};
use crate::ingest::snapshot::sha256_hex;
use crate::ingest::Snapshot;
use crate::sensitivity::{
    end_date_sweep, long_difference_table, start_date_sweep, volatility_influence_report, LongDiffTable,
    SensitivitySweep, SweepMode,
};
use crate::series::{resample_annual, year_start, Annualization, TimeSeries, Window};
use crate::trend::fit_linear;

pub use config::Config;
pub use pipeline::{build_econ, resolve_series, EconSeries};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Series swept for the headline and the sweep figure panels.
pub const HEADLINE_SERIES: [&str; 4] = ["real_rate", "cost_of_capital", "profit_share", "markup"];

/// Long-difference table columns: real rate and cost of capital in pp,
/// profit share in pp, markup in markup-level units.
pub const TABLE1_COLUMNS: [&str; 4] = ["real_rate", "cost_of_capital", "profit_share_pp", "markup"];

/// Published long differences by end year, in [`TABLE1_COLUMNS`] order.
///
/// The markup column mixes magnitudes that do not square with the profit
/// share column, so it is reported but not compared.
pub const TABLE1_REFERENCE: [(i32, [f64; 4]); 6] = [
    (2012, [-3.65, -3.62, 7.58, 0.39]),
    (2014, [-3.95, -4.28, 10.35, 0.52]),
    (2016, [-2.54, -2.45, 8.40, 0.042]),
    (2018, [-0.41, -0.61, 2.90, 0.014]),
    (2020, [-1.78, -1.64, 2.06, 0.011]),
    (2022, [-2.32, -2.33, 6.64, 0.037]),
];

/// Published start-1984-versus-1980 trend changes, percent, in [`HEADLINE_SERIES`] order.
pub const HEADLINE_REFERENCE_PCT: [f64; 4] = [25.0, 37.0, 14.0, 14.0];
pub const HEADLINE_REFERENCE_DOLLARS: f64 = 260e9;
pub const HEADLINE_REFERENCE_PER_WORKER: f64 = 3000.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Files produced by one command, ending with `manifest.json`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportBundle {
    pub files: Vec<ReportFile>,
}

impl ReportBundle {
    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.name == name).map(|f| f.bytes.as_slice())
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(|b| std::str::from_utf8(b).ok())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|f| f.name.as_str())
    }

    pub fn manifest(&self) -> serde_json::Value {
        serde_json::from_slice(self.get(MANIFEST_FILE).expect("bundle has a manifest")).expect("manifest is JSON")
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for f in &self.files {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.bytes).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// One compared cell of the long-difference table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub row: String,
    pub column: String,
    pub reference: f64,
    /// `None` when the row could not be computed from the snapshot.
    pub computed: Option<f64>,
    pub difference: Option<f64>,
    pub within_tolerance: bool,
}

#[derive(Serialize)]
struct Software {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct SnapshotRef<'a> {
    vintage: &'a str,
    manifest_sha256: &'a str,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    software: Software,
    snapshot: SnapshotRef<'a>,
    config_sha256: String,
    config: &'a Config,
    outputs: BTreeMap<&'a str, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table1_check: Option<&'a [CellCheck]>,
    warnings: &'a [String],
}

/// Accumulates files, then seals them with a manifest.
struct BundleBuilder<'a> {
    command: &'a str,
    cfg: &'a Config,
    snap: &'a Snapshot,
    files: Vec<ReportFile>,
    checks: Option<Vec<CellCheck>>,
    warnings: Vec<String>,
}

impl<'a> BundleBuilder<'a> {
    fn new(command: &'a str, cfg: &'a Config, snap: &'a Snapshot) -> Self {
        BundleBuilder { command, cfg, snap, files: Vec::new(), checks: None, warnings: Vec::new() }
    }

    fn add(&mut self, name: impl Into<String>, text: String) {
        self.files.push(ReportFile { name: name.into(), bytes: text.into_bytes() });
    }

    fn finish(mut self) -> ReportBundle {
        let outputs = self.files.iter().map(|f| (f.name.as_str(), sha256_hex(&f.bytes))).collect();
        let manifest = RunManifest {
            command: self.command,
            software: Software { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
            snapshot: SnapshotRef { vintage: self.snap.vintage(), manifest_sha256: self.snap.manifest_sha256() },
            config_sha256: self.cfg.sha256(),
            config: self.cfg,
            outputs,
            table1_check: self.checks.as_deref(),
            warnings: &self.warnings,
        };
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        self.files.push(ReportFile { name: MANIFEST_FILE.into(), bytes: json.into_bytes() });
        ReportBundle { files: self.files }
    }
}

fn json_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report value serializes");
    s.push('\n');
    s
}

fn tidy_rows(rows: &mut Vec<TidyRow>, series: &str, facet: &str, points: impl IntoIterator<Item = (NaiveDate, f64)>) {
    rows.extend(points.into_iter().map(|(date, value)| TidyRow {
        series: series.to_string(),
        date,
        value,
        facet: facet.to_string(),
    }));
}

fn level_and_trend(rows: &mut Vec<TidyRow>, name: &str, s: &TimeSeries, window: &Window) -> Result<()> {
    tidy_rows(rows, name, "level", s.points().iter().map(|p| (p.date, p.value)));
    let fit = fit_linear(s, window).map_err(|e| e.in_stage(format!("trend {name}")))?;
    tidy_rows(rows, name, "trend", fit.dates.iter().copied().zip(fit.fitted()));
    Ok(())
}

fn sweep_rows(rows: &mut Vec<TidyRow>, name: &str, sweep: &SensitivitySweep) {
    tidy_rows(rows, name, "slope", sweep.fits.iter().map(|(&y, f)| (year_start(y), f.slope())));
    tidy_rows(rows, name, "pct_change", sweep.pct_change.iter().map(|(&y, &p)| (year_start(y), p)));
    if let Some(q) = &sweep.overlay {
        let (first, last) = (*sweep.fits.keys().next().expect("non-empty"), *sweep.fits.keys().last().expect("non-empty"));
        // four samples per year for a smooth curve
        let samples = (0..=4 * (last - first)).map(|k| {
            let x = first as f64 + k as f64 / 4.0;
            let date = year_start(first + k / 4) + chrono::Months::new(3 * (k % 4) as u32);
            (date, q.eval(x))
        });
        tidy_rows(rows, name, "overlay", samples);
    }
}

fn headline_sweeps(cfg: &Config, econ: &EconSeries) -> Result<Vec<SensitivitySweep>> {
    let s = &cfg.sweep;
    [&econ.real_rate, &econ.cost_of_capital, &econ.shares.profit_share, &econ.markup]
        .iter()
        .zip(HEADLINE_SERIES)
        .map(|(series, name)| {
            start_date_sweep(series, &s.start_years, s.end, s.base_year).map_err(|e| e.in_stage(format!("sweep {name}")))
        })
        .collect()
}

fn annual_value(s: &TimeSeries, year: i32, how: Annualization) -> Result<f64> {
    resample_annual(s, how)
        .series
        .get(year_start(year))
        .ok_or_else(|| Error::MissingYear { series: s.id().to_string(), year })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Headline {
    pub base_year: i32,
    pub compare_year: i32,
    pub end: NaiveDate,
    pub pct_change: BTreeMap<String, f64>,
    pub reference_pct_change: BTreeMap<String, f64>,
    /// Extra profit-share rise (ratio) implied by the compare-year slope over the base sample.
    pub profit_share_gap: f64,
    pub headline_year: i32,
    pub value_added: f64,
    pub employment: f64,
    pub profit_gap_dollars: f64,
    pub profit_gap_per_worker: f64,
    pub reference_dollars: f64,
    pub reference_per_worker: f64,
}

pub fn headline(cfg: &Config, econ: &EconSeries, sweeps: &[SensitivitySweep]) -> Result<Headline> {
    let compare = cfg.sweep.compare_year;
    let pct_change = HEADLINE_SERIES
        .iter()
        .zip(sweeps)
        .map(|(name, s)| (name.to_string(), s.pct_change[&compare]))
        .collect();
    let reference_pct_change = HEADLINE_SERIES
        .iter()
        .zip(HEADLINE_REFERENCE_PCT)
        .map(|(name, v)| (name.to_string(), v))
        .collect();
    let gap = sweeps[2].trend_gap(compare).expect("compare year is swept");
    let year = cfg.headline_year;
    let stage = |e: Error| e.in_stage("headline");
    let value_added = annual_value(&econ.accounts.value_added, year, Annualization::Mean).map_err(stage)?;
    let employment = annual_value(&econ.accounts.employment, year, Annualization::Mean).map_err(stage)?;
    let dollars = gap * value_added;
    Ok(Headline {
        base_year: cfg.sweep.base_year,
        compare_year: compare,
        end: cfg.sweep.end,
        pct_change,
        reference_pct_change,
        profit_share_gap: gap,
        headline_year: year,
        value_added,
        employment,
        profit_gap_dollars: dollars,
        profit_gap_per_worker: dollars / employment,
        reference_dollars: HEADLINE_REFERENCE_DOLLARS,
        reference_per_worker: HEADLINE_REFERENCE_PER_WORKER,
    })
}

pub fn table1(cfg: &Config, econ: &EconSeries) -> LongDiffTable {
    let series = vec![
        (TABLE1_COLUMNS[0].to_string(), econ.real_rate.clone()),
        (TABLE1_COLUMNS[1].to_string(), econ.cost_of_capital.clone()),
        (TABLE1_COLUMNS[2].to_string(), econ.profit_share_pp()),
        (TABLE1_COLUMNS[3].to_string(), econ.markup.clone()),
    ];
    long_difference_table(&series, cfg.table1.span, &cfg.table1.end_years, cfg.annualization)
}

/// Compares the first three columns against [`TABLE1_REFERENCE`].
pub fn table1_check(table: &LongDiffTable, tolerance_pp: f64) -> Vec<CellCheck> {
    let mut out = Vec::new();
    for (end, reference) in TABLE1_REFERENCE {
        for (col, &r) in TABLE1_COLUMNS.iter().zip(&reference).take(3) {
            let computed = table.cell(end, col);
            let difference = computed.map(|c| c - r);
            out.push(CellCheck {
                row: format!("{}-{end}", end - table.span as i32),
                column: col.to_string(),
                reference: r,
                computed,
                difference,
                within_tolerance: difference.is_some_and(|d| d.abs() <= tolerance_pp),
            });
        }
    }
    out
}

fn table1_csv(t: &LongDiffTable) -> String {
    let mut out = format!("rows,{}\n", t.columns.join(","));
    for r in &t.rows {
        let cells: Vec<String> = r.values.iter().map(f64::to_string).collect();
        writeln!(out, "{},{}", r.label(), cells.join(",")).expect("writing to String");
    }
    out
}

fn table1_markdown(t: &LongDiffTable) -> String {
    let how = match t.how {
        Annualization::Mean => "annual means",
        Annualization::Last => "last observation of each year",
    };
    let mut out = format!("## {}-year long differences by sample end date\n\n", t.span);
    writeln!(out, "Point estimates: {how}. Rates and profit share in pp, markup in levels.\n").expect("String");
    out.push_str("| Rows | Δ(i−ν) | ΔR_c | ΔΠ | ΔM |\n|---|---:|---:|---:|---:|\n");
    for r in &t.rows {
        let v = &r.values;
        writeln!(out, "| {} | {:.2} | {:.2} | {:.2} | {:.3} |", r.label(), v[0], v[1], v[2], v[3]).expect("String");
    }
    for w in &t.warnings {
        writeln!(out, "\n> {w}").expect("String");
    }
    out
}

fn add_table1(b: &mut BundleBuilder, cfg: &Config, econ: &EconSeries) {
    let t = table1(cfg, econ);
    b.add("table1.csv", table1_csv(&t));
    b.add("table1.md", table1_markdown(&t));
    b.warnings.extend(t.warnings.iter().cloned());
    let checks = table1_check(&t, cfg.table1.tolerance_pp);
    for c in checks.iter().filter(|c| !c.within_tolerance) {
        b.warnings.push(match c.computed {
            Some(v) => format!("table1 {} {}: computed {v:.2} vs reference {:.2}", c.row, c.column, c.reference),
            None => format!("table1 {} {}: not computable from snapshot", c.row, c.column),
        });
    }
    b.checks = Some(checks);
}

fn diagnose_rows(name: &str, s: &TimeSeries, window: &Window, vol_years: u32) -> Result<(Vec<TidyRow>, serde_json::Value)> {
    let report = volatility_influence_report(s, window, vol_years).map_err(|e| e.in_stage(format!("diagnose {name}")))?;
    let mut rows = Vec::new();
    tidy_rows(&mut rows, name, "value", report.rows.iter().map(|r| (r.date, r.value)));
    tidy_rows(&mut rows, name, "rolling_std", report.rows.iter().filter_map(|r| r.rolling_std.map(|v| (r.date, v))));
    tidy_rows(&mut rows, name, "influence", report.rows.iter().map(|r| (r.date, r.influence)));
    tidy_rows(&mut rows, name, "cooks_d", report.rows.iter().map(|r| (r.date, r.cooks_d)));
    tidy_rows(&mut rows, name, "leverage", report.rows.iter().map(|r| (r.date, r.leverage)));
    let argmax = |f: &dyn Fn(&crate::sensitivity::VolatilityRow) -> Option<f64>| {
        report
            .rows
            .iter()
            .filter_map(|r| f(r).map(|v| (r.date, v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(d, _)| d.to_string())
    };
    let summary = serde_json::json!({
        "series": name,
        "window": { "start": window.start(), "end": window.end() },
        "vol_years": vol_years,
        "n": report.fit.n(),
        "slope": report.fit.slope(),
        "rank_correlation_vol_abs_influence": report.rank_correlation,
        "peak_volatility_date": argmax(&|r| r.rolling_std),
        "peak_cooks_d_date": argmax(&|r| Some(r.cooks_d)),
    });
    Ok((rows, summary))
}

/// Every figure file, the sweeps, the long-difference table and the headline.
pub fn cmd_build(cfg: &Config, snap: &Snapshot) -> Result<ReportBundle> {
    cfg.validate()?;
    let econ = build_econ(cfg, snap)?;
    let w = &cfg.figure_window;
    let mut b = BundleBuilder::new("build", cfg, snap);

    let mut rows = Vec::new();
    level_and_trend(&mut rows, "real_rate", &econ.real_rate, w)?;
    b.add("fig1.csv", write_tidy(&rows));

    let mut rows = Vec::new();
    level_and_trend(&mut rows, "cost_of_capital", &econ.cost_of_capital, w)?;
    b.add("fig2.csv", write_tidy(&rows));

    let mut rows = Vec::new();
    level_and_trend(&mut rows, "profit_share", &econ.shares.profit_share, w)?;
    level_and_trend(&mut rows, "markup", &econ.markup, w)?;
    b.add("fig3.csv", write_tidy(&rows));

    let d = &cfg.diagnose;
    let s = econ.get(&d.series, snap)?;
    let (rows, summary) = diagnose_rows(&d.series, &s, &d.window, d.vol_years)?;
    b.add("fig4.csv", write_tidy(&rows));
    b.add("fig4_summary.json", json_text(&summary));

    let sweeps = headline_sweeps(cfg, &econ)?;
    let mut rows = Vec::new();
    for (name, sweep) in HEADLINE_SERIES.iter().zip(&sweeps) {
        sweep_rows(&mut rows, name, sweep);
    }
    b.add("sweeps.csv", write_tidy(&rows));

    add_table1(&mut b, cfg, &econ);
    b.add("headline.json", json_text(&headline(cfg, &econ, &sweeps)?));
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub series: String,
    pub mode: SweepMode,
    pub years: Vec<i32>,
    pub base_year: i32,
    /// Shared end (start sweep) or start (end sweep) date.
    pub fixed: NaiveDate,
}

impl SweepRequest {
    /// The configured start-date sweep for `series`.
    pub fn from_config(cfg: &Config, series: &str) -> Self {
        SweepRequest {
            series: series.to_string(),
            mode: SweepMode::StartSweep,
            years: cfg.sweep.start_years.clone(),
            base_year: cfg.sweep.base_year,
            fixed: cfg.sweep.end,
        }
    }
}

/// Per-year slope, percent change and overlay samples for one series.
pub fn cmd_sweep(cfg: &Config, snap: &Snapshot, req: &SweepRequest) -> Result<ReportBundle> {
    let s = resolve_series(cfg, snap, &req.series)?;
    let sweep = match req.mode {
        SweepMode::StartSweep => start_date_sweep(&s, &req.years, req.fixed, req.base_year),
        SweepMode::EndSweep => end_date_sweep(&s, &req.years, req.fixed, req.base_year),
    }
    .map_err(|e| e.in_stage(format!("sweep {}", req.series)))?;
    let mut rows = Vec::new();
    sweep_rows(&mut rows, &req.series, &sweep);
    let mut b = BundleBuilder::new("sweep", cfg, snap);
    b.add(format!("sweep_{}.csv", req.series), write_tidy(&rows));
    Ok(b.finish())
}

/// Volatility and influence diagnostics for one series over one window.
pub fn cmd_diagnose(cfg: &Config, snap: &Snapshot, series: &str, window: &Window, vol_years: u32) -> Result<ReportBundle> {
    let s = resolve_series(cfg, snap, series)?;
    let (rows, summary) = diagnose_rows(series, &s, window, vol_years)?;
    let mut b = BundleBuilder::new("diagnose", cfg, snap);
    b.add(format!("diagnose_{series}.csv"), write_tidy(&rows));
    b.add(format!("diagnose_{series}.json"), json_text(&summary));
    Ok(b.finish())
}

pub fn cmd_table1(cfg: &Config, snap: &Snapshot) -> Result<ReportBundle> {
    let econ = build_econ(cfg, snap)?;
    let mut b = BundleBuilder::new("table1", cfg, snap);
    add_table1(&mut b, cfg, &econ);
    Ok(b.finish())
}
