//! Generates the synthetic input fixture and pins it as a snapshot.
//!
//! ```text
//! cargo run --example build_fixture -- [OUT_DIR]
//! ```
//!
//! Writes `OUT_DIR/fixture/` (CSV files, two BEA-style table exports and
//! `specs.json`) and `OUT_DIR/snapshot/`. `OUT_DIR` defaults to the crate's
//! `data/` directory and `OUT_DIR/snapshot` must not exist yet.
//!
//! The numbers are synthetic. Treasury and Baa yields follow approximate
//! annual averages of the published series; everything else is a smooth
//! path with plausible magnitudes plus seeded Gaussian noise.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Datelike, Months, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use trendscope::ingest::{snapshot_create, write_csv, CreateOptions, SeriesSpec, Source, Transform};
use trendscope::{Frequency, Observation, TimeSeries, Unit};

const SEED: u64 = 0x7472_656e_6473;
const FIRST: i32 = 1974;
const LAST: i32 = 2022;
pub const VINTAGE: &str = "synthetic-fixture-v1";
const TIMESTAMP: &str = "2026-01-01T00:00:00Z";

// approximate annual averages, 1974..=2022
const GS10: [f64; 49] = [
    7.56, 7.99, 7.61, 7.42, 8.41, 9.43, 11.43, 13.92, 13.01, 11.10, 12.46, 10.62, 7.67, 8.39, 8.85, 8.49,
    8.55, 7.86, 7.01, 5.87, 7.09, 6.57, 6.44, 6.35, 5.26, 5.65, 6.03, 5.02, 4.61, 4.01, 4.27, 4.29, 4.80,
    4.63, 3.66, 3.26, 3.22, 2.78, 1.80, 2.35, 2.54, 2.14, 1.84, 2.33, 2.91, 2.14, 0.89, 1.45, 2.95,
];
const BAA: [f64; 49] = [
    9.50, 10.61, 9.75, 8.97, 9.49, 10.69, 13.67, 16.04, 16.11, 13.55, 14.19, 12.72, 10.39, 10.58, 10.83,
    10.18, 10.36, 9.80, 8.98, 7.93, 8.63, 8.20, 8.05, 7.86, 7.22, 7.87, 8.36, 7.95, 7.80, 6.77, 6.39, 6.06,
    6.48, 6.48, 7.45, 7.30, 6.04, 5.66, 4.94, 5.10, 4.86, 5.00, 4.72, 4.44, 4.80, 4.38, 3.39, 3.29, 5.06,
];

/// Piecewise-linear path through `(x, y)` anchors, flat outside them.
fn path(anchors: &[(f64, f64)], x: f64) -> f64 {
    if x <= anchors[0].0 {
        return anchors[0].1;
    }
    for w in anchors.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x <= x1 {
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    anchors[anchors.len() - 1].1
}

fn round(v: f64, places: i32) -> f64 {
    let k = 10f64.powi(places);
    (v * k).round() / k
}

fn quarters(first: i32, last: i32) -> Vec<NaiveDate> {
    (first..=last)
        .flat_map(|y| (0..4).map(move |q| NaiveDate::from_ymd_opt(y, 3 * q + 1, 1).unwrap()))
        .collect()
}

/// Mid-period decimal year of a quarter start.
fn mid_quarter(d: NaiveDate) -> f64 {
    d.year() as f64 + (d.month0() as f64 + 1.5) / 12.0
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn noise(&mut self, sd: f64) -> f64 {
        Normal::new(0.0, sd).unwrap().sample(&mut self.rng)
    }

    fn series(&mut self, id: &str, freq: Frequency, unit: Unit, dates: &[NaiveDate], f: impl Fn(NaiveDate) -> f64, sd: f64, places: i32) -> TimeSeries {
        let points = dates.iter().map(|&d| Observation::new(d, round(f(d) + self.noise(sd), places))).collect();
        TimeSeries::new(id, freq, unit, points).unwrap()
    }
}

fn annual_anchor_path(values: &[f64], x: f64) -> f64 {
    let anchors: Vec<(f64, f64)> = values.iter().enumerate().map(|(k, &v)| (FIRST as f64 + k as f64 + 0.5, v)).collect();
    path(&anchors, x)
}

fn thousands(v: f64) -> String {
    let s = format!("{v:.1}");
    let (int, frac) = s.split_once('.').unwrap();
    let (sign, digits) = int.strip_prefix('-').map_or(("", int), |d| ("-", d));
    let mut grouped = String::new();
    for (k, c) in digits.chars().enumerate() {
        if k > 0 && (digits.len() - k) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(c);
    }
    format!("{sign}{grouped}.{frac}")
}

/// A BEA interactive-table style export, values in billions.
fn bea_table(title: &str, labels: &[String], lines: &[(u32, &str, Vec<f64>)]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).flexible(true).from_writer(Vec::new());
    w.write_record([title]).unwrap();
    w.write_record(["[Billions of dollars]"]).unwrap();
    w.write_record(["Synthetic fixture, not published data"]).unwrap();
    let mut header = vec!["Line".to_string(), String::new()];
    header.extend(labels.iter().cloned());
    w.write_record(&header).unwrap();
    for (line, desc, values) in lines {
        let mut rec = vec![line.to_string(), desc.to_string()];
        rec.extend(values.iter().map(|v| thousands(*v)));
        w.write_record(&rec).unwrap();
    }
    w.write_record(["Legend / Footnotes:"]).unwrap();
    w.write_record(["Values are generated; see specs.json for the line mapping."]).unwrap();
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap_or_else(|e| panic!("writing {name}: {e}"));
}

fn spec(id: &str, source: Source, source_id: &str, unit: Unit, freq: Frequency) -> SeriesSpec {
    SeriesSpec::new(id, source, source_id, unit, freq)
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"));
    let fixture = out.join("fixture");
    let snapshot = out.join("snapshot");
    std::fs::create_dir_all(&fixture).unwrap();

    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(SEED) };
    let q = quarters(FIRST, LAST);
    let years: Vec<NaiveDate> = (FIRST..=LAST).map(|y| NaiveDate::from_ymd_opt(y, 1, 1).unwrap()).collect();
    let yr = |d: NaiveDate| d.year() as f64;
    let mut specs = Vec::new();

    // market yields, quarterly
    let gs10 = g.series("GS10", Frequency::Quarterly, Unit::PercentPoints, &q, |d| annual_anchor_path(&GS10, mid_quarter(d)), 0.15, 2);
    let baa = g.series("BAA", Frequency::Quarterly, Unit::PercentPoints, &q, |d| annual_anchor_path(&BAA, mid_quarter(d)), 0.12, 2);
    write(&fixture, "GS10.csv", &write_csv(&gs10));
    write(&fixture, "BAA.csv", &write_csv(&baa));
    specs.push(spec("GS10", Source::Csv, "GS10.csv", Unit::PercentPoints, Frequency::Quarterly));
    specs.push(spec("BAA", Source::Csv, "BAA.csv", Unit::PercentPoints, Frequency::Quarterly));

    // capital goods price index, quarterly from 1970 so expected inflation covers 1974
    let inflation = [
        (1970.0, 5.0), (1974.0, 10.0), (1975.0, 11.0), (1976.5, 6.5), (1979.5, 9.0), (1981.0, 8.0),
        (1982.5, 3.5), (1984.0, 2.0), (1989.0, 3.0), (1992.0, 1.0), (1996.0, 0.5), (1999.0, 0.0),
        (2001.0, 1.0), (2003.0, 1.0), (2005.0, 4.0), (2008.0, 3.0), (2009.5, -1.0), (2011.0, 2.0),
        (2016.0, 0.5), (2018.5, 2.5), (2020.5, 1.0), (2021.5, 5.0), (2022.5, 9.0),
    ];
    let mut level = 40.0;
    let mut points = Vec::new();
    for d in quarters(1970, LAST) {
        level *= 1.0 + (path(&inflation, mid_quarter(d)) + g.noise(1.0)) / 400.0;
        points.push(Observation::new(d, round(level, 3)));
    }
    let cpi_k = TimeSeries::new("capital_price_index", Frequency::Quarterly, Unit::Index, points).unwrap();
    write(&fixture, "capital_price_index.csv", &write_csv(&cpi_k));
    specs.push(spec("capital_price_index", Source::Csv, "capital_price_index.csv", Unit::Index, Frequency::Quarterly));

    // annual inputs held constant within each year
    let debt = [(1974.0, 0.40), (1982.0, 0.45), (1990.0, 0.42), (2000.0, 0.30), (2009.0, 0.36), (2021.0, 0.25), (2022.0, 0.28)];
    let allowances = [(1974.0, 0.76), (1981.0, 0.80), (1982.0, 0.86), (1986.0, 0.86), (1987.0, 0.80), (2001.0, 0.82), (2002.0, 0.86), (2005.0, 0.83), (2017.0, 0.85), (2018.0, 0.90), (2022.0, 0.90)];
    let annual: [(&str, Unit, Box<dyn Fn(NaiveDate) -> f64>, f64, i32); 4] = [
        ("debt_share", Unit::Ratio, Box::new(move |d| path(&debt, yr(d))), 0.01, 3),
        ("depreciation_rate", Unit::PercentPoints, Box::new(move |d| 7.0 + 1.5 * (yr(d) - 1974.0) / 48.0), 0.05, 2),
        (
            "tax_rate",
            Unit::Ratio,
            Box::new(|d| match d.year() {
                ..=1986 => 0.495,
                1987 => 0.42,
                1988..=1992 => 0.385,
                1993..=2017 => 0.39,
                _ => 0.26,
            }),
            0.0,
            3,
        ),
        ("pv_depreciation_allowances", Unit::Ratio, Box::new(move |d| path(&allowances, yr(d))), 0.005, 3),
    ];
    for (id, unit, f, sd, places) in annual {
        let s = g.series(id, Frequency::Annual, unit, &years, f, sd, places);
        let file = format!("{id}.csv");
        write(&fixture, &file, &write_csv(&s));
        let mut sp = spec(id, Source::Csv, &file, unit, Frequency::Annual);
        sp.transform = Some(Transform::QuarterlyStep);
        specs.push(sp);
    }

    // national accounts, billions at annual rates
    let gva_path = [
        (1974.0, 850.0), (1980.0, 1550.0), (1990.0, 3200.0), (2000.0, 5900.0), (2008.0, 7600.0),
        (2009.5, 7250.0), (2019.0, 11000.0), (2020.3, 10500.0), (2022.9, 13400.0),
    ];
    let log_gva: Vec<(f64, f64)> = gva_path.iter().map(|&(x, y)| (x, f64::ln(y))).collect();
    let labor = [(1974.0, 0.66), (1980.0, 0.65), (1990.0, 0.64), (2000.0, 0.63), (2010.0, 0.59), (2019.0, 0.59), (2022.9, 0.58)];
    let taxes = [(1974.0, 0.095), (2000.0, 0.09), (2022.9, 0.085)];
    let mut gva = Vec::new();
    let mut comp = Vec::new();
    let mut tax = Vec::new();
    for &d in &q {
        let x = mid_quarter(d);
        let y = (path(&log_gva, x) + g.noise(0.006)).exp();
        gva.push(round(y, 1));
        comp.push(round(y * (path(&labor, x) + g.noise(0.004)), 1));
        tax.push(round(y * (path(&taxes, x) + g.noise(0.001)), 1));
    }
    let labels: Vec<String> = q.iter().map(|d| format!("{}Q{}", d.year(), d.month0() / 3 + 1)).collect();
    let t114 = "nipa_t114.csv";
    write(
        &fixture,
        t114,
        &bea_table(
            "Table 1.14. Gross Value Added of Domestic Corporate Business (synthetic)",
            &labels,
            &[
                (1, "Gross value added of corporate business", gva),
                (3, "Compensation of employees", comp),
                (7, "Taxes on production and imports less subsidies", tax),
            ],
        ),
    );
    for (id, line, desc) in [
        ("gross_value_added", 1, "Gross value added of corporate business"),
        ("compensation", 3, "Compensation of employees"),
        ("production_taxes", 7, "Taxes on production and imports less subsidies"),
    ] {
        let mut sp = spec(id, Source::BeaCsv, &format!("{t114}#{line}"), Unit::Dollars, Frequency::Quarterly);
        sp.scale = Some(1e9);
        sp.description = Some(desc.into());
        specs.push(sp);
    }

    // year-end capital stock at current cost
    let ky = [(1974.0, 1.55), (1982.0, 1.75), (2000.0, 1.45), (2019.0, 1.45), (2022.9, 1.40)];
    let stock: Vec<f64> = (FIRST..=LAST)
        .map(|y| {
            let x = y as f64 + 0.5;
            round(path(&log_gva, x).exp() * (path(&ky, x) + g.noise(0.01)), 1)
        })
        .collect();
    let t41 = "fa_t41.csv";
    let year_labels: Vec<String> = (FIRST..=LAST).map(|y| y.to_string()).collect();
    write(
        &fixture,
        t41,
        &bea_table(
            "Table 4.1. Current-Cost Net Stock of Private Nonresidential Fixed Assets by Industry Group and Legal Form of Organization (synthetic)",
            &year_labels,
            &[(1, "Corporate", stock)],
        ),
    );
    let mut sp = spec("capital_stock", Source::BeaCsv, &format!("{t41}#1"), Unit::Dollars, Frequency::Annual);
    sp.scale = Some(1e9);
    sp.transform = Some(Transform::QuarterlyStep);
    sp.description = Some("Corporate".into());
    specs.push(sp);

    // payroll employment, thousands, monthly
    let jobs = [
        (1974.0, 78000.0), (1975.3, 76500.0), (1980.0, 90500.0), (1982.9, 88800.0), (1990.5, 109500.0),
        (1991.5, 108300.0), (2001.2, 132500.0), (2003.5, 130000.0), (2008.0, 138300.0), (2010.0, 129700.0),
        (2019.9, 151900.0), (2020.3, 130400.0), (2022.9, 154500.0),
    ];
    let months: Vec<NaiveDate> = (0..12 * (LAST - FIRST + 1) as u32)
        .map(|k| NaiveDate::from_ymd_opt(FIRST, 1, 1).unwrap() + Months::new(k))
        .collect();
    let emp = g.series("PAYEMS", Frequency::Monthly, Unit::Count, &months, |d| path(&jobs, d.year() as f64 + d.month0() as f64 / 12.0), 60.0, 0);
    write(&fixture, "PAYEMS.csv", &write_csv(&emp));
    let mut sp = spec("employment", Source::Csv, "PAYEMS.csv", Unit::Count, Frequency::Monthly);
    sp.scale = Some(1e3);
    specs.push(sp);

    let mut json = serde_json::to_string_pretty(&specs).unwrap();
    json.push('\n');
    write(&fixture, "specs.json", &json);

    let mut note = String::new();
    writeln!(note, "Synthetic inputs generated by `cargo run --example build_fixture` (seed {SEED:#x}).").unwrap();
    writeln!(note, "Treasury and Baa yields track approximate annual averages; all other series are").unwrap();
    writeln!(note, "smooth synthetic paths with seeded noise. Do not use them as economic data.").unwrap();
    write(&fixture, "NOTE.md", &note);

    let opts = CreateOptions {
        vintage: VINTAGE.into(),
        timestamp: Some(TIMESTAMP.into()),
        base_dir: fixture.clone(),
        window: None,
    };
    let manifest = snapshot_create(&specs, &snapshot, &opts, None).unwrap_or_else(|e| panic!("snapshot: {e}"));
    println!("wrote {} series to {}", manifest.entries.len(), snapshot.display());
}
