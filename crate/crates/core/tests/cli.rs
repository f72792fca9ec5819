use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use trendscope::ingest::{load_tidy, snapshot_create, CreateOptions, SeriesSpec, Source};
use trendscope::{Frequency, Unit};

fn snapshot_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/snapshot")
}

fn run(snapshot: &Path, out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trendscope"))
        .arg("--offline")
        .arg("--snapshot")
        .arg(snapshot)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn build_writes_every_output_and_figures_parse_back() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&snapshot_dir(), tmp.path(), &["build", "--start", "1984", "--end", "2014"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "sweeps.csv", "table1.csv", "table1.md", "headline.json", "manifest.json"] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    for f in ["fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv"] {
        let groups = load_tidy(tmp.path().join(f), Frequency::Quarterly, Unit::PercentPoints).unwrap();
        assert!(!groups.is_empty());
        for (series, facet, s) in groups {
            if facet == "trend" {
                assert!(s.first_date().unwrap() >= chrono::NaiveDate::from_ymd_opt(1984, 1, 1).unwrap(), "{series}");
                assert!(s.last_date().unwrap() <= chrono::NaiveDate::from_ymd_opt(2014, 12, 31).unwrap(), "{series}");
            }
        }
    }
    let sweeps = load_tidy(tmp.path().join("sweeps.csv"), Frequency::Quarterly, Unit::Ratio).unwrap();
    assert_eq!(sweeps.iter().filter(|g| g.1 == "pct_change").count(), 4);

    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["snapshot"]["vintage"], "synthetic-fixture-v1");
    assert_eq!(manifest["config"]["figure_window"]["start"], "1984-01-01");
    assert_eq!(manifest["outputs"].as_object().unwrap().len(), 9);
}

#[test]
fn missing_snapshot_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&tmp.path().join("absent"), tmp.path(), &["build"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no-snapshot"), "{}", stderr(&o));
}

#[test]
fn short_window_is_a_numerical_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&snapshot_dir(), tmp.path(), &["diagnose", "--start", "1990-01-01", "--end", "1990-06-30"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("insufficient-points"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"sweep":{"base_year":1970}}"#).unwrap();
    let o = run(&snapshot_dir(), tmp.path(), &["--config", cfg.to_str().unwrap(), "build"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = run(&snapshot_dir(), tmp.path(), &["sweep", "--series", "no_such_series"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = run(&snapshot_dir(), tmp.path(), &["sweep", "--series", "real_rate", "--years", "1981..1985", "--base", "1980"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn sweep_has_zero_base_row() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&snapshot_dir(), tmp.path(), &["sweep", "--series", "real_rate", "--base", "1980"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(tmp.path().join("sweep_real_rate.csv")).unwrap();
    assert!(text.contains("real_rate,1980-01-01,0,pct_change\n"), "{text}");
    assert!(text.contains(",overlay\n"));

    let o = run(&snapshot_dir(), tmp.path(), &["sweep", "--series", "markup", "--mode", "end", "--start", "1980-01-01", "--years", "2010,2014,2019", "--base", "2019"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn table1_switches_annualization() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&snapshot_dir(), tmp.path(), &["table1", "--annualization", "last"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let md = std::fs::read_to_string(tmp.path().join("table1.md")).unwrap();
    assert!(md.contains("last observation of each year"));
    let manifest = std::fs::read_to_string(tmp.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"annualization\": \"last\""));
}

#[test]
fn constant_series_diagnostics_are_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = tmp.path().join("in");
    std::fs::create_dir_all(&inputs).unwrap();
    let mut csv = String::from("date,value\n");
    for y in 1990..2000 {
        for m in [1, 4, 7, 10] {
            csv.push_str(&format!("{y}-{m:02}-01,2.5\n"));
        }
    }
    std::fs::write(inputs.join("flat.csv"), csv).unwrap();
    let spec = SeriesSpec::new("flat", Source::Csv, "flat.csv", Unit::PercentPoints, Frequency::Quarterly);
    let snap = tmp.path().join("snap");
    let opts = CreateOptions { vintage: "t".into(), timestamp: Some("2000-01-01T00:00:00Z".into()), base_dir: inputs, window: None };
    snapshot_create(&[spec], &snap, &opts, None).unwrap();

    let out = tmp.path().join("out");
    let o = run(&snap, &out, &["diagnose", "--series", "flat", "--start", "1990-01-01", "--end", "1999-12-31", "--vol-years", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for (_, facet, s) in load_tidy(out.join("diagnose_flat.csv"), Frequency::Quarterly, Unit::Ratio).unwrap() {
        if facet != "value" && facet != "leverage" {
            assert!(s.values().all(|v| v == 0.0), "{facet} not zero");
        }
    }
}
