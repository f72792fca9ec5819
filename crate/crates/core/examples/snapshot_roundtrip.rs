//! Pins two local CSV files in a snapshot, reloads it, then shows that a
//! tampered payload is caught.
//!
//! ```text
//! cargo run --example snapshot_roundtrip
//! ```

use trendscope::ingest::{snapshot_create, snapshot_load, CreateOptions, SeriesSpec, Source};
use trendscope::{Frequency, Unit};

fn main() -> trendscope::Result<()> {
    let dir = std::env::temp_dir().join(format!("trendscope-snapshot-{}", std::process::id()));
    let inputs = dir.join("inputs");
    std::fs::create_dir_all(&inputs).unwrap();
    std::fs::write(inputs.join("rate.csv"), "date,value\n2000-01-01,5.1\n2000-04-01,.\n2000-07-01,4.8\n").unwrap();
    std::fs::write(inputs.join("level.csv"), "date,value\n2000-01-01,100\n2001-01-01,104\n").unwrap();

    let specs = [
        SeriesSpec::new("rate", Source::Csv, "rate.csv", Unit::PercentPoints, Frequency::Quarterly),
        SeriesSpec::new("level", Source::Csv, "level.csv", Unit::Index, Frequency::Annual),
    ];
    let opts = CreateOptions { vintage: "example".into(), timestamp: None, base_dir: inputs, window: None };
    let snap_dir = dir.join("snapshot");
    let manifest = snapshot_create(&specs, &snap_dir, &opts, None)?;
    for e in &manifest.entries {
        println!("{} -> {} sha256 {}… ({} obs)", e.spec.id, e.file, &e.sha256[..16], e.observations);
    }

    let snap = snapshot_load(&snap_dir)?;
    println!("reloaded: {:?}", snap.series("rate")?.values().collect::<Vec<_>>());

    std::fs::write(snap_dir.join("payloads/level.csv"), "date,value\n2000-01-01,100\n2001-01-01,105\n").unwrap();
    match snapshot_load(&snap_dir) {
        Err(e) => println!("after tampering: {e}"),
        Ok(_) => println!("tampering went unnoticed"),
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
