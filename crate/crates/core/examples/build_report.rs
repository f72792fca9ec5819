//! Builds the full report bundle from the pinned snapshot.
//!
//! ```text
//! cargo run --example build_report -- [OUT_DIR]
//! ```

use std::path::{Path, PathBuf};

use trendscope::ingest::snapshot_load;
use trendscope::report::{cmd_build, Config};

fn main() -> trendscope::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("trendscope-report"));
    let snap = snapshot_load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/snapshot"))?;
    let cfg = Config::default();
    let bundle = cmd_build(&cfg, &snap)?;
    bundle.write_to(&out)?;

    println!("snapshot {} ({})", snap.vintage(), &snap.manifest_sha256()[..12]);
    for name in bundle.names() {
        println!("  {}", out.join(name).display());
    }
    println!();
    print!("{}", bundle.text("table1.md").unwrap_or_default());
    println!();
    print!("{}", bundle.text("headline.json").unwrap_or_default());
    Ok(())
}
