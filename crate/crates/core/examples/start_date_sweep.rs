//! Start-date sweep: how much the trend moves as the sample start shifts.
//!
//! ```text
//! cargo run --example start_date_sweep [SERIES]
//! ```
//!
//! SERIES is a derived series (`real_rate`, `cost_of_capital`,
//! `profit_share`, `markup`, ...) built from the pinned snapshot.

use std::path::Path;

use trendscope::ingest::snapshot_load;
use trendscope::report::{build_econ, Config};
use trendscope::sensitivity::start_date_sweep;
use trendscope::series::year_end;

fn main() -> trendscope::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "real_rate".into());
    let snap = snapshot_load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/snapshot"))?;
    let cfg = Config::default();
    let s = build_econ(&cfg, &snap)?.get(&name, &snap)?;

    let years: Vec<i32> = (1980..=1989).collect();
    let sweep = start_date_sweep(&s, &years, year_end(2019), 1980)?;
    println!("{name}: base slope {:+.5} per year (1980-2019)", sweep.base_slope());
    for (year, pct) in &sweep.pct_change {
        let overlay = sweep.overlay.as_ref().map(|q| q.eval(*year as f64)).unwrap_or(f64::NAN);
        println!("  start {year}: slope {:+.5}  change {pct:+7.2}%  overlay {overlay:+7.2}%", sweep.slope(*year).unwrap());
    }
    Ok(())
}
