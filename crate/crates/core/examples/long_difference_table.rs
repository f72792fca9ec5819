//! 15-year long differences by sample end date, annual means versus
//! year-end values.
//!
//! ```text
//! cargo run --example long_difference_table
//! ```

use std::path::Path;

use trendscope::ingest::snapshot_load;
use trendscope::report::{build_econ, Config};
use trendscope::sensitivity::long_difference_table;
use trendscope::series::Annualization;

fn main() -> trendscope::Result<()> {
    let snap = snapshot_load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/snapshot"))?;
    let econ = build_econ(&Config::default(), &snap)?;
    let series = vec![
        ("real_rate".to_string(), econ.real_rate.clone()),
        ("cost_of_capital".to_string(), econ.cost_of_capital.clone()),
        ("profit_share_pp".to_string(), econ.profit_share_pp()),
    ];
    let end_years: Vec<i32> = (2012..=2022).step_by(2).collect();
    for how in [Annualization::Mean, Annualization::Last] {
        let t = long_difference_table(&series, 15, &end_years, how);
        println!("{how:?}: {}", t.columns.join(" | "));
        for r in &t.rows {
            let cells: Vec<String> = r.values.iter().map(|v| format!("{v:+6.2}")).collect();
            println!("  {}  {}", r.label(), cells.join("  "));
        }
    }
    Ok(())
}
