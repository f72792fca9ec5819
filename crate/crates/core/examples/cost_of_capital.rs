//! Cost of finance, Hall-Jorgenson cost of capital, profit share and markup
//! from the pinned snapshot, printed for a few years.
//!
//! ```text
//! cargo run --example cost_of_capital
//! ```

use std::path::Path;

use trendscope::ingest::snapshot_load;
use trendscope::report::{build_econ, Config};
use trendscope::series::{resample_annual, year_start, Annualization};

fn main() -> trendscope::Result<()> {
    let snap = snapshot_load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/snapshot"))?;
    let econ = build_econ(&Config::default(), &snap)?;
    let annual = |s: &trendscope::TimeSeries| resample_annual(s, Annualization::Mean).series;
    let cols = [
        ("nu", annual(&econ.expected_inflation)),
        ("i-nu", annual(&econ.real_rate)),
        ("rho", annual(&econ.cost_of_finance)),
        ("R_c", annual(&econ.cost_of_capital)),
        ("WL/Y", annual(&econ.shares.labor_share)),
        ("Pi", annual(&econ.shares.profit_share)),
        ("M", annual(&econ.markup)),
    ];
    print!("year");
    for (name, _) in &cols {
        print!("{name:>9}");
    }
    println!();
    for year in (1980..=2020).step_by(5) {
        print!("{year}");
        for (_, s) in &cols {
            print!("{:9.3}", s.get(year_start(year)).unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
