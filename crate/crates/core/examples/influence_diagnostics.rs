//! Leverage, influence and Cook's distance for a short series with an outlier.
//!
//! ```text
//! cargo run --example influence_diagnostics
//! ```

use trendscope::sensitivity::volatility_influence_report;
use trendscope::trend::{fit_linear, influence_report};
use trendscope::{Frequency, TimeSeries, Unit, Window};

fn main() -> trendscope::Result<()> {
    let values = [2.0, 2.2, 2.1, 2.5, 2.6, 2.4, 2.9, 3.0, 6.0, 3.2, 3.3, 3.6];
    let s = TimeSeries::from_pairs(
        "x",
        Frequency::Annual,
        Unit::Index,
        values.iter().enumerate().map(|(k, &v)| (chrono::NaiveDate::from_ymd_opt(2000 + k as i32, 1, 1).unwrap(), v)),
    )?;
    let w = Window::years(2000, 2011)?;
    let fit = fit_linear(&s, &w)?;
    let r = influence_report(&fit, &s)?;
    println!("slope {:.4}", fit.slope());
    println!("date        value  leverage  influence  cooks_d  slope_without");
    for i in 0..r.dates.len() {
        println!(
            "{}  {:5.2}  {:8.4}  {:+9.4}  {:7.4}  {:13.4}",
            r.dates[i], values[i], r.leverage[i], r.influence[i], r.cooks_d[i], r.loo_slopes[i]
        );
    }

    let vol = volatility_influence_report(&s, &w, 3)?;
    println!("rank correlation of 3-year volatility with |influence|: {:?}", vol.rank_correlation);
    Ok(())
}
