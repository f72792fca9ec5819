//! Fits a linear trend to a quarterly series over two windows.
//!
//! ```text
//! cargo run --example fit_trend
//! ```

use trendscope::series::slice;
use trendscope::trend::fit_linear;
use trendscope::{Frequency, TimeSeries, Unit, Window};

fn main() -> trendscope::Result<()> {
    // a declining rate with a burst early on
    let pairs: Vec<(chrono::NaiveDate, f64)> = (0..160)
        .map(|k| {
            let date = chrono::NaiveDate::from_ymd_opt(1980 + k / 4, 3 * (k % 4) as u32 + 1, 1).unwrap();
            let t = k as f64 / 4.0;
            let burst = if (4..12).contains(&k) { 3.0 } else { 0.0 };
            (date, 6.0 - 0.12 * t + burst + 0.4 * (t * 1.7).sin())
        })
        .collect();
    let s = TimeSeries::from_pairs("rate", Frequency::Quarterly, Unit::PercentPoints, pairs)?;

    for w in [Window::years(1980, 2019)?, Window::years(1984, 2019)?] {
        let fit = fit_linear(&s, &w)?;
        println!(
            "{w}: n={} slope={:+.4} pp/yr intercept={:.3} r2={:.3}",
            fit.n(),
            fit.slope(),
            fit.intercept(),
            fit.r2()
        );
    }
    let tail = slice(&s, &Window::years(2015, 2019)?);
    println!("last five years: {} observations, mean {:.3}", tail.len(), tail.values().sum::<f64>() / tail.len() as f64);
    Ok(())
}
