//! Sample-window sensitivity analysis for macro trend estimates.
//!
//! The crate builds real-rate, cost-of-capital, profit-share and markup
//! series from market and national-accounts inputs, fits linear trends over
//! sliding sample windows and reports which observations drive each trend.
//!
//! - [`series`]: dated series, windows, resampling and rolling statistics
//! - [`trend`]: OLS line and quadratic fits, leverage, influence, Cook's distance
//! - [`sensitivity`]: start/end-date sweeps, long-difference tables, volatility joins
//! - [`econ`]: cost of finance, cost of capital, profit share, markup
//! - [`ingest`]: CSV, BEA table exports, the FRED client and pinned snapshots
//! - [`report`]: configuration and the tidy report bundle behind the CLI

pub mod econ;
pub mod error;
mod extended;
pub mod ingest;
pub mod report;
pub mod sensitivity;
pub mod series;
pub mod trend;

pub use error::{Error, ErrorCategory, Result};
pub use series::{Frequency, Observation, TimeSeries, Unit, Window};
