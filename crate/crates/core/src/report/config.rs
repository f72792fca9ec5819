//! Report configuration, read from JSON. Every field has a default, so `{}`
//! is a complete config.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::econ::{GrowthMode, DEFAULT_EQUITY_PREMIUM};
use crate::error::{Error, Result};
use crate::ingest::snapshot::sha256_hex;
use crate::series::{year_end, year_start, Annualization, Window};

/// Snapshot series id for each input role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesRoles {
    pub treasury_10y: String,
    pub baa: String,
    pub debt_share: String,
    pub depreciation: String,
    pub tax_rate: String,
    pub allowances: String,
    pub value_added: String,
    pub compensation: String,
    pub capital_stock: String,
    pub production_taxes: String,
    pub employment: String,
    pub capital_price_index: String,
}

impl Default for SeriesRoles {
    fn default() -> Self {
        SeriesRoles {
            treasury_10y: "GS10".into(),
            baa: "BAA".into(),
            debt_share: "debt_share".into(),
            depreciation: "depreciation_rate".into(),
            tax_rate: "tax_rate".into(),
            allowances: "pv_depreciation_allowances".into(),
            value_added: "gross_value_added".into(),
            compensation: "compensation".into(),
            capital_stock: "capital_stock".into(),
            production_taxes: "production_taxes".into(),
            employment: "employment".into(),
            capital_price_index: "capital_price_index".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub start_years: Vec<i32>,
    pub base_year: i32,
    pub end: NaiveDate,
    /// Start year whose slope is compared with the base in the headline.
    pub compare_year: i32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            start_years: (1980..=1989).collect(),
            base_year: 1980,
            end: year_end(2019),
            compare_year: 1984,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table1Config {
    pub span: u32,
    pub end_years: Vec<i32>,
    /// Allowed gap, in pp, between a computed cell and its reference value.
    pub tolerance_pp: f64,
}

impl Default for Table1Config {
    fn default() -> Self {
        Table1Config { span: 15, end_years: (2012..=2022).step_by(2).collect(), tolerance_pp: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub series: String,
    pub window: Window,
    pub vol_years: u32,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            series: "real_rate".into(),
            window: Window::new(year_start(1980), year_end(2022)).expect("ordered"),
            vol_years: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub series: SeriesRoles,
    /// Equity premium over the 10-year Treasury, pp.
    pub equity_premium: f64,
    pub include_production_taxes: bool,
    pub growth: GrowthMode,
    /// Trailing years averaged into expected capital inflation.
    pub inflation_years: u32,
    /// How quarterly values become the annual point estimates of the long-difference table.
    pub annualization: Annualization,
    /// Window of the trend lines drawn over the figure series.
    pub figure_window: Window,
    pub sweep: SweepConfig,
    pub table1: Table1Config,
    pub diagnose: DiagnoseConfig,
    /// Year whose value added and employment scale the headline dollar figures.
    pub headline_year: i32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            series: SeriesRoles::default(),
            equity_premium: DEFAULT_EQUITY_PREMIUM,
            include_production_taxes: true,
            growth: GrowthMode::Log,
            inflation_years: 3,
            annualization: Annualization::Mean,
            figure_window: Window::new(year_start(1984), year_end(2014)).expect("ordered"),
            sweep: SweepConfig::default(),
            table1: Table1Config::default(),
            diagnose: DiagnoseConfig::default(),
            headline_year: 2019,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !self.equity_premium.is_finite() {
            return bad(format!("equity_premium {} is not finite", self.equity_premium));
        }
        if self.inflation_years == 0 || self.diagnose.vol_years == 0 || self.table1.span == 0 {
            return bad("inflation_years, diagnose.vol_years and table1.span must be positive".into());
        }
        if !self.sweep.start_years.contains(&self.sweep.base_year) {
            return bad(format!("sweep.base_year {} is not in sweep.start_years", self.sweep.base_year));
        }
        if !self.sweep.start_years.contains(&self.sweep.compare_year) {
            return bad(format!("sweep.compare_year {} is not in sweep.start_years", self.sweep.compare_year));
        }
        if self.table1.tolerance_pp.is_nan() || self.table1.tolerance_pp < 0.0 {
            return bad("table1.tolerance_pp must be non-negative".into());
        }
        Ok(())
    }

    /// Canonical JSON: the serialized form with defaults filled in.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        sha256_hex(self.canonical_json().as_bytes())
    }
}
