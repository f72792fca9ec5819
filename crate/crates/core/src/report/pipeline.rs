//! Derived economic series built from a snapshot's inputs.

use crate::econ::{
    cost_of_capital, cost_of_finance, expected_inflation, markup, profit_decomposition, real_rate,
    AccountsBundle, CapitalCostInputs, ProfitDecomposition, ProfitOptions,
};
use crate::error::{Error, Result};
use crate::ingest::Snapshot;
use crate::series::{TimeSeries, Unit};

use super::config::Config;

/// Names accepted by [`EconSeries::get`] besides raw snapshot ids.
pub const DERIVED_SERIES: [&str; 9] = [
    "expected_inflation",
    "real_rate",
    "cost_of_finance",
    "cost_of_capital",
    "labor_share",
    "capital_share",
    "tax_share",
    "profit_share",
    "markup",
];

#[derive(Debug, Clone)]
pub struct EconSeries {
    pub expected_inflation: TimeSeries,
    pub real_rate: TimeSeries,
    pub cost_of_finance: TimeSeries,
    pub cost_of_capital: TimeSeries,
    pub shares: ProfitDecomposition,
    pub markup: TimeSeries,
    pub accounts: AccountsBundle,
}

fn input(snap: &Snapshot, id: &str) -> Result<TimeSeries> {
    snap.series(id).cloned().map_err(|e| e.in_stage("inputs"))
}

pub fn build_econ(cfg: &Config, snap: &Snapshot) -> Result<EconSeries> {
    let r = &cfg.series;
    let accounts = AccountsBundle {
        value_added: input(snap, &r.value_added)?,
        compensation: input(snap, &r.compensation)?,
        capital_stock: input(snap, &r.capital_stock)?,
        production_taxes: input(snap, &r.production_taxes)?,
        employment: input(snap, &r.employment)?,
        capital_price_index: input(snap, &r.capital_price_index)?,
    };
    accounts.validate().map_err(|e| e.in_stage("accounts"))?;

    let nu = expected_inflation(&accounts.capital_price_index, cfg.inflation_years, cfg.growth)
        .map_err(|e| e.in_stage("expected_inflation"))?;
    let treasury = input(snap, &r.treasury_10y)?;
    let real = real_rate(&treasury, &nu).map_err(|e| e.in_stage("real_rate"))?;
    let inputs = CapitalCostInputs {
        treasury_10y: treasury,
        baa: input(snap, &r.baa)?,
        equity_premium: cfg.equity_premium,
        debt_share: input(snap, &r.debt_share)?,
        expected_inflation: nu.clone(),
        depreciation: input(snap, &r.depreciation)?,
        tax_rate: input(snap, &r.tax_rate)?,
        allowances: input(snap, &r.allowances)?,
    };
    let rho = cost_of_finance(&inputs).map_err(|e| e.in_stage("cost_of_finance"))?;
    let rc = cost_of_capital(&inputs).map_err(|e| e.in_stage("cost_of_capital"))?;
    let opts = ProfitOptions { include_production_taxes: cfg.include_production_taxes };
    let shares = profit_decomposition(&accounts, &rc, opts).map_err(|e| e.in_stage("profit_share"))?;
    let m = markup(&shares.profit_share).map_err(|e| e.in_stage("markup"))?;
    Ok(EconSeries {
        expected_inflation: nu,
        real_rate: real,
        cost_of_finance: rho,
        cost_of_capital: rc,
        shares,
        markup: m,
        accounts,
    })
}

impl EconSeries {
    /// Profit share in percentage points rather than as a ratio.
    pub fn profit_share_pp(&self) -> TimeSeries {
        self.shares
            .profit_share
            .map_values(|v| 100.0 * v)
            .expect("scaling keeps values finite")
            .with_unit(Unit::PercentPoints)
    }

    /// A derived series by name, falling back to snapshot ids.
    pub fn get(&self, name: &str, snap: &Snapshot) -> Result<TimeSeries> {
        Ok(match name {
            "expected_inflation" => self.expected_inflation.clone(),
            "real_rate" => self.real_rate.clone(),
            "cost_of_finance" => self.cost_of_finance.clone(),
            "cost_of_capital" => self.cost_of_capital.clone(),
            "labor_share" => self.shares.labor_share.clone(),
            "capital_share" => self.shares.capital_share.clone(),
            "tax_share" => self.shares.tax_share.clone(),
            "profit_share" => self.shares.profit_share.clone(),
            "markup" => self.markup.clone(),
            other => Self::get_raw(other, snap)?,
        })
    }

    fn get_raw(id: &str, snap: &Snapshot) -> Result<TimeSeries> {
        snap.series(id).cloned().map_err(|_| {
            Error::Config(format!(
                "unknown series '{id}': expected one of {} or a snapshot id",
                DERIVED_SERIES.join(", ")
            ))
        })
    }
}

/// A derived series when `name` is one of [`DERIVED_SERIES`], otherwise the
/// snapshot series of that id. Raw ids never require the full input set.
pub fn resolve_series(cfg: &Config, snap: &Snapshot, name: &str) -> Result<TimeSeries> {
    if DERIVED_SERIES.contains(&name) {
        build_econ(cfg, snap)?.get(name, snap)
    } else {
        EconSeries::get_raw(name, snap)
    }
}
