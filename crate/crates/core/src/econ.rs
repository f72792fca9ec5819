//! Economic series built from market rates and national accounts: expected
//! capital inflation, the real rate, the cost of finance, the Hall-Jorgenson
//! cost of capital, the economic profit share, the implied gross-output
//! markup and dollar aggregates.
//!
//! Rates are in percentage points; shares and the markup are ratios.

use chrono::Months;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{align, moving_average, Observation, TimeSeries, Unit};

/// Default equity risk premium added to the Treasury yield, in pp.
pub const DEFAULT_EQUITY_PREMIUM: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthMode {
    /// `100·ln(I_t / I_{t-1y})`
    #[default]
    Log,
    /// `100·(I_t / I_{t-1y} - 1)`
    Simple,
}

/// Year-over-year growth in pp; dates without an observation one year earlier are skipped.
pub fn yoy_growth(index: &TimeSeries, mode: GrowthMode) -> Result<TimeSeries> {
    if let Some(p) = index.points().iter().find(|p| p.value <= 0.0) {
        return Err(Error::Domain(format!(
            "index '{}' must be positive, got {} at {}",
            index.id(),
            p.value,
            p.date
        )));
    }
    let points = index
        .points()
        .iter()
        .filter_map(|p| {
            let prev = index.get(p.date.checked_sub_months(Months::new(12))?)?;
            let ratio = p.value / prev;
            let g = match mode {
                GrowthMode::Log => 100.0 * ratio.ln(),
                GrowthMode::Simple => 100.0 * (ratio - 1.0),
            };
            Some(Observation::new(p.date, g))
        })
        .collect();
    TimeSeries::new(index.id(), index.freq(), Unit::PercentPoints, points)
}

/// Expected capital inflation: trailing `years`-year average of realized
/// year-over-year growth of the capital price index.
pub fn expected_inflation(
    capital_price_index: &TimeSeries,
    years: u32,
    mode: GrowthMode,
) -> Result<TimeSeries> {
    let growth = yoy_growth(capital_price_index, mode)?;
    if growth.is_empty() {
        return Err(Error::EmptySeries(Some(format!("{} (yoy growth)", capital_price_index.id()))));
    }
    let nu = moving_average(&growth, years)?;
    if nu.is_empty() {
        return Err(Error::EmptySeries(Some(format!(
            "{} ({years}-year average)",
            capital_price_index.id()
        ))));
    }
    Ok(nu.with_id("expected_inflation"))
}

/// Nominal yield less expected inflation.
pub fn real_rate(nominal: &TimeSeries, expected_inflation: &TimeSeries) -> Result<TimeSeries> {
    let [i, nu]: [TimeSeries; 2] = align(&[nominal, expected_inflation])?
        .try_into()
        .expect("two inputs");
    i.zip_with(&nu, "real_rate", Unit::PercentPoints, |a, b| a - b)
}

/// Inputs to the cost of finance and the Hall-Jorgenson cost of capital.
///
/// Rates (`treasury_10y`, `baa`, `expected_inflation`, `depreciation`) are
/// in pp; `debt_share`, `tax_rate` and `allowances` are ratios.
#[derive(Debug, Clone)]
pub struct CapitalCostInputs {
    pub treasury_10y: TimeSeries,
    pub baa: TimeSeries,
    pub equity_premium: f64,
    pub debt_share: TimeSeries,
    pub expected_inflation: TimeSeries,
    pub depreciation: TimeSeries,
    pub tax_rate: TimeSeries,
    /// Present value of depreciation allowances per dollar invested.
    pub allowances: TimeSeries,
}

/// `ρ = d·R_d + (1 - d)·(i + premium)`
pub fn cost_of_finance(inputs: &CapitalCostInputs) -> Result<TimeSeries> {
    let [i, rd, d]: [TimeSeries; 3] = align(&[&inputs.treasury_10y, &inputs.baa, &inputs.debt_share])?
        .try_into()
        .expect("three inputs");
    check_unit_interval(&d, "debt share")?;
    let premium = inputs.equity_premium;
    let points = i
        .points()
        .iter()
        .zip(rd.points())
        .zip(d.points())
        .map(|((i, rd), d)| {
            let equity = i.value + premium;
            Observation::new(i.date, d.value * rd.value + (1.0 - d.value) * equity)
        })
        .collect();
    TimeSeries::new("cost_of_finance", i.freq(), Unit::PercentPoints, points)
}

/// Hall-Jorgenson rental rate `R_c = (ρ - ν + δ)(1 - zτ)/(1 - τ)`, in pp.
pub fn cost_of_capital(inputs: &CapitalCostInputs) -> Result<TimeSeries> {
    let rho = cost_of_finance(inputs)?;
    let aligned = align(&[
        &rho,
        &inputs.expected_inflation,
        &inputs.depreciation,
        &inputs.tax_rate,
        &inputs.allowances,
    ])?;
    let [rho, nu, delta, tau, z]: [TimeSeries; 5] = aligned.try_into().expect("five inputs");
    check_unit_interval(&z, "depreciation allowances")?;
    if let Some(p) = tau.points().iter().find(|p| p.value >= 1.0) {
        return Err(Error::TaxRateUnity { date: p.date.to_string(), value: p.value });
    }
    let points = (0..rho.len())
        .map(|k| {
            let tau = tau.points()[k].value;
            let z = z.points()[k].value;
            let gross = rho.points()[k].value - nu.points()[k].value + delta.points()[k].value;
            Observation::new(rho.points()[k].date, gross * (1.0 - z * tau) / (1.0 - tau))
        })
        .collect();
    TimeSeries::new("cost_of_capital", rho.freq(), Unit::PercentPoints, points)
}

fn check_unit_interval(s: &TimeSeries, what: &str) -> Result<()> {
    match s.points().iter().find(|p| !(0.0..=1.0).contains(&p.value)) {
        Some(p) => Err(Error::Domain(format!("{what} {} at {} is outside [0, 1]", p.value, p.date))),
        None => Ok(()),
    }
}

/// National-accounts aggregates for the corporate sector.
#[derive(Debug, Clone)]
pub struct AccountsBundle {
    /// Gross value added, dollars.
    pub value_added: TimeSeries,
    /// Compensation of employees, dollars.
    pub compensation: TimeSeries,
    /// Capital stock at current cost, dollars.
    pub capital_stock: TimeSeries,
    /// Taxes on production and imports, dollars.
    pub production_taxes: TimeSeries,
    pub employment: TimeSeries,
    pub capital_price_index: TimeSeries,
}

impl AccountsBundle {
    /// Checks positivity (production taxes may be zero).
    pub fn validate(&self) -> Result<()> {
        let strict = [
            &self.value_added,
            &self.compensation,
            &self.capital_stock,
            &self.employment,
            &self.capital_price_index,
        ];
        for s in strict {
            if let Some(p) = s.points().iter().find(|p| p.value <= 0.0) {
                return Err(Error::Domain(format!(
                    "'{}' must be positive, got {} at {}",
                    s.id(),
                    p.value,
                    p.date
                )));
            }
        }
        if let Some(p) = self.production_taxes.points().iter().find(|p| p.value < 0.0) {
            return Err(Error::Domain(format!("negative production taxes at {}", p.date)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfitOptions {
    /// Subtract taxes on production from value added.
    pub include_production_taxes: bool,
}

impl Default for ProfitOptions {
    fn default() -> Self {
        ProfitOptions { include_production_taxes: true }
    }
}

/// Shares of value added that sum to one at every date.
#[derive(Debug, Clone)]
pub struct ProfitDecomposition {
    pub labor_share: TimeSeries,
    pub capital_share: TimeSeries,
    pub tax_share: TimeSeries,
    pub profit_share: TimeSeries,
}

pub fn profit_decomposition(
    acct: &AccountsBundle,
    cost_of_capital: &TimeSeries,
    opts: ProfitOptions,
) -> Result<ProfitDecomposition> {
    let aligned = align(&[
        &acct.value_added,
        &acct.compensation,
        &acct.capital_stock,
        &acct.production_taxes,
        cost_of_capital,
    ])?;
    let [y, wl, k, tax, rc]: [TimeSeries; 5] = aligned.try_into().expect("five inputs");
    if let Some(p) = y.points().iter().find(|p| p.value <= 0.0) {
        return Err(Error::Domain(format!("value added {} at {} is not positive", p.value, p.date)));
    }
    let labor_share = wl.zip_with(&y, "labor_share", Unit::Ratio, |wl, y| wl / y)?;
    let capital_stock_share = k.zip_with(&y, "capital_output", Unit::Ratio, |k, y| k / y)?;
    let capital_share =
        rc.zip_with(&capital_stock_share, "capital_share", Unit::Ratio, |rc, ky| rc / 100.0 * ky)?;
    let tax_share = if opts.include_production_taxes {
        tax.zip_with(&y, "tax_share", Unit::Ratio, |t, y| t / y)?
    } else {
        tax.map_values(|_| 0.0)?.with_id("tax_share").with_unit(Unit::Ratio)
    };
    let points = (0..y.len())
        .map(|k| {
            let v = 1.0
                - labor_share.points()[k].value
                - capital_share.points()[k].value
                - tax_share.points()[k].value;
            Observation::new(y.points()[k].date, v)
        })
        .collect();
    let profit_share = TimeSeries::new("profit_share", y.freq(), Unit::Ratio, points)?;
    Ok(ProfitDecomposition { labor_share, capital_share, tax_share, profit_share })
}

/// `Π = 1 - WL/Y - (R_c/100)·K/Y - T/Y`, the last term controlled by `opts`.
pub fn profit_share(
    acct: &AccountsBundle,
    cost_of_capital: &TimeSeries,
    opts: ProfitOptions,
) -> Result<TimeSeries> {
    Ok(profit_decomposition(acct, cost_of_capital, opts)?.profit_share)
}

/// Gross-output markup `2 / (2 - Π)` (intermediate share of revenue 0.5).
pub fn markup(profit_share: &TimeSeries) -> Result<TimeSeries> {
    if let Some(p) = profit_share.points().iter().find(|p| p.value >= 2.0) {
        return Err(Error::MarkupPole { date: p.date.to_string(), value: p.value });
    }
    Ok(profit_share
        .map_values(|pi| 2.0 / (2.0 - pi))?
        .with_id("markup")
        .with_unit(Unit::Ratio))
}

pub fn profit_dollars(profit_share: &TimeSeries, value_added: &TimeSeries) -> Result<TimeSeries> {
    let [pi, y]: [TimeSeries; 2] = align(&[profit_share, value_added])?.try_into().expect("two inputs");
    pi.zip_with(&y, "profit_dollars", Unit::Dollars, |pi, y| pi * y)
}

pub fn profit_per_worker(profit_dollars: &TimeSeries, employment: &TimeSeries) -> Result<TimeSeries> {
    let [dollars, emp]: [TimeSeries; 2] =
        align(&[profit_dollars, employment])?.try_into().expect("two inputs");
    if let Some(p) = emp.points().iter().find(|p| p.value <= 0.0) {
        return Err(Error::Domain(format!("employment {} at {} is not positive", p.value, p.date)));
    }
    dollars.zip_with(&emp, "profit_per_worker", Unit::Dollars, |d, e| d / e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::test_support::{annual, quarterly};
    use crate::series::Frequency;
    use proptest::prelude::*;

    fn flat(id: &str, v: f64, n: usize) -> TimeSeries {
        annual(id, 2000, &vec![v; n])
    }

    fn inputs(i: f64, rd: f64, d: f64, nu: f64, delta: f64, tau: f64, z: f64) -> CapitalCostInputs {
        CapitalCostInputs {
            treasury_10y: flat("i", i, 3),
            baa: flat("rd", rd, 3),
            equity_premium: DEFAULT_EQUITY_PREMIUM,
            debt_share: flat("d", d, 3),
            expected_inflation: flat("nu", nu, 3),
            depreciation: flat("delta", delta, 3),
            tax_rate: flat("tau", tau, 3),
            allowances: flat("z", z, 3),
        }
    }

    fn accounts(y: f64, wl: f64, k: f64, tax: f64) -> AccountsBundle {
        AccountsBundle {
            value_added: flat("y", y, 3).with_unit(Unit::Dollars),
            compensation: flat("wl", wl, 3).with_unit(Unit::Dollars),
            capital_stock: flat("k", k, 3).with_unit(Unit::Dollars),
            production_taxes: flat("t", tax, 3).with_unit(Unit::Dollars),
            employment: flat("emp", 1e8, 3).with_unit(Unit::Count),
            capital_price_index: flat("p", 100.0, 3).with_unit(Unit::Index),
        }
    }

    fn first(s: &TimeSeries) -> f64 {
        s.points()[0].value
    }

    #[test]
    fn expected_inflation_cases() {
        // log growth exactly 1, 2, 3 pp in successive years
        let idx = annual("p", 2000, &[100.0, 100.0 * 0.01f64.exp(), 100.0 * 0.03f64.exp(), 100.0 * 0.06f64.exp()]);
        let nu = expected_inflation(&idx, 3, GrowthMode::Log).unwrap();
        assert_eq!(nu.len(), 1);
        assert!((first(&nu) - 2.0).abs() < 1e-12);

        let c = quarterly("p", 1990, &[50.0; 24]);
        let nu = expected_inflation(&c, 3, GrowthMode::Log).unwrap();
        assert!(nu.values().all(|v| v == 0.0));

        let g: Vec<f64> = (0..24).map(|k| 100.0 * 1.02f64.powf(k as f64 / 4.0)).collect();
        let nu = expected_inflation(&quarterly("p", 1990, &g), 3, GrowthMode::Simple).unwrap();
        assert!(nu.values().all(|v| (v - 2.0).abs() < 1e-9));
        let nu = expected_inflation(&quarterly("p", 1990, &g), 3, GrowthMode::Log).unwrap();
        assert!(nu.values().all(|v| (v - 100.0 * 1.02f64.ln()).abs() < 1e-9));

        let short = annual("p", 2000, &[1.0, 2.0]);
        assert!(matches!(expected_inflation(&short, 3, GrowthMode::Log), Err(Error::EmptySeries(_))));
        let neg = annual("p", 2000, &[1.0, -2.0, 3.0, 4.0]);
        assert!(matches!(expected_inflation(&neg, 3, GrowthMode::Log), Err(Error::Domain(_))));
    }

    #[test]
    fn real_rate_subtracts() {
        let r = real_rate(&flat("i", 5.0, 3), &flat("nu", 2.0, 3)).unwrap();
        assert!(r.values().all(|v| v == 3.0));
        let r = real_rate(&flat("i", 5.0, 3), &flat("nu", 0.0, 3)).unwrap();
        assert!(r.values().all(|v| v == 5.0));
        let q = quarterly("q", 2000, &[1.0; 4]);
        assert!(matches!(real_rate(&flat("i", 5.0, 3), &q), Err(Error::FrequencyMismatch(_))));
    }

    #[test]
    fn cost_of_finance_cases() {
        assert_eq!(first(&cost_of_finance(&inputs(6.0, 8.0, 1.0, 0.0, 0.0, 0.0, 0.0)).unwrap()), 8.0);
        assert_eq!(first(&cost_of_finance(&inputs(6.0, 8.0, 0.0, 0.0, 0.0, 0.0, 0.0)).unwrap()), 11.0);
        let rho = first(&cost_of_finance(&inputs(6.0, 8.0, 0.4, 0.0, 0.0, 0.0, 0.0)).unwrap());
        assert!((rho - (0.4 * 8.0 + 0.6 * 11.0)).abs() < 1e-12);
        assert!((rho - 9.8).abs() < 1e-12);
        assert!(matches!(
            cost_of_finance(&inputs(6.0, 8.0, 1.2, 0.0, 0.0, 0.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cost_of_capital_cases() {
        // ρ = 8 with d = 1, R_d = 8
        let rc = first(&cost_of_capital(&inputs(0.0, 8.0, 1.0, 2.0, 6.0, 0.0, 0.3)).unwrap());
        assert!((rc - 12.0).abs() < 1e-12);
        let rc = first(&cost_of_capital(&inputs(0.0, 8.0, 1.0, 2.0, 6.0, 0.35, 1.0)).unwrap());
        assert!((rc - 12.0).abs() < 1e-12);
        let rc = first(&cost_of_capital(&inputs(0.0, 8.0, 1.0, 2.0, 6.0, 0.3, 0.5)).unwrap());
        assert!((rc - 12.0 * 0.85 / 0.7).abs() < 1e-12);
        assert!((rc - 14.571).abs() < 1e-3);
        assert!(matches!(
            cost_of_capital(&inputs(0.0, 8.0, 1.0, 2.0, 6.0, 1.0, 0.5)),
            Err(Error::TaxRateUnity { .. })
        ));
    }

    #[test]
    fn profit_share_cases() {
        // WL/Y = 0.6, R_c K / Y = 0.25 with R_c = 10 pp and K/Y = 2.5
        let rc = flat("rc", 10.0, 3);
        let pi = profit_share(&accounts(100.0, 60.0, 250.0, 0.0), &rc, ProfitOptions::default()).unwrap();
        assert!((first(&pi) - 0.15).abs() < 1e-12);

        let pi = profit_share(&accounts(100.0, 100.0, 250.0, 8.0), &rc, ProfitOptions::default()).unwrap();
        assert!((first(&pi) + 0.33).abs() < 1e-12);
        let no_tax = ProfitOptions { include_production_taxes: false };
        let pi = profit_share(&accounts(100.0, 100.0, 250.0, 8.0), &rc, no_tax).unwrap();
        assert!((first(&pi) + 0.25).abs() < 1e-12);

        let mut bad = accounts(100.0, 60.0, 250.0, 0.0);
        bad.value_added = flat("y", 0.0, 3);
        assert!(matches!(profit_share(&bad, &rc, ProfitOptions::default()), Err(Error::Domain(_))));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn markup_cases() {
        let m = markup(&annual("pi", 2000, &[0.0, 0.15, -0.1])).unwrap();
        let v: Vec<f64> = m.values().collect();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - 1.0811).abs() < 1e-4);
        assert!((v[2] - 0.9524).abs() < 1e-4);
        assert!(matches!(markup(&annual("pi", 2000, &[2.0])), Err(Error::MarkupPole { .. })));
    }

    #[test]
    fn dollar_aggregates() {
        let d = profit_dollars(&flat("pi", 0.1, 3), &flat("y", 10e12, 3)).unwrap();
        assert!((first(&d) - 1e12).abs() < 1e-3);
        let d0 = profit_dollars(&flat("pi", 0.0, 3), &flat("y", 10e12, 3)).unwrap();
        assert_eq!(first(&d0), 0.0);
        let w = profit_per_worker(&flat("d", 300e9, 3), &flat("e", 100e6, 3)).unwrap();
        assert!((first(&w) - 3000.0).abs() < 1e-9);
        assert_eq!(first(&profit_per_worker(&d0, &flat("e", 100e6, 3)).unwrap()), 0.0);
        assert!(matches!(
            profit_per_worker(&d, &flat("e", 0.0, 3)),
            Err(Error::Domain(_))
        ));
        assert_eq!(d.freq(), Frequency::Annual);
    }

    proptest! {
        #[test]
        fn markup_is_increasing(a in -5.0f64..1.99, b in -5.0f64..1.99) {
            prop_assume!(a < b);
            let m = markup(&annual("pi", 2000, &[a, b])).unwrap();
            let v: Vec<f64> = m.values().collect();
            prop_assert!(v[0] < v[1]);
        }

        #[test]
        fn tax_terms_cancel(rd in 2.0f64..15.0, nu in -2.0f64..10.0, delta in 2.0f64..10.0, tau in 0.0f64..0.6, z in 0.0f64..1.0) {
            let base = first(&cost_of_capital(&inputs(0.0, rd, 1.0, nu, delta, 0.0, z)).unwrap());
            let other_z = first(&cost_of_capital(&inputs(0.0, rd, 1.0, nu, delta, 0.0, 1.0 - z)).unwrap());
            prop_assert!((base - other_z).abs() < 1e-12);
            let full = first(&cost_of_capital(&inputs(0.0, rd, 1.0, nu, delta, tau, 1.0)).unwrap());
            prop_assert!((full - (rd - nu + delta)).abs() < 1e-9);
        }

        #[test]
        fn cost_of_finance_is_convex_combination(i in 0.0f64..15.0, rd in 0.0f64..20.0, d in 0.0f64..=1.0) {
            let rho = first(&cost_of_finance(&inputs(i, rd, d, 0.0, 0.0, 0.0, 0.0)).unwrap());
            let re = i + DEFAULT_EQUITY_PREMIUM;
            prop_assert!(rho >= rd.min(re) - 1e-12 && rho <= rd.max(re) + 1e-12);
        }

        #[test]
        fn shares_sum_to_one(y in 1.0f64..1e4, wl_frac in 0.1f64..1.0, ky in 0.1f64..4.0, rc in 0.0f64..30.0, tax_frac in 0.0f64..0.2) {
            let acct = accounts(y, wl_frac * y, ky * y, tax_frac * y);
            let dec = profit_decomposition(&acct, &flat("rc", rc, 3), ProfitOptions::default()).unwrap();
            let sum = first(&dec.profit_share) + first(&dec.labor_share) + first(&dec.capital_share) + first(&dec.tax_share);
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }
}
