//! Linear and quadratic trend fitting plus single-observation influence
//! diagnostics for the linear trend.
//!
//! Time enters every regression as fractional years since the first
//! observation of the sample, so slopes are always "per year" regardless of
//! the series frequency.

use chrono::NaiveDate;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extended::Dd;
use crate::series::{decimal_year, slice, TimeSeries, Window};

/// Relative RMS residual below which a fit counts as exact.
///
/// Floating-point round-off leaves residuals around 1e-16 of the data scale
/// even on exactly linear input; anything under this bound is treated as
/// zero so deletion diagnostics report 0 instead of amplified noise.
pub const EXACT_FIT_RTOL: f64 = 1e-12;

/// `1 - h_i` at or below this counts as leverage one.
const LEVERAGE_ONE_TOL: f64 = 1e-12;

/// Least-squares line `y = intercept + slope·t` over raw `(t, y)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub t_mean: f64,
    pub y_mean: f64,
    /// Σ(t_i - t̄)²
    pub s_tt: f64,
    /// t_i - t̄, exact in sign and zero at the center of a symmetric sample.
    pub t_dev: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Σe_i² / (n - 2)
    pub mse: f64,
    pub leverage: Vec<f64>,
    pub r2: f64,
}

impl LineFit {
    pub fn fit(times: &[f64], values: &[f64]) -> Result<Self> {
        assert_eq!(times.len(), values.len(), "times and values differ in length");
        let n = times.len();
        if n < 3 {
            return Err(Error::InsufficientPoints { needed: 3, got: n });
        }
        let m = Moments::new(times, values)?;
        let residuals: Vec<f64> = (0..n).map(|i| (m.dy[i] - m.slope * m.dt[i]).to_f64()).collect();
        let sse: f64 = residuals.iter().map(|e| e * e).sum();
        let sst: f64 = m.dy.iter().map(|d| d.square().to_f64()).sum();
        let leverage = m
            .dt
            .iter()
            .map(|d| (Dd::from(1.0 / n as f64) + d.square() / m.s_tt).to_f64())
            .collect();
        let (slope, intercept, t_mean, y_mean, s_tt) = m.summary();
        let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
        Ok(LineFit {
            times: times.to_vec(),
            values: values.to_vec(),
            slope,
            intercept,
            t_mean,
            y_mean,
            s_tt,
            t_dev: m.dt.iter().map(|d| d.to_f64()).collect(),
            residuals,
            mse: sse / (n - 2) as f64,
            leverage,
            r2,
        })
    }

    pub fn n(&self) -> usize {
        self.times.len()
    }

    pub fn predict(&self, t: f64) -> f64 {
        self.intercept + self.slope * t
    }

    /// True when the residuals are round-off relative to the data scale.
    pub fn is_exact(&self) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, y| m.max(y.abs()));
        let rms = (self.residuals.iter().map(|e| e * e).sum::<f64>() / self.n() as f64).sqrt();
        rms <= EXACT_FIT_RTOL * scale
    }

    /// `(t_i - E[t]) / Var[t] · (y_i - E[y] - β(t_i - E[t]))` with population moments.
    pub fn influence(&self) -> Result<Vec<f64>> {
        let var_t = self.s_tt / self.n() as f64;
        if var_t <= 0.0 {
            return Err(Error::DegenerateTime);
        }
        Ok(self.t_dev.iter().zip(&self.residuals).map(|(dt, e)| dt / var_t * e).collect())
    }

    /// Closed-form Cook's distance `e_i² h_i / (2·mse·(1 - h_i)²)`.
    pub fn cooks_distance(&self) -> Result<Vec<f64>> {
        let n = self.n();
        if n < 4 {
            return Err(Error::InsufficientPoints { needed: 4, got: n });
        }
        self.check_leverage()?;
        if self.is_exact() {
            return Ok(vec![0.0; n]);
        }
        Ok(self
            .residuals
            .iter()
            .zip(&self.leverage)
            .map(|(e, h)| e * e * h / (2.0 * self.mse * (1.0 - h).powi(2)))
            .collect())
    }

    /// Slopes refitted with each observation removed in turn.
    pub fn loo_slopes(&self) -> Result<Vec<f64>> {
        let n = self.n();
        if n < 4 {
            return Err(Error::InsufficientPoints { needed: 4, got: n });
        }
        (0..n)
            .into_par_iter()
            .map(|i| {
                let (t, y): (Vec<f64>, Vec<f64>) = self
                    .times
                    .iter()
                    .zip(&self.values)
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (t, y))| (*t, *y))
                    .unzip();
                Moments::new(&t, &y).map(|m| m.slope.to_f64())
            })
            .collect()
    }

    fn check_leverage(&self) -> Result<()> {
        match self.leverage.iter().position(|h| 1.0 - h <= LEVERAGE_ONE_TOL) {
            Some(index) => Err(Error::LeverageOne { index }),
            None => Ok(()),
        }
    }
}

/// Centered regression moments carried in double-double precision.
struct Moments {
    n: f64,
    t_sum: Dd,
    y_sum: Dd,
    dt: Vec<Dd>,
    dy: Vec<Dd>,
    s_tt: Dd,
    slope: Dd,
}

impl Moments {
    fn new(times: &[f64], values: &[f64]) -> Result<Self> {
        let n = times.len() as f64;
        let t_sum = Dd::sum(times.iter().map(|&t| Dd::from(t)));
        let y_sum = Dd::sum(values.iter().map(|&y| Dd::from(y)));
        // n·x_i - Σx is exact, so a point sitting on the mean gets dt = 0 exactly
        let dev = |x: f64, sum: Dd| (Dd::prod(n, x) - sum) / Dd::from(n);
        let dt: Vec<Dd> = times.iter().map(|&t| dev(t, t_sum)).collect();
        let dy: Vec<Dd> = values.iter().map(|&y| dev(y, y_sum)).collect();
        let s_tt = Dd::sum(dt.iter().map(|d| d.square()));
        if s_tt.to_f64() <= 0.0 {
            return Err(Error::DegenerateTime);
        }
        let s_ty = Dd::sum(dt.iter().zip(&dy).map(|(a, b)| *a * *b));
        Ok(Moments { n, t_sum, y_sum, dt, dy, s_tt, slope: s_ty / s_tt })
    }

    /// `(slope, intercept, t̄, ȳ, S_tt)` rounded to f64.
    fn summary(&self) -> (f64, f64, f64, f64, f64) {
        let t_mean = self.t_sum / Dd::from(self.n);
        let y_mean = self.y_sum / Dd::from(self.n);
        let intercept = y_mean - self.slope * t_mean;
        (self.slope.to_f64(), intercept.to_f64(), t_mean.to_f64(), y_mean.to_f64(), self.s_tt.to_f64())
    }
}

/// Linear trend of a dated series over one sample window.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendFit {
    pub window: Window,
    /// Date at which `t = 0`: the first observation inside the window.
    pub time_origin: NaiveDate,
    pub dates: Vec<NaiveDate>,
    pub line: LineFit,
}

impl TrendFit {
    pub fn n(&self) -> usize {
        self.line.n()
    }

    /// Slope in units of y per year.
    pub fn slope(&self) -> f64 {
        self.line.slope
    }

    pub fn intercept(&self) -> f64 {
        self.line.intercept
    }

    pub fn mse(&self) -> f64 {
        self.line.mse
    }

    pub fn r2(&self) -> f64 {
        self.line.r2
    }

    pub fn residuals(&self) -> &[f64] {
        &self.line.residuals
    }

    pub fn leverage(&self) -> &[f64] {
        &self.line.leverage
    }

    /// Years between the time origin and `date`.
    pub fn time_of(&self, date: NaiveDate) -> f64 {
        decimal_year(date) - decimal_year(self.time_origin)
    }

    pub fn predict_at(&self, date: NaiveDate) -> f64 {
        self.line.predict(self.time_of(date))
    }

    /// Fitted values at the sample dates.
    pub fn fitted(&self) -> Vec<f64> {
        self.line.times.iter().map(|&t| self.line.predict(t)).collect()
    }

    /// Errors unless `s` restricted to this fit's window is the sample the fit used.
    fn check_sample(&self, s: &TimeSeries) -> Result<()> {
        let sample = slice(s, &self.window);
        let same = sample.len() == self.n()
            && sample
                .points()
                .iter()
                .zip(self.dates.iter().zip(&self.line.values))
                .all(|(p, (d, y))| p.date == *d && p.value == *y);
        if same {
            Ok(())
        } else {
            Err(Error::WindowMismatch)
        }
    }
}

pub fn fit_linear(s: &TimeSeries, w: &Window) -> Result<TrendFit> {
    let sample = slice(s, w);
    let Some(origin) = sample.first_date() else {
        return Err(Error::InsufficientPoints { needed: 3, got: 0 });
    };
    let base = decimal_year(origin);
    let dates: Vec<NaiveDate> = sample.dates().collect();
    let times: Vec<f64> = dates.iter().map(|d| decimal_year(*d) - base).collect();
    let values: Vec<f64> = sample.values().collect();
    let line = LineFit::fit(&times, &values)?;
    Ok(TrendFit { window: *w, time_origin: origin, dates, line })
}

pub fn influence_values(fit: &TrendFit, s: &TimeSeries) -> Result<Vec<f64>> {
    fit.check_sample(s)?;
    fit.line.influence()
}

pub fn cooks_distance(fit: &TrendFit, s: &TimeSeries) -> Result<Vec<f64>> {
    fit.check_sample(s)?;
    fit.line.cooks_distance()
}

pub fn leave_one_out_slopes(fit: &TrendFit, s: &TimeSeries) -> Result<Vec<f64>> {
    fit.check_sample(s)?;
    fit.line.loo_slopes()
}

/// Per-observation influence diagnostics for one trend fit.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceReport {
    pub dates: Vec<NaiveDate>,
    pub influence: Vec<f64>,
    pub cooks_d: Vec<f64>,
    pub leverage: Vec<f64>,
    pub loo_slopes: Vec<f64>,
}

pub fn influence_report(fit: &TrendFit, s: &TimeSeries) -> Result<InfluenceReport> {
    fit.check_sample(s)?;
    Ok(InfluenceReport {
        dates: fit.dates.clone(),
        influence: fit.line.influence()?,
        cooks_d: fit.line.cooks_distance()?,
        leverage: fit.line.leverage.clone(),
        loo_slopes: fit.line.loo_slopes()?,
    })
}

/// Least-squares parabola `y = a·x² + b·x + c`.
///
/// The solve happens in the scaled coordinate `u = (x - center) / scale`;
/// [`QuadraticFit::eval`] uses that form, which stays accurate when `x` is a
/// calendar year.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub center: f64,
    pub scale: f64,
    /// Coefficients of `1, u, u²`.
    pub scaled: [f64; 3],
    pub residuals: Vec<f64>,
}

impl QuadraticFit {
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.scale;
        self.scaled[0] + u * (self.scaled[1] + u * self.scaled[2])
    }
}

pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::RankDeficient { distinct: xs.len() });
    }
    let n = points.len() as f64;
    let center = points.iter().map(|p| p.0).sum::<f64>() / n;
    let scale = points.iter().fold(0.0f64, |m, p| m.max((p.0 - center).abs()));

    // least squares on the Vandermonde columns 1, u, u² via Householder QR
    let mut cols: [Vec<f64>; 3] = Default::default();
    for &(x, _) in points {
        let u = (x - center) / scale;
        cols[0].push(1.0);
        cols[1].push(u);
        cols[2].push(u * u);
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let p = solve_qr3(cols, ys).ok_or(Error::RankDeficient { distinct: xs.len() })?;

    let s2 = scale * scale;
    let a = p[2] / s2;
    let b = p[1] / scale - 2.0 * center * p[2] / s2;
    let c = p[0] - p[1] * center / scale + p[2] * center * center / s2;
    let mut fit = QuadraticFit { a, b, c, center, scale, scaled: p, residuals: Vec::new() };
    fit.residuals = points.iter().map(|&(x, y)| y - fit.eval(x)).collect();
    Ok(fit)
}

/// Least-squares solution of `[c0 c1 c2]·p ≈ y` by Householder QR.
fn solve_qr3(mut cols: [Vec<f64>; 3], mut y: Vec<f64>) -> Option<[f64; 3]> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, z)| x * z).sum::<f64>();
    let scale = cols.iter().map(|c| dot(c, c).sqrt()).fold(0.0f64, f64::max);
    let mut r = [[0.0f64; 3]; 3];
    for k in 0..3 {
        let norm = dot(&cols[k][k..], &cols[k][k..]).sqrt();
        if norm <= 1e-13 * scale {
            return None;
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        let reflect = |c: &mut [f64]| {
            let f = 2.0 * dot(&v, c) / vv;
            c.iter_mut().zip(&v).for_each(|(ci, vi)| *ci -= f * vi);
        };
        for col in cols.iter_mut().skip(k + 1) {
            reflect(&mut col[k..]);
        }
        reflect(&mut y[k..]);
        r[k][k] = alpha;
        for j in k + 1..3 {
            r[k][j] = cols[j][k];
        }
    }
    let mut p = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| r[row][k] * p[k]).sum();
        p[row] = (y[row] - tail) / r[row][row];
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::test_support::{annual, quarterly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn full(s: &TimeSeries) -> Window {
        Window::new(s.first_date().unwrap(), s.last_date().unwrap()).unwrap()
    }

    /// Independent refit oracle: raw-sum normal equations via Cramer's rule.
    fn brute_line(t: &[f64], y: &[f64]) -> (f64, f64) {
        let n = t.len() as f64;
        let (st, sy) = (t.iter().sum::<f64>(), y.iter().sum::<f64>());
        let stt: f64 = t.iter().map(|v| v * v).sum();
        let sty: f64 = t.iter().zip(y).map(|(a, b)| a * b).sum();
        let det = n * stt - st * st;
        let slope = (n * sty - st * sy) / det;
        let intercept = (stt * sy - st * sty) / det;
        (slope, intercept)
    }

    fn without(v: &[f64], i: usize) -> Vec<f64> {
        v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect()
    }

    #[test]
    fn constant_and_identity_lines() {
        let c = quarterly("c", 1990, &[1.0; 12]);
        let fit = fit_linear(&c, &full(&c)).unwrap();
        assert_eq!(fit.slope(), 0.0);
        assert_eq!(fit.intercept(), 1.0);

        let id = annual("t", 2000, &[0.0, 1.0, 2.0, 3.0, 4.0]);
        let fit = fit_linear(&id, &full(&id)).unwrap();
        assert!((fit.slope() - 1.0).abs() < 1e-14);
        assert!(fit.intercept().abs() < 1e-14);
        assert!(fit.mse() < 1e-28);
        assert!((fit.leverage().iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_hand_case_matches_grid_search() {
        let s = annual("h", 2000, &[0.0, 1.0, 3.0]);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        assert!((fit.slope() - 1.5).abs() < 1e-14);
        assert!((fit.intercept() + 1.0 / 6.0).abs() < 1e-14);

        // coarse-to-fine grid minimization of the squared error
        let sse = |b: f64, a: f64| -> f64 {
            [(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)].iter().map(|(t, y)| (y - a - b * t).powi(2)).sum()
        };
        let (mut b0, mut a0, mut step) = (0.0, 0.0, 1.0);
        for _ in 0..40 {
            let mut best = (sse(b0, a0), b0, a0);
            for i in -10..=10 {
                for j in -10..=10 {
                    let (b, a) = (b0 + i as f64 * step, a0 + j as f64 * step);
                    let v = sse(b, a);
                    if v < best.0 {
                        best = (v, b, a);
                    }
                }
            }
            (b0, a0) = (best.1, best.2);
            step /= 4.0;
        }
        // the squared error is flat to f64 resolution within ~1e-8 of the optimum
        assert!((b0 - fit.slope()).abs() < 1e-6);
        assert!((a0 - fit.intercept()).abs() < 1e-6);
    }

    #[test]
    fn fit_errors() {
        let two = annual("x", 2000, &[1.0, 2.0]);
        assert!(matches!(
            fit_linear(&two, &full(&two)),
            Err(Error::InsufficientPoints { needed: 3, got: 2 })
        ));
        let s = annual("x", 2000, &[1.0, 2.0, 3.0]);
        let empty = Window::years(1900, 1901).unwrap();
        assert!(matches!(fit_linear(&s, &empty), Err(Error::InsufficientPoints { got: 0, .. })));
        assert!(matches!(LineFit::fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::DegenerateTime)));
    }

    #[test]
    fn influence_zero_at_time_center_and_on_line() {
        let s = annual("x", 2000, &[1.0, 4.0, 2.0, 8.0, 3.0]);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        let inf = influence_values(&fit, &s).unwrap();
        assert_eq!(inf[2], 0.0);

        // y = t + e with e = (1, 0, -2, 0, 1): the fit is y = t and t = 1 lies on it
        let s = annual("x", 2000, &[1.0, 1.0, 0.0, 3.0, 5.0]);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        assert!((fit.slope() - 1.0).abs() < 1e-14);
        let inf = influence_values(&fit, &s).unwrap();
        assert!(fit.residuals()[1].abs() < 1e-14);
        assert!(inf[1].abs() < 1e-13);
        assert!(inf[0].abs() > 0.1);
    }

    #[test]
    fn influence_sign_matches_deletion_effect() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..25).map(|k| 0.3 * k as f64 + rng.random_range(-2.0..2.0)).collect();
        let s = quarterly("r", 1980, &v);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        let inf = influence_values(&fit, &s).unwrap();
        let t = &fit.line.times;
        for i in 0..25 {
            let (b_i, _) = brute_line(&without(t, i), &without(&v, i));
            let delta = fit.slope() - b_i;
            assert!(fit.leverage()[i] < 1.0);
            if inf[i].abs() > 1e-12 {
                assert_eq!(inf[i].signum(), delta.signum(), "obs {i}");
            }
        }
    }

    #[test]
    fn cooks_distance_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..30).map(|k| 1.0 - 0.2 * k as f64 + rng.random_range(-1.0..1.0)).collect();
        let s = annual("r", 1990, &v);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        let d = cooks_distance(&fit, &s).unwrap();
        let t = &fit.line.times;
        for i in 0..30 {
            let (b, a) = brute_line(&without(t, i), &without(&v, i));
            let num: f64 = t.iter().map(|&tj| (fit.line.predict(tj) - (a + b * tj)).powi(2)).sum();
            let def = num / (2.0 * fit.mse());
            assert!((d[i] - def).abs() <= 1e-10 * def.max(1e-12), "obs {i}: {} vs {def}", d[i]);
        }
    }

    #[test]
    fn cooks_distance_exact_fit_is_zero() {
        let v: Vec<f64> = (0..20).map(|k| 3.0 + 0.7 * k as f64).collect();
        let s = quarterly("l", 1980, &v);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        assert!(cooks_distance(&fit, &s).unwrap().iter().all(|&x| x == 0.0));
        let loo = leave_one_out_slopes(&fit, &s).unwrap();
        assert!(loo.iter().all(|b| (b - fit.slope()).abs() < 1e-12));
    }

    #[test]
    fn duplicated_on_line_point_keeps_zero_distance() {
        // point 2 lies on the fitted line; a second copy of it leaves the fit unchanged
        let t = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 2.0, 4.0, 6.0, 7.0];
        let before = LineFit::fit(&t, &y).unwrap();
        let t2 = [0.0, 1.0, 2.0, 2.0, 3.0, 4.0];
        let y2 = [1.0, 2.0, 4.0, 4.0, 6.0, 7.0];
        let after = LineFit::fit(&t2, &y2).unwrap();
        assert!((before.slope - after.slope).abs() < 1e-14);
        let d_before = before.cooks_distance().unwrap()[2];
        let d_after = after.cooks_distance().unwrap();
        assert!(d_before.abs() < 1e-25);
        assert!(d_after[2].abs() < 1e-25 && d_after[3].abs() < 1e-25);
        // brute force: deleting either copy moves no fitted value
        let (b, a) = brute_line(&without(&t2, 2), &without(&y2, 2));
        assert!((b - after.slope).abs() < 1e-12 && (a - after.intercept).abs() < 1e-12);
    }

    #[test]
    fn cooks_distance_guards() {
        let s = annual("x", 2000, &[1.0, 3.0, 2.0]);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        assert!(matches!(cooks_distance(&fit, &s), Err(Error::InsufficientPoints { needed: 4, .. })));
        let other = annual("x", 2000, &[1.0, 3.0, 2.5]);
        assert!(matches!(cooks_distance(&fit, &other), Err(Error::WindowMismatch)));
    }

    #[test]
    fn loo_slopes_hand_dataset() {
        let y = [1.0, 3.0, 2.0, 5.0];
        let s = annual("x", 2000, &y);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        let loo = leave_one_out_slopes(&fit, &s).unwrap();
        // hand OLS on each 3-point subset of t = 0..3
        // drop 0: t=1,2,3 y=3,2,5 -> slope 1.0
        // drop 1: t=0,2,3 y=1,2,5 -> t̄=5/3, S_tt=14/3, S_ty=(−5/3)(−5/3)+(1/3)(−2/3)+(4/3)(7/3)=(25−2+28)/9=51/9 -> 51/42
        // drop 2: t=0,1,3 y=1,3,5 -> t̄=4/3, S_tt=14/3, S_ty=(−4/3)(−2)+(−1/3)(0)+(5/3)(2)=18/3 -> 18/14
        // drop 3: t=0,1,2 y=1,3,2 -> slope 0.5
        let expect = [1.0, 51.0 / 42.0, 18.0 / 14.0, 0.5];
        for (g, e) in loo.iter().zip(expect) {
            assert!((g - e).abs() < 1e-13, "{g} vs {e}");
        }
    }

    #[test]
    fn removing_endpoint_outlier_flattens_symmetric_data() {
        let mut y = vec![0.0; 11];
        y[10] = 5.0;
        let s = annual("x", 2000, &y);
        let fit = fit_linear(&s, &full(&s)).unwrap();
        let loo = leave_one_out_slopes(&fit, &s).unwrap();
        assert!(fit.slope() > 0.0);
        assert!(loo[10].abs() < fit.slope().abs());
        assert!(loo[10].abs() < 1e-14);
    }

    #[test]
    fn quadratic_exact_and_constant() {
        let pts: Vec<(f64, f64)> = (-3..=4).map(|x| x as f64).map(|x| (x, 2.0 * x * x + 3.0 * x + 1.0)).collect();
        let q = fit_quadratic(&pts).unwrap();
        assert!((q.a - 2.0).abs() < 1e-9 && (q.b - 3.0).abs() < 1e-9 && (q.c - 1.0).abs() < 1e-9);
        assert!(q.residuals.iter().all(|r| r.abs() < 1e-9));

        let pts: Vec<(f64, f64)> = (1980..1990).map(|x| (x as f64, 4.2)).collect();
        let q = fit_quadratic(&pts).unwrap();
        assert!(q.a.abs() < 1e-12 && q.scaled[1].abs() < 1e-12);
        assert!((q.eval(1984.0) - 4.2).abs() < 1e-12);

        let rank = fit_quadratic(&[(1.0, 1.0), (2.0, 2.0), (1.0, 3.0)]);
        assert!(matches!(rank, Err(Error::RankDeficient { distinct: 2 })));
    }

    #[test]
    fn quadratic_matches_dense_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<(f64, f64)> =
            (0..5).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-5.0..5.0))).collect();
        let q = fit_quadratic(&pts).unwrap();
        // oracle: raw-x normal equations solved by Cramer's rule
        let s = |k: i32| pts.iter().map(|p| p.0.powi(k)).sum::<f64>();
        let r = |k: i32| pts.iter().map(|p| p.0.powi(k) * p.1).sum::<f64>();
        let m = [[s(4), s(3), s(2)], [s(3), s(2), s(1)], [s(2), s(1), s(0)]];
        let v = [r(2), r(1), r(0)];
        let det3 = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det3(&m);
        let mut sol = [0.0; 3];
        for (col, out) in sol.iter_mut().enumerate() {
            let mut mc = m;
            for row in 0..3 {
                mc[row][col] = v[row];
            }
            *out = det3(&mc) / d;
        }
        assert!((q.a - sol[0]).abs() < 1e-8);
        assert!((q.b - sol[1]).abs() < 1e-8);
        assert!((q.c - sol[2]).abs() < 1e-8);
    }
}
