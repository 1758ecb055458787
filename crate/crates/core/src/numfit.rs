//! Power-law curve fitting.
//!
//! [`fit_power_law_offset`] minimizes `Σ (y - a·x^b - c)²` with a damped
//! Gauss-Newton (Levenberg-Marquardt) iteration and reports linearized 95%
//! confidence bounds. [`fit_power_law_loglog`] is ordinary least squares of
//! `ln y` on `ln x`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::t_quantile;

const MAX_ITER: usize = 200;
const STEP_TOL: f64 = 1e-10;
/// Scaled gradient bound, relative to `‖y‖`, required to report convergence.
const GRAD_TOL: f64 = 1e-8;
const LOG_FLOOR: f64 = 1e-9;
const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerLawModel {
    /// `a·x^b + c`
    Offset,
    /// `a·x^b`
    NoOffset,
}

impl PowerLawModel {
    fn n_params(self) -> usize {
        match self {
            PowerLawModel::Offset => 3,
            PowerLawModel::NoOffset => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub low: f64,
    pub high: f64,
}

impl Bounds {
    pub fn contains(&self, value: f64) -> bool {
        self.low <= value && value <= self.high
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub model: PowerLawModel,
    pub a: f64,
    /// Exponent.
    pub b: f64,
    /// Offset; always 0 for [`PowerLawModel::NoOffset`].
    pub c: f64,
    /// Bounds for `[a, b, c]`, `None` when `JᵀJ` is singular.
    pub ci95: Option<[Bounds; 3]>,
    pub adj_r2: f64,
    pub ss_res: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Largest `|Jᵀr|_j / ‖J_j‖` at the solution.
    pub gradient_norm: f64,
    pub diagnostics: Option<String>,
}

impl PowerLawFit {
    pub fn params(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.a * x.powf(self.b) + self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub a: f64,
    pub b: f64,
    pub adj_r2: f64,
    pub n_points: usize,
}

/// `1 - (ss_res/(n-k-1)) / (ss_tot/(n-1))` for a model with `k` predictors.
pub fn adjusted_r2(ss_res: f64, ss_tot: f64, n: usize, k: usize) -> Result<f64> {
    if n <= k + 1 {
        return Err(Error::TooFewPoints {
            needed: k + 2,
            got: n,
        });
    }
    if ss_tot.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::DegenerateSeries("total sum of squares is zero"));
    }
    Ok(1.0 - (ss_res / (n - k - 1) as f64) / (ss_tot / (n - 1) as f64))
}

/// Adjusted R² that treats constant data as perfectly (or not at all) explained.
fn adjusted_r2_or_degenerate(ss_res: f64, ys: &[f64], k: usize) -> f64 {
    let n = ys.len();
    let mean = ys.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let scale: f64 = ys.iter().map(|y| y * y).sum::<f64>().max(f64::MIN_POSITIVE);
    // rounding in the mean leaves a tiny ss_tot for constant data
    if ss_tot <= 1e-24 * scale {
        return if ss_res <= 1e-24 * scale { 1.0 } else { 0.0 };
    }
    adjusted_r2(ss_res, ss_tot, n, k).unwrap_or(0.0)
}

/// Linearized 95% bounds: `θ ± t(0.975, n-k) · sqrt(diag((JᵀJ)⁻¹) · ss_res/(n-k))`.
pub fn confidence_bounds_95(
    params: &[f64],
    jtj: &DMatrix<f64>,
    ss_res: f64,
    n: usize,
) -> Option<Vec<Bounds>> {
    let k = params.len();
    if n <= k || jtj.nrows() != k || jtj.ncols() != k {
        return None;
    }
    let cov = jtj.clone().cholesky()?.inverse();
    let dof = (n - k) as f64;
    let sigma2 = ss_res / dof;
    let t = t_quantile(0.975, dof);
    Some(
        params
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let half = t * (cov[(j, j)].max(0.0) * sigma2).sqrt();
                Bounds {
                    low: p - half,
                    high: p + half,
                }
            })
            .collect(),
    )
}

fn check_xs(xs: &[f64], ys: &[f64], needed: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Inconsistent(format!(
            "xs has {} points, ys has {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            got: xs.len(),
        });
    }
    if let Some((index, &value)) = xs.iter().enumerate().find(|(_, &x)| x.is_nan() || x <= 0.0) {
        return Err(Error::NonPositive { index, value });
    }
    Ok(())
}

/// OLS of `ln y` on `ln x`: `a = exp(intercept)`, `b = slope`.
pub fn fit_power_law_loglog(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    check_xs(xs, ys, 3)?;
    if let Some((index, &value)) = ys.iter().enumerate().find(|(_, &y)| y.is_nan() || y <= 0.0) {
        return Err(Error::NonPositive { index, value });
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (intercept, slope) = ols(&lx, &ly)?;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(LogLogFit {
        a: intercept.exp(),
        b: slope,
        adj_r2: adjusted_r2_or_degenerate(ss_res, &ly, 1),
        n_points: xs.len(),
    })
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateSeries("x has zero variance"));
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// Fits `a·x^b + c`. With `init = None` the start is `c₀ = min(y)` and
/// `(a₀, b₀)` from a log-log regression of `y - c₀ + 1e-9`.
pub fn fit_power_law_offset(xs: &[f64], ys: &[f64], init: Option<[f64; 3]>) -> Result<PowerLawFit> {
    fit_power_law_nls(xs, ys, PowerLawModel::Offset, init)
}

/// Damped Gauss-Newton fit of either power-law model.
pub fn fit_power_law_nls(
    xs: &[f64],
    ys: &[f64],
    model: PowerLawModel,
    init: Option<[f64; 3]>,
) -> Result<PowerLawFit> {
    check_xs(xs, ys, 4)?;
    let start = match init {
        Some(p) => p,
        None => auto_init(xs, ys, model),
    };
    let p = model.n_params();
    let theta = DVector::from_iterator(p, start.iter().copied().take(p));
    Ok(LevenbergMarquardt::new(xs, ys, model).run(theta))
}

fn auto_init(xs: &[f64], ys: &[f64], model: PowerLawModel) -> [f64; 3] {
    let c0 = match model {
        PowerLawModel::Offset => ys.iter().copied().fold(f64::INFINITY, f64::min),
        PowerLawModel::NoOffset => 0.0,
    };
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys
        .iter()
        .map(|y| ((y - c0).max(0.0) + LOG_FLOOR).ln())
        .collect();
    match ols(&lx, &ly) {
        Ok((intercept, slope)) => [intercept.exp(), slope, c0],
        Err(_) => [1.0, 0.0, c0],
    }
}

struct LevenbergMarquardt<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    model: PowerLawModel,
}

impl<'a> LevenbergMarquardt<'a> {
    fn new(xs: &'a [f64], ys: &'a [f64], model: PowerLawModel) -> Self {
        LevenbergMarquardt { xs, ys, model }
    }

    fn offset(&self, theta: &DVector<f64>) -> f64 {
        match self.model {
            PowerLawModel::Offset => theta[2],
            PowerLawModel::NoOffset => 0.0,
        }
    }

    fn residuals(&self, theta: &DVector<f64>) -> DVector<f64> {
        let (a, b, c) = (theta[0], theta[1], self.offset(theta));
        DVector::from_iterator(
            self.xs.len(),
            self.xs
                .iter()
                .zip(self.ys)
                .map(|(x, y)| y - (a * x.powf(b) + c)),
        )
    }

    /// Jacobian of the model (not the residual) with respect to the parameters.
    fn jacobian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let (a, b) = (theta[0], theta[1]);
        let p = self.model.n_params();
        let mut j = DMatrix::zeros(self.xs.len(), p);
        for (i, &x) in self.xs.iter().enumerate() {
            let xb = x.powf(b);
            j[(i, 0)] = xb;
            j[(i, 1)] = a * xb * x.ln();
            if p == 3 {
                j[(i, 2)] = 1.0;
            }
        }
        j
    }

    fn run(&self, mut theta: DVector<f64>) -> PowerLawFit {
        let n = self.xs.len();
        let p = self.model.n_params();
        let y_norm = self
            .ys
            .iter()
            .map(|y| y * y)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);

        let mut r = self.residuals(&theta);
        let mut ss = r.norm_squared();
        let mut lambda = LAMBDA_INIT;
        let mut iterations = 0;
        let mut diagnostics = None;

        if !ss.is_finite() {
            diagnostics = Some("non-finite residuals at the starting point".to_owned());
        } else {
            while iterations < MAX_ITER && ss > 0.0 {
                iterations += 1;
                let j = self.jacobian(&theta);
                let jtj = j.transpose() * &j;
                let g = j.transpose() * &r;

                let mut accepted_step = None;
                while lambda <= LAMBDA_MAX {
                    let mut damped = jtj.clone();
                    let max_diag = jtj.diagonal().max();
                    for d in 0..p {
                        let scale = jtj[(d, d)].max(max_diag * 1e-15).max(f64::MIN_POSITIVE);
                        damped[(d, d)] += lambda * scale;
                    }
                    let Some(chol) = damped.cholesky() else {
                        lambda *= 10.0;
                        continue;
                    };
                    let delta = chol.solve(&g);
                    let candidate = &theta + &delta;
                    let r_new = self.residuals(&candidate);
                    let ss_new = r_new.norm_squared();
                    if ss_new.is_finite() && ss_new < ss {
                        let rel = delta.norm() / (theta.norm() + f64::MIN_POSITIVE);
                        theta = candidate;
                        r = r_new;
                        ss = ss_new;
                        lambda = (lambda / 10.0).max(1e-12);
                        accepted_step = Some(rel);
                        break;
                    }
                    lambda *= 10.0;
                }
                match accepted_step {
                    Some(rel) if rel < STEP_TOL => break,
                    Some(_) => {}
                    None => break,
                }
            }
        }

        let j = self.jacobian(&theta);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let gradient_norm = (0..p)
            .map(|d| {
                let col = jtj[(d, d)].sqrt();
                if col > 0.0 {
                    g[d].abs() / col
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);

        let params: Vec<f64> = theta.iter().copied().collect();
        let bounds = confidence_bounds_95(&params, &jtj, ss, n);
        if bounds.is_none() && diagnostics.is_none() {
            diagnostics = Some("JᵀJ is singular at the solution; bounds unavailable".to_owned());
        }
        let converged = ss.is_finite() && bounds.is_some() && gradient_norm <= GRAD_TOL * y_norm;
        if !converged && diagnostics.is_none() {
            diagnostics = Some(format!(
                "stopped after {iterations} iterations with scaled gradient {gradient_norm:.3e}"
            ));
        }

        let ci95 = bounds.map(|b| {
            let zero = Bounds {
                low: 0.0,
                high: 0.0,
            };
            [b[0], b[1], b.get(2).copied().unwrap_or(zero)]
        });
        PowerLawFit {
            model: self.model,
            a: theta[0],
            b: theta[1],
            c: self.offset(&theta),
            ci95,
            adj_r2: adjusted_r2_or_degenerate(ss, self.ys, p - 1),
            ss_res: ss,
            n_points: n,
            converged,
            iterations,
            gradient_norm,
            diagnostics,
        }
    }
}
