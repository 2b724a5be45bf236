//! Deterministic summation, exponent-aware norm reductions and log-log fits.

use serde::{Deserialize, Serialize};

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise summation; the result depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier-compensated running sum; the result depends only on the order
/// of the additions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// A Lebesgue exponent in floating form, used by the quadrature code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Power {
    Finite(f64),
    Infinite,
}

impl Power {
    pub fn is_infinite(self) -> bool {
        matches!(self, Power::Infinite)
    }
}

/// `(cell * sum |v|^p)^(1/p)` with max-scaling against overflow; `max |v|` for p = ∞.
pub fn power_norm(values: &[f64], p: Power, cell: f64) -> f64 {
    let peak = values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    match p {
        Power::Infinite => peak,
        Power::Finite(p) => {
            if peak == 0.0 {
                return 0.0;
            }
            let scaled: Vec<f64> = values.iter().map(|v| (v.abs() / peak).powf(p)).collect();
            peak * (cell * pairwise_sum(&scaled)).powf(1.0 / p)
        }
    }
}

/// Least-squares line through `(x_i, y_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = pairwise_sum(xs) / n;
    let my = pairwise_sum(ys) / n;
    let sxx: Vec<f64> = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    let sxy: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let sxx = pairwise_sum(&sxx);
    if sxx == 0.0 {
        return None;
    }
    let slope = pairwise_sum(&sxy) / sxx;
    let intercept = my - slope * mx;
    let sq: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .collect();
    let residual = (pairwise_sum(&sq) / n).sqrt();
    Some(LineFit {
        slope,
        intercept,
        residual,
    })
}

/// Fit of `log2 y` against `log2 x`; `None` if any value is not strictly positive.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.iter().chain(ys).any(|v| !v.is_finite() || *v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    fit_line(&lx, &ly)
}
