use serde::Serialize;

use crate::error::{Error, Result};

/// Records with `E` below this are dominated by rounding and skipped.
pub const ORDER_FLOOR: f64 = 1e3 * f64::EPSILON;

pub const DEFAULT_ORDER_WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderEstimate {
    /// Slope of `ln √E_{k+1}` against `ln √E_k`.
    pub order: f64,
    /// Root-mean-square residual of the linear fit.
    pub fit_residual: f64,
    /// Number of records in the window.
    pub used: usize,
}

/// Least-squares convergence order over the last `window` usable values of `E`.
///
/// A value is usable when it is finite and at least [`ORDER_FLOOR`]; at least
/// three are needed (two consecutive pairs).
pub fn estimate_order(e_values: &[f64], window: usize) -> Result<OrderEstimate> {
    let usable: Vec<f64> = e_values.iter().copied().filter(|e| e.is_finite() && *e >= ORDER_FLOOR).collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientRecords { usable: usable.len() });
    }
    let w = window.max(3).min(usable.len());
    let tail = &usable[usable.len() - w..];
    let logs: Vec<f64> = tail.iter().map(|e| 0.5 * e.ln()).collect();
    let xs = &logs[..w - 1];
    let ys = &logs[1..];
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientRecords { usable: 1 });
    }
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - order * x).powi(2)).sum();
    Ok(OrderEstimate { order, fit_residual: (ss / n).sqrt(), used: w })
}
