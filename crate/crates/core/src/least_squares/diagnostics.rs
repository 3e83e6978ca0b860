//! Theoretical constants evaluated along a run. The unknown observability
//! constant `C` is supplied by the caller; nothing here feeds back into the
//! iteration.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::least_squares::problem::LsProblem;
use crate::nonlinearity::beta_star;
use crate::wave::field::SpaceTimeField;
use crate::wave::norms::linf_lp;

/// Surrogate step `λ̃ = min(1, 1/q)` with `q = (1+s)^{1/s} c^{1/s} √E`; `λ̃ = 1` for `s = 0`.
pub fn analytic_lambda(e: f64, c: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) || !(c >= 0.0) || !(e >= 0.0) {
        return Err(Error::Precondition(format!("analytic λ needs s ∈ [0,1], c ≥ 0, E ≥ 0 (s={s}, c={c}, E={e})")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let q = (1.0 + s).powf(1.0 / s) * c.powf(1.0 / s) * e.sqrt();
    Ok(if q < 1.0 { 1.0 } else { 1.0 / q })
}

/// `d(y) = C exp(C ‖g′(y)‖²_{L^∞(0,T;L^d)})`.
pub fn d_of(c: f64, gprime_norm: f64) -> f64 {
    c * (c * gprime_norm * gprime_norm).exp()
}

/// `c(y) = C/((1+s)√2) [g′]_s d^{1+s}`.
pub fn c_of(c: f64, s: f64, seminorm: f64, d: f64) -> f64 {
    c / ((1.0 + s) * SQRT_2) * seminorm * d.powf(1.0 + s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub gprime_norm: f64,
    pub d_of_y: f64,
    /// Absent when `[g′]_s` is unknown.
    pub c_of_y: Option<f64>,
    /// `c(y) E^{s/2}`.
    pub e_k: Option<f64>,
    pub beta_star_s: f64,
    /// Uniform-bound versions built from `(α, β)` and the running bound `M`.
    pub d_m: Option<f64>,
    pub c_m: Option<f64>,
}

/// `‖g′(y)‖_{L^∞(0,T;L^d(Ω))}`.
pub fn gprime_norm(problem: &LsProblem, y: &SpaceTimeField) -> f64 {
    linf_lp(&problem.gprime_of(y), problem.grid.dim() as f64)
}

/// Constants at the iterate `y` with `E = e` and running bound `m_run = max_k ‖y_k‖_{L^∞(L¹)}`.
pub fn diagnostic_constants(problem: &LsProblem, y: &SpaceTimeField, e: f64, c: f64, m_run: f64) -> Result<Diagnostics> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("diagnostic constant C must be positive, got {c}")));
    }
    let g = &problem.nonlinearity;
    let s = g.holder_exponent();
    let gn = gprime_norm(problem, y);
    let d = d_of(c, gn);
    let c_y = g.seminorm().map(|sem| c_of(c, s, sem, d));
    let e_k = c_y.map(|cy| cy * e.powf(0.5 * s));
    let omega = problem.grid.domain().measure();
    let d_m = g.growth().map(|(alpha, beta)| {
        let c3 = 2.0 * c * 1f64.max((2.0 * c * alpha * alpha).exp() * omega);
        c3 * (1.0 + m_run / omega).powf(2.0 * c * beta * beta)
    });
    let c_m = match (d_m, g.seminorm()) {
        (Some(dm), Some(sem)) => Some(c_of(c, s, sem, dm)),
        _ => None,
    };
    Ok(Diagnostics { gprime_norm: gn, d_of_y: d, c_of_y: c_y, e_k, beta_star_s: beta_star(s, c)?, d_m, c_m })
}

/// One accepted step for the decay-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecaySample {
    pub e: f64,
    pub e_next: f64,
    pub lambda: f64,
    pub gprime_norm: f64,
}

/// `√E_{k+1} ≤ (|1−λ| + λ^{1+s} c(y_k) E_k^{s/2}) √E_k` for every sample.
pub fn decay_bound_holds(samples: &[DecaySample], c: f64, s: f64, seminorm: f64) -> bool {
    samples.iter().all(|p| {
        let cy = c_of(c, s, seminorm, d_of(c, p.gprime_norm));
        let factor = (1.0 - p.lambda).abs() + p.lambda.powf(1.0 + s) * cy * p.e.powf(0.5 * s);
        p.e_next.sqrt() <= factor * p.e.sqrt()
    })
}

/// Smallest `C` on a geometric grid in `[1e−3, 1e3]` (ratio `10^{1/20}`)
/// for which the decay bound holds on every sample; `None` if none does.
pub fn smallest_sufficient_constant(samples: &[DecaySample], s: f64, seminorm: f64) -> Option<f64> {
    (0..=120).map(|i| 10f64.powf(-3.0 + i as f64 / 20.0)).find(|&c| decay_bound_holds(samples, c, s, seminorm))
}
