//! Conjugate gradient for `Λσ + ε R⁻¹σ = b` in the `L² × H⁻¹` pairing.
//!
//! `Λ` is symmetric in the plain `L² × L²` pairing, `R = diag(I, −Δ)` maps the
//! plain dual into `𝑯 = L² × H⁻¹`, and the iteration is CG on `RΛ + ε` with the
//! `𝑯` inner product (equivalently, CG on `Λ + εR⁻¹` preconditioned by `R`).
//! For `b = (V, −P)` the `𝑯`-norm of `Rb` is the `𝑽`-norm of `(P, V)`, so the
//! relative residual measures the terminal defect directly.

use crate::error::{Error, Result};
use crate::wave::field::StatePair;
use crate::wave::spectral::SineBasis;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Stop when `‖r_k‖_𝑯 ≤ tol · ‖r_0‖_𝑯`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { tol: 1e-8, max_iter: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    /// Best iterate seen (smallest residual).
    pub solution: StatePair,
    pub iterations: usize,
    pub converged: bool,
    /// Relative `𝑯` residual after each iteration, starting with `1` for the zero guess.
    pub residual_history: Vec<f64>,
    /// `J(x_k) = ½⟨Mx_k, x_k⟩ − ⟨b, x_k⟩` with `M = Λ + εR⁻¹`, starting with `0`.
    /// `‖x_k − x*‖²_M = 2J(x_k) + ‖x*‖²_M`, so this tracks the Gramian-norm error.
    pub energy_history: Vec<f64>,
    /// `‖Rb‖_𝑯`.
    pub rhs_norm: f64,
}

/// `R = diag(I, −Δ)`.
pub fn riesz(basis: &SineBasis, v: &StatePair) -> StatePair {
    let second = basis.apply_laplacian_power(v.velocity(), 1);
    StatePair::new(v.grid(), v.position().to_vec(), second).expect("same grid")
}

/// `R⁻¹ = diag(I, (−Δ)⁻¹)`.
pub fn riesz_inverse(basis: &SineBasis, v: &StatePair) -> StatePair {
    let second = basis.apply_laplacian_power(v.velocity(), -1);
    StatePair::new(v.grid(), v.position().to_vec(), second).expect("same grid")
}

/// Runs CG from the zero guess. `apply` evaluates `Λ`.
pub fn conjugate_gradient(
    mut apply: impl FnMut(&StatePair) -> Result<StatePair>,
    eps: f64,
    rhs: &StatePair,
    opts: CgOptions,
) -> Result<CgOutcome> {
    let grid = *rhs.grid();
    let basis = SineBasis::for_grid(&grid);
    let mut x = StatePair::zeros(&grid);
    let mut r = rhs.clone();
    let mut z = riesz(&basis, &r);
    let mut rz = r.l2_dot(&z);
    let rz0 = rz;
    let rhs_norm = rz0.max(0.0).sqrt();
    let mut history = vec![1.0];
    let mut energy = vec![0.0];
    if rz0 == 0.0 {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            converged: true,
            residual_history: history,
            energy_history: energy,
            rhs_norm,
        });
    }
    if !rz0.is_finite() {
        return Err(Error::CgBreakdown { iteration: 0 });
    }
    let mut p = z.clone();
    let mut best = (1.0, x.clone());
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=opts.max_iter {
        let mut q = apply(&p)?;
        if eps > 0.0 {
            q = q.add_scaled(eps, &riesz_inverse(&basis, &p));
        }
        let pq = p.l2_dot(&q);
        if !pq.is_finite() {
            return Err(Error::CgBreakdown { iteration: k });
        }
        if pq <= 0.0 {
            // Λ + εR⁻¹ has lost definiteness numerically; keep the best iterate
            log::warn!("CG curvature {pq:e} at iteration {k}");
            break;
        }
        let alpha = rz / pq;
        energy.push(energy[energy.len() - 1] - 0.5 * alpha * rz);
        x = x.add_scaled(alpha, &p);
        r = r.add_scaled(-alpha, &q);
        z = riesz(&basis, &r);
        let rz_new = r.l2_dot(&z);
        if !rz_new.is_finite() {
            return Err(Error::CgBreakdown { iteration: k });
        }
        iterations = k;
        let rel = (rz_new.max(0.0) / rz0).sqrt();
        history.push(rel);
        if rel < best.0 {
            best = (rel, x.clone());
        }
        if rel <= opts.tol {
            converged = true;
            break;
        }
        p = z.add_scaled(rz_new / rz, &p);
        rz = rz_new;
    }
    Ok(CgOutcome { solution: best.1, iterations, converged, residual_history: history, energy_history: energy, rhs_norm })
}
