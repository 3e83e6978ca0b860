//! Explicit leapfrog for `y_tt − Δy + A y = S` with homogeneous Dirichlet data.
//!
//! Interior update, for `n ≥ 1`:
//!
//! ```text
//! y^{n+1} = 2 y^n − y^{n−1} + dt² (Δ_h y^n − A^n y^n + S^n)
//! ```
//!
//! The first step uses the ghost value
//! `y^{-1} = y^0 − dt u₁ + dt²/2 (Δ_h y^0 − A^0 y^0 + S^0)`, and the velocity
//! reported at `T` is the mirror image of that formula,
//! `v^N = (y^N − y^{N−1})/dt + dt/2 (Δ_h y^N − A^N y^N + S^N)`. With this
//! pairing the backward solve is the exact transpose of the forward one, which
//! is what keeps the control Gramian symmetric.

use crate::error::{Error, Result};
use crate::wave::field::{SpaceTimeField, StatePair};
use crate::wave::grid::SpaceTimeGrid;

/// A solution field together with its state at the final time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub field: SpaceTimeField,
    pub terminal: StatePair,
}

/// Centered second-difference Laplacian on interior nodes; boundary entries of
/// `out` are set to zero.
pub fn laplacian(grid: &SpaceTimeGrid, v: &[f64], out: &mut [f64]) {
    let nx = grid.nx();
    let idx2 = 1.0 / (grid.dx() * grid.dx());
    out.iter_mut().for_each(|o| *o = 0.0);
    if grid.dim() == 1 {
        for i in 1..nx - 1 {
            out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * idx2;
        }
    } else {
        let idy2 = 1.0 / (grid.dy() * grid.dy());
        for j in 1..grid.ny() - 1 {
            for i in 1..nx - 1 {
                let k = j * nx + i;
                out[k] = (v[k - 1] - 2.0 * v[k] + v[k + 1]) * idx2 + (v[k - nx] - 2.0 * v[k] + v[k + nx]) * idy2;
            }
        }
    }
}

fn check_inputs(grid: &SpaceTimeGrid, potential: &SpaceTimeField, source: &SpaceTimeField) -> Result<()> {
    if grid.dt() > grid.cfl_bound() * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt: grid.dt(), bound: grid.cfl_bound() });
    }
    potential.check_shape(grid)?;
    source.check_shape(grid)
}

fn check_finite(level: usize, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Blowup { level })
    }
}

/// Solves `y_tt − Δy + A y = S` forward from `init = (y(0), y_t(0))`.
pub fn solve_forward(
    grid: &SpaceTimeGrid,
    potential: &SpaceTimeField,
    source: &SpaceTimeField,
    init: &StatePair,
) -> Result<Trajectory> {
    check_inputs(grid, potential, source)?;
    let ns = grid.n_space();
    let nt = grid.nt();
    let dt = grid.dt();
    let dt2 = dt * dt;
    let interior: Vec<usize> = grid.interior().collect();
    let mut values = vec![0.0; ns * grid.n_levels()];
    let mut lap = vec![0.0; ns];

    values[..ns].copy_from_slice(init.position());
    check_finite(0, &values[..ns])?;
    laplacian(grid, &values[..ns], &mut lap);
    {
        let (y0, rest) = values.split_at_mut(ns);
        let y1 = &mut rest[..ns];
        let (a0, s0) = (potential.level(0), source.level(0));
        let u1 = init.velocity();
        for &k in &interior {
            y1[k] = y0[k] + dt * u1[k] + 0.5 * dt2 * (lap[k] - a0[k] * y0[k] + s0[k]);
        }
        check_finite(1, y1)?;
    }
    for n in 1..nt {
        let (head, tail) = values.split_at_mut((n + 1) * ns);
        let prev = &head[(n - 1) * ns..n * ns];
        let cur = &head[n * ns..];
        let next = &mut tail[..ns];
        laplacian(grid, cur, &mut lap);
        let (an, sn) = (potential.level(n), source.level(n));
        for &k in &interior {
            next[k] = 2.0 * cur[k] - prev[k] + dt2 * (lap[k] - an[k] * cur[k] + sn[k]);
        }
        check_finite(n + 1, next)?;
    }
    let field = SpaceTimeField::from_values_unchecked(grid, values);
    let forcing: Vec<f64> = (0..ns).map(|k| source.get(nt, k) - potential.get(nt, k) * field.get(nt, k)).collect();
    let terminal = terminal_state(&field, &forcing);
    Ok(Trajectory { field, terminal })
}

/// State at `T` of a field whose last time level is driven by `forcing = S^N − A^N y^N`.
pub fn terminal_state(field: &SpaceTimeField, forcing: &[f64]) -> StatePair {
    let grid = field.grid();
    let nt = grid.nt();
    let dt = grid.dt();
    let ns = grid.n_space();
    let (yn, ym) = (field.level(nt), field.level(nt - 1));
    let mut lap = vec![0.0; ns];
    laplacian(grid, yn, &mut lap);
    let velocity = (0..ns).map(|k| (yn[k] - ym[k]) / dt + 0.5 * dt * (lap[k] + forcing[k])).collect();
    StatePair::new(grid, yn.to_vec(), velocity).expect("lengths match the grid")
}

/// Velocity at `t = 0` implied by the first step of the scheme with `forcing = S^0 − A^0 y^0`.
pub fn initial_state(field: &SpaceTimeField, forcing: &[f64]) -> StatePair {
    let grid = field.grid();
    let dt = grid.dt();
    let ns = grid.n_space();
    let (y0, y1) = (field.level(0), field.level(1));
    let mut lap = vec![0.0; ns];
    laplacian(grid, y0, &mut lap);
    let velocity = (0..ns).map(|k| (y1[k] - y0[k]) / dt - 0.5 * dt * (lap[k] + forcing[k])).collect();
    StatePair::new(grid, y0.to_vec(), velocity).expect("lengths match the grid")
}

/// Solves the source-free adjoint `φ_tt − Δφ + A φ = 0` backward from
/// `terminal = (φ(T), φ_t(T))`.
pub fn solve_backward(grid: &SpaceTimeGrid, potential: &SpaceTimeField, terminal: &StatePair) -> Result<SpaceTimeField> {
    if grid.dt() > grid.cfl_bound() * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt: grid.dt(), bound: grid.cfl_bound() });
    }
    potential.check_shape(grid)?;
    let ns = grid.n_space();
    let nt = grid.nt();
    let dt = grid.dt();
    let dt2 = dt * dt;
    let interior: Vec<usize> = grid.interior().collect();
    let mut values = vec![0.0; ns * grid.n_levels()];
    let mut lap = vec![0.0; ns];

    values[nt * ns..].copy_from_slice(terminal.position());
    check_finite(nt, &values[nt * ns..])?;
    laplacian(grid, &values[nt * ns..], &mut lap);
    {
        let (head, last) = values.split_at_mut(nt * ns);
        let below = &mut head[(nt - 1) * ns..];
        let an = potential.level(nt);
        let v = terminal.velocity();
        for &k in &interior {
            below[k] = last[k] - dt * v[k] + 0.5 * dt2 * (lap[k] - an[k] * last[k]);
        }
        check_finite(nt - 1, below)?;
    }
    for n in (1..nt).rev() {
        let (head, tail) = values.split_at_mut(n * ns);
        let prev = &mut head[(n - 1) * ns..];
        let cur = &tail[..ns];
        let next = &tail[ns..2 * ns];
        laplacian(grid, cur, &mut lap);
        let an = potential.level(n);
        for &k in &interior {
            prev[k] = 2.0 * cur[k] - next[k] + dt2 * (lap[k] - an[k] * cur[k]);
        }
        check_finite(n - 1, prev)?;
    }
    Ok(SpaceTimeField::from_values_unchecked(grid, values))
}

/// Discrete energy `½‖v^n‖² + ½‖∇_h y^n‖²` per time level (centered velocity,
/// one-sided at the ends), for conservation checks.
pub fn discrete_energy(field: &SpaceTimeField) -> Vec<f64> {
    let grid = field.grid();
    let nt = grid.nt();
    let dt = grid.dt();
    let ns = grid.n_space();
    let mut lap = vec![0.0; ns];
    (0..=nt)
        .map(|n| {
            let y = field.level(n);
            let (a, b, scale) = match n {
                0 => (field.level(0), field.level(1), dt),
                _ if n == nt => (field.level(nt - 1), field.level(nt), dt),
                _ => (field.level(n - 1), field.level(n + 1), 2.0 * dt),
            };
            laplacian(grid, y, &mut lap);
            let mut kin = 0.0;
            let mut pot = 0.0;
            for k in grid.interior() {
                let v = (b[k] - a[k]) / scale;
                let w = grid.space_weight(k);
                kin += w * v * v;
                // summation by parts: ‖∇y‖² = −⟨Δ_h y, y⟩
                pot -= w * lap[k] * y[k];
            }
            0.5 * (kin + pot)
        })
        .collect()
}
