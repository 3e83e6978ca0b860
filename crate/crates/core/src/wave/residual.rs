use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::wave::field::SpaceTimeField;
use crate::wave::region::ControlRegion;
use crate::wave::solver::laplacian;

/// Discrete `∂_tt y − Δy + g(y) − f χ_ω` with the stencils of the leapfrog solver.
///
/// * level 0 uses the first-step formula and needs the prescribed initial
///   velocity `u₁`: `2(y¹ − y⁰ − dt u₁)/dt² − Δ_h y⁰ + g(y⁰) − f⁰χ`;
/// * levels `1..N−1` use the centered second difference;
/// * level `N` carries no equation of the scheme (the terminal velocity is a
///   side condition, not part of the residual) and is identically zero.
///
/// Boundary nodes are zero. A field produced by
/// `solve_forward(A, S, (u₀, u₁))` has residual `S + g(y) − A y − f χ` up to
/// rounding.
pub fn residual_field(
    y: &SpaceTimeField,
    f: &SpaceTimeField,
    g: &Nonlinearity,
    region: &ControlRegion,
    initial_velocity: &[f64],
) -> Result<SpaceTimeField> {
    let grid = *y.grid();
    f.check_shape(&grid)?;
    let ns = grid.n_space();
    if initial_velocity.len() != ns || region.weights().len() != ns {
        return Err(Error::Shape("initial velocity or region does not match the grid".into()));
    }
    let nt = grid.nt();
    let dt = grid.dt();
    let idt2 = 1.0 / (dt * dt);
    let chi = region.weights();
    let interior: Vec<usize> = grid.interior().collect();
    let mut out = vec![0.0; ns * grid.n_levels()];
    let mut lap = vec![0.0; ns];

    for n in 0..nt {
        let cur = y.level(n);
        let next = y.level(n + 1);
        let fl = f.level(n);
        laplacian(&grid, cur, &mut lap);
        let row = &mut out[n * ns..(n + 1) * ns];
        if n == 0 {
            for &k in &interior {
                let tt = 2.0 * (next[k] - cur[k] - dt * initial_velocity[k]) * idt2;
                row[k] = tt - lap[k] + g.eval(cur[k]) - fl[k] * chi[k];
            }
        } else {
            let prev = y.level(n - 1);
            for &k in &interior {
                let tt = (next[k] - 2.0 * cur[k] + prev[k]) * idt2;
                row[k] = tt - lap[k] + g.eval(cur[k]) - fl[k] * chi[k];
            }
        }
    }
    Ok(SpaceTimeField::from_values_unchecked(&grid, out))
}
