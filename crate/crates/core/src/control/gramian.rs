use crate::error::{Error, Result};
use crate::wave::field::{SpaceTimeField, StatePair};
use crate::wave::grid::SpaceTimeGrid;
use crate::wave::region::ControlRegion;
use crate::wave::solver::{solve_backward, solve_forward};

/// Adjoint field `φ_σ` for a terminal seed `σ = (φ(T), φ_t(T))`.
pub fn adjoint_field(grid: &SpaceTimeGrid, potential: &SpaceTimeField, seed: &StatePair) -> Result<SpaceTimeField> {
    solve_backward(grid, potential, seed)
}

/// HUM Gramian `Λσ`.
///
/// Solves the adjoint backward from `σ`, drives the state from rest with the
/// control `χ_ω φ_σ` (source `χ_ω² φ_σ`), and returns the terminal state
/// `(P, V)` as `(V, −P)`. In the plain `L² × L²` pairing this is symmetric with
/// `⟨Λσ, σ⟩ = ‖χ_ω φ_σ‖²_{L²(q_T)}`.
pub fn gramian_apply(
    grid: &SpaceTimeGrid,
    potential: &SpaceTimeField,
    region: &ControlRegion,
    seed: &StatePair,
) -> Result<StatePair> {
    if seed.position().iter().chain(seed.velocity()).any(|v| !v.is_finite()) {
        return Err(Error::Precondition("Gramian seed must be finite".into()));
    }
    if seed.is_zero() {
        return Ok(StatePair::zeros(grid));
    }
    let phi = adjoint_field(grid, potential, seed)?;
    let chi2: Vec<f64> = region.weights().iter().map(|c| c * c).collect();
    let source = phi.mul_spatial(&chi2);
    let out = solve_forward(grid, potential, &source, &StatePair::zeros(grid))?;
    let (p, v) = out.terminal.into_parts();
    let minus_p = p.into_iter().map(|x| -x).collect();
    StatePair::new(grid, v, minus_p)
}
