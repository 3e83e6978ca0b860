//! Dense ground truth for small grids.
//!
//! The terminal map `L : u ↦ (z(T), z_t(T))` (zero data, source `χ_ω u`) is
//! assembled column by column from unit-impulse forward solves, independently
//! of the adjoint solver. With `W` the trapezoidal `L²(q_T)` weights and
//! `Q = |cell| · diag(−Δ, I)` the discrete `𝑽` metric on terminal states:
//!
//! * `ε > 0`: minimize `½‖u‖²_W + (1/2ε)‖Lu − b‖²_Q`;
//! * `ε = 0`: minimize `‖u‖²_W` subject to `Lu = b`.

use nalgebra::{DMatrix, DVector};

use crate::control::null_control::{CgReport, ControlSolution, LinearControlProblem};
use crate::error::{Error, Result};
use crate::wave::field::{SpaceTimeField, StatePair};
use crate::wave::solver::solve_forward;
use crate::wave::spectral::SineBasis;

pub const ORACLE_MAX_UNKNOWNS: usize = 50_000;

/// The discrete constraint and metrics of a control problem, in dense form.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    /// `(level, node)` of each unknown: every node with `χ_ω > 0`, at every level.
    pub unknowns: Vec<(usize, usize)>,
    /// Interior nodes indexing the rows (positions first, then velocities).
    pub rows: Vec<usize>,
    /// `L`, of size `2·n_interior × n_unknowns`.
    pub terminal_map: DMatrix<f64>,
    /// Diagonal of `W`.
    pub weights: DVector<f64>,
    /// `Q`.
    pub metric: DMatrix<f64>,
    /// Required terminal state `b`.
    pub rhs: DVector<f64>,
}

impl DenseSystem {
    pub fn control_field(&self, problem: &LinearControlProblem, u: &DVector<f64>) -> SpaceTimeField {
        let mut field = SpaceTimeField::zeros(&problem.grid);
        for (&(n, k), &v) in self.unknowns.iter().zip(u.iter()) {
            field.level_mut(n)[k] = v;
        }
        field
    }

    /// `‖u‖²_W`.
    pub fn norm_sq(&self, u: &DVector<f64>) -> f64 {
        u.iter().zip(self.weights.iter()).map(|(x, w)| w * x * x).sum()
    }
}

pub fn assemble_dense_system(problem: &LinearControlProblem) -> Result<DenseSystem> {
    problem.validate()?;
    let grid = problem.grid;
    let size = grid.n_space() * grid.n_levels();
    if size > ORACLE_MAX_UNKNOWNS {
        return Err(Error::SizeCap { size, cap: ORACLE_MAX_UNKNOWNS });
    }
    let chi = problem.region.weights();
    let support: Vec<usize> = (0..grid.n_space()).filter(|&k| chi[k] > 0.0).collect();
    let rows: Vec<usize> = grid.interior().collect();
    let ni = rows.len();
    let unknowns: Vec<(usize, usize)> =
        (0..grid.n_levels()).flat_map(|n| support.iter().map(move |&k| (n, k))).collect();

    let mut terminal_map = DMatrix::zeros(2 * ni, unknowns.len());
    let zero_init = StatePair::zeros(&grid);
    let mut source = SpaceTimeField::zeros(&grid);
    for (col, &(n, k)) in unknowns.iter().enumerate() {
        source.level_mut(n)[k] = chi[k];
        let out = solve_forward(&grid, &problem.potential, &source, &zero_init)?;
        source.level_mut(n)[k] = 0.0;
        for (r, &node) in rows.iter().enumerate() {
            terminal_map[(r, col)] = out.terminal.position()[node];
            terminal_map[(ni + r, col)] = out.terminal.velocity()[node];
        }
    }
    let weights = DVector::from_iterator(
        unknowns.len(),
        unknowns.iter().map(|&(n, k)| grid.time_weight(n) * grid.space_weight(k)),
    );

    let cell = grid.cell_volume();
    let basis = SineBasis::for_grid(&grid);
    let mut metric = DMatrix::zeros(2 * ni, 2 * ni);
    let mut unit = vec![0.0; grid.n_space()];
    for (c, &node) in rows.iter().enumerate() {
        unit[node] = 1.0;
        let col = basis.apply_laplacian_power(&unit, 1);
        unit[node] = 0.0;
        for (r, &rn) in rows.iter().enumerate() {
            metric[(r, c)] = cell * col[rn];
        }
        metric[(ni + c, ni + c)] = cell;
    }
    // the spectral −Δ is symmetric up to rounding; make it exact
    let metric = (&metric + metric.transpose()) * 0.5;

    let needed = problem.needed_terminal()?;
    let rhs = DVector::from_iterator(
        2 * ni,
        rows.iter().map(|&k| needed.position()[k]).chain(rows.iter().map(|&k| needed.velocity()[k])),
    );
    Ok(DenseSystem { unknowns, rows, terminal_map, weights, metric, rhs })
}

/// Solves the dense optimality system for the minimizer `u`.
pub fn dense_oracle_vector(system: &DenseSystem, eps: f64) -> Result<DVector<f64>> {
    let l = &system.terminal_map;
    if system.rhs.iter().all(|&v| v == 0.0) {
        return Ok(DVector::zeros(l.ncols()));
    }
    if eps > 0.0 {
        let lq = l.transpose() * &system.metric;
        let mut k = &lq * l;
        for (i, w) in system.weights.iter().enumerate() {
            k[(i, i)] += eps * w;
        }
        let rhs = lq * &system.rhs;
        match k.clone().cholesky() {
            Some(ch) => Ok(ch.solve(&rhs)),
            None => k.lu().solve(&rhs).ok_or_else(|| Error::Precondition("singular oracle system".into())),
        }
    } else {
        let winv_lt = {
            let mut m = l.transpose();
            for (i, w) in system.weights.iter().enumerate() {
                m.row_mut(i).scale_mut(1.0 / w);
            }
            m
        };
        let s = l * &winv_lt;
        let svd = s.svd(true, true);
        let cutoff = 1e-13 * svd.singular_values.max();
        let lambda = svd.solve(&system.rhs, cutoff).map_err(|e| Error::Precondition(e.to_string()))?;
        Ok(winv_lt * lambda)
    }
}

/// Minimal-norm control from the dense system, packaged like the CG result.
pub fn dense_oracle_control(problem: &LinearControlProblem) -> Result<ControlSolution> {
    let system = assemble_dense_system(problem)?;
    let u = dense_oracle_vector(&system, problem.eps_reg)?;
    let control = system.control_field(problem, &u);
    problem.evaluate_control(control, CgReport { iterations: 0, converged: true, residual_history: vec![] })
}
