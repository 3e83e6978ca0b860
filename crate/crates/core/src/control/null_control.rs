use crate::control::cg::{conjugate_gradient, CgOptions};
use crate::control::gramian::{adjoint_field, gramian_apply};
use crate::error::{Error, Result};
use crate::wave::field::{SpaceTimeField, StatePair};
use crate::wave::geometry::check_geometric_condition;
use crate::wave::grid::SpaceTimeGrid;
use crate::wave::norms::l2_q;
use crate::wave::region::ControlRegion;
use crate::wave::solver::solve_forward;

pub const DEFAULT_CG_TOL: f64 = 1e-8;
pub const DEFAULT_CG_MAX_ITER: usize = 500;

/// Default Tikhonov weight `h²`.
pub fn default_eps_reg(grid: &SpaceTimeGrid) -> f64 {
    grid.h() * grid.h()
}

/// Steer `z_tt − Δz + A z = u χ_ω + B` from `initial` to `target` at time `T`.
#[derive(Debug, Clone)]
pub struct LinearControlProblem {
    pub grid: SpaceTimeGrid,
    pub potential: SpaceTimeField,
    pub source: SpaceTimeField,
    pub initial: StatePair,
    pub target: StatePair,
    pub region: ControlRegion,
    pub eps_reg: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Outcome of the geometric condition check, when an observer was supplied.
    pub geometric_condition: Option<bool>,
}

impl LinearControlProblem {
    /// Null-control problem with defaults `ε = h²`, `tol = 1e−8`, 500 iterations.
    pub fn new(
        grid: &SpaceTimeGrid,
        potential: SpaceTimeField,
        source: SpaceTimeField,
        initial: StatePair,
        region: ControlRegion,
    ) -> Result<Self> {
        let problem = LinearControlProblem {
            grid: *grid,
            potential,
            source,
            target: StatePair::zeros(grid),
            initial,
            region,
            eps_reg: default_eps_reg(grid),
            tol: DEFAULT_CG_TOL,
            max_iter: DEFAULT_CG_MAX_ITER,
            geometric_condition: None,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_target(mut self, target: StatePair) -> Result<Self> {
        self.target = target;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eps_reg(mut self, eps: f64) -> Result<Self> {
        self.eps_reg = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tol: f64, max_iter: usize) -> Result<Self> {
        self.tol = tol;
        self.max_iter = max_iter;
        self.validate()?;
        Ok(self)
    }

    /// Records whether the geometric condition holds as seen from `x0`.
    pub fn with_observer(mut self, x0: [f64; 2]) -> Result<Self> {
        let report = check_geometric_condition(self.grid.domain(), &self.region, self.grid.t_final(), x0)?;
        self.geometric_condition = Some(report.holds);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_reg >= 0.0) {
            return Err(Error::Config(format!("eps_reg must be nonnegative, got {}", self.eps_reg)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("CG tolerance must be positive, got {}", self.tol)));
        }
        self.potential.check_shape(&self.grid)?;
        self.source.check_shape(&self.grid)?;
        if self.initial.grid() != &self.grid || self.target.grid() != &self.grid {
            return Err(Error::Shape("initial or target state on a different grid".into()));
        }
        if self.region.weights().len() != self.grid.n_space() {
            return Err(Error::Shape("control region does not match the grid".into()));
        }
        Ok(())
    }

    /// `target − (terminal state of the uncontrolled solution)`.
    pub fn needed_terminal(&self) -> Result<StatePair> {
        let free = solve_forward(&self.grid, &self.potential, &self.source, &self.initial)?;
        Ok(self.target.sub(&free.terminal))
    }

    /// Runs the controlled solve for a given control and packages the result.
    pub fn evaluate_control(&self, control: SpaceTimeField, cg: CgReport) -> Result<ControlSolution> {
        let source = self.source.add_scaled(1.0, &control.mul_spatial(self.region.weights()));
        let traj = solve_forward(&self.grid, &self.potential, &source, &self.initial)?;
        let terminal_defect = traj.terminal.sub(&self.target).v_norm();
        Ok(ControlSolution {
            control_norm: l2_q(&control, &self.region),
            control,
            trajectory: traj.field,
            terminal: traj.terminal,
            terminal_defect,
            cg_iterations: cg.iterations,
            converged: cg.converged,
            residual_history: cg.residual_history,
            geometric_condition: self.geometric_condition,
        })
    }
}

/// Iteration data attached to a control solution.
#[derive(Debug, Clone, Default)]
pub struct CgReport {
    pub iterations: usize,
    pub converged: bool,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ControlSolution {
    /// `u`, zero outside ω.
    pub control: SpaceTimeField,
    /// Controlled trajectory `z`.
    pub trajectory: SpaceTimeField,
    pub terminal: StatePair,
    /// `‖(z(T), z_t(T)) − target‖_𝑽`.
    pub terminal_defect: f64,
    /// `‖u‖_{L²(q_T)}`.
    pub control_norm: f64,
    pub cg_iterations: usize,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    pub geometric_condition: Option<bool>,
}

/// HUM control by conjugate gradient on the regularized Gramian.
///
/// The data are reduced to a null-control problem by subtracting the free
/// solution; the control is `u = χ_ω φ_σ` for the CG solution `σ`. When the
/// iteration cap is reached the best iterate is returned with `converged = false`.
pub fn solve_null_control(problem: &LinearControlProblem) -> Result<ControlSolution> {
    problem.validate()?;
    let grid = problem.grid;
    let needed = problem.needed_terminal()?;
    let (np, nv) = needed.into_parts();
    let rhs = StatePair::new(&grid, nv, np.into_iter().map(|x| -x).collect())?;
    let opts = CgOptions { tol: problem.tol, max_iter: problem.max_iter };
    let outcome = conjugate_gradient(
        |s| gramian_apply(&grid, &problem.potential, &problem.region, s),
        problem.eps_reg,
        &rhs,
        opts,
    )?;
    let control = if outcome.solution.is_zero() {
        SpaceTimeField::zeros(&grid)
    } else {
        adjoint_field(&grid, &problem.potential, &outcome.solution)?.mul_spatial(problem.region.weights())
    };
    if !outcome.converged {
        log::debug!(
            "CG stopped after {} iterations at relative residual {:e}",
            outcome.iterations,
            outcome.residual_history.last().copied().unwrap_or(f64::NAN)
        );
    }
    let report = CgReport {
        iterations: outcome.iterations,
        converged: outcome.converged,
        residual_history: outcome.residual_history,
    };
    problem.evaluate_control(control, report)
}
