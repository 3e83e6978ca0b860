use serde::{Deserialize, Serialize};

use crate::control::null_control::{default_eps_reg, LinearControlProblem, DEFAULT_CG_MAX_ITER, DEFAULT_CG_TOL};
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::wave::field::{SpaceTimeField, StatePair};
use crate::wave::grid::SpaceTimeGrid;
use crate::wave::region::ControlRegion;
use crate::wave::solver::{initial_state, terminal_state};

/// Settings of the linear control solve run inside every outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerConfig {
    /// Tikhonov weight; `None` means `h²`.
    #[serde(default)]
    pub eps_reg: Option<f64>,
    #[serde(default = "default_inner_tol")]
    pub tol: f64,
    #[serde(default = "default_inner_max_iter")]
    pub max_iter: usize,
}

fn default_inner_tol() -> f64 {
    DEFAULT_CG_TOL
}

fn default_inner_max_iter() -> usize {
    DEFAULT_CG_MAX_ITER
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig { eps_reg: None, tol: DEFAULT_CG_TOL, max_iter: DEFAULT_CG_MAX_ITER }
    }
}

/// Controllability problem for `y_tt − Δy + g(y) = f χ_ω`: steer `initial` to `target`.
#[derive(Debug, Clone)]
pub struct LsProblem {
    pub grid: SpaceTimeGrid,
    pub region: ControlRegion,
    pub nonlinearity: Nonlinearity,
    pub initial: StatePair,
    pub target: StatePair,
    pub inner: InnerConfig,
    /// Observer point for the geometric condition flag.
    pub observer: Option<[f64; 2]>,
}

impl LsProblem {
    pub fn new(
        grid: &SpaceTimeGrid,
        region: ControlRegion,
        nonlinearity: Nonlinearity,
        initial: StatePair,
        target: StatePair,
    ) -> Result<Self> {
        if region.weights().len() != grid.n_space() || initial.grid() != grid || target.grid() != grid {
            return Err(Error::Shape("problem data on different grids".into()));
        }
        Ok(LsProblem { grid: *grid, region, nonlinearity, initial, target, inner: InnerConfig::default(), observer: None })
    }

    pub fn with_inner(mut self, inner: InnerConfig) -> Self {
        self.inner = inner;
        self
    }

    pub fn with_observer(mut self, x0: [f64; 2]) -> Self {
        self.observer = Some(x0);
        self
    }

    pub fn eps_reg(&self) -> f64 {
        self.inner.eps_reg.unwrap_or_else(|| default_eps_reg(&self.grid))
    }

    /// Linear control problem with this problem's region and inner settings.
    pub fn linear_problem(
        &self,
        potential: SpaceTimeField,
        source: SpaceTimeField,
        initial: StatePair,
        target: StatePair,
    ) -> Result<LinearControlProblem> {
        let mut p = LinearControlProblem::new(&self.grid, potential, source, initial, self.region.clone())?
            .with_target(target)?
            .with_eps_reg(self.eps_reg())?
            .with_tolerance(self.inner.tol, self.inner.max_iter)?;
        if let Some(x0) = self.observer {
            p = p.with_observer(x0)?;
        }
        Ok(p)
    }

    /// `g(y)` pointwise.
    pub fn g_of(&self, y: &SpaceTimeField) -> SpaceTimeField {
        y.map(|r| self.nonlinearity.eval(r))
    }

    /// `g′(y)` pointwise.
    pub fn gprime_of(&self, y: &SpaceTimeField) -> SpaceTimeField {
        y.map(|r| self.nonlinearity.deriv(r))
    }
}

/// A pair `(y, f)` and the iteration counter.
#[derive(Debug, Clone)]
pub struct LsState {
    pub y: SpaceTimeField,
    pub f: SpaceTimeField,
    pub k: usize,
}

impl LsState {
    /// `(y, f) − λ (Y, F)`.
    pub fn stepped(&self, lambda: f64, dy: &SpaceTimeField, df: &SpaceTimeField) -> LsState {
        LsState { y: self.y.add_scaled(-lambda, dy), f: self.f.add_scaled(-lambda, df), k: self.k + 1 }
    }

    /// `(−g(y) + χ f)` on level `n`, the forcing seen by the scheme.
    fn forcing(&self, problem: &LsProblem, n: usize) -> Vec<f64> {
        let chi = problem.region.weights();
        self.y.level(n).iter().zip(self.f.level(n)).zip(chi).map(|((&y, &f), &c)| c * f - problem.nonlinearity.eval(y)).collect()
    }

    /// Discrete `(y(0), y_t(0))`.
    pub fn initial_state(&self, problem: &LsProblem) -> StatePair {
        initial_state(&self.y, &self.forcing(problem, 0))
    }

    /// Discrete `(y(T), y_t(T))`.
    pub fn terminal_state(&self, problem: &LsProblem) -> StatePair {
        terminal_state(&self.y, &self.forcing(problem, problem.grid.nt()))
    }

    /// `𝑽`-distance of the initial and terminal states to the prescribed data.
    pub fn membership_defects(&self, problem: &LsProblem) -> (f64, f64) {
        let init = self.initial_state(problem).sub(&problem.initial).v_norm();
        let term = self.terminal_state(problem).sub(&problem.target).v_norm();
        (init, term)
    }
}
