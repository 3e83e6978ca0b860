use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible ratio between `dt` and the CFL bound of the scheme.
pub const CFL_FACTOR: f64 = 0.95;

/// Spatial domain: the interval `(0, L)` or the rectangle `(0, Lx) x (0, Ly)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    /// Side lengths along each axis (`ly = 0` in 1D).
    pub fn extents(&self) -> [f64; 2] {
        match *self {
            Domain::Interval { length } => [length, 0.0],
            Domain::Rectangle { lx, ly } => [lx, ly],
        }
    }

    /// Lebesgue measure `|Ω|`.
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { length } => length,
            Domain::Rectangle { lx, ly } => lx * ly,
        }
    }

    /// Closed-domain membership of a point.
    pub fn contains_closed(&self, x: [f64; 2]) -> bool {
        match *self {
            Domain::Interval { length } => x[0] >= 0.0 && x[0] <= length,
            Domain::Rectangle { lx, ly } => x[0] >= 0.0 && x[0] <= lx && x[1] >= 0.0 && x[1] <= ly,
        }
    }
}

/// Uniform discretization of `Ω x (0, T)`.
///
/// Nodes include the boundary; Dirichlet nodes are carried in every field but
/// never updated. Time levels run from `0` to `nt` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    domain: Domain,
    nx: usize,
    ny: usize,
    nt: usize,
    t_final: f64,
    dx: f64,
    dy: f64,
    dt: f64,
}

impl SpaceTimeGrid {
    /// Builds a grid with `nodes[a]` nodes per axis and `nt` time steps.
    pub fn new(domain: Domain, nodes: &[usize], nt: usize, t_final: f64) -> Result<Self> {
        let dim = domain.dim();
        if nodes.len() != dim {
            return Err(Error::Config(format!(
                "expected {dim} node counts for a {dim}D domain, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|&n| n < 3) {
            return Err(Error::Config("node counts must be at least 3 per axis".into()));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::Config(format!("T must be positive, got {t_final}")));
        }
        if nt == 0 {
            return Err(Error::Config("nt must be positive".into()));
        }
        let [lx, ly] = domain.extents();
        if !(lx > 0.0) || (dim == 2 && !(ly > 0.0)) {
            return Err(Error::Config("domain extents must be positive".into()));
        }
        let nx = nodes[0];
        let ny = if dim == 2 { nodes[1] } else { 1 };
        let dx = lx / (nx - 1) as f64;
        let dy = if dim == 2 { ly / (ny - 1) as f64 } else { f64::INFINITY };
        let dt = t_final / nt as f64;
        let grid = SpaceTimeGrid { domain, nx, ny, nt, t_final, dx, dy, dt };
        let bound = grid.cfl_bound();
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, bound });
        }
        Ok(grid)
    }

    /// Largest stable `dt`: `0.95 / sqrt(1/dx² + 1/dy²)`, i.e. `0.95 dx / sqrt(d)` on square cells.
    pub fn cfl_bound(&self) -> f64 {
        let inv = if self.dim() == 2 {
            (1.0 / (self.dx * self.dx) + 1.0 / (self.dy * self.dy)).sqrt()
        } else {
            1.0 / self.dx
        };
        CFL_FACTOR / inv
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Number of time steps; there are `nt + 1` time levels.
    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Mesh width along `y`; infinite in 1D.
    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Smallest spatial mesh width.
    pub fn h(&self) -> f64 {
        self.dx.min(self.dy)
    }

    pub fn n_space(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_levels(&self) -> usize {
        self.nt + 1
    }

    /// Volume of one cell: `dx` in 1D, `dx dy` in 2D.
    pub fn cell_volume(&self) -> f64 {
        if self.dim() == 2 {
            self.dx * self.dy
        } else {
            self.dx
        }
    }

    pub fn time(&self, level: usize) -> f64 {
        level as f64 * self.dt
    }

    /// Flat node index, `x` fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, node: usize) -> [f64; 2] {
        let i = node % self.nx;
        let j = node / self.nx;
        let y = if self.dim() == 2 { j as f64 * self.dy } else { 0.0 };
        [i as f64 * self.dx, y]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let i = node % self.nx;
        let j = node / self.nx;
        let on_x = i == 0 || i == self.nx - 1;
        if self.dim() == 2 {
            on_x || j == 0 || j == self.ny - 1
        } else {
            on_x
        }
    }

    /// Iterator over interior node indices in increasing order.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_space()).filter(move |&n| !self.is_boundary(n))
    }

    pub fn n_interior(&self) -> usize {
        if self.dim() == 2 {
            (self.nx - 2) * (self.ny - 2)
        } else {
            self.nx - 2
        }
    }

    /// Trapezoidal quadrature weight of a spatial node.
    pub fn space_weight(&self, node: usize) -> f64 {
        let i = node % self.nx;
        let j = node / self.nx;
        let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
        let wy = if self.dim() == 2 && (j == 0 || j == self.ny - 1) { 0.5 } else { 1.0 };
        wx * wy * self.cell_volume()
    }

    /// Trapezoidal quadrature weight of a time level.
    pub fn time_weight(&self, level: usize) -> f64 {
        if level == 0 || level == self.nt {
            0.5 * self.dt
        } else {
            self.dt
        }
    }

    /// Same grid with the node counts scaled so that `h` and `dt` shrink by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let nodes: Vec<usize> = match self.dim() {
            1 => vec![(self.nx - 1) * factor + 1],
            _ => vec![(self.nx - 1) * factor + 1, (self.ny - 1) * factor + 1],
        };
        SpaceTimeGrid::new(self.domain, &nodes, self.nt * factor, self.t_final)
    }
}
