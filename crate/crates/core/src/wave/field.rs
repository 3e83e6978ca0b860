use std::io::Write;

use crate::error::{Error, Result};
use crate::wave::grid::SpaceTimeGrid;

/// A scalar sampled at every node of every time level, stored time-outer.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: SpaceTimeGrid,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        SpaceTimeField { grid: *grid, values: vec![0.0; grid.n_space() * grid.n_levels()] }
    }

    pub fn constant(grid: &SpaceTimeGrid, value: f64) -> Self {
        SpaceTimeField { grid: *grid, values: vec![value; grid.n_space() * grid.n_levels()] }
    }

    /// Samples `f(x, t)` at every node, boundary included.
    pub fn from_fn(grid: &SpaceTimeGrid, f: impl Fn([f64; 2], f64) -> f64) -> Self {
        let ns = grid.n_space();
        let mut values = Vec::with_capacity(ns * grid.n_levels());
        for n in 0..grid.n_levels() {
            let t = grid.time(n);
            values.extend((0..ns).map(|node| f(grid.coords(node), t)));
        }
        SpaceTimeField { grid: *grid, values }
    }

    /// Wraps raw values; rejects wrong lengths and non-finite entries.
    pub fn from_values(grid: &SpaceTimeGrid, values: Vec<f64>) -> Result<Self> {
        let expected = grid.n_space() * grid.n_levels();
        if values.len() != expected {
            return Err(Error::Shape(format!("expected {expected} values, got {}", values.len())));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Blowup { level: pos / grid.n_space() });
        }
        Ok(SpaceTimeField { grid: *grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: &SpaceTimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_space() * grid.n_levels());
        SpaceTimeField { grid: *grid, values }
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn level(&self, n: usize) -> &[f64] {
        let ns = self.grid.n_space();
        &self.values[n * ns..(n + 1) * ns]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [f64] {
        let ns = self.grid.n_space();
        &mut self.values[n * ns..(n + 1) * ns]
    }

    pub fn get(&self, level: usize, node: usize) -> f64 {
        self.values[level * self.grid.n_space() + node]
    }

    pub fn check_shape(&self, grid: &SpaceTimeGrid) -> Result<()> {
        if &self.grid != grid {
            return Err(Error::Shape("field was sampled on a different grid".into()));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SpaceTimeField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &SpaceTimeField) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + alpha * b).collect();
        SpaceTimeField { grid: self.grid, values }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SpaceTimeField) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        SpaceTimeField { grid: self.grid, values }
    }

    /// Multiplies every time level by the per-node weights `w`.
    pub fn mul_spatial(&self, w: &[f64]) -> Self {
        let ns = self.grid.n_space();
        debug_assert_eq!(w.len(), ns);
        let values = self.values.iter().enumerate().map(|(k, v)| v * w[k % ns]).collect();
        SpaceTimeField { grid: self.grid, values }
    }

    /// Time levels in reverse order.
    pub fn reversed_in_time(&self) -> Self {
        let ns = self.grid.n_space();
        let mut values = Vec::with_capacity(self.values.len());
        for chunk in self.values.chunks(ns).rev() {
            values.extend_from_slice(chunk);
        }
        SpaceTimeField { grid: self.grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Writes `level,node,x,y,t,value` rows (time-outer, node-major).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "level,node,x,y,t,value")?;
        let ns = self.grid.n_space();
        for (k, v) in self.values.iter().enumerate() {
            let (n, node) = (k / ns, k % ns);
            let [x, y] = self.grid.coords(node);
            writeln!(out, "{n},{node},{x},{y},{},{v}", self.grid.time(n))?;
        }
        Ok(())
    }

    /// Raw little-endian `f64` dump in the same order as [`write_csv`](Self::write_csv).
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        for v in &self.values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

/// A `(position, velocity)` snapshot on the spatial grid.
///
/// Both components vanish on Dirichlet nodes. Also used for adjoint seeds
/// `(φ₀, φ₁)`, which live in `L² x H⁻¹` rather than `H¹₀ x L²`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    grid: SpaceTimeGrid,
    position: Vec<f64>,
    velocity: Vec<f64>,
}

impl StatePair {
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        let ns = grid.n_space();
        StatePair { grid: *grid, position: vec![0.0; ns], velocity: vec![0.0; ns] }
    }

    /// Builds a pair and zeroes both components on boundary nodes.
    pub fn new(grid: &SpaceTimeGrid, mut position: Vec<f64>, mut velocity: Vec<f64>) -> Result<Self> {
        let ns = grid.n_space();
        if position.len() != ns || velocity.len() != ns {
            return Err(Error::Shape(format!("state components must have {ns} entries")));
        }
        for node in 0..ns {
            if grid.is_boundary(node) {
                position[node] = 0.0;
                velocity[node] = 0.0;
            }
        }
        Ok(StatePair { grid: *grid, position, velocity })
    }

    pub fn from_fns(
        grid: &SpaceTimeGrid,
        position: impl Fn([f64; 2]) -> f64,
        velocity: impl Fn([f64; 2]) -> f64,
    ) -> Self {
        let ns = grid.n_space();
        let p = (0..ns).map(|n| position(grid.coords(n))).collect();
        let v = (0..ns).map(|n| velocity(grid.coords(n))).collect();
        StatePair::new(grid, p, v).expect("lengths match by construction")
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn position(&self) -> &[f64] {
        &self.position
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    pub fn is_zero(&self) -> bool {
        self.position.iter().chain(&self.velocity).all(|&v| v == 0.0)
    }

    pub fn add_scaled(&self, alpha: f64, other: &StatePair) -> StatePair {
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + alpha * y).collect();
        StatePair {
            grid: self.grid,
            position: zip(&self.position, &other.position),
            velocity: zip(&self.velocity, &other.velocity),
        }
    }

    pub fn sub(&self, other: &StatePair) -> StatePair {
        self.add_scaled(-1.0, other)
    }

    pub fn scaled(&self, alpha: f64) -> StatePair {
        StatePair {
            grid: self.grid,
            position: self.position.iter().map(|v| alpha * v).collect(),
            velocity: self.velocity.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Discrete `L² x L²` pairing, the pairing in which the Gramian is symmetric.
    pub fn l2_dot(&self, other: &StatePair) -> f64 {
        let mut s = 0.0;
        for node in 0..self.grid.n_space() {
            let w = self.grid.space_weight(node);
            s += w * (self.position[node] * other.position[node] + self.velocity[node] * other.velocity[node]);
        }
        s
    }

    pub(crate) fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.position, self.velocity)
    }
}
