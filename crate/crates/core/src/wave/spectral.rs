//! Dirichlet sine eigenbasis on the interval and the rectangle.
//!
//! On a uniform grid with `N` intervals the vectors `sin(kπ i / N)`,
//! `k = 1..N-1`, are orthogonal with squared length `N/2`, so the discrete
//! sine transform is exact and cheap to invert. The basis diagonalizes the
//! centered difference Laplacian; here it is paired with the *continuous*
//! eigenvalues `μ_k = (kπ/L)²` to realize `H¹₀` and `H⁻¹` norms.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::wave::grid::SpaceTimeGrid;

#[derive(Debug)]
struct Axis {
    /// Number of interior nodes, `N - 1`.
    n: usize,
    /// `sin(kπ i / N)` with row `k-1`, column `i-1`.
    table: Vec<f64>,
    /// `(kπ / L)²`.
    mu: Vec<f64>,
    /// `2 / N`.
    scale: f64,
}

impl Axis {
    fn new(nodes: usize, length: f64) -> Self {
        let intervals = nodes - 1;
        let n = intervals - 1;
        let mut table = vec![0.0; n * n];
        for k in 0..n {
            for i in 0..n {
                table[k * n + i] = ((k + 1) as f64 * PI * (i + 1) as f64 / intervals as f64).sin();
            }
        }
        let mu = (1..=n).map(|k| (k as f64 * PI / length).powi(2)).collect();
        Axis { n, table, mu, scale: 2.0 / intervals as f64 }
    }

    fn forward(&self, v: &[f64], out: &mut [f64]) {
        for k in 0..self.n {
            let row = &self.table[k * self.n..(k + 1) * self.n];
            out[k] = self.scale * row.iter().zip(v).map(|(s, x)| s * x).sum::<f64>();
        }
    }

    fn inverse(&self, c: &[f64], out: &mut [f64]) {
        for o in out.iter_mut() {
            *o = 0.0;
        }
        for k in 0..self.n {
            let row = &self.table[k * self.n..(k + 1) * self.n];
            let ck = c[k];
            for (o, s) in out.iter_mut().zip(row) {
                *o += ck * s;
            }
        }
    }
}

/// Sine transform and spectral multipliers for one grid.
#[derive(Debug)]
pub struct SineBasis {
    nx: usize,
    ny: usize,
    dim: usize,
    ax: Axis,
    ay: Option<Axis>,
    /// `∫ sin² ` normalization: `L/2` per axis.
    mass: f64,
}

type CacheKey = (usize, usize, u64, u64);

impl SineBasis {
    /// Shared basis for `grid`, built once per distinct grid shape.
    pub fn for_grid(grid: &SpaceTimeGrid) -> Arc<SineBasis> {
        static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<SineBasis>>>> = OnceLock::new();
        let [lx, ly] = grid.domain().extents();
        let key = (grid.nx(), grid.ny(), lx.to_bits(), ly.to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("sine basis cache poisoned");
        map.entry(key).or_insert_with(|| Arc::new(SineBasis::new(grid))).clone()
    }

    fn new(grid: &SpaceTimeGrid) -> Self {
        let [lx, ly] = grid.domain().extents();
        let ax = Axis::new(grid.nx(), lx);
        let (ay, mass) = if grid.dim() == 2 {
            (Some(Axis::new(grid.ny(), ly)), 0.25 * lx * ly)
        } else {
            (None, 0.5 * lx)
        };
        SineBasis { nx: grid.nx(), ny: grid.ny(), dim: grid.dim(), ax, ay, mass }
    }

    fn n_modes(&self) -> usize {
        self.ax.n * self.ay.as_ref().map_or(1, |a| a.n)
    }

    /// Sine coefficients of a nodal vector (boundary values ignored).
    pub fn coefficients(&self, v: &[f64]) -> Vec<f64> {
        let mx = self.ax.n;
        match &self.ay {
            None => {
                let mut c = vec![0.0; mx];
                self.ax.forward(&v[1..self.nx - 1], &mut c);
                c
            }
            Some(ay) => {
                let my = ay.n;
                // transform rows along x, then columns along y
                let mut tmp = vec![0.0; mx * my];
                for j in 0..my {
                    let start = (j + 1) * self.nx + 1;
                    self.ax.forward(&v[start..start + mx], &mut tmp[j * mx..(j + 1) * mx]);
                }
                let mut col = vec![0.0; my];
                let mut colc = vec![0.0; my];
                let mut c = vec![0.0; mx * my];
                for k in 0..mx {
                    for j in 0..my {
                        col[j] = tmp[j * mx + k];
                    }
                    ay.forward(&col, &mut colc);
                    for l in 0..my {
                        c[l * mx + k] = colc[l];
                    }
                }
                c
            }
        }
    }

    /// Nodal vector (zero on the boundary) with the given sine coefficients.
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        let mx = self.ax.n;
        let mut v = vec![0.0; self.nx * self.ny];
        match &self.ay {
            None => self.ax.inverse(c, &mut v[1..self.nx - 1]),
            Some(ay) => {
                let my = ay.n;
                let mut tmp = vec![0.0; mx * my];
                let mut col = vec![0.0; my];
                let mut colv = vec![0.0; my];
                for k in 0..mx {
                    for l in 0..my {
                        col[l] = c[l * mx + k];
                    }
                    ay.inverse(&col, &mut colv);
                    for j in 0..my {
                        tmp[j * mx + k] = colv[j];
                    }
                }
                for j in 0..my {
                    let start = (j + 1) * self.nx + 1;
                    self.ax.inverse(&tmp[j * mx..(j + 1) * mx], &mut v[start..start + mx]);
                }
            }
        }
        v
    }

    /// Dirichlet-Laplacian eigenvalue of each mode, in coefficient order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.ay {
            None => self.ax.mu.clone(),
            Some(ay) => {
                let mut mu = Vec::with_capacity(self.n_modes());
                for l in 0..ay.n {
                    for k in 0..self.ax.n {
                        mu.push(self.ax.mu[k] + ay.mu[l]);
                    }
                }
                mu
            }
        }
    }

    fn weighted_sq(&self, v: &[f64], power: i32) -> f64 {
        let c = self.coefficients(v);
        let mu = self.eigenvalues();
        self.mass * c.iter().zip(&mu).map(|(ck, m)| ck * ck * m.powi(power)).sum::<f64>()
    }

    /// `‖v‖²_{H⁻¹} = Σ v̂²/μ` (with the `L²` normalization of the basis).
    pub fn h_minus1_sq(&self, v: &[f64]) -> f64 {
        self.weighted_sq(v, -1)
    }

    /// `‖∇v‖²_{L²} = Σ μ v̂²`.
    pub fn h1_sq(&self, v: &[f64]) -> f64 {
        self.weighted_sq(v, 1)
    }

    /// Spectral `(-Δ)^power v` for `power = ±1`.
    pub fn apply_laplacian_power(&self, v: &[f64], power: i32) -> Vec<f64> {
        let mut c = self.coefficients(v);
        for (ck, m) in c.iter_mut().zip(self.eigenvalues()) {
            *ck *= m.powi(power);
        }
        self.synthesize(&c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::grid::Domain;

    #[test]
    fn round_trip_2d() {
        let g = SpaceTimeGrid::new(Domain::Rectangle { lx: 1.0, ly: 2.0 }, &[9, 12], 200, 1.0).unwrap();
        let b = SineBasis::for_grid(&g);
        let v: Vec<f64> = (0..g.n_space())
            .map(|n| if g.is_boundary(n) { 0.0 } else { (n as f64 * 0.37).sin() })
            .collect();
        let back = b.synthesize(&b.coefficients(&v));
        for (a, c) in v.iter().zip(&back) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_powers_are_inverse() {
        let g = SpaceTimeGrid::new(Domain::Interval { length: 2.0 }, &[31], 100, 1.0).unwrap();
        let b = SineBasis::for_grid(&g);
        let v: Vec<f64> = (0..31).map(|i| if i == 0 || i == 30 { 0.0 } else { (i as f64).cos() }).collect();
        let back = b.apply_laplacian_power(&b.apply_laplacian_power(&v, 1), -1);
        for (a, c) in v.iter().zip(&back) {
            assert!((a - c).abs() < 1e-11);
        }
    }
}
