use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wave::grid::{Domain, SpaceTimeGrid};

/// A side of the rectangle `(0, Lx) x (0, Ly)`, or an endpoint of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `x = 0`
    Left,
    /// `x = Lx`
    Right,
    /// `y = 0`
    Bottom,
    /// `y = Ly`
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];
}

/// Geometric description of the control set `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionShape {
    /// `(a, b)` in 1D.
    Interval { a: f64, b: f64 },
    /// Axis-aligned sub-rectangle `(x0, x1) x (y0, y1)` in 2D.
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// `{x ∈ Ω : dist(x, side) < width}` for each listed side, 2D only.
    SideNeighborhood { sides: Vec<Side>, width: f64 },
}

/// The control region with its per-node indicator weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlRegion {
    shape: RegionShape,
    weights: Vec<f64>,
    smoothed: bool,
}

impl ControlRegion {
    /// Sharp 0/1 indicator of the open set described by `shape`.
    pub fn new(grid: &SpaceTimeGrid, shape: RegionShape) -> Result<Self> {
        Self::build(grid, shape, false)
    }

    /// Indicator with a one-cell linear ramp outside the declared set.
    pub fn smoothed(grid: &SpaceTimeGrid, shape: RegionShape) -> Result<Self> {
        Self::build(grid, shape, true)
    }

    fn build(grid: &SpaceTimeGrid, shape: RegionShape, smoothed: bool) -> Result<Self> {
        validate(grid.domain(), &shape)?;
        let h = grid.h();
        let weights: Vec<f64> = (0..grid.n_space())
            .map(|node| {
                if grid.is_boundary(node) {
                    return 0.0;
                }
                let d = outside_distance(grid.domain(), &shape, grid.coords(node));
                if d < 0.0 {
                    1.0
                } else if smoothed && d < h {
                    1.0 - d / h
                } else {
                    0.0
                }
            })
            .collect();
        if !weights.iter().any(|&w| w == 1.0) {
            return Err(Error::Config("control region contains no interior grid node".into()));
        }
        Ok(ControlRegion { shape, weights, smoothed })
    }

    pub fn shape(&self) -> &RegionShape {
        &self.shape
    }

    /// Per-node `χ_ω` weights in `[0, 1]`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_smoothed(&self) -> bool {
        self.smoothed
    }

    /// Nodes where controls may be nonzero.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(n, _)| n)
    }

    /// Sides of the boundary whose neighborhood (intersected with Ω) lies inside ω
    /// for some positive width.
    pub fn covered_sides(&self, domain: Domain) -> Vec<Side> {
        let tol = 1e-12;
        match (&self.shape, domain) {
            (RegionShape::Interval { a, b }, Domain::Interval { length }) => {
                let mut out = Vec::new();
                if *a <= tol && *b > 0.0 {
                    out.push(Side::Left);
                }
                if *b >= length - tol && *a < length {
                    out.push(Side::Right);
                }
                out
            }
            (RegionShape::Rectangle { x0, x1, y0, y1 }, Domain::Rectangle { lx, ly }) => {
                let spans_x = *x0 <= tol && *x1 >= lx - tol;
                let spans_y = *y0 <= tol && *y1 >= ly - tol;
                let mut out = Vec::new();
                if spans_y && *x0 <= tol {
                    out.push(Side::Left);
                }
                if spans_y && *x1 >= lx - tol {
                    out.push(Side::Right);
                }
                if spans_x && *y0 <= tol {
                    out.push(Side::Bottom);
                }
                if spans_x && *y1 >= ly - tol {
                    out.push(Side::Top);
                }
                out
            }
            (RegionShape::SideNeighborhood { sides, width }, _) if *width > 0.0 => {
                let mut s = sides.clone();
                s.sort();
                s.dedup();
                s
            }
            _ => Vec::new(),
        }
    }
}

fn validate(domain: Domain, shape: &RegionShape) -> Result<()> {
    match (shape, domain) {
        (RegionShape::Interval { a, b }, Domain::Interval { .. }) if a < b => Ok(()),
        (RegionShape::Rectangle { x0, x1, y0, y1 }, Domain::Rectangle { .. }) if x0 < x1 && y0 < y1 => Ok(()),
        (RegionShape::SideNeighborhood { sides, width }, Domain::Rectangle { .. })
            if *width > 0.0 && !sides.is_empty() =>
        {
            Ok(())
        }
        _ => Err(Error::Config(format!("region {shape:?} is empty or does not fit a {}D domain", domain.dim()))),
    }
}

/// Signed distance-like quantity: negative strictly inside the open set,
/// otherwise the Euclidean distance to it.
fn outside_distance(domain: Domain, shape: &RegionShape, x: [f64; 2]) -> f64 {
    let eps = 1e-12;
    match shape {
        RegionShape::Interval { a, b } => {
            if x[0] > a + eps && x[0] < b - eps {
                -1.0
            } else {
                (a - x[0]).max(x[0] - b).max(0.0)
            }
        }
        RegionShape::Rectangle { x0, x1, y0, y1 } => {
            if x[0] > x0 + eps && x[0] < x1 - eps && x[1] > y0 + eps && x[1] < y1 - eps {
                -1.0
            } else {
                let dx = (x0 - x[0]).max(x[0] - x1).max(0.0);
                let dy = (y0 - x[1]).max(x[1] - y1).max(0.0);
                dx.hypot(dy)
            }
        }
        RegionShape::SideNeighborhood { sides, width } => {
            let [lx, ly] = domain.extents();
            sides
                .iter()
                .map(|side| {
                    let dist = match side {
                        Side::Left => x[0],
                        Side::Right => lx - x[0],
                        Side::Bottom => x[1],
                        Side::Top => ly - x[1],
                    };
                    if dist < width - eps {
                        -1.0
                    } else {
                        dist - width
                    }
                })
                .fold(f64::INFINITY, f64::min)
        }
    }
}
