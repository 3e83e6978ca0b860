//! Discrete wave-equation machinery: grids, fields, the leapfrog solvers,
//! residual evaluation, norms and the geometric control condition.

pub mod field;
pub mod geometry;
pub mod grid;
pub mod norms;
pub mod region;
pub mod residual;
pub mod solver;
pub mod spectral;

pub use field::{SpaceTimeField, StatePair};
pub use geometry::{check_geometric_condition, GeometryReport};
pub use grid::{Domain, SpaceTimeGrid};
pub use region::{ControlRegion, RegionShape, Side};
pub use residual::residual_field;
pub use solver::{solve_backward, solve_forward, Trajectory};
