//! JSON experiment configuration.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::least_squares::problem::{InnerConfig, LsProblem};
use crate::least_squares::solve::{LsConfig, MethodTag};
use crate::nonlinearity::Nonlinearity;
use crate::wave::field::StatePair;
use crate::wave::grid::{Domain, SpaceTimeGrid};
use crate::wave::region::{ControlRegion, RegionShape};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub data: DataConfig,
    pub nonlinearity: NonlinearityConfig,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodTag>,
    #[serde(default)]
    pub ls: LsConfig,
    #[serde(default)]
    pub inner: InnerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub seed: u64,
}

fn default_methods() -> Vec<MethodTag> {
    vec![MethodTag::LeastSquares]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub domain: Domain,
    /// Nodes per axis, boundary included.
    pub nodes: Vec<usize>,
    pub nt: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub region: RegionShape,
    #[serde(default)]
    pub smoothed_region: bool,
    /// Observer for the geometric condition, outside the closed domain.
    pub x0: [f64; 2],
}

/// A spatial profile, resolution independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// `a · Π sin(k_i π x_i / L_i)`.
    Eigenmode { amplitude: f64, mode: Vec<usize> },
    /// `a · (1 − (|x − c|/r)²)²` inside the ball of radius `r`.
    Bump { amplitude: f64, center: Vec<f64>, radius: f64 },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Zero
    }
}

impl Profile {
    pub fn eval(&self, domain: Domain, x: [f64; 2]) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Eigenmode { amplitude, mode } => {
                let ext = domain.extents();
                let mut v = *amplitude;
                for (axis, &k) in mode.iter().enumerate().take(domain.dim()) {
                    v *= (k as f64 * std::f64::consts::PI * x[axis] / ext[axis]).sin();
                }
                v
            }
            Profile::Bump { amplitude, center, radius } => {
                let d2: f64 = center.iter().enumerate().take(domain.dim()).map(|(a, c)| (x[a] - c).powi(2)).sum();
                let q = d2 / (radius * radius);
                if q < 1.0 {
                    amplitude * (1.0 - q).powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self, domain: Domain, field: &str) -> Result<()> {
        match self {
            Profile::Zero => Ok(()),
            Profile::Eigenmode { mode, .. } => {
                if mode.len() != domain.dim() || mode.iter().any(|&k| k == 0) {
                    return Err(Error::Config(format!("{field}: eigenmode needs one positive index per axis")));
                }
                Ok(())
            }
            Profile::Bump { center, radius, .. } => {
                if center.len() != domain.dim() || !(*radius > 0.0) {
                    return Err(Error::Config(format!("{field}: bump needs a center per axis and radius > 0")));
                }
                Ok(())
            }
        }
    }

    fn amplitude_mut(&mut self) -> Option<&mut f64> {
        match self {
            Profile::Zero => None,
            Profile::Eigenmode { amplitude, .. } | Profile::Bump { amplitude, .. } => Some(amplitude),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateProfile {
    #[serde(default)]
    pub position: Profile,
    #[serde(default)]
    pub velocity: Profile,
}

impl StateProfile {
    pub fn sample(&self, grid: &SpaceTimeGrid) -> StatePair {
        let d = grid.domain();
        StatePair::from_fns(grid, |x| self.position.eval(d, x), |x| self.velocity.eval(d, x))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// `(u₀, u₁)`.
    #[serde(default)]
    pub initial: StateProfile,
    /// `(z₀, z₁)`.
    #[serde(default)]
    pub target: StateProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// One-parameter sweep. Parameters: `nonlinearity.<param>`, `data.amplitude`,
/// `scenario.T`, `scenario.nx` (with `nt` scaled to keep `dt/dx`), `inner.eps_reg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            )));
        }
        let s = &self.scenario;
        if !(s.t_final > 0.0) {
            return Err(Error::Config(format!("scenario.T must be positive, got {}", s.t_final)));
        }
        for (i, &n) in s.nodes.iter().enumerate() {
            if n < 3 {
                return Err(Error::Config(format!("scenario.nodes[{i}] must be at least 3, got {n}")));
            }
        }
        let [lx, ly] = s.domain.extents();
        if !(lx > 0.0) || (s.domain.dim() == 2 && !(ly > 0.0)) {
            return Err(Error::Config("scenario.domain: side lengths must be positive".into()));
        }
        self.data.initial.position.validate(s.domain, "data.initial.position")?;
        self.data.initial.velocity.validate(s.domain, "data.initial.velocity")?;
        self.data.target.position.validate(s.domain, "data.target.position")?;
        self.data.target.velocity.validate(s.domain, "data.target.velocity")?;
        if self.methods.is_empty() {
            return Err(Error::Config("methods: at least one method is required".into()));
        }
        self.ls.validate()?;
        if let Some(eps) = self.inner.eps_reg {
            if !(eps >= 0.0) {
                return Err(Error::Config(format!("inner.eps_reg must be nonnegative, got {eps}")));
            }
        }
        if !(self.inner.tol > 0.0) {
            return Err(Error::Config(format!("inner.tol must be positive, got {}", self.inner.tol)));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(Error::Config("sweep.values must not be empty".into()));
            }
            // applying the first point surfaces unknown parameter names early
            self.with_parameter(&sw.parameter, sw.values[0])?;
        }
        self.nonlinearity()?;
        self.grid()?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn grid(&self) -> Result<SpaceTimeGrid> {
        let s = &self.scenario;
        SpaceTimeGrid::new(s.domain, &s.nodes, s.nt, s.t_final)
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity> {
        Nonlinearity::builtin(&self.nonlinearity.name, &self.nonlinearity.params)
    }

    pub fn region(&self, grid: &SpaceTimeGrid) -> Result<ControlRegion> {
        if self.scenario.smoothed_region {
            ControlRegion::smoothed(grid, self.scenario.region.clone())
        } else {
            ControlRegion::new(grid, self.scenario.region.clone())
        }
    }

    pub fn problem(&self) -> Result<LsProblem> {
        let grid = self.grid()?;
        let problem = LsProblem::new(
            &grid,
            self.region(&grid)?,
            self.nonlinearity()?,
            self.data.initial.sample(&grid),
            self.data.target.sample(&grid),
        )?
        .with_inner(self.inner);
        Ok(problem.with_observer(self.scenario.x0))
    }

    /// Copy of the configuration with one sweep parameter set.
    pub fn with_parameter(&self, parameter: &str, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = self.clone();
        cfg.sweep = None;
        match parameter.split_once('.') {
            Some(("nonlinearity", p)) => {
                cfg.nonlinearity.params.insert(p.to_string(), value);
            }
            Some(("data", "amplitude")) => {
                let amp = cfg
                    .data
                    .initial
                    .position
                    .amplitude_mut()
                    .ok_or_else(|| Error::Config("sweep data.amplitude needs a nonzero initial position".into()))?;
                *amp = value;
            }
            Some(("scenario", "T")) => cfg.scenario.t_final = value,
            Some(("scenario", "nx")) => {
                if value.fract() != 0.0 || value < 3.0 {
                    return Err(Error::Config(format!("sweep scenario.nx needs integers ≥ 3, got {value}")));
                }
                let old = self.scenario.nodes[0];
                let nx = value as usize;
                cfg.scenario.nodes[0] = nx;
                let scaled = self.scenario.nt as f64 * (nx - 1) as f64 / (old - 1) as f64;
                cfg.scenario.nt = scaled.round() as usize;
            }
            Some(("inner", "eps_reg")) => cfg.inner.eps_reg = Some(value),
            _ => return Err(Error::Config(format!("sweep.parameter `{parameter}` is not supported"))),
        }
        Ok(cfg)
    }
}
