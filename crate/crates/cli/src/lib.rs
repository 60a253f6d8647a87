//! Verification harness for `bergman-core`: identity suites, the growth
//! experiment for the invariant Laplacian, convergence sweeps and file exports.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bergman_core::{DiskQuadrature, Error, HyperbolicGrid};
use serde::Serialize;

pub mod experiments;
pub mod exports;
pub mod identities;

/// Tolerance used by checks whose residual is governed by truncation tails.
pub const TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Identities that hold in exact arithmetic.
    pub exact: f64,
    /// Identities between assembled operators.
    pub assembled: f64,
    /// Pointwise identities between transform fields.
    pub field: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { exact: 1e-12, assembled: 1e-6, field: 1e-7 }
    }
}

/// Order of the Berezin transform used for the symbols `a_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerezinOrder {
    Fixed(usize),
    /// `n(j) = max(2, ceil((j+1)² / 32))`.
    Quadratic,
}

impl BerezinOrder {
    pub fn for_index(self, j: usize) -> usize {
        match self {
            BerezinOrder::Fixed(n) => n,
            BerezinOrder::Quadratic => ((j + 1) * (j + 1)).div_ceil(32).max(2),
        }
    }
}

impl FromStr for BerezinOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "quadratic" {
            return Ok(BerezinOrder::Quadratic);
        }
        s.parse()
            .map(BerezinOrder::Fixed)
            .map_err(|_| format!("expected a nonnegative integer or `quadratic`, got `{s}`"))
    }
}

impl fmt::Display for BerezinOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BerezinOrder::Fixed(n) => write!(f, "{n}"),
            BerezinOrder::Quadratic => write!(f, "quadratic"),
        }
    }
}

impl Serialize for BerezinOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub n_trunc: usize,
    pub radial_order: usize,
    pub angular_order: usize,
    pub tol: Tolerances,
    pub grid_rmax: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub k: usize,
    pub n_berezin: BerezinOrder,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_trunc: 48,
            radial_order: 200,
            angular_order: 256,
            tol: Tolerances::default(),
            grid_rmax: 0.995,
            out_dir: PathBuf::from("out"),
            seed: 0,
            k: 1,
            n_berezin: BerezinOrder::Fixed(2),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_trunc < 16 {
            return Err(HarnessError::Config(format!("--n-trunc must be at least 16, got {}", self.n_trunc)));
        }
        let t = self.tol;
        if !(t.exact > 0.0 && t.assembled > 0.0 && t.field > 0.0) {
            return Err(HarnessError::Config("tolerances must be positive".into()));
        }
        self.grid()?;
        self.quadrature()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<HyperbolicGrid, HarnessError> {
        HyperbolicGrid::with_rmax(self.grid_rmax).map_err(|e| HarnessError::Config(format!("--grid-rmax: {e}")))
    }

    pub fn quadrature(&self) -> Result<DiskQuadrature, HarnessError> {
        DiskQuadrature::new(self.radial_order, self.angular_order).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

#[derive(Debug)]
pub enum HarnessError {
    /// Bad flags or configuration values.
    Config(String),
    /// A measure file that cannot be read or parsed.
    Input(String),
    /// A computation that failed or could not be resolved.
    Failure(String),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(m) => write!(f, "configuration error: {m}"),
            HarnessError::Input(m) => write!(f, "input error: {m}"),
            HarnessError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Input(_) => 2,
            HarnessError::Failure(_) => 1,
        }
    }
}

impl From<Error> for HarnessError {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(m) => HarnessError::Config(m),
            Error::Parse { .. } => HarnessError::Input(e.to_string()),
            other => HarnessError::Failure(other.to_string()),
        }
    }
}

pub fn load_measure(path: &Path) -> Result<bergman_core::MeasureSpec, HarnessError> {
    bergman_core::MeasureSpec::load(path).map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))
}

/// Writes `contents` to `dir/name`, creating `dir` as needed.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| HarnessError::Failure(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
