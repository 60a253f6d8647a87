//! Evaluation grids for sup-norms over the disk.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_RMAX: f64 = 0.995;
pub const DEFAULT_SHELLS: usize = 40;
pub const DEFAULT_ANGLES: usize = 64;

/// Radii `tanh(u_i)` with `u_i` equispaced on `(0, atanh rmax]`, each carrying
/// `angles` equispaced points, plus the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicGrid {
    rmax: f64,
    radii: Vec<f64>,
    angles: usize,
}

impl HyperbolicGrid {
    pub fn new(rmax: f64, shells: usize, angles: usize) -> Result<Self> {
        if !(rmax > 0.0 && rmax < 1.0) {
            return Err(Error::usage(format!("grid radius must lie in (0, 1), got {rmax}")));
        }
        if shells == 0 || angles == 0 {
            return Err(Error::usage("grid needs at least one shell and one angle"));
        }
        let umax = rmax.atanh();
        let radii = (1..=shells).map(|i| (umax * i as f64 / shells as f64).tanh()).collect();
        Ok(Self { rmax, radii, angles })
    }

    pub fn with_rmax(rmax: f64) -> Result<Self> {
        Self::new(rmax, DEFAULT_SHELLS, DEFAULT_ANGLES)
    }

    /// Twice as many shells and angles over the same radius range.
    pub fn refined(&self) -> Self {
        Self::new(self.rmax, 2 * self.radii.len(), 2 * self.angles).expect("valid grid")
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn shell(&self, i: usize) -> Vec<C64> {
        let r = self.radii[i];
        (0..self.angles)
            .map(|l| C64::from_polar(r, 2.0 * PI * l as f64 / self.angles as f64))
            .collect()
    }

    /// Origin first, then shells from the inside out.
    pub fn points(&self) -> Vec<C64> {
        let mut pts = vec![C64::new(0.0, 0.0)];
        for i in 0..self.radii.len() {
            pts.extend(self.shell(i));
        }
        pts
    }

    /// Evaluates `f` on every grid point in parallel; result order matches
    /// [`HyperbolicGrid::points`].
    pub fn map<T: Send>(&self, f: impl Fn(C64) -> Result<T> + Sync) -> Result<Vec<T>> {
        self.points().into_par_iter().map(|z| f(z)).collect()
    }

    /// `max |f|` over the grid.
    pub fn sup(&self, f: impl Fn(C64) -> Result<f64> + Sync) -> Result<f64> {
        Ok(self.map(|z| f(z).map(f64::abs))?.into_iter().fold(0.0, f64::max))
    }

    /// `max |f|` over each shell, inside out (the origin is not included).
    pub fn shell_sups(&self, f: impl Fn(C64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
        let vals = self.map(|z| f(z).map(f64::abs))?;
        Ok(vals[1..].chunks(self.angles).map(|c| c.iter().copied().fold(0.0, f64::max)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_are_hyperbolically_equispaced() {
        let g = HyperbolicGrid::with_rmax(0.995).unwrap();
        assert_eq!(g.points().len(), 1 + 40 * 64);
        assert!((g.radii().last().unwrap() - 0.995).abs() < 1e-14);
        let steps: Vec<f64> = g.radii().iter().map(|r| r.atanh()).collect();
        let h = steps[0];
        for w in steps.windows(2) {
            assert!((w[1] - w[0] - h).abs() < 1e-12);
        }
        assert!(HyperbolicGrid::with_rmax(1.0).is_err());
    }
}
