//! Pseudo-hyperbolic disks and Carleson diagnostics.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::berezin::{berezin_measure, berezin_toeplitz};
use crate::bergman::MobiusMap;
use crate::error::{Error, Result};
use crate::grid::HyperbolicGrid;
use crate::measure::MeasureSpec;
use crate::quadrature::DiskQuadrature;
use crate::toeplitz::{assemble_toeplitz, ToeplitzRequest};
use crate::C64;

/// Radii at which the box kernel is reported.
pub const BOX_RADII: [f64; 3] = [0.1, 0.3, 0.5];
/// Relative change of `b0_sup` under grid refinement still counted as converged.
pub const REFINEMENT_TOL: f64 = 0.02;
/// Required decay of the outermost shell relative to the global sup.
pub const VANISHING_DECAY: f64 = 10.0;

/// `D(v, r) = {z : |φ_v(z)| ≤ r}`, a Euclidean disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoDisk {
    pub v: [f64; 2],
    pub r: f64,
    pub euclidean_center: [f64; 2],
    pub euclidean_radius: f64,
    /// Normalized area `[r(1-|v|²)/(1-|v|²r²)]²`.
    pub area: f64,
}

impl PseudoDisk {
    pub fn center(&self) -> C64 {
        C64::new(self.euclidean_center[0], self.euclidean_center[1])
    }

    pub fn v(&self) -> C64 {
        C64::new(self.v[0], self.v[1])
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center()).norm() <= self.euclidean_radius
    }
}

pub fn pseudo_disk(v: C64, r: f64) -> Result<PseudoDisk> {
    let map = MobiusMap::new(v)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("pseudo-hyperbolic radius must lie in (0, 1), got {r}")));
    }
    let v2 = v.norm_sqr();
    let den = 1.0 - r * r * v2;
    let center = v * ((1.0 - r * r) / den);
    let radius = r * (1.0 - v2) / den;
    for l in 0..20 {
        let z = map.eval(C64::from_polar(r, 2.0 * PI * l as f64 / 20.0))?;
        let gap = ((z - center).norm() - radius).abs();
        if gap > 1e-12 {
            return Err(Error::precision(format!("boundary sample misses the Euclidean circle by {gap:e}")));
        }
    }
    Ok(PseudoDisk {
        v: [v.re, v.im],
        r,
        euclidean_center: [center.re, center.im],
        euclidean_radius: radius,
        area: radius * radius,
    })
}

/// Rule on the unit disk mapped onto pseudo-disks.
fn local_rule() -> DiskQuadrature {
    DiskQuadrature::new(32, 64).expect("valid orders")
}

/// `∫_{D} f dμ`. Atoms are tested for membership; densities are integrated
/// over the Euclidean disk by the mapped rule `z = c + R u`.
fn integrate_over(mu: &MeasureSpec, d: &PseudoDisk, q: &DiskQuadrature, f: impl Fn(C64) -> f64) -> f64 {
    match mu {
        MeasureSpec::Atomic(atoms) => atoms
            .iter()
            .filter(|a| (a.point - d.center()).norm() <= d.euclidean_radius)
            .map(|a| a.mass.re * f(a.point))
            .sum(),
        MeasureSpec::Radial(p) => {
            let (c, rad) = (d.center(), d.euclidean_radius);
            q.nodes()
                .map(|(u, w)| {
                    let z = c + u * rad;
                    p.eval(z.norm_sqr()) * f(z) * w
                })
                .sum::<f64>()
                * d.area
        }
        MeasureSpec::Density(a) => {
            let (c, rad) = (d.center(), d.euclidean_radius);
            q.nodes()
                .map(|(u, w)| {
                    let z = c + u * rad;
                    a.eval(z).re * f(z) * w
                })
                .sum::<f64>()
                * d.area
        }
    }
}

/// `μ(D(v, r))`.
pub fn mu_disk(mu: &MeasureSpec, v: C64, r: f64) -> Result<f64> {
    let d = pseudo_disk(v, r)?;
    Ok(integrate_over(mu, &d, &local_rule(), |_| 1.0))
}

/// `μ̃(D(v, r)) = ∫_{D(v,r)} (1-|z|²)^{-2} dμ`.
pub fn mu_tilde_disk(mu: &MeasureSpec, v: C64, r: f64) -> Result<f64> {
    let d = pseudo_disk(v, r)?;
    Ok(integrate_over(mu, &d, &local_rule(), |z| (1.0 - z.norm_sqr()).powi(-2)))
}

/// `max_v μ(D(v, r)) / |D(v, r)|` over the given centers.
pub fn box_kernel_sup(mu: &MeasureSpec, r: f64, centers: &[C64]) -> Result<f64> {
    let vals: Vec<f64> = centers
        .par_iter()
        .map(|&v| {
            let d = pseudo_disk(v, r)?;
            Ok(integrate_over(mu, &d, &local_rule(), |_| 1.0) / d.area)
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `max_v μ̃(D(v, r))` over the given centers.
pub fn mu_tilde_sup(mu: &MeasureSpec, r: f64, centers: &[C64]) -> Result<f64> {
    let vals: Vec<f64> = centers.par_iter().map(|&v| mu_tilde_disk(mu, v, r)).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `(lower_diag, norm_trunc, upper)` for `T_μ^(k)` at order `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBounds {
    pub k: usize,
    /// Grid sup of `B_0(T_μ^(k))`, a lower bound for `‖T_μ^(k)‖`.
    pub lower_diag: f64,
    /// Largest singular value of the `N×N` truncation.
    pub norm_trunc: f64,
    /// `4(k+2) b0_sup`.
    pub upper: f64,
}

/// Grid sup of `B_0(μ)`.
pub fn b0_sup(mu: &MeasureSpec, grid: &HyperbolicGrid) -> Result<f64> {
    grid.sup(|z| berezin_measure(mu, 0, z).map(|c| c.re))
}

/// Grid sup of `B_0(T_μ^(k))`.
pub fn toeplitz_b0_sup(mu: &MeasureSpec, k: usize, grid: &HyperbolicGrid) -> Result<f64> {
    grid.sup(|z| berezin_toeplitz(mu, k, 0, z).map(|c| c.re))
}

pub fn norm_bounds(mu: &MeasureSpec, k: usize, n: usize, grid: &HyperbolicGrid) -> Result<NormBounds> {
    let b0 = b0_sup(mu, grid)?;
    norm_bounds_with(mu, k, n, grid, b0)
}

fn norm_bounds_with(mu: &MeasureSpec, k: usize, n: usize, grid: &HyperbolicGrid, b0: f64) -> Result<NormBounds> {
    if !mu.is_positive() {
        return Err(Error::usage("norm bounds are defined for positive measures"));
    }
    let req = ToeplitzRequest::new(mu.clone(), k, n);
    let t = assemble_toeplitz(&req)?;
    if let MeasureSpec::Density(_) = mu {
        let fine = assemble_toeplitz(&req.clone().with_quadrature(req.quadrature.refined()))?;
        let drift = t.sub(&fine)?.operator_norm();
        if drift > 1e-8 * t.operator_norm().max(1.0) {
            return Err(Error::precision(format!("assembly changes by {drift:e} under quadrature refinement")));
        }
    }
    Ok(NormBounds {
        k,
        lower_diag: toeplitz_b0_sup(mu, k, grid)?,
        norm_trunc: t.operator_norm(),
        upper: 4.0 * (k + 2) as f64 * b0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Carleson,
    VanishingCarlesonEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct CarlesonReport {
    pub measure: Value,
    pub b0_sup: f64,
    /// `b0_sup` on the refined grid.
    pub b0_sup_refined: f64,
    /// `(r, sup_v μ(D(v,r))/|D(v,r)|)`.
    pub box_sup: Vec<(f64, f64)>,
    /// `sup_v μ̃(D(v, 1/10))`.
    pub mu_tilde_sup: f64,
    /// Sup of `B_0(μ)` on the outermost three shells, inside out.
    pub outer_shells: [f64; 3],
    pub classification: Classification,
    pub bounds: Vec<NormBounds>,
}

impl CarlesonReport {
    pub fn to_json(&self) -> Value {
        let box_sup: serde_json::Map<String, Value> =
            self.box_sup.iter().map(|(r, v)| (format!("{r}"), json!(v))).collect();
        json!({
            "measure": self.measure,
            "b0_sup": self.b0_sup,
            "b0_sup_refined": self.b0_sup_refined,
            "box_sup": box_sup,
            "mu_tilde_sup": self.mu_tilde_sup,
            "outer_shells": self.outer_shells,
            "classification": self.classification,
            "bounds": self.bounds,
        })
    }
}

/// Options for [`carleson_classify`].
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub grid: HyperbolicGrid,
    /// Orders `k = 0..=k_max` for the norm bounds.
    pub k_max: usize,
    pub n_trunc: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { grid: HyperbolicGrid::with_rmax(0.995).expect("valid grid"), k_max: 2, n_trunc: 48 }
    }
}

/// Desk-scale Carleson diagnostics for a positive measure.
///
/// `carleson`: `b0_sup` moves by less than [`REFINEMENT_TOL`] when the grid is
/// refined. `vanishing_carleson_evidence`: in addition, `B_0(μ)` decreases
/// over the outermost three shells and the outermost shell is below
/// `1/VANISHING_DECAY` of the global sup.
pub fn carleson_classify(mu: &MeasureSpec, opts: &ClassifyOptions) -> Result<CarlesonReport> {
    if !mu.is_positive() {
        return Err(Error::usage("classification is defined for positive measures"));
    }
    mu.validate()?;
    let grid = &opts.grid;
    let b0 = |z: C64| berezin_measure(mu, 0, z).map(|c| c.re);
    let shells = grid.shell_sups(b0)?;
    let origin = b0(C64::new(0.0, 0.0))?.abs();
    let sup = shells.iter().copied().fold(origin, f64::max);
    let sup_refined = b0_sup(mu, &grid.refined())?;
    let centers = grid.points();
    let box_sup = BOX_RADII
        .iter()
        .map(|&r| Ok((r, box_kernel_sup(mu, r, &centers)?)))
        .collect::<Result<Vec<_>>>()?;
    let mu_tilde = mu_tilde_sup(mu, 0.1, &centers)?;
    let s = shells.len();
    let outer = [shells[s - 3], shells[s - 2], shells[s - 1]];

    let converged = sup.is_finite() && (sup_refined - sup).abs() <= REFINEMENT_TOL * sup.max(f64::MIN_POSITIVE);
    let decaying = outer[0] >= outer[1] && outer[1] >= outer[2] && VANISHING_DECAY * outer[2] <= sup;
    let classification = match (converged, decaying) {
        (false, _) => Classification::Inconclusive,
        (true, true) => Classification::VanishingCarlesonEvidence,
        (true, false) => Classification::Carleson,
    };
    let bounds = (0..=opts.k_max)
        .map(|k| norm_bounds_with(mu, k, opts.n_trunc, grid, sup))
        .collect::<Result<Vec<_>>>()?;
    Ok(CarlesonReport {
        measure: mu.descriptor(),
        b0_sup: sup,
        b0_sup_refined: sup_refined,
        box_sup,
        mu_tilde_sup: mu_tilde,
        outer_shells: outer,
        classification,
        bounds,
    })
}

/// Result of the annulus-constant computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusCheck {
    /// `min_k (k+2) min{f(a_k), f(b_k)}`, `f(x) = (k+1) x^k (1-x)²`.
    pub c1_estimate: f64,
    /// Both annulus inclusions hold at `r = 1/10` for every `k ≤ k_max`.
    pub r_check: bool,
    /// `min_k (k+1)/(k+2) (1 - 5/(2(k+2)))^k`, the analytic lower bound.
    pub proof_bound: f64,
}

/// `(k+1) x^k (1-x)²`.
pub fn annulus_profile(k: usize, x: f64) -> f64 {
    (k + 1) as f64 * x.powi(k as i32) * (1.0 - x).powi(2)
}

/// Smallest admissible inclusion radius for order `k`: `D(z_k, r)`,
/// `z_k = sqrt(k/(k+2))`, lies in `(k-1/2)/(k+2) ≤ |z|² ≤ (k+1)/(k+2)` iff `r`
/// is at most this value.
pub fn annulus_radius_limit(k: usize) -> f64 {
    let kf = k as f64;
    let zk = (kf / (kf + 2.0)).sqrt();
    let lo = ((kf - 0.5) / (kf + 2.0)).sqrt();
    let hi = ((kf + 1.0) / (kf + 2.0)).sqrt();
    let r_lo = (zk - lo) / (1.0 - zk * lo);
    let r_hi = (hi - zk) / (1.0 - zk * hi);
    r_lo.min(r_hi).min(zk)
}

pub fn annulus_constant_check(k_max: usize) -> Result<AnnulusCheck> {
    if k_max < 1 {
        return Err(Error::usage("annulus check needs k_max ≥ 1"));
    }
    let r = 0.1;
    let mut c1 = f64::INFINITY;
    let mut proof = f64::INFINITY;
    let mut ok = true;
    for k in 1..=k_max {
        let kf = k as f64;
        let a = (kf - 0.5) / (kf + 2.0);
        let b = (kf + 1.0) / (kf + 2.0);
        c1 = c1.min((kf + 2.0) * annulus_profile(k, a).min(annulus_profile(k, b)));
        proof = proof.min((kf + 1.0) / (kf + 2.0) * (1.0 - 2.5 / (kf + 2.0)).powi(k as i32));
        let zk = (kf / (kf + 2.0)).sqrt();
        let inner = (zk - r) / (1.0 - r * zk);
        let outer = (zk + r) / (1.0 + r * zk);
        ok &= r <= zk && a.sqrt() <= inner && outer <= b.sqrt();
    }
    Ok(AnnulusCheck { c1_estimate: c1, r_check: ok, proof_bound: proof })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_disk_examples() {
        let d = pseudo_disk(C64::new(0.0, 0.0), 0.3).unwrap();
        assert_eq!(d.euclidean_center, [0.0, 0.0]);
        assert!((d.euclidean_radius - 0.3).abs() < 1e-15);
        assert!((d.area - 0.09).abs() < 1e-15);
        let d = pseudo_disk(C64::new(0.5, 0.0), 0.1).unwrap();
        assert!((d.area - (0.075f64 / 0.9975).powi(2)).abs() < 1e-15);
        assert!(pseudo_disk(C64::new(0.5, 0.0), 1.0).is_err());
    }

    #[test]
    fn annulus_k1_endpoint_minimum() {
        // f(x) = 2x(1-x)² on [1/6, 2/3]: f(1/6) = 25/108, f(2/3) = 4/27
        let c = annulus_constant_check(1).unwrap();
        assert!((c.c1_estimate - 3.0 * 4.0 / 27.0).abs() < 1e-15);
        assert!(c.r_check);
    }

    #[test]
    fn radius_limit_exceeds_one_tenth() {
        for k in 1..200 {
            assert!(annulus_radius_limit(k) > 0.1, "k={k}");
        }
    }
}
