//! Assembly of the generalized Toeplitz operators
//! `T_μ^(k) = ∫ U_z E_k U_z dμ̃(z)`, `dμ̃ = (1-|z|²)^{-2} dμ`.
//!
//! Entry `(p, q)` is `∫ g_p(z) conj(g_q(z)) dμ̃(z)` with `g_p = ⟨U_z e_k, e_p⟩`.
//! Both kernel factors carry `(1-|z|²)`, which is divided out of the columns
//! before integration (see [`weighted_columns`]), so no node ever sees the
//! bare weight `(1-|z|²)^{-2}`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bergman::{weighted_columns, weighted_columns_radial};
use crate::error::{Error, Result};
use crate::measure::{Density, MeasureSpec, RadialProfile};
use crate::operator::TruncatedOperator;
use crate::quadrature::DiskQuadrature;
use crate::C64;

#[derive(Debug, Clone)]
pub struct ToeplitzRequest {
    pub mu: MeasureSpec,
    pub k: usize,
    pub n: usize,
    pub quadrature: DiskQuadrature,
}

impl ToeplitzRequest {
    pub fn new(mu: MeasureSpec, k: usize, n: usize) -> Self {
        Self { mu, k, n, quadrature: DiskQuadrature::assembly_default() }
    }

    pub fn with_quadrature(mut self, q: DiskQuadrature) -> Self {
        self.quadrature = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < self.k + 2 {
            return Err(Error::usage(format!(
                "truncation order N = {} must be at least k + 2 = {}",
                self.n,
                self.k + 2
            )));
        }
        self.mu.validate()
    }
}

/// The `N×N` matrix of `T_μ^(k)`.
pub fn assemble_toeplitz(req: &ToeplitzRequest) -> Result<TruncatedOperator> {
    req.validate()?;
    match &req.mu {
        MeasureSpec::Atomic(atoms) => {
            let (k, n) = (req.k, req.n);
            let mut m = DMatrix::<C64>::zeros(n, n);
            for a in atoms {
                let cols = weighted_columns(a.point, k, n);
                let h = &cols[k];
                for q in 0..n {
                    let hq = h[q].conj() * a.mass;
                    for p in 0..n {
                        m[(p, q)] += h[p] * hq;
                    }
                }
            }
            TruncatedOperator::from_matrix(m)
        }
        MeasureSpec::Radial(profile) => Ok(assemble_radial(profile, req)),
        MeasureSpec::Density(a) => assemble_density(a, req),
    }
}

/// Shorthand for the Toeplitz operator `T_a^(k)` of a density symbol with the
/// default assembly rule.
pub fn toeplitz(mu: &MeasureSpec, k: usize, n: usize) -> Result<TruncatedOperator> {
    assemble_toeplitz(&ToeplitzRequest::new(mu.clone(), k, n))
}

fn assemble_radial(profile: &RadialProfile, req: &ToeplitzRequest) -> TruncatedOperator {
    let (k, n) = (req.k, req.n);
    // H_pk(sqrt x)² is a polynomial of degree ≤ (p + k) in x
    let nodes = req.quadrature.radial_order().max((n + k) / 2 + 2);
    let rule = profile.x_rule(nodes);
    let partial: Vec<Vec<f64>> = rule
        .par_iter()
        .map(|&(x, w)| {
            let rho = profile.eval(x);
            if rho == 0.0 {
                return vec![0.0; n];
            }
            let cols = weighted_columns_radial(x.sqrt(), k, n);
            cols[k].iter().map(|h| h * h * rho * w).collect()
        })
        .collect();
    let mut diag = vec![0.0; n];
    for row in &partial {
        for (d, v) in diag.iter_mut().zip(row) {
            *d += v;
        }
    }
    let diag: Vec<C64> = diag.into_iter().map(|d| C64::new(d, 0.0)).collect();
    TruncatedOperator::from_diagonal(&diag)
}

fn assemble_density(a: &Density, req: &ToeplitzRequest) -> Result<TruncatedOperator> {
    let (k, n) = (req.k, req.n);
    let q = &req.quadrature;
    let l = q.angular_order();
    let angles = q.angles();
    // e^{i m θ_l} for m = 0..n-1
    let twiddle: Vec<Vec<C64>> = (0..n)
        .map(|m| angles.iter().map(|&t| C64::from_polar(1.0, m as f64 * t)).collect())
        .collect();
    let partial: Vec<Result<DMatrix<C64>>> = q
        .radial()
        .par_iter()
        .map(|&(x, w)| {
            let r = x.sqrt();
            let mut samples = Vec::with_capacity(l);
            for &t in angles {
                let z = C64::from_polar(r, t);
                let v = a.eval(z);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Evaluation(format!("symbol is not finite at node {z}")));
                }
                samples.push(v);
            }
            // â_m = (1/L) Σ a(r e^{iθ}) e^{i m θ}, m = q - p in -(n-1)..n-1
            let mut pos = vec![C64::new(0.0, 0.0); n];
            let mut neg = vec![C64::new(0.0, 0.0); n];
            for m in 0..n {
                let (mut sp, mut sn) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for (s, tw) in samples.iter().zip(&twiddle[m]) {
                    sp += s * tw;
                    sn += s * tw.conj();
                }
                pos[m] = sp / l as f64;
                neg[m] = sn / l as f64;
            }
            let cols = weighted_columns_radial(r, k, n);
            let h = &cols[k];
            Ok(DMatrix::from_fn(n, n, |p, qq| {
                let ahat = if qq >= p { pos[qq - p] } else { neg[p - qq] };
                ahat * (h[p] * h[qq] * w)
            }))
        })
        .collect();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for part in partial {
        m += part?;
    }
    TruncatedOperator::from_matrix(m)
}

/// Rotation-free reference assembly over every quadrature node, used as an
/// independent cross-check of the angular-transform path.
pub fn assemble_density_direct(a: &Density, k: usize, n: usize, q: &DiskQuadrature) -> Result<TruncatedOperator> {
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (z, w) in q.nodes() {
        let av = a.eval(z);
        let cols = weighted_columns(z, k, n);
        let h = &cols[k];
        for qq in 0..n {
            let hq = h[qq].conj() * av * w;
            for p in 0..n {
                m[(p, qq)] += h[p] * hq;
            }
        }
    }
    TruncatedOperator::from_matrix(m)
}

/// `(‖T_a^(k)‖, sup |a|)` for a bounded symbol.
pub fn englis_bound_check(a: &MeasureSpec, k: usize, n: usize) -> Result<(f64, f64)> {
    let bound = match a {
        MeasureSpec::Density(d) => d.sup_bound(),
        MeasureSpec::Radial(p) => p
            .sup_bound()
            .ok_or_else(|| Error::usage(format!("symbol {} is unbounded", p.descriptor())))?,
        MeasureSpec::Atomic(_) => return Err(Error::usage("atomic measures have no bounded symbol")),
    };
    let t = toeplitz(a, k, n)?;
    Ok((t.operator_norm(), bound))
}

/// Truncated norms at `N` and `2N`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NormReport {
    pub n: usize,
    pub norm_n: f64,
    pub norm_2n: f64,
}

pub fn norm_report(req: &ToeplitzRequest) -> Result<NormReport> {
    let t = assemble_toeplitz(req)?;
    let mut doubled = req.clone();
    doubled.n *= 2;
    let t2 = assemble_toeplitz(&doubled)?;
    Ok(NormReport { n: req.n, norm_n: t.operator_norm(), norm_2n: t2.operator_norm() })
}

/// JSON envelope `{N, k, measure, entries}` with entries as `[re, im]` rows.
pub fn to_json_envelope(op: &TruncatedOperator, k: usize, mu: &MeasureSpec) -> Value {
    json!({
        "N": op.dim(),
        "k": k,
        "measure": mu.descriptor(),
        "entries": op.to_rows(),
    })
}

/// `c_k = ∫ |⟨e_k, U_z e_k⟩|² dA` evaluated by quadrature.
pub fn diagonal_kernel_mass(k: usize, q: &DiskQuadrature) -> f64 {
    // |⟨U_z e_k, e_k⟩| depends on |z| only
    q.radial()
        .iter()
        .map(|&(x, w)| {
            let h = weighted_columns_radial(x.sqrt(), k, k + 1)[k][k] * (1.0 - x);
            h * h * w
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::BiPolynomial;

    #[test]
    fn lebesgue_gives_identity() {
        for k in 0..4 {
            let t = toeplitz(&MeasureSpec::lebesgue(), k, 24).unwrap();
            let d = t.sub(&TruncatedOperator::identity(24)).unwrap();
            assert!(d.operator_norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn abs_sq_density_is_beta_diagonal() {
        let t = toeplitz(&MeasureSpec::poly(BiPolynomial::abs_sq()), 0, 20).unwrap();
        for p in 0..20 {
            for q in 0..20 {
                let want = if p == q { (p + 1) as f64 / (p + 2) as f64 } else { 0.0 };
                assert!((t.entry(p, q) - C64::new(want, 0.0)).norm() < 1e-12, "({p},{q})");
            }
        }
    }

    #[test]
    fn angular_path_matches_direct_nodes() {
        let a = Density::Poly(BiPolynomial::from_terms(&[
            (1, 0, C64::new(0.4, 0.1)),
            (0, 2, C64::new(-0.3, 0.0)),
            (2, 1, C64::new(0.0, 0.7)),
        ]));
        let q = DiskQuadrature::new(40, 32).unwrap();
        let req = ToeplitzRequest::new(MeasureSpec::Density(a.clone()), 2, 10).with_quadrature(q.clone());
        let fast = assemble_toeplitz(&req).unwrap();
        let direct = assemble_density_direct(&a, 2, 10, &q).unwrap();
        assert!(fast.sub(&direct).unwrap().max_abs_entry() < 1e-12);
    }

    #[test]
    fn small_truncation_is_rejected() {
        let req = ToeplitzRequest::new(MeasureSpec::lebesgue(), 5, 6);
        assert!(matches!(assemble_toeplitz(&req), Err(Error::Usage(_))));
    }
}
