//! Exact polynomial symbols in `z` and `z̄`, and the invariant Laplacian
//! `Δ̃ = (1-|z|²)² ∂∂̄` acting on them.

use std::f64::consts::PI;

use serde_json::{json, Value};

use crate::operator::TruncatedOperator;
use crate::C64;

/// `p(z) = Σ c_{ab} z^a z̄^b` with `a, b ≤ degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPolynomial {
    degree: usize,
    coeffs: Vec<C64>,
}

impl BiPolynomial {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: vec![C64::new(0.0, 0.0); (degree + 1) * (degree + 1)] }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_terms(&[(0, 0, c)])
    }

    pub fn from_terms(terms: &[(usize, usize, C64)]) -> Self {
        let degree = terms.iter().map(|&(a, b, _)| a.max(b)).max().unwrap_or(0);
        let mut p = Self::zero(degree);
        for &(a, b, c) in terms {
            *p.coeff_mut(a, b) += c;
        }
        p
    }

    /// `Re z = (z + z̄)/2`.
    pub fn re_z() -> Self {
        Self::from_terms(&[(1, 0, C64::new(0.5, 0.0)), (0, 1, C64::new(0.5, 0.0))])
    }

    /// `Im z² = (z² - z̄²)/(2i)`.
    pub fn im_z2() -> Self {
        Self::from_terms(&[(2, 0, C64::new(0.0, -0.5)), (0, 2, C64::new(0.0, 0.5))])
    }

    /// `|z|² = z z̄`.
    pub fn abs_sq() -> Self {
        Self::from_terms(&[(1, 1, C64::new(1.0, 0.0))])
    }

    /// `(1 - |z|²)^m`.
    pub fn one_minus_abs_sq_pow(m: usize) -> Self {
        let mut p = Self::zero(m);
        let mut binom = 1.0;
        for i in 0..=m {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *p.coeff_mut(i, i) = C64::new(sign * binom, 0.0);
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, a: usize, b: usize) -> C64 {
        if a > self.degree || b > self.degree {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[a * (self.degree + 1) + b]
        }
    }

    fn coeff_mut(&mut self, a: usize, b: usize) -> &mut C64 {
        let d = self.degree + 1;
        &mut self.coeffs[a * d + b]
    }

    /// Iterator over nonzero terms `(a, b, c_ab)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let d = self.degree + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(move |(i, &c)| (i / d, i % d, c))
    }

    pub fn eval(&self, z: C64) -> C64 {
        // Horner in z over rows, each row a polynomial in z̄
        let zb = z.conj();
        let d = self.degree + 1;
        let mut acc = C64::new(0.0, 0.0);
        for a in (0..d).rev() {
            let row = &self.coeffs[a * d..(a + 1) * d];
            let r = row.iter().rev().fold(C64::new(0.0, 0.0), |s, &c| s * zb + c);
            acc = acc * z + r;
        }
        acc
    }

    fn with_degree(&self, degree: usize) -> Self {
        let mut p = Self::zero(degree.max(self.degree));
        for (a, b, c) in self.terms() {
            *p.coeff_mut(a, b) = c;
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.with_degree(other.degree);
        for (a, b, c) in other.terms() {
            *p.coeff_mut(a, b) += c;
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.degree + other.degree);
        for (a, b, c) in self.terms() {
            for (a2, b2, c2) in other.terms() {
                *p.coeff_mut(a + a2, b + b2) += c * c2;
            }
        }
        p
    }

    /// Complex conjugate function: `c_{ab} ↦ conj(c_{ba})`.
    pub fn conj(&self) -> Self {
        let mut p = Self::zero(self.degree);
        for (a, b, c) in self.terms() {
            *p.coeff_mut(b, a) = c.conj();
        }
        p
    }

    pub fn is_real_valued(&self) -> bool {
        self.terms().all(|(a, b, c)| (self.coeff(b, a) - c.conj()).norm() <= 1e-15 * c.norm().max(1.0))
    }

    /// Whether only `|z|^{2a}` terms occur.
    pub fn is_radial(&self) -> bool {
        self.terms().all(|(a, b, _)| a == b)
    }

    /// Coefficients in `x = |z|²` of the diagonal part.
    pub fn radial_coeffs(&self) -> Vec<C64> {
        (0..=self.degree).map(|a| self.coeff(a, a)).collect()
    }

    /// `∂∂̄ p` (a quarter of the Euclidean Laplacian).
    pub fn laplacian(&self) -> Self {
        let mut p = Self::zero(self.degree.saturating_sub(1));
        for (a, b, c) in self.terms() {
            if a > 0 && b > 0 {
                *p.coeff_mut(a - 1, b - 1) += c * (a * b) as f64;
            }
        }
        p
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sampled `sup |p|` over the closed unit disk.
    pub fn sup_on_closed_disk(&self) -> f64 {
        let (nr, nt) = (129, 512);
        let mut best: f64 = 0.0;
        for i in 0..nr {
            let r = i as f64 / (nr - 1) as f64;
            for l in 0..nt {
                let z = C64::from_polar(r, 2.0 * PI * l as f64 / nt as f64);
                best = best.max(self.eval(z).norm());
            }
        }
        best
    }

    pub fn terms_descriptor(&self) -> Value {
        Value::Array(self.terms().map(|(a, b, c)| json!([a, b, c.re, c.im])).collect())
    }
}

/// `Δ̃ p = (1 - |z|²)² ∂∂̄ p`, exact on coefficients.
pub fn delta_tilde_fn(p: &BiPolynomial) -> BiPolynomial {
    BiPolynomial::one_minus_abs_sq_pow(2).mul(&p.laplacian())
}

/// `B_0(S)(z) = (1-|z|²)² Σ S_pq sqrt((p+1)(q+1)) z^p z̄^q` for the finite-rank
/// operator `S = Σ S_pq e_p ⊗ e_q`.
pub fn berezin0_poly(s: &TruncatedOperator) -> BiPolynomial {
    let n = s.support();
    let mut core = BiPolynomial::zero(n.saturating_sub(1));
    for p in 0..n {
        for q in 0..n {
            let c = s.entry(p, q);
            if c.norm_sqr() > 0.0 {
                *core.coeff_mut(p, q) += c * (((p + 1) * (q + 1)) as f64).sqrt();
            }
        }
    }
    BiPolynomial::one_minus_abs_sq_pow(2).mul(&core)
}

/// `B_n(S)` for finite-rank `S` via `B_m = (1 - Δ̃/(m(m+1))) B_{m-1}`.
pub fn berezin_poly(s: &TruncatedOperator, n: usize) -> BiPolynomial {
    let mut b = berezin0_poly(s);
    for m in 1..=n {
        let d = delta_tilde_fn(&b);
        b = b.sub(&d.scale(C64::new(1.0 / (m * (m + 1)) as f64, 0.0)));
    }
    b
}

/// Radial polynomial in `y = 1 - |z|²`: `Σ c_m y^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPoly {
    coeffs: Vec<f64>,
}

impl RadialPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `B_0(E_k)(u) = (k+1) |u|^{2k} (1-|u|²)²` written in `y`.
    pub fn berezin0_projection(k: usize) -> Self {
        let mut c = vec![0.0; k + 3];
        let mut binom = 1.0;
        for i in 0..=k {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            c[i + 2] = (k + 1) as f64 * sign * binom;
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        Self { coeffs: c }
    }

    /// `B_n(E_k)` by the recurrence in `y`, using `Δ̃ y^m = m(m-1) y^m - m² y^{m+1}`.
    pub fn berezin_projection(k: usize, n: usize) -> Self {
        let mut p = Self::berezin0_projection(k);
        for m in 1..=n {
            let d = p.delta_tilde();
            let s = 1.0 / (m * (m + 1)) as f64;
            let len = d.coeffs.len();
            p.coeffs.resize(len, 0.0);
            for (c, dc) in p.coeffs.iter_mut().zip(&d.coeffs) {
                *c -= s * dc;
            }
        }
        p
    }

    pub fn delta_tilde(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (m, &c) in self.coeffs.iter().enumerate() {
            let mf = m as f64;
            out[m] += mf * (mf - 1.0) * c;
            out[m + 1] -= mf * mf * c;
        }
        Self { coeffs: out }
    }

    pub fn eval_y(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }

    pub fn eval(&self, z: C64) -> f64 {
        self.eval_y(1.0 - z.norm_sqr())
    }

    /// Expansion as a [`BiPolynomial`].
    pub fn to_bipoly(&self) -> BiPolynomial {
        self.coeffs.iter().enumerate().fold(BiPolynomial::zero(0), |acc, (m, &c)| {
            acc.add(&BiPolynomial::one_minus_abs_sq_pow(m).scale(C64::new(c, 0.0)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn delta_tilde_examples() {
        let z = BiPolynomial::from_terms(&[(1, 0, c(1.0))]);
        assert_eq!(delta_tilde_fn(&z).max_abs_coeff(), 0.0);
        let d = delta_tilde_fn(&BiPolynomial::abs_sq());
        assert!(d.sub(&BiPolynomial::one_minus_abs_sq_pow(2)).max_abs_coeff() < 1e-15);
        let d = delta_tilde_fn(&BiPolynomial::from_terms(&[(1, 2, c(1.0))]));
        let want = BiPolynomial::one_minus_abs_sq_pow(2).mul(&BiPolynomial::from_terms(&[(0, 1, c(2.0))]));
        assert!(d.sub(&want).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn conjugation_swaps_indices() {
        let p = BiPolynomial::from_terms(&[(2, 1, C64::new(1.0, 2.0)), (0, 3, C64::new(-0.5, 0.0))]);
        let q = p.conj();
        assert_eq!(q.coeff(1, 2), C64::new(1.0, -2.0));
        let z = C64::new(0.3, -0.4);
        assert!((q.eval(z) - p.eval(z).conj()).norm() < 1e-15);
        assert!(BiPolynomial::re_z().is_real_valued());
        assert!(BiPolynomial::im_z2().is_real_valued());
        assert!(!p.is_real_valued());
    }

    #[test]
    fn berezin_projection_matches_bipoly_route() {
        for k in 0..4 {
            for n in 0..4 {
                let radial = RadialPoly::berezin_projection(k, n).to_bipoly();
                let direct = berezin_poly(&TruncatedOperator::projection(k, k + 2), n);
                assert!(radial.sub(&direct).max_abs_coeff() < 1e-10, "k={k} n={n}");
            }
        }
        // B_n(E_0) = (n+1)(1-|z|²)^{n+2}
        for n in 0..6 {
            let p = RadialPoly::berezin_projection(0, n);
            for (m, &cm) in p.coeffs().iter().enumerate() {
                let want = if m == n + 2 { (n + 1) as f64 } else { 0.0 };
                assert!((cm - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eval_matches_terms() {
        let p = BiPolynomial::from_terms(&[(0, 0, c(1.0)), (3, 1, C64::new(0.0, 2.0)), (1, 4, c(-1.5))]);
        let z = C64::new(0.6, 0.2);
        let direct = c(1.0) + C64::new(0.0, 2.0) * z.powu(3) * z.conj() - 1.5 * z * z.conj().powu(4);
        assert!((p.eval(z) - direct).norm() < 1e-15);
        assert!((BiPolynomial::re_z().sup_on_closed_disk() - 1.0).abs() < 1e-12);
    }
}
