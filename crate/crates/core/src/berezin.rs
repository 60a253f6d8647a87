//! n-Berezin transforms and the invariant Laplacian on operators.
//!
//! `B_n(Q)(z) = (n+1) Σ_j C(n,j) (-1)^j/(j+1) ⟨Q U_z e_j, U_z e_j⟩`.
//!
//! Transforms of measures are written as invariant kernel integrals
//! `∫ P(1 - |φ_w(ζ)|²) dμ̃(ζ)` with `P` a polynomial in `y` divisible by `y²`.
//! The `y²` factor absorbs the weight `(1-|ζ|²)^{-2}` through
//! `1 - |φ_w(ζ)|² = (1-|w|²)(1-|ζ|²) / |1 - conj(w) ζ|²`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::bergman::{u_transform_tail, weighted_columns, weighted_columns_radial, CoeffVector, MobiusMap};
use crate::bipoly::{berezin0_poly, berezin_poly, RadialPoly};
use crate::error::{Error, Result};
use crate::measure::{Density, MeasureSpec, RadialProfile};
use crate::operator::TruncatedOperator;
use crate::quadrature::{graded_rule, DiskQuadrature};
use crate::toeplitz::{assemble_toeplitz, ToeplitzRequest};
use crate::C64;

/// Largest admissible estimate of the truncation error in [`berezin_op`].
pub const BEREZIN_TAIL_TOL: f64 = 1e-9;

const GRADED_PER_PANEL: usize = 16;
const GRADED_DEPTH: usize = 40;

pub fn binomial(n: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weights `(n+1) C(n,j) (-1)^j / (j+1)`, `j = 0..=n`.
pub fn berezin_weights(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            (n + 1) as f64 * binomial(n, j) * sign / (j + 1) as f64
        })
        .collect()
}

/// `B_n(Q)(z)` for a truncated operator.
///
/// An operator whose support stays below its order is finite rank and the
/// value is exact. Otherwise the truncation of `U_z e_j` matters, and a
/// precision error is returned when its estimated effect exceeds
/// [`BEREZIN_TAIL_TOL`].
pub fn berezin_op(q: &TruncatedOperator, n: usize, z: C64) -> Result<C64> {
    let dim = q.dim();
    if 2 * n >= dim {
        return Err(Error::precision(format!("transform order n = {n} needs N > {}, got N = {dim}", 2 * n)));
    }
    MobiusMap::new(z)?;
    let s = 1.0 - z.norm_sqr();
    if q.support() >= dim {
        let frob = q.matrix().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut est = 0.0;
        for (j, w) in berezin_weights(n).iter().enumerate() {
            let t = u_transform_tail(z, &CoeffVector::basis(j, dim), 32 * dim);
            est += w.abs() * frob * (2.0 * t + t * t);
        }
        if !(est <= BEREZIN_TAIL_TOL) {
            return Err(Error::precision(format!(
                "U_z e_j leaks past N = {dim} at |z| = {:.6} (error estimate {est:.3e})",
                z.norm()
            )));
        }
    }
    let cols = weighted_columns(z, n, dim);
    let m = q.matrix();
    let mut total = C64::new(0.0, 0.0);
    for (col, w) in cols.iter().zip(berezin_weights(n)) {
        let u = nalgebra::DVector::from_iterator(dim, col.iter().map(|c| c * s));
        let qu = m * &u;
        total += u.dotc(&qu) * w;
    }
    Ok(total)
}

/// `B_n(E_k)(u) / (1 - |u|²)²` as a function of `r = |u|`, by the stable
/// alternating sum over `|⟨U_u e_j, e_k⟩|²`.
pub fn projection_kernel(k: usize, n: usize, r: f64) -> f64 {
    let cols = weighted_columns_radial(r, n, k + 1);
    berezin_weights(n)
        .iter()
        .zip(&cols)
        .map(|(w, col)| w * col[k] * col[k])
        .sum()
}

/// Diagonal of `T_{B_n(E_k)}` (the operator is diagonal), entries `0..len`,
/// in exact integer arithmetic.
///
/// The `y`-coefficients of `B_n(E_k)` alternate and grow like `C(k, k/2)`,
/// so any floating evaluation of the symbol loses everything for large `k`
/// or `n`. Entry `p` is `(p+1) Σ_m c_m ∫ x^p (1-x)^m dx` with
/// `∫ x^p (1-x)^m dx = m! p! / (p+m+1)!`.
pub fn berezin_projection_toeplitz_diag(k: usize, n: usize, len: usize) -> Vec<f64> {
    let int = |v: usize| BigInt::from(v);
    // c · n!(n+1)! stays integral through the recurrence
    let mut c: Vec<BigInt> = vec![BigInt::from(0); k + 3];
    let mut binom = BigInt::from(1);
    for i in 0..=k {
        let v = &binom * int(k + 1);
        c[i + 2] = if i % 2 == 0 { v } else { -v };
        binom = binom * int(k - i) / int(i + 1);
    }
    let mut scale = BigInt::from(1);
    for m in 1..=n {
        let f = int(m * (m + 1));
        let mut next: Vec<BigInt> = c.iter().map(|v| v * &f).collect();
        next.push(BigInt::from(0));
        for (j, v) in c.iter().enumerate() {
            next[j] -= v * int(j * j.saturating_sub(1));
            next[j + 1] += v * int(j * j);
        }
        c = next;
        scale *= f;
    }
    let top = c.len() - 1;
    let mut fact = BigInt::from(1);
    let weighted: Vec<BigInt> = c
        .iter()
        .enumerate()
        .map(|(m, v)| {
            if m > 0 {
                fact *= int(m);
            }
            v * &fact
        })
        .collect();
    (0..len)
        .into_par_iter()
        .map(|p| {
            // Σ_m c_m m! Π_{i=m+2}^{top+1} (p+i) over Π_{i=1}^{top+1} (p+i)
            let mut num = BigInt::from(0);
            let mut prod = BigInt::from(1);
            for m in (0..=top).rev() {
                num += &weighted[m] * &prod;
                prod *= int(p + m + 1);
            }
            let den = prod * &scale;
            BigRational::new(num * int(p + 1), den).to_f64().unwrap_or(f64::NAN)
        })
        .collect()
}

/// `∫ P(1 - |φ_w(ζ)|²) dμ̃(ζ)` for `P = Σ c_m y^m` with `c_0 = c_1 = 0`.
pub fn invariant_transform(mu: &MeasureSpec, p: &RadialPoly, w: C64) -> Result<C64> {
    MobiusMap::new(w)?;
    if p.coeffs().iter().take(2).any(|&c| c != 0.0) {
        return Err(Error::usage("invariant kernel must be divisible by y²"));
    }
    let sw = 1.0 - w.norm_sqr();
    match mu {
        MeasureSpec::Atomic(atoms) => {
            let mut total = C64::new(0.0, 0.0);
            for a in atoms {
                let sv = 1.0 - a.point.norm_sqr();
                let den = (C64::new(1.0, 0.0) - w.conj() * a.point).norm_sqr();
                let y = sw * sv / den;
                let tail = RadialPoly::new(p.coeffs()[2..].to_vec()).eval_y(y);
                // P(y) / (1-|v|²)² = tail(y) (1-|w|²)² / |1 - conj(w) v|⁴
                total += a.mass * (tail * sw * sw / (den * den));
            }
            Ok(total)
        }
        MeasureSpec::Radial(profile) => Ok(C64::new(radial_transform(profile, p, w.norm_sqr()), 0.0)),
        MeasureSpec::Density(a) => {
            let q = DiskQuadrature::field_default();
            let weight = RadialPoly::new(p.coeffs()[2..].to_vec());
            let map = MobiusMap::new(w)?;
            let mut total = C64::new(0.0, 0.0);
            for (u, wt) in q.nodes() {
                let z = map.eval(u)?;
                total += a.eval(z) * weight.eval_y(1.0 - u.norm_sqr()) * wt;
            }
            Ok(total)
        }
    }
}

/// Radial measures: the angular integral is done in closed form,
/// `(1/2π) ∫ |1 - a e^{iθ}|^{-2m} dθ = (1-s)^{1-2m} Σ_{j<m} C(m-1,j)² s^j`, `s = |a|²`.
fn radial_transform(profile: &RadialProfile, p: &RadialPoly, w2: f64) -> f64 {
    let ln_sw = (1.0 - w2).ln();
    let mut cuts = profile.breakpoints();
    if w2 > 0.0 {
        cuts.push(w2);
    }
    let rule = graded_rule(GRADED_PER_PANEL, GRADED_DEPTH, &cuts);
    let terms: Vec<(usize, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(m, &c)| (m, c))
        .collect();
    let mut total = 0.0;
    for (x, wx) in rule {
        let rho = profile.eval(x);
        if rho == 0.0 {
            continue;
        }
        let s = w2 * x;
        let ln_1mx = (1.0 - x).ln();
        let ln_1ms = (-s).ln_1p();
        let mut v = 0.0;
        for &(m, c) in &terms {
            let mut poly = 0.0;
            let mut coef = 1.0;
            let mut sp = 1.0;
            for j in 0..m {
                poly += coef * coef * sp;
                coef = coef * (m - 1 - j) as f64 / (j + 1) as f64;
                sp *= s;
            }
            let mf = m as f64;
            let ln_amp = mf * ln_sw + (mf - 2.0) * ln_1mx + (1.0 - 2.0 * mf) * ln_1ms;
            let amp = if m == 2 && x == 1.0 { (2.0 * ln_sw - 3.0 * ln_1ms).exp() } else { ln_amp.exp() };
            v += c * amp * poly;
        }
        total += v * rho * wx;
    }
    total
}

/// `B_n(μ)(z)`.
pub fn berezin_measure(mu: &MeasureSpec, n: usize, z: C64) -> Result<C64> {
    let mut c = vec![0.0; n + 3];
    c[n + 2] = (n + 1) as f64;
    invariant_transform(mu, &RadialPoly::new(c), z)
}

/// `B_n(a)(z) = ∫ a(φ_z(ζ)) (n+1)(1-|ζ|²)^n dA(ζ)` for a bounded symbol.
pub fn berezin_symbol(a: &MeasureSpec, n: usize, z: C64) -> Result<C64> {
    match a {
        MeasureSpec::Atomic(_) => Err(Error::usage("berezin_symbol needs a density or radial symbol")),
        _ => berezin_measure(a, n, z),
    }
}

/// `∫ f(φ_z(u)) (n+1)(1-|u|²)^n dA(u)` for an arbitrary bounded function.
pub fn berezin_of_fn(f: &(dyn Fn(C64) -> C64 + Sync), n: usize, z: C64, q: &DiskQuadrature) -> Result<C64> {
    let map = MobiusMap::new(z)?;
    let mut total = C64::new(0.0, 0.0);
    for (u, wt) in q.nodes() {
        let v = f(map.eval(u)?);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Evaluation(format!("symbol is not finite at φ_z({u})")));
        }
        total += v * (n + 1) as f64 * (1.0 - u.norm_sqr()).powi(n as i32) * wt;
    }
    Ok(total)
}

/// `B_n(T_μ^(k))(w) = ∫ B_n(E_k)(φ_w(ζ)) dμ̃(ζ)`.
pub fn berezin_toeplitz(mu: &MeasureSpec, k: usize, n: usize, w: C64) -> Result<C64> {
    match mu {
        MeasureSpec::Atomic(atoms) => {
            MobiusMap::new(w)?;
            let sw = 1.0 - w.norm_sqr();
            let mut total = C64::new(0.0, 0.0);
            for a in atoms {
                let den = (C64::new(1.0, 0.0) - w.conj() * a.point).norm_sqr();
                let rho = ((a.point - w).norm_sqr() / den).sqrt();
                total += a.mass * (projection_kernel(k, n, rho.min(1.0)) * sw * sw / (den * den));
            }
            Ok(total)
        }
        _ => invariant_transform(mu, &RadialPoly::berezin_projection(k, n), w),
    }
}

/// `B_n(T_μ^(k))` as a density symbol.
pub fn berezin_toeplitz_density(mu: &MeasureSpec, k: usize, n: usize) -> Density {
    let m = mu.clone();
    let name = format!("B_{n}(T^({k}) {})", mu.descriptor());
    Density::custom(name, f64::INFINITY, mu.is_positive(), move |w| {
        berezin_toeplitz(&m, k, n, w).unwrap_or(C64::new(f64::NAN, f64::NAN))
    })
}

/// `B_n(μ)` as a density symbol.
pub fn berezin_measure_density(mu: &MeasureSpec, n: usize) -> Density {
    let m = mu.clone();
    let name = format!("B_{n}({})", mu.descriptor());
    Density::custom(name, f64::INFINITY, mu.is_positive(), move |w| {
        berezin_measure(&m, n, w).unwrap_or(C64::new(f64::NAN, f64::NAN))
    })
}

/// `B_n(μ)` as a symbol; radial measures give radial profiles.
pub fn berezin_measure_symbol(mu: &MeasureSpec, n: usize) -> MeasureSpec {
    match mu {
        MeasureSpec::Radial(_) => {
            let m = mu.clone();
            radial_symbol(format!("B_{n}({})", mu.descriptor()), mu.is_positive(), move |w| berezin_measure(&m, n, w))
        }
        _ => MeasureSpec::Density(berezin_measure_density(mu, n)),
    }
}

/// `B_n(T_μ^(k))` as a symbol; radial measures give radial profiles.
pub fn berezin_toeplitz_symbol(mu: &MeasureSpec, k: usize, n: usize) -> MeasureSpec {
    match mu {
        MeasureSpec::Radial(_) => {
            let m = mu.clone();
            let name = format!("B_{n}(T^({k}) {})", mu.descriptor());
            radial_symbol(name, mu.is_positive(), move |w| berezin_toeplitz(&m, k, n, w))
        }
        _ => MeasureSpec::Density(berezin_toeplitz_density(mu, k, n)),
    }
}

fn radial_symbol(name: String, nonneg: bool, f: impl Fn(C64) -> Result<C64> + Send + Sync + 'static) -> MeasureSpec {
    MeasureSpec::Radial(RadialProfile::Custom {
        name,
        f: Arc::new(move |x: f64| f(C64::new(x.sqrt(), 0.0)).map(|c| c.re).unwrap_or(f64::NAN)),
        sup: f64::INFINITY,
        nonneg,
        breakpoints: Vec::new(),
    })
}

fn sqrt_index_product(p: usize, q: usize) -> f64 {
    (((p + 1) * (q + 1)) as f64).sqrt()
}

/// Normalized-basis matrix to the coefficient matrix in `z^p ⊗ z^q`.
fn to_monomial(q: &TruncatedOperator) -> nalgebra::DMatrix<C64> {
    nalgebra::DMatrix::from_fn(q.dim(), q.dim(), |p, r| q.entry(p, r) * sqrt_index_product(p, r))
}

/// `Δ̃Q` from the rank-one rule
/// `Δ̃(z^n⊗z^m) = nm z^{n-1}⊗z^{m-1} + (n+2)(m+2) z^{n+1}⊗z^{m+1} - 2(n+1)(m+1) z^n⊗z^m`.
///
/// Exact when `Q` is supported below `N-1`; otherwise only the leading
/// `(N-1)×(N-1)` block is meaningful.
pub fn delta_tilde_op(q: &TruncatedOperator) -> TruncatedOperator {
    let n = q.dim();
    let a = to_monomial(q);
    let zero = C64::new(0.0, 0.0);
    TruncatedOperator::from_fn(n, |p, r| {
        let up = if p + 1 < n && r + 1 < n { a[(p + 1, r + 1)] } else { zero };
        let down = if p > 0 && r > 0 { a[(p - 1, r - 1)] } else { zero };
        let here = a[(p, r)];
        // (p+1)(q+1) [..] in monomial coefficients, divided by sqrt((p+1)(q+1))
        (up + down - here * 2.0) * sqrt_index_product(p, r)
    })
}

/// `Δ̃` on a diagonal operator given by its diagonal; entry `p` is valid for
/// `p < len - 1`.
pub fn delta_tilde_diag(d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let a: Vec<f64> = d.iter().enumerate().map(|(p, &v)| v * (p + 1) as f64).collect();
    (0..n)
        .map(|p| {
            let up = if p + 1 < n { a[p + 1] } else { 0.0 };
            let down = if p > 0 { a[p - 1] } else { 0.0 };
            (up + down - 2.0 * a[p]) * (p + 1) as f64
        })
        .collect()
}

/// `(T_{B_n(S)}, (n+1) Σ_j C(n,j)(-1)^j/(j+1) T^(j)_{B_0(S)})` at order `big_n`.
pub fn decompose_t_bn(s: &TruncatedOperator, n: usize, big_n: usize) -> Result<(TruncatedOperator, TruncatedOperator)> {
    if s.support() + n + 2 > big_n {
        return Err(Error::precision(format!(
            "operator support {} with n = {n} is not resolved at N = {big_n}",
            s.support()
        )));
    }
    let lhs_symbol = MeasureSpec::poly(berezin_poly(s, n));
    let lhs = assemble_toeplitz(&ToeplitzRequest::new(lhs_symbol, 0, big_n))?;
    let b0 = MeasureSpec::poly(berezin0_poly(s));
    let parts: Vec<Result<TruncatedOperator>> = (0..=n)
        .into_par_iter()
        .map(|j| assemble_toeplitz(&ToeplitzRequest::new(b0.clone(), j, big_n)))
        .collect();
    let mut rhs = TruncatedOperator::zeros(big_n);
    for (part, w) in parts.into_iter().zip(berezin_weights(n)) {
        rhs = rhs.add(&part?.scale(C64::new(w, 0.0)))?;
    }
    Ok((lhs, rhs))
}

/// `Δ^m_n x = (-1)^m Σ_j C(m,j) (-1)^j x_{n+j}`.
pub fn m_difference(x: &[C64], m: usize, n: usize) -> Result<C64> {
    if n + m >= x.len() {
        return Err(Error::usage(format!(
            "m-difference at n = {n}, m = {m} needs {} terms, sequence has {}",
            n + m + 1,
            x.len()
        )));
    }
    let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut total = C64::new(0.0, 0.0);
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += x[n + j] * (binomial(m, j) * sign);
    }
    Ok(total * sign_m)
}

/// Exact `c_0..c_ℓ` with `T_a^(ℓ) = Σ_i c_i Δ̃^i T_a`, from
/// `(k+1)(k+2)[T^(k+1) - T^(k)] = Δ̃[T^(k) + ... + T^(0)]`.
pub fn lincom_coefficients(l: usize) -> Vec<BigRational> {
    let zero = || BigRational::from_integer(BigInt::from(0));
    let mut all: Vec<Vec<BigRational>> = vec![vec![BigRational::from_integer(BigInt::from(1))]];
    for k in 0..l {
        let mut next = all[k].clone();
        next.push(zero());
        let factor = BigRational::new(BigInt::from(1), BigInt::from((k + 1) * (k + 2)));
        for prev in &all {
            for (i, c) in prev.iter().enumerate() {
                next[i + 1] += c * &factor;
            }
        }
        all.push(next);
    }
    all.pop().unwrap()
}

/// Sampled transform values on a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct BerezinField {
    pub n: usize,
    pub points: Vec<C64>,
    pub values: Vec<C64>,
}

impl BerezinField {
    pub fn of_operator(q: &TruncatedOperator, n: usize, points: &[C64]) -> Result<Self> {
        let values = points.par_iter().map(|&z| berezin_op(q, n, z)).collect::<Result<_>>()?;
        Ok(Self { n, points: points.to_vec(), values })
    }

    pub fn of_measure(mu: &MeasureSpec, n: usize, points: &[C64]) -> Result<Self> {
        let values = points.par_iter().map(|&z| berezin_measure(mu, n, z)).collect::<Result<_>>()?;
        Ok(Self { n, points: points.to_vec(), values })
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rows `re(z),im(z),re(val),im(val)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_z,im_z,re_val,im_val\n");
        for (z, v) in self.points.iter().zip(&self.values) {
            out.push_str(&format!("{:e},{:e},{:e},{:e}\n", z.re, z.im, v.re, v.im));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 0..12 {
            let s: f64 = berezin_weights(n).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn e0_transform_is_closed_form() {
        let e0 = TruncatedOperator::projection(0, 16);
        for z in [c(0.0, 0.0), c(0.3, -0.5), c(0.9, 0.1)] {
            let want = (1.0 - z.norm_sqr()).powi(2);
            assert!((berezin_op(&e0, 0, z).unwrap() - want).norm() < 1e-14);
        }
    }

    #[test]
    fn delta_tilde_of_projection() {
        let d = delta_tilde_op(&TruncatedOperator::projection(0, 6));
        assert_eq!(d.entry(0, 0), c(-2.0, 0.0));
        assert_eq!(d.entry(1, 1), c(2.0, 0.0));
        let d = delta_tilde_diag(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(d, vec![0.0, 6.0, -18.0, 12.0, 0.0]);
    }

    #[test]
    fn m_difference_examples() {
        let lin: Vec<C64> = (0..10).map(|n| c(n as f64, 0.0)).collect();
        let sq: Vec<C64> = (0..10).map(|n| c((n * n) as f64, 0.0)).collect();
        assert_eq!(m_difference(&lin, 0, 4).unwrap(), c(4.0, 0.0));
        assert_eq!(m_difference(&lin, 2, 3).unwrap(), c(0.0, 0.0));
        assert_eq!(m_difference(&sq, 2, 5).unwrap(), c(2.0, 0.0));
        assert_eq!(m_difference(&lin, 1, 5).unwrap(), c(1.0, 0.0));
        assert!(m_difference(&lin, 3, 7).is_err());
    }

    #[test]
    fn lincom_small_cases() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(lincom_coefficients(0), vec![r(1, 1)]);
        assert_eq!(lincom_coefficients(1), vec![r(1, 1), r(1, 2)]);
        assert_eq!(lincom_coefficients(2), vec![r(1, 1), r(5, 6), r(1, 12)]);
    }

    #[test]
    fn projection_kernel_matches_radial_poly() {
        for k in 0..4 {
            for n in 0..6 {
                let p = RadialPoly::berezin_projection(k, n);
                for r in [0.0, 0.2, 0.55, 0.9] {
                    let y = 1.0 - r * r;
                    let want = p.eval_y(y) / (y * y);
                    assert!((projection_kernel(k, n, r) - want).abs() < 1e-10, "k={k} n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn exact_projection_diagonal_matches_assembly() {
        for (k, n) in [(0, 0), (2, 1), (3, 4), (5, 2)] {
            let big_n = 24;
            let sym = MeasureSpec::poly(berezin_poly(&TruncatedOperator::projection(k, big_n), n));
            let t = assemble_toeplitz(&ToeplitzRequest::new(sym, 0, big_n)).unwrap();
            let d = berezin_projection_toeplitz_diag(k, n, big_n);
            for p in 0..big_n {
                assert!((t.entry(p, p).re - d[p]).abs() < 1e-12, "k={k} n={n} p={p}");
            }
        }
    }
}
