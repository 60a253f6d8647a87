//! Bergman-space primitives.
//!
//! Elements of A² are carried as truncated Taylor coefficient vectors in the
//! monomial basis `w^j`. The orthonormal basis is `e_k = sqrt(k+1) w^k`, so
//! the inner product is `Σ f_j conj(g_j) / (j+1)`.

use crate::error::{Error, Result};
use crate::operator::TruncatedOperator;
use crate::C64;

/// Smallest admissible `|1 - conj(z) w|` in [`MobiusMap::eval`].
const DENOMINATOR_FLOOR: f64 = 1e-300;

/// Truncated power series of an element of A², `coeffs[j]` multiplying `w^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    coeffs: Vec<C64>,
}

impl CoeffVector {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::usage("coefficient vector must have length ≥ 1"));
        }
        if let Some(j) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Evaluation(format!("non-finite coefficient at index {j}")));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![C64::new(0.0, 0.0); n.max(1)] }
    }

    /// The monomial `w^j` truncated to order `n`.
    pub fn monomial(j: usize, n: usize) -> Self {
        let mut v = Self::zeros(n);
        if j < v.len() {
            v.coeffs[j] = C64::new(1.0, 0.0);
        }
        v
    }

    /// The orthonormal basis vector `e_k = sqrt(k+1) w^k`.
    pub fn basis(k: usize, n: usize) -> Self {
        let mut v = Self::zeros(n);
        if k < v.len() {
            v.coeffs[k] = C64::new(((k + 1) as f64).sqrt(), 0.0);
        }
        v
    }

    /// Builds a vector from coordinates in the orthonormal basis `e_p`.
    pub fn from_basis_coords(coords: &[C64]) -> Result<Self> {
        Self::new(
            coords
                .iter()
                .enumerate()
                .map(|(p, &c)| c * ((p + 1) as f64).sqrt())
                .collect(),
        )
    }

    /// Coordinates `⟨f, e_p⟩` in the orthonormal basis.
    pub fn basis_coords(&self) -> Vec<C64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(p, &c)| c / ((p + 1) as f64).sqrt())
            .collect()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the highest nonzero coefficient (0 for the zero vector).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| c.norm_sqr() > 0.0).unwrap_or(0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm_sqr() / (j + 1) as f64)
            .sum()
    }

    /// Evaluates the polynomial at `w` (Horner).
    pub fn eval(&self, w: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len(self, other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_len(self, other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }
}

fn check_len(f: &CoeffVector, g: &CoeffVector) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::usage(format!(
            "truncation orders differ: {} vs {}",
            f.len(),
            g.len()
        )));
    }
    Ok(())
}

/// `⟨f, g⟩ = Σ f_j conj(g_j) / (j+1)`.
pub fn inner_product(f: &CoeffVector, g: &CoeffVector) -> Result<C64> {
    check_len(f, g)?;
    Ok(f.coeffs
        .iter()
        .zip(&g.coeffs)
        .enumerate()
        .map(|(j, (a, b))| a * b.conj() / (j + 1) as f64)
        .sum())
}

/// Truncated Cauchy product of two series.
pub fn series_mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai.norm_sqr() == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// The disk involution `φ_z(w) = (z - w) / (1 - conj(z) w)` exchanging 0 and `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    z: C64,
}

impl MobiusMap {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(Error::domain(format!("Möbius parameter |z| = {} must be < 1", z.norm())));
        }
        Ok(Self { z })
    }

    pub fn point(&self) -> C64 {
        self.z
    }

    pub fn eval(&self, w: C64) -> Result<C64> {
        if w.norm() > 1.0 + 1e-15 {
            return Err(Error::domain(format!("|w| = {} exceeds 1", w.norm())));
        }
        let den = C64::new(1.0, 0.0) - self.z.conj() * w;
        if den.norm() < DENOMINATOR_FLOOR {
            return Err(Error::domain("degenerate Möbius denominator"));
        }
        Ok((self.z - w) / den)
    }

    /// Taylor coefficients of `φ_z` and `φ_z'` at the origin, truncated to `n` terms.
    pub fn series(&self, n: usize) -> (CoeffVector, CoeffVector) {
        let n = n.max(1);
        let zb = self.z.conj();
        let s = 1.0 - self.z.norm_sqr();
        let mut phi = vec![C64::new(0.0, 0.0); n];
        let mut dphi = vec![C64::new(0.0, 0.0); n];
        phi[0] = self.z;
        let mut pow = C64::new(1.0, 0.0); // conj(z)^(m-1)
        for m in 1..n {
            phi[m] = -s * pow;
            pow *= zb;
        }
        let mut pow = C64::new(1.0, 0.0);
        for (m, d) in dphi.iter_mut().enumerate() {
            *d = -s * (m + 1) as f64 * pow;
            pow *= zb;
        }
        (CoeffVector { coeffs: phi }, CoeffVector { coeffs: dphi })
    }
}

/// `U_z f = (f ∘ φ_z) φ_z'`, truncated to the order of `f`.
///
/// The composition is built from successive powers of the `φ_z` series and
/// one final series product with `φ_z'`.
pub fn u_transform(z: C64, f: &CoeffVector) -> Result<CoeffVector> {
    let map = MobiusMap::new(z)?;
    let n = f.len();
    let (phi, dphi) = map.series(n);
    let mut acc = vec![C64::new(0.0, 0.0); n];
    let mut power = vec![C64::new(0.0, 0.0); n];
    power[0] = C64::new(1.0, 0.0);
    let deg = f.degree();
    for (j, &fj) in f.coeffs.iter().enumerate().take(deg + 1) {
        if fj.norm_sqr() > 0.0 {
            for (a, p) in acc.iter_mut().zip(&power) {
                *a += fj * p;
            }
        }
        if j < deg {
            power = series_mul(&power, phi.coeffs(), n);
        }
    }
    CoeffVector::new(series_mul(&acc, dphi.coeffs(), n))
}

/// Coordinates `⟨U_z e_k, e_p⟩ / (1 - |z|²)` for `k ≤ k_max`, `p < len`.
///
/// Every column of `U_z` carries one factor `(1-|z|²)` from `φ_z'`; these
/// columns have it divided out analytically, so products of two of them
/// against `(1-|z|²)^{-2} dμ` stay bounded up to the boundary. Multiplication
/// by `φ_z` uses `(1 - conj(z) w) y = (z - w) s`, which is stable for every
/// `|z| < 1`.
pub fn weighted_columns(z: C64, k_max: usize, len: usize) -> Vec<Vec<C64>> {
    let zb = z.conj();
    // φ_z' / (1 - |z|²) = -1 / (1 - conj(z) w)²
    let mut s = vec![C64::new(0.0, 0.0); len];
    let mut pow = C64::new(1.0, 0.0);
    for (n, c) in s.iter_mut().enumerate() {
        *c = -(n as f64 + 1.0) * pow;
        pow *= zb;
    }
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            let mut y = vec![C64::new(0.0, 0.0); len];
            let mut prev_y = C64::new(0.0, 0.0);
            let mut prev_s = C64::new(0.0, 0.0);
            for n in 0..len {
                let v = zb * prev_y + z * s[n] - prev_s;
                y[n] = v;
                prev_y = v;
                prev_s = s[n];
            }
            s = y;
        }
        let scale = ((k + 1) as f64).sqrt();
        out.push(
            s.iter()
                .enumerate()
                .map(|(p, &c)| c * (scale / ((p + 1) as f64).sqrt()))
                .collect(),
        );
    }
    out
}

/// Real-radius specialization of [`weighted_columns`]: `H_{pk}(r)`.
///
/// For `z = r e^{iθ}` one has `⟨U_z e_k, e_p⟩ = e^{i(k-p)θ} (1-r²) H_{pk}(r)`.
pub fn weighted_columns_radial(r: f64, k_max: usize, len: usize) -> Vec<Vec<f64>> {
    let mut s: Vec<f64> = Vec::with_capacity(len);
    let mut pow = 1.0;
    for n in 0..len {
        s.push(-(n as f64 + 1.0) * pow);
        pow *= r;
    }
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            let mut y = vec![0.0; len];
            let mut prev_y = 0.0;
            let mut prev_s = 0.0;
            for n in 0..len {
                let v = r * prev_y + r * s[n] - prev_s;
                y[n] = v;
                prev_y = v;
                prev_s = s[n];
            }
            s = y;
        }
        let scale = ((k + 1) as f64).sqrt();
        out.push(
            s.iter()
                .enumerate()
                .map(|(p, &c)| c * scale / ((p + 1) as f64).sqrt())
                .collect(),
        );
    }
    out
}

/// Norm of the part of `U_z f` lying beyond index `f.len()`.
///
/// The columns `U_z w^j`, `j ≤ deg f`, are extended until their remaining
/// mass is negligible, and the A²-norm of the overflow is returned.
/// Returns `f64::INFINITY` when the series cannot be resolved below
/// `max_len` terms.
pub fn u_transform_tail(z: C64, f: &CoeffVector, max_len: usize) -> f64 {
    let n = f.len();
    if z.norm() == 0.0 {
        return 0.0;
    }
    let deg = f.degree();
    let mut ext = (2 * n).max(n + 64);
    loop {
        let cols = weighted_columns(z, deg, ext);
        let scale = 1.0 - z.norm_sqr();
        let mut tail = vec![C64::new(0.0, 0.0); ext - n];
        for (j, col) in cols.iter().enumerate() {
            let fj = f.coeffs[j] / ((j + 1) as f64).sqrt();
            if fj.norm_sqr() == 0.0 {
                continue;
            }
            for (t, c) in tail.iter_mut().zip(&col[n..]) {
                *t += fj * c * scale;
            }
        }
        let total: f64 = tail.iter().map(|c| c.norm_sqr()).sum();
        let last: f64 = tail[tail.len().saturating_sub(8)..].iter().map(|c| c.norm_sqr()).sum();
        if last <= 1e-32 * total.max(1e-300) || total == 0.0 {
            return total.sqrt();
        }
        if ext >= max_len {
            return f64::INFINITY;
        }
        ext = (ext * 2).min(max_len);
    }
}

/// Reproducing kernel `K_z(w) = Σ (j+1) conj(z)^j w^j`, so `⟨f, K_z⟩ = f(z)`.
pub fn reproducing_kernel(z: C64, n: usize) -> Result<CoeffVector> {
    MobiusMap::new(z)?;
    let zb = z.conj();
    let mut pow = C64::new(1.0, 0.0);
    let mut coeffs = Vec::with_capacity(n.max(1));
    for j in 0..n.max(1) {
        coeffs.push(pow * (j + 1) as f64);
        pow *= zb;
    }
    CoeffVector::new(coeffs)
}

/// The rank-one operator `(f ⊗ g) h = ⟨h, g⟩ f`.
pub fn rank_one(f: &CoeffVector, g: &CoeffVector) -> Result<TruncatedOperator> {
    check_len(f, g)?;
    let fc = f.basis_coords();
    let gc = g.basis_coords();
    let n = f.len();
    Ok(TruncatedOperator::from_fn(n, |p, q| fc[p] * gc[q].conj()))
}

/// The truncated matrix of `U_w` in the orthonormal basis: column `j` is
/// `u_transform(w, e_j)`.
pub fn u_matrix(w: C64, n: usize) -> Result<TruncatedOperator> {
    let cols: Vec<Vec<C64>> = (0..n)
        .map(|j| u_transform(w, &CoeffVector::basis(j, n)).map(|v| v.basis_coords()))
        .collect::<Result<_>>()?;
    Ok(TruncatedOperator::from_fn(n, |p, q| cols[q][p]))
}
