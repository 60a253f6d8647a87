//! The N×N matrix carrier for operators on A².
//!
//! Entry `(p, q)` is `⟨Q e_q, e_p⟩` in the orthonormal basis `e_k`.

use nalgebra::DMatrix;

use crate::bergman::CoeffVector;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    entries: DMatrix<C64>,
}

impl TruncatedOperator {
    pub fn from_matrix(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::usage(format!(
                "operator matrix must be square and nonempty, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { entries: DMatrix::from_fn(n, n, |p, q| f(p, q)) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n) }
    }

    /// `E_k = e_k ⊗ e_k`, the projection onto `span{e_k}`.
    pub fn projection(k: usize, n: usize) -> Self {
        let mut m = Self::zeros(n);
        if k < n {
            m.entries[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |p, q| if p == q { diag[p] } else { C64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, p: usize, q: usize) -> C64 {
        self.entries[(p, q)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|p| self.entries[(p, p)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { entries: &self.entries - &other.entries })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { entries: &self.entries * s }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { entries: &self.entries * &other.entries })
    }

    /// `U Q U` for a (self-adjoint) conjugating matrix `U`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.compose(self)?.compose(u)
    }

    /// Applies the matrix to `f`, returning monomial coefficients.
    pub fn apply(&self, f: &CoeffVector) -> Result<CoeffVector> {
        if f.len() != self.dim() {
            return Err(Error::usage(format!(
                "vector of order {} applied to operator of order {}",
                f.len(),
                self.dim()
            )));
        }
        let x = nalgebra::DVector::from_vec(f.basis_coords());
        let y = &self.entries * x;
        CoeffVector::from_basis_coords(y.as_slice())
    }

    /// Leading `m×m` block.
    pub fn leading_block(&self, m: usize) -> Self {
        let m = m.min(self.dim()).max(1);
        Self { entries: self.entries.view((0, 0), (m, m)).into_owned() }
    }

    /// Embeds into (or truncates to) order `n`, padding with zeros.
    pub fn resized(&self, n: usize) -> Self {
        Self::from_fn(n, |p, q| {
            if p < self.dim() && q < self.dim() {
                self.entries[(p, q)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// One past the largest index carrying a nonzero entry (0 for the zero
    /// operator). An operator whose support is below `dim()` is represented
    /// exactly by its truncation.
    pub fn support(&self) -> usize {
        let n = self.dim();
        let mut s = 0;
        for q in 0..n {
            for p in 0..n {
                if self.entries[(p, q)].norm_sqr() > 0.0 {
                    s = s.max(p.max(q) + 1);
                }
            }
        }
        s
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|q| (0..n).all(|p| p == q || self.entries[(p, q)].norm_sqr() == 0.0))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |Q - Q*|` entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest singular value of the truncated matrix.
    pub fn operator_norm(&self) -> f64 {
        if self.is_diagonal() {
            return self.diagonal().iter().map(|c| c.norm()).fold(0.0, f64::max);
        }
        self.entries
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Smallest and largest eigenvalue of the Hermitian part `(Q + Q*)/2`.
    pub fn hermitian_extremes(&self) -> (f64, f64) {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let eig = if self.is_diagonal() {
            h.diagonal().iter().map(|c| c.re).collect::<Vec<_>>()
        } else {
            nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
        };
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Row-major CSV, each entry written as a `re,im` pair.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        for p in 0..n {
            let row: Vec<String> = (0..n)
                .map(|q| {
                    let c = self.entries[(p, q)];
                    format!("{:e},{:e}", c.re, c.im)
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Row-major `[re, im]` pairs for JSON export.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        let n = self.dim();
        (0..n)
            .map(|p| (0..n).map(|q| [self.entries[(p, q)].re, self.entries[(p, q)].im]).collect())
            .collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::usage(format!(
                "operator orders differ: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::rank_one;

    #[test]
    fn projection_has_single_entry() {
        let e = TruncatedOperator::projection(3, 6);
        for p in 0..6 {
            for q in 0..6 {
                let want = if p == 3 && q == 3 { 1.0 } else { 0.0 };
                assert_eq!(e.entry(p, q), C64::new(want, 0.0));
            }
        }
        assert_eq!(e.support(), 4);
    }

    #[test]
    fn norms_of_simple_operators() {
        assert!((TruncatedOperator::identity(8).operator_norm() - 1.0).abs() < 1e-14);
        assert!((TruncatedOperator::projection(2, 8).operator_norm() - 1.0).abs() < 1e-14);
        let f = CoeffVector::basis(0, 8).scale(C64::new(2.0, 0.0));
        let g = CoeffVector::basis(1, 8).scale(C64::new(3.0, 0.0));
        let r = rank_one(&f, &g).unwrap();
        assert!((r.operator_norm() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_norm_is_product_of_norms() {
        let n = 7;
        let f = CoeffVector::new((0..n).map(|j| C64::new(j as f64 - 2.0, 0.5)).collect()).unwrap();
        let g = CoeffVector::new((0..n).map(|j| C64::new(0.3, 1.0 / (j + 1) as f64)).collect()).unwrap();
        let r = rank_one(&f, &g).unwrap();
        assert!((r.operator_norm() - f.norm() * g.norm()).abs() < 1e-12);
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let q = TruncatedOperator::from_fn(3, |p, q| C64::new(p as f64, q as f64 + 1.0));
        let a = q.adjoint();
        for p in 0..3 {
            for r in 0..3 {
                assert_eq!(a.entry(p, r), q.entry(r, p).conj());
            }
        }
    }

    #[test]
    fn rank_one_apply_matches_definition() {
        let n = 6;
        let f = CoeffVector::new((0..n).map(|j| C64::new(1.0, j as f64)).collect()).unwrap();
        let g = CoeffVector::new((0..n).map(|j| C64::new(-(j as f64), 2.0)).collect()).unwrap();
        let h = CoeffVector::new((0..n).map(|j| C64::new(0.5 * j as f64, -1.0)).collect()).unwrap();
        let lhs = rank_one(&f, &g).unwrap().apply(&h).unwrap();
        let rhs = f.scale(crate::bergman::inner_product(&h, &g).unwrap());
        assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        let a = TruncatedOperator::identity(3);
        let b = TruncatedOperator::identity(4);
        assert!(a.sub(&b).is_err());
        assert!(TruncatedOperator::from_matrix(DMatrix::zeros(2, 3)).is_err());
    }
}
