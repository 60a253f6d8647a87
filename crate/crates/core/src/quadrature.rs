//! Quadrature on the unit disk with normalized area `dA = dx dθ / 2π`,
//! `x = |z|²`, plus one-dimensional rules in `x` used by radial reductions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::C64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(&t, &wt)| (a + h * (t + 1.0), h * wt)).collect()
}

/// Rule for `∫_0^1 g(x) dx` in the variable `t = sqrt(1-x)`, with `n` Gauss
/// nodes in `t` on every interval between consecutive breakpoints.
///
/// Exact for polynomials in `x` of degree `< n` and for `(1-x)^{1/2}` times
/// such polynomials; ascending in `x`.
pub fn sqrt_endpoint_rule(n: usize, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > 0.0 && b < 1.0));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for pair in cuts.windows(2) {
        // x ∈ [a, b]  ⇔  t ∈ [sqrt(1-b), sqrt(1-a)]
        let (ta, tb) = ((1.0 - pair[1]).sqrt(), (1.0 - pair[0]).sqrt());
        for (t, wt) in gauss_legendre_on(n, ta, tb) {
            out.push((1.0 - t * t, 2.0 * t * wt));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Composite Gauss rule on `[0, 1]` with panels graded geometrically toward
/// both endpoints of each breakpoint interval.
///
/// Resolves integrands concentrated at scale `2^{-depth}` near an endpoint,
/// such as the invariant kernels `(1-|w|²)^m / |1 - conj(w)ζ|^{2m}` as `|w| → 1`.
pub fn graded_rule(per_panel: usize, depth: usize, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > 0.0 && b < 1.0));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let h = b - a;
        let mid = a + 0.5 * h;
        let mut panels = Vec::new();
        let mut lo = 0.5 * h;
        for _ in 0..depth {
            let hi = lo;
            lo *= 0.5;
            panels.push((a + lo, a + hi));
            panels.push((b - hi, b - lo));
        }
        panels.push((a, a + lo));
        panels.push((b - lo, b));
        panels.retain(|&(p, q)| q > p);
        // panels tile [a, mid] and [mid, b]
        debug_assert!(panels.iter().any(|&(_, q)| q == mid) || depth == 0);
        for (p, q) in panels {
            out.extend(gauss_legendre_on(per_panel, p, q));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Tensor rule on the disk: Gauss–Legendre in `x = |z|²` on `[0, 1]` times
/// `L` uniform angles. Weights sum to one (normalized area).
#[derive(Debug, Clone)]
pub struct DiskQuadrature {
    radial_order: usize,
    angular_order: usize,
    /// `(x_i, w_i)` with `Σ w_i = 1`.
    radial: Vec<(f64, f64)>,
    angles: Vec<f64>,
}

impl DiskQuadrature {
    pub fn new(radial_order: usize, angular_order: usize) -> Result<Self> {
        if radial_order < 1 {
            return Err(Error::usage("radial order M must be ≥ 1"));
        }
        if angular_order < 4 {
            return Err(Error::usage("angular order L must be ≥ 4"));
        }
        let radial = gauss_legendre_on(radial_order, 0.0, 1.0);
        let angles = (0..angular_order)
            .map(|l| 2.0 * PI * l as f64 / angular_order as f64)
            .collect();
        Ok(Self { radial_order, angular_order, radial, angles })
    }

    /// Default rule for operator assembly (`M = 200`, `L = 256`).
    pub fn assembly_default() -> Self {
        Self::new(200, 256).expect("valid orders")
    }

    /// Default rule for pointwise field evaluation (`M = 64`, `L = 128`).
    pub fn field_default() -> Self {
        Self::new(64, 128).expect("valid orders")
    }

    /// Rule with both orders doubled.
    pub fn refined(&self) -> Self {
        Self::new(self.radial_order * 2, self.angular_order * 2).expect("valid orders")
    }

    pub fn radial_order(&self) -> usize {
        self.radial_order
    }

    pub fn angular_order(&self) -> usize {
        self.angular_order
    }

    /// Radial nodes `(x_i, w_i)` in `x = |z|²`.
    pub fn radial(&self) -> &[(f64, f64)] {
        &self.radial
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// All `(node, weight)` pairs, radius-major.
    pub fn nodes(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        let inv_l = 1.0 / self.angular_order as f64;
        self.radial.iter().flat_map(move |&(x, wx)| {
            let r = x.sqrt();
            self.angles.iter().map(move |&t| (C64::from_polar(r, t), wx * inv_l))
        })
    }

    pub fn len(&self) -> usize {
        self.radial_order * self.angular_order
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `∫_D f dA` with a deterministic radius-major summation order.
    pub fn integrate_area(&self, f: impl Fn(C64) -> C64) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for (z, w) in self.nodes() {
            let v = f(z);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Evaluation(format!("integrand is not finite at node {z}")));
            }
            total += v * w;
        }
        Ok(total)
    }
}

/// `∫ f dμ`. Density and radial measures use the quadrature rule; atomic
/// measures are summed exactly.
pub fn integrate(q: &DiskQuadrature, mu: &MeasureSpec, f: impl Fn(C64) -> C64) -> Result<C64> {
    match mu {
        MeasureSpec::Atomic(atoms) => {
            let mut total = C64::new(0.0, 0.0);
            for a in atoms {
                let v = f(a.point);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Evaluation(format!("integrand is not finite at atom {}", a.point)));
                }
                total += v * a.mass;
            }
            Ok(total)
        }
        MeasureSpec::Radial(profile) => {
            let rule = profile.x_rule(q.radial_order());
            let inv_l = 1.0 / q.angular_order() as f64;
            let mut total = C64::new(0.0, 0.0);
            for (x, wx) in rule {
                let rho = profile.eval(x);
                if rho == 0.0 {
                    continue;
                }
                let r = x.sqrt();
                let mut ring = C64::new(0.0, 0.0);
                for &t in q.angles() {
                    let z = C64::from_polar(r, t);
                    let v = f(z);
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::Evaluation(format!("integrand is not finite at node {z}")));
                    }
                    ring += v;
                }
                total += ring * (rho * wx * inv_l);
            }
            Ok(total)
        }
        MeasureSpec::Density(a) => {
            let mut total = C64::new(0.0, 0.0);
            for (z, w) in q.nodes() {
                let v = f(z);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Evaluation(format!("integrand is not finite at node {z}")));
                }
                total += v * a.eval(z) * w;
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, RadialProfile};

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        for deg in 0..20 {
            let got: f64 = x.iter().zip(&w).map(|(&t, &wt)| wt * t.powi(deg)).sum();
            let want = if deg % 2 == 0 { 2.0 / (deg + 1) as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "degree {deg}");
        }
        let (x, w) = gauss_legendre(200);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn disk_rule_basics() {
        let q = DiskQuadrature::new(16, 32).unwrap();
        let total: f64 = q.nodes().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!(q.nodes().all(|(z, _)| z.norm() < 1.0));
        let m2 = q.integrate_area(|z| C64::new(z.norm_sqr(), 0.0)).unwrap();
        assert!((m2.re - 0.5).abs() < 1e-15);
        let m1 = q.integrate_area(|z| z).unwrap();
        assert!(m1.norm() < 1e-15);
    }

    #[test]
    fn disk_rule_monomial_exactness() {
        let (m, l) = (8usize, 16usize);
        let q = DiskQuadrature::new(m, l).unwrap();
        for a in 0..l / 2 {
            for b in 0..l / 2 {
                let got = q.integrate_area(|z| z.powu(a as u32) * z.conj().powu(b as u32)).unwrap();
                let want = if a == b { 1.0 / (a + 1) as f64 } else { 0.0 };
                if a == b && a > 2 * m - 1 {
                    continue;
                }
                assert!((got - want).norm() < 1e-13, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn bad_orders_are_rejected() {
        assert!(DiskQuadrature::new(0, 16).is_err());
        assert!(DiskQuadrature::new(4, 3).is_err());
    }

    #[test]
    fn integrate_against_measures() {
        let q = DiskQuadrature::field_default();
        let leb = MeasureSpec::lebesgue();
        let one = integrate(&q, &leb, |_| C64::new(1.0, 0.0)).unwrap();
        assert!((one.re - 1.0).abs() < 1e-14);
        let delta0 = MeasureSpec::Atomic(vec![Atom::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))]);
        let v = integrate(&q, &delta0, |z| C64::new((1.0 - z.norm_sqr()).powi(2), 0.0)).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15);
        let lin = MeasureSpec::Radial(RadialProfile::Power { beta: 1.0 });
        let half = integrate(&q, &lin, |_| C64::new(1.0, 0.0)).unwrap();
        assert!((half.re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn integrate_reports_non_finite_nodes() {
        let q = DiskQuadrature::new(4, 8).unwrap();
        let err = integrate(&q, &MeasureSpec::lebesgue(), |_| C64::new(f64::NAN, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Evaluation(_)));
    }

    #[test]
    fn one_dimensional_rules() {
        for rule in [sqrt_endpoint_rule(20, &[0.25]), graded_rule(16, 30, &[0.5])] {
            let s: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-13);
            let m: f64 = rule.iter().map(|&(x, w)| w * x.powi(7)).sum();
            assert!((m - 0.125).abs() < 1e-13);
        }
        let rule = sqrt_endpoint_rule(10, &[]);
        let v: f64 = rule.iter().map(|&(x, w)| w * (1.0 - x).sqrt() * x).sum();
        // ∫ x (1-x)^{1/2} dx = B(2, 3/2) = 4/15
        assert!((v - 4.0 / 15.0).abs() < 1e-14);
        // a peak of width 1e-6 at x = 1
        let rule = graded_rule(16, 45, &[]);
        let eps = 1e-6;
        let v: f64 = rule.iter().map(|&(x, w)| w * eps / (1.0 - x + eps).powi(2)).sum();
        let exact = 1.0 - eps / (1.0 + eps);
        assert!((v - exact).abs() < 1e-12);
    }
}
