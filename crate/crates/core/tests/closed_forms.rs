use bergman_core::berezin::{berezin_measure, berezin_symbol};
use bergman_core::carleson::{annulus_constant_check, carleson_classify, mu_disk, mu_tilde_disk, Classification, ClassifyOptions};
use bergman_core::quadrature::integrate;
use bergman_core::toeplitz::toeplitz;
use bergman_core::{BiPolynomial, DiskQuadrature, MeasureSpec, RadialProfile, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn monomials_integrate_to_reciprocals() {
    let q = DiskQuadrature::assembly_default();
    for a in 0..30 {
        for b in 0..30 {
            let v = q.integrate_area(|z| z.powu(a) * z.conj().powu(b)).unwrap();
            let want = if a == b { 1.0 / (a + 1) as f64 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-13, "z^{a} z̄^{b}: {v}");
        }
    }
}

#[test]
fn endpoint_singularity_converges_under_refinement() {
    // ∫ (1-|z|²)^{1/2} |z|^{2p} dA = B(p+1, 3/2)
    let mu = MeasureSpec::Radial(RadialProfile::Power { beta: 0.5 });
    let mut beta = 2.0 / 3.0;
    for p in 0..20 {
        if p > 0 {
            beta *= p as f64 / (p as f64 + 1.5);
        }
        for q in [DiskQuadrature::new(60, 64).unwrap(), DiskQuadrature::new(120, 64).unwrap()] {
            let v = integrate(&q, &mu, |z| c(z.norm_sqr().powi(p), 0.0)).unwrap();
            assert!((v.re - beta).abs() < 1e-12, "p = {p}: {} vs {beta}", v.re);
        }
    }
}

#[test]
fn radial_toeplitz_diagonals() {
    let mut beta = 2.0 / 3.0;
    let t = toeplitz(&MeasureSpec::Radial(RadialProfile::Power { beta: 0.5 }), 0, 32).unwrap();
    for p in 0..32 {
        if p > 0 {
            beta *= p as f64 / (p as f64 + 1.5);
        }
        assert!((t.entry(p, p).re - (p + 1) as f64 * beta).abs() < 1e-10);
    }
    assert!(t.is_diagonal());

    let t = toeplitz(&MeasureSpec::Radial(RadialProfile::Indicator { r: 0.5 }), 0, 32).unwrap();
    for p in 0..32 {
        assert!((t.entry(p, p).re - 0.25f64.powi(p as i32 + 1)).abs() < 1e-12);
    }
}

#[test]
fn compactly_supported_symbols_decay_along_the_diagonal() {
    let mu = MeasureSpec::Radial(RadialProfile::Indicator { r: 0.5 });
    for k in 0..4 {
        let t = toeplitz(&mu, k, 64).unwrap();
        let d: Vec<f64> = t.diagonal().iter().map(|v| v.re).collect();
        assert!(d[40] < 1e-15 * d[0].max(1.0) + 1e-15, "k = {k}: {}", d[40]);
    }
}

#[test]
fn pseudo_disk_masses() {
    for (v, r) in [(c(0.0, 0.0), 0.3), (c(0.5, 0.2), 0.4), (c(-0.1, 0.85), 0.6)] {
        let s = 1.0 - v.norm_sqr();
        let area = (r * s / (1.0 - r * r * v.norm_sqr())).powi(2);
        let m = mu_disk(&MeasureSpec::lebesgue(), v, r).unwrap();
        assert!((m - area).abs() < 1e-10 * area, "area at {v}: {m} vs {area}");
        // invariant measure of D(v, r) does not depend on v
        let inv = mu_tilde_disk(&MeasureSpec::lebesgue(), v, r).unwrap();
        let want = r * r / (1.0 - r * r);
        assert!((inv - want).abs() < 1e-8 * want, "invariant area at {v}: {inv} vs {want}");
    }
    let a = c(0.2, -0.3);
    let atom = MeasureSpec::atoms(&[(a, c(2.0, 0.0))]).unwrap();
    let inside = mu_tilde_disk(&atom, c(0.25, -0.3), 0.2).unwrap();
    assert!((inside - 2.0 / (1.0 - a.norm_sqr()).powi(2)).abs() < 1e-12);
    assert_eq!(mu_tilde_disk(&atom, c(-0.5, 0.5), 0.2).unwrap(), 0.0);
}

#[test]
fn berezin_transforms_fix_constants_and_harmonic_symbols() {
    let z = c(0.4, -0.35);
    for n in 0..5 {
        let one = berezin_measure(&MeasureSpec::lebesgue(), n, z).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-12);
        let h = berezin_symbol(&MeasureSpec::poly(BiPolynomial::re_z()), n, z).unwrap();
        assert!((h - c(z.re, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn berezin_of_an_atom() {
    // B_n(δ_a)(z) = (n+1)(1-|φ_z(a)|²)^{n+2} / (1-|a|²)²
    let a = c(0.3, 0.1);
    let mu = MeasureSpec::atoms(&[(a, c(1.0, 0.0))]).unwrap();
    for (n, z) in [(0, c(0.0, 0.0)), (2, c(-0.4, 0.2)), (3, c(0.6, 0.5))] {
        let phi = (z - a) / (c(1.0, 0.0) - z.conj() * a);
        let want = (n + 1) as f64 * (1.0 - phi.norm_sqr()).powi(n as i32 + 2) / (1.0 - a.norm_sqr()).powi(2);
        let got = berezin_measure(&mu, n, z).unwrap();
        assert!((got - c(want, 0.0)).norm() < 1e-12 * want.max(1.0));
    }
}

#[test]
fn lebesgue_is_carleson_but_not_vanishing() {
    let r = carleson_classify(&MeasureSpec::lebesgue(), &ClassifyOptions::default()).unwrap();
    assert!((r.b0_sup - 1.0).abs() < 1e-10);
    assert_eq!(r.classification, Classification::Carleson);
    for b in &r.bounds {
        assert!(b.lower_diag <= b.norm_trunc * (1.0 + 1e-9) && b.norm_trunc <= b.upper);
    }
}

#[test]
fn signed_measures_are_not_classified() {
    let mu = MeasureSpec::atoms(&[(c(0.1, 0.0), c(-1.0, 0.0))]).unwrap();
    assert!(carleson_classify(&mu, &ClassifyOptions::default()).is_err());
}

#[test]
fn annulus_constant_is_positive() {
    let a = annulus_constant_check(200).unwrap();
    assert!(a.r_check);
    assert!(a.proof_bound > 0.0 && a.c1_estimate >= a.proof_bound);
}
