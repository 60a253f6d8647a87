use bergman_core::berezin::{berezin_op, delta_tilde_op, lincom_coefficients, m_difference};
use bergman_core::bergman::{inner_product, rank_one, reproducing_kernel, u_matrix, u_transform, u_transform_tail};
use bergman_core::carleson::pseudo_disk;
use bergman_core::toeplitz::toeplitz;
use bergman_core::{BiPolynomial, CoeffVector, MeasureSpec, MobiusMap, TruncatedOperator, C64};
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn point(max_r: f64) -> impl Strategy<Value = C64> {
    (0.0..max_r, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn poly(deg: usize, n: usize) -> impl Strategy<Value = CoeffVector> {
    prop::collection::vec(complex(), deg + 1).prop_map(move |mut c| {
        c.resize(n, C64::new(0.0, 0.0));
        CoeffVector::new(c).unwrap()
    })
}

fn atoms(count: usize, positive: bool) -> impl Strategy<Value = MeasureSpec> {
    prop::collection::vec((point(0.5), complex()), 1..=count).prop_map(move |v| {
        let pts: Vec<(C64, C64)> = v
            .into_iter()
            .map(|(z, m)| (z, if positive { C64::new(m.norm() + 0.01, 0.0) } else { m }))
            .collect();
        MeasureSpec::atoms(&pts).unwrap()
    })
}

fn quadratic_form(t: &TruncatedOperator, f: &CoeffVector) -> C64 {
    inner_product(&t.apply(f).unwrap(), f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_map_is_an_involution(z in point(0.95), w in point(0.95)) {
        let m = MobiusMap::new(z).unwrap();
        let back = m.eval(m.eval(w).unwrap()).unwrap();
        prop_assert!((back - w).norm() < 1e-12);
        prop_assert!(m.eval(z).unwrap().norm() < 1e-15);
    }

    #[test]
    fn u_transform_preserves_norm_with_tail(z in point(0.3), f in poly(8, 64)) {
        let g = u_transform(z, &f).unwrap();
        let tail = u_transform_tail(z, &f, 4096);
        let total = g.norm_sqr() + tail * tail;
        prop_assert!((total - f.norm_sqr()).abs() <= 1e-10 * f.norm_sqr().max(1e-300));
    }

    #[test]
    fn u_transform_agrees_pointwise(z in point(0.3), w in point(0.3), f in poly(6, 96)) {
        let g = u_transform(z, &f).unwrap();
        let phi = (z - w) / (C64::new(1.0, 0.0) - z.conj() * w);
        let dphi = -(1.0 - z.norm_sqr()) / ((C64::new(1.0, 0.0) - z.conj() * w).powi(2));
        let want = f.eval(phi) * dphi;
        prop_assert!((g.eval(w) - want).norm() < 1e-10);
    }

    #[test]
    fn kernel_reproduces_polynomials(z in point(0.6), f in poly(10, 48)) {
        let k = reproducing_kernel(z, 48).unwrap();
        prop_assert!((inner_product(&f, &k).unwrap() - f.eval(z)).norm() < 1e-12);
    }

    #[test]
    fn rank_one_acts_by_inner_product(f in poly(5, 12), g in poly(5, 12), h in poly(11, 12)) {
        let applied = rank_one(&f, &g).unwrap().apply(&h).unwrap();
        let want = f.scale(inner_product(&h, &g).unwrap());
        prop_assert!(applied.sub(&want).unwrap().norm() < 1e-12);
    }

    #[test]
    fn toeplitz_of_real_measure_is_self_adjoint(mu in atoms(4, false), k in 0usize..4) {
        let real = match &mu {
            MeasureSpec::Atomic(a) => {
                MeasureSpec::atoms(&a.iter().map(|a| (a.point, C64::new(a.mass.re, 0.0))).collect::<Vec<_>>()).unwrap()
            }
            _ => unreachable!(),
        };
        let t = toeplitz(&real, k, 24).unwrap();
        prop_assert!(t.hermitian_defect() < 1e-13);
    }

    #[test]
    fn toeplitz_of_positive_measure_is_positive(mu in atoms(4, true), k in 0usize..4) {
        let (lo, _) = toeplitz(&mu, k, 24).unwrap().hermitian_extremes();
        prop_assert!(lo > -1e-12);
    }

    #[test]
    fn variation_dominates_quadratic_form(mu in atoms(4, false), k in 0usize..4, f in poly(23, 24)) {
        let t = toeplitz(&mu, k, 24).unwrap();
        let tv = toeplitz(&mu.variation().unwrap(), k, 24).unwrap();
        let lhs = quadratic_form(&t, &f).norm();
        let rhs = quadratic_form(&tv, &f).re;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-13);
    }

    #[test]
    fn berezin_transform_is_bounded(
        entries in prop::collection::vec(complex(), 36),
        z in point(0.9),
        n in 0usize..4,
    ) {
        let q = TruncatedOperator::from_fn(16, |p, r| if p < 6 && r < 6 { entries[6 * p + r] } else { C64::new(0.0, 0.0) });
        let b = berezin_op(&q, n, z).unwrap();
        let bound = (n + 1) as f64 * 2f64.powi(n as i32) * q.operator_norm();
        prop_assert!(b.norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn berezin_transform_is_covariant(
        entries in prop::collection::vec(complex(), 16),
        z in point(0.3),
        w in point(0.3),
        n in 0usize..3,
    ) {
        let dim = 96;
        let q = TruncatedOperator::from_fn(dim, |p, r| if p < 4 && r < 4 { entries[4 * p + r] } else { C64::new(0.0, 0.0) });
        let moved = q.conjugate_by(&u_matrix(w, dim).unwrap()).unwrap();
        let lhs = berezin_op(&moved, n, z).unwrap();
        let phi = MobiusMap::new(w).unwrap().eval(z).unwrap();
        let rhs = berezin_op(&q, n, phi).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn forward_differences_match_recursion(x in prop::collection::vec(complex(), 12), m in 0usize..6, n in 0usize..5) {
        let mut d = x.clone();
        for _ in 0..m {
            d = d.windows(2).map(|w| w[1] - w[0]).collect();
        }
        prop_assert!((m_difference(&x, m, n).unwrap() - d[n]).norm() < 1e-12);
    }

    #[test]
    fn pseudo_disk_boundary_is_a_level_set(v in point(0.9), r in 0.05..0.95f64, t in 0.0..std::f64::consts::TAU) {
        let d = pseudo_disk(v, r).unwrap();
        let z = d.center() + C64::from_polar(d.euclidean_radius, t);
        let rho = MobiusMap::new(v).unwrap().eval(z).unwrap().norm();
        prop_assert!((rho - r).abs() < 1e-10);
    }

    #[test]
    fn higher_order_toeplitz_is_a_laplacian_polynomial(mu in atoms(3, false), l in 1usize..4) {
        let n = 40;
        let t0 = toeplitz(&mu, 0, n).unwrap();
        let mut power = t0.clone();
        let mut combo = TruncatedOperator::zeros(n);
        for c in lincom_coefficients(l) {
            combo = combo.add(&power.scale(C64::new(c.to_f64().unwrap(), 0.0))).unwrap();
            power = delta_tilde_op(&power);
        }
        let want = toeplitz(&mu, l, n).unwrap().leading_block(16);
        let err = combo.leading_block(16).sub(&want).unwrap().operator_norm();
        prop_assert!(err <= 1e-8 * want.operator_norm().max(1.0));
    }

    #[test]
    fn toeplitz_is_linear_in_the_symbol(a in complex(), b in complex(), k in 0usize..3) {
        let p = BiPolynomial::re_z();
        let q = BiPolynomial::abs_sq();
        let lhs = toeplitz(&MeasureSpec::poly(p.scale(a).add(&q.scale(b))), k, 24).unwrap();
        let rhs = toeplitz(&MeasureSpec::poly(p), k, 24)
            .unwrap()
            .scale(a)
            .add(&toeplitz(&MeasureSpec::poly(q), k, 24).unwrap().scale(b))
            .unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().operator_norm() < 1e-12);
    }
}
