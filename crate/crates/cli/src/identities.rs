//! The identity suites run by `verify-identities`.
//!
//! Every check draws its random corpus from its own stream seeded by the run
//! seed and the check's position, evaluates a residual, and compares it with
//! a tolerance tier. Precision errors from the library are reported as such
//! and never as a pass.

use std::f64::consts::PI;

use bergman_core::berezin::{
    berezin_measure_symbol, berezin_op, berezin_symbol, berezin_toeplitz_symbol, decompose_t_bn,
    delta_tilde_op, lincom_coefficients,
};
use bergman_core::bergman::{
    inner_product, rank_one, reproducing_kernel, u_matrix, u_transform, u_transform_tail, weighted_columns,
};
use bergman_core::bipoly::{berezin_poly, delta_tilde_fn};
use bergman_core::toeplitz::{assemble_toeplitz, diagonal_kernel_mass, englis_bound_check, ToeplitzRequest};
use bergman_core::{
    BiPolynomial, CoeffVector, DiskQuadrature, Error, HyperbolicGrid, MeasureSpec, MobiusMap, RadialProfile,
    TruncatedOperator, C64,
};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{RunConfig, TAIL_TOL};

/// Tolerance for the identity operator and the diagonal kernel mass.
pub const OPERATOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    PrecisionError,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityResult {
    pub name: &'static str,
    pub module: &'static str,
    pub anchor: &'static str,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySummary {
    pub config: RunConfig,
    pub passed: usize,
    pub failed: usize,
    pub precision_errors: usize,
    pub all_pass: bool,
    pub identities: Vec<IdentityResult>,
}

type Residual = bergman_core::Result<f64>;

struct Ctx<'a> {
    cfg: &'a RunConfig,
    n: usize,
    quad: DiskQuadrature,
    rng: ChaCha8Rng,
}

impl Ctx<'_> {
    fn toeplitz(&self, mu: &MeasureSpec, k: usize) -> bergman_core::Result<TruncatedOperator> {
        assemble_toeplitz(&ToeplitzRequest::new(mu.clone(), k, self.n).with_quadrature(self.quad.clone()))
    }

    fn point(&mut self, rmax: f64) -> C64 {
        let r = rmax * self.rng.gen::<f64>().sqrt();
        C64::from_polar(r, 2.0 * PI * self.rng.gen::<f64>())
    }

    fn scalar(&mut self) -> C64 {
        C64::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
    }

    fn poly(&mut self, deg: usize) -> CoeffVector {
        let mut c = vec![C64::new(0.0, 0.0); self.n];
        for v in c.iter_mut().take(deg + 1) {
            *v = self.scalar();
        }
        CoeffVector::new(c).expect("finite coefficients")
    }

    fn bipoly(&mut self, deg: usize) -> BiPolynomial {
        let mut terms = Vec::new();
        for a in 0..=deg {
            for b in 0..=deg - a {
                terms.push((a, b, self.scalar()));
            }
        }
        BiPolynomial::from_terms(&terms)
    }

    fn real_atoms(&mut self, count: usize, rmax: f64) -> MeasureSpec {
        let pts: Vec<(C64, C64)> =
            (0..count).map(|_| (self.point(rmax), C64::new(self.rng.gen_range(0.2..1.0), 0.0))).collect();
        MeasureSpec::atoms(&pts).expect("atoms inside the disk")
    }
}

struct Check {
    name: &'static str,
    module: &'static str,
    anchor: &'static str,
    tol: fn(&RunConfig) -> f64,
    run: fn(&mut Ctx) -> Residual,
}

fn exact(c: &RunConfig) -> f64 {
    c.tol.exact
}

fn assembled(c: &RunConfig) -> f64 {
    c.tol.assembled
}

fn field(c: &RunConfig) -> f64 {
    c.tol.field
}

fn tail(_: &RunConfig) -> f64 {
    TAIL_TOL
}

fn operator(_: &RunConfig) -> f64 {
    OPERATOR_TOL
}

const CORE: &str = "bergman-core";
const TOEPLITZ: &str = "toeplitz-ops";
const BEREZIN: &str = "berezin-laplacian";
const CARLESON: &str = "carleson-analysis";

fn checks() -> Vec<Check> {
    vec![
        Check {
            name: "mobius_involution",
            module: CORE,
            anchor: "φ_z interchanges 0 and z and φ_z∘φ_z = id",
            tol: exact,
            run: mobius_involution,
        },
        Check {
            name: "u_isometry_with_tail",
            module: CORE,
            anchor: "U_z f = (f∘φ_z)φ_z' is unitary",
            tol: tail,
            run: u_isometry,
        },
        Check {
            name: "u_self_adjoint",
            module: CORE,
            anchor: "U_z is unitary and self-adjoint",
            tol: tail,
            run: u_self_adjoint,
        },
        Check {
            name: "rank_one_action",
            module: CORE,
            anchor: "(f⊗g)h = ⟨h,g⟩f",
            tol: exact,
            run: rank_one_action,
        },
        Check {
            name: "reproducing_property",
            module: CORE,
            anchor: "⟨f, K_z⟩ = f(z)",
            tol: exact,
            run: reproducing_property,
        },
        Check {
            name: "lebesgue_identity",
            module: TOEPLITZ,
            anchor: "T_1^(k) = I for all k",
            tol: operator,
            run: lebesgue_identity,
        },
        Check {
            name: "self_adjointness",
            module: TOEPLITZ,
            anchor: "real symbols give self-adjoint T_μ^(k)",
            tol: |_| 1e-10,
            run: self_adjointness,
        },
        Check {
            name: "positivity",
            module: TOEPLITZ,
            anchor: "μ ≥ 0 gives T_μ^(k) ≥ 0",
            tol: |_| 1e-9,
            run: positivity,
        },
        Check {
            name: "modulus_domination",
            module: TOEPLITZ,
            anchor: "‖T_μ^(k)‖ ≤ ‖T_|μ|^(k)‖",
            tol: operator,
            run: modulus_domination,
        },
        Check {
            name: "recurrence_closure",
            module: TOEPLITZ,
            anchor: "(k+1)(k+2)[T^(k+1) - T^(k)] = Δ̃[T^(k) + ... + T^(0)]",
            tol: assembled,
            run: recurrence_closure,
        },
        Check {
            name: "harmonic_invariance",
            module: TOEPLITZ,
            anchor: "T_a^(k) = T_a for harmonic a",
            tol: assembled,
            run: harmonic_invariance,
        },
        Check {
            name: "symbol_sup_bound",
            module: TOEPLITZ,
            anchor: "‖T_a^(k)‖ ≤ ‖a‖_∞",
            tol: assembled,
            run: symbol_sup_bound,
        },
        Check {
            name: "berezin_covariance",
            module: BEREZIN,
            anchor: "B_n(U_w Q U_w) = B_n(Q)∘φ_w",
            tol: tail,
            run: berezin_covariance,
        },
        Check {
            name: "berezin_commutation",
            module: BEREZIN,
            anchor: "B_n B_0 = B_0 B_n",
            tol: field,
            run: berezin_commutation,
        },
        Check {
            name: "berezin_recurrence",
            module: BEREZIN,
            anchor: "B_n(S) = (1 - Δ̃/(n(n+1))) B_{n-1}(S)",
            tol: field,
            run: berezin_recurrence,
        },
        Check {
            name: "laplacian_symmetry",
            module: BEREZIN,
            anchor: "⟨Δ̃(f⊗g)h, k⟩ = ⟨Δ̃(h⊗k)f, g⟩",
            tol: exact,
            run: laplacian_symmetry,
        },
        Check {
            name: "projection_laplacian",
            module: BEREZIN,
            anchor: "Δ̃E_k = (k+1)[kE_{k-1} + (k+2)E_{k+1} - 2(k+1)E_k]",
            tol: |_| 0.0,
            run: projection_laplacian,
        },
        Check {
            name: "symbol_commutation",
            module: BEREZIN,
            anchor: "Δ̃T_a^(k) = T^(k)_{Δ̃a}",
            tol: assembled,
            run: symbol_commutation,
        },
        Check {
            name: "transform_identity",
            module: BEREZIN,
            anchor: "T_{B_n(T_μ^(k))} = T^(k)_{B_n(μ)}",
            tol: assembled,
            run: transform_identity,
        },
        Check {
            name: "integral_symmetry",
            module: BEREZIN,
            anchor: "∫|⟨U_w e_j, h⟩|²|f(w)|² dA = ∫|⟨U_w e_j, f⟩|²|h(w)|² dA",
            tol: field,
            run: integral_symmetry,
        },
        Check {
            name: "berezin_bound",
            module: BEREZIN,
            anchor: "‖B_n(Q)‖_∞ ≤ (n+1)2^n ‖Q‖",
            tol: exact,
            run: berezin_bound,
        },
        Check {
            name: "decomposition",
            module: BEREZIN,
            anchor: "T_{B_n(S)} = (n+1) Σ C(n,j)(-1)^j/(j+1) T^(j)_{B_0(S)}",
            tol: assembled,
            run: decomposition,
        },
        Check {
            name: "laplacian_expansion",
            module: BEREZIN,
            anchor: "T_a^(ℓ) = c_0 T_a + c_1 Δ̃T_a + ... + c_ℓ Δ̃^ℓ T_a",
            tol: assembled,
            run: laplacian_expansion,
        },
        Check {
            name: "diagonal_kernel_mass",
            module: CARLESON,
            anchor: "∫|⟨e_k, U_z e_k⟩|² dA = (k+1)/((2k+3)(2k+1))",
            tol: operator,
            run: kernel_mass,
        },
    ]
}

pub fn run_identities(cfg: &RunConfig) -> IdentitySummary {
    let quad = cfg.quadrature().unwrap_or_else(|_| DiskQuadrature::assembly_default());
    let mut results = Vec::new();
    for (i, check) in checks().into_iter().enumerate() {
        let mut ctx = Ctx {
            cfg,
            n: cfg.n_trunc,
            quad: quad.clone(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)),
        };
        let tol = (check.tol)(cfg);
        let (residual, status, detail) = match (check.run)(&mut ctx) {
            Ok(r) if r <= tol => (Some(r), Status::Pass, None),
            Ok(r) => (Some(r), Status::Fail, None),
            Err(Error::Precision(m)) => (None, Status::PrecisionError, Some(m)),
            Err(e) => (None, Status::Fail, Some(e.to_string())),
        };
        results.push(IdentityResult {
            name: check.name,
            module: check.module,
            anchor: check.anchor,
            residual,
            tolerance: tol,
            status,
            detail,
        });
    }
    let count = |s: Status| results.iter().filter(|r| r.status == s).count();
    let (passed, failed, precision_errors) = (count(Status::Pass), count(Status::Fail), count(Status::PrecisionError));
    IdentitySummary {
        config: cfg.clone(),
        passed,
        failed,
        precision_errors,
        all_pass: passed == results.len(),
        identities: results,
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mobius_involution(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for _ in 0..64 {
        let (z, w) = (ctx.point(0.9), ctx.point(0.9));
        let m = MobiusMap::new(z)?;
        worst = worst.max((m.eval(m.eval(w)?)? - w).norm());
        worst = worst.max((m.eval(c(0.0, 0.0))? - z).norm()).max(m.eval(z)?.norm());
    }
    Ok(worst)
}

/// `|‖U_z f‖ - ‖f‖|` for `deg f ≤ N/8` and `|z| ≤ 0.3`; the truncation tail
/// must itself be below the tail tolerance.
fn u_isometry(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let z = ctx.point(0.3);
        let f = ctx.poly(ctx.n / 8);
        let tail = u_transform_tail(z, &f, 64 * ctx.n);
        if !(tail <= TAIL_TOL) {
            return Err(Error::Precision(format!("U_z f leaks {tail:.3e} past N = {} at |z| = {:.3}", ctx.n, z.norm())));
        }
        let d = (u_transform(z, &f)?.norm() - f.norm()).abs();
        if d > tail + 1e-12 {
            return Ok(d.max(2.0 * TAIL_TOL));
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

fn u_self_adjoint(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let u = u_matrix(ctx.point(0.6), ctx.n)?;
        worst = worst.max(u.leading_block(ctx.n / 2).hermitian_defect());
    }
    Ok(worst)
}

fn rank_one_action(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let deg = ctx.n - 1;
        let (f, g, h) = (ctx.poly(deg), ctx.poly(deg), ctx.poly(deg));
        let lhs = rank_one(&f, &g)?.apply(&h)?;
        let rhs = f.scale(inner_product(&h, &g)?);
        worst = worst.max(lhs.sub(&rhs)?.norm() / (f.norm() * g.norm() * h.norm()));
    }
    Ok(worst)
}

fn reproducing_property(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for _ in 0..16 {
        let z = ctx.point(0.9);
        let f = ctx.poly(ctx.n - 1);
        let scale: f64 = f.coeffs().iter().map(|c| c.norm()).sum();
        let lhs = inner_product(&f, &reproducing_kernel(z, ctx.n)?)?;
        worst = worst.max((lhs - f.eval(z)).norm() / scale);
    }
    Ok(worst)
}

fn lebesgue_identity(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for k in 0..=5 {
        let t = ctx.toeplitz(&MeasureSpec::lebesgue(), k)?;
        worst = worst.max(t.sub(&TruncatedOperator::identity(ctx.n))?.operator_norm());
    }
    Ok(worst)
}

fn self_adjointness(ctx: &mut Ctx) -> Residual {
    let atoms = ctx.real_atoms(3, 0.7);
    let real_poly = MeasureSpec::poly(BiPolynomial::re_z().add(&BiPolynomial::abs_sq()));
    let mut worst: f64 = 0.0;
    for mu in [atoms, real_poly, MeasureSpec::Radial(RadialProfile::Power { beta: 0.5 })] {
        for k in 0..=2 {
            worst = worst.max(ctx.toeplitz(&mu, k)?.hermitian_defect());
        }
    }
    Ok(worst)
}

/// Largest negative part of the spectrum over positive test measures.
fn positivity(ctx: &mut Ctx) -> Residual {
    let atoms = ctx.real_atoms(3, 0.7);
    let mut worst: f64 = 0.0;
    for mu in [atoms, MeasureSpec::Radial(RadialProfile::Power { beta: 0.5 })] {
        for k in 0..=2 {
            let (lo, _) = ctx.toeplitz(&mu, k)?.hermitian_extremes();
            worst = worst.max(-lo);
        }
    }
    Ok(worst)
}

fn modulus_domination(ctx: &mut Ctx) -> Residual {
    let pts: Vec<(C64, C64)> = (0..4).map(|_| (ctx.point(0.7), ctx.scalar())).collect();
    let mu = MeasureSpec::atoms(&pts)?;
    let var = mu.variation()?;
    let mut worst: f64 = 0.0;
    for k in 0..=3 {
        let excess = ctx.toeplitz(&mu, k)?.operator_norm() - ctx.toeplitz(&var, k)?.operator_norm();
        worst = worst.max(excess);
    }
    Ok(worst)
}

fn recurrence_closure(ctx: &mut Ctx) -> Residual {
    let atoms = ctx.real_atoms(3, 0.6);
    let mut worst: f64 = 0.0;
    for mu in [atoms, MeasureSpec::Radial(RadialProfile::Power { beta: 0.5 })] {
        let ts: Vec<TruncatedOperator> = (0..=4).map(|k| ctx.toeplitz(&mu, k)).collect::<Result<_, _>>()?;
        let mut partial = TruncatedOperator::zeros(ctx.n);
        for k in 0..4 {
            partial = partial.add(&ts[k])?;
            let lhs = ts[k + 1].sub(&ts[k])?.scale(c(((k + 1) * (k + 2)) as f64, 0.0));
            let d = lhs.sub(&delta_tilde_op(&partial))?;
            worst = worst.max(d.leading_block(ctx.n - 2).operator_norm());
        }
    }
    Ok(worst)
}

fn harmonic_invariance(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for a in [BiPolynomial::re_z(), BiPolynomial::im_z2()] {
        let mu = MeasureSpec::poly(a);
        let t0 = ctx.toeplitz(&mu, 0)?;
        for k in 1..=4 {
            worst = worst.max(ctx.toeplitz(&mu, k)?.sub(&t0)?.operator_norm());
        }
    }
    Ok(worst)
}

fn symbol_sup_bound(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for a in [BiPolynomial::re_z(), BiPolynomial::abs_sq(), BiPolynomial::im_z2()] {
        for k in 0..=3 {
            let (norm, bound) = englis_bound_check(&MeasureSpec::poly(a.clone()), k, ctx.n)?;
            worst = worst.max(norm - bound);
        }
    }
    Ok(worst)
}

fn finite_rank(ctx: &mut Ctx, deg: usize) -> bergman_core::Result<TruncatedOperator> {
    let (f, g, h, k) = (ctx.poly(deg), ctx.poly(deg), ctx.poly(deg), ctx.poly(deg));
    rank_one(&f, &g)?.add(&rank_one(&h, &k)?)
}

fn berezin_covariance(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let q = finite_rank(ctx, 3)?;
        let w = ctx.point(0.4);
        for a in 0..q.support() {
            let t = u_transform_tail(w, &CoeffVector::basis(a, ctx.n), 64 * ctx.n);
            if !(t <= TAIL_TOL) {
                return Err(Error::Precision(format!("U_w e_{a} leaks {t:.3e} past N = {}", ctx.n)));
            }
        }
        let u = u_matrix(w, ctx.n)?;
        let conj = q.conjugate_by(&u)?;
        let m = MobiusMap::new(w)?;
        for n in 0..=2 {
            for _ in 0..3 {
                let z = ctx.point(0.4);
                let lhs = berezin_op(&q, n, m.eval(z)?)?;
                let rhs = berezin_op(&conj, n, z)?;
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    Ok(worst)
}

fn berezin_commutation(ctx: &mut Ctx) -> Residual {
    let mu = ctx.real_atoms(3, 0.5);
    let b0 = berezin_measure_symbol(&mu, 0);
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        let bn = berezin_measure_symbol(&mu, n);
        for _ in 0..4 {
            let z = ctx.point(0.6);
            let lhs = berezin_symbol(&b0, n, z)?;
            let rhs = berezin_symbol(&bn, 0, z)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

fn berezin_recurrence(ctx: &mut Ctx) -> Residual {
    let s = finite_rank(ctx, 3)?;
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let prev = berezin_poly(&s, n - 1);
        let next = prev.sub(&delta_tilde_fn(&prev).scale(c(1.0 / (n * (n + 1)) as f64, 0.0)));
        for _ in 0..6 {
            let z = ctx.point(0.95);
            worst = worst.max((berezin_op(&s, n, z)? - next.eval(z)).norm());
        }
    }
    Ok(worst)
}

fn laplacian_symmetry(ctx: &mut Ctx) -> Residual {
    let deg = 10.min(ctx.n - 3);
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let (f, g, h, k) = (ctx.poly(deg), ctx.poly(deg), ctx.poly(deg), ctx.poly(deg));
        let lhs = inner_product(&delta_tilde_op(&rank_one(&f, &g)?).apply(&h)?, &k)?;
        let rhs = inner_product(&delta_tilde_op(&rank_one(&h, &k)?).apply(&f)?, &g)?;
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
    }
    Ok(worst)
}

fn projection_laplacian(ctx: &mut Ctx) -> Residual {
    let n = ctx.n;
    let mut worst: f64 = 0.0;
    for k in 0..n - 1 {
        let d = delta_tilde_op(&TruncatedOperator::projection(k, n));
        let kf = k as f64;
        let want = |p: usize| match p {
            _ if p + 1 == k => (kf + 1.0) * kf,
            _ if p == k + 1 => (kf + 1.0) * (kf + 2.0),
            _ if p == k => -2.0 * (kf + 1.0) * (kf + 1.0),
            _ => 0.0,
        };
        let expected = TruncatedOperator::from_fn(n, |p, q| if p == q { c(want(p), 0.0) } else { c(0.0, 0.0) });
        worst = worst.max(d.sub(&expected)?.max_abs_entry());
    }
    Ok(worst)
}

fn symbol_commutation(ctx: &mut Ctx) -> Residual {
    let random = ctx.bipoly(3);
    let mut worst: f64 = 0.0;
    for a in [BiPolynomial::abs_sq(), BiPolynomial::from_terms(&[(1, 2, c(1.0, 0.0))]), random] {
        let la = MeasureSpec::poly(delta_tilde_fn(&a));
        let mu = MeasureSpec::poly(a);
        for k in 0..=3 {
            let lhs = delta_tilde_op(&ctx.toeplitz(&mu, k)?);
            let rhs = ctx.toeplitz(&la, k)?;
            worst = worst.max(lhs.sub(&rhs)?.leading_block(ctx.n - 2).operator_norm());
        }
    }
    Ok(worst)
}

fn transform_identity(ctx: &mut Ctx) -> Residual {
    let atoms = ctx.real_atoms(3, 0.5);
    let mut worst: f64 = 0.0;
    for mu in [atoms, MeasureSpec::Radial(RadialProfile::Power { beta: 0.5 })] {
        for k in 0..=2 {
            for n in 0..=2 {
                let lhs = ctx.toeplitz(&berezin_toeplitz_symbol(&mu, k, n), 0)?;
                let rhs = ctx.toeplitz(&berezin_measure_symbol(&mu, n), k)?;
                worst = worst.max(lhs.sub(&rhs)?.operator_norm());
            }
        }
    }
    Ok(worst)
}

/// `∫ |⟨U_w e_j, h⟩|² |f(w)|² dA` on the field rule.
fn kernel_integral(j: usize, h: &CoeffVector, f: &CoeffVector, q: &DiskQuadrature) -> f64 {
    let len = h.degree() + 1;
    let hc = h.basis_coords();
    q.nodes()
        .map(|(w, wt)| {
            let col = &weighted_columns(w, j, len)[j];
            let s = 1.0 - w.norm_sqr();
            let g: C64 = col.iter().zip(&hc).map(|(u, hp)| u * s * hp.conj()).sum();
            g.norm_sqr() * f.eval(w).norm_sqr() * wt
        })
        .sum()
}

fn integral_symmetry(ctx: &mut Ctx) -> Residual {
    let q = DiskQuadrature::field_default();
    let mut worst: f64 = 0.0;
    for j in 0..=3 {
        let (f, h) = (ctx.poly(4), ctx.poly(4));
        let lhs = kernel_integral(j, &h, &f, &q);
        let rhs = kernel_integral(j, &f, &h, &q);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

fn berezin_bound(ctx: &mut Ctx) -> Residual {
    let grid = HyperbolicGrid::new(ctx.cfg.grid_rmax, 12, 16)?;
    let mut worst: f64 = 0.0;
    for _ in 0..2 {
        let q = finite_rank(ctx, 4)?;
        let norm = q.operator_norm();
        for n in 0..=3 {
            let bound = (n + 1) as f64 * 2f64.powi(n as i32) * norm;
            let sup = grid.sup(|z| berezin_op(&q, n, z).map(|v| v.norm()))?;
            worst = worst.max(sup - bound);
        }
    }
    Ok(worst)
}

fn decomposition(ctx: &mut Ctx) -> Residual {
    let n = ctx.n;
    let e0 = CoeffVector::basis(0, n);
    let e1 = CoeffVector::basis(1, n);
    let ops = [TruncatedOperator::projection(0, n), TruncatedOperator::projection(1, n), rank_one(&e0, &e1)?];
    let mut worst: f64 = 0.0;
    for s in &ops {
        for order in 0..=4 {
            let (lhs, rhs) = decompose_t_bn(s, order, n)?;
            worst = worst.max(lhs.sub(&rhs)?.operator_norm());
        }
    }
    Ok(worst)
}

fn laplacian_expansion(ctx: &mut Ctx) -> Residual {
    let a = MeasureSpec::poly(ctx.bipoly(2));
    let t0 = ctx.toeplitz(&a, 0)?;
    let mut powers = vec![t0];
    for _ in 0..3 {
        let next = delta_tilde_op(powers.last().expect("nonempty"));
        powers.push(next);
    }
    let mut worst: f64 = 0.0;
    for l in 1..=3 {
        let coeffs = lincom_coefficients(l);
        let mut sum = TruncatedOperator::zeros(ctx.n);
        for (p, ci) in powers.iter().zip(&coeffs) {
            sum = sum.add(&p.scale(c(ci.to_f64().unwrap_or(f64::NAN), 0.0)))?;
        }
        let tl = ctx.toeplitz(&a, l)?;
        worst = worst.max(tl.sub(&sum)?.leading_block(ctx.n / 2).operator_norm());
    }
    Ok(worst)
}

fn kernel_mass(ctx: &mut Ctx) -> Residual {
    let mut worst: f64 = 0.0;
    for k in 0..=10 {
        let kf = k as f64;
        let want = (kf + 1.0) / ((2.0 * kf + 3.0) * (2.0 * kf + 1.0));
        worst = worst.max((diagonal_kernel_mass(k, &ctx.quad) - want).abs());
    }
    Ok(worst)
}
