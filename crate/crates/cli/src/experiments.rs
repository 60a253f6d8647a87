//! Growth of `Δ̃^ℓ E_j`, the symbols `a_j = (j+1)^{-2k} B_n(E_j)` that defeat a
//! bound of `‖T_a^(k)‖` by lower powers of `Δ̃`, and convergence sweeps.

use bergman_core::berezin::{berezin_projection_toeplitz_diag, berezin_symbol, berezin_toeplitz_symbol, delta_tilde_diag};
use bergman_core::toeplitz::{assemble_toeplitz, ToeplitzRequest};
use bergman_core::{Error, HyperbolicGrid, MeasureSpec, RadialProfile, TruncatedOperator, C64};
use serde::Serialize;

use crate::{BerezinOrder, HarnessError, RunConfig};

/// Exact diagonal of `Δ̃^ℓ E_j` on indices `0..len`.
///
/// `Δ̃` maps a diagonal `d` to `(p+1)[(p+2) d_{p+1} + p d_{p-1} - 2(p+1) d_p]`,
/// which is integral.
pub fn delta_tilde_power_projection(j: usize, l: usize, len: usize) -> Result<Vec<i128>, HarnessError> {
    if j + l >= len {
        return Err(HarnessError::Config(format!("Δ̃^{l} E_{j} needs {} indices, band has {len}", j + l + 1)));
    }
    let mut d = vec![0i128; len];
    d[j] = 1;
    for _ in 0..l {
        let prev = d.clone();
        for p in 0..len {
            let pi = p as i128;
            let up = if p + 1 < len { prev[p + 1] } else { 0 };
            let down = if p > 0 { prev[p - 1] } else { 0 };
            let v = (pi + 1)
                .checked_mul((pi + 2) * up + pi * down - 2 * (pi + 1) * prev[p])
                .ok_or_else(|| HarnessError::Failure(format!("Δ̃^{l} E_{j} overflows 128-bit integers")))?;
            d[p] = v;
        }
    }
    Ok(d)
}

/// `‖Δ̃^ℓ E_j‖`, exact up to the final conversion.
pub fn delta_tilde_power_norm(j: usize, l: usize, band: usize) -> Result<f64, HarnessError> {
    Ok(delta_tilde_power_projection(j, l, band)?.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as f64)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthFit {
    pub l: usize,
    pub j_min: usize,
    pub j_max: usize,
    pub slope: f64,
}

/// Slope of `log ‖Δ̃^ℓ E_j‖` against `log(j+1)` over `j_min..=j_max`, computed
/// on a band of `band` indices.
pub fn growth_fit(l: usize, j_min: usize, j_max: usize, band: usize) -> Result<GrowthFit, HarnessError> {
    let js: Vec<usize> = (j_min..=j_max).collect();
    let x: Vec<f64> = js.iter().map(|&j| (j + 1) as f64).collect();
    let y: Vec<f64> = js.iter().map(|&j| delta_tilde_power_norm(j, l, band)).collect::<Result<_, _>>()?;
    Ok(GrowthFit { l, j_min, j_max, slope: loglog_slope(&x, &y) })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolRow {
    pub j: usize,
    pub n: usize,
    /// `‖Δ̃^ℓ T_{a_j}‖` for `ℓ = 0..=k`.
    pub norms: Vec<f64>,
    /// `‖Δ̃^k T_{a_j}‖ / Σ_{ℓ<k} ‖Δ̃^ℓ T_{a_j}‖`.
    pub ratio: f64,
    /// `‖T_{B_n(E_j)} - E_j‖`.
    pub distance_to_projection: f64,
}

/// `‖Δ̃^ℓ T_{a_j}‖`, `ℓ ≤ k`, with `T_{a_j}` computed on `len` indices.
fn symbol_norms(j: usize, k: usize, n: usize, len: usize) -> (Vec<f64>, f64) {
    let scale = ((j + 1) as f64).powi(-2 * k as i32);
    let d = berezin_projection_toeplitz_diag(j, n, len);
    let dist = d
        .iter()
        .enumerate()
        .map(|(p, v)| (v - if p == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let mut cur: Vec<f64> = d.iter().map(|v| v * scale).collect();
    let mut norms = Vec::with_capacity(k + 1);
    for l in 0..=k {
        if l > 0 {
            cur = delta_tilde_diag(&cur);
        }
        // entries at p ≥ len - l see the truncation
        norms.push(cur[..len - l].iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    (norms, dist)
}

pub fn symbol_row(j: usize, k: usize, order: BerezinOrder, len: usize) -> Result<SymbolRow, HarnessError> {
    if j + k + 2 > len {
        return Err(HarnessError::Config(format!("j = {j}, k = {k} need N ≥ {}, got {len}", j + k + 2)));
    }
    let n = order.for_index(j);
    let (norms, dist) = symbol_norms(j, k, n, len);
    let (check, _) = symbol_norms(j, k, n, 2 * len);
    for (a, b) in norms.iter().zip(&check) {
        if (a - b).abs() > 1e-6 * b.abs().max(f64::MIN_POSITIVE) {
            return Err(HarnessError::Failure(format!(
                "precision error: T_(a_{j}) is not resolved at N = {len} (n = {n})"
            )));
        }
    }
    let lower: f64 = norms[..k].iter().sum();
    Ok(SymbolRow { j, n, ratio: norms[k] / lower, norms, distance_to_projection: dist })
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub k: usize,
    pub n_berezin: BerezinOrder,
    pub n_trunc: usize,
    pub band: usize,
    pub growth: Vec<GrowthFit>,
    pub symbols: Vec<SymbolRow>,
}

impl Counterexample {
    pub fn growth_csv(&self) -> String {
        let mut out = String::from("l,j_min,j_max,slope\n");
        for g in &self.growth {
            out.push_str(&format!("{},{},{},{:e}\n", g.l, g.j_min, g.j_max, g.slope));
        }
        out
    }

    pub fn symbols_csv(&self) -> String {
        let mut out = String::from("j,n");
        for l in 0..=self.k {
            out.push_str(&format!(",norm_l{l}"));
        }
        out.push_str(",ratio,distance_to_projection\n");
        for r in &self.symbols {
            out.push_str(&format!("{},{}", r.j, r.n));
            for v in &r.norms {
                out.push_str(&format!(",{v:e}"));
            }
            out.push_str(&format!(",{:e},{:e}\n", r.ratio, r.distance_to_projection));
        }
        out
    }
}

/// Band used for the exact growth computation.
pub const GROWTH_BAND: usize = 512;

pub fn counterexample5(cfg: &RunConfig, k: usize, j_list: &[usize]) -> Result<Counterexample, HarnessError> {
    if k == 0 {
        return Err(HarnessError::Config("k must be at least 1".into()));
    }
    let growth = (1..=k.max(1)).map(|l| growth_fit(l, 32, 256, GROWTH_BAND)).collect::<Result<_, _>>()?;
    let symbols = j_list.iter().map(|&j| symbol_row(j, k, cfg.n_berezin, cfg.n_trunc)).collect::<Result<_, _>>()?;
    Ok(Counterexample { k, n_berezin: cfg.n_berezin, n_trunc: cfg.n_trunc, band: GROWTH_BAND, growth, symbols })
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub label: String,
    /// `(n, error)` pairs.
    pub errors: Vec<(usize, f64)>,
    pub slack: f64,
    pub non_increasing: bool,
}

impl Sweep {
    fn new(label: String, errors: Vec<(usize, f64)>, slack: f64) -> Self {
        let non_increasing = errors.windows(2).all(|w| w[1].1 <= w[0].1 + slack);
        Self { label, errors, slack, non_increasing }
    }
}

/// `a(z) = |z|` as a radial symbol.
pub fn modulus_symbol() -> MeasureSpec {
    MeasureSpec::Radial(RadialProfile::Custom {
        name: "|z|".into(),
        f: std::sync::Arc::new(f64::sqrt),
        sup: 1.0,
        nonneg: true,
        breakpoints: Vec::new(),
    })
}

/// `sup |B_n(a) - a|` over the grid for a radial symbol; radial fields are
/// evaluated once per shell.
pub fn radial_symbol_sweep(a: &MeasureSpec, profile: impl Fn(f64) -> f64, grid: &HyperbolicGrid, orders: &[usize]) -> Result<Sweep, Error> {
    let mut radii = vec![0.0];
    radii.extend_from_slice(grid.radii());
    let mut errors = Vec::with_capacity(orders.len());
    for &n in orders {
        let mut worst: f64 = 0.0;
        for &r in &radii {
            let v = berezin_symbol(a, n, C64::new(r, 0.0))?;
            worst = worst.max((v - profile(r)).norm());
        }
        errors.push((n, worst));
    }
    Ok(Sweep::new("sup |B_n(|z|) - |z||".into(), errors, 0.0))
}

/// `‖T_{B_n(T_μ^(k))} - T_μ^(k)‖` for `n` in `orders`.
pub fn toeplitz_sweep(mu: &MeasureSpec, k: usize, big_n: usize, orders: &[usize], slack: f64) -> Result<Sweep, Error> {
    let t = assemble_toeplitz(&ToeplitzRequest::new(mu.clone(), k, big_n))?;
    let mut errors = Vec::with_capacity(orders.len());
    for &n in orders {
        let tb: TruncatedOperator = assemble_toeplitz(&ToeplitzRequest::new(berezin_toeplitz_symbol(mu, k, n), 0, big_n))?;
        errors.push((n, tb.sub(&t)?.operator_norm()));
    }
    Ok(Sweep::new(format!("‖T_(B_n(T^({k}) μ)) - T^({k}) μ‖"), errors, slack))
}

/// Atomic measure used by the approximation sweeps.
pub fn test_atoms() -> MeasureSpec {
    MeasureSpec::atoms(&[
        (C64::new(0.3, 0.1), C64::new(1.0, 0.0)),
        (C64::new(-0.2, 0.4), C64::new(0.5, 0.0)),
        (C64::new(0.0, -0.45), C64::new(0.75, 0.0)),
    ])
    .expect("atoms inside the disk")
}

#[derive(Debug, Clone, Serialize)]
pub struct Approximation {
    pub sweeps: Vec<Sweep>,
    pub all_non_increasing: bool,
}

pub fn approximation(cfg: &RunConfig) -> Result<Approximation, HarnessError> {
    let grid = cfg.grid()?;
    let mut sweeps = Vec::new();
    let orders: Vec<usize> = (1..=50).collect();
    sweeps.push(radial_symbol_sweep(&modulus_symbol(), |r| r, &grid, &orders)?);
    let orders: Vec<usize> = (1..=20).collect();
    let radial = MeasureSpec::Radial(RadialProfile::Power { beta: 0.5 });
    for mu in [test_atoms(), radial] {
        for k in 0..=2 {
            let mut s = toeplitz_sweep(&mu, k, cfg.n_trunc, &orders, cfg.tol.field)?;
            s.label = format!("{} for {}", s.label, mu.descriptor());
            sweeps.push(s);
        }
    }
    let all = sweeps.iter().all(|s| s.non_increasing);
    Ok(Approximation { sweeps, all_non_increasing: all })
}

impl Approximation {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep,n,error\n");
        for (i, s) in self.sweeps.iter().enumerate() {
            for (n, e) in &s.errors {
                out.push_str(&format!("{i},{n},{e:e}\n"));
            }
        }
        out
    }
}
