//! Symbol measures `μ` for the generalized Toeplitz operators.
//!
//! Three shapes are supported: bounded densities `a(z) dA`, radial densities
//! `ρ(|z|²) dA`, and finite atomic measures `Σ m_i δ_{v_i}`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::bipoly::BiPolynomial;
use crate::error::{Error, Result};
use crate::quadrature::sqrt_endpoint_rule;
use crate::C64;

/// Largest admissible atom modulus.
pub const MAX_ATOM_RADIUS: f64 = 0.999;

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SymbolFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: C64,
    pub mass: C64,
}

impl Atom {
    pub fn new(point: C64, mass: C64) -> Self {
        Self { point, mass }
    }
}

/// A radial profile `ρ(x)`, `x = |z|²`.
#[derive(Clone)]
pub enum RadialProfile {
    Constant { c: f64 },
    /// `(1 - |z|²)^β`, `β > -1`.
    Power { beta: f64 },
    /// `|z|^{2m}`.
    Monomial { m: u32 },
    /// Indicator of `|z| ≤ r`.
    Indicator { r: f64 },
    /// `Σ c_i x^i`.
    Polynomial { coeffs: Vec<f64> },
    /// A bounded profile given by a closure. `sup` bounds `|ρ|`; `nonneg`
    /// certifies `ρ ≥ 0`; `breakpoints` lists interior points in `x` where
    /// `ρ` is not smooth.
    Custom { name: String, f: RadialFn, sup: f64, nonneg: bool, breakpoints: Vec<f64> },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

impl RadialProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RadialProfile::Constant { c } => *c,
            RadialProfile::Power { beta } => (1.0 - x).powf(*beta),
            RadialProfile::Monomial { m } => x.powi(*m as i32),
            RadialProfile::Indicator { r } => {
                if x <= r * r {
                    1.0
                } else {
                    0.0
                }
            }
            RadialProfile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            RadialProfile::Custom { f, .. } => f(x),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::Indicator { r } => vec![r * r],
            RadialProfile::Custom { breakpoints, .. } => breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    /// Polynomial degree in `x` when the profile is polynomial.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            RadialProfile::Constant { .. } => Some(0),
            RadialProfile::Monomial { m } => Some(*m as usize),
            RadialProfile::Polynomial { coeffs } => Some(coeffs.len().saturating_sub(1)),
            RadialProfile::Power { beta } if beta.fract() == 0.0 && *beta >= 0.0 => Some(*beta as usize),
            RadialProfile::Indicator { .. } => Some(0),
            _ => None,
        }
    }

    /// One-dimensional rule in `x` with `m` nodes per smooth piece.
    pub fn x_rule(&self, m: usize) -> Vec<(f64, f64)> {
        sqrt_endpoint_rule(m, &self.breakpoints())
    }

    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            RadialProfile::Constant { c } => Some(c.abs()),
            RadialProfile::Power { beta } => (*beta >= 0.0).then_some(1.0),
            RadialProfile::Monomial { .. } | RadialProfile::Indicator { .. } => Some(1.0),
            RadialProfile::Polynomial { coeffs } => {
                Some((0..=2000).map(|i| self.eval(i as f64 / 2000.0).abs()).fold(0.0, f64::max)
                    .max(coeffs.first().map_or(0.0, |c| c.abs())))
            }
            RadialProfile::Custom { sup, .. } => Some(*sup),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            RadialProfile::Constant { c } => *c >= 0.0,
            RadialProfile::Power { .. } | RadialProfile::Monomial { .. } | RadialProfile::Indicator { .. } => true,
            RadialProfile::Polynomial { .. } => false,
            RadialProfile::Custom { nonneg, .. } => *nonneg,
        }
    }

    pub fn descriptor(&self) -> Value {
        match self {
            RadialProfile::Constant { c } => json!({"variant": "radial", "family": "constant", "c": c}),
            RadialProfile::Power { beta } => json!({"variant": "radial", "family": "power", "beta": beta}),
            RadialProfile::Monomial { m } => json!({"variant": "radial", "family": "monomial", "m": m}),
            RadialProfile::Indicator { r } => json!({"variant": "radial", "family": "indicator", "r": r}),
            RadialProfile::Polynomial { coeffs } => {
                json!({"variant": "radial", "family": "polynomial", "coeffs": coeffs})
            }
            RadialProfile::Custom { name, .. } => json!({"variant": "radial", "family": "custom", "name": name}),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::Constant { c } if !c.is_finite() => Err(Error::domain("constant profile is not finite")),
            RadialProfile::Power { beta } if !(*beta > -1.0) || !beta.is_finite() => {
                Err(Error::domain(format!("power profile needs β > -1, got {beta}")))
            }
            RadialProfile::Indicator { r } if !(*r > 0.0 && *r <= 1.0) => {
                Err(Error::domain(format!("indicator radius must lie in (0, 1], got {r}")))
            }
            RadialProfile::Polynomial { coeffs } if coeffs.iter().any(|c| !c.is_finite()) => {
                Err(Error::domain("polynomial profile has non-finite coefficients"))
            }
            _ => Ok(()),
        }
    }
}

/// A bounded density `a(z)` against `dA`.
#[derive(Clone)]
pub enum Density {
    Poly(BiPolynomial),
    Custom { name: String, f: SymbolFn, sup: f64, nonneg: bool },
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

impl Density {
    pub fn custom(name: impl Into<String>, sup: f64, nonneg: bool, f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        Density::Custom { name: name.into(), f: Arc::new(f), sup, nonneg }
    }

    pub fn eval(&self, z: C64) -> C64 {
        match self {
            Density::Poly(p) => p.eval(z),
            Density::Custom { f, .. } => f(z),
        }
    }

    /// `sup |a|` over the closed disk (sampled for polynomials, which are
    /// continuous up to the boundary).
    pub fn sup_bound(&self) -> f64 {
        match self {
            Density::Poly(p) => p.sup_on_closed_disk(),
            Density::Custom { sup, .. } => *sup,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        matches!(self, Density::Custom { nonneg: true, .. })
    }

    pub fn descriptor(&self) -> Value {
        match self {
            Density::Poly(p) => json!({"variant": "density", "family": "bipolynomial", "terms": p.terms_descriptor()}),
            Density::Custom { name, .. } => json!({"variant": "density", "family": "custom", "name": name}),
        }
    }
}

#[derive(Clone, Debug)]
pub enum MeasureSpec {
    Density(Density),
    Radial(RadialProfile),
    Atomic(Vec<Atom>),
}

impl MeasureSpec {
    /// Normalized area measure `dA`.
    pub fn lebesgue() -> Self {
        MeasureSpec::Radial(RadialProfile::Constant { c: 1.0 })
    }

    pub fn atoms(points: &[(C64, C64)]) -> Result<Self> {
        let m = MeasureSpec::Atomic(points.iter().map(|&(p, m)| Atom::new(p, m)).collect());
        m.validate()?;
        Ok(m)
    }

    pub fn poly(p: BiPolynomial) -> Self {
        MeasureSpec::Density(Density::Poly(p))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::Atomic(atoms) => {
                for (i, a) in atoms.iter().enumerate() {
                    if !(a.point.norm() <= MAX_ATOM_RADIUS) {
                        return Err(Error::domain(format!(
                            "atom {i} at |v| = {} lies outside |v| ≤ {MAX_ATOM_RADIUS}",
                            a.point.norm()
                        )));
                    }
                    if !a.mass.re.is_finite() || !a.mass.im.is_finite() {
                        return Err(Error::domain(format!("atom {i} has non-finite mass")));
                    }
                }
                Ok(())
            }
            MeasureSpec::Radial(p) => p.validate(),
            MeasureSpec::Density(_) => Ok(()),
        }
    }

    /// Certified nonnegativity.
    pub fn is_positive(&self) -> bool {
        match self {
            MeasureSpec::Atomic(atoms) => atoms.iter().all(|a| a.mass.im == 0.0 && a.mass.re >= 0.0),
            MeasureSpec::Radial(p) => p.is_nonnegative(),
            MeasureSpec::Density(d) => d.is_nonnegative(),
        }
    }

    /// Whether the measure is real-valued (its Toeplitz operators are self-adjoint).
    pub fn is_real(&self) -> bool {
        match self {
            MeasureSpec::Atomic(atoms) => atoms.iter().all(|a| a.mass.im == 0.0),
            MeasureSpec::Radial(_) => true,
            MeasureSpec::Density(Density::Poly(p)) => p.is_real_valued(),
            MeasureSpec::Density(Density::Custom { nonneg, .. }) => *nonneg,
        }
    }

    /// The variation `|μ|` for atomic measures.
    pub fn variation(&self) -> Result<Self> {
        match self {
            MeasureSpec::Atomic(atoms) => Ok(MeasureSpec::Atomic(
                atoms.iter().map(|a| Atom::new(a.point, C64::new(a.mass.norm(), 0.0))).collect(),
            )),
            MeasureSpec::Radial(p) if p.is_nonnegative() => Ok(self.clone()),
            MeasureSpec::Radial(p) => {
                let q = p.clone();
                let sup = p.sup_bound().unwrap_or(f64::INFINITY);
                Ok(MeasureSpec::Radial(RadialProfile::Custom {
                    name: "variation".into(),
                    f: Arc::new(move |x| q.eval(x).abs()),
                    sup,
                    nonneg: true,
                    breakpoints: p.breakpoints(),
                }))
            }
            MeasureSpec::Density(d) => {
                let d2 = d.clone();
                Ok(MeasureSpec::Density(Density::custom("variation", d.sup_bound(), true, move |z| {
                    C64::new(d2.eval(z).norm(), 0.0)
                })))
            }
        }
    }

    pub fn descriptor(&self) -> Value {
        match self {
            MeasureSpec::Density(d) => d.descriptor(),
            MeasureSpec::Radial(p) => p.descriptor(),
            MeasureSpec::Atomic(atoms) => json!({
                "variant": "atomic",
                "atoms": atoms.iter().map(|a| [a.point.re, a.point.im, a.mass.re, a.mass.im]).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses the TOML measure description.
    ///
    /// ```toml
    /// variant = "radial"
    /// family = "power"      # constant | power | monomial | indicator
    /// beta = 0.5
    /// ```
    ///
    /// ```toml
    /// variant = "atomic"
    /// atoms = [[0.3, 0.0, 1.0, 0.0]]   # re, im, mass_re, mass_im
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            field: "<document>".into(),
            message: e.message().to_string(),
        })?;
        let variant = str_field(&table, "variant")?;
        let mu = match variant.as_str() {
            "radial" => {
                let family = str_field(&table, "family")?;
                let profile = match family.as_str() {
                    "constant" => RadialProfile::Constant { c: num_field(&table, "c")? },
                    "power" => RadialProfile::Power { beta: num_field(&table, "beta")? },
                    "monomial" => {
                        let m = num_field(&table, "m")?;
                        if m < 0.0 || m.fract() != 0.0 || m > 512.0 {
                            return Err(parse_err("m", "must be an integer in 0..=512"));
                        }
                        RadialProfile::Monomial { m: m as u32 }
                    }
                    "indicator" => RadialProfile::Indicator { r: num_field(&table, "r")? },
                    other => return Err(parse_err("family", &format!("unknown family `{other}`"))),
                };
                let field = match family.as_str() {
                    "constant" => "c",
                    "power" => "beta",
                    "monomial" => "m",
                    _ => "r",
                };
                profile.validate().map_err(|e| parse_err(field, &e.to_string()))?;
                MeasureSpec::Radial(profile)
            }
            "atomic" => {
                let rows = table
                    .get("atoms")
                    .ok_or_else(|| parse_err("atoms", "missing"))?
                    .as_array()
                    .ok_or_else(|| parse_err("atoms", "expected an array of rows"))?;
                let mut atoms = Vec::with_capacity(rows.len());
                for (i, row) in rows.iter().enumerate() {
                    let field = format!("atoms[{i}]");
                    let vals = row.as_array().ok_or_else(|| parse_err(&field, "expected a row"))?;
                    if vals.len() != 4 {
                        return Err(parse_err(&field, "expected [re, im, mass_re, mass_im]"));
                    }
                    let nums: Vec<f64> = vals
                        .iter()
                        .map(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
                        .collect::<Option<_>>()
                        .ok_or_else(|| parse_err(&field, "entries must be numbers"))?;
                    let atom = Atom::new(C64::new(nums[0], nums[1]), C64::new(nums[2], nums[3]));
                    if !(atom.point.norm() <= MAX_ATOM_RADIUS) {
                        return Err(parse_err(&field, &format!("|v| = {} exceeds {MAX_ATOM_RADIUS}", atom.point.norm())));
                    }
                    atoms.push(atom);
                }
                MeasureSpec::Atomic(atoms)
            }
            other => return Err(parse_err("variant", &format!("unknown variant `{other}`"))),
        };
        Ok(mu)
    }
}

fn parse_err(field: &str, msg: &str) -> Error {
    Error::Parse { field: field.to_string(), message: msg.to_string() }
}

fn str_field(t: &toml::Table, key: &str) -> Result<String> {
    t.get(key)
        .ok_or_else(|| parse_err(key, "missing"))?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| parse_err(key, "expected a string"))
}

fn num_field(t: &toml::Table, key: &str) -> Result<f64> {
    let v = t.get(key).ok_or_else(|| parse_err(key, "missing"))?;
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| parse_err(key, "expected a number"))
}
