//! Operator calculus on the Bergman space of the unit disk, realized on
//! truncated matrices in the orthonormal basis `e_k = sqrt(k+1) w^k`.
//!
//! The crate is organized bottom-up:
//!
//! - [`bergman`]: coefficient vectors, Möbius involutions, the unitaries
//!   `U_z`, rank-one operators and reproducing kernels.
//! - [`operator`]: the [`TruncatedOperator`] matrix carrier and its norms.
//! - [`quadrature`] and [`measure`]: disk quadrature rules and the symbol
//!   measures they integrate.
//! - [`bipoly`]: exact polynomial symbols in `z`, `z̄` and the invariant
//!   Laplacian acting on them.
//! - [`toeplitz`]: assembly of the generalized Toeplitz operators
//!   `T_μ^(k) = ∫ U_z E_k U_z dμ̃(z)`.
//! - [`berezin`]: n-Berezin transforms of operators, measures and symbols,
//!   the invariant Laplacian on operators and the associated identities.
//! - [`carleson`]: pseudo-hyperbolic geometry and Carleson diagnostics.

pub mod berezin;
pub mod bergman;
pub mod bipoly;
pub mod carleson;
pub mod error;
pub mod grid;
pub mod measure;
pub mod operator;
pub mod quadrature;
pub mod toeplitz;

pub use num_complex::Complex64 as C64;

pub use bergman::{CoeffVector, MobiusMap};
pub use bipoly::{BiPolynomial, RadialPoly};
pub use error::{Error, Result};
pub use grid::HyperbolicGrid;
pub use measure::{Atom, Density, MeasureSpec, RadialProfile};
pub use operator::TruncatedOperator;
pub use quadrature::DiskQuadrature;
