//! Exact computer algebra for the quantum integrable structures attached to
//! Hilbert schemes of points: multivariate rational-function arithmetic,
//! Young-diagram combinatorics, boson and fermion Fock spaces, Jack
//! polynomials, rational `gl(N)` R-matrices with fusion, stable envelopes for
//! `T*P^n`, and the expansion of the vacuum matrix element `T(u)` into
//! cut-and-join operators.
//!
//! Everything is computed over exact arbitrary-precision rationals; there is
//! no floating-point mode. The polynomial layer is generic over the scalar
//! type via [`scalar::Scalar`]; the concrete aliases used by the higher
//! modules are fixed at the crate root.

pub mod error;
pub mod fermion;
pub mod fock;
pub mod instanton;
pub mod jack;
pub mod linalg;
pub mod partition;
pub mod ring;
pub mod rmat;
pub mod scalar;
pub mod verify;

pub use error::Error;

/// The concrete coefficient field: arbitrary-precision rationals.
pub type Coef = num::BigRational;
/// Multivariate polynomial over [`Coef`].
pub type Poly = ring::MultiPoly<Coef>;
/// Rational function over [`Coef`] in canonical reduced form.
pub type Rat = ring::RatFunc<Coef>;
/// Dense exact matrix with [`Rat`] entries.
pub type Mat = linalg::Matrix<Coef>;

/// Shorthand used throughout tests and the CLI: parse an expression in the
/// variables `t1 t2 u u1..u6 v c` into a canonical rational function.
pub fn rat(src: &str) -> Rat {
    ring::parse::parse_rat(src).expect("invalid rational-function literal")
}

/// Integer-valued rational constant.
pub fn qi(n: i64) -> Coef {
    use num::FromPrimitive;
    Coef::from_i64(n).unwrap()
}
