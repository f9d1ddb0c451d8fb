//! Exact variational Poisson calculus over the rationals.
//!
//! The crate is organised bottom-up:
//!
//! * [`diffpoly`]: the ring of differential polynomials in `u_i^(n)`, the total
//!   derivative, partial / variational / Frechet derivatives, evolutionary vector
//!   fields and the quotient `V / ∂V` of local functionals.
//! * [`matop`]: matrix differential operators with left coefficients.
//! * [`polyvec`]: variational polyvector fields (skewsymmetric λ-arrays), the box
//!   product, the Schouten bracket and its specialised forms.
//! * [`hamcoh`]: Hamiltonian checks, the `δ_K` complex, Casimirs, exact cohomology
//!   dimensions for constant coefficient operators, the `K`-inner product and the
//!   essential-closedness test.
//! * [`superlie`]: Grassmann algebras, `W(n)`, `H̃(n,S)`, `so(n,S)` and prolongations.
//! * [`magri`]: the Lenard–Magri recursion.
//! * [`expr`]: the text grammar for differential polynomials, operators and λ-arrays.
//!
//! All arithmetic is exact; there is no floating point anywhere in the crate.

pub mod diffpoly;
pub mod error;
pub mod expr;
pub mod hamcoh;
pub mod linalg;
pub mod magri;
pub mod matop;
pub mod polyvec;
pub mod rational;
pub mod superlie;

pub use diffpoly::{DiffMonomial, DiffPoly, DiffRing, DiffVar, LocalFunctional};
pub use error::{Error, Result};
pub use linalg::QMatrix;
pub use matop::{MatDiffOp, OpPoly};
pub use polyvec::{LambdaPoly, PolyVector};
pub use rational::Rational;
