//! Exact evaluation of exponential sums
//!
//! ```text
//! Z(N, f) = Σ_{x ∈ Z_N^n} e^{2πi f(x) / N}
//! ```
//!
//! for quadratic `f` and arbitrary (unfactored) `N`, together with
//! brute-force oracles and executable tractability tests for the
//! partition functions `Z_A(G)` that such sums encode.
//!
//! Exact quantities (moduli, coefficients, values of `Z`) live on
//! arbitrary-precision integers and [`SymbolicValue`]. Everything that is
//! inherently approximate (oracle sums, inner products of rows of roots of
//! unity, `B^{[p]}` matrices) is generic over a [`Real`] scalar, with
//! `f64` aliases below for the common case.

pub mod cyclovalue;
pub mod dichotomy;
pub mod gauss;
pub mod ntheory;
pub mod num;
pub mod oracle;
pub mod polyring;
pub mod solver;

pub use cyclovalue::{Approx, SymbolicValue, ValueEquality};
pub use dichotomy::{ExponentMatrix, HardnessVerdict, Outcome};
pub use num::Real;
pub use oracle::CountVector;
pub use polyring::{Hypergraph, Multigraph, QuadraticPoly, SparsePoly};
pub use solver::z_eval;

/// Double-precision complex number.
pub type Complex64 = num_complex::Complex<f64>;
/// Single-precision complex number.
pub type Complex32 = num_complex::Complex<f32>;

/// Dense real matrix, row-major.
pub type RealMatrix<T> = Vec<Vec<T>>;
/// Dense complex matrix, row-major.
pub type ComplexMatrix<T> = Vec<Vec<num_complex::Complex<T>>>;

/// Dense real matrix over `f64`.
pub type RealMatrix64 = RealMatrix<f64>;
/// Dense complex matrix over `f64`.
pub type ComplexMatrix64 = ComplexMatrix<f64>;
