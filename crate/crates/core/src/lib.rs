//! Finite map-graded linear categories over the rationals, with exact
//! computations of nerves, covers, descent, bimodules, Hochschild complexes
//! and Grothendieck constructions.

pub mod fincat;
pub mod groth;
pub mod hochschild;
pub mod bimod;
pub mod mapgraded;
pub mod qlinalg;
pub mod random;
pub mod scalar;

pub use scalar::Scalar;

/// Rational numbers, the default coefficient field.
pub type Q = num_rational::BigRational;
pub type QMatrix = qlinalg::Matrix<Q>;
