//! Numerics for the weighted Bergman space `A^2_1` of the unit disk: exact and
//! floating coefficient series, the composition operators `T_k`, the
//! fractional-part family `s_k`, and least-squares distances from `beta = 1/(1-z)`
//! to `span{s_2, ..., s_N}`.

pub mod arith;
pub mod cli;
pub mod distance;
pub mod error;
pub mod family;
pub mod operators;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Mode, QComplex, QRat, Real, Value};
pub use series::{CoeffSeries, Coeffs, TailCertificate};
