//! Exact arithmetic: quadratic fields, real algebraic numbers, polynomials,
//! dense matrices and rational interval arithmetic.

pub mod algebraic;
pub mod interval;
pub mod matrix;
pub mod poly;
pub mod quad;
pub mod upoly;

pub use algebraic::{eval_at_algebraic, AlgebraicReal, NfElem, NumberField};
pub use interval::Interval;
pub use matrix::{Matrix, PsdVerdict};
pub use poly::Poly;
pub use quad::QuadExt;
pub use upoly::{RootInterval, UPoly};
