pub mod certificates;
pub mod exactmath;
pub mod flags;
pub mod graphs;
pub mod objectives;
pub mod patterns;
pub mod scalar;
pub mod sdp;
pub mod search;

pub use exactmath::{AlgebraicReal, Interval, Matrix, NfElem, NumberField, Poly, PsdVerdict, QuadExt, UPoly};
pub use graphs::{DenseGraph, Graph, HereditaryFamily};
pub use scalar::{Field, OrderedField, Rational, Scalar};
