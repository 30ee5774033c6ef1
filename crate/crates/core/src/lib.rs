//! Half-period integrals of `dz / sqrt(z (z - 1) (z - t))`, the rotating
//! period triangle, asymptotic trace coordinates on the Fricke cubic and the
//! winding of the induced loop in the nerve of the divisor at infinity.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod error;
pub mod logcomplex;
pub mod nerve;
pub mod periods;
pub mod pipeline;
pub mod quadrature;
pub mod rotation;
pub mod traces;

pub use error::{Error, Result};
