//! Certified numerical radius enclosures for matrix C*-algebras and
//! randomized verification of numerical-radius and Buzano-type inequalities.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bounds;
pub mod buzano;
pub mod error;
pub mod harness;
pub mod radius;
pub mod states;

pub use algebra::{AlgebraElement, Matrix, Spectrum, C64};
pub use error::{Error, Result};
pub use states::{ModuleElement, State};
