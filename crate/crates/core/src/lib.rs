// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod asymptotic;
pub mod error;
pub mod fullsolver;
pub mod geometry;
pub mod numerics;
pub mod par;

pub use error::{Error, Result};
