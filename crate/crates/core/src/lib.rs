// Comparisons are negated on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod kernel;
pub mod par;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{AnnulusParams, AnnulusPoint};
