//! Numerical toolkit for the geometric side of the trace formula on Hilbert
//! modular groups over real quadratic (and more general totally real) fields.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod cli;
pub mod error;
pub mod field;
pub mod lattice;
pub mod modgroup;
pub mod quad;
pub mod serial;
pub mod specfun;
pub mod trace;
pub mod transforms;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
