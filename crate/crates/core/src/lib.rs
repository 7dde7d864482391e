//! Construction and verification of orthogonal Latin squares, net designs,
//! and mutually unbiased bases for prime and prime-power dimensions, plus a
//! hidden-variable layer that census-classifies epistemic states by whether
//! their reconstructed operators are quantum states.
//!
//! The crate is organized around the pipeline
//! squares → nets → bases → hidden-variable census:
//!
//! - [`gfield`]: exact GF(p^r) arithmetic, traces, dual bases.
//! - [`squares`]: Latin squares, orthogonality, OLS families, MacNeish
//!   products, orthogonal-mate search.
//! - [`nets`]: the net construction, its defining property, and column
//!   functions.
//! - [`qmub`]: Weyl operators, eigenbases, MUB sets and their certification,
//!   the Latin operator basis, and the shifting check.
//! - [`hvm`]: epistemic states over a net, operator reconstruction, purity
//!   classification, and the exhaustive census.

pub mod error;
pub mod gfield;
pub mod hvm;
pub mod io;
pub mod nets;
pub mod qmub;
pub mod reproduce;
pub mod squares;

mod util;

pub use error::{Error, Result};
