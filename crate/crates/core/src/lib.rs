//! Exact and certified computations for polynomial dynamics over Q.

pub mod arith;
pub mod dynamics;
pub mod boettcher;
pub mod combinat;
pub mod curves;
pub mod error;
pub mod green;
pub mod nonarch;
pub mod orbits;

pub use arith::{Ball, BiPoly, CBall, LaurentBlock, Poly, Rat, Var};
pub use error::{Error, Result};
