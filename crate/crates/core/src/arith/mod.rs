//! Exact arithmetic substrate.

pub mod ball;
pub mod bipoly;
pub mod factor;
pub mod poly;
pub mod primes;
pub mod rat;
pub mod resultant;
pub mod roots;
pub mod series;

pub use ball::{Ball, CBall};
pub use bipoly::{BiPoly, Var};
pub use factor::{Certainty, Factorization, IrrationalFactor};
pub use poly::Poly;
pub use rat::Rat;
pub use series::LaurentBlock;
