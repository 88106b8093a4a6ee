//! Non-archimedean analysis over Q_p.

pub mod polygon;
pub mod scalar;
pub mod series;

pub use polygon::{count_zeros_pj, newton_polygon, zeros_by_slope, NewtonPolygon, PjLedger};
pub use scalar::PadicScalar;
pub use series::{Mag, PadicSeries, Radius, TailBound};

use crate::arith::primes::{euler_phi, is_prime, mult_order};
use crate::error::{Error, Result};

/// `[Q_p(ζ_N) : Q_p] = φ(p^{v_p(N)}) · ord_{N'}(p)` with `N = p^{v_p(N)} N'`.
pub fn cyclotomic_degree_local(n: u64, p: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let mut m = n;
    let mut pv = 1u64;
    while m.is_multiple_of(p) {
        m /= p;
        pv *= p;
    }
    let ord = mult_order(p % m.max(1), m).expect("p is a unit mod N'");
    Ok(euler_phi(pv) * ord)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic_degree_local(3, 2).unwrap(), 2);
        assert_eq!(cyclotomic_degree_local(3, 3).unwrap(), 2);
        assert_eq!(cyclotomic_degree_local(1, 7).unwrap(), 1);
        assert_eq!(cyclotomic_degree_local(9, 3).unwrap(), 6);
        assert_eq!(cyclotomic_degree_local(12, 5).unwrap(), 2);
        for k in 3..=12 {
            assert_eq!(cyclotomic_degree_local(1 << k, 3).unwrap(), 1 << (k - 2));
        }
    }
}
