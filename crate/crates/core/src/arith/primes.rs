//! Primality, factoring and multiplicative orders on machine integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization `[(p, e)]` sorted by `p`.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = vec![];
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![];
    if n > 1 {
        stack.push(n);
    }
    let mut primes = vec![];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort_unstable();
    out
}

/// Factor a big integer. Complete when the cofactor after trial division fits in u64;
/// otherwise returns `None`.
pub fn factor_big(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return None;
    }
    let mut out = vec![];
    let mut p = 2u64;
    while p < 10_000 {
        if m.to_u64().is_some() {
            break;
        }
        let bp = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let rest = m.to_u64()?;
    for (q, e) in factor_u64(rest) {
        let bq = BigInt::from(q);
        match out.iter_mut().find(|(x, _)| *x == bq) {
            Some((_, f)) => *f += e,
            None => out.push((bq, e)),
        }
    }
    out.sort();
    Some(out)
}

/// Positive divisors of `n` given its factorization.
pub fn divisors_from(f: &[(BigInt, u32)]) -> Vec<BigInt> {
    let mut ds = vec![BigInt::one()];
    for (p, e) in f {
        let mut next = Vec::with_capacity(ds.len() * (*e as usize + 1));
        for d in &ds {
            let mut pw = d.clone();
            for _ in 0..=*e {
                next.push(pw.clone());
                pw *= p;
            }
        }
        ds = next;
    }
    ds.sort();
    ds
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Carmichael function λ(n).
pub fn carmichael(n: u64) -> u64 {
    let mut l = 1u64;
    for (p, e) in factor_u64(n) {
        let pe = p.pow(e);
        let lam = if p == 2 && e >= 3 { pe / 4 } else { pe / p * (p - 1) };
        l = l.lcm(&lam);
    }
    l
}

/// Multiplicative order of `a` modulo `n`; `None` unless `gcd(a, n) = 1`.
pub fn mult_order(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if a.gcd(&n) != 1 {
        return None;
    }
    let mut ord = carmichael(n);
    for (q, _) in factor_u64(ord) {
        while ord.is_multiple_of(q) && pow_mod(a, ord / q, n) == 1 {
            ord /= q;
        }
    }
    Some(ord)
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = primes_up_to(50);
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn factoring() {
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        let n = 1_000_000_007u64 * 998_244_353;
        assert_eq!(factor_u64(n), vec![(998_244_353, 1), (1_000_000_007, 1)]);
        let b = BigInt::from(3u32).pow(40) * BigInt::from(7);
        assert_eq!(factor_big(&b).unwrap(), vec![(BigInt::from(3), 40), (BigInt::from(7), 1)]);
    }

    #[test]
    fn orders() {
        assert_eq!(mult_order(2, 3), Some(2));
        assert_eq!(mult_order(3, 8), Some(2));
        assert_eq!(mult_order(3, 1024), Some(256));
        assert_eq!(mult_order(2, 4), None);
        for n in 2..200u64 {
            for a in 1..n {
                if a.gcd(&n) != 1 {
                    continue;
                }
                let mut k = 1;
                let mut x = a % n;
                while x != 1 {
                    x = x * a % n;
                    k += 1;
                }
                assert_eq!(mult_order(a, n), Some(k));
            }
        }
        assert_eq!(euler_phi(36), 12);
    }
}
