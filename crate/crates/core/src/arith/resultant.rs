//! Sylvester resultants, univariate and bivariate.


use super::bipoly::{BiPoly, Var};
use super::poly::Poly;
use super::rat::Rat;
use crate::error::{Error, Result};

/// Determinant by Gaussian elimination over Q.
pub fn det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut sign = false;
    let mut acc = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(piv, col);
            sign = !sign;
        }
        let p = m[col][col].clone();
        acc *= &p;
        let inv = p.recip().unwrap();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &inv;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    if sign {
        -acc
    } else {
        acc
    }
}

/// Sylvester matrix of `p, q` with formal degrees `m, n` (leading entries may vanish).
pub fn sylvester(p: &Poly, m: usize, q: &Poly, n: usize) -> Vec<Vec<Rat>> {
    let size = m + n;
    let mut s = vec![vec![Rat::zero(); size]; size];
    for row in 0..n {
        for k in 0..=m {
            s[row][row + k] = p.coeff(m - k);
        }
    }
    for row in 0..m {
        for k in 0..=n {
            s[n + row][row + k] = q.coeff(n - k);
        }
    }
    s
}

/// Resultant with formal degrees.
pub fn resultant_formal(p: &Poly, m: usize, q: &Poly, n: usize) -> Rat {
    if m + n == 0 {
        return Rat::one();
    }
    det(sylvester(p, m, q, n))
}

/// `Res(p, q)` of two nonzero polynomials.
pub fn resultant(p: &Poly, q: &Poly) -> Rat {
    resultant_formal(p, p.deg(), q, q.deg())
}

/// Newton interpolation through `(x_i, y_i)`.
pub fn interpolate(xs: &[Rat], ys: &[Rat]) -> Poly {
    let n = xs.len();
    let mut dd: Vec<Rat> = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            dd[i] = num / (&xs[i] - &xs[i - k]);
        }
    }
    let mut acc = Poly::zero();
    for i in (0..n).rev() {
        acc = &(&acc * &Poly::linear_root(&xs[i])) + &Poly::constant(dd[i].clone());
    }
    acc
}

fn other(v: Var) -> Var {
    match v {
        Var::X => Var::Y,
        Var::Y => Var::X,
    }
}

/// Specialise the non-eliminated variable: a polynomial in the eliminated one.
fn specialise(p: &BiPoly, elim: Var, at: &Rat) -> Poly {
    match elim {
        Var::X => p.eval_y(at),
        Var::Y => p.eval_x(at),
    }
}

/// Resultant eliminating `elim` from `p(t, s)` and `q(t, u)`, treating the remaining
/// variables of `p` and `q` as distinct. The result is a polynomial in `(s, u)`:
/// the remaining variable of `p` becomes `X`, that of `q` becomes `Y`.
pub fn resultant_bivariate(p: &BiPoly, q: &BiPoly, elim: Var) -> Result<BiPoly> {
    let m = p.deg(elim);
    let n = q.deg(elim);
    if p.is_zero() || q.is_zero() || m == 0 || n == 0 {
        return Err(Error::domain("resultant needs positive degree in the eliminated variable"));
    }
    let keep = other(elim);
    let a = p.deg(keep);
    let b = q.deg(keep);
    let dy = n * a;
    let dz = m * b;
    let ys: Vec<Rat> = (0..=dy as i64).map(Rat::from_int).collect();
    let zs: Vec<Rat> = (0..=dz as i64).map(Rat::from_int).collect();
    let ps: Vec<Poly> = ys.iter().map(|y| specialise(p, elim, y)).collect();
    let qs: Vec<Poly> = zs.iter().map(|z| specialise(q, elim, z)).collect();
    // rows[i] = R(y_i, Z) interpolated in Z
    let mut rows = Vec::with_capacity(ys.len());
    for pi in &ps {
        let vals: Vec<Rat> = qs.iter().map(|qj| resultant_formal(pi, m, qj, n)).collect();
        rows.push(interpolate(&zs, &vals));
    }
    let mut out = BiPoly::zero();
    for k in 0..=dz {
        let vals: Vec<Rat> = rows.iter().map(|r| r.coeff(k)).collect();
        let col = interpolate(&ys, &vals);
        for (i, c) in col.coeffs().iter().enumerate() {
            out.add_term((i, k), c.clone());
        }
    }
    Ok(out)
}

/// Resultant eliminating `elim` from `p` and `q` sharing the other variable.
pub fn resultant_shared(p: &BiPoly, q: &BiPoly, elim: Var) -> Result<Poly> {
    let m = p.deg(elim);
    let n = q.deg(elim);
    if p.is_zero() || q.is_zero() || m == 0 || n == 0 {
        return Err(Error::domain("resultant needs positive degree in the eliminated variable"));
    }
    let keep = other(elim);
    let bound = n * p.deg(keep) + m * q.deg(keep);
    let xs: Vec<Rat> = (0..=bound as i64).map(Rat::from_int).collect();
    let vals: Vec<Rat> = xs
        .iter()
        .map(|t| resultant_formal(&specialise(p, elim, t), m, &specialise(q, elim, t), n))
        .collect();
    Ok(interpolate(&xs, &vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::r;

    #[test]
    fn determinant() {
        let m = vec![vec![r(2, 1), r(1, 1)], vec![r(1, 1), r(3, 1)]];
        assert_eq!(det(m), r(5, 1));
        let m = vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]];
        assert_eq!(det(m), r(-1, 1));
    }

    #[test]
    fn univariate() {
        // Res(x^2-1, x-2) = ±3
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[-2, 1]);
        assert_eq!(resultant(&a, &b).abs(), r(3, 1));
    }

    #[test]
    fn bivariate_examples() {
        // Res_X(X - Y, X - Z) = ±(Y - Z)
        let p = BiPoly::from_int_terms(&[(1, 0, 1), (0, 1, -1)]);
        let res = resultant_bivariate(&p, &p, Var::X).unwrap();
        let yz = BiPoly::from_int_terms(&[(1, 0, 1), (0, 1, -1)]);
        assert!(res == yz || res == -&yz);

        // Res_X(X^2 - Y, X - 1) = ±(1 - Y)
        let p = BiPoly::from_int_terms(&[(2, 0, 1), (0, 1, -1)]);
        let q = BiPoly::from_int_terms(&[(1, 0, 1), (0, 0, -1)]);
        let res = resultant_bivariate(&p, &q, Var::X).unwrap();
        let e = BiPoly::from_int_terms(&[(0, 0, 1), (1, 0, -1)]);
        assert!(res == e || res == -&e);

        // Res_X(X^2 - Y, X^2 - Z) = (Y - Z)^2
        let res = resultant_bivariate(&p, &p, Var::X).unwrap();
        let e = &yz * &yz;
        assert_eq!(res, e);
    }

    #[test]
    fn zero_degree_rejected() {
        let p = BiPoly::from_int_terms(&[(0, 1, 1)]);
        assert!(resultant_bivariate(&p, &p, Var::X).is_err());
    }

    #[test]
    fn interpolation() {
        let f = Poly::from_ints(&[3, -1, 0, 2]);
        let xs: Vec<Rat> = (0..4).map(Rat::from_int).collect();
        let ys: Vec<Rat> = xs.iter().map(|x| f.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), f);
    }
}
