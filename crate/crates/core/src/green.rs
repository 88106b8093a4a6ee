//! Green function `g_f(z) = lim log⁺|f^n(z)| / d^n` and equipotential curves.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::ball::up;
use crate::arith::roots::isolate_ball_coeffs;
use crate::arith::{Ball, CBall, Rat};
use crate::boettcher::{radius_archimedean, BoettcherPair};
use crate::dynamics::PolyDS;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    /// Encloses `g_f(z)`, natural-log units.
    pub value: Ball,
    pub iterations_used: usize,
    /// The orbit was certified to leave the escape disk. When false the value is only an upper bound.
    pub escaped: bool,
}

const OVERFLOW_GUARD: f64 = 1e150;

/// Iteration count after which a bounded orbit forces `g ≤ tol`.
fn bounded_iterations(ds: &PolyDS, tol: f64) -> usize {
    let r = 2.0 * ds.escape_radius().to_f64();
    let d = ds.degree() as f64;
    let n = (r.ln() / tol).ln() / d.ln();
    n.ceil().max(1.0) as usize + 1
}

/// Certified enclosure of `g_f(z)`.
pub fn green_eval(ds: &PolyDS, z: CBall, tol: f64) -> GreenValue {
    green_eval_iter(ds, z, tol, bounded_iterations(ds, tol.max(1e-300)))
}

pub fn green_eval_iter(ds: &PolyDS, z: CBall, tol: f64, max_iter: usize) -> GreenValue {
    let coeffs = ds.poly().ball_coeffs();
    let s = Ball::from_rat(&ds.coeff_abs_sum()).upper();
    let r_esc = up(1.0 + s);
    let d = ds.degree() as f64;
    let mut w = z;
    let mut scale = 1.0;
    // best upper bound for a not-yet-escaped orbit: g(z) ≤ log(2 max(|w_n|, R)) / d^n
    let mut ub = f64::INFINITY;
    for n in 0..=max_iter {
        if !w.is_finite() {
            break;
        }
        let lo = w.abs_lower();
        if lo > r_esc {
            // escaped: refine until the tail is below tol or the values get too large
            let mut k = n;
            loop {
                let lo = w.abs_lower();
                let tail = -(-s / lo).ln_1p() * scale / (d - 1.0);
                let head = w.abs().ln().map(|b| b.scale(scale));
                let next = CBall::horner(&coeffs, w);
                let stop = lo > OVERFLOW_GUARD || !next.is_finite() || next.abs_lower() <= lo;
                if let Some(h) = head {
                    let v = Ball::new(h.mid, up(h.rad + up(tail)));
                    if v.rad <= tol || stop {
                        return GreenValue { value: clamp_nonneg(v), iterations_used: k, escaped: true };
                    }
                } else if stop {
                    break;
                }
                w = next;
                scale /= d;
                k += 1;
            }
            break;
        }
        let m = w.abs_upper().max(r_esc);
        ub = ub.min(up((2.0 * m).ln() * scale));
        if ub <= tol && n > 0 {
            return GreenValue { value: Ball::from_bounds(0.0, ub), iterations_used: n, escaped: false };
        }
        w = CBall::horner(&coeffs, w);
        scale /= d;
    }
    GreenValue { value: Ball::from_bounds(0.0, ub), iterations_used: max_iter, escaped: false }
}

fn clamp_nonneg(b: Ball) -> Ball {
    if b.lower() >= 0.0 {
        b
    } else {
        Ball::from_bounds(0.0, b.upper().max(0.0))
    }
}

/// `g_f(f(z)) - d g_f(z)` as a ball; contains 0 when consistent.
pub fn green_functional_check(ds: &PolyDS, z: CBall, tol: f64) -> Ball {
    let g0 = green_eval(ds, z, tol);
    let g1 = green_eval(ds, ds.eval_ball(z), tol);
    g1.value - g0.value.scale(ds.degree() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPoint {
    /// External angle for direct traces; argument of the point for pulled-back sheets.
    pub theta: f64,
    pub z: CBall,
    pub g: Ball,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub r: Rat,
    pub points: Vec<LevelPoint>,
    /// The points trace one Jordan curve in order.
    pub closed: bool,
    /// Number of pullback levels used.
    pub pullbacks: usize,
    pub dropped: usize,
}

/// Series order used for direct traces.
const TRACE_ORDER: usize = 96;

/// Sample `n_points` of `L_r = {g_f = r}`, each re-certified to `|g - r| ≤ tol`.
pub fn equipotential_trace(ds: &PolyDS, r: &Rat, n_points: usize, tol: f64) -> Result<LevelCurve> {
    if !r.is_positive() {
        return Err(Error::domain("potential level must be positive"));
    }
    if n_points == 0 {
        return Err(Error::domain("need at least one point"));
    }
    if tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let rf = r.to_f64();
    let radius = radius_archimedean(ds, 1e-12)?;
    // keep the series well inside its disc of convergence
    let safe = radius.value.lower() * 0.6;
    let d = ds.degree();
    let mut k = 0usize;
    let mut level = rf;
    while (-level).exp() >= safe {
        k += 1;
        level *= d as f64;
        if k > 64 {
            return Err(Error::resource("potential level too small to trace"));
        }
    }
    let m = n_points.div_ceil(d.pow(k as u32)).max(1);
    let pair = BoettcherPair::new(ds, TRACE_ORDER);
    let rho = (-level).exp();
    let top: Vec<(f64, Option<CBall>)> = (0..m)
        .into_par_iter()
        .map(|j| {
            let th = 2.0 * PI * j as f64 / m as f64;
            let z = CBall::exact(Complex64::from_polar(rho, th));
            (th, pair.psi_eval(z))
        })
        .collect();
    let mut dropped = 0;
    let mut sheets: Vec<(f64, CBall)> = vec![];
    for (th, p) in top {
        match p {
            Some(b) if b.is_finite() => sheets.push((th, b)),
            _ => dropped += 1,
        }
    }
    for _ in 0..k {
        let (next, lost): (Vec<Vec<(f64, CBall)>>, Vec<usize>) = sheets
            .par_iter()
            .map(|(_, y)| match pullback(ds, *y) {
                Ok(v) => (v.into_iter().map(|w| (w.im.atan2(w.re), w)).collect(), 0),
                Err(_) => (vec![], 1),
            })
            .unzip();
        dropped += lost.iter().sum::<usize>();
        sheets = next.into_iter().flatten().collect();
    }
    if k > 0 {
        sheets.sort_by(|a, b| (a.0, a.1.re).partial_cmp(&(b.0, b.1.re)).unwrap_or(std::cmp::Ordering::Equal));
    }
    let checked: Vec<Option<LevelPoint>> = sheets
        .par_iter()
        .map(|(th, z)| {
            let g = green_eval(ds, *z, tol / 4.0);
            (g.escaped && g.value.lower() >= rf - tol && g.value.upper() <= rf + tol)
                .then_some(LevelPoint { theta: *th, z: *z, g: g.value })
        })
        .collect();
    let mut points = vec![];
    for p in checked {
        match p {
            Some(p) => points.push(p),
            None => dropped += 1,
        }
    }
    Ok(LevelCurve { r: r.clone(), points, closed: k == 0 && dropped == 0, pullbacks: k, dropped })
}

/// Solutions of `f(w) = y`.
fn pullback(ds: &PolyDS, y: CBall) -> Result<Vec<CBall>> {
    let mut c: Vec<CBall> = ds.poly().ball_coeffs().into_iter().map(CBall::real).collect();
    c[0] = c[0] - y;
    let f = ds.poly().clone();
    let fd = f.derivative();
    let yc = y.mid();
    let eval = move |w: Complex64| (f.eval_f64_complex(w) - yc, fd.eval_f64_complex(w));
    isolate_ball_coeffs(&c, Some(eval))
}

/// `theta,re,im,g_residual` rows.
pub fn level_curve_csv(c: &LevelCurve) -> String {
    let rf = c.r.to_f64();
    let mut s = String::from("theta,re,im,g_residual\n");
    for p in &c.points {
        let _ = writeln!(s, "{},{},{},{:e}", p.theta, p.z.re, p.z.im, (p.g.mid - rf).abs() + p.g.rad);
    }
    s
}

/// One polyline through the samples, in a square viewBox of half-width `radius`.
pub fn level_curve_svg(c: &LevelCurve, radius: f64) -> String {
    let mut pts: Vec<String> = c.points.iter().map(|p| format!("{},{}", p.z.re, -p.z.im)).collect();
    if c.closed && !pts.is_empty() {
        pts.push(pts[0].clone());
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        -radius,
        -radius,
        2.0 * radius,
        2.0 * radius
    );
    let _ = writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="{}" points="{}"/>"#, radius / 300.0, pts.join(" "));
    s.push_str("</svg>\n");
    s
}
