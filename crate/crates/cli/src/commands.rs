use orbitforge_core::boettcher::{phi_series, psi_series};
use orbitforge_core::combinat::{
    coset_points_in_box, decompose_root_pair, sweep, sweep_cases, verify_root_pair, Lemma, LatticeCoset,
};
use orbitforge_core::curves::{build_nu, intersect_small_orbit, is_special_curve, nu_estimates, PlaneCurve, RootOfUnity};
use orbitforge_core::dynamics::{
    detect_exceptional, escaping_critical_points, is_preperiodic_budget, normalize_monic, PolyDS,
};
use orbitforge_core::green::{equipotential_trace, green_eval, level_curve_csv, level_curve_svg};
use orbitforge_core::nonarch::{count_zeros_pj, newton_polygon, zeros_by_slope, PadicScalar, PadicSeries, Radius};
use orbitforge_core::orbits::{canonical_height, small_orbit_level_capped};
use orbitforge_core::{BiPoly, CBall, Error, Poly, Rat, Result};
use serde_json::{json, Value};

use crate::config::Settings;
use crate::{CombinatCmd, CurveCmd, Cmd, DynamicsCmd, GreenCmd, OrbitCmd, Output, PadicCmd};

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T> {
    serde_json::from_str(&s.replace('\u{2212}', "-")).map_err(|e| Error::Parse(format!("bad {what} JSON: {e}")))
}

fn parse_rat(s: &str) -> Result<Rat> {
    Rat::parse(s)
}

/// JSON array of coefficients, constant term first.
fn parse_poly(s: &str) -> Result<Poly> {
    Ok(Poly::new(parse_json::<Vec<Rat>>("polynomial", s)?))
}

fn load_ds(s: &str, settings: &Settings) -> Result<PolyDS> {
    let f = parse_poly(s)?;
    if f.deg() >= 2 && !f.is_monic() {
        return Err(Error::Domain(
            "polynomial must be monic; `dynamics classify` reports a monic conjugate".into(),
        ));
    }
    Ok(PolyDS::new(f)?.with_max_degree(settings.level_cap))
}

/// JSON matrix; entry `[i][j]` is the coefficient of `X^i Y^j`.
fn parse_curve(s: &str) -> Result<PlaneCurve> {
    let m: Vec<Vec<Rat>> = parse_json("curve", s)?;
    PlaneCurve::new(BiPoly::from_matrix(&m))
}

fn parse_root_of_unity(s: &str) -> Result<RootOfUnity> {
    match s {
        "one" | "1" => Ok(RootOfUnity::One),
        "minus-one" | "-1" => Ok(RootOfUnity::MinusOne),
        _ => match s.strip_prefix("teich:") {
            Some(r) => r
                .parse()
                .map(|residue| RootOfUnity::Teichmuller { residue })
                .map_err(|_| Error::Parse(format!("bad Teichmüller residue {r:?}"))),
            None => Err(Error::Parse(format!("root of unity must be one, minus-one or teich:<residue>, got {s:?}"))),
        },
    }
}

pub fn dispatch(cmd: &Cmd, st: &Settings) -> Result<Output> {
    match cmd {
        Cmd::Dynamics { cmd: DynamicsCmd::Classify { poly, alpha } } => classify(poly, alpha.as_deref(), st),
        Cmd::Boettcher(a) => {
            let ds = load_ds(&a.poly, st)?;
            let order = a.order.unwrap_or(st.truncation);
            let (name, var, s) = if a.phi {
                ("phi", "w = 1/X", phi_series(&ds, order))
            } else {
                ("psi", "X", psi_series(&ds, order))
            };
            let coeffs: Vec<Value> =
                s.labelled().into_iter().map(|(n, c)| json!({ "exponent": n, "coeff": c })).collect();
            Ok(Output::Json(json!({
                "series": name,
                "variable": var,
                "order": order,
                "unknown_from_exponent": s.trunc(),
                "coefficients": coeffs,
            })))
        }
        Cmd::Green { cmd } => green(cmd, st),
        Cmd::Padic { cmd } => padic(cmd),
        Cmd::Orbit { cmd } => orbit(cmd, st),
        Cmd::Curve { cmd } => curve(cmd, st),
        Cmd::Combinat { cmd } => combinat(cmd),
        Cmd::Replay { .. } => unreachable!("handled by the caller"),
    }
}

fn classify(poly: &str, alpha: Option<&str>, st: &Settings) -> Result<Output> {
    let g = parse_poly(poly)?;
    let (ds, conj) = normalize_monic(&g)?;
    let ds = ds.with_max_degree(st.level_cap);
    let mut out = json!({
        "input": g,
        "monic": ds.poly(),
        "conjugacy": conj,
        "exceptional": detect_exceptional(&ds),
        "bad_primes": ds.bad_primes().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "escape_radius": ds.escape_radius(),
        "critical": escaping_critical_points(&ds, st.iter_cap)?,
    });
    if let Some(a) = alpha {
        let a = parse_rat(a)?;
        let v = is_preperiodic_budget(&ds, &a, st.iter_cap)?;
        out["alpha"] = json!({ "value": a, "orbit": v });
    }
    Ok(Output::Json(out))
}

fn green(cmd: &GreenCmd, st: &Settings) -> Result<Output> {
    match cmd {
        GreenCmd::Eval { poly, re, im, tol } => {
            let ds = load_ds(poly, st)?;
            let g = green_eval(&ds, CBall::new(*re, *im, 0.0), tol.unwrap_or(st.precision));
            Ok(Output::Json(to_json(&g)))
        }
        GreenCmd::Trace { poly, r, n, tol, out } => {
            let ds = load_ds(poly, st)?;
            let c = equipotential_trace(&ds, &parse_rat(r)?, *n, tol.unwrap_or(st.precision))?;
            let radius = ds.escape_radius().to_f64();
            match out.as_str() {
                "json" => Ok(Output::Json(to_json(&c))),
                "csv" => Ok(Output::Text(level_curve_csv(&c))),
                "svg" => Ok(Output::Text(level_curve_svg(&c, radius))),
                path => {
                    let body = if path.ends_with(".csv") {
                        level_curve_csv(&c)
                    } else if path.ends_with(".svg") {
                        level_curve_svg(&c, radius)
                    } else {
                        return Err(Error::Parse(format!("--out must be csv, svg, json or a .csv/.svg path, got {path:?}")));
                    };
                    std::fs::write(path, body).map_err(|e| Error::Resource(format!("cannot write {path}: {e}")))?;
                    Ok(Output::Json(json!({
                        "written": path,
                        "points": c.points.len(),
                        "closed": c.closed,
                        "pullbacks": c.pullbacks,
                        "dropped": c.dropped,
                    })))
                }
            }
        }
    }
}

fn padic(cmd: &PadicCmd) -> Result<Output> {
    let PadicCmd::Polygon { p, series, low, prec, pj, r1, r } = cmd;
    let coeffs: Vec<Rat> = parse_json("series", series)?;
    let g = PadicSeries::from_rats(*p, *low, &coeffs, *prec)?;
    let np = newton_polygon(&g)?;
    let segments: Vec<Value> =
        np.segments().into_iter().map(|(s, m)| json!({ "slope": s, "length": m })).collect();
    let zeros: Vec<Value> =
        zeros_by_slope(&np).into_iter().map(|(v, m)| json!({ "valuation": v, "count": m })).collect();
    let mut out = json!({ "p": p, "vertices": np.vertices, "segments": segments, "zeros": zeros });
    if *pj {
        let (Some(r1), Some(r)) = (r1, r) else {
            return Err(Error::Parse("--pj needs --r1 and --r".into()));
        };
        let r1 = Radius::from_rat(&parse_rat(r1)?, *p)?;
        let r = Radius::from_rat(&parse_rat(r)?, *p)?;
        let ledger = count_zeros_pj(&g, &r1, &r)?;
        out["pj"] = to_json(&ledger);
        out["pj"]["residual"] = to_json(&ledger.residual());
    }
    Ok(Output::Json(out))
}

fn orbit(cmd: &OrbitCmd, st: &Settings) -> Result<Output> {
    match cmd {
        OrbitCmd::Small { poly, alpha, level, cap } => {
            let ds = load_ds(poly, st)?;
            let a = parse_rat(alpha)?;
            let set = small_orbit_level_capped(&ds, &a, *level, cap.unwrap_or(st.level_cap))?;
            let rational: Vec<Value> =
                set.rational.iter().map(|(q, m)| json!({ "root": q, "multiplicity": m })).collect();
            Ok(Output::Json(json!({
                "level": set.level,
                "alpha": a,
                "target": set.target,
                "defining": set.defining,
                "size": set.size(),
                "rational": rational,
                "factors": set.factors,
                "verified": set.verify(),
            })))
        }
        OrbitCmd::Height { poly, alpha, tol } => {
            let ds = load_ds(poly, st)?;
            let h = canonical_height(&ds, &parse_rat(alpha)?, tol.unwrap_or(st.precision))?;
            Ok(Output::Json(to_json(&h)))
        }
    }
}

fn curve(cmd: &CurveCmd, st: &Settings) -> Result<Output> {
    match cmd {
        CurveCmd::Special { poly, curve, alpha, nmax } => {
            let ds = load_ds(poly, st)?;
            let c = parse_curve(curve)?;
            let v = is_special_curve(&c, &ds, &parse_rat(alpha)?, *nmax)?;
            Ok(Output::Json(json!({
                "curve": { "d1": c.d1, "d2": c.d2, "irreducible": c.irreducible },
                "special": v.is_special(),
                "verdict": v,
            })))
        }
        CurveCmd::Intersect { poly, curve, alpha, cap } => {
            let ds = load_ds(poly, st)?;
            let c = parse_curve(curve)?;
            Ok(Output::Json(to_json(&intersect_small_orbit(&c, &ds, &parse_rat(alpha)?, *cap)?)))
        }
        CurveCmd::Nu { poly, curve, p, phi, k1, k2, window, zeta1, zeta2 } => {
            let ds = load_ds(poly, st)?;
            let c = parse_curve(curve)?;
            let prec = (4 * window + 64) as u32;
            let phi = PadicScalar::from_rat(&parse_rat(phi)?, *p, prec)?;
            let nu = build_nu(&c, &ds, *p, &phi, parse_root_of_unity(zeta1)?, parse_root_of_unity(zeta2)?, *k1, *k2, *window)?;
            let vals: Vec<Value> = nu.series.nonzero().map(|(k, v)| json!({ "k": k, "valuation": v })).collect();
            Ok(Output::Json(json!({
                "window": nu.window,
                "precision_cap": nu.precision_cap,
                "coefficient_valuations": vals,
                "ledger": nu_estimates(&nu),
            })))
        }
    }
}

fn combinat(cmd: &CombinatCmd) -> Result<Output> {
    match cmd {
        CombinatCmd::Verify { lemma, nmax, exhaustive_max, random, seed } => {
            let lemma: Lemma = lemma.parse()?;
            if *nmax < 17 {
                return Err(Error::Domain("--nmax must be at least 17".into()));
            }
            let random = if nmax > exhaustive_max { *random } else { 0 };
            let cases = sweep_cases(*nmax, *exhaustive_max, random, *seed);
            Ok(Output::Json(to_json(&sweep(lemma, &cases))))
        }
        CombinatCmd::Box { a1, a2, n, c, witnesses } => {
            let mut b = coset_points_in_box(&LatticeCoset::new(*a1, *a2, *n), &parse_rat(c)?)?;
            if !witnesses {
                b.witnesses.clear();
            }
            Ok(Output::Json(to_json(&b)))
        }
        CombinatCmd::Decompose { a1, a2, n, c, big_c } => {
            let c = parse_rat(c)?;
            let d = decompose_root_pair(*a1, *a2, *n, &parse_rat(big_c)?, &c)?;
            let verified = verify_root_pair(*a1, *a2, *n, &c, &d);
            let mut v = to_json(&d);
            v["verified"] = json!(verified);
            Ok(Output::Json(v))
        }
    }
}
