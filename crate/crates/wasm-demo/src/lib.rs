//! Browser bindings for three interactive operations: the closed-form
//! estimator of the 2x2 independence model, the ML degree of a plane
//! curve, and sampling of a Horn parametrization together with the
//! critical points of its curve.
//!
//! Every export takes plain strings or numbers and returns a JSON string;
//! failures come back as `{"error": "..."}` so the page never has to
//! catch exceptions.

use horn_core::fixtures;
use horn_core::horn::HornMap;
use horn_core::linalg::{format_rat, Rat};
use horn_core::mldeg::{self, MlDegreeOptions, Var};
use horn_core::mle::{self, CountVector};
use horn_core::poly::{parse_poly, MultiPoly};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

type Outcome = Result<Value, String>;

fn respond(r: Outcome) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn plane_names() -> Vec<String> {
    vec!["p1".into(), "p2".into()]
}

/// Counts `u00, u01, u10, u11` separated by commas or whitespace.
pub fn independence(counts: &str) -> Outcome {
    let u = counts
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("not a count: {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let model = mle::independence_model();
    let est = mle::estimate(&model, &CountVector::new(u).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "exact": est.p_hat.iter().map(format_rat).collect::<Vec<_>>(),
        "approx": est.p_hat.iter().map(to_f64).collect::<Vec<_>>(),
        "certified": est.certificate.passed() && est.simplex && est.on_model && est.critical,
        "checks": est.certificate.checks,
    }))
}

/// ML degree of the curve `expr = 0` in `p1, p2`.
pub fn plane_ml_degree(expr: &str, seed: u64) -> Outcome {
    let f = parse_poly(expr, &plane_names()).map_err(|e| e.to_string())?;
    let report =
        mldeg::ml_degree_plane(&f, seed, MlDegreeOptions::default()).map_err(|e| e.to_string())?;
    let solutions = report.solutions();
    Ok(json!({
        "curve": f.display_with(&plane_names()).to_string(),
        "ml_degree": report.ml_degree,
        "counts": report.draws.iter().map(|d| d.count).collect::<Vec<_>>(),
        "rule": report.rule,
        "u": report.ml_degree.and_then(|n| report.draws.iter().find(|d| d.count == n)).map(|d| d.u),
        "solutions": solutions,
    }))
}

fn named_map(name: &str) -> Result<(HornMap, MultiPoly), String> {
    let names = plane_names();
    let (h, eq) = match name {
        "line" => (fixtures::line_map(), "p1 + p2 - 1"),
        "parabola" => (fixtures::parabola_map(), "p1 - (p2 + 1)^2"),
        other => {
            return Err(format!(
                "unknown curve {other:?}; try \"line\" or \"parabola\""
            ))
        }
    };
    Ok((h, parse_poly(eq, &names).map_err(|e| e.to_string())?))
}

/// Samples `Psi(cos a, sin a)` around the circle of directions (the map
/// is homogeneous of degree zero) and reports the estimate and the
/// critical points for data `u`.
pub fn horn_curve(name: &str, u1: u32, u2: u32, samples: u32) -> Outcome {
    let (h, f) = named_map(name)?;
    let scale = 10_000.0;
    let mut points = Vec::new();
    for i in 0..samples.max(2) {
        let a = std::f64::consts::TAU * (i as f64 + 0.5) / samples.max(2) as f64;
        let u = [
            Rat::from_integer(((a.cos() * scale).round() as i64).into()),
            Rat::from_integer(((a.sin() * scale).round() as i64).into()),
        ];
        if !h.is_off_base_locus(&u) {
            continue;
        }
        if let Ok(p) = h.eval(&u) {
            points.push([to_f64(&p[0]), to_f64(&p[1])]);
        }
    }
    if u1 == 0 || u2 == 0 {
        return Err("data must be positive".into());
    }
    let u = [Rat::from_integer(u1.into()), Rat::from_integer(u2.into())];
    let est = h.eval(&u).map_err(|e| e.to_string())?;
    let crit = mldeg::critical_points(&f, (u1 as i64, u2 as i64), Var::P2, mldeg::FILTER_TOL)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "equation": f.display_with(&plane_names()).to_string(),
        "points": points,
        "estimate": {
            "exact": est.iter().map(format_rat).collect::<Vec<_>>(),
            "approx": est.iter().map(to_f64).collect::<Vec<_>>(),
        },
        "critical_points": crit,
    }))
}

#[wasm_bindgen]
pub fn independence_estimate(counts: &str) -> String {
    respond(independence(counts))
}

#[wasm_bindgen]
pub fn ml_degree(expr: &str, seed: u32) -> String {
    respond(plane_ml_degree(expr, seed as u64))
}

#[wasm_bindgen]
pub fn horn_curve_samples(name: &str, u1: u32, u2: u32, samples: u32) -> String {
    respond(horn_curve(name, u1, u2, samples))
}
