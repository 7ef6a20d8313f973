//! CSV, JSON and text renderings. Every floating value is written with 17
//! significant digits so files round-trip exactly.

use std::fmt::Write as _;

use serde_json::{json, Number, Value};

use crate::ep::{EPMap, ImagTol};
use crate::exact::CharPoly;
use crate::newton::{NewtonAnalysis, RingPrediction};
use crate::spectra::{Spectrum, TrackedSweep, Vary};

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number carrying the same 17-digit text as the CSV output.
pub fn json_num(x: f64) -> Value {
    match fmt_num(x).parse::<Number>() {
        Ok(n) if x.is_finite() => Value::Number(n),
        _ => Value::Null,
    }
}

/// Fixed model parameters recorded alongside every table.
#[derive(Clone, Debug, PartialEq)]
pub struct RunMetadata {
    pub particles: usize,
    pub v: f64,
    /// Name and value of the parameter held fixed (`gamma` or `c`).
    pub fixed: (&'static str, f64),
    pub grid: String,
    pub pert_power: u32,
}

impl RunMetadata {
    fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("N".into(), json!(self.particles));
        m.insert("v".into(), json_num(self.v));
        m.insert(self.fixed.0.into(), json_num(self.fixed.1));
        m.insert("grid".into(), json!(self.grid));
        m.insert("pert_power".into(), json!(self.pert_power));
        Value::Object(m)
    }
}


/// `param,branch,re,im` with branches in sorted eigenvalue order.
pub fn spectrum_csv(spectra: &[Spectrum], vary: Vary) -> String {
    let mut out = String::from("param,branch,re,im\n");
    for s in spectra {
        let param = match vary {
            Vary::Gamma => s.params.gamma,
            Vary::C => s.params.c,
        };
        for (b, z) in s.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "{},{b},{},{}", fmt_num(param), fmt_num(z.re), fmt_num(z.im));
        }
    }
    out
}

pub fn spectrum_json(spectra: &[Spectrum], vary: Vary, meta: &RunMetadata) -> Value {
    let rows: Vec<Value> = spectra
        .iter()
        .map(|s| {
            let param = match vary {
                Vary::Gamma => s.params.gamma,
                Vary::C => s.params.c,
            };
            json!({
                "param": json_num(param),
                "eigenvalues": s.eigenvalues.iter().map(complex_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "metadata": meta.to_json(), "vary": vary.name(), "spectra": rows })
}

/// `c,branch,re,im` with branch labels from continuation matching.
pub fn trajectory_csv(sweep: &TrackedSweep) -> String {
    let mut out = String::from("c,branch,re,im\n");
    let trajectories = &sweep.matching.trajectories;
    for (i, &c) in sweep.grid.iter().enumerate() {
        for t in trajectories {
            let z = t.points[i].1;
            let _ = writeln!(out, "{},{},{},{}", fmt_num(c), t.branch, fmt_num(z.re), fmt_num(z.im));
        }
    }
    out
}

pub fn trajectory_json(sweep: &TrackedSweep, meta: &RunMetadata) -> Value {
    let trajectories: Vec<Value> = sweep
        .matching
        .trajectories
        .iter()
        .map(|t| {
            json!({
                "branch": t.branch,
                "points": t.points.iter().map(|(c, z)| json!({
                    "c": json_num(*c), "re": json_num(z.re), "im": json_num(z.im),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "metadata": meta.to_json(),
        "refinement_levels": sweep.levels,
        "flagged_steps": sweep.matching.flagged_steps,
        "unresolved_steps": sweep.unresolved_steps,
        "trajectories": trajectories,
    })
}

/// `c,index,gamma_tilde,order,method`, index counting from 1 in ascending
/// `γ̃` per `c`.
pub fn ep_map_csv(map: &EPMap) -> String {
    let mut out = String::from("c,index,gamma_tilde,order,method\n");
    for (&c, recs) in map.c_grid.iter().zip(&map.records) {
        for (i, r) in recs.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(c),
                i + 1,
                fmt_num(r.gamma),
                r.order,
                r.method.name()
            );
        }
    }
    out
}

pub fn ep_map_json(map: &EPMap, grid: &str) -> Value {
    let imag_tol = match map.options.imag_tol {
        ImagTol::Relative(r) => json!({ "relative": json_num(r) }),
        ImagTol::Absolute(a) => json!({ "absolute": json_num(a) }),
    };
    let rows: Vec<Value> = map
        .c_grid
        .iter()
        .zip(&map.records)
        .map(|(&c, recs)| {
            json!({
                "c": json_num(c),
                "eps": recs.iter().enumerate().map(|(i, r)| json!({
                    "index": i + 1,
                    "gamma_tilde": json_num(r.gamma),
                    "order": r.order,
                    "method": r.method.name(),
                    "bracket_width": json_num(r.bracket_width),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "metadata": {
            "N": map.particles,
            "v": json_num(map.v),
            "grid": grid,
            "tolerances": {
                "bisection": json_num(map.options.tol),
                "imag_tol": imag_tol,
                "coarse_cells": map.options.coarse_cells,
            },
            "gamma_min": json_num(map.options.gamma_min),
            "gamma_max": map.options.gamma_max.map(json_num),
        },
        "rows": rows,
        "failures": map.failures.iter().map(|f| json!({ "c": json_num(f.c), "message": f.message })).collect::<Vec<_>>(),
    })
}

/// Both normalizations of the characteristic polynomial.
pub fn charpoly_text(cp: &CharPoly) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# chi(lambda) = -sum_k p[k] lambda^(M-k), p[0] = -1, M = {}", cp.dim());
    out.push_str(&cp.render_p());
    let _ = writeln!(out, "# det(lambda I - H) = sum_k a[k] lambda^k");
    out.push_str(&cp.render_monic());
    out
}

pub fn charpoly_json(cp: &CharPoly, meta: Value) -> Value {
    let param = cp.param();
    json!({
        "metadata": meta,
        "dim": cp.dim(),
        "parameter": param.symbol(),
        "p": cp.p_coefficients().iter().map(|q| q.render(param)).collect::<Vec<_>>(),
        "a": (0..=cp.dim()).map(|k| cp.monic(k).render(param)).collect::<Vec<_>>(),
    })
}

fn complex_json(z: &num_complex::Complex64) -> Value {
    json!({ "re": json_num(z.re), "im": json_num(z.im) })
}

pub fn newton_json(analysis: &NewtonAnalysis, prediction: &RingPrediction, meta: Value) -> Value {
    json!({
        "metadata": meta,
        "points": analysis.points.iter().map(|p| json!({
            "k": p.k, "a": p.a, "coefficient": p.monic_coefficient().to_string(),
        })).collect::<Vec<_>>(),
        "segments": analysis.segments.iter().map(|s| json!({
            "points": s.point_ks, "slope": s.slope.to_string(), "mu": s.mu().to_string(),
        })).collect::<Vec<_>>(),
        "reduced": analysis.reduced.iter().zip(&analysis.leading).map(|(rp, roots)| json!({
            "mu": rp.mu.to_string(),
            "polynomial": rp.render(),
            "e1": roots.iter().map(complex_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "exact_zero_count": analysis.exact_zero_count,
        "rings": analysis.rings.iter().map(|r| json!({
            "id": r.id,
            "size": r.size,
            "mu": r.mu.map(|(p, q)| format!("{p}/{q}")),
            "modulus": json_num(r.modulus),
            "regular": r.regular,
            "members": r.members.iter().map(complex_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "prediction": {
            "rings": prediction.rings,
            "ring_size": prediction.ring_size,
            "remainder": prediction.remainder,
        },
        "ring_law_agrees": crate::newton::ring_law_matches(analysis, prediction),
    })
}

fn fmt_complex(z: &num_complex::Complex64) -> String {
    format!("{} {} {}i", fmt_num(z.re), if z.im < 0.0 { '-' } else { '+' }, fmt_num(z.im.abs()))
}

pub fn newton_text(analysis: &NewtonAnalysis, prediction: &RingPrediction, param: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "points (k, lowest power of {param}):");
    for p in &analysis.points {
        let _ = writeln!(out, "  ({}, {})  coefficient {}", p.k, p.a, p.monic_coefficient());
    }
    let _ = writeln!(out, "hull segments:");
    for s in &analysis.segments {
        let ks: Vec<String> = s.point_ks.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(out, "  slope {}  mu {}  through k = {}", s.slope, s.mu(), ks.join(", "));
    }
    for (rp, roots) in analysis.reduced.iter().zip(&analysis.leading) {
        let _ = writeln!(out, "reduced polynomial (mu {}): {}", rp.mu, rp.render());
        for e in roots {
            let _ = writeln!(out, "  e1 = {}", fmt_complex(e));
        }
    }
    if analysis.exact_zero_count > 0 {
        let _ = writeln!(out, "identically zero eigenvalues: {}", analysis.exact_zero_count);
    }
    let _ = writeln!(out, "rings (first order):");
    for r in &analysis.rings {
        let mu = r.mu.map_or("-".to_string(), |(p, q)| format!("{p}/{q}"));
        let _ = writeln!(
            out,
            "  ring {}  size {}  mu {}  |e1| {}  {}",
            r.id,
            r.size,
            mu,
            fmt_num(r.modulus),
            if r.regular { "regular" } else { "irregular" }
        );
    }
    let _ = writeln!(
        out,
        "predicted: {} ring(s) of size {} and {} remaining eigenvalue(s)",
        prediction.rings, prediction.ring_size, prediction.remainder
    );
    let _ = writeln!(
        out,
        "ring law: {}",
        if crate::newton::ring_law_matches(analysis, prediction) { "agrees" } else { "differs" }
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(json_num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(json_num(f64::NAN), Value::Null);
    }
}
