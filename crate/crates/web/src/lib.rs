//! Browser bindings for three interactive views:
//!
//! * `pm_profile`: `F_{p,q}(s·e)` along the unit ray for both kernels;
//! * `picard_trajectory`: Picard iterates of the affine map;
//! * `fredholm_constant`: a constant-kernel Fredholm system and its `κ`.
//!
//! Every export returns a JSON string; the page parses it.

use cstar_pm::contraction::PicardTrace;
use cstar_pm::ddf::profile_on_unit_ray;
use cstar_pm::fredholm::{check_contraction_condition, direct_solve, discretize, picard_iterate, FredholmProblem, GSpec};
use cstar_pm::{make_ratio_pm, make_trace_pm, picard_solve, AffineMap2, DiagMetric, PicardOptions, PointR2};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 2000;
const MAX_NODES: usize = 401;

#[derive(Debug, Serialize)]
pub struct Profile {
    pub s: Vec<f64>,
    pub trace: Vec<f64>,
    pub ratio: Vec<f64>,
    pub trace_distance: f64,
}

pub fn profile(p: (f64, f64), q: (f64, f64), s_max: f64, samples: usize) -> Result<Profile, String> {
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(format!("s_max must be positive, got {s_max}"));
    }
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must lie in 2..={MAX_SAMPLES}"));
    }
    let (p, q) = (PointR2::new(p.0, p.1), PointR2::new(q.0, q.1));
    if !(p.is_finite() && q.is_finite()) {
        return Err("points must be finite".into());
    }
    let s: Vec<f64> = (0..samples).map(|i| s_max * i as f64 / (samples - 1) as f64).collect();
    let trace_space = make_trace_pm(DiagMetric);
    let ratio_space = make_ratio_pm(DiagMetric);
    Ok(Profile {
        trace: profile_on_unit_ray(&trace_space.pair(&p, &q), 2, &s),
        ratio: profile_on_unit_ray(&ratio_space.pair(&p, &q), 2, &s),
        trace_distance: trace_space.distance(&p, &q).trace(),
        s,
    })
}

#[derive(Debug, Serialize)]
pub struct Trajectory {
    pub iterates: Vec<[f64; 2]>,
    pub cert_values: Vec<f64>,
    pub converged: bool,
    pub steps: usize,
    pub fixed_point: [f64; 2],
    pub closed_form: [f64; 2],
}

pub fn trajectory(alpha: (f64, f64), lambda: (f64, f64), start: (f64, f64)) -> Result<Trajectory, String> {
    let map = AffineMap2::new(alpha, lambda).map_err(|e| e.to_string())?;
    let start = PointR2::new(start.0, start.1);
    if !start.is_finite() {
        return Err("start must be finite".into());
    }
    let options = PicardOptions { max_iter: 2000, ..PicardOptions::default() };
    let trace: PicardTrace<PointR2> =
        picard_solve(&make_trace_pm(DiagMetric), |p| map.apply(p), &start, &options).map_err(|e| e.to_string())?;
    let last = *trace.fixed_point();
    let exact = map.fixed_point();
    Ok(Trajectory {
        iterates: trace.iterates.iter().map(|p| [p.x, p.y]).collect(),
        cert_values: trace.cert_values,
        converged: trace.converged,
        steps: trace.steps,
        fixed_point: [last.x, last.y],
        closed_form: [exact.x, exact.y],
    })
}

#[derive(Debug, Serialize)]
pub struct FredholmView {
    pub kappa: f64,
    pub passes: bool,
    pub nodes: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub picard_iterations: Option<usize>,
    pub picard_gap: Option<f64>,
}

/// Constant kernels `c` on `[0, b]` with `g₁ = g1`, `g₂ = g2`.
pub fn fredholm(c: f64, b: f64, g1: f64, g2: f64, m: usize) -> Result<FredholmView, String> {
    if !(2..=MAX_NODES).contains(&m) {
        return Err(format!("node count must lie in 2..={MAX_NODES}"));
    }
    let err = |e: cstar_pm::Error| e.to_string();
    let prob = FredholmProblem::constant((0.0, b), c, [GSpec::Constant(g1), GSpec::Constant(g2)], m).map_err(err)?;
    let cond = check_contraction_condition(&prob).map_err(err)?;
    let sys = discretize(&prob).map_err(err)?;
    let direct = direct_solve(&sys).map_err(err)?;
    let picard = cond.passes.then(|| picard_iterate(&sys, 1e-10, 10_000).ok()).flatten();
    Ok(FredholmView {
        kappa: cond.kappa,
        passes: cond.passes,
        picard_iterations: picard.as_ref().map(|p| p.iterations),
        picard_gap: picard.as_ref().map(|p| p.sup_distance(&direct)),
        nodes: direct.nodes,
        phi1: direct.phi1,
        phi2: direct.phi2,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn pm_profile(px: f64, py: f64, qx: f64, qy: f64, s_max: f64, samples: usize) -> Result<String, JsError> {
    to_js(profile((px, py), (qx, qy), s_max, samples))
}

#[wasm_bindgen]
pub fn picard_trajectory(a1: f64, a2: f64, l1: f64, l2: f64, x0: f64, y0: f64) -> Result<String, JsError> {
    to_js(trajectory((a1, a2), (l1, l2), (x0, y0)))
}

#[wasm_bindgen]
pub fn fredholm_constant(c: f64, b: f64, g1: f64, g2: f64, m: usize) -> Result<String, JsError> {
    to_js(fredholm(c, b, g1, g2, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_shapes() {
        let p = profile((0.0, 0.0), (3.0, 4.0), 16.0, 33).unwrap();
        assert_eq!(p.s.len(), 33);
        assert_eq!(p.trace[0], 0.0);
        assert_eq!(p.ratio[0], 0.0);
        assert!(p.trace.windows(2).all(|w| w[0] <= w[1]));
        assert!(p.ratio.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(p.trace_distance, 7.0);
        let same = profile((1.0, 1.0), (1.0, 1.0), 1.0, 3).unwrap();
        assert_eq!(same.trace, vec![0.0, 1.0, 1.0]);
        assert!(profile((0.0, 0.0), (1.0, 1.0), -1.0, 10).is_err());
        assert!(profile((0.0, 0.0), (1.0, 1.0), 1.0, 1).is_err());
    }

    #[test]
    fn trajectory_reaches_closed_form() {
        let t = trajectory((1.0, 3.0), (0.5, 0.25), (100.0, -100.0)).unwrap();
        assert!(t.converged);
        assert!((t.fixed_point[0] - 2.0).abs() < 1e-8 && (t.fixed_point[1] - 4.0).abs() < 1e-8);
        assert_eq!(t.closed_form, [2.0, 4.0]);
        assert_eq!(t.iterates.len(), t.cert_values.len() + 1);
        assert!(trajectory((1.0, 3.0), (1.5, 0.25), (0.0, 0.0)).is_err());
    }

    #[test]
    fn fredholm_view_agrees() {
        let v = fredholm(0.2, 1.0, 1.0, 1.0, 41).unwrap();
        assert!(v.passes && (v.kappa - 0.8).abs() < 1e-12);
        assert!(v.picard_gap.unwrap() < 1e-8);
        let bad = fredholm(0.3, 1.0, 1.0, 1.0, 21).unwrap();
        assert!(!bad.passes && bad.picard_iterations.is_none());
        assert!(fredholm(0.2, 1.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn exports_serialize() {
        assert!(to_js(profile((0.0, 0.0), (1.0, 2.0), 4.0, 5)).unwrap().starts_with("{\"s\":"));
    }
}
