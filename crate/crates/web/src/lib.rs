//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string; the plain `*_json` functions behind them run natively as well.

use geoflow_core::bryant::{self, OdeConfig};
use geoflow_core::catalog::{self, WarpedSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on points returned per curve.
pub const MAX_CURVE_POINTS: usize = 2000;

#[derive(Debug, Serialize)]
pub struct ProfileCurves {
    pub t: Vec<f64>,
    pub h: Vec<f64>,
    pub r: Vec<f64>,
    pub k_rad: Vec<f64>,
    pub k_tan: Vec<f64>,
    pub mu: Vec<f64>,
    pub t_end: f64,
    pub stop: Option<String>,
    pub positivity_lost_at: Option<f64>,
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct CurvatureScan {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    /// Ricci eigenvalue along `∂t`.
    pub xi1: Vec<f64>,
    /// Ricci eigenvalue along the fiber.
    pub xi2: Vec<f64>,
    pub mu: Vec<f64>,
    pub bach_norm: Vec<f64>,
    pub soliton_residual: Vec<f64>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Warped-product ODE profile from tip data, thinned to at most
/// [`MAX_CURVE_POINTS`] samples.
pub fn bryant_profile_json(n: usize, rho: f64, lambda: f64, kappa: f64, t_max: f64) -> Result<String, String> {
    let cfg = OdeConfig {
        n,
        rho,
        lambda,
        kappa,
        t_max,
        ..OdeConfig::default()
    };
    let p = bryant::integrate(&cfg).map_err(|e| e.to_string())?;
    let stride = p.samples.len().div_ceil(MAX_CURVE_POINTS).max(1);
    let kept: Vec<_> = p.samples.iter().step_by(stride).collect();
    to_json(&ProfileCurves {
        t: kept.iter().map(|s| s.t).collect(),
        h: kept.iter().map(|s| s.h).collect(),
        r: kept.iter().map(|s| s.r).collect(),
        k_rad: kept.iter().map(|s| s.k_rad).collect(),
        k_tan: kept.iter().map(|s| s.k_tan).collect(),
        mu: kept.iter().map(|s| s.mu).collect(),
        t_end: p.t_end(),
        stop: p.stop.map(|(e, t)| format!("{e:?} at t = {t:.4}")),
        positivity_lost_at: p.first_nonpositive().map(|s| s.t),
        max_residual: p.max_residual(),
    })
}

/// `R`, `ξ₁`, `ξ₂`, `μ` and `|B|` along `t` for a warped spec such as
/// `n=3;fiber=flat;h=sqrt(t^2+1);f=...`.
pub fn warped_scan_json(spec: &str, rho: f64, lambda: f64, t_lo: f64, t_hi: f64, count: usize) -> Result<String, String> {
    if count < 2 || !(t_hi > t_lo) {
        return Err("need at least two points on a non-empty interval".into());
    }
    let spec = WarpedSpec::parse(spec).map_err(|e| e.to_string())?;
    let inst = catalog::make_warped(&spec, rho, lambda).map_err(|e| e.to_string())?;
    let n = inst.dim();
    let nf = n as f64;
    let mut scan = CurvatureScan {
        t: Vec::with_capacity(count),
        r: Vec::new(),
        xi1: Vec::new(),
        xi2: Vec::new(),
        mu: Vec::new(),
        bach_norm: Vec::new(),
        soliton_residual: Vec::new(),
    };
    for k in 0..count {
        let t = t_lo + (t_hi - t_lo) * k as f64 / (count - 1) as f64;
        let mut x = vec![0.0; n];
        x[0] = t;
        let p = inst.evaluate(&x).map_err(|e| e.to_string())?;
        let b = &p.bundle;
        let xi1 = b.ricci[[0, 0]] / b.g[[0, 0]];
        let xi2 = b.ricci[[1, 1]] / b.g[[1, 1]];
        let r = b.scalar;
        let mu = nf * xi1 * xi1 - 2.0 * r * xi1 - ((nf - 1.0) * b.ricci_norm_sq() - r * r);
        scan.t.push(t);
        scan.r.push(r);
        scan.xi1.push(xi1);
        scan.xi2.push(xi2);
        scan.mu.push(mu);
        scan.bach_norm.push(b.norm2(&b.bach));
        scan.soliton_residual.push(p.soliton_residual_max());
    }
    to_json(&scan)
}

/// Survival and positivity of the steady-type trajectory for `count` values
/// of `ρ` in `[rho_lo, rho_hi]`.
pub fn rho_sweep_json(n: usize, rho_lo: f64, rho_hi: f64, count: usize, t_max: f64) -> Result<String, String> {
    if count == 0 {
        return Err("count must be positive".into());
    }
    let outcomes: Vec<_> = (0..count)
        .map(|k| {
            let rho = if count == 1 {
                rho_lo
            } else {
                rho_lo + (rho_hi - rho_lo) * k as f64 / (count - 1) as f64
            };
            bryant::sweep_outcome(&OdeConfig {
                n,
                rho,
                t_max,
                ..OdeConfig::default()
            })
        })
        .collect();
    to_json(&outcomes)
}

#[wasm_bindgen]
pub fn bryant_profile(n: usize, rho: f64, lambda: f64, kappa: f64, t_max: f64) -> Result<String, JsValue> {
    bryant_profile_json(n, rho, lambda, kappa, t_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn warped_scan(spec: &str, rho: f64, lambda: f64, t_lo: f64, t_hi: f64, count: usize) -> Result<String, JsValue> {
    warped_scan_json(spec, rho, lambda, t_lo, t_hi, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn rho_sweep(n: usize, rho_lo: f64, rho_hi: f64, count: usize, t_max: f64) -> Result<String, JsValue> {
    rho_sweep_json(n, rho_lo, rho_hi, count, t_max).map_err(|e| JsValue::from_str(&e))
}
