//! `geoflow tensors`: every curvature tensor at one chart point.

use geoflow_core::catalog::{self, CatalogOptions};
use geoflow_core::geometry::CurvatureBundle;
use geoflow_core::soliton::SolitonPoint;
use ndarray::{ArrayD, ArrayView, Dimension};
use serde::Serialize;

use crate::args::TensorArgs;
use crate::error::{CliError, Outcome};
use crate::io;
use crate::report::SCHEMA;

#[derive(Clone, Debug, Serialize)]
pub struct LabeledTensor {
    pub name: String,
    pub shape: Vec<usize>,
    /// `(label, value)` in row-major order; `Gamma^k_ij` is stored at `[k, i, j]`.
    pub entries: Vec<(String, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolitonSummary {
    pub rho: f64,
    pub lambda: f64,
    pub residual_max: f64,
    pub gradf_norm: f64,
    pub regular: bool,
    /// `ξ₁` followed by the fiber eigenvalues.
    pub xi: Option<Vec<f64>>,
    pub mu: Option<f64>,
    /// `gradient` at regular points, `warped-axis` at critical points of a warped product.
    pub mu_source: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorDump {
    pub schema: u32,
    pub instance: String,
    pub point: Vec<f64>,
    pub dim: usize,
    pub warp_h: Option<f64>,
    pub scalar: f64,
    pub lap_scalar: f64,
    pub ricci_eigenvalues: Vec<f64>,
    pub soliton: Option<SolitonSummary>,
    pub tensors: Vec<LabeledTensor>,
}

fn labeled<D: Dimension>(name: &str, prefix: &str, raised: usize, a: ArrayView<f64, D>) -> LabeledTensor {
    let a: ArrayD<f64> = a.to_owned().into_dyn();
    let entries = a
        .indexed_iter()
        .map(|(idx, &v)| {
            let digits: Vec<String> = idx.slice().iter().map(usize::to_string).collect();
            let label = if raised > 0 {
                format!("{prefix}^{}_{}", digits[..raised].concat(), digits[raised..].concat())
            } else {
                format!("{prefix}_{}", digits.concat())
            };
            (label, v)
        })
        .collect();
    LabeledTensor {
        name: name.to_string(),
        shape: a.shape().to_vec(),
        entries,
    }
}

fn bundle_tensors(b: &CurvatureBundle) -> Vec<LabeledTensor> {
    let mut out = vec![
        labeled("metric", "g", 0, b.g.view()),
        labeled("metric_inverse", "g", 2, b.g_inv.view()),
        labeled("christoffel", "Gamma", 1, b.christoffel.view()),
        labeled("riemann", "R", 0, b.riemann.view()),
        labeled("ricci", "Ric", 0, b.ricci.view()),
        labeled("weyl", "W", 0, b.weyl.view()),
        labeled("cotton", "C", 0, b.cotton.view()),
        labeled("bach", "B", 0, b.bach.view()),
        labeled("div_riemann", "divRm", 0, b.div_riemann.view()),
        labeled("grad_scalar", "dR", 0, b.grad_scalar.view()),
        labeled("hess_scalar", "HessR", 0, b.hess_scalar.view()),
    ];
    if let Some(p) = &b.potential {
        out.push(labeled("grad_potential", "df", 0, p.grad.view()));
        out.push(labeled("hess_potential", "Hessf", 0, p.hess.view()));
    }
    out
}

/// `μ` from `ξ₁ = Ric(e₁, e₁)` for a unit vector `e₁`.
fn mu_from_xi1(b: &CurvatureBundle, xi1: f64) -> f64 {
    let n = b.dim as f64;
    let r = b.scalar;
    n * xi1 * xi1 - 2.0 * r * xi1 - ((n - 1.0) * b.ricci_norm_sq() - r * r)
}

fn soliton_summary(p: &SolitonPoint) -> SolitonSummary {
    let b = &p.bundle;
    let mut s = SolitonSummary {
        rho: p.rho,
        lambda: p.lambda,
        residual_max: p.soliton_residual_max(),
        gradf_norm: p.gradf_norm(),
        regular: p.gradf_norm() > p.regular_threshold,
        xi: None,
        mu: None,
        mu_source: None,
        note: None,
    };
    if s.regular {
        match (p.radial_spectrum(), p.mu()) {
            (Ok(spec), Ok(mu)) => {
                s.xi = Some(spec.xi);
                s.mu = Some(mu);
                s.mu_source = Some("gradient".into());
            }
            (Err(e), _) | (_, Err(e)) => s.note = Some(e.to_string()),
        }
    } else if p.warped.is_some() {
        // the t axis is the radial direction of a warped product
        let xi1 = b.ricci[[0, 0]] / b.g[[0, 0]];
        let mut rest = b.ricci_eigenvalues();
        if let Some(k) = rest
            .iter()
            .enumerate()
            .min_by(|a, c| (a.1 - xi1).abs().total_cmp(&(c.1 - xi1).abs()))
            .map(|(k, _)| k)
        {
            rest.remove(k);
        }
        let mut xi = vec![xi1];
        xi.extend(rest);
        s.xi = Some(xi);
        s.mu = Some(mu_from_xi1(b, xi1));
        s.mu_source = Some("warped-axis".into());
        s.note = Some("critical point; radial direction taken along the warped axis".into());
    } else {
        s.note = Some("critical point; no radial direction".into());
    }
    s
}

pub fn parse_point(src: &str) -> Result<Vec<f64>, CliError> {
    src.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--at: `{t}` is not a number")))
        })
        .collect()
}

pub fn dump(args: &TensorArgs) -> Result<TensorDump, CliError> {
    let opts = CatalogOptions {
        n: args.n,
        rho: args.rho,
        lambda: args.lambda,
    };
    let entry = catalog::lookup(&args.example, &opts)?;
    let point = parse_point(&args.at)?;
    let inst = &entry.instance;
    let p = inst.evaluate(&point)?;
    let b = &p.bundle;
    let warp_h = inst
        .warped
        .map(|tag| (b.g[[1, 1]] / tag.fiber_factor(&point[1..])).sqrt());
    Ok(TensorDump {
        schema: SCHEMA,
        instance: entry.name().to_string(),
        point,
        dim: b.dim,
        warp_h,
        scalar: b.scalar,
        lap_scalar: b.lap_scalar,
        ricci_eigenvalues: b.ricci_eigenvalues(),
        soliton: Some(soliton_summary(&p)),
        tensors: bundle_tensors(b),
    })
}

pub fn render(d: &TensorDump) -> String {
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(", ");
    let mut out = format!("{} at ({})\n", d.instance, fmt(&d.point));
    if let Some(h) = d.warp_h {
        out.push_str(&format!("h = {h:.12}\n"));
    }
    out.push_str(&format!("R = {:.12}\nlap R = {:.12}\n", d.scalar, d.lap_scalar));
    out.push_str(&format!("ricci eigenvalues: {}\n", fmt(&d.ricci_eigenvalues)));
    if let Some(s) = &d.soliton {
        out.push_str(&format!(
            "soliton residual = {:.3e}\n|grad f| = {:.12}\n",
            s.residual_max, s.gradf_norm
        ));
        if let Some(xi) = &s.xi {
            out.push_str(&format!("xi = {}\n", fmt(xi)));
        }
        if let Some(mu) = s.mu {
            out.push_str(&format!("mu = {mu:.12} ({})\n", s.mu_source.as_deref().unwrap_or("")));
        }
        if let Some(note) = &s.note {
            out.push_str(&format!("note: {note}\n"));
        }
    }
    for t in &d.tensors {
        out.push_str(&format!("[{}]\n", t.name));
        for (label, v) in &t.entries {
            out.push_str(&format!("  {label} = {v:.15e}\n"));
        }
    }
    out
}

pub fn cmd_tensors(args: &TensorArgs) -> Result<Outcome, CliError> {
    let d = dump(args)?;
    print!("{}", render(&d));
    if let Some(path) = &args.json {
        io::write_json(path, &d)?;
    }
    Ok(Outcome::Pass)
}
