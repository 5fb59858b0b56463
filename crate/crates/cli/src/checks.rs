//! The pointwise identity suite behind `geoflow verify`.

use geoflow_core::catalog::{self, CatalogEntry, CatalogOptions};
use geoflow_core::geometry::BundleOptions;
use geoflow_core::soliton::{RadialSpectrum, SolitonInstance, SolitonPoint};
use geoflow_core::Error as CoreError;
use ndarray::{Array, Dimension};
use rayon::prelude::*;

use crate::args::VerifyArgs;
use crate::error::{CliError, Outcome};
use crate::io;
use crate::report::{CheckRecord, Parameters, Precondition, ToleranceLadder, Verdict, VerificationReport, SCHEMA};

/// `μ ≤ MU_SIGN_TOL` is the sign check.
pub const MU_SIGN_TOL: f64 = 1e-8;
/// Above `−MU_EQUALITY` the fiber eigenvalues must coincide.
pub const MU_EQUALITY: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub points: usize,
    pub seed: u64,
    pub tol_scale: f64,
    pub options: BundleOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            points: 50,
            seed: 42,
            tol_scale: 1.0,
            options: BundleOptions::default(),
        }
    }
}

struct CheckDef {
    id: &'static str,
    description: &'static str,
    order: u8,
    /// Replaces the ladder tolerance (still scaled).
    fixed_tol: Option<f64>,
}

const fn def(id: &'static str, description: &'static str, order: u8) -> CheckDef {
    CheckDef {
        id,
        description,
        order,
        fixed_tol: None,
    }
}

const CHECKS: [CheckDef; 22] = [
    def("soliton-residual", "Ric + Hess f - (rho R + lambda) g", 2),
    def("trace-identity", "Laplacian of f against the traced equation", 2),
    def("radial-ricci-identity", "Ric(grad f) = (1 - 2(n-1)rho)/2 dR", 3),
    def("scalar-identity", "second-order identity for the scalar curvature", 4),
    def("cotton-formula", "Cotton tensor against its soliton expression", 3),
    def("commutator-defect", "third covariant derivatives of f against the Ricci identity", 3),
    def("second-bianchi", "divergence of Riemann against derivatives of Ricci", 3),
    def("symmetries", "algebraic symmetries of Riemann, Ricci, Weyl and Bach", 4),
    def("rectifiability", "dR parallel to df", 3),
    def("xi1-routes", "radial Ricci eigenvalue by formula and by Rayleigh quotient", 3),
    def("radial-eigenvector", "grad f is a Ricci eigenvector", 3),
    CheckDef {
        id: "mu-sign",
        description: "radial Bach eigenvalue mu is non-positive",
        order: 3,
        fixed_tol: Some(MU_SIGN_TOL),
    },
    def("mu-eigen-form", "mu against the fiber eigenvalue form", 3),
    def("two-eigenvalue", "fiber eigenvalue spread where mu vanishes", 3),
    def("bach-radial", "B(grad f) = mu/((n-1)(n-2)^2) df", 4),
    def("bach-first-formula", "Bach tensor against its Hessian-of-R expression", 4),
    def("bach-second-formula", "Bach tensor against its xi1 expression", 4),
    def("bach-formula-pair", "the two Bach expressions against each other", 4),
    def("hess-r-identity", "Hessian of R along rectifiable solitons", 4),
    def("lcf-divrm", "radial divergence of Riemann where Cotton vanishes", 4),
    def("lcf-riemann", "radial Riemann where Cotton vanishes", 3),
    def("fiber-ricci", "fiber Ricci equation of a warped product", 2),
];

/// Checked after all points: where `B(∇f, ∇f) ≥ 0` everywhere sampled, `B`
/// must vanish.
const RADIAL_BACH_VANISHING: CheckDef = def(
    "nonnegative-radial-bach",
    "Bach tensor vanishes when B(grad f, grad f) >= 0 at every sampled point",
    4,
);

#[derive(Clone, Debug)]
enum Sample {
    Value(f64),
    Skip(String),
    Unmet(String),
}

fn max_abs<D: Dimension>(a: &Array<f64, D>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Sorts a core error into skip, unmet precondition or hard failure.
fn classify(r: Result<f64, CoreError>) -> Result<Sample, CoreError> {
    match r {
        Ok(v) => Ok(Sample::Value(v)),
        Err(CoreError::CriticalPoint { .. }) => Ok(Sample::Skip("critical point".into())),
        Err(CoreError::NotWarped) => Ok(Sample::Skip("not a warped product".into())),
        Err(CoreError::MissingPotential) => Ok(Sample::Skip("no potential".into())),
        Err(CoreError::PreconditionUnmet {
            check: "vanishing Cotton tensor",
            ..
        }) => Ok(Sample::Skip("Cotton tensor does not vanish".into())),
        Err(e @ (CoreError::PreconditionUnmet { .. } | CoreError::RouteDisagreement { .. })) => {
            Ok(Sample::Unmet(e.to_string()))
        }
        Err(e) => Err(e),
    }
}

struct PointResult {
    samples: Vec<Sample>,
    /// `(B(∇f,∇f)/|∇f|², |B|)` at regular points.
    radial_bach: Option<(f64, f64)>,
}

fn spectrum_value(
    spec: &Result<RadialSpectrum, CoreError>,
    f: impl Fn(&RadialSpectrum) -> f64,
) -> Result<f64, CoreError> {
    spec.as_ref().map(f).map_err(Clone::clone)
}

fn evaluate_point(inst: &SolitonInstance, x: &[f64], options: &BundleOptions) -> Result<PointResult, CoreError> {
    let p: SolitonPoint = inst.evaluate_with(x, options)?;
    let b = &p.bundle;
    let ids = p.identity_residuals();
    let spec = p.radial_spectrum();
    let xi_routes = match &spec {
        Ok(s) => Ok((s.xi1_formula - s.xi1_rayleigh).abs()),
        Err(CoreError::RouteDisagreement { formula, rayleigh }) => Ok((formula - rayleigh).abs()),
        Err(e) => Err(e.clone()),
    };
    let mu = p.mu();
    let bach_def = &b.bach;
    let first = p.bach_first_formula();
    let second = p.bach_second_formula();

    let samples = vec![
        classify(Ok(p.soliton_residual_max()))?,
        classify(ids.as_ref().map(|r| r.trace.abs()).map_err(Clone::clone))?,
        classify(ids.as_ref().map(|r| max_abs(&r.radial_ricci)).map_err(Clone::clone))?,
        classify(ids.as_ref().map(|r| r.scalar_identity.abs()).map_err(Clone::clone))?,
        classify(p.cotton_soliton_residual().map(|c| max_abs(&c)))?,
        classify(b.commutator_defect().map(|d| max_abs(&d)).ok_or(CoreError::MissingPotential))?,
        classify(Ok(max_abs(&b.second_bianchi_defect())))?,
        classify(Ok(b.symmetry_defects().max()))?,
        classify(p.rectifiability_defect())?,
        classify(xi_routes)?,
        classify(spectrum_value(&spec, |s| s.eigenvector_residual))?,
        classify(mu.clone())?,
        classify(mu.clone().and_then(|m| spectrum_value(&spec, |s| (m - s.mu_eigen_form()).abs())))?,
        match mu.clone() {
            Ok(m) if m <= -MU_EQUALITY => Sample::Skip("mu is strictly negative".into()),
            _ => classify(spectrum_value(&spec, |s| s.fiber_spread()))?,
        },
        classify(p.bach_radial_residual().map(|r| b.covector_norm(&r)))?,
        classify(first.as_ref().map(|f| max_abs(&(bach_def - f))).map_err(Clone::clone))?,
        classify(second.as_ref().map(|s| max_abs(&(bach_def - s))).map_err(Clone::clone))?,
        classify(match (&first, &second) {
            (Ok(f), Ok(s)) => Ok(max_abs(&(f - s))),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        })?,
        classify(p.hess_r_identity_residual().map(|h| max_abs(&h.hess).max(h.trace.abs())))?,
        classify(p.lcf_radial_residuals().map(|l| max_abs(&l.divrm)))?,
        classify(p.lcf_radial_residuals().map(|l| max_abs(&l.riem)))?,
        classify(p.fiber_ricci_residual().map(f64::abs))?,
    ];

    let norm = p.gradf_norm();
    let radial_bach = (norm > inst.regular_threshold).then(|| {
        let g = &p.potential().grad_vec;
        (g.dot(&b.bach.dot(g)) / (norm * norm), b.norm2(&b.bach))
    });
    Ok(PointResult { samples, radial_bach })
}

fn summarize(
    id: &str,
    description: &str,
    order: u8,
    tolerance: f64,
    samples: &[&Sample],
) -> CheckRecord {
    let mut values = Vec::new();
    let (mut skipped, mut unmet) = (0usize, 0usize);
    let (mut skip_note, mut unmet_note) = (None, None);
    for s in samples {
        match s {
            Sample::Value(v) => values.push(*v),
            Sample::Skip(r) => {
                skipped += 1;
                skip_note.get_or_insert_with(|| r.clone());
            }
            Sample::Unmet(r) => {
                unmet += 1;
                unmet_note.get_or_insert_with(|| r.clone());
            }
        }
    }
    let max = values.iter().copied().reduce(f64::max);
    let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
    let precondition = if unmet > 0 {
        Precondition::Unmet
    } else if values.is_empty() {
        Precondition::NotApplicable
    } else {
        Precondition::Met
    };
    let pass = match precondition {
        Precondition::Unmet => false,
        Precondition::NotApplicable => true,
        Precondition::Met => max.is_some_and(|m| m <= tolerance),
    };
    let note = if unmet > 0 {
        unmet_note.map(|r| format!("{unmet} point(s): {r}"))
    } else if skipped > 0 {
        skip_note.map(|r| format!("{skipped} point(s) skipped: {r}"))
    } else {
        None
    };
    CheckRecord {
        id: id.to_string(),
        description: description.to_string(),
        derivative_order: order,
        max_residual: max,
        mean_residual: mean,
        tolerance,
        evaluated: values.len(),
        skipped: skipped + unmet,
        precondition,
        note,
        pass,
    }
}

/// Runs every check at `cfg.points` seeded points of the entry's domain.
pub fn verify_entry(entry: &CatalogEntry, cfg: &VerifyConfig, perturb: Option<f64>) -> Result<VerificationReport, CoreError> {
    let inst = &entry.instance;
    let ladder = ToleranceLadder::scaled(cfg.tol_scale);
    let points = entry.sample(cfg.points, cfg.seed);
    let results: Vec<PointResult> = points
        .par_iter()
        .map(|x| evaluate_point(inst, x, &cfg.options))
        .collect::<Result<_, _>>()?;

    let mut checks: Vec<CheckRecord> = CHECKS
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let tol = d.fixed_tol.map_or_else(|| ladder.for_order(d.order), |t| t * cfg.tol_scale);
            let column: Vec<&Sample> = results.iter().map(|r| &r.samples[k]).collect();
            summarize(d.id, d.description, d.order, tol, &column)
        })
        .collect();

    let radial: Vec<(f64, f64)> = results.iter().filter_map(|r| r.radial_bach).collect();
    let vanishing_tol = ladder.for_order(RADIAL_BACH_VANISHING.order);
    let applicable = !radial.is_empty() && radial.iter().all(|&(q, _)| q >= -vanishing_tol);
    let column: Vec<Sample> = radial
        .iter()
        .map(|&(_, norm)| {
            if applicable {
                Sample::Value(norm)
            } else {
                Sample::Skip("B(grad f, grad f) < 0 somewhere".into())
            }
        })
        .collect();
    checks.push(summarize(
        RADIAL_BACH_VANISHING.id,
        RADIAL_BACH_VANISHING.description,
        RADIAL_BACH_VANISHING.order,
        vanishing_tol,
        &column.iter().collect::<Vec<_>>(),
    ));

    let overall = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        schema: SCHEMA,
        instance: entry.name().to_string(),
        parameters: Parameters {
            n: inst.dim(),
            rho: inst.rho,
            lambda: inst.lambda,
            seed: cfg.seed,
            points: cfg.points,
            perturb,
        },
        tolerances: ladder,
        checks,
        overall: Verdict::from_pass(overall),
    })
}

/// Resolves `--example`/`--warped` plus overrides and the optional perturbation.
pub fn resolve_entry(args: &VerifyArgs) -> Result<CatalogEntry, CliError> {
    let name = match (&args.example, &args.warped) {
        (Some(e), None) => e.clone(),
        (None, Some(w)) => format!("warped:{w}"),
        _ => return Err(CliError::Usage("give exactly one of --example or --warped".into())),
    };
    let opts = CatalogOptions {
        n: args.n,
        rho: args.rho,
        lambda: args.lambda,
    };
    let mut entry = catalog::lookup(&name, &opts)?;
    if let Some(eps) = args.perturb {
        entry.instance = catalog::perturb_potential(&entry.instance, eps);
    }
    Ok(entry)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    if !(args.tol_scale.is_finite() && args.tol_scale > 0.0) {
        return Err(CliError::Usage(format!("--tol-scale must be positive (got {})", args.tol_scale)));
    }
    if args.points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    let entry = resolve_entry(args)?;
    let cfg = VerifyConfig {
        points: args.points,
        seed: args.seed,
        tol_scale: args.tol_scale,
        options: BundleOptions::default(),
    };
    let report = verify_entry(&entry, &cfg, args.perturb)?;
    print!("{}", report.render());
    if let Some(path) = &args.json {
        io::write_json(path, &report)?;
    }
    Ok(Outcome::from_pass(report.passed()))
}
