//! The acceptance criteria behind `geoflow suite`.

use std::sync::Arc;

use geoflow_core::bryant::{self, OdeConfig};
use geoflow_core::catalog::{self, CatalogEntry, CatalogOptions};
use geoflow_core::geometry::{
    commutator_defect_with, conformal_rescale, evaluate_bundle_with, BundleOptions, ScalarFieldFn, SignFlip,
};
use geoflow_core::jets::Jet;
use geoflow_core::Error as CoreError;
use ndarray::{Array, Dimension};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{BryantArgs, SuiteArgs};
use crate::bryant_cmd;
use crate::checks::{verify_entry, VerifyConfig};
use crate::error::{CliError, Outcome};
use crate::io;
use crate::jet_checks;
use crate::report::{Precondition, VerificationReport, SCHEMA};

pub const CRITERIA: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];
pub const SEED: u64 = 42;
pub const POINTS: usize = 50;
pub const ORACLE_POINTS: usize = 20;

pub const SOLITON_BOUND: f64 = 1e-8;
pub const IDENTITY_BOUND: f64 = 1e-7;
pub const BACH_RADIAL_BOUND: f64 = 1e-6;
pub const MU_BOUND: f64 = 1e-8;
pub const SPREAD_BOUND: f64 = 1e-6;
pub const ORACLE_BOUND: f64 = 1e-6;
pub const BACH_VANISHING_BOUND: f64 = 1e-7;
pub const CONFORMAL_BOUND: f64 = 1e-7;
pub const COMMUTATOR_BOUND: f64 = 1e-7;
pub const ODE_BOUND: f64 = 1e-6;
pub const HAMILTON_BOUND: f64 = 1e-6;
pub const EMBED_BOUND: f64 = 1e-5;
pub const REINTEGRATION_BOUND: f64 = 1e-7;
pub const PERTURBATION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Cmp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl Cmp {
    fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Cmp::Lt => value < bound,
            Cmp::Le => value <= bound,
            Cmp::Gt => value > bound,
            Cmp::Eq => value == bound,
            Cmp::Ne => value != bound,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Eq => "==",
            Cmp::Ne => "!=",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub cmp: Cmp,
    pub bound: f64,
    /// False when the quantity has no sampled point to be measured at.
    pub applicable: bool,
    pub pass: bool,
}

impl Measurement {
    pub fn new(label: impl Into<String>, value: f64, cmp: Cmp, bound: f64) -> Self {
        Self {
            label: label.into(),
            value,
            cmp,
            bound,
            applicable: true,
            pass: cmp.holds(value, bound),
        }
    }

    fn not_applicable(label: impl Into<String>, cmp: Cmp, bound: f64) -> Self {
        Self {
            label: label.into(),
            value: 0.0,
            cmp,
            bound,
            applicable: false,
            pass: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grade {
    Assertion,
    /// Qualitative behavior that numerics cannot certify.
    Observation,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub schema: u32,
    pub id: u8,
    pub title: String,
    pub grade: Grade,
    pub seed: u64,
    pub sign_flip: Option<String>,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl CriterionReport {
    pub fn failing(&self) -> Vec<&Measurement> {
        self.measurements.iter().filter(|m| !m.pass).collect()
    }

    /// One status line, then one line per failing measurement.
    pub fn render(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut out = format!("criterion {:02} {status}  {}\n", self.id, self.title);
        for m in self.failing() {
            out.push_str(&format!(
                "    failing: {} = {:.3e} (required {} {:.1e})\n",
                m.label,
                m.value,
                m.cmp.symbol(),
                m.bound
            ));
        }
        for note in &self.notes {
            out.push_str(&format!("    note: {note}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteContext {
    pub options: BundleOptions,
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "steady agila example: soliton residual and first identities",
        2 => "shrinking agila example: soliton residual and first identities",
        3 => "gradient of f is a Bach eigenvector",
        4 => "radial Bach eigenvalue is non-positive",
        5 => "definitional Bach tensor against both soliton formulas",
        6 => "Bach tensor vanishes on conformally flat and Einstein entries",
        7 => "conformal covariance of the Bach tensor in dimension four",
        8 => "Ricci-identity sign sentinel",
        9 => "warped-product steady soliton from tip data",
        10 => "positive-curvature window in rho",
        11 => "jet engine algebra and chain rule",
        12 => "negative controls",
        _ => "unknown criterion",
    }
}

fn max_abs<D: Dimension>(a: &Array<f64, D>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn entry(name: &str, n: Option<usize>) -> Result<CatalogEntry, CoreError> {
    catalog::lookup(
        name,
        &CatalogOptions {
            n,
            ..CatalogOptions::default()
        },
    )
}

fn verify(e: &CatalogEntry, points: usize, ctx: &SuiteContext) -> Result<VerificationReport, CoreError> {
    let cfg = VerifyConfig {
        points,
        seed: SEED,
        tol_scale: 1.0,
        options: ctx.options,
    };
    verify_entry(e, &cfg, None)
}

/// A report check as a measurement; `required` checks must have been evaluated.
fn from_check(report: &VerificationReport, id: &str, cmp: Cmp, bound: f64, required: bool) -> Measurement {
    let label = format!("{}/{id}", report.instance);
    match report.check(id) {
        Some(c) if c.precondition == Precondition::Unmet => Measurement::new(label, f64::INFINITY, cmp, bound),
        Some(c) => match c.max_residual {
            Some(v) => Measurement::new(label, v, cmp, bound),
            None if required => Measurement::new(label, f64::INFINITY, cmp, bound),
            None => Measurement::not_applicable(label, cmp, bound),
        },
        None => Measurement::new(label, f64::INFINITY, cmp, bound),
    }
}

/// Soliton residual and the first identities on one instance.
pub fn identity_measurements(e: &CatalogEntry, ctx: &SuiteContext) -> Result<Vec<Measurement>, CoreError> {
    let r = verify(e, POINTS, ctx)?;
    let mut out = vec![from_check(&r, "soliton-residual", Cmp::Lt, SOLITON_BOUND, true)];
    for id in ["trace-identity", "radial-ricci-identity", "scalar-identity", "cotton-formula"] {
        out.push(from_check(&r, id, Cmp::Lt, IDENTITY_BOUND, true));
    }
    Ok(out)
}

fn agila(which: u8, ctx: &SuiteContext) -> Result<Vec<Measurement>, CoreError> {
    identity_measurements(&entry(&format!("agila{which}"), None)?, ctx)
}

fn bach_radial(ctx: &SuiteContext) -> Result<Vec<Measurement>, CoreError> {
    let mut out = Vec::new();
    for name in ["agila1", "agila2", "rigid-r2xs2"] {
        let r = verify(&entry(name, None)?, POINTS, ctx)?;
        out.push(from_check(&r, "bach-radial", Cmp::Lt, BACH_RADIAL_BOUND, true));
    }
    Ok(out)
}

fn mu_sign(ctx: &SuiteContext) -> Result<Vec<Measurement>, CoreError> {
    let mut out = Vec::new();
    for e in catalog::all_entries()? {
        let r = verify(&e, POINTS, ctx)?;
        out.push(from_check(&r, "mu-sign", Cmp::Le, MU_BOUND, false));
        out.push(from_check(&r, "two-eigenvalue", Cmp::Lt, SPREAD_BOUND, false));
    }
    Ok(out)
}

fn oracle_chain(ctx: &SuiteContext) -> Result<Vec<Measurement>, CoreError> {
    let mut out = Vec::new();
    for name in ["agila1", "agila2"] {
        let r = verify(&entry(name, None)?, ORACLE_POINTS, ctx)?;
        for id in ["bach-first-formula", "bach-second-formula", "bach-formula-pair"] {
            out.push(from_check(&r, id, Cmp::Lt, ORACLE_BOUND, true));
        }
    }
    Ok(out)
}

fn bach_vanishing(ctx: &SuiteContext) -> Result<Vec<Measurement>, CoreError> {
    let mut out = Vec::new();
    for (name, n) in [("cyl-sphere", Some(4)), ("sphere", Some(4)), ("agila1", None), ("agila2", None)] {
        let e = entry(name, n)?;
        let mut worst = 0.0f64;
        for x in e.sample(ORACLE_POINTS, SEED) {
            worst = worst.max(max_abs(&evaluate_bundle_with(&e.instance.metric, &x, &ctx.options)?.bach));
        }
        let label = format!("{}(n={})/bach-norm", name, e.instance.dim());
        out.push(Measurement::new(label, worst, Cmp::Lt, BACH_VANISHING_BOUND));
    }
    Ok(out)
}

/// `c₀ + c₁x₀ + c₂x₁x₂ + c₃x₀²x₃`.
fn polynomial_phi(c: [f64; 4]) -> ScalarFieldFn {
    Arc::new(move |x: &[Jet]| {
        let mut f = Jet::constant(x.len(), c[0]);
        f.accumulate(c[1], &x[0]);
        f.accumulate_product(c[2], &x[1], &x[2]);
        f.accumulate_product(c[3], &x[3], &(&x[0] * &x[0]));
        Ok(f)
    })
}

fn conformal_covariance(ctx: &SuiteContext) -> Result<Vec<Measurement>, CoreError> {
    let rigid = entry("rigid-r2xs2", None)?;
    let g = &rigid.instance.metric;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    let mut smallest_base = f64::INFINITY;
    for k in 0..5 {
        let c: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
        let phi = polynomial_phi(c);
        let rescaled = conformal_rescale(g, phi.clone());
        let mut worst = 0.0f64;
        for x in rigid.sample(3, SEED + k) {
            let base = evaluate_bundle_with(g, &x, &ctx.options)?;
            let new = evaluate_bundle_with(&rescaled, &x, &ctx.options)?;
            let xs: Vec<Jet> = x.iter().map(|&v| Jet::constant(x.len(), v)).collect();
            let factor = (-2.0 * phi(&xs)?.value()).exp();
            worst = worst.max(max_abs(&(&new.bach - &(&base.bach * factor))));
            smallest_base = smallest_base.min(max_abs(&base.bach));
        }
        out.push(Measurement::new(format!("phi{k}/bach-covariance"), worst, Cmp::Lt, CONFORMAL_BOUND));
    }
    out.push(Measurement::new("rigid-r2xs2/bach-norm", smallest_base, Cmp::Gt, 0.1));
    Ok(out)
}

/// Commutator defect on every catalog entry under the given options.
pub fn commutator_measurements(options: &BundleOptions) -> Result<Vec<Measurement>, CoreError> {
    let mut out = Vec::new();
    for e in catalog::all_entries()? {
        let worst = e
            .sample(POINTS, SEED)
            .par_iter()
            .map(|x| commutator_defect_with(&e.instance.metric, x, options).map(|d| max_abs(&d)))
            .collect::<Result<Vec<f64>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        out.push(Measurement::new(
            format!("commutator-defect/{}", e.name()),
            worst,
            Cmp::Lt,
            COMMUTATOR_BOUND,
        ));
    }
    Ok(out)
}

/// `h = √(t²+1)` and `f' = (8t/(t²+1) + 4t)/12` of the shrinking flat-fiber example.
fn shrinking_state(t: f64) -> [f64; 4] {
    let q = t * t + 1.0;
    [q.sqrt(), t / q.sqrt(), (4.0 * q.ln() + 2.0 * t * t + 1.0) / 12.0, (8.0 * t / q + 4.0 * t) / 12.0]
}

fn bryant_construction() -> Result<Vec<Measurement>, CoreError> {
    let cfg = OdeConfig::default();
    let p = bryant::integrate(&cfg)?;
    let min_k = p.samples.iter().fold(f64::INFINITY, |m, s| m.min(s.k_rad).min(s.k_tan));
    let (embed, _) = bryant_cmd::embed_residual(&p)?;
    let mut out = vec![
        Measurement::new("steady/t-end", p.t_end(), Cmp::Gt, cfg.t_max - 1e-9),
        Measurement::new("steady/min-sectional", min_k, Cmp::Gt, 0.0),
        Measurement::new("steady/ode-residual", p.max_residual(), Cmp::Lt, ODE_BOUND),
        Measurement::new("steady/hamilton-spread", p.hamilton_spread(), Cmp::Lt, HAMILTON_BOUND),
        Measurement::new("steady/embed-residual", embed, Cmp::Lt, EMBED_BOUND),
    ];
    let exact = OdeConfig {
        rho: 1.0 / 3.0,
        lambda: 1.0 / 3.0,
        kappa: 0.0,
        dt: 1e-4,
        t_max: 2.0,
        ..OdeConfig::default()
    };
    let q = bryant::integrate_from(&exact, 0.5, shrinking_state(0.5))?;
    let last = q.samples.last().expect("profile has samples");
    let want = shrinking_state(2.0);
    out.push(Measurement::new("shrinking/t-end", last.t, Cmp::Gt, 2.0 - 1e-9));
    out.push(Measurement::new("shrinking/h-error", (last.h - want[0]).abs(), Cmp::Lt, REINTEGRATION_BOUND));
    out.push(Measurement::new("shrinking/fp-error", (last.fp - want[3]).abs(), Cmp::Lt, REINTEGRATION_BOUND));
    Ok(out)
}

/// `bryant --n 3 --rho <rho> --t-max 50 --require-positive`.
pub fn window_args(rho: f64) -> BryantArgs {
    BryantArgs {
        n: 3,
        rho,
        lambda: 0.0,
        kappa: 1.0,
        c0: None,
        dt: 1e-3,
        t_max: 50.0,
        csv: None,
        json: None,
        embed_check: false,
        require_positive: true,
        t_min_survive: None,
    }
}

fn window() -> Vec<Measurement> {
    let mut out = Vec::new();
    for rho in [0.27, 0.30] {
        let code = bryant_cmd::outcome(&window_args(rho)).code() as f64;
        out.push(Measurement::new(format!("rho={rho}/exit-code"), code, Cmp::Ne, 0.0));
    }
    for rho in [-0.5, 0.0, 0.6] {
        let code = bryant_cmd::outcome(&window_args(rho)).code() as f64;
        out.push(Measurement::new(format!("rho={rho}/exit-code"), code, Cmp::Eq, 0.0));
    }
    out
}

fn jets() -> Result<Vec<Measurement>, CoreError> {
    let s = jet_checks::run(1000, SEED)?;
    Ok(vec![
        Measurement::new("jets/ring-laws", s.ring_max, Cmp::Lt, jet_checks::COEFF_TOL),
        Measurement::new("jets/leibniz", s.leibniz_max, Cmp::Lt, jet_checks::COEFF_TOL),
        Measurement::new("jets/division-scaled", s.division_max_scaled, Cmp::Lt, jet_checks::COEFF_TOL),
        Measurement::new("jets/chain-rule-relative", s.chain_rule_max_relative, Cmp::Lt, jet_checks::FD_REL_TOL),
    ])
}

fn failing_count(ms: &[Measurement]) -> f64 {
    ms.iter().filter(|m| !m.pass).count() as f64
}

fn negative_controls() -> Result<Vec<Measurement>, CoreError> {
    let mut perturbed = entry("agila1", None)?;
    perturbed.instance = catalog::perturb_potential(&perturbed.instance, PERTURBATION);
    let control = identity_measurements(&perturbed, &SuiteContext::default())?;
    let mut out = vec![Measurement::new(
        "perturbed-agila1/criterion-1-failures",
        failing_count(&control),
        Cmp::Gt,
        0.0,
    )];
    for (label, flip) in [("operator", SignFlip::Operator), ("lowering", SignFlip::Lowering)] {
        let ms = commutator_measurements(&BundleOptions { sign_flip: flip })?;
        out.push(Measurement::new(
            format!("flipped-{label}/criterion-8-failures"),
            failing_count(&ms),
            Cmp::Gt,
            0.0,
        ));
    }
    let schouten = BryantArgs {
        require_positive: false,
        ..window_args(0.25)
    };
    let code = bryant_cmd::outcome(&schouten).code() as f64;
    out.push(Measurement::new(
        "schouten-rho=0.25/exit-code",
        code,
        Cmp::Eq,
        Outcome::Config.code() as f64,
    ));
    Ok(out)
}

/// Runs one criterion; evaluation errors become a failing report.
pub fn run_criterion(id: u8, ctx: &SuiteContext) -> CriterionReport {
    let measured: Result<Vec<Measurement>, CoreError> = match id {
        1 => agila(1, ctx),
        2 => agila(2, ctx),
        3 => bach_radial(ctx),
        4 => mu_sign(ctx),
        5 => oracle_chain(ctx),
        6 => bach_vanishing(ctx),
        7 => conformal_covariance(ctx),
        8 => commutator_measurements(&ctx.options),
        9 => bryant_construction(),
        10 => Ok(window()),
        11 => jets(),
        12 => negative_controls(),
        other => Err(CoreError::InvalidConfig(format!("no criterion {other}"))),
    };
    let mut notes = Vec::new();
    let measurements = measured.unwrap_or_else(|e| {
        notes.push(format!("evaluation error: {e}"));
        Vec::new()
    });
    if id == 10 {
        notes.push("observation grade: completeness is not numerically certifiable".into());
    }
    let pass = notes.iter().all(|n| !n.starts_with("evaluation error")) && measurements.iter().all(|m| m.pass);
    CriterionReport {
        schema: SCHEMA,
        id,
        title: title(id).to_string(),
        grade: if id == 10 { Grade::Observation } else { Grade::Assertion },
        seed: SEED,
        sign_flip: match ctx.options.sign_flip {
            SignFlip::None => None,
            other => Some(format!("{other:?}").to_lowercase()),
        },
        measurements,
        notes,
        pass,
    }
}

/// Runs the criteria in parallel; reports come back in id order.
pub fn run_criteria(ids: &[u8], ctx: &SuiteContext) -> Vec<CriterionReport> {
    ids.par_iter().map(|&id| run_criterion(id, ctx)).collect()
}

pub fn cmd_suite(args: &SuiteArgs) -> Result<Outcome, CliError> {
    let ids: Vec<u8> = if args.all {
        CRITERIA.to_vec()
    } else if !args.only.is_empty() {
        if let Some(bad) = args.only.iter().find(|id| !CRITERIA.contains(id)) {
            return Err(CliError::Usage(format!("no criterion {bad}")));
        }
        args.only.clone()
    } else {
        return Err(CliError::Usage("pass --all or --only <ids>".into()));
    };
    let ctx = SuiteContext {
        options: BundleOptions {
            sign_flip: args.flip_sign.map_or(SignFlip::None, Into::into),
        },
    };
    let reports = run_criteria(&ids, &ctx);
    if let Some(dir) = &args.json_dir {
        io::create_dir(dir)?;
        for r in &reports {
            io::write_json(&dir.join(format!("criterion-{:02}.json", r.id)), r)?;
        }
    }
    for r in &reports {
        print!("{}", r.render());
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria passed", reports.len());
    Ok(Outcome::from_pass(passed == reports.len()))
}
