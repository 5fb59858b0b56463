//! `geoflow bryant`: warped-product profiles from tip data.

use geoflow_core::bryant::{self, OdeConfig, WarpedProfile};
use geoflow_core::catalog::{FiberKind, FiberSpec};
use geoflow_core::Error as CoreError;
use serde::Serialize;

use crate::args::BryantArgs;
use crate::error::{core_outcome, CliError, Outcome};
use crate::io;
use crate::report::{Verdict, SCHEMA};

/// ODE residual bound on surviving trajectories.
pub const RESIDUAL_LIMIT: f64 = 1e-6;
/// Spread of `|∇f|² + R − 2λf` allowed when `ρ = 0`.
pub const HAMILTON_LIMIT: f64 = 1e-6;
/// Soliton residual bound for the interpolated metric.
pub const EMBED_LIMIT: f64 = 1e-5;
pub const EMBED_WINDOW: (f64, f64) = (1.0, 10.0);
pub const EMBED_POINTS: usize = 19;

#[derive(Clone, Debug, Serialize)]
pub struct BryantCheck {
    pub id: String,
    pub value: Option<f64>,
    pub limit: Option<f64>,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BryantReport {
    pub schema: u32,
    pub config: OdeConfig,
    pub samples: usize,
    pub t_end: f64,
    pub stop: Option<String>,
    pub first_nonpositive: Option<f64>,
    pub max_residual: f64,
    pub hamilton_spread: f64,
    pub checks: Vec<BryantCheck>,
    pub overall: Verdict,
}

impl BryantReport {
    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn render(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "warped profile n = {}, rho = {}, lambda = {}, kappa = {}: {} samples, t_end = {}\n",
            c.n, c.rho, c.lambda, c.kappa, self.samples, self.t_end
        );
        if let Some(stop) = &self.stop {
            out.push_str(&format!("  stopped: {stop}\n"));
        }
        if let Some(t) = self.first_nonpositive {
            out.push_str(&format!("  sectional curvature not positive from t = {t}\n"));
        }
        for ch in &self.checks {
            let status = if ch.pass { "pass" } else { "FAIL" };
            let value = ch.value.map_or_else(|| "-".into(), |v| format!("{v:.3e}"));
            let limit = ch.limit.map_or_else(|| "-".into(), |v| format!("{v:.1e}"));
            out.push_str(&format!("  {status:4}  {:16} value {value:>10}  limit {limit}", ch.id));
            if let Some(note) = &ch.note {
                out.push_str(&format!("  ({note})"));
            }
            out.push('\n');
        }
        out.push_str(&format!("overall: {}\n", if self.passed() { "pass" } else { "FAIL" }));
        out
    }
}

pub fn config_from(args: &BryantArgs) -> OdeConfig {
    OdeConfig {
        n: args.n,
        rho: args.rho,
        lambda: args.lambda,
        kappa: args.kappa,
        dt: args.dt,
        t_max: args.t_max,
        c0: args.c0,
        ..OdeConfig::default()
    }
}

fn check(id: &str, value: Option<f64>, limit: Option<f64>, pass: bool, note: Option<String>) -> BryantCheck {
    BryantCheck {
        id: id.to_string(),
        value,
        limit,
        pass,
        note,
    }
}

fn fiber_for(cfg: &OdeConfig) -> Result<FiberSpec, CoreError> {
    let kind = if cfg.kappa > 0.0 {
        FiberKind::Sphere
    } else if cfg.kappa < 0.0 {
        FiberKind::Hyperbolic
    } else {
        FiberKind::Flat
    };
    FiberSpec::new(kind, cfg.n - 1, cfg.kappa)
}

/// Largest soliton residual of the embedded profile over the embed window.
pub fn embed_residual(profile: &WarpedProfile) -> Result<(f64, usize), CoreError> {
    let cfg = &profile.config;
    let inst = bryant::embed_profile(profile, fiber_for(cfg)?)?;
    let lo = EMBED_WINDOW.0.max(cfg.t0);
    let hi = EMBED_WINDOW.1.min(profile.t_end());
    if !(hi > lo) {
        return Ok((f64::NAN, 0));
    }
    let mut worst = 0.0f64;
    for k in 0..EMBED_POINTS {
        let t = lo + (hi - lo) * (k as f64 + 0.5) / EMBED_POINTS as f64;
        let mut x = vec![t];
        x.extend((1..cfg.n).map(|i| if i % 2 == 0 { -0.1 } else { 0.1 }));
        worst = worst.max(inst.evaluate(&x)?.soliton_residual_max());
    }
    Ok((worst, EMBED_POINTS))
}

/// Integrates and grades one run.
pub fn run(args: &BryantArgs) -> Result<(BryantReport, WarpedProfile), CoreError> {
    let cfg = config_from(args);
    let profile = bryant::integrate(&cfg)?;
    let survived = profile.survived();
    let first_nonpositive = profile.first_nonpositive().map(|s| s.t);
    let mut checks = Vec::new();

    let residual = profile.max_residual();
    checks.push(if survived {
        check("ode-residual", Some(residual), Some(RESIDUAL_LIMIT), residual <= RESIDUAL_LIMIT, None)
    } else {
        check("ode-residual", Some(residual), None, true, Some("not graded after a stop event".into()))
    });

    let hamilton = profile.hamilton_spread();
    if cfg.rho == 0.0 && survived {
        checks.push(check("hamilton", Some(hamilton), Some(HAMILTON_LIMIT), hamilton <= HAMILTON_LIMIT, None));
    }

    let t_min = args.t_min_survive.or(args.require_positive.then_some(cfg.t_max));
    if let Some(t_min) = t_min {
        let ok = profile.t_end() >= t_min - 1e-9;
        let note = (!ok).then(|| format!("integration stopped before t = {t_min}"));
        checks.push(check("survival", Some(profile.t_end()), Some(t_min), ok, note));
    }
    if args.require_positive {
        let note = first_nonpositive.map(|t| format!("lost at t = {t}"));
        checks.push(check("positivity", first_nonpositive, None, first_nonpositive.is_none(), note));
    }
    if args.embed_check {
        let (worst, count) = embed_residual(&profile)?;
        let pass = count > 0 && worst <= EMBED_LIMIT;
        let note = (count == 0).then(|| "profile ends before the embed window".to_string());
        checks.push(check("embed-residual", Some(worst), Some(EMBED_LIMIT), pass, note));
    }

    let overall = checks.iter().all(|c| c.pass);
    let report = BryantReport {
        schema: SCHEMA,
        config: cfg,
        samples: profile.samples.len(),
        t_end: profile.t_end(),
        stop: profile.stop.map(|(e, t)| format!("{e:?} at t = {t}")),
        first_nonpositive,
        max_residual: residual,
        hamilton_spread: hamilton,
        checks,
        overall: Verdict::from_pass(overall),
    };
    Ok((report, profile))
}

/// Exit status of a run without writing any files.
pub fn outcome(args: &BryantArgs) -> Outcome {
    match run(args) {
        Ok((report, _)) => Outcome::from_pass(report.passed()),
        Err(e) => core_outcome(&e),
    }
}

pub fn cmd_bryant(args: &BryantArgs) -> Result<Outcome, CliError> {
    let (report, profile) = run(args)?;
    print!("{}", report.render());
    if let Some(path) = &args.csv {
        let mut bytes = Vec::new();
        profile.write_csv(&mut bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        io::write_atomic(path, &bytes)?;
    }
    if let Some(path) = &args.json {
        io::write_json(path, &report)?;
    }
    Ok(Outcome::from_pass(report.passed()))
}
