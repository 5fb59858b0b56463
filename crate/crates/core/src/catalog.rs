//! Explicit metrics and solitons: Gaussian, rigid products, cylinders, space
//! forms, the two Agila-Gomes traceless Ricci solitons and general warped
//! products over canonical fibers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{ChartMetric, MetricFn, ScalarFieldFn};
use crate::jets::{Jet, MAX_DIM};
use crate::sampling::SampleDomain;
use crate::soliton::{SolitonInstance, WarpedTag};

/// Half-width of the `t` sampling interval.
pub const T_RANGE: f64 = 3.0;
/// Radius of the sampled ball in fiber (and space-form) charts.
pub const FIBER_RADIUS: f64 = 0.8;

pub const NAMES: [&str; 8] = [
    "gaussian",
    "rigid-r2xs2",
    "agila1",
    "agila2",
    "cyl-sphere",
    "cyl-hyperbolic",
    "sphere",
    "hyperbolic",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberKind {
    Flat,
    Sphere,
    Hyperbolic,
}

impl fmt::Display for FiberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiberKind::Flat => "flat",
            FiberKind::Sphere => "sphere",
            FiberKind::Hyperbolic => "hyperbolic",
        })
    }
}

impl FromStr for FiberKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(FiberKind::Flat),
            "sphere" => Ok(FiberKind::Sphere),
            "hyperbolic" => Ok(FiberKind::Hyperbolic),
            _ => Err(Error::Parse(format!("unknown fiber kind `{s}`"))),
        }
    }
}

/// A constant-curvature fiber in its conformally flat chart
/// `c(u)δ` with `c = 4/(1+κ|u|²)²` (and `c = 1` when flat).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberSpec {
    kind: FiberKind,
    dim: usize,
    kappa: f64,
}

impl FiberSpec {
    pub fn new(kind: FiberKind, dim: usize, kappa: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidConfig(format!("fiber dimension {dim} is below 2")));
        }
        let sign_ok = match kind {
            FiberKind::Flat => kappa == 0.0,
            FiberKind::Sphere => kappa > 0.0,
            FiberKind::Hyperbolic => kappa < 0.0,
        };
        if !sign_ok || !kappa.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "curvature {kappa} does not match a {kind} fiber"
            )));
        }
        Ok(Self { kind, dim, kappa })
    }

    pub fn flat(dim: usize) -> Result<Self> {
        Self::new(FiberKind::Flat, dim, 0.0)
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        Self::new(FiberKind::Sphere, dim, 1.0)
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Self::new(FiberKind::Hyperbolic, dim, -1.0)
    }

    pub fn kind(&self) -> FiberKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Scalar curvature `k(k−1)κ` of the fiber.
    pub fn scalar_curvature(&self) -> f64 {
        let k = self.dim as f64;
        k * (k - 1.0) * self.kappa
    }

    /// Conformal factor of the fiber chart at the fiber coordinates `u`.
    pub fn conformal_factor(&self, u: &[Jet]) -> Result<Jet> {
        let n = u.first().map(Jet::dim).unwrap_or(1);
        if self.kind == FiberKind::Flat {
            return Ok(Jet::constant(n, 1.0));
        }
        let mut q = Jet::constant(n, 1.0);
        for ui in u {
            q.accumulate_product(self.kappa, ui, ui);
        }
        if q.value() <= 0.0 {
            return Err(Error::OutOfDomain {
                point: u.iter().map(Jet::value).collect(),
                reason: format!("outside the {} fiber chart (|u|² ≥ 1/|κ|)", self.kind),
            });
        }
        Ok(q.powi(2).recip()? * 4.0)
    }
}

/// A univariate function of `t` with a printable label.
#[derive(Clone)]
pub struct Profile1d {
    label: String,
    eval: Arc<dyn Fn(&Jet) -> Result<Jet> + Send + Sync>,
}

impl fmt::Debug for Profile1d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile1d({})", self.label)
    }
}

impl Profile1d {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Jet) -> Result<Jet> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn from_expr(expr: Expr) -> Self {
        let label = expr.to_string();
        Self::new(label, move |t| expr.eval_jet(t))
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::from_expr(Expr::parse(src)?))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval_jet(&self, t: &Jet) -> Result<Jet> {
        (self.eval)(t)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_jet(&Jet::constant(1, t).truncate(0))?.value())
    }
}

/// `dt² + h(t)² g_F` with potential `f(t)`.
#[derive(Clone, Debug)]
pub struct WarpedSpec {
    pub fiber: FiberSpec,
    pub h: Profile1d,
    pub f: Profile1d,
    pub t_domain: (f64, f64),
}

impl WarpedSpec {
    pub fn dim(&self) -> usize {
        self.fiber.dim + 1
    }

    /// Parses `key=value` pairs separated by `;`: `n`, `fiber`, `kappa`,
    /// `h`, `f` and `t` (as `a..b`). Example: `n=3;fiber=sphere;h=sin(t);t=0.1..3`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut n = 3usize;
        let mut kind = FiberKind::Flat;
        let mut kappa: Option<f64> = None;
        let mut h = None;
        let mut f = None;
        let mut t_domain = (-T_RANGE, T_RANGE);
        for part in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
            let value = value.trim();
            let num = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{v}`")));
            match key.trim() {
                "n" => n = value.parse().map_err(|_| Error::Parse(format!("bad dimension `{value}`")))?,
                "fiber" => kind = value.parse()?,
                "kappa" => kappa = Some(num(value)?),
                "h" => h = Some(Profile1d::parse(value)?),
                "f" => f = Some(Profile1d::parse(value)?),
                "t" => {
                    let (a, b) = value
                        .split_once("..")
                        .ok_or_else(|| Error::Parse(format!("expected a..b, got `{value}`")))?;
                    t_domain = (num(a)?, num(b)?);
                }
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        if !(3..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        let kappa = kappa.unwrap_or(match kind {
            FiberKind::Flat => 0.0,
            FiberKind::Sphere => 1.0,
            FiberKind::Hyperbolic => -1.0,
        });
        let fiber = FiberSpec::new(kind, n - 1, kappa)?;
        let h = h.ok_or_else(|| Error::Parse("missing `h`".into()))?;
        let f = f.unwrap_or_else(|| Profile1d::parse("0").expect("constant parses"));
        if !(t_domain.0 < t_domain.1) {
            return Err(Error::Parse(format!("empty t interval {t_domain:?}")));
        }
        Ok(Self {
            fiber,
            h,
            f,
            t_domain,
        })
    }
}

/// A catalog instance together with the region it is sampled on.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub instance: SolitonInstance,
    pub domain: SampleDomain,
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        self.instance.name()
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        self.domain.sample(count, seed)
    }
}

fn quadratic_potential(coeff: f64, count: usize, shift: Vec<f64>) -> ScalarFieldFn {
    Arc::new(move |x: &[Jet]| {
        let n = x.len();
        let mut f = Jet::zero(n);
        for (i, xi) in x.iter().take(count).enumerate() {
            f.accumulate_product(0.5 * coeff, xi, xi);
            if let Some(&v) = shift.get(i) {
                f.accumulate(v, xi);
            }
        }
        Ok(f)
    })
}

/// Euclidean `ℝⁿ` with `f = ½λ|x|² + ⟨v, x⟩`.
pub fn make_gaussian(n: usize, lambda: f64, v: &[f64], rho: f64) -> Result<SolitonInstance> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { dim: n, min: 3 });
    }
    if v.len() != n {
        return Err(Error::DimensionMismatch { left: v.len(), right: n });
    }
    let metric = ChartMetric::euclidean(n)?
        .with_name("gaussian")
        .with_potential(quadratic_potential(lambda, n, v.to_vec()));
    SolitonInstance::new(metric, rho, lambda)
}

/// `ℝ^m × N^k` with `N` an Einstein space form, `λ = (1 − kρ)R_N/k` and
/// `f = ½(ρR_N + λ)|x|²` on the flat factor.
pub fn make_rigid(m: usize, fiber: FiberSpec, rho: f64) -> Result<SolitonInstance> {
    let k = fiber.dim();
    let n = m + k;
    if m < 1 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    let r_n = fiber.scalar_curvature();
    let kf = k as f64;
    let lambda = (1.0 - kf * rho) * r_n / kf;
    let metric: MetricFn = Arc::new(move |x: &[Jet]| {
        let n = x.len();
        let c = fiber.conformal_factor(&x[m..])?;
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                packed.push(match (i == j, i < m) {
                    (true, true) => Jet::constant(n, 1.0),
                    (true, false) => c.clone(),
                    _ => Jet::zero(n),
                });
            }
        }
        Ok(packed)
    });
    let name = format!("rigid-r{m}x{}{k}", if fiber.kind() == FiberKind::Hyperbolic { "h" } else { "s" });
    let chart = ChartMetric::new(name, n, metric)?
        .with_potential(quadratic_potential(rho * r_n + lambda, m, Vec::new()))
        .with_param("rho", rho)
        .with_param("lambda", lambda)
        .with_param("kappa", fiber.kappa());
    SolitonInstance::new(chart, rho, lambda)
}

fn warped_metric(spec: &WarpedSpec) -> Result<ChartMetric> {
    let n = spec.dim();
    let fiber = spec.fiber;
    let h = spec.h.clone();
    let metric: MetricFn = Arc::new(move |x: &[Jet]| {
        let n = x.len();
        let hv = h.eval_jet(&x[0])?;
        if !(hv.value() > 0.0) {
            return Err(Error::OutOfDomain {
                point: x.iter().map(Jet::value).collect(),
                reason: format!("warping function is not positive (h = {})", hv.value()),
            });
        }
        let c = fiber.conformal_factor(&x[1..])?;
        let gf = &(&hv * &hv) * &c;
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                packed.push(match (i == j, i == 0) {
                    (true, true) => Jet::constant(n, 1.0),
                    (true, false) => gf.clone(),
                    _ => Jet::zero(n),
                });
            }
        }
        Ok(packed)
    });
    let f = spec.f.clone();
    let potential: ScalarFieldFn = Arc::new(move |x: &[Jet]| f.eval_jet(&x[0]));
    Ok(ChartMetric::new(format!("warped(h={}, fiber={})", spec.h.label(), fiber.kind()), n, metric)?
        .with_potential(potential)
        .with_param("kappa", fiber.kappa()))
}

/// Warped product `dt² + h(t)² g_F` with potential `f(t)`.
pub fn make_warped(spec: &WarpedSpec, rho: f64, lambda: f64) -> Result<SolitonInstance> {
    let (a, b) = spec.t_domain;
    for i in 0..=200 {
        let t = a + (b - a) * i as f64 / 200.0;
        let h = spec.h.eval(t)?;
        if !(h > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "warping function {} is not positive at t = {t} (h = {h})",
                spec.h.label()
            )));
        }
    }
    let metric = warped_metric(spec)?;
    Ok(SolitonInstance::new(metric, rho, lambda)?.with_warped(WarpedTag {
        kappa: spec.fiber.kappa(),
    }))
}

/// Sampling region of a warped chart.
pub fn warped_domain(spec: &WarpedSpec) -> SampleDomain {
    SampleDomain::with_ball(vec![spec.t_domain], spec.fiber.dim(), FIBER_RADIUS)
}

pub fn agila_spec(which: u8) -> Result<WarpedSpec> {
    let (h, f): (Profile1d, Profile1d) = match which {
        1 => (
            Profile1d::new("sqrt((e^(2t)+1)/e^(2t))", |t| {
                let e2 = (t * 2.0).exp()?;
                (e2.clone() + 1.0).div(&e2)?.sqrt()
            }),
            Profile1d::new("log(e^(2t)+1)/3", |t| Ok(((t * 2.0).exp()? + 1.0).ln()? * (1.0 / 3.0))),
        ),
        2 => (
            Profile1d::new("sqrt(t^2+1)", |t| (t * t + 1.0).sqrt()),
            Profile1d::new("(4log(t^2+1)+2t^2+1)/12", |t| {
                let t2 = t * t;
                Ok(((t2.clone() + 1.0).ln()? * 4.0 + t2 * 2.0 + 1.0) * (1.0 / 12.0))
            }),
        ),
        other => return Err(Error::UnknownExample(format!("agila{other}"))),
    };
    Ok(WarpedSpec {
        fiber: FiberSpec::flat(2)?,
        h,
        f,
        t_domain: (-T_RANGE, T_RANGE),
    })
}

/// The steady (`which = 1`) and shrinking (`which = 2`) traceless Ricci
/// solitons on `ℝ ×_h F²` with flat `F`.
pub fn make_agila(which: u8) -> Result<SolitonInstance> {
    let spec = agila_spec(which)?;
    let lambda = if which == 1 { 0.0 } else { 1.0 / 3.0 };
    let mut inst = make_warped(&spec, 1.0 / 3.0, lambda)?;
    inst.metric = inst.metric.with_name(format!("agila{which}"));
    Ok(inst)
}

/// `ℝ × S^{n−1}` or `ℝ × H^{n−1}` with unit fiber curvature, carrying the
/// rigid potential `f = ½λt²` (`ρ = 0`).
pub fn make_cylinder(kind: FiberKind, n: usize) -> Result<ChartMetric> {
    Ok(make_cylinder_soliton(kind, n)?.metric)
}

fn make_cylinder_soliton(kind: FiberKind, n: usize) -> Result<SolitonInstance> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { dim: n, min: 3 });
    }
    let fiber = match kind {
        FiberKind::Sphere => FiberSpec::sphere(n - 1)?,
        FiberKind::Hyperbolic => FiberSpec::hyperbolic(n - 1)?,
        FiberKind::Flat => return Err(Error::InvalidConfig("a cylinder needs a curved fiber".into())),
    };
    let mut inst = make_rigid(1, fiber, 0.0)?;
    let name = if kind == FiberKind::Sphere { "cyl-sphere" } else { "cyl-hyperbolic" };
    inst.metric = inst.metric.with_name(name);
    Ok(inst.with_warped(WarpedTag { kappa: fiber.kappa() }))
}

/// Round sphere (stereographic chart) or hyperbolic space (ball model) of
/// curvature `±1`, as an Einstein soliton with constant potential.
pub fn make_space_form(kind: FiberKind, n: usize, rho: f64) -> Result<SolitonInstance> {
    let fiber = match kind {
        FiberKind::Sphere => FiberSpec::sphere(n)?,
        FiberKind::Hyperbolic => FiberSpec::hyperbolic(n)?,
        FiberKind::Flat => return Err(Error::InvalidConfig("use make_gaussian for flat space".into())),
    };
    let metric = ChartMetric::diagonal(kind.to_string(), n, move |x| {
        let c = fiber.conformal_factor(x)?;
        Ok(vec![c; x.len()])
    })?
    .with_potential(Arc::new(|x: &[Jet]| Ok(Jet::zero(x.len()))));
    let nf = n as f64;
    let einstein = (nf - 1.0) * fiber.kappa();
    let lambda = einstein - rho * nf * einstein;
    SolitonInstance::new(metric, rho, lambda)
}

/// Overrides applied when resolving a catalog name.
#[derive(Clone, Copy, Debug, Default)]
pub struct CatalogOptions {
    pub n: Option<usize>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
}

fn apply_overrides(mut inst: SolitonInstance, opts: &CatalogOptions) -> SolitonInstance {
    if let Some(rho) = opts.rho {
        inst.rho = rho;
    }
    if let Some(lambda) = opts.lambda {
        inst.lambda = lambda;
    }
    inst
}

/// Resolves a catalog name (see [`NAMES`], plus `warped:<spec>`).
///
/// For `rigid-r2xs2` and the space forms a `rho` override recomputes `λ`
/// from the rigidity relation unless `lambda` is also given.
pub fn lookup(name: &str, opts: &CatalogOptions) -> Result<CatalogEntry> {
    let n = opts.n;
    let t_box = (-T_RANGE, T_RANGE);
    let (inst, domain) = match name {
        "gaussian" => {
            let n = n.unwrap_or(3);
            let mut v = vec![0.0; n];
            v[0] = 1.0;
            let inst = make_gaussian(n, opts.lambda.unwrap_or(1.0), &v, opts.rho.unwrap_or(0.0))?;
            (inst, SampleDomain::boxed(vec![t_box; n]))
        }
        "rigid-r2xs2" => {
            let mut inst = make_rigid(2, FiberSpec::sphere(2)?, opts.rho.unwrap_or(0.0))?;
            inst.metric = inst.metric.with_name("rigid-r2xs2");
            let inst = apply_overrides(inst, &CatalogOptions { n: None, rho: None, lambda: opts.lambda });
            (inst, SampleDomain::with_ball(vec![t_box; 2], 2, FIBER_RADIUS))
        }
        "agila1" | "agila2" => {
            let which = if name == "agila1" { 1 } else { 2 };
            let inst = apply_overrides(make_agila(which)?, opts);
            (inst, SampleDomain::with_ball(vec![t_box], 2, FIBER_RADIUS))
        }
        "cyl-sphere" | "cyl-hyperbolic" => {
            let kind = if name == "cyl-sphere" { FiberKind::Sphere } else { FiberKind::Hyperbolic };
            let n = n.unwrap_or(3);
            let inst = apply_overrides(make_cylinder_soliton(kind, n)?, opts);
            (inst, SampleDomain::with_ball(vec![t_box], n - 1, FIBER_RADIUS))
        }
        "sphere" | "hyperbolic" => {
            let kind = if name == "sphere" { FiberKind::Sphere } else { FiberKind::Hyperbolic };
            let n = n.unwrap_or(4);
            let inst = make_space_form(kind, n, opts.rho.unwrap_or(0.0))?;
            let inst = apply_overrides(inst, &CatalogOptions { n: None, rho: None, lambda: opts.lambda });
            (inst, SampleDomain::with_ball(Vec::new(), n, FIBER_RADIUS))
        }
        other => match other.strip_prefix("warped:") {
            Some(spec) => {
                let spec = WarpedSpec::parse(spec)?;
                let inst = make_warped(&spec, opts.rho.unwrap_or(0.0), opts.lambda.unwrap_or(0.0))?;
                let domain = warped_domain(&spec);
                (inst, domain)
            }
            None => return Err(Error::UnknownExample(other.to_string())),
        },
    };
    Ok(CatalogEntry { instance: inst, domain })
}

/// Adds `ε·x₁x₂` to the potential (a negative control).
pub fn perturb_potential(inst: &SolitonInstance, eps: f64) -> SolitonInstance {
    let base = inst.metric.potential_fn().cloned();
    let potential: ScalarFieldFn = Arc::new(move |x: &[Jet]| {
        let mut f = match &base {
            Some(b) => b(x)?,
            None => Jet::zero(x.len()),
        };
        f.accumulate_product(eps, &x[0], &x[1]);
        Ok(f)
    });
    let mut out = inst.clone();
    out.metric = inst
        .metric
        .clone()
        .with_potential(potential)
        .with_name(format!("{}+perturbed", inst.name()));
    out
}

/// Every named entry at its default parameters.
pub fn all_entries() -> Result<Vec<CatalogEntry>> {
    NAMES.iter().map(|name| lookup(name, &CatalogOptions::default())).collect()
}
