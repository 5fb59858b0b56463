//! Rotationally symmetric solitons `dt² + h(t)² g_F` from the warped-product
//! soliton ODE, integrated with fixed-step classical Runge-Kutta from a
//! smooth tip.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{FiberKind, FiberSpec};
use crate::error::{Error, Result};
use crate::geometry::{ChartMetric, MetricFn, ScalarFieldFn};
use crate::jets::Jet;
use crate::soliton::{SolitonInstance, WarpedTag};

/// Distance from the Schouten value below which the ODE counts as singular.
pub const SCHOUTEN_GUARD: f64 = 1e-9;
/// `|h'|` or `|f'|` beyond this stops the integration.
pub const BLOWUP: f64 = 1e6;
/// Internal steps are subdivided until they are at most this fraction of `h`.
pub const TIP_STEP_RATIO: f64 = 2e-3;
/// Largest sample spacing accepted by [`embed_profile`].
pub const EMBED_MAX_STEP: f64 = 1e-3;

pub const CSV_HEADER: &str = "t,h,hp,fp,R,K_rad,K_tan,res_radial,res_fiber,hamilton,mu";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub n: usize,
    pub rho: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub t0: f64,
    pub dt: f64,
    pub t_max: f64,
    /// `f''(0)`; `None` picks `∓1` so that the tip curvature is positive.
    pub c0: Option<f64>,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            n: 3,
            rho: 0.0,
            lambda: 0.0,
            kappa: 1.0,
            t0: 1e-3,
            dt: 1e-3,
            t_max: 50.0,
            c0: None,
        }
    }
}

impl OdeConfig {
    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `1 − 2(n−1)ρ`.
    pub fn schouten_factor(&self) -> f64 {
        1.0 - 2.0 * (self.nf() - 1.0) * self.rho
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::DimensionTooSmall { dim: self.n, min: 3 });
        }
        if !(self.dt > 0.0) || !(self.t0 > 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "need dt > 0, t0 > 0 and finite t_max (got dt = {}, t0 = {}, t_max = {})",
                self.dt, self.t0, self.t_max
            )));
        }
        if !self.rho.is_finite() || !self.lambda.is_finite() || !self.kappa.is_finite() {
            return Err(Error::InvalidConfig("rho, lambda and kappa must be finite".into()));
        }
        if self.schouten_factor().abs() <= SCHOUTEN_GUARD {
            return Err(Error::SchoutenSingular {
                rho: self.rho,
                n: self.n,
            });
        }
        Ok(())
    }

    /// `f''(0)` actually used at the tip.
    pub fn tip_c0(&self) -> f64 {
        self.c0.unwrap_or(if 1.0 - self.nf() * self.rho >= 0.0 { -1.0 } else { 1.0 })
    }

    /// Sectional curvature at the tip, `(λ − c0)/((n−1)(1 − nρ))`.
    pub fn tip_curvature(&self) -> Result<f64> {
        let denom = (self.nf() - 1.0) * (1.0 - self.nf() * self.rho);
        if denom.abs() <= SCHOUTEN_GUARD {
            return Err(Error::TipDegenerate {
                rho: self.rho,
                n: self.n,
            });
        }
        Ok((self.lambda - self.tip_c0()) / denom)
    }

    /// Series tip data `[h, h', f, f']` at `t0`.
    pub fn tip_state(&self) -> Result<[f64; 4]> {
        let k0 = self.tip_curvature()?;
        let (t, c0) = (self.t0, self.tip_c0());
        Ok([t - k0 * t.powi(3) / 6.0, 1.0 - 0.5 * k0 * t * t, 0.5 * c0 * t * t, c0 * t])
    }
}

/// `(h'', f'')` from `(h, h', f')`.
pub fn second_order_rhs(h: f64, hp: f64, fp: f64, cfg: &OdeConfig) -> Result<(f64, f64)> {
    let s = cfg.schouten_factor();
    if s.abs() <= SCHOUTEN_GUARD {
        return Err(Error::SchoutenSingular { rho: cfg.rho, n: cfg.n });
    }
    if !(h > 0.0) {
        return Err(Error::Collapse { t: f64::NAN, h });
    }
    let n = cfg.nf();
    let gap = cfg.kappa - hp * hp;
    let hpp = ((n - 2.0) * gap * (1.0 - (n - 1.0) * cfg.rho) + h * hp * fp - cfg.lambda * h * h) / (s * h);
    let r = scalar_curvature(n, cfg.kappa, h, hp, hpp);
    let fpp = cfg.rho * r + cfg.lambda + (n - 1.0) * hpp / h;
    Ok((hpp, fpp))
}

/// `R = −2(n−1)h''/h + (n−1)(n−2)(κ − h'²)/h²`.
pub fn scalar_curvature(n: f64, kappa: f64, h: f64, hp: f64, hpp: f64) -> f64 {
    -2.0 * (n - 1.0) * hpp / h + (n - 1.0) * (n - 2.0) * (kappa - hp * hp) / (h * h)
}

fn derivative(state: &[f64; 4], cfg: &OdeConfig) -> Result<[f64; 4]> {
    let (hpp, fpp) = second_order_rhs(state[0], state[1], state[3], cfg)?;
    Ok([state[1], hpp, state[3], fpp])
}

fn rk4_step(state: &[f64; 4], dt: f64, cfg: &OdeConfig) -> Result<[f64; 4]> {
    let add = |s: &[f64; 4], k: &[f64; 4], a: f64| std::array::from_fn(|i| s[i] + a * k[i]);
    let k1 = derivative(state, cfg)?;
    let k2 = derivative(&add(state, &k1, 0.5 * dt), cfg)?;
    let k3 = derivative(&add(state, &k2, 0.5 * dt), cfg)?;
    let k4 = derivative(&add(state, &k3, dt), cfg)?;
    Ok(std::array::from_fn(|i| {
        state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpedSample {
    pub t: f64,
    pub h: f64,
    pub hp: f64,
    pub hpp: f64,
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    pub r: f64,
    pub k_rad: f64,
    pub k_tan: f64,
    pub res_radial: f64,
    pub res_fiber: f64,
    pub hamilton: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopEvent {
    Collapse,
    BlowUp,
    NonFinite,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WarpedProfile {
    pub config: OdeConfig,
    pub samples: Vec<WarpedSample>,
    /// Why integration ended before `t_max`, if it did.
    pub stop: Option<(StopEvent, f64)>,
}

impl WarpedProfile {
    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.t)
    }

    pub fn survived(&self) -> bool {
        self.stop.is_none()
    }

    /// First sample where a sectional curvature is not positive.
    pub fn first_nonpositive(&self) -> Option<&WarpedSample> {
        self.samples.iter().find(|s| !(s.k_rad > 0.0 && s.k_tan > 0.0))
    }

    pub fn max_residual(&self) -> f64 {
        self.samples
            .iter()
            .fold(0.0, |m, s| m.max(s.res_radial.abs()).max(s.res_fiber.abs()))
    }

    pub fn hamilton_spread(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.hamilton), hi.max(s.hamilton)));
        if self.samples.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// Linear interpolation of `(h, h', f')` at `t` (for comparisons only).
    pub fn state_at(&self, t: f64) -> Option<[f64; 3]> {
        let s = &self.samples;
        let idx = s.partition_point(|x| x.t <= t);
        if idx == 0 || idx >= s.len() {
            return s.last().filter(|x| x.t == t).map(|x| [x.h, x.hp, x.fp]);
        }
        let (a, b) = (&s[idx - 1], &s[idx]);
        let w = (t - a.t) / (b.t - a.t);
        let lerp = |x: f64, y: f64| x + w * (y - x);
        Some([lerp(a.h, b.h), lerp(a.hp, b.hp), lerp(a.fp, b.fp)])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for s in &self.samples {
            let cols = [
                s.t, s.h, s.hp, s.fp, s.r, s.k_rad, s.k_tan, s.res_radial, s.res_fiber, s.hamilton, s.mu,
            ];
            let line: Vec<String> = cols.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Integrates from series tip data at `t0` to `t_max`.
pub fn integrate(cfg: &OdeConfig) -> Result<WarpedProfile> {
    cfg.validate()?;
    let state = cfg.tip_state()?;
    integrate_from(cfg, cfg.t0, state)
}

/// Integrates from `state = [h, h', f, f']` at `t_start` to `cfg.t_max`.
pub fn integrate_from(cfg: &OdeConfig, t_start: f64, state: [f64; 4]) -> Result<WarpedProfile> {
    cfg.validate()?;
    if t_start + cfg.dt == t_start {
        return Err(Error::StepUnderflow { t: t_start, dt: cfg.dt });
    }
    let steps = ((cfg.t_max - t_start) / cfg.dt + 1e-9).floor().max(0.0) as usize;
    let mut ts = vec![t_start];
    let mut states = vec![state];
    let mut stop = None;
    let mut s = state;
    for k in 1..=steps {
        let t = t_start + k as f64 * cfg.dt;
        let sub = (cfg.dt / (TIP_STEP_RATIO * s[0].abs())).ceil().clamp(1.0, 1e6) as usize;
        let ds = cfg.dt / sub as f64;
        let mut stepped = Ok(s);
        for _ in 0..sub {
            stepped = stepped.and_then(|x| rk4_step(&x, ds, cfg));
        }
        let next = match stepped {
            Ok(v) => v,
            Err(Error::Collapse { .. }) => {
                stop = Some((StopEvent::Collapse, t));
                break;
            }
            Err(e) => return Err(e),
        };
        if next.iter().any(|v| !v.is_finite()) {
            stop = Some((StopEvent::NonFinite, t));
            break;
        }
        if next[0] <= 0.0 {
            stop = Some((StopEvent::Collapse, t));
            break;
        }
        if next[1].abs() > BLOWUP || next[3].abs() > BLOWUP {
            stop = Some((StopEvent::BlowUp, t));
            break;
        }
        ts.push(t);
        states.push(next);
        s = next;
    }
    Ok(WarpedProfile {
        config: *cfg,
        samples: diagnostics(cfg, &ts, &states)?,
        stop,
    })
}

/// Fourth-order finite-difference derivative of uniformly spaced samples.
fn fd_derivative(y: &[f64], dt: f64) -> Option<Vec<f64>> {
    let m = y.len();
    if m < 5 {
        return None;
    }
    let c = 12.0 * dt;
    Some(
        (0..m)
            .map(|i| {
                if i >= 2 && i + 2 < m {
                    (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / c
                } else if i < 2 {
                    let (a, b) = (&y[i..i + 5], i);
                    if b == 0 {
                        (-25.0 * a[0] + 48.0 * a[1] - 36.0 * a[2] + 16.0 * a[3] - 3.0 * a[4]) / c
                    } else {
                        (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / c
                    }
                } else if i + 1 == m {
                    let a = &y[m - 5..];
                    (25.0 * a[4] - 48.0 * a[3] + 36.0 * a[2] - 16.0 * a[1] + 3.0 * a[0]) / c
                } else {
                    let a = &y[m - 5..];
                    (3.0 * a[4] + 10.0 * a[3] - 18.0 * a[2] + 6.0 * a[1] - a[0]) / c
                }
            })
            .collect(),
    )
}

fn diagnostics(cfg: &OdeConfig, ts: &[f64], states: &[[f64; 4]]) -> Result<Vec<WarpedSample>> {
    let n = cfg.nf();
    let (rho, lambda, kappa) = (cfg.rho, cfg.lambda, cfg.kappa);
    let hp: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let fp: Vec<f64> = states.iter().map(|s| s[3]).collect();
    let hpp_fd = fd_derivative(&hp, cfg.dt);
    let fpp_fd = fd_derivative(&fp, cfg.dt);

    let mut rows = Vec::with_capacity(ts.len());
    for (i, (&t, s)) in ts.iter().zip(states).enumerate() {
        let [h, hp, f, fp] = *s;
        let (hpp, fpp) = second_order_rhs(h, hp, fp, cfg)?;
        let r = scalar_curvature(n, kappa, h, hp, hpp);
        // residuals of the radial and fiber soliton equations, with h'' and f''
        // re-derived from the sampled h' and f'
        let (res_radial, res_fiber) = match (&hpp_fd, &fpp_fd) {
            (Some(a), Some(b)) => {
                let (hpp, fpp) = (a[i], b[i]);
                let r = scalar_curvature(n, kappa, h, hp, hpp);
                let radial = -(n - 1.0) * hpp / h + fpp - (rho * r + lambda);
                let fiber = (n - 2.0) * kappa - (h * hpp + (n - 2.0) * hp * hp - h * hp * fp + (rho * r + lambda) * h * h);
                (radial, fiber)
            }
            _ => (0.0, 0.0),
        };
        rows.push(WarpedSample {
            t,
            h,
            hp,
            hpp,
            f,
            fp,
            fpp,
            r,
            k_rad: -hpp / h,
            k_tan: (kappa - hp * hp) / (h * h),
            res_radial,
            res_fiber,
            hamilton: fp * fp + r - 2.0 * lambda * f,
            mu: f64::NAN,
        });
    }
    for row in rows.iter_mut() {
        if row.fp.abs() > crate::soliton::DEFAULT_REGULAR_THRESHOLD {
            let xi1 = 0.5 * cfg.schouten_factor() * third_derivatives(cfg, row).2 / row.fp;
            let ric_rad = -(n - 1.0) * row.hpp / row.h;
            let ric_tan = ((n - 2.0) * kappa - row.h * row.hpp - (n - 2.0) * row.hp * row.hp) / (row.h * row.h);
            let ric_sq = ric_rad * ric_rad + (n - 1.0) * ric_tan * ric_tan;
            row.mu = n * xi1 * xi1 - 2.0 * row.r * xi1 - ((n - 1.0) * ric_sq - row.r * row.r);
        }
    }
    Ok(rows)
}

/// `(h''', f''', R')` along a solution, by the chain rule through the ODE.
fn third_derivatives(cfg: &OdeConfig, w: &WarpedSample) -> (f64, f64, f64) {
    let n = cfg.nf();
    let (h, p, q, fp, fpp) = (w.h, w.hp, w.hpp, w.fp, w.fpp);
    let s = cfg.schouten_factor();
    let num = (n - 2.0) * (cfg.kappa - p * p) * (1.0 - (n - 1.0) * cfg.rho) + h * p * fp - cfg.lambda * h * h;
    let dnum = -2.0 * (n - 2.0) * p * q * (1.0 - (n - 1.0) * cfg.rho) + p * p * fp + h * q * fp + h * p * fpp
        - 2.0 * cfg.lambda * h * p;
    let hppp = dnum / (s * h) - num * p / (s * h * h);
    let dr = -2.0 * (n - 1.0) * (hppp / h - q * p / (h * h))
        + (n - 1.0) * (n - 2.0) * (-2.0 * p * q / (h * h) - 2.0 * (cfg.kappa - p * p) * p / h.powi(3));
    let fppp = cfg.rho * dr + (n - 1.0) * (hppp / h - q * p / (h * h));
    (hppp, fppp, dr)
}

/// Quintic on `[0, dt]` from `y(0)`, `y'(0)` and the cubic Hermite
/// interpolant of `y''` through `y''`, `y'''` at both ends, integrated twice.
/// Coefficients are in `s = t − t_a`.
fn quintic_from_curvature(dt: f64, y0: f64, d0: f64, a: [f64; 2], b: [f64; 2]) -> [f64; 6] {
    let (q0, r0) = (a[0], a[1]);
    let (q1, r1) = (b[0], b[1]);
    let a2 = (3.0 * (q1 - q0) / dt - 2.0 * r0 - r1) / dt;
    let a3 = (2.0 * (q0 - q1) / dt + r0 + r1) / (dt * dt);
    [y0, d0, q0 / 2.0, r0 / 6.0, a2 / 12.0, a3 / 20.0]
}

#[derive(Debug)]
struct Interpolant {
    knots: Vec<f64>,
    h: Vec<[f64; 6]>,
    f: Vec<[f64; 6]>,
}

impl Interpolant {
    fn new(cfg: &OdeConfig, samples: &[WarpedSample]) -> Self {
        let third: Vec<(f64, f64, f64)> = samples.iter().map(|w| third_derivatives(cfg, w)).collect();
        let mut h = Vec::with_capacity(samples.len());
        let mut f = Vec::with_capacity(samples.len());
        for (i, w) in samples.windows(2).enumerate() {
            let dt = w[1].t - w[0].t;
            let (a, b) = (third[i], third[i + 1]);
            h.push(quintic_from_curvature(dt, w[0].h, w[0].hp, [w[0].hpp, a.0], [w[1].hpp, b.0]));
            f.push(quintic_from_curvature(dt, w[0].f, w[0].fp, [w[0].fpp, a.1], [w[1].fpp, b.1]));
        }
        Self {
            knots: samples.iter().map(|s| s.t).collect(),
            h,
            f,
        }
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (a, b) = (self.knots[0], *self.knots.last().unwrap());
        if !(t >= a && t <= b) {
            return Err(Error::OutOfDomain {
                point: vec![t],
                reason: format!("t outside the profile range [{a}, {b}]"),
            });
        }
        Ok(self.knots.partition_point(|&k| k <= t).clamp(1, self.knots.len() - 1) - 1)
    }

    fn eval(coeffs: &[f64; 6], s: &Jet) -> Jet {
        let mut acc = Jet::constant(s.dim(), coeffs[5]);
        for c in coeffs[..5].iter().rev() {
            acc = &acc * s + *c;
        }
        acc
    }

    fn h(&self, t: &Jet) -> Result<Jet> {
        let i = self.locate(t.value())?;
        Ok(Self::eval(&self.h[i], &(t.clone() + (-self.knots[i]))))
    }

    fn f(&self, t: &Jet) -> Result<Jet> {
        let i = self.locate(t.value())?;
        Ok(Self::eval(&self.f[i], &(t.clone() + (-self.knots[i]))))
    }
}

/// Chart `(t, u)` with `g = dt² + h(t)² c(u) δ` and potential `f(t)`, both
/// interpolated by piecewise quintics built from the ODE derivatives.
pub fn embed_profile(profile: &WarpedProfile, fiber: FiberSpec) -> Result<SolitonInstance> {
    let cfg = &profile.config;
    if fiber.dim() + 1 != cfg.n {
        return Err(Error::DimensionMismatch {
            left: fiber.dim() + 1,
            right: cfg.n,
        });
    }
    if cfg.dt > EMBED_MAX_STEP {
        return Err(Error::SparseProfile {
            dt: cfg.dt,
            max: EMBED_MAX_STEP,
        });
    }
    if profile.samples.len() < 2 {
        return Err(Error::InvalidConfig("profile has fewer than two samples".into()));
    }
    let expected = if cfg.kappa == 0.0 {
        FiberKind::Flat
    } else if cfg.kappa > 0.0 {
        FiberKind::Sphere
    } else {
        FiberKind::Hyperbolic
    };
    if fiber.kind() != expected || (fiber.kappa() - cfg.kappa).abs() > 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "fiber curvature {} does not match the profile's kappa {}",
            fiber.kappa(),
            cfg.kappa
        )));
    }
    let interp = Arc::new(Interpolant::new(cfg, &profile.samples));
    let hi = interp.clone();
    let metric: MetricFn = Arc::new(move |x: &[Jet]| {
        let n = x.len();
        let h = hi.h(&x[0])?;
        let gf = &(&h * &h) * &fiber.conformal_factor(&x[1..])?;
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
    let potential: ScalarFieldFn = Arc::new(move |x: &[Jet]| interp.f(&x[0]));
    let chart = ChartMetric::new(format!("profile(n={}, rho={})", cfg.n, cfg.rho), cfg.n, metric)?
        .with_potential(potential)
        .with_param("kappa", cfg.kappa);
    Ok(SolitonInstance::new(chart, cfg.rho, cfg.lambda)?.with_warped(WarpedTag { kappa: cfg.kappa }))
}

/// Outcome of one trajectory in a `ρ` sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub rho: f64,
    pub t_end: f64,
    pub survived: bool,
    /// First `t` where a sectional curvature is not positive.
    pub positivity_lost_at: Option<f64>,
    pub max_residual: f64,
    pub error: Option<String>,
}

pub fn sweep_outcome(cfg: &OdeConfig) -> SweepOutcome {
    match integrate(cfg) {
        Ok(p) => SweepOutcome {
            rho: cfg.rho,
            t_end: p.t_end(),
            survived: p.survived(),
            positivity_lost_at: p.first_nonpositive().map(|s| s.t),
            max_residual: p.max_residual(),
            error: None,
        },
        Err(e) => SweepOutcome {
            rho: cfg.rho,
            t_end: f64::NAN,
            survived: false,
            positivity_lost_at: None,
            max_residual: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}
