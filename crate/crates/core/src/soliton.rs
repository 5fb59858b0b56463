//! Pointwise identities of gradient ρ-Einstein solitons `Ric + ∇²f = (ρR + λ)g`.
//!
//! Identities that hold only under extra hypotheses (regularity,
//! rectifiability, vanishing Cotton tensor) check those hypotheses first and
//! return [`Error::PreconditionUnmet`] or [`Error::CriticalPoint`] instead of a
//! residual when they fail.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, Array3};

use crate::error::{Error, Result};
use crate::geometry::{evaluate_bundle_with, BundleOptions, ChartMetric, CurvatureBundle, PotentialDerivatives};
use crate::jets::Jet;

pub const DEFAULT_REGULAR_THRESHOLD: f64 = 1e-6;
/// Soliton residual bound below which the derived identities are meaningful.
pub const SOLITON_GATE: f64 = 1e-6;
/// Rectifiability defect bound certifying `df ∧ dR = 0`.
pub const RECTIFIABILITY_GATE: f64 = 1e-6;
/// Cotton norm below which the tensor counts as vanishing.
pub const COTTON_GATE: f64 = 1e-7;
/// Largest tolerated gap between the two routes to `ξ₁`.
pub const XI_ROUTE_LIMIT: f64 = 1e-5;

/// Marks an instance as `dt² + h(t)² g_F` in coordinates `(t, u)` with
/// `g_F = c(u) δ` of constant curvature `kappa`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpedTag {
    pub kappa: f64,
}

impl WarpedTag {
    /// Conformal factor `c(u)` of the fiber chart: 1 when flat, `4/(1+κ|u|²)²` otherwise.
    pub fn fiber_factor(&self, u: &[f64]) -> f64 {
        if self.kappa == 0.0 {
            1.0
        } else {
            let r2: f64 = u.iter().map(|v| v * v).sum();
            4.0 / (1.0 + self.kappa * r2).powi(2)
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolitonInstance {
    pub metric: ChartMetric,
    pub rho: f64,
    pub lambda: f64,
    pub regular_threshold: f64,
    pub warped: Option<WarpedTag>,
}

impl SolitonInstance {
    pub fn new(metric: ChartMetric, rho: f64, lambda: f64) -> Result<Self> {
        if !metric.has_potential() {
            return Err(Error::MissingPotential);
        }
        if !rho.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rho and lambda must be finite (got {rho}, {lambda})"
            )));
        }
        Ok(Self {
            metric,
            rho,
            lambda,
            regular_threshold: DEFAULT_REGULAR_THRESHOLD,
            warped: None,
        })
    }

    pub fn with_regular_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "regular threshold must be positive (got {threshold})"
            )));
        }
        self.regular_threshold = threshold;
        Ok(self)
    }

    pub fn with_warped(mut self, tag: WarpedTag) -> Self {
        self.warped = Some(tag);
        self
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn name(&self) -> &str {
        self.metric.name()
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<SolitonPoint> {
        self.evaluate_with(point, &BundleOptions::default())
    }

    pub fn evaluate_with(&self, point: &[f64], options: &BundleOptions) -> Result<SolitonPoint> {
        let bundle = evaluate_bundle_with(&self.metric, point, options)?;
        if bundle.potential.is_none() {
            return Err(Error::MissingPotential);
        }
        Ok(SolitonPoint {
            bundle,
            rho: self.rho,
            lambda: self.lambda,
            regular_threshold: self.regular_threshold,
            warped: self.warped,
        })
    }

    pub fn soliton_residual(&self, point: &[f64]) -> Result<Array2<f64>> {
        Ok(self.evaluate(point)?.soliton_residual())
    }
}

#[derive(Clone, Debug)]
pub struct IdentityResiduals {
    /// `Δf − nλ + (1 − nρ)R`.
    pub trace: f64,
    /// `Ric(∇f, ·) − ½(1 − 2(n−1)ρ) dR`.
    pub radial_ricci: Array1<f64>,
    /// `(1 − 2(n−1)ρ)ΔR − ⟨∇f, ∇R⟩ + 2|Ric|² − 2R(ρR + λ)`.
    pub scalar_identity: f64,
}

impl IdentityResiduals {
    pub fn max_abs(&self) -> f64 {
        self.radial_ricci
            .iter()
            .fold(self.trace.abs().max(self.scalar_identity.abs()), |m, v| m.max(v.abs()))
    }
}

#[derive(Clone, Debug)]
pub struct RadialSpectrum {
    /// `ξ₁` first, then the fiber eigenvalues ascending.
    pub xi: Vec<f64>,
    pub xi1_formula: f64,
    pub xi1_rayleigh: f64,
    pub gradf_norm: f64,
    /// Rows form a `g`-orthonormal frame; row 0 is `∇f/|∇f|`.
    pub frame: Array2<f64>,
    /// `|Ric·e₁ − ξ₁e₁|`.
    pub eigenvector_residual: f64,
}

impl RadialSpectrum {
    pub fn fiber_spread(&self) -> f64 {
        let fiber = &self.xi[1..];
        match (fiber.first(), fiber.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// `(Σ ξ_i)² − (n−1) Σ ξ_i²` over the fiber eigenvalues.
    pub fn mu_eigen_form(&self) -> f64 {
        mu_eigen_form(self)
    }
}

pub fn mu_eigen_form(spectrum: &RadialSpectrum) -> f64 {
    let fiber = &spectrum.xi[1..];
    let m = fiber.len() as f64;
    let s: f64 = fiber.iter().sum();
    let s2: f64 = fiber.iter().map(|x| x * x).sum();
    s * s - m * s2
}

#[derive(Clone, Debug)]
pub struct HessRResidual {
    pub hess: Array2<f64>,
    pub trace: f64,
}

#[derive(Clone, Debug)]
pub struct LcfResiduals {
    pub divrm: Array2<f64>,
    pub riem: Array3<f64>,
}

fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// A soliton instance evaluated at one chart point.
#[derive(Clone, Debug)]
pub struct SolitonPoint {
    pub bundle: CurvatureBundle,
    pub rho: f64,
    pub lambda: f64,
    pub regular_threshold: f64,
    pub warped: Option<WarpedTag>,
}

impl SolitonPoint {
    pub fn dim(&self) -> usize {
        self.bundle.dim
    }

    fn nf(&self) -> f64 {
        self.bundle.dim as f64
    }

    pub fn potential(&self) -> &PotentialDerivatives {
        self.bundle.potential.as_ref().expect("soliton points carry a potential")
    }

    /// `1 − 2(n−1)ρ`, the coefficient that vanishes in the Schouten case.
    pub fn schouten_factor(&self) -> f64 {
        1.0 - 2.0 * (self.nf() - 1.0) * self.rho
    }

    pub fn soliton_residual(&self) -> Array2<f64> {
        let b = &self.bundle;
        let p = self.potential();
        let s = self.rho * b.scalar + self.lambda;
        &b.ricci + &p.hess - &(&b.g * s)
    }

    pub fn soliton_residual_max(&self) -> f64 {
        max_abs(self.soliton_residual().iter())
    }

    fn require_soliton(&self, check: &'static str) -> Result<()> {
        let r = self.soliton_residual_max();
        if r < SOLITON_GATE {
            Ok(())
        } else {
            Err(Error::PreconditionUnmet {
                check,
                detail: format!("soliton residual {r:e} is not below {SOLITON_GATE:e}"),
            })
        }
    }

    pub fn gradf_norm(&self) -> f64 {
        self.potential().grad_norm()
    }

    fn require_regular(&self) -> Result<f64> {
        let norm = self.gradf_norm();
        if norm > self.regular_threshold {
            Ok(norm)
        } else {
            Err(Error::CriticalPoint {
                grad_norm: norm,
                threshold: self.regular_threshold,
            })
        }
    }

    fn require_rectifiable(&self, check: &'static str) -> Result<()> {
        let d = self.rectifiability_defect()?;
        if d < RECTIFIABILITY_GATE {
            Ok(())
        } else {
            Err(Error::PreconditionUnmet {
                check,
                detail: format!("rectifiability defect {d:e} is not below {RECTIFIABILITY_GATE:e}"),
            })
        }
    }

    pub fn identity_residuals(&self) -> Result<IdentityResiduals> {
        self.require_soliton("identity residuals")?;
        let b = &self.bundle;
        let p = self.potential();
        let n = self.nf();
        let (rho, lambda, r) = (self.rho, self.lambda, b.scalar);
        let trace = p.lap - n * lambda + (1.0 - n * rho) * r;
        let radial_ricci = b.ricci.dot(&p.grad_vec) - &(&b.grad_scalar * (0.5 * self.schouten_factor()));
        let scalar_identity = self.schouten_factor() * b.lap_scalar - p.grad_vec.dot(&b.grad_scalar)
            + 2.0 * b.ricci_norm_sq()
            - 2.0 * r * (rho * r + lambda);
        Ok(IdentityResiduals {
            trace,
            radial_ricci,
            scalar_identity,
        })
    }

    /// `|∇f|² + R − 2λf`.
    pub fn hamilton_value(&self) -> f64 {
        let p = self.potential();
        p.grad.dot(&p.grad_vec) + self.bundle.scalar - 2.0 * self.lambda * p.value
    }

    /// `| |∇f|² ∇R − ⟨∇R, ∇f⟩ ∇f | / |∇f|²`.
    pub fn rectifiability_defect(&self) -> Result<f64> {
        let norm = self.require_regular()?;
        let b = &self.bundle;
        let p = self.potential();
        let g2 = norm * norm;
        let v = &b.grad_scalar * g2 - &(&p.grad * b.grad_scalar.dot(&p.grad_vec));
        Ok(b.covector_norm(&v) / g2)
    }

    /// `½(1 − 2(n−1)ρ)⟨∇R, ∇f⟩ / |∇f|²`.
    pub fn xi1(&self) -> Result<f64> {
        let norm = self.require_regular()?;
        let b = &self.bundle;
        let p = self.potential();
        Ok(0.5 * self.schouten_factor() * b.grad_scalar.dot(&p.grad_vec) / (norm * norm))
    }

    /// `∇ξ₁` (covector), from `ξ₁` evaluated as a jet-valued field.
    pub fn grad_xi1(&self) -> Result<Array1<f64>> {
        self.require_regular()?;
        let b = &self.bundle;
        let n = b.dim;
        let jets = &b.jets;
        let df = jets.grad_potential.as_ref().ok_or(Error::MissingPotential)?;
        let mut inner = Jet::zero(n);
        let mut norm2 = Jet::zero(n);
        for i in 0..n {
            for j in 0..n {
                let gij = &jets.g_inv[i * n + j];
                inner.accumulate_product(1.0, gij, &(&jets.grad_scalar[i] * &df[j]));
                norm2.accumulate_product(1.0, gij, &(&df[i] * &df[j]));
            }
        }
        let xi1 = inner.div(&norm2)? * (0.5 * self.schouten_factor());
        Ok(Array1::from_shape_fn(n, |i| xi1.d1(i)))
    }

    pub fn radial_spectrum(&self) -> Result<RadialSpectrum> {
        let norm = self.require_regular()?;
        self.require_rectifiable("radial spectrum")?;
        let b = &self.bundle;
        let p = self.potential();
        let n = b.dim;
        let xi1_formula = self.xi1()?;
        let e1 = &p.grad_vec / norm;
        let ric_e1 = b.ricci.dot(&e1);
        let xi1_rayleigh = e1.dot(&ric_e1);
        if (xi1_formula - xi1_rayleigh).abs() > XI_ROUTE_LIMIT {
            return Err(Error::RouteDisagreement {
                formula: xi1_formula,
                rayleigh: xi1_rayleigh,
            });
        }
        // Ric·e₁ as a vector, compared with ξ₁ e₁.
        let defect = b.g_inv.dot(&ric_e1) - &(&e1 * xi1_formula);
        let eigenvector_residual = defect.dot(&b.g.dot(&defect)).max(0.0).sqrt();

        // g-orthonormal complement of e₁ by Gram-Schmidt on coordinate vectors.
        let inner = |a: &Array1<f64>, c: &Array1<f64>| a.dot(&b.g.dot(c));
        let mut basis: Vec<Array1<f64>> = vec![e1.clone()];
        for k in 0..n {
            if basis.len() == n {
                break;
            }
            let mut v = Array1::<f64>::zeros(n);
            v[k] = 1.0;
            for e in &basis {
                let c = inner(&v, e);
                v = v - &(e * c);
            }
            let len = inner(&v, &v).max(0.0).sqrt();
            if len > 1e-8 {
                basis.push(v / len);
            }
        }
        let m = n - 1;
        let restricted = DMatrix::from_fn(m, m, |a, c| basis[a + 1].dot(&b.ricci.dot(&basis[c + 1])));
        let eig = SymmetricEigen::new((&restricted + restricted.transpose()) * 0.5);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &c| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[c]).unwrap());

        let mut xi = vec![xi1_formula];
        let mut frame = Array2::<f64>::zeros((n, n));
        frame.row_mut(0).assign(&e1);
        for (row, &idx) in order.iter().enumerate() {
            xi.push(eig.eigenvalues[idx]);
            let mut v = Array1::<f64>::zeros(n);
            for a in 0..m {
                v = v + &(&basis[a + 1] * eig.eigenvectors[(a, idx)]);
            }
            frame.row_mut(row + 1).assign(&v);
        }
        Ok(RadialSpectrum {
            xi,
            xi1_formula,
            xi1_rayleigh,
            gradf_norm: norm,
            frame,
            eigenvector_residual,
        })
    }

    /// `nξ₁² − 2Rξ₁ − ((n−1)|Ric|² − R²)`.
    pub fn mu(&self) -> Result<f64> {
        self.require_rectifiable("mu")?;
        let xi1 = self.xi1()?;
        let n = self.nf();
        let r = self.bundle.scalar;
        Ok(n * xi1 * xi1 - 2.0 * r * xi1 - ((n - 1.0) * self.bundle.ricci_norm_sq() - r * r))
    }

    /// `B(∇f, ·) − μ/((n−1)(n−2)²) df`.
    pub fn bach_radial_residual(&self) -> Result<Array1<f64>> {
        let mu = self.mu()?;
        let n = self.nf();
        let p = self.potential();
        let coeff = mu / ((n - 1.0) * (n - 2.0).powi(2));
        Ok(self.bundle.bach.dot(&p.grad_vec) - &(&p.grad * coeff))
    }

    /// `divRm(·, ∇f, ·)`, entry `(j, k) = divRm_{jlk} ∇^l f`.
    fn div_riemann_radial(&self) -> Array2<f64> {
        let b = &self.bundle;
        let p = self.potential();
        let n = b.dim;
        Array2::from_shape_fn((n, n), |(j, k)| {
            (0..n).map(|l| b.div_riemann[[j, l, k]] * p.grad_vec[l]).sum()
        })
    }

    /// Bach tensor from Ricci, `∇²R`, `ΔR` and `divRm(·, ∇f, ·)`.
    pub fn bach_first_formula(&self) -> Result<Array2<f64>> {
        self.require_soliton("first Bach formula")?;
        let b = &self.bundle;
        let n = self.nf();
        let (rho, lambda, r) = (self.rho, self.lambda, b.scalar);
        let s = self.schouten_factor() / (2.0 * (n - 1.0));
        let ric_coeff = lambda - (n - (n - 1.0) * (n - 2.0) * rho) / ((n - 1.0) * (n - 2.0)) * r;
        let g_coeff = (b.ricci_norm_sq() - r * r / (n - 1.0)) / (n - 2.0) + s * b.lap_scalar;
        let total = b.ricci_squared() * (2.0 / (n - 2.0)) + &b.ricci * ric_coeff - &b.g * g_coeff
            + &b.hess_scalar * s
            + self.div_riemann_radial();
        Ok(total / (n - 2.0))
    }

    /// Bach tensor from Ricci, `ξ₁`, `∇ξ₁` and `divRm(·, ∇f, ·)`.
    pub fn bach_second_formula(&self) -> Result<Array2<f64>> {
        self.require_soliton("second Bach formula")?;
        self.require_rectifiable("second Bach formula")?;
        let b = &self.bundle;
        let p = self.potential();
        let n = self.nf();
        let (rho, lambda, r) = (self.rho, self.lambda, b.scalar);
        let xi1 = self.xi1()?;
        let dxi = self.grad_xi1()?;
        let ric_coeff = ((n - 1.0) * (n - 2.0) * rho - n) / ((n - 1.0) * (n - 2.0)) * r + lambda - xi1 / (n - 1.0);
        let g_coeff = ((1.0 - (n - 1.0) * rho) / (n - 1.0) * r - lambda) * xi1 - dxi.dot(&p.grad_vec) / (n - 1.0)
            - (b.ricci_norm_sq() - r * r / (n - 1.0)) / (n - 2.0);
        let dim = b.dim;
        let outer = Array2::from_shape_fn((dim, dim), |(j, k)| p.grad[j] * dxi[k] / (n - 1.0));
        let total = b.ricci_squared() * (2.0 / (n - 2.0)) + &b.ricci * ric_coeff + &b.g * g_coeff + outer
            + self.div_riemann_radial();
        Ok(total / (n - 2.0))
    }

    /// Definitional Cotton minus its soliton expression.
    pub fn cotton_soliton_residual(&self) -> Result<Array3<f64>> {
        self.require_soliton("Cotton formula")?;
        let b = &self.bundle;
        let p = self.potential();
        let n = b.dim;
        let c = self.schouten_factor() / (2.0 * (self.nf() - 1.0));
        Ok(Array3::from_shape_fn((n, n, n), |(i, j, k)| {
            let rm: f64 = (0..n).map(|l| b.riemann[[j, i, k, l]] * p.grad_vec[l]).sum();
            let rhs = -c * (b.grad_scalar[i] * b.g[[j, k]] - b.grad_scalar[j] * b.g[[i, k]]) + rm;
            b.cotton[[i, j, k]] - rhs
        }))
    }

    /// Both sides of the Hessian-of-R identity and its trace, left minus right.
    pub fn hess_r_identity_residual(&self) -> Result<HessRResidual> {
        self.require_rectifiable("Hessian of R identity")?;
        let b = &self.bundle;
        let p = self.potential();
        let n = b.dim;
        let (rho, lambda, r) = (self.rho, self.lambda, b.scalar);
        let xi1 = self.xi1()?;
        let dxi = self.grad_xi1()?;
        let half = 0.5 * self.schouten_factor();
        let hess = Array2::from_shape_fn((n, n), |(j, k)| {
            let rhs = xi1 * ((rho * r + lambda) * b.g[[j, k]] - b.ricci[[j, k]]) + dxi[j] * p.grad[k];
            half * b.hess_scalar[[j, k]] - rhs
        });
        let nf = self.nf();
        let trace = half * b.lap_scalar - (xi1 * (nf * lambda - (1.0 - nf * rho) * r) + dxi.dot(&p.grad_vec));
        Ok(HessRResidual { hess, trace })
    }

    /// Radial identities that hold where the Cotton tensor vanishes.
    pub fn lcf_radial_residuals(&self) -> Result<LcfResiduals> {
        let b = &self.bundle;
        let cotton_norm = b.cotton.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(cotton_norm < COTTON_GATE) {
            return Err(Error::PreconditionUnmet {
                check: "vanishing Cotton tensor",
                detail: format!("Cotton norm {cotton_norm:e} is not below {COTTON_GATE:e}"),
            });
        }
        let p = self.potential();
        let n = b.dim;
        let nf = self.nf();
        let inner = p.grad_vec.dot(&b.grad_scalar);
        let divrm = self.div_riemann_radial()
            - &Array2::from_shape_fn((n, n), |(j, k)| {
                (inner * b.g[[j, k]] - p.grad[j] * b.grad_scalar[k]) / (2.0 * (nf - 1.0))
            });
        let c = self.schouten_factor() / (2.0 * (nf - 1.0));
        let riem = Array3::from_shape_fn((n, n, n), |(x, y, z)| {
            let lhs: f64 = (0..n).map(|l| b.riemann[[x, y, z, l]] * p.grad_vec[l]).sum();
            lhs - c * (b.grad_scalar[y] * b.g[[x, z]] - b.grad_scalar[x] * b.g[[y, z]])
        });
        Ok(LcfResiduals { divrm, riem })
    }

    /// `(n−2)κ − (hh'' + (n−2)h'² − hh'f' + (ρR+λ)h²)` at the point's `t`.
    pub fn fiber_ricci_residual(&self) -> Result<f64> {
        let tag = self.warped.ok_or(Error::NotWarped)?;
        let b = &self.bundle;
        let p = self.potential();
        let nf = self.nf();
        let h2 = b.g[[1, 1]] / tag.fiber_factor(&b.point[1..]);
        // Γ^u_{tu} = h'/h and ∂_t Γ^u_{tu} = h''/h − (h'/h)².
        let hp_h = b.christoffel[[1, 0, 1]];
        let hpp_h = b.christoffel_d1[[0, 1, 0, 1]] + hp_h * hp_h;
        let fp = p.grad[0];
        let factor = h2 * (hpp_h + (nf - 2.0) * hp_h * hp_h - hp_h * fp + self.rho * b.scalar + self.lambda);
        Ok((nf - 2.0) * tag.kappa - factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn gaussian(n: usize, lambda: f64, v: Vec<f64>, rho: f64) -> SolitonInstance {
        let m = ChartMetric::euclidean(n).unwrap().with_potential(Arc::new(move |x: &[Jet]| {
            let n = x.len();
            let mut f = Jet::zero(n);
            for (xi, vi) in x.iter().zip(&v) {
                f.accumulate_product(0.5 * lambda, xi, xi);
                f.accumulate(*vi, xi);
            }
            Ok(f)
        }));
        SolitonInstance::new(m, rho, lambda).unwrap()
    }

    #[test]
    fn gaussian_identities_vanish() {
        let inst = gaussian(3, 0.7, vec![1.0, 0.0, -0.5], 0.2);
        let p = inst.evaluate(&[0.3, -0.4, 1.1]).unwrap();
        assert_eq!(p.soliton_residual_max(), 0.0);
        assert!(p.identity_residuals().unwrap().max_abs() < 1e-14);
        assert!(p.bach_first_formula().unwrap().iter().all(|v| v.abs() < 1e-14));
        assert!(p.bach_second_formula().unwrap().iter().all(|v| v.abs() < 1e-14));
        assert!(p.bach_radial_residual().unwrap().iter().all(|v| v.abs() < 1e-14));
        assert!(p.cotton_soliton_residual().unwrap().iter().all(|v| v.abs() < 1e-14));
        let lcf = p.lcf_radial_residuals().unwrap();
        assert!(lcf.divrm.iter().chain(lcf.riem.iter()).all(|v| v.abs() < 1e-14));
        assert_eq!(p.rectifiability_defect().unwrap(), 0.0);
    }

    #[test]
    fn steady_gaussian_hamilton_value_is_speed_squared() {
        let inst = gaussian(3, 0.0, vec![1.0, 2.0, 0.0], 0.0);
        for pt in [[0.0, 0.0, 0.0], [1.0, -2.0, 0.5]] {
            let v = inst.evaluate(&pt).unwrap().hamilton_value();
            assert!((v - 5.0).abs() < 1e-14);
        }
    }

    #[test]
    fn critical_point_is_refused() {
        let inst = gaussian(3, 1.0, vec![0.0; 3], 0.0);
        let p = inst.evaluate(&[0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(p.radial_spectrum(), Err(Error::CriticalPoint { .. })));
        assert!(matches!(p.mu(), Err(Error::CriticalPoint { .. })));
    }

    #[test]
    fn mu_eigen_form_examples() {
        let spec = |xi: Vec<f64>| RadialSpectrum {
            xi,
            xi1_formula: 0.0,
            xi1_rayleigh: 0.0,
            gradf_norm: 1.0,
            frame: Array2::eye(3),
            eigenvector_residual: 0.0,
        };
        assert_eq!(mu_eigen_form(&spec(vec![0.0, 1.0, 1.0])), 0.0);
        assert_eq!(mu_eigen_form(&spec(vec![0.3, 1.0, 2.0])), -1.0);
    }

    #[test]
    fn missing_potential_and_bad_threshold() {
        let m = ChartMetric::euclidean(3).unwrap();
        assert!(matches!(SolitonInstance::new(m, 0.0, 0.0), Err(Error::MissingPotential)));
        let inst = gaussian(3, 1.0, vec![0.0; 3], 0.0);
        assert!(inst.with_regular_threshold(0.0).is_err());
    }

    #[test]
    fn untagged_instance_has_no_fiber_residual() {
        let inst = gaussian(3, 1.0, vec![1.0, 0.0, 0.0], 0.0);
        let p = inst.evaluate(&[0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(p.fiber_ricci_residual(), Err(Error::NotWarped)));
    }
}
