//! Coordinate-chart metrics and their pointwise curvature.
//!
//! Curvature follows the convention
//! `Rm(∂i,∂j)∂k = ∇j∇i∂k − ∇i∇j∂k = R_ijk^r ∂r`, `R_ijkl = g_lr R_ijk^r`,
//! `R_ik = g^jl R_ijkl`, so that the Ricci identity reads
//! `∇i∇j∇k f − ∇j∇i∇k f = R_ijkl ∇^l f`. With this convention round spheres
//! have `R_ijij > 0`.

mod bundle;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::jets::{Jet, MAX_DIM};

pub use bundle::{
    curvature_basic, evaluate_bundle, evaluate_bundle_with, BasicCurvature, BundleOptions,
    CurvatureBundle, PotentialDerivatives, SignFlip, SymmetryDefects,
};

/// Metric components as a function of the coordinate jets, packed as the
/// upper triangle in row-major order (`g_00, g_01, …, g_0n, g_11, …`).
pub type MetricFn = Arc<dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync>;

/// A scalar chart function of the coordinate jets.
pub type ScalarFieldFn = Arc<dyn Fn(&[Jet]) -> Result<Jet> + Send + Sync>;

/// Position of `g_ij` (`i ≤ j`) in the packed upper triangle.
pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// Positive-definiteness threshold on the smallest eigenvalue of `g`.
pub const POSITIVE_DEFINITE_FLOOR: f64 = 1e-10;

#[derive(Clone)]
pub struct ChartMetric {
    name: String,
    dim: usize,
    metric: MetricFn,
    potential: Option<ScalarFieldFn>,
    params: BTreeMap<String, f64>,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("has_potential", &self.potential.is_some())
            .field("params", &self.params)
            .finish()
    }
}

impl ChartMetric {
    pub fn new(name: impl Into<String>, dim: usize, metric: MetricFn) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self {
            name: name.into(),
            dim,
            metric,
            potential: None,
            params: BTreeMap::new(),
        })
    }

    /// Diagonal metric from per-axis component functions.
    pub fn diagonal<F>(name: impl Into<String>, dim: usize, diag: F) -> Result<Self>
    where
        F: Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    {
        let metric: MetricFn = Arc::new(move |x: &[Jet]| {
            let n = x.len();
            let d = diag(x)?;
            let mut packed = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in i..n {
                    packed.push(if i == j { d[i].clone() } else { Jet::zero(n) });
                }
            }
            Ok(packed)
        });
        Self::new(name, dim, metric)
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::diagonal("euclidean", dim, |x| {
            Ok(vec![Jet::constant(x.len(), 1.0); x.len()])
        })
    }

    pub fn with_potential(mut self, potential: ScalarFieldFn) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn without_potential(mut self) -> Self {
        self.potential = None;
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    pub fn potential_fn(&self) -> Option<&ScalarFieldFn> {
        self.potential.as_ref()
    }

    pub fn metric_fn(&self) -> &MetricFn {
        &self.metric
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: point.len(),
                right: self.dim,
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutOfDomain {
                point: point.to_vec(),
                reason: "non-finite coordinate".into(),
            });
        }
        Ok(())
    }

    /// Full `n × n` metric jets at `point` (symmetric by construction).
    pub fn metric_jets(&self, point: &[f64]) -> Result<Vec<Jet>> {
        self.check_point(point)?;
        let x = Jet::variables(point)?;
        self.metric_jets_at(&x)
    }

    pub(crate) fn metric_jets_at(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.dim;
        let packed = (self.metric)(x)?;
        if packed.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch {
                left: packed.len(),
                right: n * (n + 1) / 2,
            });
        }
        let mut full = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                full.push(packed[packed_index(n, i, j)].clone());
            }
        }
        Ok(full)
    }

    /// Metric values only (no derivatives).
    pub fn metric_at(&self, point: &[f64]) -> Result<Array2<f64>> {
        self.check_point(point)?;
        let n = self.dim;
        let x: Vec<Jet> = point
            .iter()
            .map(|&v| Jet::constant(n, v).truncate(0))
            .collect();
        let full = self.metric_jets_at(&x)?;
        Ok(Array2::from_shape_fn((n, n), |(i, j)| full[i * n + j].value()))
    }

    /// Potential value only.
    pub fn potential_at(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        let f = self.potential.as_ref().ok_or(Error::MissingPotential)?;
        let n = self.dim;
        let x: Vec<Jet> = point
            .iter()
            .map(|&v| Jet::constant(n, v).truncate(0))
            .collect();
        Ok(f(&x)?.value())
    }
}

/// `e^{2φ} g`, keeping the potential.
pub fn conformal_rescale(metric: &ChartMetric, phi: ScalarFieldFn) -> ChartMetric {
    let inner = metric.metric.clone();
    let rescaled: MetricFn = Arc::new(move |x: &[Jet]| {
        let factor = (&phi(x)? * 2.0).exp()?;
        Ok(inner(x)?.iter().map(|g| g * &factor).collect())
    });
    ChartMetric {
        name: format!("conformal({})", metric.name),
        dim: metric.dim,
        metric: rescaled,
        potential: metric.potential.clone(),
        params: metric.params.clone(),
    }
}

/// Gradient, covariant Hessian and Laplacian of the chart's potential.
pub fn covariant_hessian(
    metric: &ChartMetric,
    point: &[f64],
) -> Result<(Vec<f64>, Array2<f64>, f64)> {
    if !metric.has_potential() {
        return Err(Error::MissingPotential);
    }
    let b = evaluate_bundle(metric, point)?;
    let p = b.potential.expect("potential evaluated");
    Ok((p.grad.to_vec(), p.hess, p.lap))
}

/// `(∇i∇j∇k f − ∇j∇i∇k f) − R_ijkl ∇^l f` for the chart's potential.
pub fn third_derivative_commutator_defect(
    metric: &ChartMetric,
    point: &[f64],
) -> Result<ndarray::Array3<f64>> {
    commutator_defect_with(metric, point, &BundleOptions::default())
}

pub fn commutator_defect_with(
    metric: &ChartMetric,
    point: &[f64],
    options: &BundleOptions,
) -> Result<ndarray::Array3<f64>> {
    if !metric.has_potential() {
        return Err(Error::MissingPotential);
    }
    evaluate_bundle_with(metric, point, options)?
        .commutator_defect()
        .ok_or(Error::MissingPotential)
}

/// `∇^l R_ijkl − (∇_j R_ik − ∇_i R_jk)`; the two sides come from the
/// covariant derivative of Riemann and of Ricci respectively.
pub fn second_bianchi_defect(metric: &ChartMetric, point: &[f64]) -> Result<ndarray::Array3<f64>> {
    Ok(evaluate_bundle(metric, point)?.second_bianchi_defect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_index_is_row_major_upper_triangle() {
        let n = 4;
        let mut expect = 0;
        for i in 0..n {
            for j in i..n {
                assert_eq!(packed_index(n, i, j), expect);
                assert_eq!(packed_index(n, j, i), expect);
                expect += 1;
            }
        }
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(ChartMetric::euclidean(1).is_err());
        assert!(ChartMetric::euclidean(7).is_err());
    }

    #[test]
    fn metric_values_and_point_checks() {
        let m = ChartMetric::euclidean(3).unwrap();
        let g = m.metric_at(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(g, Array2::eye(3));
        assert!(matches!(
            m.metric_at(&[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            m.potential_at(&[0.0, 0.0, 0.0]),
            Err(Error::MissingPotential)
        ));
    }
}
