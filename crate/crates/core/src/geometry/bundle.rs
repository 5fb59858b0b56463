use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, Array3, Array4, Array5};

use super::{ChartMetric, POSITIVE_DEFINITE_FLOOR};
use crate::error::{Error, Result};
use crate::jets::{Jet, MultiIndex};

/// Deliberate curvature sign errors, used to prove the Ricci-identity
/// sentinel catches them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SignFlip {
    #[default]
    None,
    /// Use `∇i∇j − ∇j∇i` in the curvature operator.
    Operator,
    /// Lower `R_ijk^r` onto the third slot instead of the fourth.
    Lowering,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BundleOptions {
    pub sign_flip: SignFlip,
}

/// Levi-Civita connection and Riemann/Ricci/scalar curvature; valid for `n ≥ 2`.
#[derive(Clone, Debug)]
pub struct BasicCurvature {
    pub point: Vec<f64>,
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    /// `christoffel[[k, i, j]] = Γ^k_ij`.
    pub christoffel: Array3<f64>,
    pub riemann: Array4<f64>,
    pub ricci: Array2<f64>,
    pub scalar: f64,
}

/// Derivatives of the potential `f` at the bundle point.
#[derive(Clone, Debug)]
pub struct PotentialDerivatives {
    pub value: f64,
    /// `∂_i f` (covector).
    pub grad: Array1<f64>,
    /// `∇^i f` (vector).
    pub grad_vec: Array1<f64>,
    pub hess: Array2<f64>,
    pub lap: f64,
    /// `third[[i, j, k]] = ∇_i ∇_j ∇_k f`.
    pub third: Array3<f64>,
}

impl PotentialDerivatives {
    pub fn grad_norm(&self) -> f64 {
        self.grad.dot(&self.grad_vec).max(0.0).sqrt()
    }
}

/// Jet-valued fields kept for downstream quantities that need one more derivative.
#[derive(Clone, Debug)]
pub(crate) struct FieldJets {
    pub g_inv: Vec<Jet>,
    /// `∂_i R`, degree 1.
    pub grad_scalar: Vec<Jet>,
    /// `∂_i f`, degree 3.
    pub grad_potential: Option<Vec<Jet>>,
}

/// All pointwise curvature data at one chart point.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub dim: usize,
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    /// `Γ^k_ij` at `[[k, i, j]]`.
    pub christoffel: Array3<f64>,
    /// `∂_m Γ^k_ij` at `[[m, k, i, j]]`.
    pub christoffel_d1: Array4<f64>,
    /// `∂_m ∂_p Γ^k_ij` at `[[m, p, k, i, j]]`.
    pub christoffel_d2: Array5<f64>,
    pub riemann: Array4<f64>,
    pub ricci: Array2<f64>,
    pub scalar: f64,
    /// `∂_i R`.
    pub grad_scalar: Array1<f64>,
    pub hess_scalar: Array2<f64>,
    pub lap_scalar: f64,
    /// `∇_i R_jk` at `[[i, j, k]]`.
    pub cov_ricci: Array3<f64>,
    /// `∇^l R_ijkl`.
    pub div_riemann: Array3<f64>,
    pub weyl: Array4<f64>,
    pub cotton: Array3<f64>,
    pub bach: Array2<f64>,
    pub potential: Option<PotentialDerivatives>,
    pub(crate) jets: FieldJets,
}

/// Largest violations of the algebraic symmetries a bundle must satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryDefects {
    pub riemann_antisymmetry: f64,
    pub riemann_pair_symmetry: f64,
    pub ricci_symmetry: f64,
    pub bach_symmetry: f64,
    pub bach_trace: f64,
    pub weyl_trace: f64,
}

impl SymmetryDefects {
    pub fn max(&self) -> f64 {
        [
            self.riemann_antisymmetry,
            self.riemann_pair_symmetry,
            self.ricci_symmetry,
            self.bach_symmetry,
            self.bach_trace,
            self.weyl_trace,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

struct Stage {
    n: usize,
    g: Vec<Jet>,
    g_inv: Vec<Jet>,
    gamma: Vec<Jet>,
    riem: Vec<Jet>,
    ric: Vec<Jet>,
    scalar: Jet,
    x: Vec<Jet>,
}

impl Stage {
    fn gamma(&self, k: usize, i: usize, j: usize) -> &Jet {
        &self.gamma[(k * self.n + i) * self.n + j]
    }
}

fn matmul(n: usize, a: &[Jet], b: &[Jet]) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::zero(n);
            for k in 0..n {
                acc.accumulate_product(1.0, &a[i * n + k], &b[k * n + j]);
            }
            out.push(acc);
        }
    }
    out
}

fn to_array2(n: usize, v: &[Jet]) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| v[i * n + j].value())
}

fn levi_civita(metric: &ChartMetric, point: &[f64], options: &BundleOptions) -> Result<Stage> {
    let n = metric.dim();
    metric.check_point(point)?;
    let x = Jet::variables(point)?;
    let g = metric.metric_jets_at(&x)?;
    if g.iter().any(|j| j.dim() != n) {
        return Err(Error::DimensionMismatch {
            left: g[0].dim(),
            right: n,
        });
    }

    let g0 = DMatrix::from_fn(n, n, |i, j| g[i * n + j].value());
    if g0.iter().any(|v| !v.is_finite()) {
        return Err(Error::OutOfDomain {
            point: point.to_vec(),
            reason: "metric is not finite".into(),
        });
    }
    let min_eigenvalue = SymmetricEigen::new(g0.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(min_eigenvalue > POSITIVE_DEFINITE_FLOOR) {
        return Err(Error::SingularMetric { min_eigenvalue });
    }
    let g0_inv = g0
        .clone()
        .try_inverse()
        .ok_or(Error::SingularMetric { min_eigenvalue })?;

    // g = g0 (1 + g0⁻¹ δ) with δ nilpotent, so the Neumann series terminates
    // after MAX_ORDER terms.
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::zero(n);
            for k in 0..n {
                let mut delta = g[k * n + j].clone();
                delta = delta + (-g0[(k, j)]);
                acc.accumulate(-g0_inv[(i, k)], &delta);
            }
            a.push(acc);
        }
    }
    let mut term: Vec<Jet> = (0..n * n)
        .map(|p| Jet::constant(n, g0_inv[(p / n, p % n)]))
        .collect();
    let mut g_inv = term.clone();
    for _ in 0..crate::jets::MAX_ORDER {
        term = matmul(n, &a, &term);
        for (acc, t) in g_inv.iter_mut().zip(&term) {
            *acc += t;
        }
    }

    // dg[(l*n + i)*n + j] = ∂_l g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for p in 0..n * n {
            dg.push(g[p].partial(l)?);
        }
    }
    let dgi = |l: usize, i: usize, j: usize| &dg[(l * n + i) * n + j];

    let mut first_kind = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = dgi(i, j, l) + dgi(j, i, l);
                s -= dgi(l, i, j);
                first_kind.push(s * 0.5);
            }
        }
    }
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = Jet::zero(n);
                for l in 0..n {
                    acc.accumulate_product(1.0, &g_inv[k * n + l], &first_kind[(l * n + i) * n + j]);
                }
                gamma.push(acc);
            }
        }
    }

    // dgamma[((m*n + r)*n + i)*n + k] = ∂_m Γ^r_ik
    let mut dgamma = Vec::with_capacity(n.pow(4));
    for m in 0..n {
        for gm in &gamma {
            dgamma.push(gm.partial(m)?);
        }
    }
    let dgam = |m: usize, r: usize, i: usize, k: usize| &dgamma[((m * n + r) * n + i) * n + k];
    let gam = |k: usize, i: usize, j: usize| &gamma[(k * n + i) * n + j];

    // R_ijk^r = ∂_jΓ^r_ik − ∂_iΓ^r_jk + Γ^s_ik Γ^r_js − Γ^s_jk Γ^r_is
    let sign = if options.sign_flip == SignFlip::Operator {
        -1.0
    } else {
        1.0
    };
    let idx4 = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let mut r_up = vec![Jet::zero(n); n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                for r in 0..n {
                    let mut acc = Jet::zero(n);
                    acc.accumulate(sign, dgam(j, r, i, k));
                    acc.accumulate(-sign, dgam(i, r, j, k));
                    for s in 0..n {
                        acc.accumulate_product(sign, gam(s, i, k), gam(r, j, s));
                        acc.accumulate_product(-sign, gam(s, j, k), gam(r, i, s));
                    }
                    r_up[idx4(i, j, k, r)] = acc;
                }
            }
        }
    }
    let mut riem = vec![Jet::zero(n); n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let mut acc = Jet::zero(n);
                    for r in 0..n {
                        match options.sign_flip {
                            SignFlip::Lowering => acc.accumulate_product(1.0, &g[k * n + r], &r_up[idx4(i, j, l, r)]),
                            _ => acc.accumulate_product(1.0, &g[l * n + r], &r_up[idx4(i, j, k, r)]),
                        }
                    }
                    riem[idx4(i, j, k, l)] = acc;
                }
            }
        }
    }

    let mut ric = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let mut acc = Jet::zero(n);
            for j in 0..n {
                for l in 0..n {
                    acc.accumulate_product(1.0, &g_inv[j * n + l], &riem[idx4(i, j, k, l)]);
                }
            }
            ric.push(acc);
        }
    }
    let mut scalar = Jet::zero(n);
    for p in 0..n * n {
        scalar.accumulate_product(1.0, &g_inv[p], &ric[p]);
    }

    Ok(Stage {
        n,
        g,
        g_inv,
        gamma,
        riem,
        ric,
        scalar,
        x,
    })
}

fn basic_from(stage: &Stage, point: &[f64]) -> BasicCurvature {
    let n = stage.n;
    BasicCurvature {
        point: point.to_vec(),
        g: to_array2(n, &stage.g),
        g_inv: to_array2(n, &stage.g_inv),
        christoffel: Array3::from_shape_fn((n, n, n), |(k, i, j)| stage.gamma(k, i, j).value()),
        riemann: Array4::from_shape_fn((n, n, n, n), |(i, j, k, l)| {
            stage.riem[((i * n + j) * n + k) * n + l].value()
        }),
        ricci: to_array2(n, &stage.ric),
        scalar: stage.scalar.value(),
    }
}

/// Connection and curvature through the scalar curvature; works for surfaces too.
pub fn curvature_basic(metric: &ChartMetric, point: &[f64]) -> Result<BasicCurvature> {
    let stage = levi_civita(metric, point, &BundleOptions::default())?;
    Ok(basic_from(&stage, point))
}

pub fn evaluate_bundle(metric: &ChartMetric, point: &[f64]) -> Result<CurvatureBundle> {
    evaluate_bundle_with(metric, point, &BundleOptions::default())
}

pub fn evaluate_bundle_with(
    metric: &ChartMetric,
    point: &[f64],
    options: &BundleOptions,
) -> Result<CurvatureBundle> {
    let n = metric.dim();
    if n < 3 {
        return Err(Error::DimensionTooSmall { dim: n, min: 3 });
    }
    let stage = levi_civita(metric, point, options)?;
    let basic = basic_from(&stage, point);
    let g = &basic.g;
    let g_inv = &basic.g_inv;
    let gam = &basic.christoffel;
    let ricci = &basic.ricci;
    let riem = &basic.riemann;
    let nf = n as f64;

    let mut christoffel_d1 = Array4::zeros((n, n, n, n));
    let mut christoffel_d2 = Array5::zeros((n, n, n, n, n));
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let gm = stage.gamma(k, i, j);
                for m in 0..n {
                    christoffel_d1[[m, k, i, j]] = gm.d1(m);
                    for p in 0..n {
                        christoffel_d2[[m, p, k, i, j]] =
                            gm.extract(&MultiIndex::from_slots(n, &[m, p])?)?;
                    }
                }
            }
        }
    }

    let grad_scalar_jets: Vec<Jet> = (0..n)
        .map(|i| stage.scalar.partial(i))
        .collect::<Result<_>>()?;
    let grad_scalar = Array1::from_shape_fn(n, |i| grad_scalar_jets[i].value());
    let hess_scalar = Array2::from_shape_fn((n, n), |(i, j)| {
        grad_scalar_jets[i].d1(j) - (0..n).map(|k| gam[[k, i, j]] * grad_scalar[k]).sum::<f64>()
    });
    let lap_scalar = (g_inv * &hess_scalar).sum();

    // ∇_i R_jk as degree-1 jets
    let mut cov_ric_jets = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = stage.ric[j * n + k].partial(i)?;
                for m in 0..n {
                    acc.accumulate_product(-1.0, stage.gamma(m, i, j), &stage.ric[m * n + k]);
                    acc.accumulate_product(-1.0, stage.gamma(m, i, k), &stage.ric[j * n + m]);
                }
                cov_ric_jets.push(acc);
            }
        }
    }
    let cov_ricci = Array3::from_shape_fn((n, n, n), |(i, j, k)| cov_ric_jets[(i * n + j) * n + k].value());

    // C_ijk = ∇_i R_jk − ∇_j R_ik − (g_jk ∇_i R − g_ik ∇_j R) / (2(n−1))
    let c_scale = 1.0 / (2.0 * (nf - 1.0));
    let mut cotton_jets = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut c = &cov_ric_jets[(i * n + j) * n + k] - &cov_ric_jets[(j * n + i) * n + k];
                c.accumulate_product(-c_scale, &stage.g[j * n + k], &grad_scalar_jets[i]);
                c.accumulate_product(c_scale, &stage.g[i * n + k], &grad_scalar_jets[j]);
                cotton_jets.push(c);
            }
        }
    }
    let cotton = Array3::from_shape_fn((n, n, n), |(i, j, k)| cotton_jets[(i * n + j) * n + k].value());

    // ∇^k C_kij
    let mut div_cotton = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for l in 0..n {
                for k in 0..n {
                    let ginv = g_inv[[k, l]];
                    if ginv == 0.0 {
                        continue;
                    }
                    let mut nab = cotton_jets[(k * n + i) * n + j].d1(l);
                    for m in 0..n {
                        nab -= gam[[m, l, k]] * cotton[[m, i, j]]
                            + gam[[m, l, i]] * cotton[[k, m, j]]
                            + gam[[m, l, j]] * cotton[[k, i, m]];
                    }
                    s += ginv * nab;
                }
            }
            div_cotton[[i, j]] = s;
        }
    }

    let scalar = basic.scalar;
    let weyl = if n >= 3 {
        let a = 1.0 / (nf - 2.0);
        let b = scalar / ((nf - 1.0) * (nf - 2.0));
        Array4::from_shape_fn((n, n, n, n), |(i, j, k, l)| {
            riem[[i, j, k, l]]
                - a * (g[[i, k]] * ricci[[j, l]] - g[[i, l]] * ricci[[j, k]] - g[[j, k]] * ricci[[i, l]]
                    + g[[j, l]] * ricci[[i, k]])
                + b * (g[[i, k]] * g[[j, l]] - g[[i, l]] * g[[j, k]])
        })
    } else {
        unreachable!()
    };

    let bach = if n == 3 {
        div_cotton.clone()
    } else {
        let ric_up = g_inv.dot(ricci).dot(g_inv);
        Array2::from_shape_fn((n, n), |(i, j)| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    s += ric_up[[a, b]] * weyl[[i, a, j, b]];
                }
            }
            (div_cotton[[i, j]] + s) / (nf - 2.0)
        })
    };

    // ∇^l R_ijkl from the covariant derivative of Riemann
    let idx4 = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let mut div_riemann = Array3::<f64>::zeros((n, n, n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for m in 0..n {
                    for l in 0..n {
                        let ginv = g_inv[[m, l]];
                        if ginv == 0.0 {
                            continue;
                        }
                        let mut nab = stage.riem[idx4(i, j, k, l)].d1(m);
                        for p in 0..n {
                            nab -= gam[[p, m, i]] * riem[[p, j, k, l]]
                                + gam[[p, m, j]] * riem[[i, p, k, l]]
                                + gam[[p, m, k]] * riem[[i, j, p, l]]
                                + gam[[p, m, l]] * riem[[i, j, k, p]];
                        }
                        s += ginv * nab;
                    }
                }
                div_riemann[[i, j, k]] = s;
            }
        }
    }

    let (potential, grad_potential) = match metric.potential_fn() {
        None => (None, None),
        Some(pot) => {
            let f = pot(&stage.x)?;
            if f.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: f.dim(),
                    right: n,
                });
            }
            let df: Vec<Jet> = (0..n).map(|i| f.partial(i)).collect::<Result<_>>()?;
            let grad = Array1::from_shape_fn(n, |i| df[i].value());
            let grad_vec = g_inv.dot(&grad);
            let mut hess_jets = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let mut h = df[i].partial(j)?;
                    for k in 0..n {
                        h.accumulate_product(-1.0, stage.gamma(k, i, j), &df[k]);
                    }
                    hess_jets.push(h);
                }
            }
            let hess = to_array2(n, &hess_jets);
            let lap = (g_inv * &hess).sum();
            let third = Array3::from_shape_fn((n, n, n), |(i, j, k)| {
                let mut v = hess_jets[j * n + k].d1(i);
                for m in 0..n {
                    v -= gam[[m, i, j]] * hess[[m, k]] + gam[[m, i, k]] * hess[[j, m]];
                }
                v
            });
            (
                Some(PotentialDerivatives {
                    value: f.value(),
                    grad,
                    grad_vec,
                    hess,
                    lap,
                    third,
                }),
                Some(df),
            )
        }
    };

    Ok(CurvatureBundle {
        point: point.to_vec(),
        dim: n,
        g: basic.g.clone(),
        g_inv: basic.g_inv.clone(),
        christoffel: basic.christoffel.clone(),
        christoffel_d1,
        christoffel_d2,
        riemann: basic.riemann.clone(),
        ricci: basic.ricci.clone(),
        scalar,
        grad_scalar,
        hess_scalar,
        lap_scalar,
        cov_ricci,
        div_riemann,
        weyl,
        cotton,
        bach,
        potential,
        jets: FieldJets {
            g_inv: stage.g_inv,
            grad_scalar: grad_scalar_jets,
            grad_potential,
        },
    })
}

impl CurvatureBundle {
    /// `g^{ik} g^{jl} T_ij T_kl`, square-rooted.
    pub fn norm2(&self, t: &Array2<f64>) -> f64 {
        let up = self.g_inv.dot(t).dot(&self.g_inv);
        (&up * t).sum().max(0.0).sqrt()
    }

    /// Metric norm of a covector.
    pub fn covector_norm(&self, v: &Array1<f64>) -> f64 {
        v.dot(&self.g_inv.dot(v)).max(0.0).sqrt()
    }

    /// `|Ric|²`.
    pub fn ricci_norm_sq(&self) -> f64 {
        self.norm2(&self.ricci).powi(2)
    }

    /// `(Ric²)_ij = R_i^l R_lj`.
    pub fn ricci_squared(&self) -> Array2<f64> {
        self.ricci.dot(&self.g_inv).dot(&self.ricci)
    }

    /// Eigenvalues of the Ricci endomorphism `g^{-1} Ric`, ascending.
    pub fn ricci_eigenvalues(&self) -> Vec<f64> {
        generalized_eigenvalues(&self.ricci, &self.g)
    }

    pub fn commutator_defect(&self) -> Option<Array3<f64>> {
        let p = self.potential.as_ref()?;
        let n = self.dim;
        Some(Array3::from_shape_fn((n, n, n), |(i, j, k)| {
            let lhs = p.third[[i, j, k]] - p.third[[j, i, k]];
            let rhs: f64 = (0..n).map(|l| self.riemann[[i, j, k, l]] * p.grad_vec[l]).sum();
            lhs - rhs
        }))
    }

    pub fn second_bianchi_defect(&self) -> Array3<f64> {
        let n = self.dim;
        Array3::from_shape_fn((n, n, n), |(i, j, k)| {
            self.div_riemann[[i, j, k]] - (self.cov_ricci[[j, i, k]] - self.cov_ricci[[i, j, k]])
        })
    }

    pub fn symmetry_defects(&self) -> SymmetryDefects {
        let n = self.dim;
        let r = &self.riemann;
        let mut d = SymmetryDefects::default();
        for i in 0..n {
            for j in 0..n {
                d.ricci_symmetry = d.ricci_symmetry.max((self.ricci[[i, j]] - self.ricci[[j, i]]).abs());
                d.bach_symmetry = d.bach_symmetry.max((self.bach[[i, j]] - self.bach[[j, i]]).abs());
                for k in 0..n {
                    for l in 0..n {
                        let v = r[[i, j, k, l]];
                        d.riemann_antisymmetry = d
                            .riemann_antisymmetry
                            .max((v + r[[j, i, k, l]]).abs())
                            .max((v + r[[i, j, l, k]]).abs());
                        d.riemann_pair_symmetry = d.riemann_pair_symmetry.max((v - r[[k, l, i, j]]).abs());
                    }
                }
            }
        }
        for j in 0..n {
            for l in 0..n {
                let mut t = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        t += self.g_inv[[i, k]] * self.weyl[[i, j, k, l]];
                    }
                }
                d.weyl_trace = d.weyl_trace.max(t.abs());
            }
        }
        d.bach_trace = (&self.g_inv * &self.bach).sum().abs();
        d
    }
}

/// Eigenvalues of `A` relative to the positive-definite `G`, ascending.
pub(crate) fn generalized_eigenvalues(a: &Array2<f64>, g: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    let gm = DMatrix::from_fn(n, n, |i, j| g[[i, j]]);
    let am = DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
    let chol = gm.cholesky().expect("metric is positive definite");
    let l_inv = chol.l().try_inverse().expect("cholesky factor invertible");
    let m = &l_inv * am * l_inv.transpose();
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_sphere(n: usize) -> ChartMetric {
        ChartMetric::diagonal("sphere", n, |x| {
            let n = x.len();
            let mut r2 = Jet::constant(n, 1.0);
            for xi in x {
                r2 += &(xi * xi);
            }
            let c = r2.powi(2).recip()? * 4.0;
            Ok(vec![c; n])
        })
        .unwrap()
    }

    #[test]
    fn two_sphere_basic_curvature() {
        let b = curvature_basic(&round_sphere(2), &[0.3, -0.2]).unwrap();
        assert!((b.scalar - 2.0).abs() < 1e-12);
        assert!(b.riemann[[0, 1, 0, 1]] > 0.0);
        assert!(matches!(
            evaluate_bundle(&round_sphere(2), &[0.3, -0.2]),
            Err(Error::DimensionTooSmall { dim: 2, min: 3 })
        ));
    }

    #[test]
    fn round_spheres_are_einstein_and_conformally_flat() {
        for n in 3..=5 {
            let p: Vec<f64> = (0..n).map(|i| 0.1 * (i as f64 + 1.0)).collect();
            let b = evaluate_bundle(&round_sphere(n), &p).unwrap();
            let nf = n as f64;
            assert!((b.scalar - nf * (nf - 1.0)).abs() < 1e-10, "R = {}", b.scalar);
            let trace_free = &b.ricci - &(&b.g * (nf - 1.0));
            assert!(trace_free.iter().all(|v| v.abs() < 1e-10));
            assert!(b.weyl.iter().all(|v| v.abs() < 1e-10));
            assert!(b.cotton.iter().all(|v| v.abs() < 1e-10));
            assert!(b.bach.iter().all(|v| v.abs() < 1e-9));
            assert!(b.symmetry_defects().max() < 1e-10);
            assert!(b.second_bianchi_defect().iter().all(|v| v.abs() < 1e-10));
            assert!(b.grad_scalar.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn singular_metric_is_rejected() {
        let m = ChartMetric::diagonal("degenerate", 3, |x| {
            let n = x.len();
            Ok(vec![Jet::constant(n, 1.0), Jet::constant(n, 1.0), &x[0] * &x[0]])
        })
        .unwrap();
        assert!(matches!(
            evaluate_bundle(&m, &[0.0, 0.5, 0.5]),
            Err(Error::SingularMetric { .. })
        ));
    }
}
