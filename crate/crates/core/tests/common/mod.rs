//! Finite-difference oracles that only ever look at metric and potential
//! values, never at jets.

#![allow(dead_code)]

use geoflow_core::geometry::ChartMetric;
use nalgebra::DMatrix;

pub const FD_STEP: f64 = 1e-2;

/// Five-point central first derivative of `f` along axis `axis`.
fn d1_plain<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], axis: usize, h: f64) -> f64 {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[axis] += s;
        f(&y)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

/// Richardson-extrapolated five-point derivative (steps `h` and `h/2`).
fn d1<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], axis: usize, h: f64) -> f64 {
    (16.0 * d1_plain(f, x, axis, 0.5 * h) - d1_plain(f, x, axis, h)) / 15.0
}

/// Nested five-point derivative `∂_a ∂_b f`.
fn d2<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], a: usize, b: usize, h: f64) -> f64 {
    let inner = |y: &[f64]| d1(f, y, b, h);
    d1(&inner, x, a, h)
}

/// Curvature computed from finite differences of metric values.
pub struct FdCurvature {
    pub n: usize,
    /// `Γ^k_ij` at `[k][i][j]`.
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// `R_ijkl`.
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
    pub g_inv: Vec<Vec<f64>>,
}

pub fn fd_curvature(metric: &ChartMetric, x: &[f64]) -> FdCurvature {
    let n = metric.dim();
    let h = FD_STEP;
    let comp = |i: usize, j: usize| {
        move |y: &[f64]| metric.metric_at(y).expect("metric evaluates")[(i, j)]
    };
    let g0 = metric.metric_at(x).unwrap();
    let gm = DMatrix::from_fn(n, n, |i, j| g0[(i, j)]);
    let gi = gm.try_inverse().unwrap();
    let g_inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| gi[(i, j)]).collect()).collect();

    // dg[l][i][j] = ∂_l g_ij, ddg[l][m][i][j] = ∂_l ∂_m g_ij
    let mut dg = vec![vec![vec![0.0; n]; n]; n];
    let mut ddg = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in i..n {
            let f = comp(i, j);
            for l in 0..n {
                let v = d1(&f, x, l, h);
                dg[l][i][j] = v;
                dg[l][j][i] = v;
                for m in l..n {
                    let w = d2(&f, x, l, m, h);
                    ddg[l][m][i][j] = w;
                    ddg[l][m][j][i] = w;
                    ddg[m][l][i][j] = w;
                    ddg[m][l][j][i] = w;
                }
            }
        }
    }

    // first kind Γ_lij and its derivative
    let first = |l: usize, i: usize, j: usize| 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
    let dfirst =
        |m: usize, l: usize, i: usize, j: usize| 0.5 * (ddg[m][i][j][l] + ddg[m][j][i][l] - ddg[m][l][i][j]);
    // ∂_m g^kl = −g^ka ∂_m g_ab g^bl
    let dginv = |m: usize, k: usize, l: usize| {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s -= g_inv[k][a] * dg[m][a][b] * g_inv[b][l];
            }
        }
        s
    };
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    let mut dgamma = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += g_inv[k][l] * first(l, i, j);
                }
                gamma[k][i][j] = s;
                for m in 0..n {
                    let mut t = 0.0;
                    for l in 0..n {
                        t += dginv(m, k, l) * first(l, i, j) + g_inv[k][l] * dfirst(m, l, i, j);
                    }
                    dgamma[m][k][i][j] = t;
                }
            }
        }
    }

    let mut riemann = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut up = vec![0.0; n];
                for (r, u) in up.iter_mut().enumerate() {
                    let mut s = dgamma[j][r][i][k] - dgamma[i][r][j][k];
                    for q in 0..n {
                        s += gamma[q][i][k] * gamma[r][j][q] - gamma[q][j][k] * gamma[r][i][q];
                    }
                    *u = s;
                }
                for l in 0..n {
                    riemann[i][j][k][l] = (0..n).map(|r| g0[(l, r)] * up[r]).sum();
                }
            }
        }
    }
    let mut ricci = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                for l in 0..n {
                    s += g_inv[j][l] * riemann[i][j][k][l];
                }
            }
            ricci[i][k] = s;
        }
    }
    let scalar = (0..n)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .map(|(i, k)| g_inv[i][k] * ricci[i][k])
        .sum();
    FdCurvature {
        n,
        christoffel: gamma,
        riemann,
        ricci,
        scalar,
        g_inv,
    }
}

/// `∂i∂j f − Γ^k_ij ∂k f` from finite differences of the potential.
pub fn fd_covariant_hessian(metric: &ChartMetric, x: &[f64]) -> Vec<Vec<f64>> {
    let n = metric.dim();
    let f = |y: &[f64]| metric.potential_at(y).expect("potential evaluates");
    let curv = fd_curvature(metric, x);
    let grad: Vec<f64> = (0..n).map(|k| d1(&f, x, k, FD_STEP)).collect();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = d2(&f, x, i, j, FD_STEP);
            for k in 0..n {
                s -= curv.christoffel[k][i][j] * grad[k];
            }
            out[i][j] = s;
        }
    }
    out
}

/// `|a − b| ≤ tol · max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
