mod common;

use std::sync::Arc;

use common::{close, fd_covariant_hessian, fd_curvature};
use geoflow_core::catalog::{self, FiberKind};
use geoflow_core::geometry::{
    conformal_rescale, covariant_hessian, curvature_basic, evaluate_bundle, second_bianchi_defect,
    third_derivative_commutator_defect, ChartMetric, CurvatureBundle, ScalarFieldFn,
};
use geoflow_core::jets::Jet;
use geoflow_core::Error;
use ndarray::{Array2, ArrayD, Dimension};

fn max_abs<D: Dimension>(a: &ndarray::Array<f64, D>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn max_all(b: &CurvatureBundle) -> f64 {
    let parts: [ArrayD<f64>; 7] = [
        b.christoffel.clone().into_dyn(),
        b.riemann.clone().into_dyn(),
        b.ricci.clone().into_dyn(),
        b.weyl.clone().into_dyn(),
        b.cotton.clone().into_dyn(),
        b.bach.clone().into_dyn(),
        b.div_riemann.clone().into_dyn(),
    ];
    parts.iter().map(max_abs).fold(b.scalar.abs(), f64::max)
}

fn coordinate_potential(axis: usize) -> ScalarFieldFn {
    Arc::new(move |x: &[Jet]| Ok(x[axis].clone()))
}

fn round_sphere(n: usize) -> ChartMetric {
    catalog::make_space_form(FiberKind::Sphere, n, 0.0).unwrap().metric
}

#[test]
fn euclidean_space_is_flat() {
    for n in 3..=5 {
        let g = ChartMetric::euclidean(n).unwrap();
        let p: Vec<f64> = (0..n).map(|i| 0.3 * i as f64 - 0.4).collect();
        let b = evaluate_bundle(&g, &p).unwrap();
        assert_eq!(max_all(&b), 0.0);
    }
}

#[test]
fn two_sphere_in_polar_coordinates() {
    let s2 = ChartMetric::diagonal("s2", 2, |x| {
        let s = x[0].sin()?;
        Ok(vec![Jet::constant(2, 1.0), &s * &s])
    })
    .unwrap();
    let th = 1.0f64;
    let c = curvature_basic(&s2, &[th, 0.0]).unwrap();
    assert!((c.scalar - 2.0).abs() < 1e-12);
    assert!((c.christoffel[[0, 1, 1]] + th.sin() * th.cos()).abs() < 1e-13);
    assert!((c.christoffel[[1, 0, 1]] - th.cos() / th.sin()).abs() < 1e-13);
    assert!((c.christoffel[[1, 1, 0]] - th.cos() / th.sin()).abs() < 1e-13);

    let fd = fd_curvature(&s2, &[th, 0.0]);
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(c.christoffel[[k, i, j]], fd.christoffel[k][i][j], 1e-8));
            }
        }
    }
    assert!(matches!(
        evaluate_bundle(&s2, &[th, 0.0]),
        Err(Error::DimensionTooSmall { dim: 2, min: 3 })
    ));
}

#[test]
fn line_times_two_sphere() {
    let cyl = catalog::make_cylinder(FiberKind::Sphere, 3).unwrap();
    let entry = catalog::lookup("cyl-sphere", &Default::default()).unwrap();
    for p in entry.sample(20, 7) {
        let b = evaluate_bundle(&cyl, &p).unwrap();
        assert!(max_abs(&b.cotton) < 1e-10, "cotton at {p:?}");
        let ev = b.ricci_eigenvalues();
        assert!(ev[0].abs() < 1e-10 && (ev[1] - 1.0).abs() < 1e-10 && (ev[2] - 1.0).abs() < 1e-10);
        assert!((b.scalar - 2.0).abs() < 1e-10);
    }
}

#[test]
fn covariant_hessian_of_quadratic_and_linear_potentials() {
    let lambda = 0.7;
    let quad = catalog::make_gaussian(4, lambda, &[0.0; 4], 0.0).unwrap();
    let (_, hess, lap) = covariant_hessian(&quad.metric, &[0.3, -1.0, 2.0, 0.5]).unwrap();
    assert!((&hess - &(Array2::<f64>::eye(4) * lambda)).iter().all(|v| v.abs() < 1e-14));
    assert!((lap - 4.0 * lambda).abs() < 1e-14);

    let lin = catalog::make_gaussian(3, 0.0, &[1.0, -2.0, 0.5], 0.0).unwrap();
    let (grad, hess, _) = covariant_hessian(&lin.metric, &[1.0, 1.0, 1.0]).unwrap();
    assert_eq!(grad, vec![1.0, -2.0, 0.5]);
    assert!(max_abs(&hess) < 1e-15);

    let bare = ChartMetric::euclidean(3).unwrap();
    assert!(matches!(covariant_hessian(&bare, &[0.0; 3]), Err(Error::MissingPotential)));
}

#[test]
fn covariant_hessian_matches_finite_differences_on_warped_chart() {
    let agila = catalog::make_agila(1).unwrap().metric;
    let p = [0.5, 0.2, -0.3];
    let (_, hess, _) = covariant_hessian(&agila, &p).unwrap();
    let fd = fd_covariant_hessian(&agila, &p);
    for i in 0..3 {
        for j in 0..3 {
            assert!((hess[(i, j)] - fd[i][j]).abs() < 1e-7, "({i},{j}) {} vs {}", hess[(i, j)], fd[i][j]);
        }
    }
}

#[test]
fn commutator_defect_examples() {
    let flat = ChartMetric::euclidean(3)
        .unwrap()
        .with_potential(Arc::new(|x: &[Jet]| (&(&x[0] * &x[1]) * &x[2]).sin()));
    let d = third_derivative_commutator_defect(&flat, &[0.4, -0.2, 0.9]).unwrap();
    assert!(max_abs(&d) < 1e-13);

    let sphere = round_sphere(3).with_potential(coordinate_potential(0));
    let d = third_derivative_commutator_defect(&sphere, &[0.3, -0.2, 0.4]).unwrap();
    assert!(max_abs(&d) < 1e-8);

    let entry = catalog::lookup("agila1", &Default::default()).unwrap();
    for p in entry.sample(10, 3) {
        let d = third_derivative_commutator_defect(&entry.instance.metric, &p).unwrap();
        assert!(max_abs(&d) < 1e-7);
    }
}

fn polynomial_phi(c: [f64; 4]) -> ScalarFieldFn {
    Arc::new(move |x: &[Jet]| {
        let n = x.len();
        let mut f = Jet::constant(n, c[0]);
        f.accumulate(c[1], &x[0]);
        f.accumulate_product(c[2], &x[1], &x[2]);
        f.accumulate_product(c[3], &x[3], &(&x[0] * &x[0]));
        Ok(f)
    })
}

#[test]
fn conformal_rescale_examples() {
    let rigid = catalog::lookup("rigid-r2xs2", &Default::default()).unwrap();
    let g = &rigid.instance.metric;
    let p = [0.7, -0.3, 0.2, 0.1];

    let same = conformal_rescale(g, Arc::new(|x: &[Jet]| Ok(Jet::zero(x.len()))));
    let a = evaluate_bundle(g, &p).unwrap();
    let b = evaluate_bundle(&same, &p).unwrap();
    assert_eq!(a.riemann, b.riemann);
    assert_eq!(a.bach, b.bach);

    let flat = conformal_rescale(
        &ChartMetric::euclidean(4).unwrap(),
        Arc::new(|x: &[Jet]| Ok(&x[0] * 0.1)),
    );
    let b = evaluate_bundle(&flat, &[0.5, 0.1, -0.2, 0.3]).unwrap();
    assert!(max_abs(&b.bach) < 1e-12);
    assert!(max_abs(&b.weyl) < 1e-12);
    assert!(b.scalar.abs() > 1e-3);

    let phis = [
        [0.1, 0.2, -0.1, 0.05],
        [-0.2, 0.0, 0.3, -0.1],
        [0.0, -0.15, 0.1, 0.1],
        [0.3, 0.1, 0.0, -0.05],
        [0.05, -0.3, -0.2, 0.02],
    ];
    for c in phis {
        let phi = polynomial_phi(c);
        let rescaled = conformal_rescale(g, phi.clone());
        for q in rigid.sample(3, 11) {
            let base = evaluate_bundle(g, &q).unwrap();
            let new = evaluate_bundle(&rescaled, &q).unwrap();
            let xs: Vec<Jet> = q.iter().map(|&v| Jet::constant(4, v)).collect();
            let factor = (-2.0 * phi(&xs).unwrap().value()).exp();
            let diff = &new.bach - &(&base.bach * factor);
            assert!(max_abs(&diff) < 1e-7, "phi {c:?} at {q:?}: {}", max_abs(&diff));
            assert!(max_abs(&base.bach) > 0.1);
        }
    }
}

#[test]
fn second_bianchi_examples() {
    let d = second_bianchi_defect(&ChartMetric::euclidean(3).unwrap(), &[0.1, 0.2, 0.3]).unwrap();
    assert_eq!(max_abs(&d), 0.0);
    let d = second_bianchi_defect(&round_sphere(3), &[0.2, -0.1, 0.3]).unwrap();
    assert!(max_abs(&d) < 1e-9);
    let entry = catalog::lookup("agila2", &Default::default()).unwrap();
    for p in entry.sample(10, 5) {
        let d = second_bianchi_defect(&entry.instance.metric, &p).unwrap();
        assert!(max_abs(&d) < 1e-7);
    }
}

#[test]
fn catalog_invariants_at_fifty_points() {
    for entry in catalog::all_entries().unwrap() {
        let metric = &entry.instance.metric;
        for p in entry.sample(50, 42) {
            let b = evaluate_bundle(metric, &p).unwrap();
            let s = b.symmetry_defects();
            assert!(s.max() < 1e-7, "{} at {p:?}: {s:?}", entry.name());
            let c = b.commutator_defect().unwrap();
            assert!(max_abs(&c) < 1e-7, "{} commutator at {p:?}", entry.name());
            if b.dim == 3 {
                assert!(max_abs(&b.weyl) < 1e-9, "{} weyl", entry.name());
            }
        }
    }
}

#[test]
fn einstein_entries_have_vanishing_bach() {
    for name in ["sphere", "hyperbolic"] {
        let entry = catalog::lookup(name, &Default::default()).unwrap();
        for p in entry.sample(20, 9) {
            let b = evaluate_bundle(&entry.instance.metric, &p).unwrap();
            assert!(max_abs(&b.bach) < 1e-8, "{name}");
        }
    }
}

/// `max |a − b| ≤ tol · max(1, max |b|)` over paired entries.
fn tensor_close(pairs: &[(f64, f64)], tol: f64) -> Result<(), (f64, f64)> {
    let scale = pairs.iter().fold(1.0f64, |m, &(_, b)| m.max(b.abs()));
    let err = pairs.iter().fold(0.0f64, |m, &(a, b)| m.max((a - b).abs()));
    if err <= tol * scale {
        Ok(())
    } else {
        Err((err, scale))
    }
}

#[test]
fn jets_agree_with_finite_difference_oracle() {
    let tol = 1e-5;
    for entry in catalog::all_entries().unwrap() {
        let metric = &entry.instance.metric;
        for p in entry.sample(4, 21) {
            let b = evaluate_bundle(metric, &p).unwrap();
            let fd = fd_curvature(metric, &p);
            let n = fd.n;
            let mut gamma = Vec::new();
            let mut riem = Vec::new();
            let mut ric = Vec::new();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        gamma.push((b.christoffel[[k, i, j]], fd.christoffel[k][i][j]));
                        for l in 0..n {
                            riem.push((b.riemann[[i, j, k, l]], fd.riemann[i][j][k][l]));
                        }
                    }
                    ric.push((b.ricci[(k, i)], fd.ricci[k][i]));
                }
            }
            let name = entry.name();
            tensor_close(&gamma, tol).unwrap_or_else(|e| panic!("{name} christoffel {e:?}"));
            tensor_close(&riem, tol).unwrap_or_else(|e| panic!("{name} riemann {e:?}"));
            tensor_close(&ric, tol).unwrap_or_else(|e| panic!("{name} ricci {e:?}"));
            assert!(close(b.scalar, fd.scalar, tol), "{name}: {} vs {}", b.scalar, fd.scalar);
        }
    }
}

#[test]
fn degenerate_metric_is_rejected() {
    let g = ChartMetric::diagonal("pinched", 3, |x| {
        Ok(vec![x[0].clone(), Jet::constant(3, 1.0), Jet::constant(3, 1.0)])
    })
    .unwrap();
    assert!(matches!(evaluate_bundle(&g, &[0.0, 0.0, 0.0]), Err(Error::SingularMetric { .. })));
    assert!(evaluate_bundle(&g, &[0.5, 0.0, 0.0]).is_ok());
}
