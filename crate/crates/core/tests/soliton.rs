use std::sync::Arc;

use geoflow_core::catalog::{self, CatalogEntry, CatalogOptions, FiberSpec};
use geoflow_core::geometry::ChartMetric;
use geoflow_core::jets::Jet;
use geoflow_core::soliton::{mu_eigen_form, RadialSpectrum, SolitonInstance};
use geoflow_core::Error;
use ndarray::Array2;
use proptest::prelude::*;

fn entry(name: &str) -> CatalogEntry {
    catalog::lookup(name, &CatalogOptions::default()).unwrap()
}

fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn rigid_line_sphere() -> SolitonInstance {
    catalog::make_rigid(1, FiberSpec::sphere(2).unwrap(), 0.0).unwrap()
}

/// Values of the closed-form warped profiles, computed symbolically.
struct Frozen {
    t: f64,
    scalar: f64,
    xi1: f64,
    xi2: f64,
    hamilton: f64,
}

const AGILA1: [Frozen; 3] = [
    Frozen { t: 0.0, scalar: -3.5, xi1: -1.5, xi2: -1.0, hamilton: -3.3888888888888889 },
    Frozen {
        t: 0.5,
        scalar: -2.0068723947029344,
        xi1: -0.93110670922295395,
        xi2: -0.53788284273999024,
        hamilton: -1.7693405523080353,
    },
    Frozen {
        t: -1.0,
        scalar: -5.4947696386743077,
        xi1: -1.9715813267627779,
        xi2: -1.7615941559557649,
        hamilton: -5.4884543779549250,
    },
];

const AGILA2: [Frozen; 2] = [
    Frozen { t: 0.5, scalar: -2.88, xi1: -1.28, xi2: -0.8, hamilton: -2.8251430114031577 },
    Frozen { t: -1.0, scalar: -1.5, xi1: -0.5, xi2: -0.5, hamilton: -1.3762549290133212 },
];

#[test]
fn agila_spectra_match_symbolic_values() {
    for (name, table) in [("agila1", &AGILA1[..]), ("agila2", &AGILA2[..])] {
        let inst = entry(name).instance;
        for row in table {
            let p = inst.evaluate(&[row.t, 0.3, -0.2]).unwrap();
            assert!((p.bundle.scalar - row.scalar).abs() < 1e-12, "{name} R at {}", row.t);
            let s = p.radial_spectrum().unwrap();
            assert!((s.xi1_formula - row.xi1).abs() < 1e-10, "{name} xi1 at {}", row.t);
            assert!((s.xi1_rayleigh - row.xi1).abs() < 1e-12);
            assert!((s.xi[1] - row.xi2).abs() < 1e-12 && (s.xi[2] - row.xi2).abs() < 1e-12);
            assert!((p.hamilton_value() - row.hamilton).abs() < 1e-12, "{name} hamilton at {}", row.t);
        }
    }
}

#[test]
fn soliton_residual_examples() {
    let g = catalog::make_gaussian(4, -0.3, &[0.5, 0.0, 1.0, -1.0], 0.7).unwrap();
    assert_eq!(max_abs(&g.soliton_residual(&[0.1, 2.0, -1.0, 0.4]).unwrap()), 0.0);

    let a1 = entry("agila1");
    for p in a1.sample(50, 42) {
        assert!(max_abs(&a1.instance.soliton_residual(&p).unwrap()) < 1e-8);
    }
    let rigid = entry("rigid-r2xs2");
    for p in rigid.sample(20, 1) {
        assert!(max_abs(&rigid.instance.soliton_residual(&p).unwrap()) < 1e-9);
    }
}

#[test]
fn identity_residual_examples() {
    let g = catalog::make_gaussian(3, 1.0, &[1.0, 0.0, 0.0], 0.25).unwrap();
    assert!(g.evaluate(&[0.2, 0.3, 0.4]).unwrap().identity_residuals().unwrap().max_abs() < 1e-14);

    let a2 = entry("agila2");
    for p in a2.sample(20, 8) {
        let r = a2.instance.evaluate(&p).unwrap().identity_residuals().unwrap();
        assert!(r.max_abs() < 1e-7);
    }
    let cyl = rigid_line_sphere();
    for p in [[0.4, 0.1, 0.2], [-1.0, -0.5, 0.3]] {
        assert!(cyl.evaluate(&p).unwrap().identity_residuals().unwrap().max_abs() < 1e-9);
    }
    let broken = catalog::perturb_potential(&a2.instance, 0.01);
    let err = broken.evaluate(&[0.5, 0.2, 0.1]).unwrap().identity_residuals().unwrap_err();
    assert!(matches!(err, Error::PreconditionUnmet { .. }));
}

#[test]
fn hamilton_examples() {
    let v = [0.6, -0.8, 2.0];
    let steady = catalog::make_gaussian(3, 0.0, &v, 0.0).unwrap();
    let expect: f64 = v.iter().map(|x| x * x).sum();
    for p in [[0.0, 0.0, 0.0], [1.0, -2.0, 3.0]] {
        assert!((steady.evaluate(&p).unwrap().hamilton_value() - expect).abs() < 1e-14);
    }
}

#[test]
fn rectifiability_examples() {
    for name in ["agila1", "agila2"] {
        let e = entry(name);
        for p in e.sample(20, 4) {
            let sp = e.instance.evaluate(&p).unwrap();
            if sp.gradf_norm() > 1e-6 {
                assert!(sp.rectifiability_defect().unwrap() < 1e-8);
            }
        }
    }
    let rigid = entry("rigid-r2xs2").instance;
    assert!(rigid.evaluate(&[0.5, 0.1, 0.2, 0.3]).unwrap().rectifiability_defect().unwrap() < 1e-13);

    let broken = catalog::perturb_potential(&entry("agila1").instance, 0.01);
    let d = broken.evaluate(&[0.5, 0.4, -0.3]).unwrap().rectifiability_defect().unwrap();
    assert!(d > 1e-3, "{d}");

    let crit = entry("agila2").instance.evaluate(&[0.0, 0.1, 0.1]).unwrap();
    assert!(matches!(crit.rectifiability_defect(), Err(Error::CriticalPoint { .. })));
}

#[test]
fn radial_spectrum_examples() {
    let rigid = entry("rigid-r2xs2").instance;
    let s = rigid.evaluate(&[0.7, -0.3, 0.2, 0.1]).unwrap().radial_spectrum().unwrap();
    for (x, want) in s.xi.iter().zip([0.0, 0.0, 1.0, 1.0]) {
        assert!((x - want).abs() < 1e-10);
    }
    assert_eq!(s.xi1_formula, 0.0);

    // Schouten value ρ = 1/(2(n−1)) kills the ξ₁ prefactor
    let schouten = catalog::make_rigid(1, FiberSpec::sphere(2).unwrap(), 0.25).unwrap();
    assert_eq!(schouten.lambda, 0.5);
    let p = schouten.evaluate(&[0.8, 0.1, -0.2]).unwrap();
    assert_eq!(p.schouten_factor(), 0.0);
    assert_eq!(p.xi1().unwrap(), 0.0);
    assert!(p.radial_spectrum().unwrap().xi1_rayleigh.abs() < 1e-12);

    let a1 = entry("agila1").instance;
    let s = a1.evaluate(&[0.0, 0.4, 0.1]).unwrap().radial_spectrum().unwrap();
    assert!(s.fiber_spread() < 1e-7);
    assert!(s.eigenvector_residual < 1e-8);
    let g = a1.evaluate(&[0.0, 0.4, 0.1]).unwrap().bundle.g;
    let gram = s.frame.dot(&g).dot(&s.frame.t());
    assert!(max_abs(&(&gram - &Array2::<f64>::eye(3))) < 1e-10);

    let broken = catalog::perturb_potential(&a1, 0.01);
    let err = broken.evaluate(&[0.5, 0.4, -0.3]).unwrap().radial_spectrum().unwrap_err();
    assert!(matches!(err, Error::PreconditionUnmet { .. }));
}

fn spectrum(xi: Vec<f64>) -> RadialSpectrum {
    RadialSpectrum {
        xi,
        xi1_formula: 0.0,
        xi1_rayleigh: 0.0,
        gradf_norm: 1.0,
        frame: Array2::eye(3),
        eigenvector_residual: 0.0,
    }
}

#[test]
fn mu_examples() {
    assert_eq!(mu_eigen_form(&spectrum(vec![0.0, 1.0, 1.0])), 0.0);
    assert_eq!(mu_eigen_form(&spectrum(vec![0.3, 1.0, 2.0])), -1.0);

    let schouten = catalog::make_rigid(1, FiberSpec::sphere(2).unwrap(), 0.25).unwrap();
    let p = schouten.evaluate(&[0.8, 0.1, -0.2]).unwrap();
    let r = p.bundle.scalar;
    let reduced = r * r - 2.0 * p.bundle.ricci_norm_sq();
    assert!((p.mu().unwrap() - reduced).abs() < 1e-12);

    let rigid = entry("rigid-r2xs2").instance;
    let p = rigid.evaluate(&[0.7, -0.3, 0.2, 0.1]).unwrap();
    let mu = p.mu().unwrap();
    assert!((mu + 2.0).abs() < 1e-10);
    assert!((mu - p.radial_spectrum().unwrap().mu_eigen_form()).abs() < 1e-10);
}

#[test]
fn bach_radial_examples() {
    let a1 = entry("agila1");
    for p in a1.sample(20, 2) {
        let sp = a1.instance.evaluate(&p).unwrap();
        if sp.gradf_norm() > 1e-6 {
            assert!(max_abs(&sp.bach_radial_residual().unwrap()) < 1e-7);
        }
    }
    // B ≠ 0 here, yet ∇f is still a Bach eigenvector with eigenvalue μ/((n−1)(n−2)²)
    let rigid = entry("rigid-r2xs2").instance;
    let p = rigid.evaluate(&[0.7, -0.3, 0.2, 0.1]).unwrap();
    assert!(max_abs(&p.bach_radial_residual().unwrap()) < 1e-9);
    let g = p.bundle.g.clone();
    assert!((p.bundle.bach[(0, 0)] / g[(0, 0)] + 1.0 / 6.0).abs() < 1e-10);
    assert!((p.bundle.bach[(2, 2)] / g[(2, 2)] - 1.0 / 6.0).abs() < 1e-10);
}

#[test]
fn bach_formula_oracle_chain() {
    for name in ["agila1", "agila2"] {
        let e = entry(name);
        for p in e.sample(20, 13) {
            let sp = e.instance.evaluate(&p).unwrap();
            let b = &sp.bundle.bach;
            let first = sp.bach_first_formula().unwrap();
            assert!(max_abs(&(&first - b)) < 1e-6, "{name} first formula");
            if sp.gradf_norm() > 1e-6 {
                let second = sp.bach_second_formula().unwrap();
                assert!(max_abs(&(&second - b)) < 1e-6, "{name} second formula");
                assert!(max_abs(&(&second - &first)) < 1e-6);
            }
        }
    }
}

#[test]
fn cotton_formula_examples() {
    let a1 = entry("agila1");
    for p in a1.sample(20, 6) {
        let r = a1.instance.evaluate(&p).unwrap().cotton_soliton_residual().unwrap();
        assert!(max_abs(&r) < 1e-7);
    }
    let rigid = entry("rigid-r2xs2");
    for p in rigid.sample(10, 6) {
        let r = rigid.instance.evaluate(&p).unwrap().cotton_soliton_residual().unwrap();
        assert!(max_abs(&r) < 1e-8);
    }
}

#[test]
fn hess_r_identity_examples() {
    let rigid = entry("rigid-r2xs2").instance;
    let r = rigid.evaluate(&[0.7, -0.3, 0.2, 0.1]).unwrap().hess_r_identity_residual().unwrap();
    assert!(max_abs(&r.hess) < 1e-12 && r.trace.abs() < 1e-12);
    for name in ["agila1", "agila2"] {
        let e = entry(name);
        for p in e.sample(20, 17) {
            let sp = e.instance.evaluate(&p).unwrap();
            if sp.gradf_norm() > 1e-6 {
                let r = sp.hess_r_identity_residual().unwrap();
                assert!(max_abs(&r.hess) < 1e-6 && r.trace.abs() < 1e-6, "{name}");
            }
        }
    }
}

#[test]
fn lcf_examples() {
    for name in ["agila1", "rigid-r2xs2"] {
        let e = entry(name);
        for p in e.sample(10, 19) {
            let r = e.instance.evaluate(&p).unwrap().lcf_radial_residuals().unwrap();
            assert!(max_abs(&r.divrm) < 1e-7 && max_abs(&r.riem) < 1e-7, "{name}");
        }
    }
    let g = catalog::make_gaussian(3, 1.0, &[1.0, 0.0, 0.0], 0.1).unwrap();
    let r = g.evaluate(&[0.1, 0.2, 0.3]).unwrap().lcf_radial_residuals().unwrap();
    assert_eq!(max_abs(&r.divrm), 0.0);

    let lumpy = ChartMetric::diagonal("lumpy", 3, |x| {
        let n = x.len();
        Ok(vec![Jet::constant(n, 1.0), (&x[0] * &x[2]).exp()?, &(&x[1] * &x[1]) + 1.0])
    })
    .unwrap()
    .with_potential(Arc::new(|x: &[Jet]| Ok(x[0].clone())));
    let inst = SolitonInstance::new(lumpy, 0.0, 0.0).unwrap();
    let err = inst.evaluate(&[0.3, 0.5, 0.7]).unwrap().lcf_radial_residuals().unwrap_err();
    assert!(matches!(err, Error::PreconditionUnmet { check: "vanishing Cotton tensor", .. }));
}

#[test]
fn fiber_ricci_examples() {
    for name in ["agila1", "agila2", "cyl-sphere", "cyl-hyperbolic"] {
        let e = entry(name);
        for p in e.sample(20, 23) {
            let r = e.instance.evaluate(&p).unwrap().fiber_ricci_residual().unwrap();
            assert!(r.abs() < 1e-8, "{name}: {r}");
        }
    }
    let g = catalog::make_gaussian(3, 1.0, &[0.0; 3], 0.0).unwrap();
    assert!(matches!(
        g.evaluate(&[0.0; 3]).unwrap().fiber_ricci_residual(),
        Err(Error::NotWarped)
    ));
}

#[test]
fn level_sets_carry_constant_eigenvalues() {
    for name in ["agila1", "agila2"] {
        let inst = entry(name).instance;
        for t in [-1.3, 0.7, 2.1] {
            let mut xi1 = Vec::new();
            let mut xi2 = Vec::new();
            for k in 0..10 {
                let a = k as f64 * 0.6;
                let p = [t, 0.7 * a.cos() * (k as f64 / 10.0), 0.7 * a.sin() * (k as f64 / 10.0)];
                let s = inst.evaluate(&p).unwrap().radial_spectrum().unwrap();
                xi1.push(s.xi[0]);
                xi2.push(s.xi[1]);
            }
            for v in [&xi1, &xi2] {
                let spread = v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
                assert!(spread < 1e-7, "{name} at t={t}: {spread}");
            }
        }
    }
}

#[test]
fn negative_mu_implies_bach_does_not_vanish_and_zero_mu_implies_it_does() {
    for e in catalog::all_entries().unwrap() {
        let mut all_nonneg = true;
        let mut bach_max: f64 = 0.0;
        for p in e.sample(20, 31) {
            let sp = e.instance.evaluate(&p).unwrap();
            bach_max = bach_max.max(max_abs(&sp.bundle.bach));
            if sp.gradf_norm() <= e.instance.regular_threshold {
                continue;
            }
            let mu = sp.mu().unwrap();
            assert!(mu <= 1e-8, "{}: mu = {mu}", e.name());
            let s = sp.radial_spectrum().unwrap();
            assert!((mu - s.mu_eigen_form()).abs() < 1e-8);
            let gf = &sp.potential().grad_vec;
            if gf.dot(&sp.bundle.bach.dot(gf)) < -1e-9 {
                all_nonneg = false;
            }
        }
        if all_nonneg {
            assert!(bach_max < 1e-6, "{}: |B| = {bach_max}", e.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_is_a_soliton_for_every_parameter(
        n in 3usize..=5,
        lambda in -2.0..2.0f64,
        rho in -1.0..1.0f64,
        v in prop::collection::vec(-2.0..2.0f64, 5),
        x in prop::collection::vec(-3.0..3.0f64, 5),
    ) {
        let inst = catalog::make_gaussian(n, lambda, &v[..n], rho).unwrap();
        let p = inst.evaluate(&x[..n]).unwrap();
        prop_assert_eq!(p.soliton_residual_max(), 0.0);
        prop_assert!(p.identity_residuals().unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn mu_is_nonpositive_on_warped_solitons(which in 1u8..=2, t in -3.0..3.0f64, u in -0.5..0.5f64, w in -0.5..0.5f64) {
        let inst = catalog::make_agila(which).unwrap();
        let p = inst.evaluate(&[t, u, w]).unwrap();
        prop_assume!(p.gradf_norm() > 1e-6);
        prop_assert!(p.mu().unwrap() <= 1e-8);
        prop_assert!(max_abs(&p.bach_radial_residual().unwrap()) < 1e-6);
    }

    #[test]
    fn rigid_product_keeps_mu_at_minus_two(
        x in -3.0..3.0f64, y in -3.0..3.0f64, u in -0.5..0.5f64, w in -0.5..0.5f64,
    ) {
        prop_assume!(x.hypot(y) > 1e-3);
        let inst = entry("rigid-r2xs2").instance;
        let p = inst.evaluate(&[x, y, u, w]).unwrap();
        prop_assert!((p.mu().unwrap() + 2.0).abs() < 1e-9);
        prop_assert!(max_abs(&p.bundle.bach) > 0.1);
    }

    #[test]
    fn eigen_form_is_nonpositive(xi in prop::collection::vec(-5.0..5.0f64, 2..6)) {
        let mut s = spectrum(xi);
        s.frame = Array2::eye(s.xi.len());
        prop_assert!(mu_eigen_form(&s) <= 1e-9);
    }
}
