//! Randomized algebraic checks of the jet engine for the acceptance suite.

use geoflow_core::jets::{coefficient_count, Jet, MultiIndex, Primitive};
use geoflow_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Per-coefficient bound for ring laws, Leibniz and division.
pub const COEFF_TOL: f64 = 1e-12;
/// Relative bound against nested finite differences.
pub const FD_REL_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-2;

#[derive(Clone, Debug, Serialize)]
pub struct JetCheckSummary {
    pub cases: usize,
    pub seed: u64,
    pub ring_max: f64,
    pub leibniz_max: f64,
    /// Round-trip error divided by the product of coefficient scales.
    pub division_max_scaled: f64,
    pub chain_rule_max_relative: f64,
}

impl JetCheckSummary {
    pub fn passed(&self) -> bool {
        self.ring_max < COEFF_TOL
            && self.leibniz_max < COEFF_TOL
            && self.division_max_scaled < COEFF_TOL
            && self.chain_rule_max_relative < FD_REL_TOL
    }
}

fn random_jet(rng: &mut ChaCha8Rng, n: usize) -> Jet {
    let c = (0..coefficient_count(n)).map(|_| rng.gen_range(-2.0..2.0)).collect();
    Jet::from_coeffs(n, c).expect("coefficient count matches")
}

fn max_diff(a: &Jet, b: &Jet) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn coeff_scale(j: &Jet) -> f64 {
    j.coeffs().iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sub_indices(alpha: &[u8]) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |b| {
                    let mut p = prefix.clone();
                    p.push(b);
                    p
                })
            })
            .collect();
    }
    out
}

fn leibniz_defect(a: &Jet, b: &Jet) -> Result<f64> {
    let p = a * b;
    let mut worst = 0.0f64;
    for alpha in MultiIndex::enumerate(a.dim())? {
        let mut expect = 0.0;
        for beta in sub_indices(alpha.exponents()) {
            let gamma: Vec<u8> = alpha.exponents().iter().zip(&beta).map(|(x, y)| x - y).collect();
            let weight: f64 = alpha.exponents().iter().zip(&beta).map(|(&x, &y)| binomial(x, y)).product();
            expect += weight * a.extract(&MultiIndex::new(&beta)?)? * b.extract(&MultiIndex::new(&gamma)?)?;
        }
        let got = p.extract(&alpha)?;
        worst = worst.max((got - expect).abs() / expect.abs().max(1.0));
    }
    Ok(worst)
}

/// The jet read back as the polynomial `Σ c_α dx^α`.
fn as_polynomial(j: &Jet, alphas: &[MultiIndex], dx: &[f64]) -> f64 {
    alphas
        .iter()
        .zip(j.coeffs())
        .map(|(alpha, c)| {
            let mono: f64 = alpha.exponents().iter().zip(dx).map(|(&e, &d)| d.powi(e as i32)).product();
            c * mono
        })
        .sum()
}

fn fd_first(f: &dyn Fn(&[f64]) -> f64, x: &[f64], axis: usize, h: f64) -> f64 {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[axis] += s;
        f(&y)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

fn fd_partial(f: &dyn Fn(&[f64]) -> f64, x: &[f64], slots: &[usize]) -> f64 {
    match slots.split_first() {
        None => f(x),
        Some((&axis, rest)) => {
            let inner = |y: &[f64]| fd_partial(f, y, rest);
            let coarse = fd_first(&inner, x, axis, 2.0 * FD_STEP);
            let fine = fd_first(&inner, x, axis, FD_STEP);
            (16.0 * fine - coarse) / 15.0
        }
    }
}

fn random_primitive(rng: &mut ChaCha8Rng) -> Primitive {
    match rng.gen_range(0..9) {
        0 => Primitive::Exp,
        1 => Primitive::Ln,
        2 => Primitive::Sqrt,
        3 => Primitive::Recip,
        4 => Primitive::Sin,
        5 => Primitive::Cos,
        6 => Primitive::Sinh,
        7 => Primitive::Cosh,
        _ => Primitive::Pow(rng.gen_range(-2.5..2.5)),
    }
}

fn chain_rule_defect(rng: &mut ChaCha8Rng) -> Result<f64> {
    let n = rng.gen_range(1..=2);
    let mut c = vec![rng.gen_range(0.5..2.0)];
    c.extend((1..coefficient_count(n)).map(|_| rng.gen_range(-0.5..0.5)));
    let inner = Jet::from_coeffs(n, c)?;
    let prim = random_primitive(rng);
    let composed = inner.compose(prim)?;
    let alphas = MultiIndex::enumerate(n)?;
    let f = |dx: &[f64]| prim.eval(as_polynomial(&inner, &alphas, dx)).unwrap_or(f64::NAN);
    let x0 = vec![0.0; n];
    let mut worst = 0.0f64;
    for alpha in &alphas {
        let slots: Vec<usize> = alpha
            .exponents()
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize))
            .collect();
        let exact = composed.extract(alpha)?;
        let fd = fd_partial(&f, &x0, &slots);
        let rel = (exact - fd).abs() / exact.abs().max(1.0);
        worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
    }
    Ok(worst)
}

/// Runs `cases` random instances of every property.
pub fn run(cases: usize, seed: u64) -> Result<JetCheckSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = JetCheckSummary {
        cases,
        seed,
        ring_max: 0.0,
        leibniz_max: 0.0,
        division_max_scaled: 0.0,
        chain_rule_max_relative: 0.0,
    };
    for _ in 0..cases {
        let n = rng.gen_range(1..=4);
        let (a, b, c) = (random_jet(&mut rng, n), random_jet(&mut rng, n), random_jet(&mut rng, n));
        let ring = [
            max_diff(&(&a * &b), &(&b * &a)),
            max_diff(&(&(&a * &b) * &c), &(&a * &(&b * &c))),
            max_diff(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))),
            max_diff(&(&a + &b), &(&b + &a)),
            max_diff(&(&a * &Jet::constant(n, 1.0)), &a),
        ];
        s.ring_max = ring.into_iter().fold(s.ring_max, f64::max);
        s.leibniz_max = s.leibniz_max.max(leibniz_defect(&a, &b)?);

        let mut bc = b.coeffs().to_vec();
        let mag = rng.gen_range(0.1..2.0);
        bc[0] = if rng.gen_bool(0.5) { mag } else { -mag };
        let divisor = Jet::from_coeffs(n, bc)?;
        let q = a.div(&divisor)?;
        let back = &q * &divisor;
        s.division_max_scaled = s
            .division_max_scaled
            .max(max_diff(&back, &a) / (coeff_scale(&q) * coeff_scale(&divisor)));

        s.chain_rule_max_relative = s.chain_rule_max_relative.max(chain_rule_defect(&mut rng)?);
    }
    Ok(s)
}
