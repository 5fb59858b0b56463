//! Truncated multivariate Taylor arithmetic ("jets") of order at most four.
//!
//! A [`Jet`] in `n` variables stores the Taylor-normalized coefficients
//! `∂^α u(x0) / α!` for every multi-index `|α| ≤ 4`, densely, in graded
//! lexicographic order. Multiplication is then a plain truncated convolution.
//!
//! Each jet also carries a *degree* `d ≤ 4`: coefficients above order `d` are
//! unknown (and stored as zero). Taking a partial derivative lowers the degree
//! by one, and binary operations keep the smaller degree. This lets curvature
//! code treat Christoffel symbols, Riemann and Cotton tensors as jet-valued
//! fields and differentiate them again without any symbolic expansion.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Highest derivative order carried by a jet.
pub const MAX_ORDER: usize = 4;
/// Largest supported number of variables.
pub const MAX_DIM: usize = 6;

const NONE: u16 = u16::MAX;

/// Number of dense coefficients of a jet in `n` variables: `C(n+4, 4)`.
pub fn coefficient_count(n: usize) -> usize {
    (n + 1) * (n + 2) * (n + 3) * (n + 4) / 24
}

/// Exponent vector of a partial derivative, `∂^α = ∂_0^{α_0} ⋯ ∂_{n-1}^{α_{n-1}}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    n: u8,
    exps: [u8; MAX_DIM],
}

impl MultiIndex {
    pub fn new(exponents: &[u8]) -> Result<Self> {
        let n = exponents.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidMultiIndex(format!(
                "length {n} outside 1..={MAX_DIM}"
            )));
        }
        let order: usize = exponents.iter().map(|&e| e as usize).sum();
        if order > MAX_ORDER {
            return Err(Error::InvalidMultiIndex(format!(
                "order {order} exceeds {MAX_ORDER}"
            )));
        }
        let mut exps = [0u8; MAX_DIM];
        exps[..n].copy_from_slice(exponents);
        Ok(Self { n: n as u8, exps })
    }

    /// `α = 0` in `n` variables.
    pub fn zero(n: usize) -> Result<Self> {
        Self::new(&vec![0; n])
    }

    /// Sum of two single-variable derivatives, e.g. `(i, j) -> e_i + e_j`.
    pub fn from_slots(n: usize, slots: &[usize]) -> Result<Self> {
        let mut e = vec![0u8; n];
        for &s in slots {
            if s >= n {
                return Err(Error::IndexOutOfRange { index: s, dim: n });
            }
            e[s] += 1;
        }
        Self::new(&e)
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps[..self.n as usize]
    }

    pub fn order(&self) -> usize {
        self.exponents().iter().map(|&e| e as usize).sum()
    }

    /// `α!` as a float.
    pub fn factorial(&self) -> f64 {
        self.exponents()
            .iter()
            .map(|&e| (1..=e as u32).product::<u32>() as f64)
            .product()
    }

    /// Position in the canonical (graded lexicographic) enumeration.
    pub fn position(&self) -> usize {
        let t = tables(self.dim());
        t.lookup[key(&self.exps)] as usize
    }

    /// Canonical enumeration of all multi-indices of order ≤ 4 in `n` variables.
    pub fn enumerate(n: usize) -> Result<Vec<MultiIndex>> {
        check_dim(n)?;
        Ok(tables(n)
            .exps
            .iter()
            .map(|e| MultiIndex { n: n as u8, exps: *e })
            .collect())
    }
}

fn key(exps: &[u8; MAX_DIM]) -> usize {
    exps.iter().rev().fold(0usize, |acc, &e| acc * 5 + e as usize)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

struct Tables {
    exps: Vec<[u8; MAX_DIM]>,
    factorial: Vec<f64>,
    /// `order_end[k]` = number of coefficients of order ≤ k.
    order_end: [usize; MAX_ORDER + 1],
    /// `raise[p][i]` = position of `α_p + e_i`, or `NONE` past order 4.
    raise: Vec<[u16; MAX_DIM]>,
    lookup: Vec<u16>,
    /// `(a, b, c)` with `α_a + α_b = α_c`, sorted by `|α_c|`.
    products: Vec<(u16, u16, u16)>,
    product_end: [usize; MAX_ORDER + 1],
}

fn build_tables(n: usize) -> Tables {
    fn fill(n: usize, slot: usize, left: u8, cur: &mut [u8; MAX_DIM], out: &mut Vec<[u8; MAX_DIM]>) {
        if slot == n - 1 {
            cur[slot] = left;
            out.push(*cur);
            return;
        }
        for e in (0..=left).rev() {
            cur[slot] = e;
            fill(n, slot + 1, left - e, cur, out);
        }
        cur[slot] = 0;
    }

    let mut exps = Vec::with_capacity(coefficient_count(n));
    let mut order_end = [0; MAX_ORDER + 1];
    for d in 0..=MAX_ORDER {
        let mut cur = [0u8; MAX_DIM];
        fill(n, 0, d as u8, &mut cur, &mut exps);
        order_end[d] = exps.len();
    }
    let order = |e: &[u8; MAX_DIM]| e.iter().map(|&x| x as usize).sum::<usize>();

    let mut lookup = vec![NONE; 5usize.pow(n as u32)];
    for (p, e) in exps.iter().enumerate() {
        lookup[key(e)] = p as u16;
    }
    let factorial = exps
        .iter()
        .map(|e| {
            e.iter()
                .map(|&x| (1..=x as u32).product::<u32>() as f64)
                .product()
        })
        .collect();
    let raise = exps
        .iter()
        .map(|e| {
            let mut r = [NONE; MAX_DIM];
            if order(e) < MAX_ORDER {
                for (i, slot) in r.iter_mut().enumerate().take(n) {
                    let mut up = *e;
                    up[i] += 1;
                    *slot = lookup[key(&up)];
                }
            }
            r
        })
        .collect();

    let mut products = Vec::new();
    for (a, ea) in exps.iter().enumerate() {
        for (b, eb) in exps.iter().enumerate() {
            if order(ea) + order(eb) > MAX_ORDER {
                continue;
            }
            let mut s = [0u8; MAX_DIM];
            for i in 0..MAX_DIM {
                s[i] = ea[i] + eb[i];
            }
            products.push((a as u16, b as u16, lookup[key(&s)]));
        }
    }
    products.sort_by_key(|&(_, _, c)| order(&exps[c as usize]));
    let mut product_end = [0; MAX_ORDER + 1];
    for (d, end) in product_end.iter_mut().enumerate() {
        *end = products
            .iter()
            .take_while(|&&(_, _, c)| order(&exps[c as usize]) <= d)
            .count();
    }

    Tables {
        exps,
        factorial,
        order_end,
        raise,
        lookup,
        products,
        product_end,
    }
}

fn tables(n: usize) -> &'static Tables {
    static TABLES: [OnceLock<Tables>; MAX_DIM + 1] = [const { OnceLock::new() }; MAX_DIM + 1];
    assert!(
        (1..=MAX_DIM).contains(&n),
        "jet dimension {n} outside 1..={MAX_DIM}"
    );
    TABLES[n].get_or_init(|| build_tables(n))
}

/// Smooth univariate functions that can be composed with a jet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Exp,
    Ln,
    Sqrt,
    Pow(f64),
    Recip,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Primitive {
    pub fn name(&self) -> &'static str {
        match self {
            Primitive::Exp => "exp",
            Primitive::Ln => "log",
            Primitive::Sqrt => "sqrt",
            Primitive::Pow(_) => "pow",
            Primitive::Recip => "recip",
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::Sinh => "sinh",
            Primitive::Cosh => "cosh",
        }
    }

    /// `f(x), f'(x), …, f''''(x)`.
    pub fn derivatives(&self, x: f64) -> Result<[f64; MAX_ORDER + 1]> {
        let domain = || Error::Domain {
            func: self.name(),
            value: x,
        };
        if !x.is_finite() {
            return Err(domain());
        }
        let d = match *self {
            Primitive::Exp => [x.exp(); 5],
            Primitive::Ln => {
                if x <= 0.0 {
                    return Err(domain());
                }
                let r = 1.0 / x;
                [x.ln(), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]
            }
            Primitive::Sqrt => {
                if x <= 0.0 {
                    return Err(domain());
                }
                return Primitive::Pow(0.5).derivatives(x);
            }
            Primitive::Pow(p) => {
                let integral = p.fract() == 0.0;
                if x < 0.0 && !integral || x == 0.0 && (!integral || p < 0.0) {
                    return Err(domain());
                }
                let mut out = [0.0; 5];
                let mut coef = 1.0;
                for (k, slot) in out.iter_mut().enumerate() {
                    let e = p - k as f64;
                    *slot = if coef == 0.0 {
                        0.0
                    } else if integral {
                        coef * x.powi(e as i32)
                    } else {
                        coef * x.powf(e)
                    };
                    coef *= e;
                }
                out
            }
            Primitive::Recip => {
                if x == 0.0 {
                    return Err(domain());
                }
                let r = 1.0 / x;
                [r, -r * r, 2.0 * r.powi(3), -6.0 * r.powi(4), 24.0 * r.powi(5)]
            }
            Primitive::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c, s]
            }
            Primitive::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s, c]
            }
            Primitive::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c, s]
            }
            Primitive::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s, c]
            }
        };
        if d.iter().any(|v| !v.is_finite()) {
            return Err(domain());
        }
        Ok(d)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.derivatives(x)?[0])
    }
}

/// Taylor expansion of a scalar quantity at a base point, truncated at order four.
#[derive(Clone, PartialEq)]
pub struct Jet {
    n: u8,
    degree: u8,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = tables(self.dim()).order_end[self.degree()];
        f.debug_struct("Jet")
            .field("n", &self.n)
            .field("degree", &self.degree)
            .field("coeffs", &&self.c[..end])
            .finish()
    }
}

impl Jet {
    pub fn constant(n: usize, value: f64) -> Jet {
        let mut c = vec![0.0; coefficient_count(n)];
        tables(n);
        c[0] = value;
        Jet {
            n: n as u8,
            degree: MAX_ORDER as u8,
            c,
        }
    }

    pub fn zero(n: usize) -> Jet {
        Jet::constant(n, 0.0)
    }

    /// Jet of the coordinate function `x_i` at base value `x0`.
    pub fn variable(i: usize, x0: f64, n: usize) -> Result<Jet> {
        check_dim(n)?;
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        let mut j = Jet::constant(n, x0);
        j.c[1 + i] = 1.0;
        Ok(j)
    }

    /// The coordinate jets of all `n` variables at `point`.
    pub fn variables(point: &[f64]) -> Result<Vec<Jet>> {
        let n = point.len();
        (0..n).map(|i| Jet::variable(i, point[i], n)).collect()
    }

    /// Build a full-degree jet from dense Taylor-normalized coefficients.
    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Jet> {
        check_dim(n)?;
        if coeffs.len() != coefficient_count(n) {
            return Err(Error::DimensionMismatch {
                left: coeffs.len(),
                right: coefficient_count(n),
            });
        }
        Ok(Jet {
            n: n as u8,
            degree: MAX_ORDER as u8,
            c: coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Drops everything above order `degree`.
    pub fn truncate(mut self, degree: usize) -> Jet {
        if degree < self.degree() {
            let end = tables(self.dim()).order_end[degree];
            self.c[end..].iter_mut().for_each(|v| *v = 0.0);
            self.degree = degree as u8;
        }
        self
    }

    fn check_index(&self, alpha: &MultiIndex) -> Result<usize> {
        if alpha.dim() != self.dim() {
            return Err(Error::InvalidMultiIndex(format!(
                "{}-variable index for a {}-variable jet",
                alpha.dim(),
                self.dim()
            )));
        }
        if alpha.order() > self.degree() {
            return Err(Error::DegreeExhausted {
                degree: self.degree(),
                requested: alpha.order(),
            });
        }
        Ok(alpha.position())
    }

    /// Taylor-normalized coefficient `∂^α u / α!`.
    pub fn coeff(&self, alpha: &MultiIndex) -> Result<f64> {
        Ok(self.c[self.check_index(alpha)?])
    }

    /// Partial derivative `∂^α u` at the base point.
    pub fn extract(&self, alpha: &MultiIndex) -> Result<f64> {
        let p = self.check_index(alpha)?;
        Ok(self.c[p] * tables(self.dim()).factorial[p])
    }

    /// First partial `∂_i u` at the base point.
    pub fn d1(&self, i: usize) -> f64 {
        self.c[1 + i]
    }

    /// Jet of `∂_i u`; its degree is one lower.
    pub fn partial(&self, i: usize) -> Result<Jet> {
        let n = self.dim();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        if self.degree == 0 {
            return Err(Error::DegreeExhausted {
                degree: 0,
                requested: 1,
            });
        }
        let t = tables(n);
        let degree = self.degree() - 1;
        let mut c = vec![0.0; self.c.len()];
        for (p, out) in c.iter_mut().enumerate().take(t.order_end[degree]) {
            let up = t.raise[p][i] as usize;
            *out = (t.exps[p][i] as f64 + 1.0) * self.c[up];
        }
        Ok(Jet {
            n: self.n,
            degree: degree as u8,
            c,
        })
    }

    fn same_dim(&self, other: &Jet) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// Truncated Cauchy product.
    pub fn mul_checked(&self, other: &Jet) -> Result<Jet> {
        self.same_dim(other)?;
        let degree = self.degree.min(other.degree);
        let mut out = Jet {
            n: self.n,
            degree,
            c: vec![0.0; self.c.len()],
        };
        out.accumulate_product(1.0, self, other);
        Ok(out)
    }

    /// `self += scale · a · b`, truncated at the smallest degree involved.
    pub fn accumulate_product(&mut self, scale: f64, a: &Jet, b: &Jet) {
        assert!(
            self.n == a.n && a.n == b.n,
            "jet dimension mismatch in product"
        );
        let degree = self.degree.min(a.degree).min(b.degree) as usize;
        let t = tables(self.dim());
        for &(i, j, k) in &t.products[..t.product_end[degree]] {
            self.c[k as usize] += scale * a.c[i as usize] * b.c[j as usize];
        }
        self.truncate_in_place(degree);
    }

    /// `self += scale · a`.
    pub fn accumulate(&mut self, scale: f64, a: &Jet) {
        assert_eq!(self.n, a.n, "jet dimension mismatch in sum");
        let degree = self.degree.min(a.degree) as usize;
        let end = tables(self.dim()).order_end[degree];
        for (s, v) in self.c[..end].iter_mut().zip(&a.c[..end]) {
            *s += scale * v;
        }
        self.truncate_in_place(degree);
    }

    fn truncate_in_place(&mut self, degree: usize) {
        if degree < self.degree() {
            let end = tables(self.dim()).order_end[degree];
            self.c[end..].iter_mut().for_each(|v| *v = 0.0);
            self.degree = degree as u8;
        }
    }

    /// `f ∘ u` via the truncated Taylor series of `f` around `u(x0)`.
    pub fn compose(&self, f: Primitive) -> Result<Jet> {
        let d = f.derivatives(self.value())?;
        let mut delta = self.clone();
        delta.c[0] = 0.0;
        let mut out = Jet::constant(self.dim(), d[0]).truncate(self.degree());
        let mut power = delta.clone();
        let mut factorial = 1.0;
        for (k, dk) in d.iter().enumerate().skip(1).take(self.degree()) {
            factorial *= k as f64;
            out.accumulate(dk / factorial, &power);
            if k < self.degree() {
                power = &power * &delta;
            }
        }
        Ok(out)
    }

    pub fn exp(&self) -> Result<Jet> {
        self.compose(Primitive::Exp)
    }

    pub fn ln(&self) -> Result<Jet> {
        self.compose(Primitive::Ln)
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.compose(Primitive::Sqrt)
    }

    pub fn powf(&self, p: f64) -> Result<Jet> {
        self.compose(Primitive::Pow(p))
    }

    pub fn recip(&self) -> Result<Jet> {
        self.compose(Primitive::Recip)
    }

    pub fn sin(&self) -> Result<Jet> {
        self.compose(Primitive::Sin)
    }

    pub fn cos(&self) -> Result<Jet> {
        self.compose(Primitive::Cos)
    }

    pub fn sinh(&self) -> Result<Jet> {
        self.compose(Primitive::Sinh)
    }

    pub fn cosh(&self) -> Result<Jet> {
        self.compose(Primitive::Cosh)
    }

    /// Non-negative integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Jet {
        let mut out = Jet::constant(self.dim(), 1.0).truncate(self.degree());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.same_dim(other)?;
        Ok(self * &other.recip()?)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let mut out = self.clone();
        out.accumulate(1.0, rhs);
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let mut out = self.clone();
        out.accumulate(-1.0, rhs);
        out
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_checked(rhs).expect("jet dimension mismatch in product")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.c.iter_mut().for_each(|v| *v *= rhs);
        out
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.c[0] += rhs;
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self *= rhs;
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.accumulate(1.0, rhs);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.accumulate(-1.0, rhs);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        self.c.iter_mut().for_each(|v| *v *= rhs);
    }
}
