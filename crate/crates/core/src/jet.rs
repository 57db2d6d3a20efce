//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients of a scalar function of `m`
//! variables up to total degree 3. Coefficients are kept in a graded
//! monomial order, so that the coefficient vector of a jet of order `k` is a
//! prefix of the vector of the same function at any higher order. This makes
//! truncation free and lets jets of different orders be mixed: the result of a
//! binary operation has the smaller of the two orders.
//!
//! Constants (built with [`Jet::constant`] or [`Scalar::cst`]) carry no
//! variables and broadcast against any jet.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{GeomError, Result};

pub const MAX_ORDER: usize = 3;
pub const MAX_VARS: usize = 8;

type Exponent = [u8; MAX_VARS];

/// Monomial bookkeeping for a fixed number of variables.
struct Layout {
    monos: Vec<Exponent>,
    /// `len[k]` = number of monomials of degree ≤ k.
    len: [usize; MAX_ORDER + 1],
    /// Product table `(i, j, k)`: monomial i times monomial j is monomial k,
    /// sorted by the degree of k.
    mul: Vec<(u16, u16, u16)>,
    /// `mul_len[k]` = number of product entries whose result has degree ≤ k.
    mul_len: [usize; MAX_ORDER + 1],
    /// Per variable: `(src, dst, factor)` for d/dx_v, sorted by degree of src.
    partial: Vec<Vec<(u16, u16, f64)>>,
    /// Per variable and order: number of partial entries with deg(src) ≤ order.
    partial_len: Vec<[usize; MAX_ORDER + 1]>,
}

fn degree(e: &Exponent) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

impl Layout {
    fn build(nvars: usize) -> Self {
        let mut monos: Vec<Exponent> = Vec::new();
        let mut len = [0usize; MAX_ORDER + 1];
        for deg in 0..=MAX_ORDER {
            let mut block = Vec::new();
            enumerate(nvars, deg, 0, &mut [0u8; MAX_VARS], &mut block);
            // lexicographically descending so x0 comes first
            block.sort_by(|a, b| b.cmp(a));
            monos.extend(block);
            len[deg] = monos.len();
        }
        let index = |e: &Exponent| monos.iter().position(|m| m == e);

        let mut mul = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                if degree(a) + degree(b) > MAX_ORDER {
                    continue;
                }
                let mut c = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    c[v] = a[v] + b[v];
                }
                let k = index(&c).expect("product monomial present");
                mul.push((i as u16, j as u16, k as u16));
            }
        }
        mul.sort_by_key(|&(_, _, k)| degree(&monos[k as usize]));
        let mut mul_len = [0usize; MAX_ORDER + 1];
        for (deg, slot) in mul_len.iter_mut().enumerate() {
            *slot = mul
                .iter()
                .take_while(|&&(_, _, k)| degree(&monos[k as usize]) <= deg)
                .count();
        }

        let mut partial = Vec::with_capacity(nvars);
        let mut partial_len = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut entries = Vec::new();
            for (src, e) in monos.iter().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut d = *e;
                d[v] -= 1;
                let dst = index(&d).expect("lowered monomial present");
                entries.push((src as u16, dst as u16, e[v] as f64));
            }
            // monos is graded, so entries are already sorted by deg(src)
            let mut lens = [0usize; MAX_ORDER + 1];
            for (deg, slot) in lens.iter_mut().enumerate() {
                *slot = entries
                    .iter()
                    .take_while(|&&(s, _, _)| degree(&monos[s as usize]) <= deg)
                    .count();
            }
            partial.push(entries);
            partial_len.push(lens);
        }

        Layout {
            monos,
            len,
            mul,
            mul_len,
            partial,
            partial_len,
        }
    }

    fn get(nvars: usize) -> &'static Layout {
        static LAYOUTS: [OnceLock<Layout>; MAX_VARS + 1] = [const { OnceLock::new() }; MAX_VARS + 1];
        LAYOUTS[nvars].get_or_init(|| Layout::build(nvars))
    }
}

fn enumerate(nvars: usize, deg: usize, var: usize, cur: &mut Exponent, out: &mut Vec<Exponent>) {
    if var + 1 >= nvars.max(1) {
        if nvars == 0 {
            if deg == 0 {
                out.push(*cur);
            }
            return;
        }
        cur[var] = deg as u8;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for k in (0..=deg).rev() {
        cur[var] = k as u8;
        enumerate(nvars, deg - k, var + 1, cur, out);
    }
    cur[var] = 0;
}

/// Number of Taylor coefficients of a jet with `nvars` variables and the given order.
pub fn coefficient_count(nvars: usize, order: usize) -> usize {
    Layout::get(nvars).len[order]
}

/// Truncated Taylor expansion of a scalar function, order ≤ 3, in up to
/// [`MAX_VARS`] variables.
#[derive(Clone, PartialEq)]
pub struct Jet {
    order: u8,
    nvars: u8,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("nvars", &self.nvars)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

/// Arithmetic operations accepted by [`jet_arithmetic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Recip,
}

impl Jet {
    /// A constant; broadcasts against jets of any shape.
    pub fn constant(value: f64) -> Self {
        Jet {
            order: MAX_ORDER as u8,
            nvars: 0,
            coeffs: vec![value],
        }
    }

    /// The coordinate function `x_idx` expanded at `value`.
    pub fn variable(value: f64, idx: usize, nvars: usize, order: usize) -> Self {
        assert!(nvars >= 1 && nvars <= MAX_VARS, "jet supports 1..={MAX_VARS} variables");
        assert!(idx < nvars, "variable index out of range");
        assert!(order <= MAX_ORDER, "jet order at most {MAX_ORDER}");
        let n = coefficient_count(nvars, order);
        let mut coeffs = vec![0.0; n];
        coeffs[0] = value;
        if order >= 1 {
            coeffs[1 + idx] = 1.0;
        }
        Jet {
            order: order as u8,
            nvars: nvars as u8,
            coeffs,
        }
    }

    /// Seeds every coordinate of `point` as an independent variable.
    pub fn seed(point: &[f64], order: usize) -> Vec<Jet> {
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(x, i, point.len(), order))
            .collect()
    }

    /// Builds a jet from raw Taylor coefficients in graded order.
    pub fn from_coeffs(nvars: usize, order: usize, coeffs: Vec<f64>) -> Result<Self> {
        if nvars == 0 || nvars > MAX_VARS || order > MAX_ORDER {
            return Err(GeomError::Shape(format!(
                "unsupported jet shape: {nvars} variables, order {order}"
            )));
        }
        let n = coefficient_count(nvars, order);
        if coeffs.len() != n {
            return Err(GeomError::Shape(format!(
                "expected {n} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Jet {
            order: order as u8,
            nvars: nvars as u8,
            coeffs,
        })
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn is_constant(&self) -> bool {
        self.nvars == 0
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Drops all terms above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if self.is_constant() || order >= self.order() {
            return self.clone();
        }
        let n = coefficient_count(self.nvars(), order);
        Jet {
            order: order as u8,
            nvars: self.nvars,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Partial derivative with respect to variable `var`; the order drops by one.
    pub fn partial(&self, var: usize) -> Jet {
        if self.is_constant() {
            return Jet::constant(0.0);
        }
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        assert!(var < self.nvars(), "variable index out of range");
        let layout = Layout::get(self.nvars());
        let order = self.order() - 1;
        let mut coeffs = vec![0.0; layout.len[order]];
        let entries = &layout.partial[var][..layout.partial_len[var][self.order()]];
        for &(src, dst, factor) in entries {
            coeffs[dst as usize] += factor * self.coeffs[src as usize];
        }
        Jet {
            order: order as u8,
            nvars: self.nvars,
            coeffs,
        }
    }

    /// The mixed partial derivative ∂^k f / ∂x_{i1}…∂x_{ik} at the expansion point.
    pub fn derivative(&self, indices: &[usize]) -> f64 {
        if indices.len() > self.order() {
            panic!("derivative of order {} exceeds jet order {}", indices.len(), self.order);
        }
        if self.is_constant() {
            return if indices.is_empty() { self.value() } else { 0.0 };
        }
        let mut e = [0u8; MAX_VARS];
        for &i in indices {
            e[i] += 1;
        }
        let layout = Layout::get(self.nvars());
        let pos = layout
            .monos
            .iter()
            .position(|m| *m == e)
            .expect("monomial present");
        let factorial: f64 = e.iter().map(|&k| (1..=k as u32).product::<u32>() as f64).product();
        factorial * self.coeffs[pos]
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.nvars()).map(|i| self.derivative(&[i])).collect()
    }

    fn shape_with(&self, other: &Jet) -> (usize, usize) {
        match (self.is_constant(), other.is_constant()) {
            (true, true) => (0, MAX_ORDER),
            (true, false) => (other.nvars(), other.order()),
            (false, true) => (self.nvars(), self.order()),
            (false, false) => {
                assert_eq!(
                    self.nvars, other.nvars,
                    "jets with different variable counts cannot be combined"
                );
                (self.nvars(), self.order().min(other.order()))
            }
        }
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let (nvars, order) = self.shape_with(other);
        if nvars == 0 {
            return Jet::constant(f(self.value(), other.value()));
        }
        let n = coefficient_count(nvars, order);
        let coeffs = (0..n)
            .map(|i| {
                let a = if self.is_constant() {
                    if i == 0 { self.value() } else { 0.0 }
                } else {
                    self.coeffs[i]
                };
                let b = if other.is_constant() {
                    if i == 0 { other.value() } else { 0.0 }
                } else {
                    other.coeffs[i]
                };
                f(a, b)
            })
            .collect();
        Jet {
            order: order as u8,
            nvars: nvars as u8,
            coeffs,
        }
    }

    fn scale(&self, k: f64) -> Jet {
        Jet {
            order: self.order,
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        if self.is_constant() {
            return other.scale(self.value());
        }
        if other.is_constant() {
            return self.scale(other.value());
        }
        let (nvars, order) = self.shape_with(other);
        let layout = Layout::get(nvars);
        let mut coeffs = vec![0.0; layout.len[order]];
        for &(i, j, k) in &layout.mul[..layout.mul_len[order]] {
            coeffs[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Jet {
            order: order as u8,
            nvars: nvars as u8,
            coeffs,
        }
    }

    /// Composes a univariate function with this jet, given the function's
    /// derivatives `[g, g', g'', g''']` at the jet's value.
    pub fn compose(&self, derivs: [f64; MAX_ORDER + 1]) -> Jet {
        if self.is_constant() || self.order == 0 {
            let mut out = self.clone();
            out.coeffs[0] = derivs[0];
            return out;
        }
        let mut nil = self.clone();
        nil.coeffs[0] = 0.0;
        let mut out = nil.scale(derivs[1]);
        out.coeffs[0] = derivs[0];
        let mut power = nil.clone();
        let mut factorial = 1.0;
        for (k, &d) in derivs.iter().enumerate().take(self.order() + 1).skip(2) {
            power = power.product(&nil);
            factorial *= k as f64;
            let c = d / factorial;
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += c * p;
            }
        }
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e; 4])
    }

    /// Natural logarithm; returns non-finite coefficients for non-positive values.
    pub fn ln(&self) -> Jet {
        let x = self.value();
        self.compose([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    /// Square root; returns non-finite coefficients for non-positive values.
    pub fn sqrt(&self) -> Jet {
        let x = self.value();
        let s = x.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)])
    }

    pub fn recip(&self) -> Jet {
        let x = self.value();
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn checked_sqrt(&self) -> Result<Jet> {
        if self.value() > 0.0 {
            Ok(self.sqrt())
        } else {
            Err(GeomError::Domain(format!(
                "sqrt of non-positive jet value {}",
                self.value()
            )))
        }
    }

    pub fn checked_recip(&self) -> Result<Jet> {
        if self.value() != 0.0 {
            Ok(self.recip())
        } else {
            Err(GeomError::Domain("reciprocal of zero-valued jet".into()))
        }
    }
}

/// Applies a jet operation with shape and domain checks. Unary operations
/// ignore `b`.
pub fn jet_arithmetic(a: &Jet, b: &Jet, op: JetOp) -> Result<Jet> {
    let binary = matches!(op, JetOp::Add | JetOp::Sub | JetOp::Mul | JetOp::Div);
    if binary
        && !a.is_constant()
        && !b.is_constant()
        && (a.nvars != b.nvars || a.order != b.order)
    {
        return Err(GeomError::Shape(format!(
            "jet shapes differ: ({}, {}) vs ({}, {})",
            a.order, a.nvars, b.order, b.nvars
        )));
    }
    Ok(match op {
        JetOp::Add => a + b,
        JetOp::Sub => a - b,
        JetOp::Mul => a * b,
        JetOp::Div => a * &b.checked_recip()?,
        JetOp::Sqrt => a.checked_sqrt()?,
        JetOp::Sin => a.sin(),
        JetOp::Cos => a.cos(),
        JetOp::Exp => a.exp(),
        JetOp::Recip => a.checked_recip()?,
    })
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
        impl $trait<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(&Jet::constant(rhs))
            }
        }
        impl $trait<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                self.$method(&Jet::constant(rhs))
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.product(b));
jet_binop!(Div, div, |a, b| a.product(&b.recip()));

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Scalar type the geometry pipeline is written against: plain `f64` for
/// pointwise values, [`Jet`] when derivatives of derived quantities are needed.
pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(x: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn recip(&self) -> Self;

    /// Evaluates a type-erased map at this scalar type.
    fn eval_map(map: &dyn crate::derivatives::ChartMap, u: &[Self]) -> Vec<Self>;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    fn square(&self) -> Self {
        self.clone() * self
    }

    fn cosh(&self) -> Self {
        let e = self.exp();
        (e.clone() + e.recip()) * 0.5
    }

    fn sinh(&self) -> Self {
        let e = self.exp();
        (e.clone() - e.recip()) * 0.5
    }
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn eval_map(map: &dyn crate::derivatives::ChartMap, u: &[Self]) -> Vec<Self> {
        map.eval_real(u)
    }
}

impl Scalar for Jet {
    fn cst(x: f64) -> Self {
        Jet::constant(x)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
    fn eval_map(map: &dyn crate::derivatives::ChartMap, u: &[Self]) -> Vec<Self> {
        map.eval_jet(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sin_at_zero_matches_taylor_series() {
        let x = Jet::variable(0.0, 0, 1, 3);
        let s = x.sin();
        assert_eq!(s.derivative(&[]), 0.0);
        assert_eq!(s.derivative(&[0]), 1.0);
        assert_eq!(s.derivative(&[0, 0]), 0.0);
        assert_eq!(s.derivative(&[0, 0, 0]), -1.0);
    }

    #[test]
    fn square_at_three() {
        let x = Jet::variable(3.0, 0, 1, 3);
        let y = &x * &x;
        assert_eq!(y.derivative(&[]), 9.0);
        assert_eq!(y.derivative(&[0]), 6.0);
        assert_eq!(y.derivative(&[0, 0]), 2.0);
        assert_eq!(y.derivative(&[0, 0, 0]), 0.0);
    }

    #[test]
    fn multivariate_monomial_derivatives() {
        // f = x^2 y z at (1, 2, 3)
        let v = Jet::seed(&[1.0, 2.0, 3.0], 3);
        let f = &(&(&v[0] * &v[0]) * &v[1]) * &v[2];
        assert_eq!(f.value(), 6.0);
        assert_eq!(f.derivative(&[0]), 12.0);
        assert_eq!(f.derivative(&[1]), 3.0);
        assert_eq!(f.derivative(&[2]), 2.0);
        assert_eq!(f.derivative(&[0, 0]), 12.0);
        assert_eq!(f.derivative(&[0, 1]), 6.0);
        assert_eq!(f.derivative(&[1, 0]), 6.0);
        assert_eq!(f.derivative(&[0, 1, 2]), 2.0);
        assert_eq!(f.derivative(&[2, 0, 1]), 2.0);
        assert_eq!(f.derivative(&[0, 0, 1]), 6.0);
        assert_eq!(f.derivative(&[1, 1, 2]), 0.0);
    }

    #[test]
    fn partial_lowers_order_and_differentiates() {
        let v = Jet::seed(&[0.5, -1.0], 3);
        let f = &v[0].sin() * &v[1].exp();
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        let expect = 0.5f64.cos() * (-1.0f64).exp();
        assert!((fx.value() - expect).abs() < 1e-15);
        // d/dy of f_x = f_x
        assert!((fx.derivative(&[1]) - expect).abs() < 1e-15);
        let fxx = fx.partial(0);
        assert!((fxx.value() + 0.5f64.sin() * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn mixed_orders_take_the_minimum() {
        let a = Jet::variable(1.0, 0, 2, 3);
        let b = Jet::variable(2.0, 1, 2, 1);
        let c = &a * &b;
        assert_eq!(c.order(), 1);
        assert_eq!(c.coeffs(), &[2.0, 2.0, 1.0]);
    }

    #[test]
    fn constants_broadcast() {
        let x = Jet::variable(2.0, 0, 1, 2);
        let y = &x * 3.0 + 1.0;
        assert_eq!(y.coeffs(), &[7.0, 3.0, 0.0]);
        let z = Jet::constant(4.0) - &x;
        assert_eq!(z.coeffs(), &[2.0, -1.0, 0.0]);
    }

    #[test]
    fn division_and_sqrt_domain_errors() {
        let x = Jet::variable(0.0, 0, 1, 2);
        let one = Jet::constant(1.0);
        assert!(matches!(
            jet_arithmetic(&one, &x, JetOp::Div),
            Err(GeomError::Domain(_))
        ));
        assert!(matches!(
            jet_arithmetic(&x, &x, JetOp::Sqrt),
            Err(GeomError::Domain(_))
        ));
        let y = Jet::variable(-1.0, 0, 1, 2);
        assert!(jet_arithmetic(&y, &y, JetOp::Sqrt).is_err());
        assert!(jet_arithmetic(&y, &y, JetOp::Recip).is_ok());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = Jet::variable(1.0, 0, 2, 3);
        let b = Jet::variable(1.0, 0, 2, 2);
        assert!(matches!(
            jet_arithmetic(&a, &b, JetOp::Add),
            Err(GeomError::Shape(_))
        ));
    }

    #[test]
    fn sqrt_and_recip_are_inverse_to_square() {
        let x = Jet::variable(1.7, 0, 1, 3);
        let s = x.sqrt();
        let back = &s * &s;
        for (a, b) in back.coeffs().iter().zip(x.coeffs()) {
            assert!((a - b).abs() < 1e-15);
        }
        let r = &x.recip() * &x;
        assert!((r.value() - 1.0).abs() < 1e-15);
        assert!(r.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn chain_rule_square_of_sine() {
        // (sin x)^2 against the closed form derivatives of sin^2
        for k in 0..10 {
            let x0 = -2.0 + 0.45 * k as f64;
            let x = Jet::variable(x0, 0, 1, 3);
            let s = x.sin();
            let g = &s * &s;
            let (sn, cs) = x0.sin_cos();
            let want = [
                sn * sn,
                2.0 * sn * cs,
                2.0 * (cs * cs - sn * sn),
                -8.0 * sn * cs,
            ];
            for (d, w) in want.iter().enumerate() {
                let idx = vec![0; d];
                assert!((g.derivative(&idx) - w).abs() <= 1e-15 * 8.0, "order {d} at {x0}");
            }
        }
    }

    #[test]
    fn coefficient_counts() {
        assert_eq!(coefficient_count(1, 3), 4);
        assert_eq!(coefficient_count(3, 3), 20);
        assert_eq!(coefficient_count(4, 2), 15);
        assert_eq!(coefficient_count(8, 3), 165);
    }

    fn random_jet() -> impl Strategy<Value = Jet> {
        prop::collection::vec(-1.0f64..1.0, coefficient_count(3, 3))
            .prop_map(|c| Jet::from_coeffs(3, 3, c).unwrap())
    }

    proptest! {
        #[test]
        fn multiplication_commutes(a in random_jet(), b in random_jet()) {
            let ab = &a * &b;
            let ba = &b * &a;
            for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-14);
            }
        }

        #[test]
        fn multiplication_associates(a in random_jet(), b in random_jet(), c in random_jet()) {
            let l = &(&a * &b) * &c;
            let r = &a * &(&b * &c);
            for (x, y) in l.coeffs().iter().zip(r.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-14);
            }
        }

        #[test]
        fn hessian_and_third_blocks_are_symmetric(a in random_jet(), b in random_jet()) {
            let f = &(&a * &b).sin() + &a.exp();
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(f.derivative(&[i, j]), f.derivative(&[j, i]));
                    for k in 0..3 {
                        let d = f.derivative(&[i, j, k]);
                        prop_assert_eq!(d, f.derivative(&[k, i, j]));
                        prop_assert_eq!(d, f.derivative(&[j, k, i]));
                    }
                }
            }
        }
    }
}
