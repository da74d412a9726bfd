//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients of a scalar quantity at a point,
//! for every multi-index of total degree at most the truncation order. All
//! arithmetic applies the truncated product/quotient/composition rules, so a
//! jet computed through any chain of operations holds the *exact* partial
//! derivatives of the composite function (up to rounding). Differentiating a
//! jet is a coefficient shift that lowers the order by one; the geometry
//! layers stack these "towers" to reach third metric derivatives without any
//! finite differencing.
//!
//! Coefficients are stored densely in graded-lexicographic multi-index order
//! (degree first, then lexicographic within a degree). The monomials of order
//! `k` are a prefix of the monomials of order `k + 1`, which makes truncation
//! a slice copy.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Shared tables for one `(dim, order)` signature.
struct SpecTables {
    dim: usize,
    order: usize,
    /// Multi-indices in graded-lex order.
    monomials: Vec<Box<[u8]>>,
    index_of: HashMap<Box<[u8]>, usize>,
    /// `pairs[t]` lists every `(a, b)` with `monomials[a] + monomials[b] ==
    /// monomials[t]`; drives multiplication.
    pairs: Vec<Vec<(u32, u32)>>,
    /// Multi-index factorial per monomial.
    factorial: Vec<f64>,
    /// Position of the first-order coefficient of each variable.
    linear_pos: Vec<usize>,
}

/// Dimension and truncation order of a jet, interned so that every jet with
/// the same signature shares one set of index tables.
#[derive(Clone)]
pub struct JetSpec {
    tables: Arc<SpecTables>,
}

impl fmt::Debug for JetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetSpec(dim={}, order={})", self.dim(), self.order())
    }
}

impl PartialEq for JetSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tables, &other.tables)
            || (self.dim() == other.dim() && self.order() == other.order())
    }
}

fn monomials_of_degree(dim: usize, deg: usize) -> Vec<Vec<u8>> {
    if dim == 1 {
        return vec![vec![deg as u8]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for rest in monomials_of_degree(dim - 1, deg - first) {
            let mut m = Vec::with_capacity(dim);
            m.push(first as u8);
            m.extend_from_slice(&rest);
            out.push(m);
        }
    }
    out
}

fn registry() -> &'static Mutex<HashMap<(usize, usize), JetSpec>> {
    static REG: OnceLock<Mutex<HashMap<(usize, usize), JetSpec>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

impl JetSpec {
    /// Interns the spec for `dim` chart variables truncated at `order`.
    ///
    /// `order == 0` is accepted (a bare value); public callers normally use
    /// orders 1..=3, and derived evaluations may climb higher internally.
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("jet dimension must be >= 1".into()));
        }
        if order > 8 {
            return Err(Error::InvalidArgument(format!(
                "jet order {order} is unreasonably large"
            )));
        }
        let mut reg = registry().lock().unwrap();
        if let Some(spec) = reg.get(&(dim, order)) {
            return Ok(spec.clone());
        }
        let spec = JetSpec::build(dim, order);
        reg.insert((dim, order), spec.clone());
        Ok(spec)
    }

    fn build(dim: usize, order: usize) -> Self {
        let mut monomials: Vec<Box<[u8]>> = Vec::new();
        for deg in 0..=order {
            for m in monomials_of_degree(dim, deg) {
                monomials.push(m.into_boxed_slice());
            }
        }
        let index_of: HashMap<Box<[u8]>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut pairs = vec![Vec::new(); monomials.len()];
        for (a, ma) in monomials.iter().enumerate() {
            let da: usize = ma.iter().map(|&e| e as usize).sum();
            for (b, mb) in monomials.iter().enumerate() {
                let db: usize = mb.iter().map(|&e| e as usize).sum();
                if da + db > order {
                    continue;
                }
                let sum: Box<[u8]> = ma.iter().zip(mb.iter()).map(|(x, y)| x + y).collect();
                let t = index_of[&sum];
                pairs[t].push((a as u32, b as u32));
            }
        }
        let factorial = monomials
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&e| (1..=e as u64).product::<u64>() as f64)
                    .product()
            })
            .collect();
        let linear_pos = (0..dim)
            .map(|v| {
                if order == 0 {
                    usize::MAX
                } else {
                    let mut m = vec![0u8; dim];
                    m[v] = 1;
                    index_of[m.as_slice()]
                }
            })
            .collect();
        JetSpec {
            tables: Arc::new(SpecTables {
                dim,
                order,
                monomials,
                index_of,
                pairs,
                factorial,
                linear_pos,
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.tables.dim
    }

    pub fn order(&self) -> usize {
        self.tables.order
    }

    /// Number of stored coefficients: multi-indices of degree <= order.
    pub fn len(&self) -> usize {
        self.tables.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-indices in storage order.
    pub fn monomials(&self) -> impl Iterator<Item = &[u8]> {
        self.tables.monomials.iter().map(|m| &m[..])
    }

    fn index_of(&self, mi: &[u8]) -> Option<usize> {
        self.tables.index_of.get(mi).copied()
    }
}

/// A scalar value together with its partial derivatives up to the spec's
/// truncation order, encoded as Taylor coefficients.
#[derive(Clone, PartialEq)]
pub struct Jet {
    spec: JetSpec,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet{:?}{:?}", self.spec, self.coeffs)
    }
}

macro_rules! check_same_spec {
    ($a:expr, $b:expr) => {
        assert!(
            $a.spec == $b.spec,
            "jet spec mismatch: {:?} vs {:?}",
            $a.spec,
            $b.spec
        );
    };
}

impl Jet {
    /// The constant jet: value with all derivatives zero.
    pub fn constant(spec: &JetSpec, value: f64) -> Jet {
        let mut coeffs = vec![0.0; spec.len()];
        coeffs[0] = value;
        Jet {
            spec: spec.clone(),
            coeffs,
        }
    }

    pub fn zero(spec: &JetSpec) -> Jet {
        Jet::constant(spec, 0.0)
    }

    /// Seeds chart variable `index` at `value`: constant coefficient `value`,
    /// the variable's first-order coefficient 1, everything else 0.
    pub fn variable(spec: &JetSpec, index: usize, value: f64) -> Result<Jet> {
        if index >= spec.dim() {
            return Err(Error::InvalidArgument(format!(
                "variable index {index} out of range for dim {}",
                spec.dim()
            )));
        }
        let mut jet = Jet::constant(spec, value);
        if spec.order() >= 1 {
            jet.coeffs[spec.tables.linear_pos[index]] = 1.0;
        }
        Ok(jet)
    }

    /// Builds a jet directly from coefficients in graded-lex order.
    pub fn from_coeffs(spec: &JetSpec, coeffs: Vec<f64>) -> Result<Jet> {
        if coeffs.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                spec.len(),
                coeffs.len()
            )));
        }
        Ok(Jet {
            spec: spec.clone(),
            coeffs,
        })
    }

    pub fn spec(&self) -> &JetSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn order(&self) -> usize {
        self.spec.order()
    }

    /// The function value (constant coefficient).
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Raw Taylor coefficient for a multi-index.
    pub fn coeff(&self, mi: &[usize]) -> Result<f64> {
        Ok(self.coeffs[self.position(mi)?])
    }

    /// The true partial derivative for a multi-index: coefficient times the
    /// multi-index factorial.
    pub fn extract_derivative(&self, mi: &[usize]) -> Result<f64> {
        let pos = self.position(mi)?;
        Ok(self.coeffs[pos] * self.spec.tables.factorial[pos])
    }

    fn position(&self, mi: &[usize]) -> Result<usize> {
        if mi.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "multi-index length {} does not match dim {}",
                mi.len(),
                self.dim()
            )));
        }
        let deg: usize = mi.iter().sum();
        if deg > self.order() {
            return Err(Error::InvalidArgument(format!(
                "multi-index degree {deg} exceeds jet order {}",
                self.order()
            )));
        }
        let key: Box<[u8]> = mi.iter().map(|&e| e as u8).collect();
        self.spec
            .index_of(&key)
            .ok_or_else(|| Error::InvalidArgument("multi-index not in spec".into()))
    }

    /// Partial derivative with respect to variable `v`, as a jet of one
    /// lower order. Panics if the jet is order 0 (the towers in the geometry
    /// layers plan their orders so this cannot happen at runtime).
    pub fn partial(&self, v: usize) -> Jet {
        assert!(
            self.order() >= 1,
            "cannot differentiate an order-0 jet; raise the base order"
        );
        assert!(v < self.dim(), "variable index out of range");
        let lower = JetSpec::new(self.dim(), self.order() - 1).expect("lower spec");
        let mut coeffs = vec![0.0; lower.len()];
        for (pos, mi) in lower.tables.monomials.iter().enumerate() {
            let mut up: Box<[u8]> = mi.clone();
            up[v] += 1;
            let src = self.spec.index_of(&up).expect("shifted monomial");
            coeffs[pos] = self.coeffs[src] * f64::from(up[v]);
        }
        Jet { spec: lower, coeffs }
    }

    /// Truncates to a lower (or equal) order. Exact: the retained
    /// coefficients are an untouched prefix.
    pub fn truncated(&self, order: usize) -> Jet {
        assert!(order <= self.order(), "cannot truncate upward");
        if order == self.order() {
            return self.clone();
        }
        let spec = JetSpec::new(self.dim(), order).expect("truncated spec");
        Jet {
            coeffs: self.coeffs[..spec.len()].to_vec(),
            spec,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn mul_impl(&self, rhs: &Jet) -> Jet {
        check_same_spec!(self, rhs);
        let tables = &self.spec.tables;
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (t, pairs) in tables.pairs.iter().enumerate() {
            let mut acc = 0.0;
            for &(a, b) in pairs {
                acc += self.coeffs[a as usize] * rhs.coeffs[b as usize];
            }
            coeffs[t] = acc;
        }
        Jet {
            spec: self.spec.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            spec: self.spec.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Composes a univariate Taylor series `sum_k d[k] s^k` with the
    /// higher-order part `s = self - value` (nilpotent at truncation).
    /// `d[k]` must be `f^(k)(value) / k!`.
    fn compose(&self, d: &[f64]) -> Jet {
        debug_assert_eq!(d.len(), self.order() + 1);
        let mut s = self.clone();
        s.coeffs[0] = 0.0;
        // Horner evaluation in the truncated ring.
        let mut acc = Jet::constant(&self.spec, d[self.order()]);
        for k in (0..self.order()).rev() {
            acc = acc.mul_impl(&s);
            acc.coeffs[0] += d[k];
        }
        acc
    }

    /// Multiplicative inverse. Errors if the constant term is zero.
    pub fn recip(&self) -> Result<Jet> {
        let c = self.value();
        if c == 0.0 {
            return Err(Error::Singular(
                "division by jet with zero constant term".into(),
            ));
        }
        let mut d = vec![0.0; self.order() + 1];
        let mut p = 1.0 / c;
        for dk in d.iter_mut() {
            *dk = p;
            p *= -1.0 / c;
        }
        Ok(self.compose(&d))
    }

    /// Square root. Errors if the constant term is not strictly positive.
    pub fn sqrt(&self) -> Result<Jet> {
        let c = self.value();
        if c <= 0.0 {
            return Err(Error::Singular(format!(
                "sqrt of jet with non-positive constant term {c}"
            )));
        }
        let root = c.sqrt();
        let mut d = vec![0.0; self.order() + 1];
        // d_k = C(1/2, k) c^{1/2 - k}
        let mut binom = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = binom * root * c.powi(-(k as i32));
            binom *= (0.5 - k as f64) / (k as f64 + 1.0);
        }
        Ok(self.compose(&d))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut d = vec![0.0; self.order() + 1];
        let mut fact = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *dk = e / fact;
        }
        self.compose(&d)
    }

    pub fn sin(&self) -> Jet {
        self.circular(self.value().sin(), self.value().cos())
    }

    pub fn cos(&self) -> Jet {
        self.circular(self.value().cos(), -self.value().sin())
    }

    /// Shared sin/cos composition: derivatives cycle (f, f', -f, -f').
    fn circular(&self, f0: f64, f1: f64) -> Jet {
        let cycle = [f0, f1, -f0, -f1];
        let mut d = vec![0.0; self.order() + 1];
        let mut fact = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *dk = cycle[k % 4] / fact;
        }
        self.compose(&d)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        check_same_spec!(self, rhs);
        Jet {
            spec: self.spec.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        check_same_spec!(self, rhs);
        Jet {
            spec: self.spec.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_impl(rhs)
    }
}

/// Division panics on a zero constant term; use [`Jet::recip`] where the
/// denominator is not known to be invertible.
impl Div for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.mul_impl(&rhs.recip().expect("jet division"))
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Jet {
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
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}
