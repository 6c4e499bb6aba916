//! Exact multivariate polynomial and rational-function arithmetic.
//!
//! The variable universe is fixed: `t1 < t2 < u < u1 < ... < u6 < v < c`.
//! The equivariant weight `hbar = t1 + t2` is never a stored variable; every
//! constructor expands it. Monomials are ordered by total degree, ties broken
//! lexicographically, and canonical forms are unique: numerator and
//! denominator share no factor and the denominator is monic in its leading
//! term.

mod gcd;
pub mod parse;
mod ratfunc;
mod series;

pub use gcd::poly_gcd;
pub use ratfunc::RatFunc;
pub use series::series_expand;

use crate::error::Result;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Number of variables in the fixed universe.
pub const NVARS: usize = 11;
/// Variable names in canonical order.
pub const VAR_NAMES: [&str; NVARS] = [
    "t1", "t2", "u", "u1", "u2", "u3", "u4", "u5", "u6", "v", "c",
];

/// Canonical variable indices.
pub mod vars {
    pub const T1: usize = 0;
    pub const T2: usize = 1;
    pub const U: usize = 2;
    pub const U1: usize = 3;
    pub const U2: usize = 4;
    pub const U3: usize = 5;
    pub const U4: usize = 6;
    pub const U5: usize = 7;
    pub const U6: usize = 8;
    pub const V: usize = 9;
    pub const C: usize = 10;

    /// Spectral parameter for the k-th framing factor, 0-based (`u1` for k=0).
    pub fn spectral(k: usize) -> usize {
        assert!(k < 6, "only u1..u6 are available");
        U1 + k
    }
}

pub fn var_index(name: &str) -> Option<usize> {
    VAR_NAMES.iter().position(|n| *n == name)
}

/// Exponent vector under total-degree-then-lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub [u16; NVARS]);

impl Mono {
    pub const ONE: Mono = Mono([0; NVARS]);

    pub fn var(i: usize) -> Mono {
        let mut e = [0u16; NVARS];
        e[i] = 1;
        Mono(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        Mono(e)
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// other / self, assuming divisibility.
    pub fn div_into(&self, other: &Mono) -> Mono {
        let mut e = other.0;
        for (a, b) in e.iter_mut().zip(self.0.iter()) {
            *a -= b;
        }
        Mono(e)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.0[var]
    }

    pub fn without(&self, var: usize) -> Mono {
        let mut e = self.0;
        e[var] = 0;
        Mono(e)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact scalar coefficients.
///
/// Invariants: no stored zero coefficients; all exponent vectors live in the
/// fixed [`NVARS`]-variable universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly<C: Scalar> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Scalar> MultiPoly<C> {
    pub fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::ONE, c);
        }
        MultiPoly { terms }
    }

    pub fn var(i: usize) -> Self {
        Self::from_terms([(Mono::var(i), C::one())])
    }

    /// `t1 + t2`; the only way hbar enters the ring.
    pub fn hbar() -> Self {
        Self::var(vars::T1) + Self::var(vars::T2)
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, C)>>(iter: I) -> Self {
        let mut terms: BTreeMap<Mono, C> = BTreeMap::new();
        for (m, c) in iter {
            if c.is_zero() {
                continue;
            }
            match terms.entry(m) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
        MultiPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn as_constant(&self) -> Option<&C> {
        if self.terms.is_empty() {
            return None;
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Mono::ONE) {
                return Some(c);
            }
        }
        None
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || self.as_constant().is_some()
    }

    /// Leading term under total-degree-then-lex order. Panics on zero.
    pub fn leading(&self) -> (&Mono, &C) {
        self.terms.iter().next_back().expect("leading of zero")
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms
            .keys()
            .map(|m| m.degree_in(var))
            .max()
            .unwrap_or(0)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.degree_in(var) > 0)
    }

    /// Highest-index variable that actually occurs.
    pub fn top_var(&self) -> Option<usize> {
        (0..NVARS).rev().find(|&v| self.contains_var(v))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (*m, a.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact multivariate division; `None` when not divisible.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(C::one() / c.clone())));
        }
        let (dm, dc) = {
            let (m, c) = d.leading();
            (*m, c.clone())
        };
        let mut rem = self.clone();
        let mut quo: BTreeMap<Mono, C> = BTreeMap::new();
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading();
                (*m, c.clone())
            };
            if !dm.divides(&rm) {
                return None;
            }
            let qm = dm.div_into(&rm);
            let qc = rc / dc.clone();
            rem = &rem - &d.mul_mono(&qm).scale(&qc);
            quo.insert(qm, qc);
        }
        Some(MultiPoly { terms: quo })
    }

    /// View as a univariate polynomial in `var` with polynomial coefficients,
    /// sparse by exponent.
    pub fn univariate_in(&self, var: usize) -> BTreeMap<u16, MultiPoly<C>> {
        let mut out: BTreeMap<u16, MultiPoly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.degree_in(var);
            let rest = m.without(var);
            out.entry(e)
                .or_insert_with(MultiPoly::zero)
                .add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Rebuild from a univariate view.
    pub fn from_univariate(var: usize, coeffs: &BTreeMap<u16, MultiPoly<C>>) -> Self {
        let mut out = Self::zero();
        for (e, p) in coeffs {
            let mut m = [0u16; NVARS];
            m[var] = *e;
            out = &out + &p.mul_mono(&Mono(m));
        }
        out
    }

    /// Substitute variables by rational functions; unbound variables stay.
    pub fn substitute(&self, bindings: &BTreeMap<usize, RatFunc<C>>) -> Result<RatFunc<C>> {
        let mut acc = RatFunc::zero();
        // Cache powers per variable to avoid repeated exponentiation.
        let mut pows: BTreeMap<(usize, u16), RatFunc<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut term = RatFunc::from_poly(Self::constant(c.clone()));
            let mut residual = Mono::ONE;
            for v in 0..NVARS {
                let e = m.degree_in(v);
                if e == 0 {
                    continue;
                }
                if let Some(b) = bindings.get(&v) {
                    let p = pows
                        .entry((v, e))
                        .or_insert_with(|| b.pow(e as i64).expect("nonneg power"))
                        .clone();
                    term = &term * &p;
                } else {
                    residual.0[v] = e;
                }
            }
            if !residual.is_one() {
                term = &term * &RatFunc::from_poly(Self::from_terms([(residual, C::one())]));
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Leading coefficient in the univariate view.
    pub fn leading_coeff_in(&self, var: usize) -> MultiPoly<C> {
        let uni = self.univariate_in(var);
        uni.into_iter()
            .next_back()
            .map(|(_, p)| p)
            .unwrap_or_else(MultiPoly::zero)
    }

    /// Scale so the leading coefficient becomes one. Panics on zero.
    pub fn monic(&self) -> Self {
        let lc = self.leading().1.clone();
        self.scale(&(C::one() / lc))
    }
}

impl<C: Scalar> std::ops::Add for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<C: Scalar> std::ops::Sub for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<C: Scalar> std::ops::Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, -c.clone()))
                .collect(),
        }
    }
}

impl<C: Scalar> std::ops::Mul for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        let mut out = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($t:ident) => {
        impl<C: Scalar> std::ops::Add for $t<C> {
            type Output = $t<C>;
            fn add(self, rhs: $t<C>) -> $t<C> {
                &self + &rhs
            }
        }
        impl<C: Scalar> std::ops::Sub for $t<C> {
            type Output = $t<C>;
            fn sub(self, rhs: $t<C>) -> $t<C> {
                &self - &rhs
            }
        }
        impl<C: Scalar> std::ops::Mul for $t<C> {
            type Output = $t<C>;
            fn mul(self, rhs: $t<C>) -> $t<C> {
                &self * &rhs
            }
        }
        impl<C: Scalar> std::ops::Neg for $t<C> {
            type Output = $t<C>;
            fn neg(self) -> $t<C> {
                -&self
            }
        }
    };
}
owned_ops!(MultiPoly);
pub(crate) use owned_ops;

impl<C: Scalar> fmt::Display for MultiPoly<C> {
    /// Plain-text grammar: `coeff * t1^a t2^b ...` joined by `+`, highest
    /// term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for v in 0..NVARS {
                let e = m.degree_in(v);
                if e == 1 {
                    write!(f, "*{}", VAR_NAMES[v])?;
                } else if e > 1 {
                    write!(f, "*{}^{}", VAR_NAMES[v], e)?;
                }
            }
        }
        Ok(())
    }
}

impl<C: Scalar> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Errors out when the exponent would leave u16 range; fine for this domain.
impl<C: Scalar> Default for MultiPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Coef;

    fn p(src: &str) -> MultiPoly<Coef> {
        parse::parse_poly(src).unwrap()
    }

    #[test]
    fn mono_order_is_total_degree_then_lex() {
        let t1 = Mono::var(vars::T1);
        let t2 = Mono::var(vars::T2);
        let u = Mono::var(vars::U);
        // same degree: t1 beats t2 beats u
        assert!(t1 > t2);
        assert!(t2 > u);
        // higher total degree wins regardless of variables
        assert!(u.mul(&u) > t1);
    }

    #[test]
    fn exact_division_round_trip() {
        let a = p("u^2 + 2*u*t1 + t1^2");
        let b = p("u + t1");
        let q = a.exact_div(&b).unwrap();
        assert_eq!(q, b);
        assert!(p("u^2 + 1").exact_div(&b).is_none());
    }

    #[test]
    fn univariate_view_round_trips() {
        let a = p("u^2*t1 + u*t2 + t1*t2 + 3");
        let uni = a.univariate_in(vars::U);
        assert_eq!(MultiPoly::from_univariate(vars::U, &uni), a);
    }
}
