//! Rational functions in canonical reduced form.

use super::{poly_gcd, MultiPoly, NVARS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Quotient of two [`MultiPoly`] in canonical form: denominator nonzero and
/// monic under the total-degree-then-lex order, numerator and denominator
/// coprime. Equality of canonical forms is structural equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<C: Scalar> {
    num: MultiPoly<C>,
    den: MultiPoly<C>,
}

impl<C: Scalar> RatFunc<C> {
    pub fn new(num: MultiPoly<C>, den: MultiPoly<C>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: MultiPoly<C>, den: MultiPoly<C>) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatFunc { num, den: MultiPoly::one() };
        }
        let (mut num, mut den) = (num, den);
        if !den.is_constant() && !num.is_constant() {
            let g = poly_gcd(&num, &den);
            if !g.is_one() && !g.is_zero() {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
        }
        Self::from_coprime(num, den)
    }

    /// Canonicalize a fraction already known to be reduced: only the monic
    /// scaling of the denominator remains.
    fn from_coprime(mut num: MultiPoly<C>, mut den: MultiPoly<C>) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatFunc { num, den: MultiPoly::one() };
        }
        let lc = den.leading().1.clone();
        if !lc.is_one() {
            let inv = C::one() / lc;
            den = den.scale(&inv);
            num = num.scale(&inv);
        }
        RatFunc { num, den }
    }

    pub fn from_poly(p: MultiPoly<C>) -> Self {
        RatFunc { num: p, den: MultiPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(MultiPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn constant(c: C) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(C::from_int(n))
    }

    pub fn var(i: usize) -> Self {
        Self::from_poly(MultiPoly::var(i))
    }

    pub fn hbar() -> Self {
        Self::from_poly(MultiPoly::hbar())
    }

    pub fn num(&self) -> &MultiPoly<C> {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&MultiPoly<C>> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // cross-cancel before multiplying
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::reduced(self.num.scale(c), self.den.clone())
    }

    /// Exact substitution of variables by rational functions.
    pub fn substitute(&self, bindings: &BTreeMap<usize, RatFunc<C>>) -> Result<Self> {
        let n = self.num.substitute(bindings)?;
        let d = self.den.substitute(bindings)?;
        if d.is_zero() {
            return Err(Error::SubstitutionPole);
        }
        n.div(&d)
    }

    /// Substitute a single variable.
    pub fn subst_var(&self, var: usize, value: &RatFunc<C>) -> Result<Self> {
        let mut b = BTreeMap::new();
        b.insert(var, value.clone());
        self.substitute(&b)
    }

    /// Degree in one variable as (numerator, denominator) degrees.
    pub fn degrees_in(&self, var: usize) -> (u16, u16) {
        (self.num.degree_in(var), self.den.degree_in(var))
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.num.contains_var(var) || self.den.contains_var(var)
    }
}

impl<C: Scalar> std::ops::Add for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn add(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // canonical-by-construction sum of reduced fractions
        let g = if self.den == rhs.den {
            self.den.clone()
        } else {
            poly_gcd(&self.den, &rhs.den)
        };
        if g.is_one() {
            // coprime denominators: the sum is already reduced
            return RatFunc::from_coprime(
                &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
                &self.den * &rhs.den,
            );
        }
        let da = self.den.exact_div(&g).expect("gcd divides");
        let db = rhs.den.exact_div(&g).expect("gcd divides");
        let t = &(&self.num * &db) + &(&rhs.num * &da);
        if t.is_zero() {
            return RatFunc::zero();
        }
        let h = poly_gcd(&t, &g);
        if h.is_one() {
            RatFunc::from_coprime(t, &self.den * &db)
        } else {
            RatFunc::from_coprime(
                t.exact_div(&h).expect("gcd divides"),
                &da * &rhs.den.exact_div(&h).expect("gcd divides"),
            )
        }
    }
}

impl<C: Scalar> std::ops::Sub for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn sub(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        self + &(-rhs)
    }
}

impl<C: Scalar> std::ops::Neg for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn neg(self) -> RatFunc<C> {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<C: Scalar> std::ops::Mul for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn mul(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        // cross-cancellation: the product of the reduced crossed parts is
        // itself reduced, so no final gcd is needed
        let g1 = poly_gcd(&self.num, &rhs.den);
        let g2 = poly_gcd(&rhs.num, &self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.exact_div(&g1).unwrap() };
        let d2 = if g1.is_one() { rhs.den.clone() } else { rhs.den.exact_div(&g1).unwrap() };
        let n2 = if g2.is_one() { rhs.num.clone() } else { rhs.num.exact_div(&g2).unwrap() };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.exact_div(&g2).unwrap() };
        RatFunc::from_coprime(&n1 * &n2, &d1 * &d2)
    }
}

super::owned_ops!(RatFunc);

impl<C: Scalar> fmt::Display for RatFunc<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<C: Scalar> fmt::Debug for RatFunc<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<C: Scalar> Default for RatFunc<C> {
    fn default() -> Self {
        Self::zero()
    }
}

// ---------------------------------------------------------------------------
// JSON serialization: {"num": [[coeff, [exps]], ...], "den": [...]}
// Coefficients are exact-rational strings.

impl<C: Scalar> serde::Serialize for MultiPoly<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.num_terms()))?;
        for (m, c) in self.terms() {
            let exps: Vec<u16> = m.0.to_vec();
            seq.serialize_element(&(c.to_string(), exps))?;
        }
        seq.end()
    }
}

impl<'de, C: Scalar> serde::Deserialize<'de> for MultiPoly<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(String, Vec<u16>)> = serde::Deserialize::deserialize(d)?;
        let mut terms = Vec::new();
        for (cs, exps) in raw {
            if exps.len() != NVARS {
                return Err(serde::de::Error::custom("bad exponent arity"));
            }
            let mut e = [0u16; NVARS];
            e.copy_from_slice(&exps);
            let c = super::parse::parse_scalar::<C>(&cs)
                .map_err(|_| serde::de::Error::custom("bad coefficient"))?;
            terms.push((super::Mono(e), c));
        }
        Ok(MultiPoly::from_terms(terms))
    }
}

impl<C: Scalar> serde::Serialize for RatFunc<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RatFunc", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        st.end()
    }
}

impl<'de, C: Scalar> serde::Deserialize<'de> for RatFunc<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::{MapAccess, Visitor};
        struct V<C2: Scalar>(std::marker::PhantomData<C2>);
        impl<'de, C2: Scalar> Visitor<'de> for V<C2> {
            type Value = RatFunc<C2>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "an object with num and den fields")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut num: Option<MultiPoly<C2>> = None;
                let mut den: Option<MultiPoly<C2>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "num" => num = Some(map.next_value()?),
                        "den" => den = Some(map.next_value()?),
                        other => {
                            return Err(serde::de::Error::custom(format!(
                                "unknown field {}",
                                other
                            )))
                        }
                    }
                }
                let num = num.ok_or_else(|| serde::de::Error::missing_field("num"))?;
                let den = den.ok_or_else(|| serde::de::Error::missing_field("den"))?;
                RatFunc::new(num, den)
                    .map_err(|_| serde::de::Error::custom("zero denominator"))
            }
        }
        d.deserialize_map(V(std::marker::PhantomData))
    }
}

#[cfg(test)]
mod tests {
    use crate::{rat, Rat};

    #[test]
    fn row_sum_of_r_matrix_entries() {
        let a = rat("u/(u + t1 + t2)");
        let b = rat("(t1 + t2)/(u + t1 + t2)");
        assert!((&a + &b).is_one());
    }

    #[test]
    fn common_factor_cancellation() {
        let f = rat("(u^2 - (t1+t2)^2)/(u + t1 + t2)");
        assert_eq!(f, rat("u - t1 - t2"));
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        let a = rat("u/(u + t1 + t2)");
        let b = rat("(u + t1 + t2)/u");
        assert!((&a * &b).is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let z = Rat::zero();
        assert!(rat("u").div(&z).is_err());
        assert!(z.inv().is_err());
    }

    #[test]
    fn canonical_forms_are_equal_structurally() {
        assert_eq!(rat("(2*u)/(2*u + 2*t1)"), rat("u/(u + t1)"));
        assert_eq!(rat("(u*t1 - t1^2)/(t1)"), rat("u - t1"));
    }
}
