//! Multivariate polynomial GCD.
//!
//! Strategy, in order:
//! 1. strip monomial contents (per-variable minimum exponents);
//! 2. single shared variable: dense monic Euclid over the coefficient field;
//! 3. weight-homogeneous inputs (ubiquitous here: every variable has weight
//!    one): dehomogenize the highest active variable and recurse with one
//!    variable fewer, then rehomogenize - exact, since a homogeneous
//!    polynomial with trivial monomial content is determined by its
//!    dehomogenization;
//! 4. general case: content-and-primitive-part recursion on the highest
//!    variable in the fixed order `t1 < t2 < u < u1 < ... < v < c`, with a
//!    coprimality witness (univariate gcd at a sample point with nonvanishing
//!    leading coefficients, a sound one-sided test) to skip the pseudo-
//!    remainder sequence in the common coprime case.

use super::{Mono, MultiPoly, NVARS};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// GCD of two polynomials, monic-normalized. gcd(0, 0) = 0.
pub fn poly_gcd<C: Scalar>(a: &MultiPoly<C>, b: &MultiPoly<C>) -> MultiPoly<C> {
    if a.is_zero() {
        return if b.is_zero() { MultiPoly::zero() } else { b.monic() };
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    // common monomial factor
    let ca = monomial_content(a);
    let cb = monomial_content(b);
    let mut common = [0u16; NVARS];
    for v in 0..NVARS {
        common[v] = ca.0[v].min(cb.0[v]);
    }
    let astr = strip_monomial(a, &ca);
    let bstr = strip_monomial(b, &cb);
    let core = gcd_stripped(&astr, &bstr);
    core.mul_mono(&Mono(common)).monic()
}

fn monomial_content<C: Scalar>(p: &MultiPoly<C>) -> Mono {
    let mut min = [u16::MAX; NVARS];
    for (m, _) in p.terms() {
        for v in 0..NVARS {
            min[v] = min[v].min(m.0[v]);
        }
    }
    Mono(min)
}

fn strip_monomial<C: Scalar>(p: &MultiPoly<C>, content: &Mono) -> MultiPoly<C> {
    if content.is_one() {
        return p.clone();
    }
    MultiPoly::from_terms(p.terms().map(|(m, c)| (content.div_into(m), c.clone())))
}

/// Inputs have trivial monomial content and are non-constant.
fn gcd_stripped<C: Scalar>(a: &MultiPoly<C>, b: &MultiPoly<C>) -> MultiPoly<C> {
    let active: Vec<usize> = (0..NVARS)
        .filter(|&v| a.contains_var(v) || b.contains_var(v))
        .collect();
    let shared: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&v| a.contains_var(v) && b.contains_var(v))
        .collect();
    if shared.is_empty() {
        // no common variable and no common monomial: fall back to contents
        // along a variable of a (which b does not contain)
        if let Some(&v) = active.iter().find(|&&v| a.contains_var(v)) {
            let content = coeff_gcd(&a.univariate_in(v));
            return poly_gcd(&content, b);
        }
        return MultiPoly::one();
    }
    if active.len() == 1 {
        let v = active[0];
        return from_dense(v, &gcd_dense(&to_dense(a, v), &to_dense(b, v)));
    }
    // homogeneous route: drop a variable
    if let (Some(_), Some(_)) = (homogeneous_degree(a), homogeneous_degree(b)) {
        let v = *active.last().unwrap();
        let da = dehomogenize(a, v);
        let db = dehomogenize(b, v);
        let g = poly_gcd(&da, &db);
        return homogenize(&g, v);
    }
    // general recursion on the top shared variable
    let var = *shared.last().unwrap();
    let ua = a.univariate_in(var);
    let ub = b.univariate_in(var);
    let ca = coeff_gcd(&ua);
    let cb = coeff_gcd(&ub);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);
    let content_gcd = poly_gcd(&ca, &cb);
    if witness_says_coprime(&pa, &pb, &active, var) {
        return content_gcd;
    }
    let prim = primitive_prs(pa, pb);
    &MultiPoly::from_univariate(var, &prim) * &content_gcd
}

/// All terms of equal total degree.
fn homogeneous_degree<C: Scalar>(p: &MultiPoly<C>) -> Option<u32> {
    let mut it = p.terms();
    let d = it.next()?.0.total_degree();
    it.all(|(m, _)| m.total_degree() == d).then_some(d)
}

fn dehomogenize<C: Scalar>(p: &MultiPoly<C>, var: usize) -> MultiPoly<C> {
    MultiPoly::from_terms(p.terms().map(|(m, c)| (m.without(var), c.clone())))
}

fn homogenize<C: Scalar>(p: &MultiPoly<C>, var: usize) -> MultiPoly<C> {
    let d = p.total_degree();
    MultiPoly::from_terms(p.terms().map(|(m, c)| {
        let mut e = m.0;
        e[var] = (d - m.total_degree()) as u16;
        (Mono(e), c.clone())
    }))
}

// ---------------------------------------------------------------------------
// Dense univariate gcd over the coefficient field (monic Euclid)

fn to_dense<C: Scalar>(p: &MultiPoly<C>, var: usize) -> Vec<C> {
    let deg = p.degree_in(var) as usize;
    let mut out = vec![C::zero(); deg + 1];
    for (m, c) in p.terms() {
        debug_assert_eq!(m.without(var), Mono::ONE);
        out[m.degree_in(var) as usize] = c.clone();
    }
    out
}

fn from_dense<C: Scalar>(var: usize, coeffs: &[C]) -> MultiPoly<C> {
    MultiPoly::from_terms(coeffs.iter().enumerate().filter_map(|(e, c)| {
        if c.is_zero() {
            return None;
        }
        let mut m = [0u16; NVARS];
        m[var] = e as u16;
        Some((Mono(m), c.clone()))
    }))
}

fn dense_trim<C: Scalar>(v: &mut Vec<C>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn dense_monic<C: Scalar>(v: &mut [C]) {
    let Some(lc) = v.last().cloned() else { return };
    if lc.is_one() {
        return;
    }
    for c in v.iter_mut() {
        *c = c.clone() / lc.clone();
    }
}

fn gcd_dense<C: Scalar>(a: &[C], b: &[C]) -> Vec<C> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    dense_trim(&mut r0);
    dense_trim(&mut r1);
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_empty() {
        dense_monic(&mut r1);
        // r0 mod r1
        while r0.len() >= r1.len() && !r0.is_empty() {
            let shift = r0.len() - r1.len();
            let lead = r0.last().unwrap().clone();
            for (k, c) in r1.iter().enumerate() {
                let t = lead.clone() * c.clone();
                r0[shift + k] = r0[shift + k].clone() - t;
            }
            dense_trim(&mut r0);
        }
        std::mem::swap(&mut r0, &mut r1);
    }
    dense_monic(&mut r0);
    r0
}

// ---------------------------------------------------------------------------
// Coprimality witness

/// Substitute deterministic sample values for every active variable except
/// `main`, then check the univariate gcd. Degree zero with nonvanishing
/// leading coefficients proves the primitive parts are coprime in `main`.
fn witness_says_coprime<C: Scalar>(
    ua: &Uni<C>,
    ub: &Uni<C>,
    active: &[usize],
    main: usize,
) -> bool {
    // two fixed sample tuples; odd primes keep hbar-like forms nonzero
    for samples in [[3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37], [
        43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    ]] {
        let assign = |p: &MultiPoly<C>| -> Option<C> {
            let mut acc = C::zero();
            for (m, c) in p.terms() {
                let mut t = c.clone();
                for (vi, &v) in active.iter().enumerate() {
                    if v == main {
                        continue;
                    }
                    for _ in 0..m.degree_in(v) {
                        t = t * C::from_int(samples[vi % samples.len()]);
                    }
                }
                if m.degree_in(main) > 0 {
                    return None; // not a pure coefficient
                }
                acc = acc + t;
            }
            Some(acc)
        };
        let eval_uni = |u: &Uni<C>| -> Option<Vec<C>> {
            let deg = *u.keys().next_back()? as usize;
            let mut out = vec![C::zero(); deg + 1];
            for (e, p) in u {
                out[*e as usize] = assign(p)?;
            }
            Some(out)
        };
        let (Some(ea), Some(eb)) = (eval_uni(ua), eval_uni(ub)) else {
            return false;
        };
        // leading coefficients must survive the evaluation
        if ea.last().map(|c| c.is_zero()).unwrap_or(true)
            || eb.last().map(|c| c.is_zero()).unwrap_or(true)
        {
            continue;
        }
        let g = gcd_dense(&ea, &eb);
        if g.len() == 1 {
            return true;
        }
        return false;
    }
    false
}

// ---------------------------------------------------------------------------
// Primitive pseudo-remainder sequence (general fallback)

type Uni<C> = BTreeMap<u16, MultiPoly<C>>;

fn coeff_gcd<C: Scalar>(uni: &Uni<C>) -> MultiPoly<C> {
    let mut g = MultiPoly::zero();
    for p in uni.values() {
        g = poly_gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_coeffs<C: Scalar>(uni: &Uni<C>, d: &MultiPoly<C>) -> Uni<C> {
    if d.is_one() {
        return uni.clone();
    }
    uni.iter()
        .map(|(e, p)| (*e, p.exact_div(d).expect("content divides")))
        .collect()
}

fn uni_deg<C: Scalar>(p: &Uni<C>) -> i64 {
    p.keys().next_back().map(|&e| e as i64).unwrap_or(-1)
}

fn uni_lc<C: Scalar>(p: &Uni<C>) -> MultiPoly<C> {
    p.values().next_back().cloned().unwrap_or_default()
}

fn uni_scale<C: Scalar>(p: &Uni<C>, s: &MultiPoly<C>) -> Uni<C> {
    p.iter().map(|(e, c)| (*e, c * s)).collect()
}

fn uni_sub<C: Scalar>(a: &Uni<C>, b: &Uni<C>) -> Uni<C> {
    let mut out = a.clone();
    for (e, c) in b {
        let entry = out.entry(*e).or_default();
        *entry = &*entry - c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn uni_shift_mul<C: Scalar>(p: &Uni<C>, shift: u16, s: &MultiPoly<C>) -> Uni<C> {
    p.iter().map(|(e, c)| (e + shift, c * s)).collect()
}

fn pseudo_rem<C: Scalar>(a: &Uni<C>, b: &Uni<C>) -> Uni<C> {
    let db = uni_deg(b);
    let lb = uni_lc(b);
    let mut r = a.clone();
    while uni_deg(&r) >= db && !r.is_empty() {
        let dr = uni_deg(&r);
        let lr = uni_lc(&r);
        r = uni_sub(
            &uni_scale(&r, &lb),
            &uni_shift_mul(b, (dr - db) as u16, &lr),
        );
        debug_assert!(uni_deg(&r) < dr);
    }
    r
}

fn primitive_prs<C: Scalar>(mut a: Uni<C>, mut b: Uni<C>) -> Uni<C> {
    if uni_deg(&a) < uni_deg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_empty() {
            return make_primitive_uni(a);
        }
        let r = pseudo_rem(&a, &b);
        if r.is_empty() {
            return make_primitive_uni(b);
        }
        if uni_deg(&r) == 0 {
            let mut one = BTreeMap::new();
            one.insert(0u16, MultiPoly::one());
            return one;
        }
        a = b;
        b = make_primitive_uni(r);
    }
}

fn make_primitive_uni<C: Scalar>(p: Uni<C>) -> Uni<C> {
    let content = coeff_gcd(&p);
    let out = if content.is_zero() || content.is_one() {
        p
    } else {
        divide_coeffs(&p, &content)
    };
    // constant coefficients: normalize monic to stop rational growth
    if out.values().all(|c| c.is_constant()) {
        if let Some(lc) = uni_lc(&out).as_constant().cloned() {
            if !lc.is_one() {
                let inv = C::one() / lc;
                return out
                    .into_iter()
                    .map(|(e, c)| (e, c.scale(&inv)))
                    .collect();
            }
        }
    }
    out
}
