//! Property tests for the exact arithmetic layer: canonical-form confluence
//! under randomized expression trees, the series homomorphism, and
//! substitution consistency at random rational points.

use instanton_core::ring::{series_expand, vars, RatFunc};
use instanton_core::{Coef, Rat};
use proptest::prelude::*;
use std::collections::BTreeMap;

type R = RatFunc<Coef>;

/// A small random rational-function expression tree over t1, t2, u.
#[derive(Clone, Debug)]
enum Expr {
    Var(usize),
    Int(i8),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(|i| Expr::Var([vars::T1, vars::T2, vars::U][i])),
        (-4i8..=4).prop_map(Expr::Int),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
        ]
    })
}

/// Evaluate with intermediate normalization after every node.
fn eval(e: &Expr) -> Option<R> {
    Some(match e {
        Expr::Var(i) => Rat::var(*i),
        Expr::Int(n) => Rat::int(*n as i64),
        Expr::Add(a, b) => &eval(a)? + &eval(b)?,
        Expr::Sub(a, b) => &eval(a)? - &eval(b)?,
        Expr::Mul(a, b) => &eval(a)? * &eval(b)?,
        Expr::Div(a, b) => eval(a)?.div(&eval(b)?).ok()?,
    })
}

/// Evaluate as a single unreduced fraction, normalizing only at the end.
fn eval_raw(e: &Expr) -> Option<(R, R)> {
    // (num, den) as polynomial-valued RatFuncs without intermediate gcd
    Some(match e {
        Expr::Var(i) => (Rat::var(*i), Rat::one()),
        Expr::Int(n) => (Rat::int(*n as i64), Rat::one()),
        Expr::Add(a, b) => {
            let (na, da) = eval_raw(a)?;
            let (nb, db) = eval_raw(b)?;
            (&(&na * &db) + &(&nb * &da), &da * &db)
        }
        Expr::Sub(a, b) => {
            let (na, da) = eval_raw(a)?;
            let (nb, db) = eval_raw(b)?;
            (&(&na * &db) - &(&nb * &da), &da * &db)
        }
        Expr::Mul(a, b) => {
            let (na, da) = eval_raw(a)?;
            let (nb, db) = eval_raw(b)?;
            (&na * &nb, &da * &db)
        }
        Expr::Div(a, b) => {
            let (na, da) = eval_raw(a)?;
            let (nb, db) = eval_raw(b)?;
            if nb.is_zero() {
                return None;
            }
            (&na * &db, &da * &nb)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Canonical forms do not depend on where normalization happens.
    #[test]
    fn canonical_form_confluence(e in arb_expr()) {
        if let (Some(stepwise), Some((num, den))) = (eval(&e), eval_raw(&e)) {
            if !den.is_zero() {
                let late = num.div(&den).unwrap();
                prop_assert_eq!(stepwise, late);
            }
        }
    }

    /// series_expand is a ring homomorphism to truncated Laurent series.
    #[test]
    fn series_is_a_ring_homomorphism(
        a_num in -3i64..=3, a_shift in 0i64..=2,
        b_num in -3i64..=3, b_shift in 0i64..=2,
        order in 1usize..=4,
    ) {
        // regular-at-infinity pair (u + a)/(u + hbar (shift+1)) style
        let u = Rat::var(vars::U);
        let hbar = Rat::hbar();
        let mk = |n: i64, s: i64| -> Rat {
            let num = &u + &hbar.scale(&instanton_core::qi(n));
            let den = &u + &hbar.scale(&instanton_core::qi(s + 1));
            num.div(&den).unwrap()
        };
        let f = mk(a_num, a_shift);
        let g = mk(b_num, b_shift);
        let sf = series_expand(&f, order).unwrap();
        let sg = series_expand(&g, order).unwrap();
        let sfg = series_expand(&(&f * &g), order).unwrap();
        for k in 0..=order {
            let mut conv = Rat::zero();
            for j in 0..=k {
                conv = &conv + &(&sf[j] * &sg[k - j]);
            }
            prop_assert_eq!(&conv, &sfg[k], "coefficient {}", k);
        }
    }
}

#[test]
fn series_reconstruction_agrees_with_direct_evaluation() {
    // substitute(series reconstruction) vs direct evaluation at rational
    // points away from poles, 20 deterministic samples
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let f = instanton_core::rat("(u*(u + t2))/((u + t1 + 2*t2)*(u + 3*t1))");
    let order = 6;
    let series = series_expand(&f, order).unwrap();
    let mut checked = 0;
    while checked < 20 {
        let t1v = Rat::int(rng.gen_range(1..20i64));
        let t2v = Rat::int(rng.gen_range(1..20i64));
        let uv = Rat::int(rng.gen_range(50..500i64));
        let mut bind: BTreeMap<usize, Rat> = BTreeMap::new();
        bind.insert(vars::T1, t1v);
        bind.insert(vars::T2, t2v);
        bind.insert(vars::U, uv.clone());
        let Ok(direct) = f.substitute(&bind) else { continue };
        // partial sums must agree with the direct value up to the exact
        // remainder bound: |f - sum| = O(u^-(order+1)) means the
        // reconstructed expression f - sum has numerator degree drop
        let mut acc = Rat::zero();
        for (k, c) in series.iter().enumerate() {
            let ck = c.substitute(&bind).unwrap();
            acc = &acc + &ck.div(&uv.pow(k as i64).unwrap()).unwrap();
        }
        let tail = &direct - &acc;
        // exact identity check: the symbolic tail evaluated matches
        let mut sym_tail = f.clone();
        for (k, c) in series.iter().enumerate() {
            sym_tail = &sym_tail - &c.div(&Rat::var(vars::U).pow(k as i64).unwrap()).unwrap();
        }
        assert_eq!(sym_tail.substitute(&bind).unwrap(), tail);
        checked += 1;
    }
}
