//! Laurent expansion at u = infinity.

use super::{vars, MultiPoly, RatFunc};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Expand `f` as `c0 + c1/u + c2/u^2 + ...` up to `u^-order`, exactly.
///
/// Requires `f` to be regular at `u = infinity`, i.e. the numerator degree in
/// `u` must not exceed the denominator degree. The returned coefficients are
/// rational functions in the remaining variables;
/// `f - sum_k c_k u^-k = O(u^-(order+1))` holds as an exact identity.
pub fn series_expand<C: Scalar>(f: &RatFunc<C>, order: usize) -> Result<Vec<RatFunc<C>>> {
    let (ndeg, ddeg) = f.degrees_in(vars::U);
    if ndeg > ddeg {
        return Err(Error::PoleAtInfinity {
            num_deg: ndeg as u32,
            den_deg: ddeg as u32,
        });
    }
    let nuni = f.num().univariate_in(vars::U);
    let duni = f.den().univariate_in(vars::U);
    // Align both at the denominator degree: row i holds the u^(ddeg - i) part.
    let coeff_at = |uni: &std::collections::BTreeMap<u16, MultiPoly<C>>, k: i64| -> RatFunc<C> {
        if k < 0 {
            return RatFunc::zero();
        }
        uni.get(&(k as u16))
            .map(|p| RatFunc::from_poly(p.clone()))
            .unwrap_or_else(RatFunc::zero)
    };
    let d0 = coeff_at(&duni, ddeg as i64);
    debug_assert!(!d0.is_zero());
    let mut out: Vec<RatFunc<C>> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let nk = coeff_at(&nuni, ddeg as i64 - k as i64);
        let mut acc = nk;
        for (j, cj) in out.iter().enumerate().take(k) {
            let dj = coeff_at(&duni, ddeg as i64 - (k - j) as i64);
            if !dj.is_zero() {
                acc = &acc - &(&dj * cj);
            }
        }
        out.push(acc.div(&d0)?);
    }
    Ok(out)
}
