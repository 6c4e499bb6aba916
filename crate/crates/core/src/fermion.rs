//! The charged fermion Fock space on half-integer modes: Clifford operators
//! with signs, charge/energy gradings, the shift automorphism, Schur
//! polynomials, and the boson-fermion correspondence.
//!
//! Conventions. The vacuum is the wedge `e_{1/2} ^ e_{3/2} ^ ...`; the
//! charge-l reference sea occupies all indices >= l + 1/2. Wedge words are
//! kept in increasing index order, so inserting `e_k` counts the occupied
//! modes with smaller index. Half-integer mode indices are stored doubled
//! (odd integers): the argument `k2` denotes the mode `k2/2`.
//!
//! With this vacuum, removing a mode raises the charge by one and `psi_k`
//! lowers it; `gamma` shifts every index up and raises the charge. The boson
//! `alpha_r` acts as `sum_i psi_i psi*_{i-r}` (moving occupied modes up by
//! r), which is the index orientation that kills the vacuum for r > 0 and
//! creates `p_{-r}` for r < 0 in this sea convention.

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::partition::{partitions_of, Partition};
use crate::{Mat, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Canonical basis ray of the fermion Fock space: a charge and the partition
/// recording the deviation from the charge-l reference sea. The sign of a
/// state is carried by coefficients, not by the ray; the JSON form
/// `{"charge": l, "partition": [..], "sign": 1}` keeps the sign slot
/// explicit and rejects non-canonical rays on input.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WedgeState {
    pub charge: i64,
    pub partition: Partition,
}

impl Serialize for WedgeState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("WedgeState", 3)?;
        st.serialize_field("charge", &self.charge)?;
        st.serialize_field("partition", &self.partition)?;
        st.serialize_field("sign", &1i8)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for WedgeState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            charge: i64,
            partition: Partition,
            #[serde(default = "one")]
            sign: i8,
        }
        fn one() -> i8 {
            1
        }
        let raw = Raw::deserialize(d)?;
        if raw.sign != 1 {
            return Err(serde::de::Error::custom(
                "canonical rays carry sign +1; fold signs into coefficients",
            ));
        }
        Ok(WedgeState::new(raw.charge, raw.partition))
    }
}

impl WedgeState {
    pub fn vacuum() -> Self {
        WedgeState {
            charge: 0,
            partition: Partition::empty(),
        }
    }

    pub fn new(charge: i64, partition: Partition) -> Self {
        WedgeState { charge, partition }
    }

    /// Twice the energy: `2|lambda| + charge^2`.
    pub fn energy2(&self) -> i64 {
        2 * self.partition.size() as i64 + self.charge * self.charge
    }

    /// Doubled occupied index of the 1-based row k: `2(l+k) - 1 - 2 lambda_k`.
    fn occupied_at_row(&self, k: i64) -> i64 {
        2 * (self.charge + k) - 1 - 2 * self.partition.part(k as u32) as i64
    }

    /// First doubled index of the consecutive tail.
    fn tail_start(&self) -> i64 {
        2 * (self.charge + self.partition.len() as i64) + 1
    }

    /// Occupied indices below the tail, ascending.
    fn prefix(&self) -> Vec<i64> {
        (1..=self.partition.len() as i64)
            .map(|k| self.occupied_at_row(k))
            .collect()
    }

    pub fn occupies(&self, k2: i64) -> bool {
        if k2 >= self.tail_start() {
            return true;
        }
        (1..=self.partition.len() as i64).any(|k| self.occupied_at_row(k) == k2)
    }

    /// Number of occupied modes with index strictly below `k2`.
    fn count_below(&self, k2: i64) -> u64 {
        let ts = self.tail_start();
        let prefix_count = self.prefix().iter().filter(|&&o| o < k2).count() as u64;
        let tail_count = if k2 > ts { ((k2 - ts) / 2) as u64 } else { 0 };
        prefix_count + tail_count
    }

    fn from_occupied(prefix: &[i64], tail_start: i64) -> Self {
        debug_assert!(prefix.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(prefix.iter().all(|&o| o < tail_start && o % 2 != 0));
        // drop prefix elements that merge with the tail
        let mut prefix = prefix.to_vec();
        let mut ts = tail_start;
        while prefix.last() == Some(&(ts - 2)) {
            prefix.pop();
            ts -= 2;
        }
        let n = prefix.len() as i64;
        let charge = (ts - 2 * n - 1) / 2;
        let parts: Vec<u32> = (1..=n)
            .map(|k| {
                let expect = 2 * (charge + k) - 1;
                let lam2 = expect - prefix[(k - 1) as usize];
                debug_assert!(lam2 >= 0 && lam2 % 2 == 0);
                (lam2 / 2) as u32
            })
            .collect();
        WedgeState {
            charge,
            partition: Partition::new(parts),
        }
    }

    /// Occupied doubled indices below the consecutive tail, ascending.
    pub fn prefix_doubled(&self) -> Vec<i64> {
        self.prefix()
    }

    /// First doubled index of the consecutive tail.
    pub fn tail_start_doubled(&self) -> i64 {
        self.tail_start()
    }

    /// Wedge insertion `psi_{k2/2}`; None when the mode is occupied.
    pub fn insert(&self, k2: i64) -> Option<(WedgeState, i64)> {
        if self.occupies(k2) {
            return None;
        }
        let sign = if self.count_below(k2) % 2 == 0 { 1 } else { -1 };
        let mut prefix = self.prefix();
        let pos = prefix.partition_point(|&o| o < k2);
        prefix.insert(pos, k2);
        Some((Self::from_occupied(&prefix, self.tail_start()), sign))
    }

    /// Contraction `psi*_{k2/2}`; None when the mode is absent.
    pub fn remove(&self, k2: i64) -> Option<(WedgeState, i64)> {
        if !self.occupies(k2) {
            return None;
        }
        let sign = if self.count_below(k2) % 2 == 0 { 1 } else { -1 };
        let ts = self.tail_start();
        let mut prefix = self.prefix();
        if k2 < ts {
            prefix.retain(|&o| o != k2);
            Some((Self::from_occupied(&prefix, ts), sign))
        } else {
            // split the tail below the removed mode
            let mut o = ts;
            while o < k2 {
                prefix.push(o);
                o += 2;
            }
            Some((Self::from_occupied(&prefix, k2 + 2), sign))
        }
    }
}

impl fmt::Debug for WedgeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|q={},{}>", self.charge, self.partition)
    }
}

/// Sparse vector over canonical wedge states; no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FermionVector {
    terms: BTreeMap<WedgeState, Rat>,
}

impl FermionVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(WedgeState::vacuum())
    }

    pub fn basis(s: WedgeState) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, Rat::one());
        FermionVector { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (WedgeState, Rat)>>(iter: I) -> Self {
        let mut v = Self::zero();
        for (s, c) in iter {
            v.add_term(s, c);
        }
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeState, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &WedgeState) -> Rat {
        self.terms.get(s).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, s: WedgeState, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), -c);
        }
        out
    }

    pub fn scale(&self, f: &Rat) -> Self {
        if f.is_zero() {
            return Self::zero();
        }
        FermionVector {
            terms: self
                .terms
                .iter()
                .map(|(s, c)| (s.clone(), c * f))
                .collect(),
        }
    }

    pub fn max_energy2(&self) -> i64 {
        self.terms.keys().map(|s| s.energy2()).max().unwrap_or(0)
    }
}

impl fmt::Debug for FermionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*{:?}", c, s)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Psi,
    PsiStar,
}

/// Apply a single Clifford generator. `k2` is the doubled half-integer
/// index and must be odd.
pub fn apply_fermion(mode: Mode, k2: i64, v: &FermionVector) -> Result<FermionVector> {
    if k2 % 2 == 0 {
        return Err(Error::IntegerFermionIndex(k2));
    }
    let mut out = FermionVector::zero();
    for (s, c) in v.terms() {
        let hit = match mode {
            Mode::Psi => s.insert(k2),
            Mode::PsiStar => s.remove(k2),
        };
        if let Some((t, sign)) = hit {
            out.add_term(t, c.scale(&crate::qi(sign)));
        }
    }
    Ok(out)
}

/// Charge and twice the energy of a canonical state.
pub fn charge_energy(s: &WedgeState) -> (i64, i64) {
    (s.charge, s.energy2())
}

/// The shift automorphism `gamma^k`: every occupied index moves up by k, the
/// charge changes by k, the partition label is preserved and no sign occurs.
pub fn gamma_shift(v: &FermionVector, k: i64) -> FermionVector {
    FermionVector {
        terms: v
            .terms
            .iter()
            .map(|(s, c)| {
                (
                    WedgeState::new(s.charge + k, s.partition.clone()),
                    c.clone(),
                )
            })
            .collect(),
    }
}

/// The boson `alpha_r` realized on fermions: `sum_i psi_i psi*_{i-r}`,
/// i.e. every occupied mode moves up by r (down for negative r). With the
/// positive-sea vacuum this kills the vacuum for r > 0 and creates `p_{-r}`
/// for r < 0.
pub fn boson_on_fermions(r: i64, v: &FermionVector) -> Result<FermionVector> {
    if r == 0 {
        return Err(Error::ZeroBosonIndex);
    }
    let mut out = FermionVector::zero();
    for (s, c) in v.terms() {
        // candidates: occupied o with o + 2r free
        let ts = s.tail_start();
        let mut candidates = s.prefix();
        let mut o = ts;
        while o < ts + 2 * r.abs() + 2 {
            candidates.push(o);
            o += 2;
        }
        for o in candidates {
            let target = o + 2 * r;
            if s.occupies(target) {
                continue;
            }
            let (mid, sg1) = s.remove(o).expect("occupied candidate");
            let (fin, sg2) = mid.insert(target).expect("free target");
            out.add_term(fin, c.scale(&crate::qi(sg1 * sg2)));
        }
    }
    Ok(out)
}

/// Complete homogeneous symmetric function `h_k` in the power-sum basis:
/// `sum_{|mu|=k} p_mu / z_mu`.
pub fn complete_homogeneous(k: u32) -> FockVector {
    FockVector::from_terms(partitions_of(k).into_iter().map(|mu| {
        let z = crate::partition::aut_factor(&mu);
        let c = Rat::one()
            .div(&Rat::constant(crate::Coef::new(
                num::BigInt::from(z),
                num::BigInt::from(1u8),
            )))
            .unwrap();
        (mu, c)
    }))
}

/// Schur polynomial via the Jacobi-Trudi determinant
/// `s_lambda = det(g_{lambda_i - i + j})`.
pub fn schur(lambda: &Partition) -> FockVector {
    let l = lambda.len();
    if l == 0 {
        return FockVector::vacuum();
    }
    let entry = |i: usize, j: usize| -> FockVector {
        let k = lambda.part(i as u32 + 1) as i64 - (i as i64 + 1) + (j as i64 + 1);
        if k < 0 {
            FockVector::zero()
        } else {
            complete_homogeneous(k as u32)
        }
    };
    // Laplace expansion along rows, memoized by remaining-column mask.
    fn det(
        row: usize,
        mask: u32,
        l: usize,
        entry: &dyn Fn(usize, usize) -> FockVector,
        memo: &mut BTreeMap<u32, FockVector>,
    ) -> FockVector {
        if row == l {
            return FockVector::vacuum();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc = FockVector::zero();
        let mut sign = 1i64;
        for j in 0..l {
            if mask & (1 << j) == 0 {
                continue;
            }
            let e = entry(row, j);
            if !e.is_zero() {
                let minor = det(row + 1, mask & !(1 << j), l, entry, memo);
                acc = acc.add(&e.mul(&minor).scale(&Rat::int(sign)));
            }
            sign = -sign;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let mut memo = BTreeMap::new();
    det(0, (1u32 << l) - 1, l, &entry, &mut memo)
}

/// The boson-fermion correspondence on charge zero: `v_lambda -> s_lambda`,
/// extended linearly. Errors when the vector has support off charge 0.
pub fn bf_map(v: &FermionVector) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (s, c) in v.terms() {
        if s.charge != 0 {
            return Err(Error::ChargeNotZero);
        }
        out = out.add(&schur(&s.partition).scale(c));
    }
    Ok(out)
}

/// Transition matrix from the fermionic basis (states of degree d, canonical
/// partition order) to the power-sum basis: columns are `s_lambda`.
pub fn schur_transition(d: u32) -> Mat {
    let parts = partitions_of(d);
    let mut m = Mat::zeros(parts.len(), parts.len());
    for (j, lam) in parts.iter().enumerate() {
        let col = schur(lam).coords(d);
        m.set_col(j, &col);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::apply_boson_word;
    use rand::{Rng, SeedableRng};

    fn part(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    fn random_state(rng: &mut impl Rng, max_energy: i64) -> WedgeState {
        let charge = rng.gen_range(-2..=2i64);
        let budget = (max_energy - charge * charge / 2).max(0) as u32;
        let size = rng.gen_range(0..=budget.min(6));
        let parts = partitions_of(size);
        let lam = parts[rng.gen_range(0..parts.len())].clone();
        WedgeState::new(charge, lam)
    }

    #[test]
    fn psi_annihilates_modes_already_in_the_vacuum() {
        // e_{1/2} is occupied in the vacuum
        let out = apply_fermion(Mode::Psi, 1, &FermionVector::vacuum()).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn psi_minus_half_prepends_with_sign_one() {
        // the shifted vacuum of charge -1: energy 1/2, sign +1
        let out = apply_fermion(Mode::Psi, -1, &FermionVector::vacuum()).unwrap();
        let expect = FermionVector::basis(WedgeState::new(-1, Partition::empty()));
        assert_eq!(out, expect);
        let s = WedgeState::new(-1, Partition::empty());
        assert_eq!(charge_energy(&s), (-1, 1));
    }

    #[test]
    fn integer_mode_index_is_rejected() {
        assert!(apply_fermion(Mode::Psi, 2, &FermionVector::vacuum()).is_err());
    }

    #[test]
    fn clifford_anticommutators_on_window_and_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let window: Vec<i64> = (-4..4).map(|k| 2 * k + 1).collect(); // 8 modes
        for _ in 0..20 {
            let v = FermionVector::basis(random_state(&mut rng, 8));
            for &i in &window {
                for &j in &window {
                    // psi*_i psi_j + psi_j psi*_i = delta_ij
                    let a = apply_fermion(
                        Mode::PsiStar,
                        i,
                        &apply_fermion(Mode::Psi, j, &v).unwrap(),
                    )
                    .unwrap();
                    let b = apply_fermion(
                        Mode::Psi,
                        j,
                        &apply_fermion(Mode::PsiStar, i, &v).unwrap(),
                    )
                    .unwrap();
                    let sum = a.add(&b);
                    let expect = if i == j { v.clone() } else { FermionVector::zero() };
                    assert_eq!(sum, expect, "i={} j={}", i, j);
                    // psi_i psi_j + psi_j psi_i = 0
                    let c = apply_fermion(Mode::Psi, i, &apply_fermion(Mode::Psi, j, &v).unwrap())
                        .unwrap();
                    let d = apply_fermion(Mode::Psi, j, &apply_fermion(Mode::Psi, i, &v).unwrap())
                        .unwrap();
                    assert!(c.add(&d).is_zero(), "psi psi i={} j={}", i, j);
                }
            }
        }
    }

    #[test]
    fn clifford_against_brute_force_wedge_oracle() {
        // independent oracle: explicit occupied-index lists in a 10-mode
        // window (indices -9/2 .. 9/2), everything above the window occupied
        #[derive(Clone, PartialEq, Eq, Debug)]
        struct Brute(Vec<i64>); // sorted occupied inside window
        const HI: i64 = 11; // first index above the window (occupied onward)
        fn b_insert(s: &Brute, k2: i64) -> Option<(Brute, i64)> {
            if s.0.contains(&k2) {
                return None;
            }
            let below = s.0.iter().filter(|&&o| o < k2).count();
            let mut t = s.0.clone();
            t.push(k2);
            t.sort();
            Some((Brute(t), if below % 2 == 0 { 1 } else { -1 }))
        }
        fn b_remove(s: &Brute, k2: i64) -> Option<(Brute, i64)> {
            if !s.0.contains(&k2) {
                return None;
            }
            let below = s.0.iter().filter(|&&o| o < k2).count();
            Some((
                Brute(s.0.iter().copied().filter(|&o| o != k2).collect()),
                if below % 2 == 0 { 1 } else { -1 },
            ))
        }
        fn to_brute(s: &WedgeState) -> Brute {
            let mut occ: Vec<i64> = s.prefix();
            let mut o = s.tail_start();
            while o < HI {
                occ.push(o);
                o += 2;
            }
            occ.retain(|&x| x >= -9);
            Brute(occ)
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let s = random_state(&mut rng, 6);
            // keep states whose deviations stay inside the window
            if s.prefix().iter().any(|&o| o < -7) || s.tail_start() >= HI - 2 {
                continue;
            }
            for k2 in [-7i64, -5, -3, -1, 1, 3, 5, 7] {
                let got = s.insert(k2).map(|(t, sg)| (to_brute(&t), sg));
                let want = b_insert(&to_brute(&s), k2);
                assert_eq!(got, want, "insert {} on {:?}", k2, s);
                let got = s.remove(k2).map(|(t, sg)| (to_brute(&t), sg));
                let want = b_remove(&to_brute(&s), k2);
                assert_eq!(got, want, "remove {} on {:?}", k2, s);
            }
        }
    }

    #[test]
    fn charge_energy_examples() {
        assert_eq!(charge_energy(&WedgeState::vacuum()), (0, 0));
        let gvac = gamma_shift(&FermionVector::vacuum(), 1);
        let (s, _) = gvac.terms().next().unwrap();
        assert_eq!(charge_energy(s), (1, 1)); // energy 1/2, doubled
        let s = WedgeState::new(0, part(&[2, 1]));
        assert_eq!(charge_energy(&s), (0, 6)); // energy 3, doubled
    }

    #[test]
    fn gamma_examples() {
        // gamma(vac) = vac_1, the charge-1 reference sea
        let gvac = gamma_shift(&FermionVector::vacuum(), 1);
        assert_eq!(
            gvac,
            FermionVector::basis(WedgeState::new(1, Partition::empty()))
        );
        // gamma^{-1} gamma = id on random states
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = FermionVector::basis(random_state(&mut rng, 8));
            assert_eq!(gamma_shift(&gamma_shift(&v, 1), -1), v);
        }
        // Maya-diagram translation oracle: occupied sets shift rigidly
        for _ in 0..20 {
            let s = random_state(&mut rng, 8);
            let shifted = WedgeState::new(s.charge + 1, s.partition.clone());
            let occ: Vec<i64> = s.prefix().iter().map(|o| o + 2).collect();
            assert_eq!(shifted.prefix(), occ);
            assert_eq!(shifted.tail_start(), s.tail_start() + 2);
            assert_eq!(shifted.partition, s.partition);
        }
    }

    #[test]
    fn gamma_conjugates_wedge_operators() {
        // gamma E_{ij} gamma^{-1} = E_{i+1, j+1} on sample states
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let v = FermionVector::basis(random_state(&mut rng, 6));
            for (i2, j2) in [(1, 3), (-1, 1), (3, -3)] {
                let eij = |k2: i64, l2: i64, w: &FermionVector| {
                    apply_fermion(Mode::Psi, k2, &apply_fermion(Mode::PsiStar, l2, w).unwrap())
                        .unwrap()
                };
                let lhs = gamma_shift(&eij(i2, j2, &gamma_shift(&v, -1)), 1);
                let rhs = eij(i2 + 2, j2 + 2, &v);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn boson_action_examples() {
        // alpha_1 kills the vacuum
        assert!(boson_on_fermions(1, &FermionVector::vacuum())
            .unwrap()
            .is_zero());
        // alpha_{-1} vac = v_(1)
        let v1 = boson_on_fermions(-1, &FermionVector::vacuum()).unwrap();
        assert_eq!(v1, FermionVector::basis(WedgeState::new(0, part(&[1]))));
        // alpha_{-2} vac = v_(2) - v_(1,1)
        let v2 = boson_on_fermions(-2, &FermionVector::vacuum()).unwrap();
        let mut expect = FermionVector::basis(WedgeState::new(0, part(&[2])));
        expect.add_term(WedgeState::new(0, part(&[1, 1])), -&Rat::one());
        assert_eq!(v2, expect);
    }

    #[test]
    fn fermionic_heisenberg_relations() {
        // [alpha_n, alpha_m] = n delta_{n+m} on charge-0 states of energy <= 7
        for d in 0..=7u32 {
            for lam in partitions_of(d) {
                let v = FermionVector::basis(WedgeState::new(0, lam));
                for n in [-3i64, -2, -1, 1, 2, 3] {
                    for m in [-3i64, -2, -1, 1, 2, 3] {
                        let ab = boson_on_fermions(n, &boson_on_fermions(m, &v).unwrap()).unwrap();
                        let ba = boson_on_fermions(m, &boson_on_fermions(n, &v).unwrap()).unwrap();
                        let diff = ab.sub(&ba);
                        let expect = if n + m == 0 {
                            v.scale(&Rat::int(n))
                        } else {
                            FermionVector::zero()
                        };
                        assert_eq!(diff, expect, "n={} m={}", n, m);
                    }
                }
            }
        }
    }

    #[test]
    fn e_ij_preserves_charge() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let s = random_state(&mut rng, 6);
            let v = FermionVector::basis(s.clone());
            let out = apply_fermion(
                Mode::Psi,
                3,
                &apply_fermion(Mode::PsiStar, -1, &v).unwrap(),
            )
            .unwrap();
            for (t, _) in out.terms() {
                assert_eq!(t.charge, s.charge);
            }
        }
    }

    #[test]
    fn schur_examples() {
        use crate::rat;
        // s_(1) = p1
        assert_eq!(schur(&part(&[1])), FockVector::basis(part(&[1])));
        // s_(2) = p1^2/2 + p2/2
        let s2 = schur(&part(&[2]));
        assert_eq!(s2.coeff(&part(&[1, 1])), rat("1/2"));
        assert_eq!(s2.coeff(&part(&[2])), rat("1/2"));
        // s_(1,1) = p1^2/2 - p2/2
        let s11 = schur(&part(&[1, 1]));
        assert_eq!(s11.coeff(&part(&[1, 1])), rat("1/2"));
        assert_eq!(s11.coeff(&part(&[2])), rat("-1/2"));
    }

    #[test]
    fn bf_map_examples() {
        // v_empty -> 1
        assert_eq!(
            bf_map(&FermionVector::vacuum()).unwrap(),
            FockVector::vacuum()
        );
        // v_(1) -> p1
        let v = FermionVector::basis(WedgeState::new(0, part(&[1])));
        assert_eq!(bf_map(&v).unwrap(), FockVector::basis(part(&[1])));
        // bf(alpha_{-2} alpha_{-1} vac) = p2 p1
        let w = boson_on_fermions(-2, &boson_on_fermions(-1, &FermionVector::vacuum()).unwrap())
            .unwrap();
        assert_eq!(bf_map(&w).unwrap(), FockVector::basis(part(&[2, 1])));
        // nonzero charge errors
        let bad = FermionVector::basis(WedgeState::new(1, Partition::empty()));
        assert!(bf_map(&bad).is_err());
    }

    #[test]
    fn intertwining_with_the_boson_action() {
        // bf(alpha_n^fermion v) = alpha_n^boson bf(v), |n| <= 5, energy <= 7
        for d in 0..=7u32 {
            for lam in partitions_of(d) {
                let v = FermionVector::basis(WedgeState::new(0, lam));
                let bv = bf_map(&v).unwrap();
                for n in [-5i64, -4, -3, -2, -1, 1, 2, 3, 4, 5] {
                    let lhs = bf_map(&boson_on_fermions(n, &v).unwrap()).unwrap();
                    let rhs = apply_boson_word(&[n], &bv).unwrap();
                    assert_eq!(lhs, rhs, "n={}", n);
                }
            }
        }
    }
}
