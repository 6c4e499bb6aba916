//! Young-diagram combinatorics: enumeration, arm/leg lengths, conjugation,
//! dominance order, and the combinatorial normalization factor.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A partition: weakly decreasing positive parts. The empty partition is the
/// unique partition of 0. Serializes as a JSON array of parts, e.g. `[3,1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

/// A box of a diagram in matrix (English) convention: `row` and `col` are
/// 1-based. A box need not lie inside the partition it is evaluated against.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub fn new(row: u32, col: u32) -> Self {
        assert!(row >= 1 && col >= 1, "cells are 1-based");
        Cell { row, col }
    }
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]) && parts.iter().all(|&p| p > 0),
            "parts must be weakly decreasing and positive: {:?}",
            parts
        );
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Build from any part list: sorts descending and drops zeros.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    /// Part at 1-based row index, 0 outside the diagram.
    pub fn part(&self, i: u32) -> u32 {
        if i == 0 || i as usize > self.0.len() {
            0
        } else {
            self.0[i as usize - 1]
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &p)| {
            (1..=p).map(move |j| Cell::new(i as u32 + 1, j))
        })
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.part(1);
        let parts = (1..=cols)
            .map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32)
            .collect();
        Partition(parts)
    }

    /// Multiplicity of a given part value.
    pub fn multiplicity(&self, value: u32) -> usize {
        self.0.iter().filter(|&&p| p == value).count()
    }

    /// Partition with one extra part inserted.
    pub fn with_part(&self, value: u32) -> Partition {
        assert!(value > 0);
        let mut parts = self.0.clone();
        let pos = parts.partition_point(|&p| p >= value);
        parts.insert(pos, value);
        Partition(parts)
    }

    /// Partition with one copy of `value` removed; None if absent.
    pub fn without_part(&self, value: u32) -> Option<Partition> {
        let pos = self.0.iter().position(|&p| p == value)?;
        let mut parts = self.0.clone();
        parts.remove(pos);
        Some(Partition(parts))
    }

    /// n(lambda) = sum (i-1) over cells.
    pub fn n_stat(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &p)| i as u64 * p as u64)
            .sum()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// All partitions of `n` in reverse-lexicographic order: `(n)` first,
/// `(1,...,1)` last. Deterministic.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(current.clone()));
            return;
        }
        let top = remaining.min(max_part);
        for p in (1..=top).rev() {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}

/// Arm and leg length of a box relative to a partition. Total: the box may
/// lie outside the diagram, where `arm = -j` along empty rows and
/// `leg = -i` along empty columns (both reach -1 at the first outside cell of
/// the empty partition).
pub fn arm_leg(lambda: &Partition, cell: Cell) -> (i64, i64) {
    let arm = lambda.part(cell.row) as i64 - cell.col as i64;
    let conj_part = lambda
        .0
        .iter()
        .filter(|&&p| p >= cell.col)
        .count() as i64;
    let leg = conj_part - cell.row as i64;
    (arm, leg)
}

/// d(lambda) = |Aut(lambda)| * prod(lambda_i). Equals the power-sum
/// centralizer order z_lambda.
pub fn aut_factor(lambda: &Partition) -> u128 {
    let mut result: u128 = 1;
    let mut run = 1u128;
    for (i, &p) in lambda.0.iter().enumerate() {
        if i > 0 && lambda.0[i - 1] == p {
            run += 1;
        } else {
            run = 1;
        }
        result *= run; // accumulates the factorial of each multiplicity run
        result *= p as u128;
    }
    result
}

/// Dominance partial order on partitions of equal size;
/// errors when |lambda| != |mu|.
pub fn dominance_leq(lambda: &Partition, mu: &Partition) -> Result<bool> {
    if lambda.size() != mu.size() {
        return Err(Error::DominanceSize(lambda.size(), mu.size()));
    }
    let mut sl = 0u64;
    let mut sm = 0u64;
    let rows = lambda.len().max(mu.len());
    for i in 1..=rows as u32 {
        sl += lambda.part(i) as u64;
        sm += mu.part(i) as u64;
        if sl > sm {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        assert_eq!(partitions_of(0), vec![Partition::empty()]);
        // spec lists the 5 basis monomials of Hilb_4
        let p4 = partitions_of(4);
        assert_eq!(p4.len(), 5);
        assert_eq!(p4[0], Partition::new(vec![4]));
        assert_eq!(p4[4], Partition::new(vec![1, 1, 1, 1]));
    }

    #[test]
    fn partition_count_matches_pentagonal_recurrence() {
        // independent oracle: Euler's pentagonal number recurrence
        let mut p = vec![1i64];
        for n in 1..=16usize {
            let mut total = 0i64;
            let mut k = 1i64;
            loop {
                let g1 = k * (3 * k - 1) / 2;
                let g2 = k * (3 * k + 1) / 2;
                if g1 as usize > n && g2 as usize > n {
                    break;
                }
                let sign = if k % 2 == 0 { -1 } else { 1 };
                if g1 as usize <= n {
                    total += sign * p[n - g1 as usize];
                }
                if g2 as usize <= n {
                    total += sign * p[n - g2 as usize];
                }
                k += 1;
            }
            p.push(total);
        }
        assert_eq!(p[8], 22);
        for n in 0..=12u32 {
            assert_eq!(partitions_of(n).len() as i64, p[n as usize], "n = {}", n);
        }
    }

    #[test]
    fn arm_leg_examples() {
        let l31 = Partition::new(vec![3, 1]);
        assert_eq!(arm_leg(&l31, Cell::new(1, 1)), (2, 1));
        assert_eq!(arm_leg(&Partition::empty(), Cell::new(1, 1)), (-1, -1));
        let l22 = Partition::new(vec![2, 2]);
        assert_eq!(arm_leg(&l22, Cell::new(2, 1)), (1, 0));
    }

    #[test]
    fn aut_factor_examples() {
        assert_eq!(aut_factor(&Partition::new(vec![1, 1])), 2);
        assert_eq!(aut_factor(&Partition::new(vec![2, 1])), 2);
        assert_eq!(aut_factor(&Partition::new(vec![2, 2])), 8);
        assert_eq!(aut_factor(&Partition::empty()), 1);
    }

    #[test]
    fn conjugate_examples_and_involution() {
        assert_eq!(
            Partition::new(vec![3, 1]).conjugate(),
            Partition::new(vec![2, 1, 1])
        );
        for n in 0..=12 {
            for p in partitions_of(n) {
                assert_eq!(p.conjugate().conjugate(), p);
            }
        }
    }

    #[test]
    fn dominance_examples() {
        let leq = |a: &[u32], b: &[u32]| {
            dominance_leq(&Partition::new(a.to_vec()), &Partition::new(b.to_vec())).unwrap()
        };
        assert!(leq(&[1, 1, 1], &[3]));
        // partial-sum oracle: prefix sums 2,4 vs 3,4
        assert!(leq(&[2, 2], &[3, 1]));
        assert!(!leq(&[3, 1], &[2, 2]));
        assert!(dominance_leq(
            &Partition::new(vec![2]),
            &Partition::new(vec![1])
        )
        .is_err());
    }

    #[test]
    fn hook_length_sanity() {
        // sum over boxes of (arm + leg + 1) equals the sum of hooks, and the
        // product of hooks divides n! (hook length formula gives an integer)
        for n in 1..=8u32 {
            let nfact: u128 = (1..=n as u128).product();
            for lam in partitions_of(n) {
                let mut hook_prod: u128 = 1;
                let mut hook_sum = 0i64;
                for cell in lam.cells() {
                    let (a, l) = arm_leg(&lam, cell);
                    assert!(a >= 0 && l >= 0);
                    hook_prod *= (a + l + 1) as u128;
                    hook_sum += a + l + 1;
                }
                assert!(hook_sum >= n as i64);
                assert_eq!(nfact % hook_prod, 0, "hooks of {:?}", lam);
            }
        }
    }

    #[test]
    fn insertion_and_removal() {
        let p = Partition::new(vec![3, 1]);
        assert_eq!(p.with_part(2), Partition::new(vec![3, 2, 1]));
        assert_eq!(p.without_part(3), Some(Partition::new(vec![1])));
        assert_eq!(p.without_part(2), None);
    }
}
