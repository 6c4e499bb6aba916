//! Jack polynomials and the fixed-point eigenbasis of the cut-and-join
//! operator.
//!
//! Two bases per degree:
//!
//! * the classical Jack basis `P_lambda` with parameter `theta = -t1/t2`,
//!   built by Gram-Schmidt against dominance order under the deformed inner
//!   product `<p_lambda, p_mu> = delta z_lambda theta^{-l(lambda)}`; these
//!   are monic in the monomial basis and pairwise orthogonal;
//! * the fixed-point basis `j_lambda`, the rescaling of `P_lambda` by
//!   `p_n -> -t2 p_n` (normalized by `(-t2)^{-|lambda|}`), which is the exact
//!   eigenbasis of the equivariant first Chern class operator with
//!   eigenvalue `sum_{(i,j)} (i-1) t1 + (j-1) t2`.
//!
//! The first Chern class operator written in the bare bosons is conjugate to
//! the Jack eigenoperator precisely by that rescaling; the eigenvector
//! property of `j_lambda` is verified during construction and on every cache
//! read, never assumed.

use crate::error::{Error, Result};
use crate::fock::{lehn_expr, operator_matrix, FockVector};
use crate::partition::{aut_factor, dominance_leq, partitions_of, Partition};
use crate::ring::vars;
use crate::{Mat, Rat};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Tag identifying the convention baked into cached bases. Bump when any of
/// the inner product, normalization or eigenvalue convention changes.
pub const CONVENTION: &str = "theta=-t1/t2;P-monic;fixed=rescale(-t2);eig=(i-1)t1+(j-1)t2;v1";

/// Jack and fixed-point bases at one degree, with the basis-change matrices
/// in the canonical power-sum coordinate order.
#[derive(Clone)]
pub struct JackBasis {
    pub degree: u32,
    pub partitions: Vec<Partition>,
    /// Columns: theta-Jack `P_lambda` in p-coordinates.
    pub jack_p: Mat,
    /// Columns: fixed-point vectors `j_lambda` in p-coordinates.
    pub fixed_p: Mat,
    fixed_p_inv: Mat,
}

/// `c_1` eigenvalue: `sum_{(i,j) in lambda} (i-1) t1 + (j-1) t2
///  = n(lambda) t1 + n(lambda') t2`.
pub fn c1_eigenvalue(lambda: &Partition) -> Rat {
    let n_rows = lambda.n_stat() as i64;
    let n_cols = lambda.conjugate().n_stat() as i64;
    &(&Rat::var(vars::T1) * &Rat::int(n_rows)) + &(&Rat::var(vars::T2) * &Rat::int(n_cols))
}

/// `T(u)` eigenvalue:
/// `prod (u + (i-1) t1 + (j-1) t2) / prod (u + i t1 + j t2)` over the boxes.
pub fn t_eigenvalue(lambda: &Partition) -> Rat {
    let (num, den) = t_eigenvalue_factors(lambda);
    let lin = |a: i64, b: i64| -> Rat {
        &(&Rat::var(vars::U) + &(&Rat::var(vars::T1) * &Rat::int(a)))
            + &(&Rat::var(vars::T2) * &Rat::int(b))
    };
    let mut out = Rat::one();
    for (a, b) in num {
        out = &out * &lin(a, b);
    }
    for (a, b) in den {
        out = out.div(&lin(a, b)).expect("nonzero factor");
    }
    out
}

/// The linear factors of the `T(u)` eigenvalue as `(a, b)` pairs meaning
/// `u + a t1 + b t2`; numerator uses `(i-1, j-1)`, denominator `(i, j)`.
pub fn t_eigenvalue_factors(lambda: &Partition) -> (Vec<(i64, i64)>, Vec<(i64, i64)>) {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for cell in lambda.cells() {
        num.push((cell.row as i64 - 1, cell.col as i64 - 1));
        den.push((cell.row as i64, cell.col as i64));
    }
    (num, den)
}

/// Monomial symmetric functions of degree n in p-coordinates: column j of
/// the result expresses `m_{partitions[j]}` in the canonical p-basis.
fn monomial_in_p(n: u32) -> Mat {
    let parts = partitions_of(n);
    let k = parts.len();
    // merge-count matrix: p_mu = sum_lambda N[mu][lambda] m_lambda, where
    // N counts the assignments of the parts of mu onto the rows of lambda
    // filling each row exactly.
    let mut nmat = Mat::zeros(k, k);
    for (i, mu) in parts.iter().enumerate() {
        for (j, lam) in parts.iter().enumerate() {
            let count = merge_count(mu.parts(), lam.parts());
            if count > 0 {
                nmat[(i, j)] = Rat::int(count as i64);
            }
        }
    }
    // p_i = sum_j N[i][j] m_j  =>  m_j = sum_i X[i][j] p_i with X = (N^T)^-1
    nmat.transpose().inverse().expect("merge matrix invertible")
}

fn merge_count(mu: &[u32], lam: &[u32]) -> u64 {
    fn rec(mu: &[u32], caps: &mut Vec<u32>) -> u64 {
        let Some((&first, rest)) = mu.split_first() else {
            return if caps.iter().all(|&c| c == 0) { 1 } else { 0 };
        };
        let mut total = 0;
        for i in 0..caps.len() {
            if caps[i] >= first {
                caps[i] -= first;
                total += rec(rest, caps);
                caps[i] += first;
            }
        }
        total
    }
    rec(mu, &mut lam.to_vec())
}

/// Deformed power-sum inner product:
/// `<p_lambda, p_lambda> = z_lambda * theta^{-l}`, `theta = -t1/t2`.
fn pairing_weight(lambda: &Partition) -> Rat {
    let z = Rat::constant(crate::Coef::new(
        num::BigInt::from(aut_factor(lambda)),
        num::BigInt::from(1u8),
    ));
    // theta^{-1} = -t2/t1
    let theta_inv = (-&Rat::var(vars::T2)).div(&Rat::var(vars::T1)).unwrap();
    &z * &theta_inv.pow(lambda.len() as i64).unwrap()
}

fn inner(a: &FockVector, b: &FockVector) -> Rat {
    let mut acc = Rat::zero();
    for (l, ca) in a.terms() {
        let cb = b.coeff(l);
        if cb.is_zero() {
            continue;
        }
        acc = &acc + &(&(ca * &cb) * &pairing_weight(l));
    }
    acc
}

/// Rescale `p_n -> s * p_n` for every n: each p-coefficient picks up
/// `s^{l(lambda)}`.
fn rescale_parts(v: &FockVector, s: &Rat) -> FockVector {
    FockVector::from_terms(
        v.terms()
            .map(|(l, c)| (l.clone(), c * &s.pow(l.len() as i64).expect("nonneg power")))
    )
}

impl JackBasis {
    /// Gram-Schmidt construction plus eigencheck. Partitions are processed
    /// in ascending dominance order (the reversed enumeration refines it).
    pub fn build(degree: u32) -> Result<JackBasis> {
        let parts = partitions_of(degree);
        let k = parts.len();
        let m_in_p = monomial_in_p(degree);
        let m_col = |j: usize| -> FockVector { FockVector::from_coords(degree, &m_in_p.col(j)) };
        let mut built: Vec<(usize, FockVector, Rat)> = Vec::new(); // (index, P, <P,P>)
        for j in (0..k).rev() {
            let mut v = m_col(j);
            for (_, p, norm) in &built {
                let c = inner(&v, p).div(norm)?;
                if !c.is_zero() {
                    v = v.sub(&p.scale(&c));
                }
            }
            let norm = inner(&v, &v);
            if norm.is_zero() {
                return Err(Error::EigencheckFailed(format!(
                    "degenerate Gram matrix at {}",
                    parts[j]
                )));
            }
            built.push((j, v, norm));
        }
        let mut jack_p = Mat::zeros(k, k);
        for (j, v, _) in &built {
            jack_p.set_col(*j, &v.coords(degree));
        }
        // fixed-point basis: p_n -> -t2 p_n, normalized by (-t2)^{-degree}
        let s = -&Rat::var(vars::T2);
        let norm = s.pow(degree as i64)?.inv()?;
        let mut fixed_p = Mat::zeros(k, k);
        for j in 0..k {
            let p = FockVector::from_coords(degree, &jack_p.col(j));
            let fixed = rescale_parts(&p, &s).scale(&norm);
            fixed_p.set_col(j, &fixed.coords(degree));
        }
        let basis = JackBasis {
            degree,
            partitions: parts,
            jack_p,
            fixed_p_inv: fixed_p.inverse()?,
            fixed_p,
        };
        basis.eigencheck()?;
        Ok(basis)
    }

    /// Verify that every `j_lambda` is an exact eigenvector of the first
    /// Chern class operator with the closed-form eigenvalue.
    pub fn eigencheck(&self) -> Result<()> {
        let (lehn, _) = operator_matrix(&lehn_expr(), self.degree)?;
        for (j, lam) in self.partitions.iter().enumerate() {
            let col = Mat::from_rows(self.fixed_p.col(j).into_iter().map(|x| vec![x]).collect());
            let image = lehn.mul(&col);
            let expect = col.scale(&c1_eigenvalue(lam));
            if image != expect {
                return Err(Error::EigencheckFailed(format!("{}", lam)));
            }
        }
        Ok(())
    }

    pub fn jack(&self, lambda: &Partition) -> FockVector {
        let j = self.index_of(lambda);
        FockVector::from_coords(self.degree, &self.jack_p.col(j))
    }

    pub fn fixed_point(&self, lambda: &Partition) -> FockVector {
        let j = self.index_of(lambda);
        FockVector::from_coords(self.degree, &self.fixed_p.col(j))
    }

    fn index_of(&self, lambda: &Partition) -> usize {
        self.partitions
            .iter()
            .position(|p| p == lambda)
            .expect("partition of the right size")
    }

    /// Coordinates of a homogeneous vector in the fixed-point basis.
    pub fn to_jack(&self, v: &FockVector) -> Result<Vec<Rat>> {
        if !v.is_zero() && v.homogeneous_degree() != Some(self.degree as u64) {
            return Err(crate::Error::Shape(format!(
                "vector is not homogeneous of degree {}",
                self.degree
            )));
        }
        let coords = v.coords(self.degree);
        let col = Mat::from_rows(coords.into_iter().map(|x| vec![x]).collect());
        let sol = self.fixed_p_inv.mul(&col);
        Ok((0..sol.nrows()).map(|i| sol[(i, 0)].clone()).collect())
    }

    /// Linear combination of fixed-point basis vectors.
    pub fn from_jack(&self, coords: &[Rat]) -> FockVector {
        assert_eq!(coords.len(), self.partitions.len());
        let mut out = FockVector::zero();
        for (j, c) in coords.iter().enumerate() {
            out = out.add(&FockVector::from_coords(self.degree, &self.fixed_p.col(j)).scale(c));
        }
        out
    }

    /// Conjugate a diagonal family into the p-basis:
    /// `M = J diag(values) J^-1` over the fixed-point basis.
    pub fn conjugate_diagonal(&self, values: &[Rat]) -> Mat {
        assert_eq!(values.len(), self.partitions.len());
        let k = values.len();
        let mut diag = Mat::zeros(k, k);
        for (i, v) in values.iter().enumerate() {
            diag[(i, i)] = v.clone();
        }
        self.fixed_p.mul(&diag).mul(&self.fixed_p_inv)
    }
}

// ---------------------------------------------------------------------------
// Persistent cache

#[derive(Serialize, Deserialize)]
struct CacheFile {
    degree: u32,
    convention: String,
    partitions: Vec<Partition>,
    jack_p: Vec<Vec<Rat>>,
    fixed_p: Vec<Vec<Rat>>,
}

fn cache_path(dir: &Path, degree: u32) -> PathBuf {
    let mut hash: u64 = 1469598103934665603;
    for b in CONVENTION.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(1099511628211);
    }
    dir.join(format!("jack_deg{}_{:016x}.json", degree, hash))
}

/// Build the basis, consulting a JSON cache when a directory is given.
/// Cache reads re-run the eigencheck before trusting the data; invalid or
/// stale entries are rebuilt.
pub fn jack_basis_cached(degree: u32, cache_dir: Option<&Path>) -> Result<JackBasis> {
    if let Some(dir) = cache_dir {
        let path = cache_path(dir, degree);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(file) = serde_json::from_str::<CacheFile>(&text) {
                if let Ok(basis) = basis_from_cache(file) {
                    return Ok(basis);
                }
            }
        }
        let basis = JackBasis::build(degree)?;
        std::fs::create_dir_all(dir)?;
        let file = CacheFile {
            degree,
            convention: CONVENTION.to_string(),
            partitions: basis.partitions.clone(),
            jack_p: cols_of(&basis.jack_p),
            fixed_p: cols_of(&basis.fixed_p),
        };
        std::fs::write(&path, serde_json::to_string(&file).expect("serialize"))?;
        return Ok(basis);
    }
    JackBasis::build(degree)
}

fn cols_of(m: &Mat) -> Vec<Vec<Rat>> {
    (0..m.ncols()).map(|j| m.col(j)).collect()
}

fn basis_from_cache(file: CacheFile) -> Result<JackBasis> {
    if file.convention != CONVENTION {
        return Err(Error::CacheInvalid("convention mismatch".into()));
    }
    let parts = partitions_of(file.degree);
    if file.partitions != parts
        || file.jack_p.len() != parts.len()
        || file.fixed_p.len() != parts.len()
    {
        return Err(Error::CacheInvalid("basis shape mismatch".into()));
    }
    let k = parts.len();
    let mut jack_p = Mat::zeros(k, k);
    let mut fixed_p = Mat::zeros(k, k);
    for j in 0..k {
        if file.jack_p[j].len() != k || file.fixed_p[j].len() != k {
            return Err(Error::CacheInvalid("column length mismatch".into()));
        }
        jack_p.set_col(j, &file.jack_p[j]);
        fixed_p.set_col(j, &file.fixed_p[j]);
    }
    let basis = JackBasis {
        degree: file.degree,
        partitions: parts,
        jack_p,
        fixed_p_inv: fixed_p.inverse()?,
        fixed_p,
    };
    basis.eigencheck()?;
    Ok(basis)
}

/// Triangularity of the Jack basis in the monomial basis: `P_lambda` is
/// monic in `m_lambda` with support only on dominance-smaller partitions.
pub fn check_triangularity(basis: &JackBasis) -> Result<bool> {
    let m_in_p = monomial_in_p(basis.degree);
    let p_in_m = m_in_p.inverse()?;
    for (j, lam) in basis.partitions.iter().enumerate() {
        let col = Mat::from_rows(basis.jack_p.col(j).into_iter().map(|x| vec![x]).collect());
        let m_coords = p_in_m.mul(&col);
        for (i, mu) in basis.partitions.iter().enumerate() {
            let c = &m_coords[(i, 0)];
            if i == j {
                if !c.is_one() {
                    return Ok(false);
                }
            } else if !c.is_zero() && !dominance_leq(mu, lam)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Pairwise orthogonality under the deformed inner product.
pub fn check_orthogonality(basis: &JackBasis) -> bool {
    let k = basis.partitions.len();
    for a in 0..k {
        let va = FockVector::from_coords(basis.degree, &basis.jack_p.col(a));
        for b in a + 1..k {
            let vb = FockVector::from_coords(basis.degree, &basis.jack_p.col(b));
            if !inner(&va, &vb).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Diagonalize the first Chern class matrix through the fixed basis and
/// return the diagonal entries in partition order.
pub fn lehn_spectrum(basis: &JackBasis) -> Result<Vec<Rat>> {
    let (lehn, _) = operator_matrix(&lehn_expr(), basis.degree)?;
    let diag = basis.fixed_p_inv.mul(&lehn.mul(&basis.fixed_p));
    let k = basis.partitions.len();
    for i in 0..k {
        for j in 0..k {
            if i != j && !diag[(i, j)].is_zero() {
                return Err(Error::EigencheckFailed(format!(
                    "off-diagonal entry at ({}, {})",
                    i, j
                )));
            }
        }
    }
    Ok((0..k).map(|i| diag[(i, i)].clone()).collect())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WhichBasis {
    /// Classical monic theta-Jack.
    Jack,
    /// Fixed-point (Lehn eigen) basis.
    FixedPoint,
}

/// One Jack vector without keeping the whole degree around (CLI
/// convenience); `which` picks the normalization.
pub fn jack_vector(lambda: &Partition, which: WhichBasis) -> Result<FockVector> {
    let basis = JackBasis::build(lambda.size() as u32)?;
    Ok(match which {
        WhichBasis::Jack => basis.jack(lambda),
        WhichBasis::FixedPoint => basis.fixed_point(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::schur;
    use crate::rat;

    fn part(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn degree_one_is_p1() {
        let b = JackBasis::build(1).unwrap();
        assert_eq!(b.jack(&part(&[1])), FockVector::basis(part(&[1])));
        assert_eq!(b.fixed_point(&part(&[1])), FockVector::basis(part(&[1])));
    }

    #[test]
    fn degree_two_spectrum_is_t2_t1() {
        let b = JackBasis::build(2).unwrap();
        assert_eq!(c1_eigenvalue(&part(&[2])), rat("t2"));
        assert_eq!(c1_eigenvalue(&part(&[1, 1])), rat("t1"));
        let spec = lehn_spectrum(&b).unwrap();
        assert_eq!(spec, vec![rat("t2"), rat("t1")]);
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(c1_eigenvalue(&Partition::empty()), rat("0"));
        assert_eq!(t_eigenvalue(&Partition::empty()), rat("1"));
        assert_eq!(t_eigenvalue(&part(&[1])), rat("u/(u + t1 + t2)"));
        assert_eq!(
            t_eigenvalue(&part(&[2])),
            rat("(u*(u + t2))/((u + t1 + t2)*(u + t1 + 2*t2))")
        );
    }

    #[test]
    fn eigenvalues_respect_transposition_symmetry() {
        use std::collections::BTreeMap;
        // swap t1 <-> t2 equals conjugating the partition
        let swap = |f: &Rat| -> Rat {
            let mut b = BTreeMap::new();
            b.insert(vars::T1, Rat::var(vars::T2));
            b.insert(vars::T2, Rat::var(vars::T1));
            f.substitute(&b).unwrap()
        };
        for n in 0..=6u32 {
            for lam in partitions_of(n) {
                let conj = lam.conjugate();
                assert_eq!(swap(&c1_eigenvalue(&lam)), c1_eigenvalue(&conj));
                assert_eq!(swap(&t_eigenvalue(&lam)), t_eigenvalue(&conj));
            }
        }
    }

    #[test]
    fn jack_triangular_and_orthogonal_up_to_6() {
        for n in 0..=6u32 {
            let b = JackBasis::build(n).unwrap();
            assert!(check_triangularity(&b).unwrap(), "triangularity at {}", n);
            assert!(check_orthogonality(&b), "orthogonality at {}", n);
        }
    }

    #[test]
    fn jack_degenerates_to_schur_at_theta_one() {
        // theta = 1 means t2 = -t1; then P_lambda = s_lambda exactly
        use std::collections::BTreeMap;
        let b = JackBasis::build(3).unwrap();
        let mut bind = BTreeMap::new();
        bind.insert(vars::T2, -&Rat::var(vars::T1));
        for lam in partitions_of(3) {
            let specialized = b.jack(&lam).substitute(&bind).unwrap();
            assert_eq!(specialized, schur(&lam), "lambda = {}", lam);
        }
    }

    #[test]
    fn basis_change_round_trips() {
        for n in 0..=6u32 {
            let b = JackBasis::build(n).unwrap();
            for lam in partitions_of(n) {
                let v = FockVector::basis(lam.clone());
                let coords = b.to_jack(&v).unwrap();
                assert_eq!(b.from_jack(&coords), v, "round trip p{}", lam);
            }
            // unit vectors map to basis elements
            for (j, lam) in b.partitions.clone().into_iter().enumerate() {
                let mut e = vec![Rat::zero(); b.partitions.len()];
                e[j] = Rat::one();
                assert_eq!(b.from_jack(&e), b.fixed_point(&lam));
            }
        }
    }

    #[test]
    fn p1_power_has_full_jack_support() {
        use std::collections::BTreeMap;
        // positivity oracle at theta = 2 (t1 = -2, t2 = 1): all coordinates
        // of p1^n in the Jack basis are nonzero
        let mut bind = BTreeMap::new();
        bind.insert(vars::T1, rat("-2"));
        bind.insert(vars::T2, rat("1"));
        for n in 1..=5u32 {
            let b = JackBasis::build(n).unwrap();
            let v = FockVector::basis(Partition::new(vec![1; n as usize]));
            let coords = b.to_jack(&v).unwrap();
            for (c, lam) in coords.iter().zip(&b.partitions) {
                assert!(!c.is_zero(), "coordinate of {} vanishes", lam);
                let num = c.substitute(&bind).unwrap();
                assert!(!num.is_zero(), "specialized coordinate of {} vanishes", lam);
            }
        }
    }

    #[test]
    fn cache_round_trip_and_validation() {
        let dir = std::env::temp_dir().join(format!("jack-cache-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let a = jack_basis_cached(3, Some(&dir)).unwrap();
        let b = jack_basis_cached(3, Some(&dir)).unwrap();
        assert_eq!(a.fixed_p.col(0), b.fixed_p.col(0));
        // corrupt the cache: a reread must fall back to rebuilding
        let path = std::fs::read_dir(&dir)
            .unwrap()
            .next()
            .unwrap()
            .unwrap()
            .path();
        std::fs::write(&path, "{\"broken\": true}").unwrap();
        let c = jack_basis_cached(3, Some(&dir)).unwrap();
        assert_eq!(a.fixed_p.col(1), c.fixed_p.col(1));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn simultaneous_diagonalization_up_to_7() {
        for n in 0..=7u32 {
            let b = JackBasis::build(n).unwrap();
            let spec = lehn_spectrum(&b).unwrap();
            let mut expect: Vec<Rat> = b.partitions.iter().map(c1_eigenvalue).collect();
            let mut got = spec.clone();
            assert_eq!(got.len(), expect.len());
            // each eigenvalue appears exactly once (multiset equality)
            let key = |r: &Rat| format!("{}", r);
            got.sort_by_key(key);
            expect.sort_by_key(key);
            assert_eq!(got, expect, "degree {}", n);
        }
    }
}
