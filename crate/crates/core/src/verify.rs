//! The acceptance checks: one named check per criterion, shared between the
//! integration test suite and the command line `verify-all`.
//!
//! Every check is exact; residuals are either the zero string or a
//! description of the first failing entry. A check may pass with findings
//! (documented discrepancies against the printed source formulas); the
//! experimental product-formula check is specified to report its outcome as
//! a finding rather than fail.

use crate::error::Result;
use crate::fermion::{bf_map, boson_on_fermions, schur, FermionVector, WedgeState};
use crate::fock::{
    apply_boson_word, cut_expr, energy_expr, exprs_agree, lehn_expr, operator_matrix, FockVector,
};
use crate::instanton::{
    check_contour_identities, commutes_with_alpha_plus, h_matrix, product_experiment,
    r1_expr, r2_expr, recover_chern, ProductOptions,
};
use crate::jack::{c1_eigenvalue, jack_basis_cached};
use crate::partition::{aut_factor, partitions_of};
use crate::ring::vars;
use crate::rmat::{
    extract_xi_coefficients, fundamental_r_at, fusion_factor_order, fusion_r, permutation_op,
    r_from_stabs, root_block, stab_restriction, wedge_r, wedge_r_coefficient, xi_invariant,
    ybe_check, Chamber, TensorOp,
};
use crate::{rat, Mat, Rat};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum Status {
    Pass,
    PassWithFinding,
    Fail,
}

#[derive(Debug, serde::Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub summary: &'static str,
    pub status: Status,
    pub residual: String,
    pub findings: Vec<String>,
    pub runtime_ms: u128,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Cap on the degree loops; the spec bounds (6 or 7 per criterion) are
    /// used when this allows them.
    pub max_degree: u32,
    pub cache_dir: Option<PathBuf>,
    /// Wall range for the experimental product check.
    pub product_walls: i64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_degree: 6,
            cache_dir: None,
            product_walls: 3,
        }
    }
}

pub const CHECK_NAMES: [&str; 10] = [
    "c01-stab-tp1",
    "c02-ybe",
    "c03-fusion-stability",
    "c04-xi-calculus",
    "c05-jack-lehn-spectrum",
    "c06-boson-fermion",
    "c07-hn-recovery",
    "c08-commutativity",
    "c09-doubling-contour",
    "c10-product-formula",
];

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckResult> {
    // checks are independent; results are assembled in the fixed order
    CHECK_NAMES
        .iter()
        .map(|name| run_check(name, cfg).expect("known check name"))
        .collect()
}

pub fn run_check(name: &str, cfg: &VerifyConfig) -> Option<CheckResult> {
    let start = std::time::Instant::now();
    let outcome = match name {
        "c01-stab-tp1" => c01_stab_tp1(),
        "c02-ybe" => c02_ybe(),
        "c03-fusion-stability" => c03_fusion(),
        "c04-xi-calculus" => c04_xi(),
        "c05-jack-lehn-spectrum" => c05_jack_lehn(cfg),
        "c06-boson-fermion" => c06_boson_fermion(cfg),
        "c07-hn-recovery" => c07_recovery(cfg),
        "c08-commutativity" => c08_commutativity(cfg),
        "c09-doubling-contour" => c09_doubling(cfg),
        "c10-product-formula" => c10_product(cfg),
        _ => return None,
    };
    let (summary, body) = outcome;
    let mut result = match body {
        Ok((status, residual, findings)) => CheckResult {
            name: CHECK_NAMES.iter().find(|n| **n == name)?,
            summary,
            status,
            residual,
            findings,
            runtime_ms: 0,
        },
        Err(e) => CheckResult {
            name: CHECK_NAMES.iter().find(|n| **n == name)?,
            summary,
            status: Status::Fail,
            residual: format!("error: {}", e),
            findings: vec![],
            runtime_ms: 0,
        },
    };
    result.runtime_ms = start.elapsed().as_millis();
    Some(result)
}

type Outcome = (
    &'static str,
    Result<(Status, String, Vec<String>)>,
);

fn pass() -> Result<(Status, String, Vec<String>)> {
    Ok((Status::Pass, "0".into(), vec![]))
}

fn pass_with(findings: Vec<String>) -> Result<(Status, String, Vec<String>)> {
    Ok((Status::PassWithFinding, "0".into(), findings))
}

fn fail(residual: String) -> Result<(Status, String, Vec<String>)> {
    Ok((Status::Fail, residual, vec![]))
}

// criterion 1: T*P1 stable envelopes and the R-matrix they generate
fn c01_stab_tp1() -> Outcome {
    let run = || -> Result<(Status, String, Vec<String>)> {
        let s = stab_restriction(1, Chamber::Fundamental)?;
        let u = stab_restriction(1, Chamber::Opposite)?;
        let expect_s = [
            [rat("u2 - u1"), rat("-(t1+t2)")],
            [rat("0"), rat("u1 - u2 - t1 - t2")],
        ];
        let expect_u = [
            [rat("u2 - u1 - t1 - t2"), rat("0")],
            [rat("-(t1+t2)"), rat("u1 - u2")],
        ];
        for i in 0..2 {
            for j in 0..2 {
                if s[(i, j)] != expect_s[i][j] {
                    return fail(format!("i* Stab_fund entry ({},{}) = {}", i, j, s[(i, j)]));
                }
                if u[(i, j)] != expect_u[i][j] {
                    return fail(format!("i* Stab_opp entry ({},{}) = {}", i, j, u[(i, j)]));
                }
            }
        }
        let r = r_from_stabs(1)?;
        let a = rat("(u1-u2)/(u1-u2+t1+t2)");
        let b = rat("(t1+t2)/(u1-u2+t1+t2)");
        for (i, j, e) in [(0, 0, &a), (0, 1, &b), (1, 0, &b), (1, 1, &a)] {
            if r[(i, j)] != *e {
                return fail(format!("R entry ({},{}) = {}", i, j, r[(i, j)]));
            }
        }
        pass()
    };
    ("i*Stab matrices match the printed 2x2 matrices and R = Stab_opp^-1 Stab_fund is the stochastic R-matrix", run())
}

// criterion 2: Yang-Baxter, fundamental N = 2, 3, and the two wall-crossing
// paths for T*P^2
fn c02_ybe() -> Outcome {
    let run = || -> Result<(Status, String, Vec<String>)> {
        for n in [2usize, 3] {
            let (ok, residual) = ybe_check(&|z| fundamental_r_at(n, z), n);
            if !ok {
                return fail(format!(
                    "fundamental N={} residual has {} nonzero entries",
                    n,
                    residual.num_entries()
                ));
            }
        }
        // T*P^2: the three embedded root blocks satisfy the Fig.-1 identity
        // with fully symbolic u1, u2, u3, and both orderings equal the full
        // chamber-to-chamber R-matrix
        let b01 = root_block(2, 0, 1);
        let b02 = root_block(2, 0, 2);
        let b12 = root_block(2, 1, 2);
        let p1 = b01.mul(&b02).mul(&b12);
        let p2 = b12.mul(&b02).mul(&b01);
        if p1 != p2 {
            return fail("the two T*P^2 wall-crossing paths differ".into());
        }
        let full = r_from_stabs(2)?;
        if full != p1 {
            return fail("Stab_opp^-1 Stab_fund does not factor into root matrices".into());
        }
        pass()
    };
    ("fundamental R satisfies YBE symbolically for N = 2, 3; the T*P^2 root blocks satisfy the two-path identity and factor the full R-matrix", run())
}

// criterion 3: fusion vs the stable closed form
fn c03_fusion() -> Outcome {
    let run = || -> Result<(Status, String, Vec<String>)> {
        let mut findings = Vec::new();
        // the printed factor ordering for (2, 3)
        let expect = vec![(1, 5, 3), (1, 4, 2), (1, 3, 1), (2, 5, 2), (2, 4, 1), (2, 3, 0)];
        if fusion_factor_order(2, 3) != expect {
            return fail("fusion factor ordering for (2,3) is wrong".into());
        }
        for (n, n1, n2) in [(3usize, 1usize, 2usize), (4, 2, 2), (5, 2, 3)] {
            let f = fusion_r(n, n1, n2, 4096)?;
            if !f.wedge_invariant {
                return fail(format!("({},{},{}): wedge subspace not invariant", n, n1, n2));
            }
            if f.normalized != wedge_r(n, n1, n2) {
                return fail(format!(
                    "({},{},{}): normalized fusion differs from the closed form",
                    n, n1, n2
                ));
            }
            if f.shift != 0 || !f.scalar.is_one() {
                findings.push(format!(
                    "({},{},{}): the bare product carries the scalar {} and the spectral \
                     offset {} hbar relative to the closed form (the projector sandwich \
                     drops the unit normalization)",
                    n, n1, n2, f.scalar, f.shift
                ));
            }
            // Xi-coefficient extraction where the nonvanishing invariants
            // stop at min(n1, n2) and are independent; otherwise the higher
            // Xi_k collapse into the lower ones and the printed coefficients
            // are certified through the closed-form identity instead
            let kmax = n1.min(n2);
            let mut extra_nonzero = false;
            let mut kk = kmax + 1;
            while !xi_invariant(n, n1, n2, kk).is_zero() {
                extra_nonzero = true;
                kk += 1;
            }
            if !extra_nonzero {
                let (coeffs, exact) = extract_xi_coefficients(n, n1, n2, kmax, &f.normalized)?;
                if !exact {
                    return fail(format!(
                        "({},{},{}): restriction is not a combination of the Xi_k",
                        n, n1, n2
                    ));
                }
                let u = Rat::var(vars::U);
                for (k, c) in coeffs.iter().enumerate() {
                    if *c != wedge_r_coefficient(k, &u) {
                        return fail(format!(
                            "({},{},{}): extracted Xi_{} coefficient is {}",
                            n, n1, n2, k, c
                        ));
                    }
                }
            } else {
                findings.push(format!(
                    "({},{},{}): Xi_k beyond min(n1,n2) are nonzero but linearly dependent \
                     (they collapse into lower invariants), so the printed coefficients are \
                     certified through the exact closed-form identity rather than unique \
                     extraction",
                    n, n1, n2
                ));
            }
        }
        if findings.is_empty() {
            pass()
        } else {
            pass_with(findings)
        }
    };
    ("fusion restricted to the wedge pair equals the closed form for (3,1,2), (4,2,2), (5,2,3); factor order matches the worked (2,3) product; Xi coefficients are the printed stable ones", run())
}

// criterion 4: the Xi calculus
fn c04_xi() -> Outcome {
    let run = || -> Result<(Status, String, Vec<String>)> {
        for n in [2usize, 3, 4] {
            let xi1 = xi_invariant(n, 1, 1, 1);
            let expect = TensorOp::identity(vec![n, n]).sub(&permutation_op(n));
            if xi1 != expect {
                return fail(format!("Xi_1 != Id - P at N = {}", n));
            }
        }
        for (n, n1, n2) in [(2usize, 1usize, 1usize), (3, 1, 1), (4, 2, 2)] {
            let m = n1.min(n2) + 1;
            if !xi_invariant(n, n1, n2, m).is_zero() {
                return fail(format!("Xi_{} nonzero on ({},{},{})", m, n, n1, n2));
            }
        }
        // the asymmetric counterexample is a documented finding
        let xi2 = xi_invariant(3, 1, 2, 2);
        let collapsed = xi_invariant(3, 1, 2, 0)
            .scale(&Rat::int(-4))
            .add(&xi_invariant(3, 1, 2, 1).scale(&Rat::int(4)));
        if xi2.is_zero() || xi2 != collapsed {
            return fail("unexpected Xi_2 behavior on (3,1,2)".into());
        }
        pass_with(vec![
            "the literal composition Xi_m = Omega^m (Omega*)^m vanishes for m > n2 or \
             n1 + m > N, not for m > min(n1,n2): on (3,1,2), Xi_2 = -4 Xi_0 + 4 Xi_1 != 0 \
             (it collapses into lower invariants, and the closed-form R-matrix needs it)"
                .to_string(),
        ])
    };
    ("Xi_0 = 1, Xi_1 = Id - P exactly; Xi_m = 0 beyond the smaller wedge degree through (4,2,2); asymmetric vanishing bound documented", run())
}

// criterion 5: Jack/Lehn spectrum and the non-equivariant limit
fn c05_jack_lehn(cfg: &VerifyConfig) -> Outcome {
    let dmax = cfg.max_degree.min(6);
    let run = || -> Result<(Status, String, Vec<String>)> {
        for d in 0..=dmax {
            let basis = jack_basis_cached(d, cfg.cache_dir.as_deref())?;
            // eigencheck runs inside the constructor; verify the spectrum
            // has every closed-form eigenvalue exactly once
            let spectrum = crate::jack::lehn_spectrum(&basis)?;
            let mut expected: Vec<String> = basis
                .partitions
                .iter()
                .map(|l| c1_eigenvalue(l).to_string())
                .collect();
            let mut got: Vec<String> = spectrum.iter().map(|x| x.to_string()).collect();
            expected.sort();
            got.sort();
            if expected != got {
                return fail(format!("spectrum mismatch at degree {}", d));
            }
        }
        // t1 = t2 = 0 recovers the non-equivariant cut operator
        let mut bind = BTreeMap::new();
        bind.insert(vars::T1, Rat::zero());
        bind.insert(vars::T2, Rat::zero());
        for d in 0..=dmax {
            let (lehn, _) = operator_matrix(&lehn_expr(), d)?;
            let (cut, _) = operator_matrix(&cut_expr(), d)?;
            if lehn.substitute(&bind)? != cut {
                return fail(format!("t = 0 limit differs at degree {}", d));
            }
        }
        pass()
    };
    ("the cut-and-join operator has j_lambda as exact eigenvectors with eigenvalue sum (i-1)t1 + (j-1)t2 for |lambda| <= 6, and degenerates to the plain cut operator at t1 = t2 = 0", run())
}

// criterion 6: boson-fermion correspondence
fn c06_boson_fermion(cfg: &VerifyConfig) -> Outcome {
    let emax = cfg.max_degree.min(7).max(4);
    let run = || -> Result<(Status, String, Vec<String>)> {
        for d in 0..=emax {
            for lam in partitions_of(d) {
                let v = FermionVector::basis(WedgeState::new(0, lam));
                let bv = bf_map(&v)?;
                for n in [-5i64, -4, -3, -2, -1, 1, 2, 3, 4, 5] {
                    let lhs = bf_map(&boson_on_fermions(n, &v)?)?;
                    let rhs = apply_boson_word(&[n], &bv)?;
                    if lhs != rhs {
                        return fail(format!("intertwining fails at n = {}", n));
                    }
                }
            }
        }
        // Schur images: creating p_lambda fermionically lands on the same
        // symmetric function, and the Schur basis is orthonormal under the
        // z_lambda pairing (cross-check of the combinatorial factor)
        for d in 0..=emax.min(6) {
            for lam in partitions_of(d) {
                let mut v = FermionVector::vacuum();
                for &p in lam.parts() {
                    v = boson_on_fermions(-(p as i64), &v)?;
                }
                if bf_map(&v)? != FockVector::basis(lam.clone()) {
                    return fail(format!("fermionic p_{} creation mismatch", lam));
                }
            }
            let parts = partitions_of(d);
            for a in &parts {
                for b in &parts {
                    let mut pairing = Rat::zero();
                    let sa = schur(a);
                    let sb = schur(b);
                    for (nu, ca) in sa.terms() {
                        let cb = sb.coeff(nu);
                        if cb.is_zero() {
                            continue;
                        }
                        let z = Rat::constant(crate::Coef::new(
                            num::BigInt::from(aut_factor(nu)),
                            num::BigInt::from(1u8),
                        ));
                        pairing = &pairing + &(&(ca * &cb) * &z);
                    }
                    let expect = if a == b { Rat::one() } else { Rat::zero() };
                    if pairing != expect {
                        return fail(format!("<s_{}, s_{}> = {}", a, b, pairing));
                    }
                }
            }
        }
        pass()
    };
    ("bf_map intertwines the fermionic and bosonic Heisenberg actions for |n| <= 5 on energy <= 7; Schur images match Jacobi-Trudi and are orthonormal", run())
}

// criterion 7: H_n recovery of rank and c1
fn c07_recovery(cfg: &VerifyConfig) -> Outcome {
    let dmax = cfg.max_degree.min(6).max(4);
    let run = || -> Result<(Status, String, Vec<String>)> {
        let rec = recover_chern(dmax)?;
        if !exprs_agree(&rec.rank, &energy_expr(), dmax) {
            return fail("rank != sum a_{-n} a_n".into());
        }
        if !exprs_agree(&rec.c1, &lehn_expr(), dmax) {
            return fail("c1 != the cut-and-join formula".into());
        }
        pass_with(rec.findings)
    };
    ("the T(u) series reproduces rank = sum a_{-n}a_n and c1 as the cut-and-join formula, coefficient for coefficient; the printed sign discrepancy for H_1 is resolved by the series oracle", run())
}

// criterion 8: commutativity of the H_n
fn c08_commutativity(cfg: &VerifyConfig) -> Outcome {
    let dmax = cfg.max_degree.min(6);
    let run = || -> Result<(Status, String, Vec<String>)> {
        for d in 0..=dmax {
            let basis = jack_basis_cached(d, cfg.cache_dir.as_deref())?;
            let hs: Vec<Mat> = (1..=3usize)
                .map(|n| h_matrix(n, &basis))
                .collect::<Result<_>>()?;
            for a in 0..hs.len() {
                for b in a + 1..hs.len() {
                    if hs[a].mul(&hs[b]) != hs[b].mul(&hs[a]) {
                        return fail(format!(
                            "[H_{}, H_{}] != 0 at degree {}",
                            a + 1,
                            b + 1,
                            d
                        ));
                    }
                }
            }
        }
        pass()
    };
    ("[H_n, H_m] = 0 exactly for n, m <= 3 on degrees <= 6", run())
}

// criterion 9: doubling and the contour identities
fn c09_doubling(cfg: &VerifyConfig) -> Outcome {
    let dmax = cfg.max_degree.min(5).max(3);
    let run = || -> Result<(Status, String, Vec<String>)> {
        let r1 = r1_expr();
        let r2 = r2_expr();
        for d in 0..=dmax.min(4) {
            let (h1, _) = operator_matrix(&crate::instanton::h1_expr(), d)?;
            let (h2, _) = operator_matrix(&crate::instanton::h2_expr(), d)?;
            if r1.vacuum_block(d) != h1 {
                return fail(format!("vacuum block of R_1 differs at degree {}", d));
            }
            if r2.vacuum_block(d) != h2 {
                return fail(format!("vacuum block of R_2 differs at degree {}", d));
            }
        }
        for k in 1..=4i64 {
            if !commutes_with_alpha_plus(&r1, k, dmax) || !commutes_with_alpha_plus(&r1, -k, dmax)
            {
                return fail(format!("[R_1, a+_{}] != 0", k));
            }
            if !commutes_with_alpha_plus(&r2, k, dmax) || !commutes_with_alpha_plus(&r2, -k, dmax)
            {
                return fail(format!("[R_2, a+_{}] != 0", k));
            }
        }
        let contour = check_contour_identities(dmax.min(4));
        if !contour.r1_identity || !contour.r2_identity {
            return fail("a contour identity fails with the resolved scaling".into());
        }
        let mut findings = vec![
            "contour identities hold with the resolved field scaling a_{-n} = -t1 t2 a-_{-n}: \
             R_1 = hbar/(2 t1 t2) contour(A^2), R_2 = hbar/(6 t1 t2) contour(A^3) + R_1^2/2"
                .to_string(),
        ];
        if contour.printed_constants_fail {
            findings.push(
                "the printed constants (-hbar/(t1 t2) and hbar/(2 t1^2 t2^2) with creation \
                 scaling -1/(t1 t2)) fail as exact identities; no constants fit the printed \
                 scaling, whose cubic pattern forces the creation/annihilation ratio -t1 t2"
                    .to_string(),
            );
        }
        pass_with(findings)
    };
    ("R_1, R_2 from the alpha -> alpha^- substitution have vacuum blocks H_1, H_2, commute with every a+_k, and satisfy the contour-integral identities under the documented scaling resolution", run())
}

// criterion 10: the experimental truncated product
fn c10_product(cfg: &VerifyConfig) -> Outcome {
    let run = || -> Result<(Status, String, Vec<String>)> {
        let mut findings = Vec::new();
        let raw = product_experiment(
            2,
            cfg.product_walls,
            ProductOptions {
                descending: true,
                normalize_vacuum: false,
            },
        )?;
        if !raw.stabilized {
            findings.push(format!(
                "the bare printed product does not stabilize in the wall range (vacuum \
                 eigenvalue at M = {}: {})",
                cfg.product_walls, raw.vacuum_entry
            ));
        }
        let normalized = product_experiment(
            2,
            cfg.product_walls,
            ProductOptions {
                descending: true,
                normalize_vacuum: true,
            },
        )?;
        if normalized.stabilized {
            findings.push(format!(
                "with each wall factor divided by its doubled-vacuum entry the product \
                 stabilizes exactly (wall ranges {} and {} agree on all degree <= 2 blocks)",
                cfg.product_walls - 1,
                cfg.product_walls
            ));
        }
        if normalized.matches_r1 {
            findings.push(
                "the u^-1 coefficient of the normalized product equals the doubled H_1 \
                 exactly, independently confirming its sign"
                    .to_string(),
            );
        }
        findings.extend(normalized.notes.iter().cloned());
        if !normalized.stabilized || !normalized.matches_r1 {
            return fail(format!(
                "normalized product: stabilized = {}, matches R_1 = {}",
                normalized.stabilized, normalized.matches_r1
            ));
        }
        pass_with(findings)
    };
    ("truncated product over walls: stabilization measured, u^-1 block matches the doubled H_1; the u^-2 obstruction is reported as the documented finding", run())
}

/// Render the fixed-order text report; deterministic, no timings.
pub fn text_report(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::PassWithFinding => "PASS (finding)",
            Status::Fail => "FAIL",
        };
        out.push_str(&format!("{:<24} {}\n", r.name, status));
        if r.status == Status::Fail {
            out.push_str(&format!("    residual: {}\n", r.residual));
        }
        for f in &r.findings {
            out.push_str(&format!("    finding: {}\n", f));
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    out.push_str(&format!(
        "{} of {} checks passed\n",
        results.len() - failed,
        results.len()
    ));
    out
}
