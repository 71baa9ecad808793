//! Random instance generation, brute-force oracles and the self-test driver.
//!
//! Every generator is a pure function of its parameters and a `u64` seed.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::commutant::{assemble, commutant_basis, h_pattern};
use crate::decomposition::weyr_decomposition;
use crate::field::{FieldDescriptor, Scalar};
use crate::matrix::Matrix;
use crate::normal_form::{reduce_pair, verify_normal_form, CommutingPair};
use crate::structure::{
    build_weyr_matrix, jordan_matrix, jordan_to_weyr_permutation, permutation_matrix, weyr_characteristic,
    SegreStructure,
};

pub type Seed = u64;

pub fn rng(seed: Seed) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random structure with total dimension in `1..=max_dim`.
pub fn random_segre(max_dim: usize, seed: Seed) -> SegreStructure {
    let max_dim = max_dim.max(1);
    let mut rng = rng(seed);
    let mut left = rng.gen_range(1..=max_dim);
    let mut sizes = Vec::new();
    while left > 0 {
        let s = rng.gen_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    SegreStructure::from_block_sizes(&sizes).expect("positive block sizes")
}

fn random_scalar(rng: &mut ChaCha8Rng, field: FieldDescriptor, spread: i64) -> Scalar {
    match field {
        FieldDescriptor::Rational => field.from_i64(rng.gen_range(-spread..=spread)),
        FieldDescriptor::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
    }
}

/// Random pair in normal form: `W` is the Weyr matrix of `j`, `B_{11} = J_{r_1}(0)`
/// and the stair values of every `B_{1,beta}` are uniform (zero included).
pub fn random_normal_pair(j: &SegreStructure, field: FieldDescriptor, seed: Seed) -> (Matrix, Matrix) {
    let mut rng = rng(seed);
    let pattern = h_pattern(j);
    let weyr = pattern.weyr().clone();
    let w = build_weyr_matrix(&weyr, field);
    let r1 = weyr.r()[0];
    let mut leading = vec![Matrix::jordan_block(field, r1)];
    for beta in 2..=weyr.k() {
        let mut x = Matrix::zeros(field, r1, weyr.r()[beta - 1]);
        for &(a, c) in pattern.stair_set(beta) {
            x.set(a, c, random_scalar(&mut rng, field, 3));
        }
        leading.push(x);
    }
    let refs: Vec<Option<&Matrix>> = leading.iter().map(Some).collect();
    let b = assemble(&pattern, field, &refs).expect("stair-supported blocks fit the pattern");
    (w, b)
}

/// `L U P` with unit triangular `L`, `U` and a random permutation `P`.
pub fn random_invertible(n: usize, field: FieldDescriptor, seed: Seed) -> Matrix {
    let mut rng = rng(seed);
    let mut l = Matrix::identity(field, n);
    let mut u = Matrix::identity(field, n);
    for i in 0..n {
        for j in 0..i {
            l.set(i, j, random_scalar(&mut rng, field, 2));
            u.set(j, i, random_scalar(&mut rng, field, 2));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let p = permutation_matrix(&perm, field);
    l.mat_mul(&u).and_then(|lu| lu.mat_mul(&p)).expect("square factors")
}

/// A normal pair `(W, B)` together with its conjugate by a random invertible.
#[derive(Clone, Debug)]
pub struct Instance {
    pub w: Matrix,
    pub b: Matrix,
    pub r: Matrix,
    pub input: CommutingPair,
}

pub fn random_instance(j: &SegreStructure, field: FieldDescriptor, seed: Seed) -> Instance {
    let mut seeds = rng(seed);
    let (w, b) = random_normal_pair(j, field, seeds.next_u64());
    let r = random_invertible(w.rows(), field, seeds.next_u64());
    let normal = CommutingPair::new(w.clone(), b.clone()).expect("normal pairs commute");
    let input = normal.conjugate(&r).expect("unit triangular factors are invertible");
    Instance { w, b, r, input }
}

/// Basis of `{X : WX = XW}` from the `n^2`-variable linear system.
pub fn brute_force_commutant(w: &Matrix) -> Vec<Matrix> {
    let n = w.rows();
    intertwiner_space(&[(w, w)], n)
}

/// Basis of `{X : A X = X A'}` for every `(A, A')` in `pairs`.
fn intertwiner_space(pairs: &[(&Matrix, &Matrix)], n: usize) -> Vec<Matrix> {
    let field = pairs[0].0.field();
    let var = |a: usize, b: usize| a * n + b;
    let mut rows = Vec::with_capacity(pairs.len() * n * n);
    for (a, a2) in pairs {
        for i in 0..n {
            for j in 0..n {
                // (A X - X A')_{ij} = sum_k A_ik X_kj - X_ik A'_kj
                let mut row = vec![field.zero(); n * n];
                for k in 0..n {
                    let x = a.get(i, k);
                    if !x.is_zero() {
                        row[var(k, j)] = &row[var(k, j)] + x;
                    }
                    let y = a2.get(k, j);
                    if !y.is_zero() {
                        row[var(i, k)] = &row[var(i, k)] - y;
                    }
                }
                rows.push(row);
            }
        }
    }
    let system = Matrix::from_rows(field, rows).expect("rectangular system");
    system
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let rows = v.chunks(n).map(<[Scalar]>::to_vec).collect();
            Matrix::from_rows(field, rows).expect("square reshape")
        })
        .collect()
}

/// Equality of the spans of two families of equally shaped matrices, by rank.
pub fn spans_equal(a: &[Matrix], b: &[Matrix]) -> bool {
    let flat = |ms: &[Matrix]| -> Vec<Vec<Scalar>> { ms.iter().map(|m| m.entries().to_vec()).collect() };
    let rank = |rows: Vec<Vec<Scalar>>| -> usize {
        if rows.is_empty() {
            return 0;
        }
        let field = rows[0][0].field();
        Matrix::from_rows(field, rows).map(|m| m.rank()).unwrap_or(usize::MAX)
    };
    let (ra, rb) = (rank(flat(a)), rank(flat(b)));
    let mut both = flat(a);
    both.extend(flat(b));
    ra == rb && rank(both) == ra
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Similarity {
    Similar(Matrix),
    No,
    Inconclusive,
}

fn power_ranks(m: &Matrix) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = Matrix::identity(m.field(), m.rows());
    loop {
        let r = p.rank();
        out.push(r);
        if r == 0 || out.len() > m.rows() + 1 {
            return out;
        }
        p = p.mat_mul(m).expect("square");
    }
}

/// Searches for `S` with `S^-1 M1 S = M2` and `S^-1 N1 S = N2`.
///
/// A rank obstruction on powers gives a definite `No`. Otherwise random
/// combinations of the intertwiner space are tried; if none is invertible
/// the answer is `Inconclusive` unless the space is zero.
pub fn pairs_similar_oracle(p1: &CommutingPair, p2: &CommutingPair, trials: usize, seed: Seed) -> Similarity {
    if p1.dim() != p2.dim() || p1.field() != p2.field() {
        return Similarity::No;
    }
    let field = p1.field();
    let n = p1.dim();
    if p1 == p2 {
        return Similarity::Similar(Matrix::identity(field, n));
    }
    if power_ranks(p1.m()) != power_ranks(p2.m()) || power_ranks(p1.n()) != power_ranks(p2.n()) {
        return Similarity::No;
    }
    let space = intertwiner_space(&[(p1.m(), p2.m()), (p1.n(), p2.n())], n);
    if space.is_empty() {
        return Similarity::No;
    }
    let mut rng = rng(seed);
    for _ in 0..trials {
        let mut s = Matrix::zeros(field, n, n);
        for x in &space {
            let c = random_scalar(&mut rng, field, 5);
            s = s.add(&x.scale(&c)).expect("same shape");
        }
        if let Ok(conj) = p1.conjugate(&s) {
            if conj == *p2 {
                return Similarity::Similar(s);
            }
        }
    }
    Similarity::Inconclusive
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail {
        detail: String,
        #[serde(skip_serializing_if = "BTreeMap::is_empty")]
        matrices: BTreeMap<String, Vec<Vec<String>>>,
    },
    /// Observed behavior with no claim attached, such as two different
    /// reductions for unequal block sizes.
    Finding {
        detail: String,
        #[serde(skip_serializing_if = "BTreeMap::is_empty")]
        matrices: BTreeMap<String, Vec<Vec<String>>>,
    },
}

impl Outcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::Fail { .. })
    }

    fn fail(detail: impl Into<String>) -> Self {
        Outcome::Fail { detail: detail.into(), matrices: BTreeMap::new() }
    }
}

fn grid(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn named(items: &[(&str, &Matrix)]) -> BTreeMap<String, Vec<Vec<String>>> {
    items.iter().map(|(k, m)| (k.to_string(), grid(m))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub suite: String,
    pub structure: String,
    pub seed: Seed,
    pub field: FieldDescriptor,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub elapsed_ms: f64,
}

impl TrialReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Draws a normal pair, reduces `trials` independent conjugates of it and
/// compares every reduced `B` with the original. Mismatches fail only when
/// all blocks have one size and the field is the rationals.
pub fn uniqueness_probe(j: &SegreStructure, field: FieldDescriptor, trials: usize, seed: Seed) -> TrialReport {
    let start = Instant::now();
    let mut seeds = rng(seed);
    let (w, b) = random_normal_pair(j, field, seeds.next_u64());
    let normal = CommutingPair::new(w.clone(), b.clone()).expect("normal pairs commute");
    let asserted = j.t() == 1 && field == FieldDescriptor::Rational;

    let mut outcome = Outcome::Pass;
    for trial in 0..trials {
        let r = random_invertible(w.rows(), field, seeds.next_u64());
        let reduced = normal.conjugate(&r).and_then(|p| reduce_pair(&p));
        match reduced {
            Err(e) => {
                outcome = Outcome::Fail {
                    detail: format!("conjugate {trial}: {e}"),
                    matrices: named(&[("W", &w), ("B", &b), ("R", &r)]),
                };
                break;
            }
            Ok(res) if res.b != b => {
                let detail = format!("conjugate {trial} reduced to a different B");
                let matrices = named(&[("W", &w), ("B", &b), ("R", &r), ("B_reduced", &res.b)]);
                outcome = if asserted {
                    Outcome::Fail { detail, matrices }
                } else {
                    Outcome::Finding { detail, matrices }
                };
                break;
            }
            Ok(_) => {}
        }
    }
    TrialReport {
        suite: "uniqueness".into(),
        structure: j.to_string(),
        seed,
        field,
        outcome,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Largest dimension for the `n^2`-variable oracles.
pub const BRUTE_FORCE_CAP: usize = 12;
/// Largest dimension for which round trips also run the similarity oracle.
pub const SIMILARITY_ORACLE_CAP: usize = 8;

pub const SUITES: [&str; 4] = ["reduce", "commutant", "weyr", "uniqueness"];

fn commutant_trial(j: &SegreStructure, field: FieldDescriptor) -> Outcome {
    let pattern = h_pattern(j);
    let w = build_weyr_matrix(pattern.weyr(), field);
    let basis = match commutant_basis(&w, &pattern) {
        Ok(b) => b.basis,
        Err(e) => return Outcome::fail(e.to_string()),
    };
    let brute = brute_force_commutant(&w);
    if brute.len() != j.commutant_dimension() || basis.len() != brute.len() {
        return Outcome::fail(format!(
            "dimensions: formula {}, pattern basis {}, brute force {}",
            j.commutant_dimension(),
            basis.len(),
            brute.len()
        ));
    }
    if !spans_equal(&basis, &brute) {
        return Outcome::Fail { detail: "spans differ".into(), matrices: named(&[("W", &w)]) };
    }
    Outcome::Pass
}

fn weyr_trial(j: &SegreStructure, field: FieldDescriptor, seed: Seed) -> Outcome {
    let jm = jordan_matrix(j, field);
    let w = build_weyr_matrix(&weyr_characteristic(j), field);
    let p = permutation_matrix(&jordan_to_weyr_permutation(j), field);
    match jm.conjugate(&p) {
        Ok(x) if x == w => {}
        Ok(x) => {
            return Outcome::Fail {
                detail: "permutation does not carry J to W".into(),
                matrices: named(&[("J", &jm), ("P^-1 J P", &x), ("W", &w)]),
            }
        }
        Err(e) => return Outcome::fail(e.to_string()),
    }
    let r = random_invertible(j.dim(), field, seed);
    let m = jm.conjugate(&r).expect("invertible");
    match weyr_decomposition(&m) {
        Ok(d) if d.w == w && m.conjugate(&d.s).as_ref() == Ok(&w) => Outcome::Pass,
        Ok(d) => Outcome::Fail {
            detail: "decomposition of a conjugate does not recover W".into(),
            matrices: named(&[("M", &m), ("W", &d.w), ("S", &d.s)]),
        },
        Err(e) => Outcome::fail(e.to_string()),
    }
}

fn reduce_trial(j: &SegreStructure, field: FieldDescriptor, seed: Seed, inject_fault: bool) -> Outcome {
    let inst = random_instance(j, field, seed);
    let res = match reduce_pair(&inst.input) {
        Ok(r) => r,
        Err(e) => {
            return Outcome::Fail {
                detail: e.to_string(),
                matrices: named(&[("M", inst.input.m()), ("N", inst.input.n())]),
            }
        }
    };
    let mut b = res.b.clone();
    if inject_fault {
        let x = b.get(0, 0) + &field.one();
        b.set(0, 0, x);
    }
    let report = verify_normal_form(&res.w, &b);
    let inv = res.s.invert();
    let similar = inv
        .and_then(|i| Ok(i.mat_mul(inst.input.m())?.mat_mul(&res.s)? == res.w && i.mat_mul(inst.input.n())?.mat_mul(&res.s)? == b))
        .unwrap_or(false);
    if !report.passed() || !similar {
        let mut detail = report.failures().join("; ");
        if !similar {
            detail.push_str(if detail.is_empty() { "witness" } else { "; witness" });
            detail.push_str(" does not conjugate the input");
        }
        return Outcome::Fail {
            detail,
            matrices: named(&[("M", inst.input.m()), ("N", inst.input.n()), ("W", &res.w), ("B", &b), ("S", &res.s)]),
        };
    }
    if j.dim() <= SIMILARITY_ORACLE_CAP {
        let out = CommutingPair::new(res.w.clone(), b.clone()).expect("verified pair commutes");
        if !matches!(pairs_similar_oracle(&inst.input, &out, 20, seed), Similarity::Similar(_)) {
            return Outcome::fail("similarity oracle found no witness");
        }
    }
    Outcome::Pass
}

/// Runs `trials` trials cycling through [`SUITES`]. Trial seeds are drawn
/// from `seed`; reports come back in trial order. With `inject_fault` the
/// reduced `B` is perturbed before it is checked.
pub fn run_selftest(
    max_dim: usize,
    trials: usize,
    seed: Seed,
    field: FieldDescriptor,
    inject_fault: bool,
) -> Vec<TrialReport> {
    let mut master = rng(seed);
    let seeds: Vec<Seed> = (0..trials).map(|_| master.next_u64()).collect();
    seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let suite = SUITES[i % SUITES.len()];
            let cap = if suite == "commutant" { max_dim.min(BRUTE_FORCE_CAP) } else { max_dim };
            let j = random_segre(cap, s);
            let start = Instant::now();
            let outcome = match suite {
                "reduce" => reduce_trial(&j, field, s, inject_fault),
                "commutant" => commutant_trial(&j, field),
                "weyr" => weyr_trial(&j, field, s),
                _ => return uniqueness_probe(&j, field, 2, s),
            };
            TrialReport {
                suite: suite.into(),
                structure: j.to_string(),
                seed: s,
                field,
                outcome,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::common_kernel_dimension;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    #[test]
    fn segre_draws() {
        assert_eq!(random_segre(1, 9).parts(), &[(1, 1)]);
        assert_eq!(random_segre(12, 4), random_segre(12, 4));
        for s in 0..1000 {
            let j = random_segre(12, s);
            assert!(j.dim() >= 1 && j.dim() <= 12);
            assert!(SegreStructure::new(j.parts().to_vec()).is_ok());
        }
    }

    #[test]
    fn invertible_draws() {
        assert!(!random_invertible(1, Q, 0).get(0, 0).is_zero());
        for s in 0..200 {
            let r = random_invertible(5, Q, s);
            assert!(r.invert().is_ok());
            assert!(r.entries().iter().all(|x| x.as_rational().unwrap().is_integer()));
        }
    }

    #[test]
    fn normal_pairs_verify() {
        for s in 0..100 {
            let j = random_segre(9, s);
            let (w, b) = random_normal_pair(&j, Q, s);
            let rep = verify_normal_form(&w, &b);
            assert!(rep.passed(), "{j}: {:?}", rep.failures());
            let p = CommutingPair::new(w, b).unwrap();
            assert_eq!(common_kernel_dimension(&p), 1);
        }
    }

    #[test]
    fn brute_force_small() {
        assert_eq!(brute_force_commutant(&Matrix::zeros(Q, 2, 2)).len(), 4);
        assert_eq!(brute_force_commutant(&Matrix::jordan_block(Q, 3)).len(), 3);
    }

    #[test]
    fn similarity_oracle() {
        let j = SegreStructure::new(vec![(2, 1), (1, 1)]).unwrap();
        let inst = random_instance(&j, Q, 3);
        let normal = CommutingPair::new(inst.w.clone(), inst.b.clone()).unwrap();
        assert_eq!(pairs_similar_oracle(&normal, &normal, 5, 0), Similarity::Similar(Matrix::identity(Q, 3)));
        match pairs_similar_oracle(&normal, &inst.input, 20, 1) {
            Similarity::Similar(s) => assert_eq!(normal.conjugate(&s).unwrap(), inst.input),
            other => panic!("{other:?}"),
        }
        let j3 = Matrix::jordan_block(Q, 3);
        let a = CommutingPair::new(j3.clone(), Matrix::zeros(Q, 3, 3)).unwrap();
        assert_eq!(pairs_similar_oracle(&a, &normal, 20, 1), Similarity::No);
    }

    #[test]
    fn selftest_runs_and_replays() {
        assert!(run_selftest(6, 0, 1, Q, false).is_empty());
        let a = run_selftest(6, 8, 11, Q, false);
        assert!(a.iter().all(|r| !r.outcome.is_failure()), "{:?}", a);
        let b = run_selftest(6, 8, 11, Q, false);
        let strip = |v: &[TrialReport]| v.iter().map(|r| (r.structure.clone(), r.seed, r.outcome.clone())).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        assert!(run_selftest(6, 1, 11, Q, true)[0].outcome.is_failure());
    }
}
