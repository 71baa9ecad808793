//! Segre and Weyr characteristics, Weyr matrices, and the Jordan-to-Weyr
//! strip permutation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::matrix::Matrix;

/// Jordan data of a nilpotent matrix: distinct block sizes `k_1 > ... > k_t`
/// with multiplicities `p_i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct SegreStructure {
    parts: Vec<(usize, usize)>,
}

impl SegreStructure {
    pub fn new(parts: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(k, p)) in parts.iter().enumerate() {
            if k == 0 || p == 0 {
                return Err(Error::InvalidStructure(format!("part ({k},{p}) must have k >= 1 and p >= 1")));
            }
            if i > 0 && parts[i - 1].0 <= k {
                return Err(Error::InvalidStructure(format!(
                    "block sizes must be strictly decreasing, got {} then {k}",
                    parts[i - 1].0
                )));
            }
        }
        Ok(SegreStructure { parts })
    }

    /// From parallel size and multiplicity lists.
    pub fn from_lists(k: &[usize], p: &[usize]) -> Result<Self> {
        if k.len() != p.len() {
            return Err(Error::InvalidStructure(format!(
                "{} block sizes but {} multiplicities",
                k.len(),
                p.len()
            )));
        }
        Self::new(k.iter().copied().zip(p.iter().copied()).collect())
    }

    /// From an unordered multiset of Jordan block sizes.
    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self> {
        let mut sorted = sizes.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut parts: Vec<(usize, usize)> = Vec::new();
        for s in sorted {
            match parts.last_mut() {
                Some((k, p)) if *k == s => *p += 1,
                _ => parts.push((s, 1)),
            }
        }
        Self::new(parts)
    }

    pub fn parts(&self) -> &[(usize, usize)] {
        &self.parts
    }

    /// Number of distinct block sizes.
    pub fn t(&self) -> usize {
        self.parts.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|&(k, _)| k).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.parts.iter().map(|&(_, p)| p).collect()
    }

    /// Largest block size, i.e. the nilpotency index.
    pub fn largest(&self) -> usize {
        self.parts.first().map_or(0, |&(k, _)| k)
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(|&(k, p)| k * p).sum()
    }

    /// Block sizes with multiplicity, largest first.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.parts.iter().flat_map(|&(k, p)| std::iter::repeat_n(k, p)).collect()
    }

    /// Dimension of the commutant: `sum_{i,j} p_i p_j min(k_i, k_j)`.
    pub fn commutant_dimension(&self) -> usize {
        let mut d = 0;
        for &(ki, pi) in &self.parts {
            for &(kj, pj) in &self.parts {
                d += pi * pj * ki.min(kj);
            }
        }
        d
    }
}

impl TryFrom<Vec<(usize, usize)>> for SegreStructure {
    type Error = Error;

    fn try_from(parts: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<SegreStructure> for Vec<(usize, usize)> {
    fn from(s: SegreStructure) -> Self {
        s.parts
    }
}

impl fmt::Display for SegreStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|(k, p)| format!("({k},{p})")).collect();
        write!(f, "{}", parts.join(""))
    }
}

/// Weyr characteristic `r_1 >= ... >= r_k >= 1` of a nilpotent matrix, with
/// the derived sequence `m_i` = number of distinct block sizes `>= i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeyrStructure {
    r: Vec<usize>,
    m: Vec<usize>,
    segre: SegreStructure,
}

impl WeyrStructure {
    /// Builds the structure from a Weyr characteristic.
    pub fn from_characteristic(r: Vec<usize>) -> Result<Self> {
        if r.contains(&0) {
            return Err(Error::InvalidStructure("Weyr characteristic entries must be positive".into()));
        }
        if r.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidStructure(format!("Weyr characteristic {r:?} is not nonincreasing")));
        }
        // blocks of size exactly s: r_s - r_{s+1}
        let mut parts = Vec::new();
        for s in (1..=r.len()).rev() {
            let next = r.get(s).copied().unwrap_or(0);
            let count = r[s - 1] - next;
            if count > 0 {
                parts.push((s, count));
            }
        }
        Ok(weyr_characteristic(&SegreStructure::new(parts)?))
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn segre(&self) -> &SegreStructure {
        &self.segre
    }

    /// Number of strips, `k = k_1`.
    pub fn k(&self) -> usize {
        self.r.len()
    }

    pub fn dim(&self) -> usize {
        self.r.iter().sum()
    }

    /// Offset of each strip in the Weyr basis, plus the total dimension.
    pub fn strip_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.r.len() + 1);
        let mut acc = 0;
        offs.push(0);
        for &x in &self.r {
            acc += x;
            offs.push(acc);
        }
        offs
    }

    /// Group index of row `a` inside any strip: strips list their Jordan
    /// blocks largest first, in runs of `p_1, p_2, ...`.
    pub fn group_of(&self, a: usize) -> usize {
        let mut acc = 0;
        for (g, &(_, p)) in self.segre.parts().iter().enumerate() {
            acc += p;
            if a < acc {
                return g;
            }
        }
        panic!("row {a} beyond strip width {acc}");
    }
}

/// `r_i` = number of blocks of size `>= i`; `m_i` = number of distinct such sizes.
pub fn weyr_characteristic(j: &SegreStructure) -> WeyrStructure {
    let k = j.largest();
    let r = (1..=k).map(|i| j.parts().iter().filter(|&&(ks, _)| ks >= i).map(|&(_, p)| p).sum()).collect();
    let m = (1..=k).map(|i| j.parts().iter().filter(|&&(ks, _)| ks >= i).count()).collect();
    WeyrStructure { r, m, segre: j.clone() }
}

/// The nilpotent Weyr matrix: zero diagonal blocks `0_{r_i}` and
/// superdiagonal blocks `[I; 0]` of shape `r_i x r_{i+1}`.
pub fn build_weyr_matrix(w: &WeyrStructure, field: FieldDescriptor) -> Matrix {
    let offs = w.strip_offsets();
    let mut out = Matrix::zeros(field, w.dim(), w.dim());
    for i in 0..w.k().saturating_sub(1) {
        for b in 0..w.r[i + 1] {
            out.set(offs[i] + b, offs[i + 1] + b, field.one());
        }
    }
    out
}

/// The Jordan matrix `J_{k_1}(0)^{p_1} + ... + J_{k_t}(0)^{p_t}`.
pub fn jordan_matrix(j: &SegreStructure, field: FieldDescriptor) -> Matrix {
    let blocks: Vec<Matrix> = j.block_sizes().into_iter().map(|k| Matrix::jordan_block(field, k)).collect();
    Matrix::direct_sum(field, &blocks)
}

/// Index map `perm[w] = jordan index` gathering the first rows of all Jordan
/// blocks, then the second rows, and so on. Conjugating the Jordan matrix by
/// [`permutation_matrix`] of this map yields the Weyr matrix.
pub fn jordan_to_weyr_permutation(j: &SegreStructure) -> Vec<usize> {
    let sizes = j.block_sizes();
    let mut starts = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in &sizes {
        starts.push(acc);
        acc += s;
    }
    let mut perm = Vec::with_capacity(acc);
    for level in 0..j.largest() {
        // blocks are sorted largest first, so those reaching this level form a prefix
        for (b, &s) in sizes.iter().enumerate().take_while(|(_, &s)| s > level) {
            debug_assert!(s > level);
            perm.push(starts[b] + level);
        }
    }
    perm
}

/// `P` with `P e_w = e_{perm[w]}`, so `(P^-1 X P)[a][b] = X[perm[a]][perm[b]]`.
pub fn permutation_matrix(perm: &[usize], field: FieldDescriptor) -> Matrix {
    let n = perm.len();
    let mut p = Matrix::zeros(field, n, n);
    for (w, &src) in perm.iter().enumerate() {
        p.set(src, w, field.one());
    }
    p
}

/// Direct sum of nilpotent Weyr matrices shifted by pairwise distinct eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralWeyrStructure {
    blocks: Vec<(Scalar, WeyrStructure)>,
}

impl GeneralWeyrStructure {
    pub fn new(blocks: Vec<(Scalar, WeyrStructure)>) -> Result<Self> {
        for (i, (a, _)) in blocks.iter().enumerate() {
            if blocks[..i].iter().any(|(b, _)| b == a) {
                return Err(Error::RepeatedEigenvalue(a.to_string()));
            }
        }
        Ok(GeneralWeyrStructure { blocks })
    }

    pub fn blocks(&self) -> &[(Scalar, WeyrStructure)] {
        &self.blocks
    }
}

/// `(lambda_1 I + W_1) + ... + (lambda_l I + W_l)`.
pub fn build_general_weyr(g: &GeneralWeyrStructure, field: FieldDescriptor) -> Result<Matrix> {
    let mut parts = Vec::with_capacity(g.blocks.len());
    for (lambda, w) in &g.blocks {
        if lambda.field() != field {
            return Err(Error::FieldMismatch(lambda.field(), field));
        }
        let n = w.dim();
        let shifted = build_weyr_matrix(w, field).add(&Matrix::identity(field, n).scale(lambda))?;
        parts.push(shifted);
    }
    Ok(Matrix::direct_sum(field, &parts))
}
