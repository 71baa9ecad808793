//! Matrices commuting with a nilpotent Weyr matrix.
//!
//! A commutant element is block upper triangular in the strips of the Weyr
//! matrix. It is determined by its first superblock row `S_{1,1}, ..., S_{1,k}`:
//! superblock `S_{1+l, beta+l}` is the upper-left corner of `S_{1,beta}`. The
//! block pattern of `S_{1,beta}` is the `H_beta` grid derived from the
//! skew-symmetric matrix `K[i][j] = k_j - k_i`: block `(i, j)` is free iff
//! `K[i][j] < beta`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::matrix::Matrix;
use crate::structure::{build_weyr_matrix, weyr_characteristic, SegreStructure, WeyrStructure};

/// `K[i][j] = k_j - k_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KMatrix(pub Vec<Vec<i64>>);

impl KMatrix {
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i][j]
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn k_matrix(j: &SegreStructure) -> KMatrix {
    let k = j.sizes();
    KMatrix(k.iter().map(|&ki| k.iter().map(|&kj| kj as i64 - ki as i64).collect()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    Free,
    Zero,
}

impl Flag {
    pub fn symbol(self) -> char {
        match self {
            Flag::Free => '×',
            Flag::Zero => '0',
        }
    }
}

/// Block- and entry-level staircase masks of the first superblock row.
///
/// `beta` arguments are 1-based, matching `H_1, ..., H_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutantPattern {
    segre: SegreStructure,
    weyr: WeyrStructure,
    h_blocks: Vec<Vec<Vec<Flag>>>,
    entry_mask: Vec<Vec<Vec<bool>>>,
    stair_set: Vec<Vec<(usize, usize)>>,
}

impl CommutantPattern {
    pub fn segre(&self) -> &SegreStructure {
        &self.segre
    }

    pub fn weyr(&self) -> &WeyrStructure {
        &self.weyr
    }

    /// `H_beta`, an `m_1 x m_beta` grid.
    pub fn h_block(&self, beta: usize) -> &[Vec<Flag>] {
        &self.h_blocks[beta - 1]
    }

    /// Entry-level mask of `S_{1,beta}`, `r_1 x r_beta`.
    pub fn entry_mask(&self, beta: usize) -> &[Vec<bool>] {
        &self.entry_mask[beta - 1]
    }

    /// Stair cells of `S_{1,beta}`, in column order.
    pub fn stair_set(&self, beta: usize) -> &[(usize, usize)] {
        &self.stair_set[beta - 1]
    }

    pub fn is_stair(&self, beta: usize, a: usize, b: usize) -> bool {
        self.stair_set[beta - 1].contains(&(a, b))
    }

    pub fn allowed(&self, beta: usize, a: usize, b: usize) -> bool {
        self.entry_mask[beta - 1][a][b]
    }

    /// Number of strips `k`.
    pub fn k(&self) -> usize {
        self.weyr.k()
    }

    /// Free scalar positions over the whole first superblock row.
    pub fn free_count(&self) -> usize {
        self.entry_mask.iter().flatten().flatten().filter(|&&x| x).count()
    }

    /// Text grid of `H = [H_1 | ... | H_k]`: `×` free, `0` zero, entries
    /// separated by a space and column groups by ` | `.
    pub fn render_h_grid(&self) -> String {
        let t = self.segre.t();
        let mut lines = Vec::with_capacity(t);
        for i in 0..t {
            let groups: Vec<String> = self
                .h_blocks
                .iter()
                .map(|h| h[i].iter().map(|f| f.symbol().to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            lines.push(groups.join(" | "));
        }
        lines.join("\n")
    }
}

pub fn h_pattern(j: &SegreStructure) -> CommutantPattern {
    let weyr = weyr_characteristic(j);
    let kmat = k_matrix(j);
    let t = j.t();
    let r1 = weyr.r().first().copied().unwrap_or(0);

    let mut h_blocks = Vec::with_capacity(weyr.k());
    let mut entry_mask = Vec::with_capacity(weyr.k());
    let mut stair_set = Vec::with_capacity(weyr.k());
    for beta in 1..=weyr.k() {
        let m_beta = weyr.m()[beta - 1];
        let h: Vec<Vec<Flag>> = (0..t)
            .map(|i| {
                (0..m_beta)
                    .map(|jj| if kmat.get(i, jj) < beta as i64 { Flag::Free } else { Flag::Zero })
                    .collect()
            })
            .collect();

        let r_beta = weyr.r()[beta - 1];
        let mask: Vec<Vec<bool>> = (0..r1)
            .map(|a| (0..r_beta).map(|b| h[weyr.group_of(a)][weyr.group_of(b)] == Flag::Free).collect())
            .collect();

        let mut stairs = Vec::new();
        for b in 0..r_beta {
            let col: Vec<bool> = mask.iter().map(|row| row[b]).collect();
            stairs.extend((0..r1).filter(|&a| col[a] && col.get(a + 1) != Some(&true)).map(|a| (a, b)));
        }

        h_blocks.push(h);
        entry_mask.push(mask);
        stair_set.push(stairs);
    }

    CommutantPattern { segre: j.clone(), weyr, h_blocks, entry_mask, stair_set }
}

/// Position inside the first superblock row that a commutant entry copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Origin {
    pub beta: usize,
    pub row: usize,
    pub col: usize,
}

/// Entry-level layout of a whole commutant element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperblockLayout {
    n: usize,
    offsets: Vec<usize>,
    origins: Vec<Option<Origin>>,
}

impl SuperblockLayout {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn strip_offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// `None` means the entry is forced to zero.
    pub fn origin(&self, i: usize, j: usize) -> Option<Origin> {
        self.origins[i * self.n + j]
    }

    /// Mask of superblock `(alpha, beta)` (1-based).
    pub fn superblock_mask(&self, alpha: usize, beta: usize) -> Vec<Vec<bool>> {
        let (r0, r1) = (self.offsets[alpha - 1], self.offsets[alpha]);
        let (c0, c1) = (self.offsets[beta - 1], self.offsets[beta]);
        (r0..r1).map(|i| (c0..c1).map(|j| self.origin(i, j).is_some()).collect()).collect()
    }
}

/// Expands the first-row masks into every superblock: `S_{alpha,beta}` for
/// `alpha <= beta` is the upper-left `r_alpha x r_beta` corner of the mask
/// of `S_{1, beta-alpha+1}`; strictly lower superblocks are zero.
pub fn expand_superblock_layout(p: &CommutantPattern) -> SuperblockLayout {
    let offsets = p.weyr.strip_offsets();
    let n = p.weyr.dim();
    let k = p.k();
    let mut origins = vec![None; n * n];
    for alpha in 1..=k {
        for beta in alpha..=k {
            let lead = beta - alpha + 1;
            for a in 0..p.weyr.r()[alpha - 1] {
                for b in 0..p.weyr.r()[beta - 1] {
                    if p.allowed(lead, a, b) {
                        let (i, j) = (offsets[alpha - 1] + a, offsets[beta - 1] + b);
                        origins[i * n + j] = Some(Origin { beta: lead, row: a, col: b });
                    }
                }
            }
        }
    }
    SuperblockLayout { n, offsets, origins }
}

/// First superblock row `S_{1,1}, ..., S_{1,k}` of an `n x n` matrix.
pub fn leading_superblocks(s: &Matrix, weyr: &WeyrStructure) -> Vec<Matrix> {
    let offs = weyr.strip_offsets();
    (0..weyr.k()).map(|b| s.submatrix(0, offs[b], weyr.r()[0], weyr.r()[b])).collect()
}

/// Superblock `(alpha, beta)` (1-based).
pub fn superblock(s: &Matrix, weyr: &WeyrStructure, alpha: usize, beta: usize) -> Matrix {
    let offs = weyr.strip_offsets();
    s.submatrix(offs[alpha - 1], offs[beta - 1], weyr.r()[alpha - 1], weyr.r()[beta - 1])
}

/// Builds the commutant element with the given first superblock row.
/// Missing trailing superblocks are zero; entries outside the pattern must
/// be zero.
pub fn assemble(p: &CommutantPattern, field: FieldDescriptor, leading: &[Option<&Matrix>]) -> Result<Matrix> {
    let layout = expand_superblock_layout(p);
    let r1 = p.weyr.r().first().copied().unwrap_or(0);
    for (idx, block) in leading.iter().enumerate() {
        let beta = idx + 1;
        let Some(block) = block else { continue };
        if beta > p.k() || block.rows() != r1 || block.cols() != p.weyr.r()[beta - 1] {
            return Err(Error::DimensionMismatch(format!("leading superblock {beta} has wrong shape")));
        }
        if block.field() != field {
            return Err(Error::FieldMismatch(block.field(), field));
        }
        for (a, b) in block.support() {
            if !p.allowed(beta, a, b) {
                return Err(Error::InvalidStructure(format!(
                    "entry ({a},{b}) of leading superblock {beta} lies outside the pattern"
                )));
            }
        }
    }
    let n = layout.dim();
    let mut out = Matrix::zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            if let Some(o) = layout.origin(i, j) {
                if let Some(Some(block)) = leading.get(o.beta - 1) {
                    let v = block.get(o.row, o.col);
                    if !v.is_zero() {
                        out.set(i, j, v.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Explicit basis of the commutant, one element per free scalar position.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub pattern: CommutantPattern,
    /// Free position of each basis element, parallel to `basis`.
    pub positions: Vec<Origin>,
    pub basis: Vec<Matrix>,
}

pub fn commutant_basis(w: &Matrix, p: &CommutantPattern) -> Result<CommutantBasis> {
    if *w != build_weyr_matrix(&p.weyr, w.field()) {
        return Err(Error::InvalidStructure("matrix is not the Weyr matrix of the pattern".into()));
    }
    let layout = expand_superblock_layout(p);
    let n = layout.dim();
    let field = w.field();
    let mut positions = Vec::with_capacity(p.free_count());
    for beta in 1..=p.k() {
        for (a, row) in p.entry_mask(beta).iter().enumerate() {
            for (b, &ok) in row.iter().enumerate() {
                if ok {
                    positions.push(Origin { beta, row: a, col: b });
                }
            }
        }
    }
    let mut basis: Vec<Matrix> = positions.iter().map(|_| Matrix::zeros(field, n, n)).collect();
    let index: std::collections::HashMap<Origin, usize> =
        positions.iter().enumerate().map(|(i, o)| (*o, i)).collect();
    for i in 0..n {
        for j in 0..n {
            if let Some(o) = layout.origin(i, j) {
                basis[index[&o]].set(i, j, field.one());
            }
        }
    }
    Ok(CommutantBasis { pattern: p.clone(), positions, basis })
}

/// `W S == S W`.
pub fn is_commutant_member(s: &Matrix, w: &Matrix) -> Result<bool> {
    if !s.is_square() || !w.is_square() || s.rows() != w.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            s.rows(),
            s.cols(),
            w.rows(),
            w.cols()
        )));
    }
    w.commutes_with(s)
}

/// Whether `s` is zero off the pattern and every superblock repeats the
/// corner of its first-row representative.
pub fn matches_pattern(s: &Matrix, p: &CommutantPattern) -> Result<bool> {
    let n = p.weyr.dim();
    if s.rows() != n || s.cols() != n {
        return Err(Error::DimensionMismatch(format!("{}x{} vs pattern dimension {n}", s.rows(), s.cols())));
    }
    let layout = expand_superblock_layout(p);
    let offs = layout.strip_offsets();
    for i in 0..n {
        for j in 0..n {
            let v = s.get(i, j);
            match layout.origin(i, j) {
                None if !v.is_zero() => return Ok(false),
                Some(o) if v != s.get(o.row, offs[o.beta - 1] + o.col) => return Ok(false),
                _ => {}
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    fn segre(parts: &[(usize, usize)]) -> SegreStructure {
        SegreStructure::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn k_matrices() {
        assert_eq!(k_matrix(&segre(&[(7, 1), (4, 1), (2, 1)])).0, vec![vec![0, -3, -5], vec![3, 0, -2], vec![5, 2, 0]]);
        assert_eq!(k_matrix(&segre(&[(5, 3)])).0, vec![vec![0]]);
        assert_eq!(k_matrix(&segre(&[(3, 2), (2, 1), (1, 4)])).0, vec![vec![0, -1, -2], vec![1, 0, -1], vec![2, 1, 0]]);
    }

    #[test]
    fn single_part_is_all_free() {
        let p = h_pattern(&segre(&[(4, 2)]));
        for beta in 1..=4 {
            assert_eq!(p.h_block(beta), &[vec![Flag::Free]]);
            assert_eq!(p.stair_set(beta), &[(1, 0), (1, 1)]);
        }
        assert_eq!(p.render_h_grid(), "× | × | × | ×");
    }

    #[test]
    fn diagonal_superblocks_use_first_mask_corner() {
        let p = h_pattern(&segre(&[(3, 2), (2, 1), (1, 1)]));
        let layout = expand_superblock_layout(&p);
        for alpha in 1..=3 {
            let r = p.weyr().r()[alpha - 1];
            let expect: Vec<Vec<bool>> = p.entry_mask(1)[..r].iter().map(|row| row[..r].to_vec()).collect();
            assert_eq!(layout.superblock_mask(alpha, alpha), expect);
        }
        assert!(layout.superblock_mask(2, 1).iter().flatten().all(|&x| !x));
    }

    #[test]
    fn jordan_block_commutant_is_polynomials() {
        let p = h_pattern(&segre(&[(4, 1)]));
        let w = build_weyr_matrix(p.weyr(), Q);
        let cb = commutant_basis(&w, &p).unwrap();
        assert_eq!(cb.basis.len(), 4);
        let mut power = Matrix::identity(Q, 4);
        for b in &cb.basis {
            assert_eq!(*b, power);
            power = &power * &w;
        }
    }

    #[test]
    fn zero_matrix_commutant_is_everything() {
        let p = h_pattern(&segre(&[(1, 3)]));
        let w = build_weyr_matrix(p.weyr(), Q);
        let cb = commutant_basis(&w, &p).unwrap();
        assert_eq!(cb.basis.len(), 9);
        for b in &cb.basis {
            assert_eq!(b.support().len(), 1);
        }
    }

    #[test]
    fn r21_has_five() {
        let p = h_pattern(&segre(&[(2, 1), (1, 1)]));
        let w = build_weyr_matrix(p.weyr(), Q);
        let cb = commutant_basis(&w, &p).unwrap();
        assert_eq!(cb.basis.len(), 5);
        for b in &cb.basis {
            assert!(is_commutant_member(b, &w).unwrap());
            assert!(matches_pattern(b, &p).unwrap());
        }
    }

    #[test]
    fn membership_checks() {
        let p = h_pattern(&segre(&[(2, 1), (1, 1)]));
        let w = build_weyr_matrix(p.weyr(), Q);
        assert!(is_commutant_member(&Matrix::identity(Q, 3), &w).unwrap());
        assert!(is_commutant_member(&w, &w).unwrap());
        // (2,1) lies in a strictly lower superblock
        let mut e = Matrix::zeros(Q, 3, 3);
        e.set(2, 0, Q.one());
        assert!(!is_commutant_member(&e, &w).unwrap());
        assert!(!matches_pattern(&e, &p).unwrap());
        // H_1 forbids block (2,1): entry (1,0) of S_11
        let mut e = Matrix::zeros(Q, 3, 3);
        e.set(1, 0, Q.one());
        assert!(!is_commutant_member(&e, &w).unwrap());
        assert!(!matches_pattern(&e, &p).unwrap());
        assert!(is_commutant_member(&Matrix::zeros(Q, 2, 2), &w).is_err());
    }

    #[test]
    fn broken_angular_repeat_is_rejected() {
        let p = h_pattern(&segre(&[(2, 2)]));
        let w = build_weyr_matrix(p.weyr(), Q);
        let mut s = Matrix::identity(Q, 4);
        s.set(3, 3, Q.from_i64(2));
        assert!(!matches_pattern(&s, &p).unwrap());
        assert!(!is_commutant_member(&s, &w).unwrap());
    }

    #[test]
    fn assemble_rejects_off_pattern_entries() {
        let p = h_pattern(&segre(&[(2, 1), (1, 1)]));
        let mut bad = Matrix::zeros(Q, 2, 2);
        bad.set(1, 0, Q.one());
        assert!(assemble(&p, Q, &[Some(&bad)]).is_err());
        let good = Matrix::from_i64(Q, &[&[1, 2], &[0, 3]]);
        let s = assemble(&p, Q, &[Some(&good)]).unwrap();
        assert!(matches_pattern(&s, &p).unwrap());
    }
}
