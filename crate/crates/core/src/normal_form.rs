//! Reduction of a commuting nilpotent pair with one-dimensional common kernel
//! to the normal form `(W, B)`.
//!
//! `W` is the Weyr form of `M`. `B` commutes with `W`, its diagonal
//! superblocks are `J_{r_alpha}(0)`, and each first-row superblock
//! `B_{1,beta}` is nonzero only on the stairs of the commutant pattern.
//!
//! The reduction runs in three stages, each multiplying an invertible
//! commutant factor into the witness:
//!
//! 1. Weyr stage: `(M, N) -> (W, B_0)`.
//! 2. Leading block: Jordanize the diagonal blocks of `B_{11}`, then
//!    upper-triangular row/column operations bring `B_{11}` to `J_{r_1}(0)`.
//! 3. Superdiagonal sweep: for `beta = 1..k-1` conjugate by `I - G` with `G`
//!    supported on the `beta`th superdiagonal. On `B_{1,beta+1}` this acts as
//!    `X -> X + G J - J G`; lower diagonals of `X` collapse onto stairs
//!    fragment by fragment, upper diagonals are cleared.

use serde::Serialize;

use crate::commutant::{assemble, h_pattern, leading_superblocks, superblock, CommutantPattern};
use crate::decomposition::{jordan_chains, weyr_decomposition, weyr_structure_of};
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};
use crate::matrix::{Matrix, Vector};
use crate::structure::{build_weyr_matrix, WeyrStructure};

/// A pair of commuting nilpotent matrices of equal size over one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingPair {
    m: Matrix,
    n: Matrix,
}

impl CommutingPair {
    pub fn new(m: Matrix, n: Matrix) -> Result<Self> {
        for x in [&m, &n] {
            if !x.is_square() {
                return Err(Error::NotSquare { rows: x.rows(), cols: x.cols() });
            }
        }
        if m.field() != n.field() {
            return Err(Error::FieldMismatch(m.field(), n.field()));
        }
        if m.rows() != n.rows() {
            return Err(Error::DimensionMismatch(format!("M is {0}x{0}, N is {1}x{1}", m.rows(), n.rows())));
        }
        if !m.commutes_with(&n)? {
            return Err(Error::NotCommuting);
        }
        if !m.is_nilpotent() {
            return Err(Error::NotNilpotent("M"));
        }
        if !n.is_nilpotent() {
            return Err(Error::NotNilpotent("N"));
        }
        Ok(CommutingPair { m, n })
    }

    pub fn m(&self) -> &Matrix {
        &self.m
    }

    pub fn n(&self) -> &Matrix {
        &self.n
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn field(&self) -> FieldDescriptor {
        self.m.field()
    }

    /// `(S^-1 M S, S^-1 N S)`.
    pub fn conjugate(&self, s: &Matrix) -> Result<CommutingPair> {
        let inv = s.invert()?;
        Ok(CommutingPair { m: inv.mat_mul(&self.m)?.mat_mul(s)?, n: inv.mat_mul(&self.n)?.mat_mul(s)? })
    }
}

/// `dim(Ker M ∩ Ker N)`, the nullity of `[M; N]`.
pub fn common_kernel_dimension(p: &CommutingPair) -> usize {
    let stacked = p.m.vstack(&p.n).expect("pair has matching shapes");
    p.dim() - stacked.rank()
}

/// Output of [`reduce_pair`]: `S^-1 M S = W` and `S^-1 N S = B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormResult {
    pub weyr: WeyrStructure,
    pub w: Matrix,
    pub b: Matrix,
    pub s: Matrix,
}

impl NormalFormResult {
    pub fn pattern(&self) -> CommutantPattern {
        h_pattern(self.weyr.segre())
    }
}

/// Where a snapshot of `B` was taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    Weyr,
    LeadingBlock,
    /// Lower diagonal `ell` (0 = main) of `B_{1,beta+1}` collapsed onto stairs.
    LowerDiagonal { beta: usize, ell: usize },
    /// Upper diagonal `ell >= 1` of `B_{1,beta+1}` cleared.
    UpperDiagonal { beta: usize, ell: usize },
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub stage: Stage,
    pub b: Matrix,
}

pub fn reduce_pair(p: &CommutingPair) -> Result<NormalFormResult> {
    Reducer::run(p, false).map(|(r, _)| r)
}

/// Like [`reduce_pair`], also returning `B` after every applied factor.
pub fn reduce_pair_traced(p: &CommutingPair) -> Result<(NormalFormResult, Vec<Snapshot>)> {
    Reducer::run(p, true)
}

struct Reducer {
    pattern: CommutantPattern,
    field: FieldDescriptor,
    b: Matrix,
    s: Matrix,
    trace: Option<Vec<Snapshot>>,
}

impl Reducer {
    fn run(p: &CommutingPair, tracing: bool) -> Result<(NormalFormResult, Vec<Snapshot>)> {
        let dim = common_kernel_dimension(p);
        if dim != 1 {
            return Err(Error::CommonKernelDimension(dim));
        }
        let field = p.field();

        let dec = weyr_decomposition(&p.m)?;
        let b0 = dec.s.invert()?.mat_mul(&p.n)?.mat_mul(&dec.s)?;
        let mut r = Reducer {
            pattern: h_pattern(dec.weyr.segre()),
            field,
            b: b0,
            s: dec.s,
            trace: tracing.then(Vec::new),
        };
        r.snapshot(Stage::Weyr);

        r.leading_block()?;
        r.snapshot(Stage::LeadingBlock);

        let weyr = r.pattern.weyr().clone();
        for beta in 1..weyr.k() {
            let lead = beta + 1;
            for ell in (0..weyr.r()[0]).rev() {
                let x = superblock(&r.b, &weyr, 1, lead);
                if let Some(g) = lower_diagonal_generator(&x, ell, &r.pattern, lead) {
                    r.apply(lead, &g)?;
                    r.snapshot(Stage::LowerDiagonal { beta, ell });
                }
            }
            for ell in 1..weyr.r()[lead - 1] {
                let x = superblock(&r.b, &weyr, 1, lead);
                if let Some(g) = upper_diagonal_generator(&x, ell) {
                    r.apply(lead, &g)?;
                    r.snapshot(Stage::UpperDiagonal { beta, ell });
                }
            }
        }

        let result = NormalFormResult { w: dec.w, b: r.b, s: r.s, weyr };
        // S is invertible by construction (an inverted Weyr basis times
        // invertible and unipotent factors), so MS = SW and NS = SB suffice.
        let s = &result.s;
        if p.m.mat_mul(s)? != s.mat_mul(&result.w)? || p.n.mat_mul(s)? != s.mat_mul(&result.b)? {
            return Err(Error::Internal("accumulated witness does not conjugate the input pair".into()));
        }
        let report = verify_normal_form(&result.w, &result.b);
        if !report.passed() {
            return Err(Error::Internal(format!("reduced pair fails verification: {}", report.failures().join("; "))));
        }
        Ok((result, r.trace.unwrap_or_default()))
    }

    fn snapshot(&mut self, stage: Stage) {
        if let Some(t) = self.trace.as_mut() {
            t.push(Snapshot { stage, b: self.b.clone() });
        }
    }

    /// Conjugates by the commutant element whose first superblock row is
    /// `t` in position 1, given `t^-1`.
    fn conjugate_by_leading(&mut self, t: &Matrix, t_inv: &Matrix) -> Result<()> {
        let full = assemble(&self.pattern, self.field, &[Some(t)])?;
        let full_inv = assemble(&self.pattern, self.field, &[Some(t_inv)])?;
        self.b = full_inv.mat_mul(&self.b)?.mat_mul(&full)?;
        self.s = self.s.mat_mul(&full)?;
        Ok(())
    }

    /// Brings `B_{11}` to `J_{r_1}(0)`.
    fn leading_block(&mut self) -> Result<()> {
        let weyr = self.pattern.weyr().clone();
        if weyr.k() == 0 {
            return Ok(());
        }
        let u = superblock(&self.b, &weyr, 1, 1);
        let r1 = u.rows();

        // Jordanize each diagonal block B_ii^(0)
        let mut blocks = Vec::new();
        let mut start = 0;
        for &(_, p) in weyr.segre().parts() {
            let d = u.submatrix(start, start, p, p);
            let columns: Vec<Vector> = jordan_chains(&d)?.into_iter().flatten().collect();
            blocks.push(Matrix::from_columns(self.field, p, &columns));
            start += p;
        }
        let t1 = Matrix::direct_sum(self.field, &blocks);
        let t1_inv = t1.invert()?;
        let mut v = t1_inv.mat_mul(&u)?.mat_mul(&t1)?;

        for i in 0..r1 {
            for j in 0..=i {
                if !v.get(i, j).is_zero() {
                    return Err(Error::Internal(format!("B_11 not strictly upper triangular at ({i},{j})")));
                }
            }
        }

        // Row by row: scale b_{i,i+1} to 1, then clear b_{i,j} for j > i+1
        // with column ops from column i+1 (inverse row ops touch row i+1).
        let mut t2 = Matrix::identity(self.field, r1);
        for i in 0..r1.saturating_sub(1) {
            let d = v.get(i, i + 1).clone();
            let Some(d_inv) = d.inverse() else {
                return Err(Error::VanishingSuperdiagonal(i + 1, i + 2));
            };
            // column i+1 *= 1/d, row i+1 *= d
            for row in 0..r1 {
                let x = v.get(row, i + 1) * &d_inv;
                v.set(row, i + 1, x);
                let y = t2.get(row, i + 1) * &d_inv;
                t2.set(row, i + 1, y);
            }
            for col in 0..r1 {
                let x = v.get(i + 1, col) * &d;
                v.set(i + 1, col, x);
            }
            for j in i + 2..r1 {
                let c = v.get(i, j).clone();
                if c.is_zero() {
                    continue;
                }
                // column j -= c * column i+1 ; row i+1 += c * row j
                for row in 0..r1 {
                    let x = v.get(row, j) - &(&c * v.get(row, i + 1));
                    v.set(row, j, x);
                    let y = t2.get(row, j) - &(&c * t2.get(row, i + 1));
                    t2.set(row, j, y);
                }
                for col in 0..r1 {
                    let x = v.get(i + 1, col) + &(&c * v.get(j, col));
                    v.set(i + 1, col, x);
                }
            }
        }

        let t = t1.mat_mul(&t2)?;
        let t_inv = t.invert()?;
        self.conjugate_by_leading(&t, &t_inv)?;

        if superblock(&self.b, &weyr, 1, 1) != Matrix::jordan_block(self.field, r1) {
            return Err(Error::Internal("leading superblock is not J_{r_1}(0) after reduction".into()));
        }
        Ok(())
    }

    /// Conjugates by `I - G`, where `G` is the commutant element supported on
    /// one superdiagonal with first-row superblock `g` at `lead`.
    fn apply(&mut self, lead: usize, g: &Matrix) -> Result<()> {
        let mut leading: Vec<Option<&Matrix>> = vec![None; lead];
        leading[lead - 1] = Some(g);
        let big_g = assemble(&self.pattern, self.field, &leading)?;

        // (I + G + G^2 + ...) B (I - G)
        let y = self.b.sub(&self.b.mat_mul(&big_g)?)?;
        let mut out = y.clone();
        let mut term = y;
        loop {
            term = big_g.mat_mul(&term)?;
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        self.b = out;
        self.s = self.s.sub(&self.s.mat_mul(&big_g)?)?;
        Ok(())
    }
}

/// Generator on `G`'s lower diagonal `ell + 1` that collapses lower diagonal
/// `ell` of `x = B_{1,lead}`: every maximal run of allowed `g`s absorbs its
/// stretch of the diagonal into the entry just past the run (a stair), or
/// clears it when the run ends in the last column.
fn lower_diagonal_generator(x: &Matrix, ell: usize, pattern: &CommutantPattern, lead: usize) -> Option<Matrix> {
    let (rows, cols) = (x.rows(), x.cols());
    let field = x.field();
    let g_len = (0..cols).take_while(|&s| ell + 1 + s < rows).count();
    let b_len = (0..cols).take_while(|&s| ell + s < rows).count();
    let allowed = |s: usize| s < g_len && pattern.allowed(lead, ell + 1 + s, s);

    let mut g = Matrix::zeros(field, rows, cols);
    let mut any = false;
    let mut s = 0;
    while s < g_len {
        if !allowed(s) {
            s += 1;
            continue;
        }
        // maximal run s..end of allowed g's
        let mut acc = field.zero();
        while allowed(s) {
            acc = &acc + x.get(ell + s, s);
            if !acc.is_zero() {
                any = true;
            }
            g.set(ell + 1 + s, s, acc.clone());
            s += 1;
        }
        debug_assert!(s <= b_len);
    }
    any.then_some(g)
}

/// Generator on `G`'s upper diagonal `ell - 1` clearing upper diagonal `ell`
/// of `x`. The first generator entry is fixed to zero.
fn upper_diagonal_generator(x: &Matrix, ell: usize) -> Option<Matrix> {
    let (rows, cols) = (x.rows(), x.cols());
    let field = x.field();
    let len = (0..rows).take_while(|&s| ell + s < cols).count();
    let mut g = Matrix::zeros(field, rows, cols);
    let mut acc = field.zero();
    let mut any = false;
    for s in 0..len {
        // g_{s+1} = g_s + x_s
        acc = &acc + x.get(s, ell + s);
        if !acc.is_zero() {
            any = true;
        }
        g.set(s + 1, ell + s, acc.clone());
    }
    any.then_some(g)
}

/// One named check of [`verify_normal_form`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalFormReport {
    pub checks: Vec<Check>,
}

impl NormalFormReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| match &c.detail {
                Some(d) => format!("{}: {d}", c.name),
                None => c.name.to_string(),
            })
            .collect()
    }
}

pub const CHECK_NAMES: [&str; 6] = ["weyr", "commute", "diagonal_blocks", "stairs", "angular", "kernel"];

fn check(name: &'static str, result: std::result::Result<(), String>) -> Check {
    match result {
        Ok(()) => Check { name, passed: true, detail: None },
        Err(d) => Check { name, passed: false, detail: Some(d) },
    }
}

/// Runs the six normal-form checks independently:
/// (i) `W` is a Weyr matrix, (ii) `WB = BW`, (iii) diagonal superblocks of
/// `B` are `J_{r_alpha}(0)`, (iv) `B_{1,beta}` lives on the stairs,
/// (v) superblocks repeat the corners of the first row and vanish below the
/// diagonal, (vi) the common kernel is one-dimensional.
pub fn verify_normal_form(w: &Matrix, b: &Matrix) -> NormalFormReport {
    let shapes_ok = w.is_square() && b.is_square() && w.rows() == b.rows() && w.field() == b.field();
    if !shapes_ok {
        let detail = format!("W is {}x{}, B is {}x{}", w.rows(), w.cols(), b.rows(), b.cols());
        return NormalFormReport {
            checks: CHECK_NAMES
                .iter()
                .map(|&name| Check { name, passed: false, detail: Some(detail.clone()) })
                .collect(),
        };
    }
    let field = w.field();

    let weyr = weyr_structure_of(w)
        .ok()
        .filter(|s| build_weyr_matrix(s, field) == *w);
    let weyr_check = check(
        "weyr",
        if weyr.is_some() { Ok(()) } else { Err("W is not a nilpotent Weyr matrix".into()) },
    );

    let commute_check = check(
        "commute",
        if w.commutes_with(b).unwrap_or(false) { Ok(()) } else { Err("WB != BW".into()) },
    );

    let (diag_check, stair_check, angular_check) = match &weyr {
        None => {
            let d = || Err("no Weyr structure".to_string());
            (check("diagonal_blocks", d()), check("stairs", d()), check("angular", d()))
        }
        Some(weyr) => {
            let pattern = h_pattern(weyr.segre());
            (
                check("diagonal_blocks", check_diagonal_blocks(b, weyr)),
                check("stairs", check_stairs(b, &pattern)),
                check("angular", check_angular(b, weyr)),
            )
        }
    };

    let stacked = w.vstack(b).expect("shapes checked");
    let kernel_dim = w.rows() - stacked.rank();
    let kernel_check = check(
        "kernel",
        if kernel_dim == 1 { Ok(()) } else { Err(format!("common kernel dimension {kernel_dim}")) },
    );

    NormalFormReport {
        checks: vec![weyr_check, commute_check, diag_check, stair_check, angular_check, kernel_check],
    }
}

fn check_diagonal_blocks(b: &Matrix, weyr: &WeyrStructure) -> std::result::Result<(), String> {
    for alpha in 1..=weyr.k() {
        if superblock(b, weyr, alpha, alpha) != Matrix::jordan_block(b.field(), weyr.r()[alpha - 1]) {
            return Err(format!("B_{{{alpha},{alpha}}} is not J_{}(0)", weyr.r()[alpha - 1]));
        }
    }
    Ok(())
}

fn check_stairs(b: &Matrix, pattern: &CommutantPattern) -> std::result::Result<(), String> {
    let lead = leading_superblocks(b, pattern.weyr());
    for (idx, x) in lead.iter().enumerate().skip(1) {
        let beta = idx + 1;
        if let Some((a, c)) = x.support().into_iter().find(|&(a, c)| !pattern.is_stair(beta, a, c)) {
            return Err(format!("B_{{1,{beta}}} has off-stair entry at ({}, {})", a + 1, c + 1));
        }
    }
    Ok(())
}

fn check_angular(b: &Matrix, weyr: &WeyrStructure) -> std::result::Result<(), String> {
    let k = weyr.k();
    for alpha in 1..=k {
        for beta in 1..=k {
            let block = superblock(b, weyr, alpha, beta);
            if beta < alpha {
                if !block.is_zero() {
                    return Err(format!("B_{{{alpha},{beta}}} below the diagonal is nonzero"));
                }
                continue;
            }
            if alpha == 1 {
                continue;
            }
            let source = superblock(b, weyr, 1, beta - alpha + 1);
            if block != source.submatrix(0, 0, block.rows(), block.cols()) {
                return Err(format!(
                    "B_{{{alpha},{beta}}} is not the corner of B_{{1,{}}}",
                    beta - alpha + 1
                ));
            }
        }
    }
    Ok(())
}

/// Stair cells `(a, b)` of one strip with their values.
pub type Stairs = Vec<((usize, usize), Scalar)>;

/// Values of `B_{1,beta}` on its stairs, for `beta >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StairProfile {
    pub stairs: Vec<(usize, Stairs)>,
}

pub fn stair_profile(res: &NormalFormResult) -> StairProfile {
    let pattern = res.pattern();
    let lead = leading_superblocks(&res.b, &res.weyr);
    let stairs = (2..=res.weyr.k())
        .map(|beta| {
            let x = &lead[beta - 1];
            let vals = pattern.stair_set(beta).iter().map(|&(a, c)| ((a, c), x.get(a, c).clone())).collect();
            (beta, vals)
        })
        .collect();
    StairProfile { stairs }
}

/// Last rows of `B_1, ..., B_{k-1}` when all Jordan blocks of `M` have the
/// same size; these determine `B` completely.
pub fn equal_block_profile(res: &NormalFormResult) -> Result<Vec<Vector>> {
    if res.weyr.segre().t() != 1 {
        return Err(Error::InvalidStructure(format!(
            "Jordan blocks of unequal sizes {}",
            res.weyr.segre()
        )));
    }
    let lead = leading_superblocks(&res.b, &res.weyr);
    Ok(lead.iter().skip(1).map(|x| x.row(x.rows() - 1).to_vec()).collect())
}
