//! Weyr decomposition of a nilpotent matrix with an explicit similarity witness.
//!
//! The witness is a staircase basis adapted to the kernel filtration
//! `Ker M ⊂ Ker M^2 ⊂ ...`: chain heads are picked greedily (first kernel
//! basis vector that is new modulo the lower kernel and the images of longer
//! chains), then each chain is unrolled under `M`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::rational::Rational;
use crate::matrix::{Matrix, SpanBuilder, Vector};
use crate::structure::{build_weyr_matrix, WeyrStructure};

/// Result of [`weyr_decomposition`]: `s^-1 * m * s == w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeyrDecomposition {
    pub weyr: WeyrStructure,
    pub w: Matrix,
    pub s: Matrix,
}

/// Powers `I, M, M^2, ...` up to and including the first zero power.
fn nilpotent_powers(m: &Matrix, what: &'static str) -> Result<Vec<Matrix>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut powers = vec![Matrix::identity(m.field(), n)];
    while !powers.last().expect("nonempty").is_zero() {
        if powers.len() > n {
            return Err(Error::NotNilpotent(what));
        }
        let next = powers.last().expect("nonempty").mat_mul(m)?;
        powers.push(next);
    }
    Ok(powers)
}

/// Over the rationals, rescales `v` to a primitive integer vector so that
/// chains of an integer matrix stay integral.
fn primitive(v: &[Scalar]) -> Vector {
    let rats: Vec<&Rational> = v.iter().filter_map(Scalar::as_rational).collect();
    if rats.len() != v.len() {
        return v.to_vec();
    }
    let den = rats.iter().fold(BigInt::one(), |acc, q| acc.lcm(&q.denom()));
    let num = rats.iter().fold(BigInt::zero(), |acc, q| acc.gcd(&q.numer()));
    if num.is_zero() {
        return v.to_vec();
    }
    let c = Scalar::Rational(Rational::new(den, num));
    v.iter().map(|x| x * &c).collect()
}

/// Powers `M^0..=M^k` (with `M^k = 0`) and a kernel basis of each.
struct Filtration {
    powers: Vec<Matrix>,
    kernels: Vec<Vec<Vector>>,
}

impl Filtration {
    fn new(m: &Matrix) -> Result<Self> {
        let powers = nilpotent_powers(m, "matrix")?;
        let kernels = powers.iter().map(Matrix::kernel_basis).collect();
        Ok(Filtration { powers, kernels })
    }

    /// `r_i = dim Ker M^i - dim Ker M^{i-1}`.
    fn structure(&self) -> Result<WeyrStructure> {
        WeyrStructure::from_characteristic(self.kernels.windows(2).map(|w| w[1].len() - w[0].len()).collect())
    }

    fn chains(&self, m: &Matrix) -> Vec<Vec<Vector>> {
        let powers = &self.powers;
        let k = powers.len() - 1;
        let mut heads: Vec<(usize, Vector)> = Vec::new();
        for level in (1..=k).rev() {
            let mut span = SpanBuilder::new(m.field(), m.rows());
            for v in &self.kernels[level - 1] {
                span.insert(v);
            }
            for (len, h) in &heads {
                span.insert(&powers[len - level].mul_vec(h));
            }
            for v in &self.kernels[level] {
                if span.insert(v) {
                    heads.push((level, primitive(v)));
                }
            }
        }
        heads
            .into_iter()
            .map(|(len, h)| (0..len).rev().map(|e| powers[e].mul_vec(&h)).collect())
            .collect()
    }
}

/// Jordan chains of a nilpotent matrix, longest first. Each chain is listed
/// bottom-up: `[M^{L-1} h, ..., M h, h]`, so `M c[0] = 0` and `M c[i+1] = c[i]`.
/// Chain heads are the first kernel basis vectors that are new modulo the
/// lower kernel and the images of longer chains.
pub fn jordan_chains(m: &Matrix) -> Result<Vec<Vec<Vector>>> {
    Ok(Filtration::new(m)?.chains(m))
}

/// Weyr characteristic from the kernel dimensions of the powers of `m`.
pub fn weyr_structure_of(m: &Matrix) -> Result<WeyrStructure> {
    Filtration::new(m)?.structure()
}

/// Computes `(structure, W, S)` with `S^-1 m S = W` exactly.
pub fn weyr_decomposition(m: &Matrix) -> Result<WeyrDecomposition> {
    let filtration = Filtration::new(m)?;
    let weyr = filtration.structure()?;
    let chains = filtration.chains(m);
    let field = m.field();
    let n = m.rows();

    let offs = weyr.strip_offsets();
    let mut columns: Vec<Option<Vector>> = vec![None; n];
    for (b, chain) in chains.iter().enumerate() {
        for (level, v) in chain.iter().enumerate() {
            // chain b occupies position b in strips 1..=len
            if b >= weyr.r()[level] {
                return Err(Error::Internal(format!("chain {b} does not fit strip {}", level + 1)));
            }
            columns[offs[level] + b] = Some(v.clone());
        }
    }
    let columns: Vec<Vector> = columns
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::Internal("Weyr basis has a gap".into())))
        .collect::<Result<_>>()?;

    let s = Matrix::from_columns(field, n, &columns);
    let w = build_weyr_matrix(&weyr, field);
    Ok(WeyrDecomposition { weyr, w, s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDescriptor;
    use crate::structure::{jordan_matrix, weyr_characteristic, SegreStructure};

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    #[test]
    fn zero_matrix() {
        let d = weyr_decomposition(&Matrix::zeros(Q, 3, 3)).unwrap();
        assert_eq!(d.weyr.r(), &[3]);
        assert!(d.w.is_zero());
        assert!(d.s.is_identity());
    }

    #[test]
    fn empty_matrix() {
        let d = weyr_decomposition(&Matrix::zeros(Q, 0, 0)).unwrap();
        assert_eq!(d.weyr.k(), 0);
        assert_eq!(d.w.rows(), 0);
    }

    #[test]
    fn jordan_block_is_fixed() {
        let j = Matrix::jordan_block(Q, 2);
        let d = weyr_decomposition(&j).unwrap();
        assert_eq!(d.weyr.r(), &[1, 1]);
        assert_eq!(d.w, j);
        assert!(d.s.is_identity());
    }

    #[test]
    fn jordan_matrix_goes_to_weyr() {
        let s = SegreStructure::new(vec![(3, 2), (2, 1), (1, 2)]).unwrap();
        let j = jordan_matrix(&s, Q);
        let d = weyr_decomposition(&j).unwrap();
        assert_eq!(d.weyr, weyr_characteristic(&s));
        assert_eq!(j.conjugate(&d.s).unwrap(), d.w);
        // the witness is a permutation matrix here
        for i in 0..d.s.rows() {
            assert_eq!(d.s.row(i).iter().filter(|x| !x.is_zero()).count(), 1);
        }
    }

    #[test]
    fn non_nilpotent_rejected() {
        let m = Matrix::from_i64(Q, &[&[1, 0], &[0, 0]]);
        assert_eq!(weyr_decomposition(&m), Err(Error::NotNilpotent("matrix")));
        assert!(matches!(weyr_decomposition(&Matrix::zeros(Q, 2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn chains_are_chains() {
        let m = Matrix::from_i64(Q, &[&[0, 1, 1, 0], &[0, 0, 0, 2], &[0, 0, 0, -1], &[0, 0, 0, 0]]);
        let chains = jordan_chains(&m).unwrap();
        let total: usize = chains.iter().map(Vec::len).sum();
        assert_eq!(total, 4);
        assert!(chains.windows(2).all(|w| w[0].len() >= w[1].len()));
        for c in &chains {
            assert!(m.mul_vec(&c[0]).iter().all(|x| x.is_zero()));
            for i in 1..c.len() {
                assert_eq!(m.mul_vec(&c[i]), c[i - 1]);
            }
        }
    }
}
