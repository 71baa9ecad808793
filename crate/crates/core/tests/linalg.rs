use proptest::prelude::*;
use weyr_core::harness::random_invertible;
use weyr_core::{FieldDescriptor, Matrix};

const Q: FieldDescriptor = FieldDescriptor::Rational;
const F5: FieldDescriptor = FieldDescriptor::Prime(5);

fn grid(rows: usize, cols: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, rows * cols)
}

fn build(field: FieldDescriptor, rows: usize, cols: usize, v: &[i64]) -> Matrix {
    let rows: Vec<Vec<_>> = v.chunks(cols.max(1)).take(rows).map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
    Matrix::from_rows(field, rows).unwrap()
}

fn square(max: usize) -> impl Strategy<Value = (usize, Vec<i64>)> {
    (1..=max).prop_flat_map(|n| (Just(n), grid(n, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(
        (a, b, c) in (1usize..5, 1usize..5, 1usize..5, 1usize..5)
            .prop_flat_map(|(m, n, p, q)| (grid(m, n), grid(n, p), grid(p, q)).prop_map(move |(x, y, z)| {
                (build(Q, m, n, &x), build(Q, n, p, &y), build(Q, p, q, &z))
            }))
    ) {
        let left = a.mat_mul(&b).unwrap().mat_mul(&c).unwrap();
        let right = a.mat_mul(&b.mat_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_is_two_sided((n, v) in square(6), prime in any::<bool>()) {
        let field = if prime { F5 } else { Q };
        let a = build(field, n, n, &v);
        match a.invert() {
            Ok(inv) => {
                prop_assert!(a.mat_mul(&inv).unwrap().is_identity());
                prop_assert!(inv.mat_mul(&a).unwrap().is_identity());
                prop_assert_eq!(a.rank(), n);
            }
            Err(_) => prop_assert!(a.rank() < n),
        }
    }

    #[test]
    fn unit_upper_triangular_inverse((n, v) in square(7)) {
        let mut u = Matrix::identity(Q, n);
        for i in 0..n {
            for j in i + 1..n {
                u.set(i, j, Q.from_i64(v[i * n + j]));
            }
        }
        let inv = u.invert().unwrap();
        prop_assert!(u.mat_mul(&inv).unwrap().is_identity());
        for i in 0..n {
            prop_assert!(inv.get(i, i).is_one());
            for j in 0..i {
                prop_assert!(inv.get(i, j).is_zero());
            }
        }
    }

    #[test]
    fn rank_nullity((rows, cols, v) in (1usize..6, 1usize..7).prop_flat_map(|(r, c)| (Just(r), Just(c), grid(r, c)))) {
        let a = build(Q, rows, cols, &v);
        let kernel = a.kernel_basis();
        prop_assert_eq!(a.rank() + kernel.len(), cols);
        for x in &kernel {
            prop_assert!(a.mul_vec(x).iter().all(|e| e.is_zero()));
        }
        prop_assert_eq!(a.transpose().rank(), a.rank());
    }

    #[test]
    fn rank_survives_conjugation((n, v) in square(6), seed in any::<u64>()) {
        let x = build(Q, n, n, &v);
        let s = random_invertible(n, Q, seed);
        prop_assert_eq!(x.conjugate(&s).unwrap().rank(), x.rank());
    }
}

#[test]
fn random_invertibles_invert() {
    for seed in 0..1000 {
        let n = 1 + (seed as usize % 6);
        let field = if seed % 2 == 0 { Q } else { F5 };
        assert!(random_invertible(n, field, seed).invert().is_ok(), "seed {seed}");
    }
}
