//! Exact rationals with an inline fast path.
//!
//! Values whose reduced numerator and denominator fit in `i64` are stored
//! inline and combined with `i128` intermediates; anything larger falls back
//! to `BigRational`. The representation is canonical (always demoted when it
//! fits), so derived equality and hashing are value equality.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rational {
    /// `num / den` in lowest terms with `den > 0`.
    Small(i64, i64),
    Big(BigRational),
}

impl Rational {
    pub fn zero() -> Self {
        Rational::Small(0, 1)
    }

    pub fn one() -> Self {
        Rational::Small(1, 1)
    }

    pub fn from_integer(v: i64) -> Self {
        Rational::Small(v, 1)
    }

    /// Reduces `num / den`; panics if `den == 0`.
    fn from_i128(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational::Small(n, d),
            _ => Rational::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(q: BigRational) -> Self {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => Rational::Small(n, d),
            _ => Rational::Big(q),
        }
    }

    /// Reduces `num / den`; panics if `den == 0`.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        Self::from_big(BigRational::new(num, den))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(q) => q.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(q) => q.is_integer(),
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            Rational::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Rational::Big(q) => Self::from_big(q.recip()),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(q) => q.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(q) => q.denom().clone(),
        }
    }

    /// Bits in numerator and denominator.
    pub fn size_hint(&self) -> u64 {
        match self {
            Rational::Small(n, d) => (128 - n.unsigned_abs().leading_zeros() - d.unsigned_abs().leading_zeros()) as u64,
            Rational::Big(q) => q.numer().bits() + q.denom().bits(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n < 0,
            Rational::Big(q) => q.is_negative(),
        }
    }
}

impl fmt::Display for Rational {
    /// `a` or `a/b` in lowest terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Rational::Big(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(0, _), x) | (x, Rational::Small(0, _)) => x.clone(),
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    Rational::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl Mul for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(0, _), _) | (_, Rational::Small(0, _)) => Rational::zero(),
            (Rational::Small(1, 1), x) | (x, Rational::Small(1, 1)) => x.clone(),
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div for &Rational {
    type Output = Rational;

    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        self * &rhs.recip()
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        match self {
            Rational::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational::Small(m, *d),
                None => Rational::from_big(-self.to_big()),
            },
            Rational::Big(q) => Rational::from_big(-q),
        }
    }
}
