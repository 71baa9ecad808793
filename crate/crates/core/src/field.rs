//! Exact scalars: arbitrary-precision rationals and prime fields.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// The ground field of a computation.
///
/// Prime moduli must fit a machine word; products are formed in `u128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Rational,
    Prime(u64),
}

impl FieldDescriptor {
    pub fn prime(modulus: u64) -> Result<Self> {
        if is_prime(modulus) {
            Ok(FieldDescriptor::Prime(modulus))
        } else {
            Err(Error::InvalidField(format!("{modulus} is not prime")))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Rational => 0,
            FieldDescriptor::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            FieldDescriptor::Rational => Scalar::Rational(Rational::from_integer(v)),
            FieldDescriptor::Prime(p) => Scalar::Prime(Residue::new((v as i128).rem_euclid(p as i128) as u64, p)),
        }
    }

    /// `num / den`, with `den` nonzero in the field.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        let d = self.from_i64(den);
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {num}/{den}")));
        }
        Ok(&self.from_i64(num) / &d)
    }

    /// Parses an entry string: a decimal integer or `a/b`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad entry {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (
                BigInt::from_str(n.trim()).map_err(|_| bad())?,
                BigInt::from_str(d.trim()).map_err(|_| bad())?,
            ),
            None => (BigInt::from_str(s).map_err(|_| bad())?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        match *self {
            FieldDescriptor::Rational => Ok(Scalar::Rational(Rational::new(num, den))),
            FieldDescriptor::Prime(p) => {
                let modulus = BigInt::from(p);
                let reduce = |x: &BigInt| -> u64 {
                    let r = ((x % &modulus) + &modulus) % &modulus;
                    r.try_into().expect("residue fits u64")
                };
                let d = Residue::new(reduce(&den), p);
                if d.value == 0 {
                    return Err(Error::Parse(format!("denominator of {s:?} vanishes mod {p}")));
                }
                Ok(Scalar::Prime(Residue::new(reduce(&num), p)) / Scalar::Prime(d))
            }
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rational => write!(f, "rational"),
            FieldDescriptor::Prime(p) => write!(f, "prime:{p}"),
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rational" | "Q" | "q" => Ok(FieldDescriptor::Rational),
            other => {
                let p = other
                    .strip_prefix("prime:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidField(format!("expected rational or prime:<p>, got {other:?}")))?;
                FieldDescriptor::prime(p)
            }
        }
    }
}

impl Serialize for FieldDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical residue `0 <= value < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    fn new(value: u64, modulus: u64) -> Self {
        Residue { value: value % modulus, modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
        ((a as u128 * b as u128) % m as u128) as u64
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.value;
        let mut acc = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mul_mod(acc, base, self.modulus);
            }
            base = Self::mul_mod(base, base, self.modulus);
            e >>= 1;
        }
        Residue::new(acc, self.modulus)
    }

    fn inverse(self) -> Self {
        assert!(self.value != 0, "inverse of zero mod {}", self.modulus);
        self.pow(self.modulus - 2)
    }
}

/// An exact field element.
///
/// Arithmetic between scalars of different fields panics; the matrix layer
/// rejects mixed-field operands before reaching here.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rational),
    Prime(Residue),
}

impl Scalar {
    pub fn field(&self) -> FieldDescriptor {
        match self {
            Scalar::Rational(_) => FieldDescriptor::Rational,
            Scalar::Prime(r) => FieldDescriptor::Prime(r.modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Prime(r) => r.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Prime(r) => r.value == 1,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Prime(r) => Scalar::Prime(r.inverse()),
        })
    }

    /// Rough storage size, used to prefer small pivots.
    pub fn size_hint(&self) -> u64 {
        match self {
            Scalar::Rational(q) => q.size_hint(),
            Scalar::Prime(_) => 0,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Prime(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    /// Canonical text: `a` or `a/b` in lowest terms, or the residue.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Prime(r) => write!(f, "{}", r.value),
        }
    }
}

fn field_panic(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

macro_rules! binop {
    ($trait:ident, $method:ident, $rat:expr, $prime:expr) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;

            #[allow(clippy::suspicious_arithmetic_impl)]
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational($rat(a, b)),
                    (Scalar::Prime(a), Scalar::Prime(b)) if a.modulus == b.modulus => {
                        Scalar::Prime($prime(*a, *b))
                    }
                    _ => field_panic(self, rhs),
                }
            }
        }

        impl $trait<Scalar> for Scalar {
            type Output = Scalar;

            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(
    Add,
    add,
    |a: &Rational, b: &Rational| a + b,
    |a: Residue, b: Residue| Residue::new(
        ((a.value as u128 + b.value as u128) % a.modulus as u128) as u64,
        a.modulus
    )
);
binop!(
    Sub,
    sub,
    |a: &Rational, b: &Rational| a - b,
    |a: Residue, b: Residue| Residue::new(
        ((a.value as u128 + a.modulus as u128 - b.value as u128) % a.modulus as u128) as u64,
        a.modulus
    )
);
binop!(
    Mul,
    mul,
    |a: &Rational, b: &Rational| a * b,
    |a: Residue, b: Residue| Residue::new(Residue::mul_mod(a.value, b.value, a.modulus), a.modulus)
);
binop!(
    Div,
    div,
    |a: &Rational, b: &Rational| a / b,
    |a: Residue, b: Residue| Residue::new(Residue::mul_mod(a.value, b.inverse().value, a.modulus), a.modulus)
);

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Prime(r) => Scalar::Prime(Residue::new(r.modulus - r.value, r.modulus)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = Residue::new(a, n).pow(d).value;
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = Residue::mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
