//! Exact rational scalars and their extension by ±∞.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational number, always held in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`. Panics if `den == 0`.
    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    pub fn signum(&self) -> Ordering {
        self.0.cmp(&BigRational::zero())
    }

    pub fn max_of(a: &Scalar, b: &Scalar) -> Scalar {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min_of(a: &Scalar, b: &Scalar) -> Scalar {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// `floor(self)` as an integer scalar.
    pub fn floor(&self) -> Scalar {
        Scalar(self.0.floor())
    }

    pub fn ceil(&self) -> Scalar {
        Scalar(self.0.ceil())
    }
}

/// Inner product of two equal-length slices.
pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.0.is_zero() && !y.0.is_zero() {
            acc += &x.0 * &y.0;
        }
    }
    Scalar(acc)
}

/// Parses a slice of rational literals.
pub fn parse_vec<S: AsRef<str>>(items: &[S]) -> Result<Vec<Scalar>, Error> {
    items.iter().map(|s| s.as_ref().parse()).collect()
}

/// Convenience constructor for integer vectors, used heavily in tests.
pub fn ivec(items: &[i64]) -> Vec<Scalar> {
    items.iter().map(|&v| Scalar::from_int(v)).collect()
}

/// Scales a nonzero vector by a positive factor so that its entries are
/// coprime integers. The zero vector is returned unchanged.
pub fn primitive(v: &[Scalar]) -> Vec<Scalar> {
    let mut lcm = BigInt::one();
    for x in v {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = g.gcd(i);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|i| Scalar(BigRational::from_integer(i / &g)))
        .collect()
}

/// Scales a nonzero direction so its first nonzero entry has absolute value one.
pub fn normalize_direction(v: &[Scalar]) -> Vec<Scalar> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(lead) => {
            let s = lead.abs().recip();
            v.iter().map(|x| x * &s).collect()
        }
        None => v.to_vec(),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `"p"` or `"p/q"` with optional sign on `p`; `q` must be a
    /// positive integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(s.to_string());
        let t = s.trim();
        let int = |u: &str, allow_sign: bool| -> Result<BigInt, Error> {
            let digits = if allow_sign {
                u.strip_prefix(['-', '+']).unwrap_or(u)
            } else {
                u
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            u.parse::<BigInt>().map_err(|_| bad())
        };
        match t.split_once('/') {
            None => Ok(Scalar(BigRational::from_integer(int(t, true)?))),
            Some((p, q)) => {
                let num = int(p, true)?;
                let den = int(q, false)?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar(BigRational::new(num, den)))
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $assign_tr<Scalar> for Scalar {
            fn $assign(&mut self, rhs: Scalar) {
                self.0.$assign(rhs.0);
            }
        }
        impl<'a> $assign_tr<&'a Scalar> for Scalar {
            fn $assign(&mut self, rhs: &'a Scalar) {
                self.0.$assign(&rhs.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        Scalar(self.0 / &rhs.0)
    }
}

impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        Scalar(&self.0 / rhs.0)
    }
}

impl<'b> Div<&'b Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'b Scalar) -> Scalar {
        Scalar(&self.0 / &rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// A rational extended by the two infinities. Function values use only
/// `Finite` and `PosInfinity`; suprema and infima may take either sign.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Extended {
    NegInfinity,
    Finite(Scalar),
    PosInfinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// True iff the value is strictly greater than zero (including +∞).
    pub fn is_positive(&self) -> bool {
        match self {
            Extended::PosInfinity => true,
            Extended::Finite(v) => v.is_positive(),
            Extended::NegInfinity => false,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        use Extended::*;
        match (self, other) {
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (_, NegInfinity) | (PosInfinity, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInfinity => f.write_str("-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInfinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        match s.as_str() {
            "-inf" => Ok(Extended::NegInfinity),
            "+inf" => Ok(Extended::PosInfinity),
            other => other
                .parse()
                .map(Extended::Finite)
                .map_err(serde::de::Error::custom),
        }
    }
}
