//! Exact rational scalars with an inline fast path for machine integers.
//!
//! Almost every coefficient that shows up while building pull-back forms is a
//! small integer, so `Q` keeps those in an `i64` and only promotes to a
//! `BigRational` on overflow or when a genuine fraction appears.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub enum Q {
    Int(i64),
    Big(BigRational),
}

impl Q {
    pub fn zero() -> Self {
        Q::Int(0)
    }

    pub fn one() -> Self {
        Q::Int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Q::Int(v)
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Q::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        if r.is_integer() {
            if let Some(v) = r.numer().to_i64() {
                return Q::Int(v);
            }
        }
        Q::Big(r)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        match v.to_i64() {
            Some(s) => Q::Int(s),
            None => Q::Big(BigRational::from_integer(v)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Int(v) => BigRational::from_integer(BigInt::from(*v)),
            Q::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Int(v) => *v == 0,
            Q::Big(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Int(1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Int(_) => true,
            Q::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Int(v) => *v < 0,
            Q::Big(r) => r.is_negative(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::Int(v) => BigInt::from(*v),
            Q::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::Int(_) => BigInt::one(),
            Q::Big(r) => r.denom().clone(),
        }
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "reciprocal of zero");
        Q::from_big(self.to_big().recip())
    }

    pub fn pow(&self, e: u32) -> Q {
        let mut acc = Q::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Q::Int(v) => *v as f64,
            Q::Big(r) => {
                // ratio of big integers may overflow f64 individually
                let n = r.numer();
                let d = r.denom();
                match (n.to_f64(), d.to_f64()) {
                    (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
                    _ => {
                        let shift = (d.bits() as i64 - 60).max(0) as u64;
                        let nn = (n >> shift).to_f64().unwrap_or(f64::NAN);
                        let dd = (d >> shift).to_f64().unwrap_or(f64::NAN);
                        nn / dd
                    }
                }
            }
        }
    }

    /// Best rational approximation with denominator at most `max_den`.
    pub fn approximate(x: f64, max_den: i64) -> Q {
        if !x.is_finite() {
            return Q::zero();
        }
        let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
        let mut v = x.abs();
        for _ in 0..64 {
            let a = v.floor();
            if a > 1e15 {
                break;
            }
            let a = a as i128;
            let p2 = a * p1 + p0;
            let q2 = a * q1 + q0;
            if q2 > max_den as i128 {
                break;
            }
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            let frac = v - v.floor();
            if frac < 1e-12 {
                break;
            }
            v = 1.0 / frac;
        }
        let sign = if x < 0.0 { -1 } else { 1 };
        Q::new((sign * p1) as i64, q1.max(1) as i64)
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::zero()
    }
}

impl PartialEq for Q {
    fn eq(&self, other: &Q) -> bool {
        match (self, other) {
            (Q::Int(a), Q::Int(b)) => a == b,
            // normalised: Big never holds an i64-representable integer
            (Q::Int(_), Q::Big(_)) | (Q::Big(_), Q::Int(_)) => false,
            (Q::Big(a), Q::Big(b)) => a == b,
        }
    }
}

impl Eq for Q {}

impl std::hash::Hash for Q {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Q::Int(v) => v.hash(state),
            Q::Big(r) => r.hash(state),
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Int(a), Q::Int(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Self {
        Q::Int(v)
    }
}

impl From<i32> for Q {
    fn from(v: i32) -> Self {
        Q::Int(v as i64)
    }
}

impl From<u32> for Q {
    fn from(v: u32) -> Self {
        Q::Int(v as i64)
    }
}

impl From<usize> for Q {
    fn from(v: usize) -> Self {
        Q::from_bigint(BigInt::from(v))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Int(v) => write!(f, "{v}"),
            Q::Big(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal `{0}`")]
pub struct ParseQError(pub String);

impl FromStr for Q {
    type Err = ParseQError;

    fn from_str(s: &str) -> Result<Q, ParseQError> {
        let err = || ParseQError(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Q::from_big(BigRational::new(n, d)))
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Int(v) => match v.checked_neg() {
                Some(r) => Q::Int(r),
                None => Q::from_big(-BigRational::from_integer(BigInt::from(v))),
            },
            Q::Big(r) => Q::from_big(-r),
        }
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        -(self.clone())
    }
}

impl<'a> Add<&'a Q> for &'a Q {
    type Output = Q;
    fn add(self, rhs: &Q) -> Q {
        if let (Q::Int(a), Q::Int(b)) = (self, rhs) {
            if let Some(r) = a.checked_add(*b) {
                return Q::Int(r);
            }
        }
        Q::from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Q> for &'a Q {
    type Output = Q;
    fn sub(self, rhs: &Q) -> Q {
        if let (Q::Int(a), Q::Int(b)) = (self, rhs) {
            if let Some(r) = a.checked_sub(*b) {
                return Q::Int(r);
            }
        }
        Q::from_big(self.to_big() - rhs.to_big())
    }
}

impl<'a> Mul<&'a Q> for &'a Q {
    type Output = Q;
    fn mul(self, rhs: &Q) -> Q {
        if let (Q::Int(a), Q::Int(b)) = (self, rhs) {
            if let Some(r) = a.checked_mul(*b) {
                return Q::Int(r);
            }
        }
        Q::from_big(self.to_big() * rhs.to_big())
    }
}

impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        assert!(!rhs.is_zero(), "division by zero");
        if let (Q::Int(a), Q::Int(b)) = (self, rhs) {
            if *b != 0 && a.is_multiple_of(b) {
                if let Some(r) = a.checked_div(*b) {
                    return Q::Int(r);
                }
            }
        }
        Q::from_big(self.to_big() / rhs.to_big())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Q> for Q {
            type Output = Q;
            fn $m(self, rhs: Q) -> Q {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Q> for Q {
            type Output = Q;
            fn $m(self, rhs: &Q) -> Q {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        if let (Q::Int(a), Q::Int(b)) = (&mut *self, rhs) {
            if let Some(r) = a.checked_add(*b) {
                *a = r;
                return;
            }
        }
        *self = &*self + rhs;
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, rhs: &Q) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Q> for Q {
    fn mul_assign(&mut self, rhs: &Q) {
        *self = &*self * rhs;
    }
}

impl Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        let mut acc = Q::zero();
        for v in iter {
            acc += &v;
        }
        acc
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_to_big() {
        let a = Q::Int(i64::MAX);
        let b = &a + &Q::one();
        assert!(matches!(b, Q::Big(_)));
        assert_eq!(&b - &Q::one(), a);
        let sq = &a * &a;
        assert_eq!(&sq / &a, a);
    }

    #[test]
    fn parse_and_display() {
        let q: Q = "-6/4".parse().unwrap();
        assert_eq!(q.to_string(), "-3/2");
        let i: Q = "12".parse().unwrap();
        assert_eq!(i, Q::Int(12));
        assert!("1/0".parse::<Q>().is_err());
        assert!("1.5".parse::<Q>().is_err());
    }

    #[test]
    fn fraction_arithmetic_normalises() {
        let h = Q::new(1, 2);
        assert_eq!(&h + &h, Q::one());
        assert_eq!(Q::new(4, 2), Q::Int(2));
    }

    #[test]
    fn approximation_recovers_small_fractions() {
        assert_eq!(Q::approximate(0.75, 100), Q::new(3, 4));
        assert_eq!(Q::approximate(-2.0000000000001, 100), Q::Int(-2));
    }
}
