//! Exact rational scalar used for every coordinate and coefficient.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number.
///
/// Values whose reduced numerator and denominator fit in `i128` are stored inline and
/// only spill to a heap-allocated big rational when an operation overflows.
/// Serializes as a decimal integer string (`"-3"`) or a `"p/q"` string; deserializes
/// from either of those or from a JSON integer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced, with a positive denominator and a numerator other than `i128::MIN`.
    Small(i128, i128),
    /// Only for values that do not fit `Small`.
    Big(BigRational),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    gcd_u128(a.unsigned_abs(), b.unsigned_abs()) as i128
}

impl Scalar {
    /// Normalizes `n / d` with `d != 0`, returning `None` on overflow.
    fn small(n: i128, d: i128) -> Option<Scalar> {
        let g = gcd_u128(n.unsigned_abs(), d.unsigned_abs());
        let (mut n, mut d) = if g <= 1 {
            (n, d)
        } else {
            let g = i128::try_from(g).ok()?;
            (n / g, d / g)
        };
        if d < 0 {
            n = n.checked_neg()?;
            d = d.checked_neg()?;
        }
        if n == i128::MIN {
            return None;
        }
        Some(Scalar(Repr::Small(n, d)))
    }

    fn from_ratio(r: BigRational) -> Scalar {
        if let (Some(n), Some(d)) = (r.numer().to_i128(), r.denom().to_i128()) {
            if n != i128::MIN {
                return Scalar(Repr::Small(n, d));
            }
        }
        Scalar(Repr::Big(r))
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn zero() -> Self {
        Scalar(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Scalar(Repr::Small(1, 1))
    }

    pub fn from_int(v: i64) -> Self {
        Scalar(Repr::Small(v as i128, 1))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::small(num as i128, den as i128).expect("i64 ratios fit")
    }

    pub fn from_big(r: BigRational) -> Self {
        Scalar::from_ratio(r)
    }

    pub fn to_big(&self) -> BigRational {
        self.big()
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => match r.numer().sign() {
                num_bigint::Sign::Minus => -1,
                num_bigint::Sign::NoSign => 0,
                num_bigint::Sign::Plus => 1,
            },
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                Scalar::small(*d, *n).unwrap_or_else(|| Scalar::from_ratio(self.big().recip()))
            }
            Repr::Big(r) => Scalar::from_ratio(r.recip()),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn half(&self) -> Self {
        self * &Scalar::ratio(1, 2)
    }

    /// Nearest `f64`; only for reporting and conservative filters.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) if n.unsigned_abs() < (1 << 53) && *d < (1 << 53) => *n as f64 / *d as f64,
            _ => self.big().to_f64().unwrap_or_else(|| {
                if self.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
        }
    }

    /// Largest `f64` that is certainly `<= self`.
    pub fn f64_below(&self) -> f64 {
        let v = self.to_f64();
        if v.is_finite() {
            next_down(v)
        } else {
            v
        }
    }

    /// Smallest `f64` that is certainly `>= self`.
    pub fn f64_above(&self) -> f64 {
        let v = self.to_f64();
        if v.is_finite() {
            next_up(v)
        } else {
            v
        }
    }

    fn add_ref(&self, o: &Scalar) -> Scalar {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            if *b == 1 && *d == 1 {
                if let Some(s) = a.checked_add(*c) {
                    if s != i128::MIN {
                        return Scalar(Repr::Small(s, 1));
                    }
                }
            } else {
                let g = gcd_i128(*b, *d);
                let r = (|| {
                    let (bg, dg) = (b / g, d / g);
                    let num = a.checked_mul(dg)?.checked_add(c.checked_mul(bg)?)?;
                    let den = b.checked_mul(dg)?;
                    Scalar::small(num, den)
                })();
                if let Some(r) = r {
                    return r;
                }
            }
        }
        Scalar::from_ratio(self.big() + o.big())
    }

    fn mul_ref(&self, o: &Scalar) -> Scalar {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            if *a == 0 || *c == 0 {
                return Scalar::zero();
            }
            let g1 = gcd_i128(*a, *d);
            let g2 = gcd_i128(*c, *b);
            let r = (|| {
                let num = (a / g1).checked_mul(c / g2)?;
                let den = (b / g2).checked_mul(d / g1)?;
                if num == i128::MIN {
                    return None;
                }
                Some(Scalar(Repr::Small(num, den)))
            })();
            if let Some(r) = r {
                return r;
            }
        }
        Scalar::from_ratio(self.big() * o.big())
    }

    fn div_ref(&self, o: &Scalar) -> Scalar {
        assert!(!o.is_zero(), "division by zero");
        self.mul_ref(&o.recip())
    }

    fn sub_ref(&self, o: &Scalar) -> Scalar {
        self.add_ref(&-o)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Ord for Scalar {
    fn cmp(&self, o: &Scalar) -> Ordering {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            if b == d {
                return a.cmp(c);
            }
            if let (Some(l), Some(r)) = (a.checked_mul(*d), c.checked_mul(*b)) {
                return l.cmp(&r);
            }
        }
        self.big().cmp(&o.big())
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Scalar) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

// `to_f64` is correctly rounded only up to one ulp, so widen by two ulps.
fn next_up(v: f64) -> f64 {
    let step = (v.abs() * 4.0 * f64::EPSILON).max(f64::MIN_POSITIVE);
    v + step
}

fn next_down(v: f64) -> f64 {
    let step = (v.abs() * 4.0 * f64::EPSILON).max(f64::MIN_POSITIVE);
    v - step
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<i32> for Scalar {
    fn from(v: i32) -> Self {
        Scalar::from_int(v as i64)
    }
}

impl From<BigInt> for Scalar {
    fn from(v: BigInt) -> Self {
        Scalar::from_ratio(BigRational::from_integer(v))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseScalarError(pub String);

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ParseScalarError(s.to_string());
        match t.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::from_ratio(BigRational::new(p, q)))
            }
            None => {
                let p: BigInt = t.parse().map_err(|_| bad())?;
                Ok(Scalar::from(p))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct ScalarVisitor;

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a \"p/q\" rational string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
        Ok(Scalar::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
        Ok(Scalar::from(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
        Err(E::custom(format!(
            "floating-point literal {v} not allowed; use an integer or \"p/q\""
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        if d.is_human_readable() {
            d.deserialize_any(ScalarVisitor)
        } else {
            d.deserialize_str(ScalarVisitor)
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            #[inline]
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$imp(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            #[inline]
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$imp(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            #[inline]
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$imp(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            #[inline]
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$imp(&rhs)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);
binop!(Div, div, div_ref);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small(n, d) => Scalar(Repr::Small(-n, *d)),
            Repr::Big(r) => Scalar::from_ratio(-r),
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = self.add_ref(rhs);
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = self.add_ref(&rhs);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = self.sub_ref(rhs);
    }
}

/// Pairwise summation keeps intermediate denominators small.
fn balanced_sum(mut terms: Vec<Scalar>) -> Scalar {
    if terms.is_empty() {
        return Scalar::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        terms = next;
    }
    terms.pop().unwrap()
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        balanced_sum(iter.collect())
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        balanced_sum(iter.cloned().collect())
    }
}
