use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A weight or function value: exact rational when possible, double otherwise.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Real(f64),
}

impl Scalar {
    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(BigRational::new(n.into(), d.into()))
    }

    /// `(2r−1)^exponent`.
    pub fn power_of_base(rank: usize, exponent: i64) -> Self {
        Scalar::Exact(crate::boundary::power_of_base(rank, exponent))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Real(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Real(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Real(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Real(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Real(x) => Scalar::Real(x.abs()),
        }
    }

    /// Division; `None` on a zero divisor.
    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Real(self.to_f64() / rhs.to_f64()),
        })
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other.partial_cmp(&self) == Some(Ordering::Greater) {
            other
        } else {
            self
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Real(self.to_f64() * rhs.to_f64()),
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;

    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Real(self.to_f64() - rhs.to_f64()),
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;

    /// Panics on an exact zero divisor; use [`Scalar::checked_div`] otherwise.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).unwrap_or(Scalar::Real(self.to_f64() / rhs.to_f64()))
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Real(x) => Scalar::Real(-x),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Running sum that stays exact while every term is exact and falls back to
/// Neumaier-compensated double summation after the first inexact term.
#[derive(Debug, Clone)]
pub struct Accumulator {
    exact: BigRational,
    real: Option<(f64, f64)>,
}

impl Default for Accumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl Accumulator {
    pub fn new() -> Self {
        Accumulator {
            exact: BigRational::zero(),
            real: None,
        }
    }

    pub fn add(&mut self, x: &Scalar) {
        match (x, &mut self.real) {
            (Scalar::Exact(q), None) => self.exact += q,
            _ => {
                let (sum, comp) = self
                    .real
                    .get_or_insert_with(|| (self.exact.to_f64().unwrap_or(f64::NAN), 0.0));
                let v = x.to_f64();
                let t = *sum + v;
                if sum.abs() >= v.abs() {
                    *comp += (*sum - t) + v;
                } else {
                    *comp += (v - t) + *sum;
                }
                *sum = t;
            }
        }
    }

    pub fn add_product(&mut self, a: &Scalar, b: &Scalar) {
        self.add(&(a * b));
    }

    pub fn value(&self) -> Scalar {
        match self.real {
            None => Scalar::Exact(self.exact.clone()),
            Some((s, c)) => Scalar::Real(s + c),
        }
    }
}

/// Compensated sum of doubles.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Accumulator::new();
    acc.real = Some((0.0, 0.0));
    for v in values {
        acc.add(&Scalar::Real(v));
    }
    acc.value().to_f64()
}
