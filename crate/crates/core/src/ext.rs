//! Non-negative extended rationals `ℚ≥0 ∪ {∞}`.
//!
//! Addition is total. Products `0·∞` and quotients `0/0`, `∞/∞` are
//! undefined and come back as [`Undefined`] instead of a value.

use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Marker for an undefined extended-arithmetic result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Undefined;

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("undefined")
    }
}

/// A value in `[0, ∞]` with exact rational finite part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRat {
    Finite(Rational),
    Infinite,
}

impl ExtRat {
    /// Wraps a finite value. Panics if it is negative.
    pub fn finite(value: Rational) -> Self {
        assert!(!value.is_negative(), "ExtRat holds non-negative values only");
        ExtRat::Finite(value)
    }

    pub fn zero() -> Self {
        ExtRat::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtRat::Finite(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRat::Finite(v) if v.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRat::Infinite)
    }

    /// `0 < self < ∞`.
    pub fn is_positive_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(v) if v.is_positive())
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtRat::Finite(v) => Some(v),
            ExtRat::Infinite => None,
        }
    }

    pub fn checked_mul(&self, other: &ExtRat) -> Result<ExtRat, Undefined> {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => Ok(ExtRat::Finite(a * b)),
            (ExtRat::Infinite, x) | (x, ExtRat::Infinite) => {
                if x.is_zero() {
                    Err(Undefined)
                } else {
                    Ok(ExtRat::Infinite)
                }
            }
        }
    }

    /// `x/0 = ∞` for `x ≠ 0`; `0/0` and `∞/∞` are undefined.
    pub fn checked_div(&self, other: &ExtRat) -> Result<ExtRat, Undefined> {
        match (self, other) {
            (ExtRat::Infinite, ExtRat::Infinite) => Err(Undefined),
            (ExtRat::Infinite, _) => Ok(ExtRat::Infinite),
            (ExtRat::Finite(_), ExtRat::Infinite) => Ok(ExtRat::zero()),
            (ExtRat::Finite(a), ExtRat::Finite(b)) => {
                if b.is_zero() {
                    if a.is_zero() {
                        Err(Undefined)
                    } else {
                        Ok(ExtRat::Infinite)
                    }
                } else {
                    Ok(ExtRat::Finite(a / b))
                }
            }
        }
    }
}

impl From<Rational> for ExtRat {
    fn from(value: Rational) -> Self {
        ExtRat::finite(value)
    }
}

impl Add for &ExtRat {
    type Output = ExtRat;

    fn add(self, rhs: &ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Infinite,
        }
    }
}

impl Add for ExtRat {
    type Output = ExtRat;

    fn add(self, rhs: ExtRat) -> ExtRat {
        &self + &rhs
    }
}

impl core::iter::Sum for ExtRat {
    fn sum<I: Iterator<Item = ExtRat>>(iter: I) -> ExtRat {
        iter.fold(ExtRat::zero(), |acc, x| acc + x)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            (ExtRat::Finite(_), ExtRat::Infinite) => Ordering::Less,
            (ExtRat::Infinite, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Infinite, ExtRat::Infinite) => Ordering::Equal,
        }
    }
}

/// Renders `"3/7"`, `"2"` or `"inf"`.
impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(v) => write!(f, "{v}"),
            ExtRat::Infinite => f.write_str("inf"),
        }
    }
}
