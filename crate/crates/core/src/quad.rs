//! Numbers of the form `p + q·r` with `r = √2/4`, `p` rational and `q` integer.
//!
//! `r` is the irrational translation step of the interval example. Since `√2`
//! is irrational, `(p, q)` is a unique representation, so structural equality
//! is numeric equality. Ordering is decided exactly by sign analysis and
//! squaring: `(q·√2/4)² = q²/8`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::{ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    /// Rational part.
    pub p: Rational,
    /// Coefficient of `√2/4`.
    pub q: i64,
}

impl Quad {
    pub fn new(p: Rational, q: i64) -> Self {
        Quad { p, q }
    }

    pub fn rational(p: Rational) -> Self {
        Quad { p, q: 0 }
    }

    /// The irrational step `r = √2/4 ∈ (0, 1/2)`.
    pub fn r() -> Self {
        Quad {
            p: Rational::zero(),
            q: 1,
        }
    }

    pub fn zero() -> Self {
        Quad::rational(Rational::zero())
    }

    /// Sign of `self - c`.
    pub fn cmp_rational(&self, c: &Rational) -> Ordering {
        sign_of(&(&self.p - c), self.q)
    }

    /// `lo ≤ self ≤ hi`.
    pub fn within(&self, lo: &Rational, hi: &Rational) -> bool {
        self.cmp_rational(lo) != Ordering::Less && self.cmp_rational(hi) != Ordering::Greater
    }
}

/// Sign of `a + b·√2/4`.
fn sign_of(a: &Rational, b: i64) -> Ordering {
    let sa = a.cmp(&Rational::zero());
    let sb = b.cmp(&0);
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // Opposite signs: compare a² against b²/8; equality is impossible.
    let b2 = Rational::from_integer(BigInt::from(b) * BigInt::from(b)) * ratio(1, 8);
    let a2 = a.abs() * a.abs();
    if a2 > b2 {
        sa
    } else {
        sb
    }
}

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        let dq = self.q - other.q;
        sign_of(&(&self.p - &other.p), dq)
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Quad {
    type Output = Quad;
    fn add(self, rhs: &Quad) -> Quad {
        Quad::new(&self.p + &rhs.p, self.q + rhs.q)
    }
}

impl Sub for &Quad {
    type Output = Quad;
    fn sub(self, rhs: &Quad) -> Quad {
        Quad::new(&self.p - &rhs.p, self.q - rhs.q)
    }
}

impl Neg for &Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad::new(-&self.p, -self.q)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q) {
            (_, 0) => write!(f, "{}", self.p),
            (true, 1) => f.write_str("r"),
            (true, q) => write!(f, "{q}r"),
            (false, q) if q > 0 => write!(f, "{}+{}r", self.p, q),
            (false, q) => write!(f, "{}{}r", self.p, q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;

    #[test]
    fn three_r_exceeds_one() {
        // 3·√2/4 > 1  ⟺  9/8 > 1
        let three_r = Quad::new(Rational::zero(), 3);
        assert_eq!(three_r.cmp_rational(&int(1)), Ordering::Greater);
        let two_r = Quad::new(Rational::zero(), 2);
        assert_eq!(two_r.cmp_rational(&int(1)), Ordering::Less);
    }

    #[test]
    fn mixed_sign_comparisons() {
        // 2r - 1/2 ≈ 0.207 is positive, r - 1/2 ≈ -0.146 is negative
        assert_eq!(Quad::new(ratio(-1, 2), 2).cmp_rational(&int(0)), Ordering::Greater);
        assert_eq!(Quad::new(ratio(-1, 2), 1).cmp_rational(&int(0)), Ordering::Less);
        assert!(Quad::new(ratio(-1, 2), 2).within(&int(0), &int(1)));
    }

    #[test]
    fn order_is_numeric() {
        let a = Quad::new(ratio(1, 2), -1); // ≈ 0.146
        let b = Quad::new(ratio(0, 1), 1); // ≈ 0.354
        assert!(a < b);
        assert!(Quad::r() < Quad::rational(ratio(1, 2)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(alloc::format!("{}", Quad::new(ratio(-1, 2), 2)), "-1/2+2r");
        assert_eq!(alloc::format!("{}", Quad::r()), "r");
        assert_eq!(alloc::format!("{}", Quad::rational(ratio(3, 4))), "3/4");
    }
}
