//! Exact construction and verification of invariant non-classical probabilities.
//!
//! The crate works with a group `G` acting on a space `Ω*` and a subspace
//! `Ω ⊆ Ω*` on which probabilities live. Moves that leave `Ω` are simply
//! undefined there, which makes every action here a *partial* action on `Ω`.
//!
//! Modules, bottom-up:
//!
//! - [`action`]: symbolic points, generators, words, orbit closures and the
//!   partial-action axioms.
//! - [`equidecomp`]: equidecomposability of finite sets (matching), ray
//!   decompositions and cylinder-set paradox witnesses.
//! - [`measures`]: `[0, ∞]`-valued measures on finite algebras, the Rényi
//!   order, level stacks and finite-stage net measures.
//! - [`popper`]: full conditional probabilities and coherent exchange rates.
//! - [`qual`]: qualitative comparison oracles and their verifiers.
//! - [`zset`] and [`cone`]: decidable subsets of `ℤ` and the skewed
//!   translation-invariant comparison built from the X1/X2 cone fragment.
//!
//! Everything is exact. Rationals are arbitrary precision and irrational
//! translation steps are handled symbolically (see [`quad`]).

#![no_std]

extern crate alloc;

pub mod action;
pub mod cone;
pub mod equidecomp;
mod error;
pub mod ext;
pub mod measures;
pub mod popper;
pub mod quad;
pub mod qual;
pub mod report;
pub mod zset;

pub use error::{Error, Result};
pub use ext::{ExtRat, Undefined};
pub use quad::Quad;
pub use report::{CheckReport, Violation};

/// Exact rational number used throughout the crate.
pub type Rational = num_rational::BigRational;

/// Builds the rational `num/den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Builds the integer-valued rational `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
