//! The skewed translation-invariant comparison on subsets of `ℤ`.
//!
//! A difference `d = 1_B − 1_A` is placed in the cone when it has
//!
//! - **X1**: finitely many negative values and `Σ d ≥ 0`, where infinitely
//!   many positive values make the sum `+∞`; or
//! - **X2**: infinitely many `n > 0` with `d(n) > 0` and finitely many
//!   `n > 0` with `d(n) < 0`.
//!
//! Both properties are decidable on [`ZSet`]s, are preserved by translation,
//! and favour the positive end of `ℤ`. Anything the two properties cannot
//! settle is reported as undetermined rather than guessed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::popper::{ExchangeRate, RateEntry, TABLE_MAX_ATOMS};
use crate::qual::{CompareVerdict, QualOracle};
use crate::zset::{atoms_of, ZSet};
use crate::{int, CheckReport, Error, ExtRat, Rational, Result};

/// A finitely supported function `ℤ → ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FinFn(BTreeMap<i64, Rational>);

impl FinFn {
    pub fn zero() -> Self {
        FinFn::default()
    }

    pub fn delta(x: i64) -> Self {
        FinFn::from_pairs([(x, Rational::one())])
    }

    /// Zero values are dropped; repeated keys are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let mut m: BTreeMap<i64, Rational> = BTreeMap::new();
        for (k, v) in pairs {
            *m.entry(k).or_insert_with(Rational::zero) += v;
        }
        m.retain(|_, v| !v.is_zero());
        FinFn(m)
    }

    pub fn get(&self, x: i64) -> Rational {
        self.0.get(&x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&i64, &Rational)> {
        self.0.iter()
    }

    /// `(f * g)(x) = Σ_y f(y) g(x − y)`.
    pub fn convolve(&self, other: &FinFn) -> FinFn {
        FinFn::from_pairs(
            self.0
                .iter()
                .flat_map(|(x, a)| other.0.iter().map(move |(y, b)| (x + y, a * b))),
        )
    }

    pub fn sum(&self) -> Rational {
        self.0.values().cloned().sum()
    }

    pub fn add(&self, other: &FinFn) -> FinFn {
        FinFn::from_pairs(self.0.iter().chain(other.0.iter()).map(|(k, v)| (*k, v.clone())))
    }

    /// `x ↦ f(x − t)`, i.e. `f * δ_t`.
    pub fn translate(&self, t: i64) -> FinFn {
        FinFn(self.0.iter().map(|(k, v)| (k + t, v.clone())).collect())
    }
}

impl fmt::Display for FinFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}:{v}")?;
        }
        f.write_str("}")
    }
}

/// A function `ℤ → ℚ` taking finitely many values, each on a [`ZSet`].
/// Pieces are pairwise disjoint and carry nonzero values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleFn {
    pieces: Vec<(ZSet, Rational)>,
}

impl SimpleFn {
    /// Empty pieces and zero values are dropped. Panics on overlapping pieces.
    pub fn new(pieces: impl IntoIterator<Item = (ZSet, Rational)>) -> Self {
        let pieces: Vec<(ZSet, Rational)> = pieces
            .into_iter()
            .filter(|(s, v)| !v.is_zero() && !s.is_empty())
            .collect();
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                assert!(pieces[i].0.is_disjoint(&pieces[j].0), "pieces must be disjoint");
            }
        }
        SimpleFn { pieces }
    }

    pub fn pieces(&self) -> &[(ZSet, Rational)] {
        &self.pieces
    }

    pub fn eval(&self, x: i64) -> Rational {
        self.pieces
            .iter()
            .find(|(s, _)| s.contains(x))
            .map_or_else(Rational::zero, |(_, v)| v.clone())
    }

    pub fn neg(&self) -> SimpleFn {
        SimpleFn {
            pieces: self.pieces.iter().map(|(s, v)| (s.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> SimpleFn {
        SimpleFn::new(self.pieces.iter().map(|(s, v)| (s.clone(), v * k)))
    }

    /// Pointwise sum, by common refinement of the pieces.
    pub fn add(&self, other: &SimpleFn) -> SimpleFn {
        let sets: Vec<ZSet> = self.pieces.iter().chain(&other.pieces).map(|(s, _)| s.clone()).collect();
        let pieces = atoms_of(&sets).into_iter().map(|atom| {
            let v: Rational = self
                .pieces
                .iter()
                .chain(&other.pieces)
                .filter(|(s, _)| atom.is_subset(s))
                .map(|(_, v)| v.clone())
                .sum();
            (atom, v)
        });
        SimpleFn::new(pieces)
    }

    /// Finitely many negative values and `Σ ≥ 0` (an infinite positive part
    /// makes the sum `+∞`).
    pub fn has_x1(&self) -> bool {
        let mut sum = Rational::zero();
        let mut infinite_plus = false;
        for (s, v) in &self.pieces {
            match s.len() {
                Some(n) => sum += v * int(n as i64),
                None if v.is_negative() => return false,
                None => infinite_plus = true,
            }
        }
        infinite_plus || !sum.is_negative()
    }

    /// Positive at infinitely many `n > 0`, negative at finitely many.
    pub fn has_x2(&self) -> bool {
        let plus = self
            .pieces
            .iter()
            .any(|(s, v)| v.is_positive() && s.infinitely_many_positive());
        let minus_ok = self
            .pieces
            .iter()
            .filter(|(_, v)| v.is_negative())
            .all(|(s, _)| s.finitely_many_positive());
        plus && minus_ok
    }

    /// Membership in the decidable fragment `X1 ∨ X2`.
    pub fn in_fragment(&self) -> bool {
        self.has_x1() || self.has_x2()
    }

    /// Finitely supported with total zero.
    pub fn is_null_class(&self) -> bool {
        let mut sum = Rational::zero();
        for (s, v) in &self.pieces {
            match s.len() {
                Some(n) => sum += v * int(n as i64),
                None => return false,
            }
        }
        sum.is_zero()
    }
}

/// `1_B − 1_A`: `+1` on `B − A`, `−1` on `A − B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorDiff {
    pub plus: ZSet,
    pub minus: ZSet,
}

impl IndicatorDiff {
    pub fn between(a: &ZSet, b: &ZSet) -> Self {
        IndicatorDiff {
            plus: b.difference(a),
            minus: a.difference(b),
        }
    }

    pub fn neg(&self) -> Self {
        IndicatorDiff {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }

    pub fn to_simple(&self) -> SimpleFn {
        SimpleFn::new([(self.plus.clone(), int(1)), (self.minus.clone(), int(-1))])
    }

    pub fn eval(&self, x: i64) -> i64 {
        i64::from(self.plus.contains(x)) - i64::from(self.minus.contains(x))
    }

    pub fn has_x1(&self) -> bool {
        self.to_simple().has_x1()
    }

    pub fn has_x2(&self) -> bool {
        self.to_simple().has_x2()
    }

    pub fn in_fragment(&self) -> bool {
        self.to_simple().in_fragment()
    }
}

/// Decides `A` against `B` from `d = 1_B − 1_A`: `d` and `−d` in the
/// fragment gives `Equiv`, only `d` gives `Less`, only `−d` gives
/// `Greater`, neither is undetermined.
pub fn c0_compare(a: &ZSet, b: &ZSet) -> CompareVerdict {
    let d = IndicatorDiff::between(a, b).to_simple();
    match (d.in_fragment(), d.neg().in_fragment()) {
        (true, true) => {
            debug_assert!(d.is_null_class());
            CompareVerdict::Equiv
        }
        (true, false) => CompareVerdict::Less,
        (false, true) => CompareVerdict::Greater,
        (false, false) => CompareVerdict::Undetermined,
    }
}

/// [`c0_compare`] as an oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConeOracle;

impl QualOracle<ZSet> for ConeOracle {
    fn compare(&self, a: &ZSet, b: &ZSet) -> CompareVerdict {
        c0_compare(a, b)
    }
    fn claims_total(&self) -> bool {
        true
    }
    fn claims_regular(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "cone".into()
    }
}

/// `γ(1_A, 1_B)`, or why it is not available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaValue {
    Value(ExtRat),
    /// Both sets are empty.
    Undefined,
    /// The fragment only pins `γ` to `[lower, upper]`.
    Undetermined { lower: Rational, upper: ExtRat },
}

impl GammaValue {
    pub fn value(&self) -> Option<&ExtRat> {
        match self {
            GammaValue::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaValue::Value(v) => write!(f, "{v}"),
            GammaValue::Undefined => f.write_str("undefined"),
            GammaValue::Undetermined { lower, upper } => write!(f, "undetermined in [{lower}, {upper}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `1_A ≲ α·1_B` is decided true.
    In,
    /// Decided false.
    Out,
    Unknown,
}

fn side(a: &ZSet, b: &ZSet, alpha: &Rational) -> Side {
    let h = SimpleFn::new([
        (a.intersection(b), alpha - int(1)),
        (b.difference(a), alpha.clone()),
        (a.difference(b), int(-1)),
    ]);
    if h.in_fragment() {
        Side::In
    } else if h.neg().in_fragment() {
        Side::Out
    } else {
        Side::Unknown
    }
}

/// `γ(1_A, 1_B) = inf {α : 1_A ≲ α·1_B}`.
///
/// With `h(α) = α·1_B − 1_A` the values of `h` are `α − 1`, `α` and `−1` on
/// `A∩B`, `B−A` and `A−B`. Fragment membership can only change where one of
/// those values changes sign (`α = 0, 1`) or, for finite `A` and `B`, where
/// `Σh = α|B| − |A|` does. Checking each breakpoint and one point inside
/// each gap therefore decides membership for every `α`. Negative `α` are
/// always out since `h` is then non-positive and nonzero.
pub fn gamma_indicator(a: &ZSet, b: &ZSet) -> GammaValue {
    if b.is_empty() {
        return if a.is_empty() {
            GammaValue::Undefined
        } else {
            GammaValue::Value(ExtRat::Infinite)
        };
    }
    let mut breaks: Vec<Rational> = alloc::vec![Rational::zero(), Rational::one()];
    if let (Some(na), Some(nb)) = (a.len(), b.len()) {
        breaks.push(Rational::new((na as i64).into(), (nb as i64).into()));
    }
    breaks.sort();
    breaks.dedup();

    // (infimum of the segment, sample point)
    let mut segments: Vec<(Rational, Rational)> = Vec::new();
    for (i, x) in breaks.iter().enumerate() {
        segments.push((x.clone(), x.clone()));
        let mid = match breaks.get(i + 1) {
            Some(y) => (x + y) / int(2),
            None => x + int(1),
        };
        segments.push((x.clone(), mid));
    }

    let sides: Vec<Side> = segments.iter().map(|(_, s)| side(a, b, s)).collect();
    let first_in = sides.iter().position(|s| *s == Side::In);
    let first_not_out = sides.iter().position(|s| *s != Side::Out);
    match (first_in, first_not_out) {
        (None, None) => GammaValue::Value(ExtRat::Infinite),
        (Some(i), Some(j)) if i == j => GammaValue::Value(ExtRat::finite(segments[i].0.clone())),
        (upper, Some(j)) => GammaValue::Undetermined {
            lower: segments[j].0.clone(),
            upper: upper.map_or(ExtRat::Infinite, |i| ExtRat::finite(segments[i].0.clone())),
        },
        (Some(_), None) => unreachable!("an In segment is not Out"),
    }
}

/// `P(A | B) = γ(1_{A∩B}, 1_B)`.
pub fn skew_popper(a: &ZSet, b: &ZSet) -> Result<GammaValue> {
    if b.is_empty() {
        return Err(Error::EmptyTarget);
    }
    Ok(gamma_indicator(&a.intersection(b), b))
}

/// Additivity of `γ(·, 1_C)` over disjoint `A, B`, the cocycle
/// `γ(A,C) = γ(A,B)·γ(B,C)` where the product is defined, and `γ(C,C) = 1`.
/// Legs the fragment leaves undetermined are skipped and noted.
pub fn gamma_law_check(a: &ZSet, b: &ZSet, c: &ZSet) -> CheckReport {
    let mut rep = CheckReport::new("gamma laws");
    let g = gamma_indicator;
    if !c.is_empty() {
        let cc = g(c, c);
        rep.check(cc == GammaValue::Value(ExtRat::one()), "self", || format!("γ(C, C) = {cc} for C = {c}"));
        if a.is_disjoint(b) {
            match (g(&a.union(b), c), g(a, c), g(b, c)) {
                (GammaValue::Value(u), GammaValue::Value(x), GammaValue::Value(y)) => {
                    let s = &x + &y;
                    rep.check(u == s, "additive", || {
                        format!("γ(A∪B, C) = {u} but γ(A, C) + γ(B, C) = {x} + {y} for A = {a}, B = {b}, C = {c}")
                    });
                }
                legs => {
                    rep.skipped += 1;
                    rep.note(format!("additivity skipped: legs {} / {} / {}", legs.0, legs.1, legs.2));
                }
            }
        } else {
            rep.note("additivity skipped: A and B overlap");
        }
    }
    match (g(a, b), g(b, c), g(a, c)) {
        (GammaValue::Value(x), GammaValue::Value(y), lhs) => match x.checked_mul(&y) {
            Ok(prod) => rep.check(lhs == GammaValue::Value(prod.clone()), "cocycle", || {
                format!("γ(A, C) = {lhs} but γ(A, B)·γ(B, C) = {x}·{y} = {prod} for A = {a}, B = {b}, C = {c}")
            }),
            Err(_) => rep.skipped += 1,
        },
        (x, y, _) => {
            if matches!(x, GammaValue::Undetermined { .. }) || matches!(y, GammaValue::Undetermined { .. }) {
                rep.undetermined += 1;
                rep.note(format!("cocycle skipped: γ(A, B) = {x}, γ(B, C) = {y}"));
            } else {
                rep.skipped += 1;
            }
        }
    }
    rep
}

/// The exchange rate `c(X, Y) = γ(1_X, 1_Y)` on the algebra generated by
/// `family`, with the atoms it was built on.
pub fn cone_exchange_rate(family: &[ZSet]) -> Result<(Vec<ZSet>, ExchangeRate)> {
    let atoms = atoms_of(family);
    if atoms.len() > TABLE_MAX_ATOMS {
        return Err(Error::AlgebraTooLarge {
            atoms: atoms.len(),
            limit: TABLE_MAX_ATOMS,
        });
    }
    let union = |m: u32| -> ZSet {
        atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| m >> k & 1 == 1)
            .fold(ZSet::empty(), |acc, (_, s)| acc.union(s))
    };
    let members: Vec<ZSet> = (0..1u32 << atoms.len()).map(union).collect();
    let rate = ExchangeRate::from_fn(atoms.len(), |x, y| {
        match gamma_indicator(&members[x as usize], &members[y as usize]) {
            GammaValue::Value(v) => RateEntry::Value(v),
            GammaValue::Undefined => RateEntry::Undefined,
            GammaValue::Undetermined { .. } => RateEntry::Undetermined,
        }
    })?;
    Ok((atoms, rate))
}

/// `P(A+t | B+t) = P(A | B)` over the family and shifts.
pub fn skew_weak_invariance(family: &[ZSet], shifts: &[i64]) -> CheckReport {
    let mut rep = CheckReport::new("weak translation invariance (skew conditional)");
    for &t in shifts {
        for a in family {
            for b in family.iter().filter(|b| !b.is_empty()) {
                let x = skew_popper(a, b).expect("nonempty condition");
                let y = skew_popper(&a.translate(t), &b.translate(t)).expect("nonempty condition");
                if matches!(x, GammaValue::Undetermined { .. }) {
                    rep.undetermined += 1;
                }
                rep.check(x == y, "weak", || format!("t={t:+}: P({a} | {b}) = {x} but after shifting it is {y}"));
            }
        }
    }
    rep
}
