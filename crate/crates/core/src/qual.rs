//! Qualitative probabilities: comparison oracles, their axiom and
//! invariance verifiers, and the lexicographic-maximum order on ℤ.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::action::{order_on_sample, order_sample, Action, FiniteSpace, GroupWord};
use crate::measures::{FinAlgebra, Member};
use crate::popper::PopperTable;
use crate::zset::ZSet;
use crate::{CheckReport, Error, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareVerdict {
    Less,
    Greater,
    Equiv,
    Incomparable,
    /// Outside what the oracle can decide.
    Undetermined,
}

impl CompareVerdict {
    /// The verdict with the arguments swapped.
    pub fn flip(self) -> Self {
        match self {
            CompareVerdict::Less => CompareVerdict::Greater,
            CompareVerdict::Greater => CompareVerdict::Less,
            v => v,
        }
    }

    /// Whether `A ≲ B`, or `None` if undetermined.
    pub fn le(self) -> Option<bool> {
        match self {
            CompareVerdict::Less | CompareVerdict::Equiv => Some(true),
            CompareVerdict::Greater | CompareVerdict::Incomparable => Some(false),
            CompareVerdict::Undetermined => None,
        }
    }

    pub fn from_ordering(o: core::cmp::Ordering) -> Self {
        match o {
            core::cmp::Ordering::Less => CompareVerdict::Less,
            core::cmp::Ordering::Equal => CompareVerdict::Equiv,
            core::cmp::Ordering::Greater => CompareVerdict::Greater,
        }
    }
}

impl fmt::Display for CompareVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareVerdict::Less => "less",
            CompareVerdict::Greater => "greater",
            CompareVerdict::Equiv => "equiv",
            CompareVerdict::Incomparable => "incomparable",
            CompareVerdict::Undetermined => "undetermined",
        })
    }
}

/// Sets an oracle can compare.
pub trait EventSet: Clone + PartialEq + fmt::Display {
    fn empty() -> Self;
    fn union(&self, other: &Self) -> Self;
    fn intersection(&self, other: &Self) -> Self;
    fn is_empty(&self) -> bool;
}

impl EventSet for ZSet {
    fn empty() -> Self {
        ZSet::empty()
    }
    fn union(&self, other: &Self) -> Self {
        ZSet::union(self, other)
    }
    fn intersection(&self, other: &Self) -> Self {
        ZSet::intersection(self, other)
    }
    fn is_empty(&self) -> bool {
        ZSet::is_empty(self)
    }
}

/// A member of a finite algebra, by atom bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mask(pub Member);

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.0)
    }
}

impl EventSet for Mask {
    fn empty() -> Self {
        Mask(0)
    }
    fn union(&self, other: &Self) -> Self {
        Mask(self.0 | other.0)
    }
    fn intersection(&self, other: &Self) -> Self {
        Mask(self.0 & other.0)
    }
    fn is_empty(&self) -> bool {
        self.0 == 0
    }
}

/// A comparison relation `≲` together with the properties it claims.
pub trait QualOracle<S> {
    fn compare(&self, a: &S, b: &S) -> CompareVerdict;
    fn claims_total(&self) -> bool {
        false
    }
    fn claims_regular(&self) -> bool {
        false
    }
    fn name(&self) -> String {
        "oracle".into()
    }
}

impl<S, O: QualOracle<S> + ?Sized> QualOracle<S> for Box<O> {
    fn compare(&self, a: &S, b: &S) -> CompareVerdict {
        (**self).compare(a, b)
    }
    fn claims_total(&self) -> bool {
        (**self).claims_total()
    }
    fn claims_regular(&self) -> bool {
        (**self).claims_regular()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<S, O: QualOracle<S> + ?Sized> QualOracle<S> for &O {
    fn compare(&self, a: &S, b: &S) -> CompareVerdict {
        (**self).compare(a, b)
    }
    fn claims_total(&self) -> bool {
        (**self).claims_total()
    }
    fn claims_regular(&self) -> bool {
        (**self).claims_regular()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// Partial maps on sets, one per group element under test.
pub trait SetAction<S> {
    fn count(&self) -> usize;
    /// `g·s`, or `None` when the image leaves the scope.
    fn image(&self, g: usize, s: &S) -> Option<S>;
    fn label(&self, g: usize) -> String;
}

/// Integer translations of subsets of `ℤ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translations(pub Vec<i64>);

impl SetAction<ZSet> for Translations {
    fn count(&self) -> usize {
        self.0.len()
    }
    fn image(&self, g: usize, s: &ZSet) -> Option<ZSet> {
        Some(s.translate(self.0[g]))
    }
    fn label(&self, g: usize) -> String {
        format!("{:+}", self.0[g])
    }
}

/// The moves of a finite space acting on the members of an algebra.
pub struct AlgebraMoves<'a> {
    pub space: &'a FiniteSpace,
    pub algebra: &'a FinAlgebra,
}

impl SetAction<Mask> for AlgebraMoves<'_> {
    fn count(&self) -> usize {
        self.space.moves.len()
    }
    fn image(&self, g: usize, s: &Mask) -> Option<Mask> {
        self.algebra.image(self.space, g, s.0).map(Mask)
    }
    fn label(&self, g: usize) -> String {
        self.space.moves[g].label.clone()
    }
}

/// Q1–Q3 over `family`, plus totality and regularity when claimed.
///
/// Unions for Q3 are formed on the fly, so the family need not be closed.
/// Undetermined verdicts are counted separately and never fail a rule.
pub fn verify_qual_axioms<S: EventSet, O: QualOracle<S> + ?Sized>(o: &O, family: &[S]) -> CheckReport {
    let mut rep = CheckReport::new(format!("qualitative axioms ({})", o.name()));
    let n = family.len();
    let mut v = alloc::vec![alloc::vec![CompareVerdict::Undetermined; n]; n];
    for i in 0..n {
        for j in 0..n {
            v[i][j] = o.compare(&family[i], &family[j]);
        }
    }
    let le = |i: usize, j: usize| v[i][j].le();

    for i in 0..n {
        for j in 0..n {
            if v[i][j] == CompareVerdict::Undetermined || v[j][i] == CompareVerdict::Undetermined {
                continue;
            }
            rep.check(v[j][i] == v[i][j].flip(), "symmetry", || {
                format!("({}, {}) is {} but the reverse is {}", family[i], family[j], v[i][j], v[j][i])
            });
        }
    }
    for (i, a) in family.iter().enumerate() {
        match le(i, i) {
            None => rep.undetermined += 1,
            Some(ok) => rep.check(ok && v[i][i] == CompareVerdict::Equiv, "Q1", || format!("{a} is not ≈ itself")),
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                match (le(i, j), le(j, k), le(i, k)) {
                    (Some(true), Some(true), Some(x)) => rep.check(x, "Q1", || {
                        format!("{} ≲ {} ≲ {} but not {} ≲ {}", family[i], family[j], family[k], family[i], family[k])
                    }),
                    (Some(false), _, _) | (_, Some(false), _) => {}
                    _ => rep.undetermined += 1,
                }
            }
        }
    }
    let empty = S::empty();
    for a in family {
        match o.compare(&empty, a).le() {
            None => rep.undetermined += 1,
            Some(ok) => rep.check(ok, "Q2", || format!("∅ ≲ {a} fails")),
        }
    }
    for a in family {
        for b in family {
            for c in family {
                if !a.intersection(c).is_empty() || !b.intersection(c).is_empty() {
                    continue;
                }
                let (ac, bc) = (a.union(c), b.union(c));
                match (o.compare(a, b).le(), o.compare(&ac, &bc).le()) {
                    (Some(x), Some(y)) => rep.check(x == y, "Q3", || {
                        format!("A={a} B={b} C={c}: A ≲ B is {x} but A∪C ≲ B∪C is {y}")
                    }),
                    _ => rep.undetermined += 1,
                }
            }
        }
    }
    if o.claims_total() {
        for i in 0..n {
            for j in 0..n {
                rep.check(v[i][j] != CompareVerdict::Incomparable, "total", || {
                    format!("{} and {} are incomparable", family[i], family[j])
                });
            }
        }
    }
    if o.claims_regular() {
        for a in family.iter().filter(|a| !a.is_empty()) {
            match o.compare(&empty, a) {
                CompareVerdict::Undetermined => rep.undetermined += 1,
                verdict => rep.check(verdict == CompareVerdict::Less, "regular", || format!("∅ vs {a} is {verdict}")),
            }
        }
    }
    rep
}

/// `A ≈ gA` for every `A` in `family` whose image is in scope.
pub fn verify_strong_invariance_qual<S: EventSet, O: QualOracle<S> + ?Sized, G: SetAction<S> + ?Sized>(
    o: &O,
    gens: &G,
    family: &[S],
) -> CheckReport {
    let mut rep = CheckReport::new(format!("strong invariance ({})", o.name()));
    for g in 0..gens.count() {
        for a in family {
            let Some(ga) = gens.image(g, a) else {
                rep.skipped += 1;
                continue;
            };
            match o.compare(a, &ga) {
                CompareVerdict::Undetermined => rep.undetermined += 1,
                verdict => rep.check(verdict == CompareVerdict::Equiv, "strong", || {
                    format!("g={}: {a} vs {ga} is {verdict}", gens.label(g))
                }),
            }
        }
    }
    rep
}

/// `A ≲ B ⟺ gA ≲ gB` for all `A, B` in `family` with both images in scope.
pub fn verify_weak_invariance_qual<S: EventSet, O: QualOracle<S> + ?Sized, G: SetAction<S> + ?Sized>(
    o: &O,
    gens: &G,
    family: &[S],
) -> CheckReport {
    let mut rep = CheckReport::new(format!("weak invariance ({})", o.name()));
    for g in 0..gens.count() {
        let images: Vec<Option<S>> = family.iter().map(|a| gens.image(g, a)).collect();
        for (i, a) in family.iter().enumerate() {
            for (j, b) in family.iter().enumerate() {
                let (Some(ga), Some(gb)) = (&images[i], &images[j]) else {
                    rep.skipped += 1;
                    continue;
                };
                match (o.compare(a, b).le(), o.compare(ga, gb).le()) {
                    (Some(x), Some(y)) => rep.check(x == y, "weak", || {
                        format!("g={}: {a} ≲ {b} is {x} but {ga} ≲ {gb} is {y}", gens.label(g))
                    }),
                    _ => rep.undetermined += 1,
                }
            }
        }
    }
    rep
}

/// `A ≲ B` iff `P(A | A∪B) ≤ P(B | A∪B)`.
pub struct PopperOracle<'a>(pub &'a PopperTable);

impl QualOracle<Mask> for PopperOracle<'_> {
    fn compare(&self, a: &Mask, b: &Mask) -> CompareVerdict {
        let u = a.0 | b.0;
        if u == 0 {
            return CompareVerdict::Equiv;
        }
        CompareVerdict::from_ordering(self.0.get(a.0, u).cmp(self.0.get(b.0, u)))
    }
    fn claims_total(&self) -> bool {
        true
    }
    fn claims_regular(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "conditional".into()
    }
}

pub fn qual_from_popper(p: &PopperTable) -> PopperOracle<'_> {
    PopperOracle(p)
}

/// Compares by total weight under a finite measure on atoms.
pub struct MeasureOracle {
    pub weights: Vec<Rational>,
}

impl QualOracle<Mask> for MeasureOracle {
    fn compare(&self, a: &Mask, b: &Mask) -> CompareVerdict {
        let w = |m: Member| -> Rational {
            crate::measures::atoms_in(m).map(|k| self.weights[k].clone()).sum()
        };
        CompareVerdict::from_ordering(w(a.0).cmp(&w(b.0)))
    }
    fn claims_total(&self) -> bool {
        true
    }
    fn claims_regular(&self) -> bool {
        self.weights.iter().all(|w| !w.is_zero())
    }
    fn name(&self) -> String {
        "measure".into()
    }
}

/// The first oracle that distinguishes two sets decides.
pub struct LexCombine<'a, S> {
    pub oracles: Vec<&'a dyn QualOracle<S>>,
}

pub fn lex_combine<S>(oracles: Vec<&dyn QualOracle<S>>) -> LexCombine<'_, S> {
    LexCombine { oracles }
}

impl<S> QualOracle<S> for LexCombine<'_, S> {
    fn compare(&self, a: &S, b: &S) -> CompareVerdict {
        for o in &self.oracles {
            match o.compare(a, b) {
                CompareVerdict::Equiv => continue,
                v => return v,
            }
        }
        CompareVerdict::Equiv
    }
    fn claims_total(&self) -> bool {
        self.oracles.iter().all(|o| o.claims_total())
    }
    fn claims_regular(&self) -> bool {
        self.oracles.iter().any(|o| o.claims_regular())
    }
    fn name(&self) -> String {
        let names: Vec<String> = self.oracles.iter().map(|o| o.name()).collect();
        format!("lex[{}]", names.join(","))
    }
}

/// `A ≲ B` iff every `x ∈ A − B` is dominated by some `y ∈ B − A`.
///
/// Defined for finite and cofinite sets. A cofinite difference is unbounded
/// above, so it dominates any finite one and can only be dominated by
/// another unbounded difference, which two disjoint differences cannot both be.
pub fn lexmax_compare(a: &ZSet, b: &ZSet) -> Result<CompareVerdict> {
    for s in [a, b] {
        if !s.is_elementary() {
            return Err(Error::UnsupportedShape(format!("{s} is neither finite nor cofinite")));
        }
    }
    let le = |x: &ZSet, y: &ZSet| -> bool {
        let (xd, yd) = (x.difference(y), y.difference(x));
        if xd.is_empty() {
            return true;
        }
        if !xd.is_finite() {
            return false;
        }
        if !yd.is_finite() {
            return true;
        }
        match (xd.max_element(), yd.max_element()) {
            (Some(mx), Some(my)) => mx <= my,
            _ => false,
        }
    };
    Ok(match (le(a, b), le(b, a)) {
        (true, true) => CompareVerdict::Equiv,
        (true, false) => CompareVerdict::Less,
        (false, true) => CompareVerdict::Greater,
        (false, false) => CompareVerdict::Incomparable,
    })
}

/// [`lexmax_compare`] as an oracle; other shapes are undetermined.
pub struct LexMax;

impl QualOracle<ZSet> for LexMax {
    fn compare(&self, a: &ZSet, b: &ZSet) -> CompareVerdict {
        lexmax_compare(a, b).unwrap_or(CompareVerdict::Undetermined)
    }
    fn claims_total(&self) -> bool {
        true
    }
    fn claims_regular(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        "lexmax".into()
    }
}

/// Counts members inside a window of `ℤ`: a symmetric finite measure.
pub struct WindowCount {
    pub lo: i64,
    pub hi: i64,
}

impl QualOracle<ZSet> for WindowCount {
    fn compare(&self, a: &ZSet, b: &ZSet) -> CompareVerdict {
        let (x, y) = (a.window(self.lo, self.hi).len(), b.window(self.lo, self.hi).len());
        CompareVerdict::from_ordering(x.cmp(&y))
    }
    fn claims_total(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        format!("count[{},{}]", self.lo, self.hi)
    }
}

/// Searches an order for each generator; all finite yields the certificate
/// that weak invariance implies strong invariance for this group.
///
/// Orders are read off exactly: permutation tables on their domains,
/// reversals and reflections as involutions, translations and shifts on a
/// single point, where any nonzero step never returns.
pub fn finite_order_certificate(action: &Action, budget: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("finite-order certificate");
    for (k, g) in action.generators.iter().enumerate() {
        let sample = order_sample(g);
        match order_on_sample(action, &GroupWord::gen(k), &sample, budget) {
            Some(n) => {
                rep.checked += 1;
                rep.note(format!("{g} has order {n}"));
            }
            None => {
                return Err(Error::OrderNotFound {
                    generator: g.to_string(),
                    budget,
                })
            }
        }
    }
    rep.note("every generator has finite order: weak invariance implies strong invariance for this group");
    Ok(rep)
}

/// Which half of the dichotomy an oracle realizes on a finite range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewBranch {
    /// `L_m < R_n` for every tested pair.
    LeftBelow,
    /// `L_m > R_n` for every tested pair.
    RightBelow,
}

/// Evaluates `L_m` against `R_n` for all `m, n` in the ranges.
pub fn prop1_skew_check<O: QualOracle<ZSet> + ?Sized>(
    o: &O,
    ms: core::ops::RangeInclusive<i64>,
    ns: core::ops::RangeInclusive<i64>,
) -> (CheckReport, Option<SkewBranch>) {
    let mut rep = CheckReport::new(format!("half-line dichotomy ({})", o.name()));
    let mut tally: BTreeMap<&'static str, Vec<(i64, i64)>> = BTreeMap::new();
    for m in ms.clone() {
        for n in ns.clone() {
            let key = match o.compare(&ZSet::left(m), &ZSet::right(n)) {
                CompareVerdict::Less => "less",
                CompareVerdict::Greater => "greater",
                CompareVerdict::Undetermined => {
                    rep.undetermined += 1;
                    continue;
                }
                CompareVerdict::Equiv => "equiv",
                CompareVerdict::Incomparable => "incomparable",
            };
            rep.checked += 1;
            tally.entry(key).or_default().push((m, n));
        }
    }
    let branch = match (tally.len(), tally.keys().next()) {
        (0, _) => {
            rep.note("empty range: nothing to compare");
            None
        }
        (1, Some(&"less")) => Some(SkewBranch::LeftBelow),
        (1, Some(&"greater")) => Some(SkewBranch::RightBelow),
        _ => {
            let parts: Vec<String> = tally
                .iter()
                .map(|(k, v)| format!("{k} at (m,n)={:?} ({} pairs)", v[0], v.len()))
                .collect();
            rep.violate("dichotomy", parts.join("; "));
            None
        }
    };
    if let Some(b) = branch {
        rep.note(match b {
            SkewBranch::LeftBelow => "branch (i): every left half-line is below every right half-line",
            SkewBranch::RightBelow => "branch (ii): every right half-line is below every left half-line",
        });
    }
    (rep, branch)
}

/// Members of a finite algebra as masks.
pub fn all_masks(algebra: &FinAlgebra) -> Vec<Mask> {
    algebra.members().map(Mask).collect()
}

/// Distinct sets of a family, keeping first occurrences.
pub fn dedup<S: PartialEq + Clone>(family: &[S]) -> Vec<S> {
    let mut out: Vec<S> = Vec::new();
    for s in family {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    out
}
