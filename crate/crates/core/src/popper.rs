//! Full conditional probabilities and coherent exchange rates on finite
//! algebras.
//!
//! Members are atom bitmasks (see [`crate::measures::Member`]). Tables are
//! dense over all pairs `(A, B)` with `B ≠ ∅`, so they are limited to
//! [`TABLE_MAX_ATOMS`] atoms.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::FiniteSpace;
use crate::measures::{atoms_in, full_mask, FinAlgebra, LevelStack, Member};
use crate::{CheckReport, Error, ExtRat, Rational, Result};

pub const TABLE_MAX_ATOMS: usize = 8;
/// Up to this many atoms the triple sweeps are exhaustive.
pub const EXHAUSTIVE_TRIPLE_ATOMS: usize = 6;
/// Triples drawn when a sweep is sampled.
pub const SAMPLED_TRIPLES: usize = 50_000;

fn check_size(atoms: usize) -> Result<()> {
    if atoms > TABLE_MAX_ATOMS {
        return Err(Error::AlgebraTooLarge {
            atoms,
            limit: TABLE_MAX_ATOMS,
        });
    }
    Ok(())
}

/// Calls `f` on every triple `(a, b, c)` of members, or on a seeded sample
/// of them for large algebras. Returns whether the sweep was exhaustive.
fn for_each_triple(atoms: usize, seed: u64, mut f: impl FnMut(Member, Member, Member)) -> bool {
    let full = full_mask(atoms);
    if atoms <= EXHAUSTIVE_TRIPLE_ATOMS {
        for a in 0..=full {
            for b in 0..=full {
                for c in 0..=full {
                    f(a, b, c);
                }
            }
        }
        true
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_TRIPLES {
            let a = rng.next_u32() & full;
            let b = rng.next_u32() & full;
            let c = rng.next_u32() & full;
            f(a, b, c);
        }
        false
    }
}

/// `P(A | B)` for every member `A` and nonempty member `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopperTable {
    atoms: usize,
    entries: Vec<Rational>,
}

impl PopperTable {
    pub fn from_fn(atoms: usize, mut f: impl FnMut(Member, Member) -> Rational) -> Result<Self> {
        check_size(atoms)?;
        let full = full_mask(atoms);
        let mut entries = Vec::with_capacity(1 << (2 * atoms));
        for b in 0..=full {
            for a in 0..=full {
                entries.push(if b == 0 { Rational::zero() } else { f(a, b) });
            }
        }
        Ok(PopperTable { atoms, entries })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn full(&self) -> Member {
        full_mask(self.atoms)
    }

    fn slot(&self, a: Member, b: Member) -> usize {
        assert!(b != 0, "P(·|∅) is outside the domain");
        ((b as usize) << self.atoms) | a as usize
    }

    pub fn get(&self, a: Member, b: Member) -> &Rational {
        &self.entries[self.slot(a, b)]
    }

    /// Overwrites one entry.
    pub fn set(&mut self, a: Member, b: Member, value: Rational) {
        let k = self.slot(a, b);
        self.entries[k] = value;
    }
}

/// `P(A | B) = μ_{n(B)}(A ∩ B) / μ_{n(B)}(B)`.
pub fn popper_from_levels(stack: &LevelStack, algebra: &FinAlgebra) -> Result<PopperTable> {
    PopperTable::from_fn(algebra.atom_count(), |a, b| {
        let level = &stack.levels[stack.level_of(b)];
        let num = level.eval(a & b);
        let den = level.eval(b);
        match (num, den) {
            (ExtRat::Finite(n), ExtRat::Finite(d)) => n / d,
            _ => unreachable!("members are finite at their own level"),
        }
    })
}

/// Exhaustive C1 and C2 (sampled C2 above [`EXHAUSTIVE_TRIPLE_ATOMS`]).
///
/// C1 is checked through its atom-sum form: values lie in `[0, 1]`,
/// `P(Ω | B) = 1`, and `P(A | B)` is the sum over the atoms of `A`. For C2
/// with `A ∩ C = ∅` the right side is not defined; there both
/// `P(A ∩ B | C)` and `P(A | C)` must vanish.
pub fn verify_popper_axioms(p: &PopperTable, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new("popper axioms");
    let full = p.full();
    let zero = Rational::zero();
    let one = Rational::one();
    for b in 1..=full {
        rep.check(p.get(full, b).is_one(), "C1", || format!("P(Ω | {b:#b}) = {}", p.get(full, b)));
        for a in 0..=full {
            let v = p.get(a, b);
            rep.check(*v >= zero && *v <= one, "C1", || format!("P({a:#b} | {b:#b}) = {v} ∉ [0, 1]"));
            let atom_sum: Rational = atoms_in(a).map(|k| p.get(1 << k, b).clone()).sum();
            rep.check(*v == atom_sum, "C1", || {
                format!("P({a:#b} | {b:#b}) = {v} but its atoms sum to {atom_sum}")
            });
        }
    }
    let exhaustive = for_each_triple(p.atoms, seed, |a, b, c| {
        if c == 0 {
            return;
        }
        let lhs = p.get(a & b, c);
        if a & c != 0 {
            let rhs = p.get(a, c) * p.get(b, a & c);
            rep.check(*lhs == rhs, "C2", || {
                format!("A={a:#b} B={b:#b} C={c:#b}: P(A∩B|C) = {lhs} but P(A|C)·P(B|A∩C) = {rhs}")
            });
        } else {
            let pa = p.get(a, c);
            rep.check(lhs.is_zero() && pa.is_zero(), "C2", || {
                format!("A={a:#b} B={b:#b} C={c:#b}: A∩C = ∅ yet P(A∩B|C) = {lhs}, P(A|C) = {pa}")
            });
        }
    });
    if !exhaustive {
        rep.note(format!("C2 sampled on {SAMPLED_TRIPLES} triples with seed {seed}"));
    }
    rep
}

/// The derived condition: `P(A|B) = P(B|A) = 1` implies `P(C|A) = P(C|B)`.
pub fn verify_product_identity(p: &PopperTable) -> CheckReport {
    let mut rep = CheckReport::new("derived identity");
    let full = p.full();
    for a in 1..=full {
        for b in 1..=full {
            if !(p.get(a, b).is_one() && p.get(b, a).is_one()) {
                continue;
            }
            for c in 0..=full {
                let (x, y) = (p.get(c, a), p.get(c, b));
                rep.check(x == y, "derived", || {
                    format!("A={a:#b} B={b:#b} C={c:#b}: P(C|A) = {x} ≠ P(C|B) = {y}")
                });
            }
        }
    }
    rep
}

/// One exchange-rate value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RateEntry {
    Value(ExtRat),
    /// `0/0` arose.
    Undefined,
    /// The source could not decide the value.
    Undetermined,
}

impl RateEntry {
    pub fn value(&self) -> Option<&ExtRat> {
        match self {
            RateEntry::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl core::fmt::Display for RateEntry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RateEntry::Value(v) => write!(f, "{v}"),
            RateEntry::Undefined => f.write_str("undefined"),
            RateEntry::Undetermined => f.write_str("undetermined"),
        }
    }
}

/// `c(A, B)` for every member `A` and nonempty member `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeRate {
    atoms: usize,
    entries: Vec<RateEntry>,
}

impl ExchangeRate {
    pub fn from_fn(atoms: usize, mut f: impl FnMut(Member, Member) -> RateEntry) -> Result<Self> {
        check_size(atoms)?;
        let full = full_mask(atoms);
        let mut entries = Vec::with_capacity(1 << (2 * atoms));
        for b in 0..=full {
            for a in 0..=full {
                entries.push(if b == 0 { RateEntry::Undefined } else { f(a, b) });
            }
        }
        Ok(ExchangeRate { atoms, entries })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn full(&self) -> Member {
        full_mask(self.atoms)
    }

    fn slot(&self, a: Member, b: Member) -> usize {
        assert!(b != 0, "c(·, ∅) is outside the domain");
        ((b as usize) << self.atoms) | a as usize
    }

    pub fn get(&self, a: Member, b: Member) -> &RateEntry {
        &self.entries[self.slot(a, b)]
    }

    pub fn set(&mut self, a: Member, b: Member, value: RateEntry) {
        let k = self.slot(a, b);
        self.entries[k] = value;
    }
}

/// `c_P(A, B) = P(A | A∪B) / P(B | A∪B)` with `x/0 = ∞`.
pub fn exchange_from_popper(p: &PopperTable) -> ExchangeRate {
    ExchangeRate::from_fn(p.atoms, |a, b| {
        let u = a | b;
        let num = ExtRat::finite(p.get(a, u).clone());
        let den = ExtRat::finite(p.get(b, u).clone());
        match num.checked_div(&den) {
            Ok(v) => RateEntry::Value(v),
            Err(_) => RateEntry::Undefined,
        }
    })
    .expect("same size as the source table")
}

/// E1 and E3 everywhere, E2 on every triple where the product is defined.
///
/// Undetermined entries are counted and skipped; undefined entries inside
/// the domain are violations.
pub fn verify_exchange_axioms(c: &ExchangeRate, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new("exchange-rate axioms");
    let full = c.full();
    for b in 1..=full {
        match c.get(b, b) {
            RateEntry::Undetermined => rep.undetermined += 1,
            e => rep.check(*e == RateEntry::Value(ExtRat::one()), "E3", || format!("c({b:#b}, {b:#b}) = {e}")),
        }
        for a in 0..=full {
            let entry = c.get(a, b);
            let parts: Option<Vec<ExtRat>> = atoms_in(a)
                .map(|k| c.get(1 << k, b).value().cloned())
                .collect();
            match (entry, parts) {
                (RateEntry::Undetermined, _) => rep.undetermined += 1,
                (RateEntry::Undefined, _) => rep.violate("E1", format!("c({a:#b}, {b:#b}) is undefined")),
                (RateEntry::Value(_), None) => rep.undetermined += 1,
                (RateEntry::Value(v), Some(parts)) => {
                    let sum: ExtRat = parts.into_iter().sum();
                    rep.check(*v == sum, "E1", || {
                        format!("c({a:#b}, {b:#b}) = {v} but its atoms sum to {sum}")
                    });
                }
            }
        }
    }
    let exhaustive = for_each_triple(c.atoms, seed, |a, b, cc| {
        if b == 0 || cc == 0 {
            return;
        }
        let (Some(ab), Some(bc), Some(ac)) = (c.get(a, b).value(), c.get(b, cc).value(), c.get(a, cc).value())
        else {
            rep.undetermined += 1;
            return;
        };
        match ab.checked_mul(bc) {
            Ok(prod) => rep.check(prod == *ac, "E2", || {
                format!("A={a:#b} B={b:#b} C={cc:#b}: c(A,B)·c(B,C) = {prod} but c(A,C) = {ac}")
            }),
            Err(_) => rep.skipped += 1,
        }
    });
    if !exhaustive {
        rep.note(format!("E2 sampled on {SAMPLED_TRIPLES} triples with seed {seed}"));
    }
    rep
}

/// `P_c(A | B) = c(A∩B, B)`, after checking `c` is coherent.
pub fn popper_from_exchange(c: &ExchangeRate, seed: u64) -> Result<PopperTable> {
    let rep = verify_exchange_axioms(c, seed);
    if let Some(v) = rep.violations.first() {
        return Err(Error::InvalidRate(format!("{}: {}", v.rule, v.witness)));
    }
    let mut bad = None;
    let table = PopperTable::from_fn(c.atoms, |a, b| match c.get(a & b, b) {
        RateEntry::Value(ExtRat::Finite(v)) => v.clone(),
        other => {
            bad.get_or_insert_with(|| format!("c({:#b}, {b:#b}) = {other}", a & b));
            Rational::zero()
        }
    })?;
    match bad {
        Some(msg) => Err(Error::InvalidRate(msg)),
        None => Ok(table),
    }
}

/// `P(gA | B) = P(A | B)` whenever `A, gA ⊆ B`, for every move of `space`.
pub fn verify_strong_invariance_popper(p: &PopperTable, space: &FiniteSpace, algebra: &FinAlgebra) -> CheckReport {
    let mut rep = CheckReport::new("strong invariance (conditional)");
    let full = p.full();
    for (mv, m) in space.moves.iter().enumerate() {
        for a in 0..=full {
            let Some(ga) = algebra.image(space, mv, a) else {
                rep.skipped += 1;
                continue;
            };
            for b in 1..=full {
                if a & !b != 0 || ga & !b != 0 {
                    continue;
                }
                let (x, y) = (p.get(ga, b), p.get(a, b));
                rep.check(x == y, "strong", || {
                    format!("g={} A={a:#b} B={b:#b}: P(gA|B) = {x} but P(A|B) = {y}", m.label)
                });
            }
        }
    }
    rep
}

/// `P(gA | gB) = P(A | B)` whenever `gA` and `gB` are members.
pub fn verify_weak_invariance_popper(p: &PopperTable, space: &FiniteSpace, algebra: &FinAlgebra) -> CheckReport {
    let mut rep = CheckReport::new("weak invariance (conditional)");
    let full = p.full();
    for (mv, m) in space.moves.iter().enumerate() {
        for b in 1..=full {
            let Some(gb) = algebra.image(space, mv, b) else {
                rep.skipped += 1;
                continue;
            };
            for a in 0..=full {
                let Some(ga) = algebra.image(space, mv, a) else {
                    continue;
                };
                let (x, y) = (p.get(ga, gb), p.get(a, b));
                rep.check(x == y, "weak", || {
                    format!("g={} A={a:#b} B={b:#b}: P(gA|gB) = {x} but P(A|B) = {y}", m.label)
                });
            }
        }
    }
    rep
}

/// `c(gA, B) = c(A, B)` whenever `gA` is a member.
pub fn verify_strong_invariance_exchange(c: &ExchangeRate, space: &FiniteSpace, algebra: &FinAlgebra) -> CheckReport {
    let mut rep = CheckReport::new("strong invariance (exchange rate)");
    let full = c.full();
    for (mv, m) in space.moves.iter().enumerate() {
        for a in 0..=full {
            let Some(ga) = algebra.image(space, mv, a) else {
                rep.skipped += 1;
                continue;
            };
            for b in 1..=full {
                let (x, y) = (c.get(ga, b), c.get(a, b));
                if matches!(x, RateEntry::Undetermined) || matches!(y, RateEntry::Undetermined) {
                    rep.undetermined += 1;
                    continue;
                }
                rep.check(x == y, "strong", || {
                    format!("g={} A={a:#b} B={b:#b}: c(gA,B) = {x} but c(A,B) = {y}", m.label)
                });
            }
        }
    }
    rep
}
