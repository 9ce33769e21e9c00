//! Decidable subsets of `ℤ`.
//!
//! A [`ZSet`] is any Boolean combination of translates of finite sets,
//! half-lines, the squares `{k² : k ≥ 1}` and the double exponentials
//! `{2^(2^k) : k ≥ 1}`. The class is closed under union, intersection,
//! complement and translation, and every predicate below is decidable.
//!
//! Representation: far to the left every set is constant (`neg`). Far to the
//! right the translated sparse sets `Squares + s` are pairwise almost
//! disjoint, so a set is eventually determined by one bit per "cell"
//! (`(Squares + s) − (DoubleExp + s)` and `DoubleExp + s`) plus one bit for
//! the points in no cell (`rest`). Finitely many points disagree with that
//! default and are listed in `flips`. Cells equal to `rest` are dropped, which
//! makes the representation canonical: structural equality is set equality.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_integer::Roots;

/// `2^(2^k)` for `k ≥ 1` within `i64`.
const DOUBLE_EXP: [i64; 5] = [4, 16, 256, 65_536, 4_294_967_296];

/// The two catalogued sparse sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sparse {
    /// `{2^(2^k) : k ≥ 1} = {4, 16, 256, …}`.
    DoubleExp,
    /// `{k² : k ≥ 1}`.
    Squares,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZSet {
    /// Default membership for `m ≤ 0`.
    neg: bool,
    /// Default membership for `m > 0` outside every cell.
    rest: bool,
    /// Offset `s` ↦ membership on `(Sq+s) − (D+s)` and on `D+s`.
    cells: BTreeMap<i64, [bool; 2]>,
    /// Points whose membership differs from the default.
    flips: BTreeSet<i64>,
}

fn square_root(v: i128) -> Option<i128> {
    if v < 1 {
        return None;
    }
    let k = (v as u128).sqrt() as i128;
    (k * k == v).then_some(k)
}

fn is_double_exp(v: i128) -> bool {
    DOUBLE_EXP.iter().any(|&d| d as i128 == v)
}

/// Positive points lying in two or more of the translated square sets.
fn multi_active(offsets: &BTreeSet<i64>) -> BTreeSet<i64> {
    let offs: Vec<i64> = offsets.iter().copied().collect();
    let mut out = BTreeSet::new();
    for (i, &s) in offs.iter().enumerate() {
        for &t in &offs[i + 1..] {
            // m − s = a², m − t = b², so (a − b)(a + b) = t − s
            let d = t as i128 - s as i128;
            let mut p: i128 = 1;
            while p * p < d {
                if d % p == 0 {
                    let q = d / p;
                    if (p + q) % 2 == 0 {
                        let a = (p + q) / 2;
                        let m = s as i128 + a * a;
                        if m > 0 && m <= i64::MAX as i128 {
                            out.insert(m as i64);
                        }
                    }
                }
                p += 1;
            }
        }
    }
    out
}

impl ZSet {
    fn rebuild(
        neg: bool,
        rest: bool,
        mut cells: BTreeMap<i64, [bool; 2]>,
        candidates: impl IntoIterator<Item = i64>,
        truth: impl Fn(i64) -> bool,
    ) -> ZSet {
        cells.retain(|_, c| *c != [rest, rest]);
        let mut z = ZSet {
            neg,
            rest,
            cells,
            flips: BTreeSet::new(),
        };
        let flips: BTreeSet<i64> = candidates
            .into_iter()
            .filter(|&m| truth(m) != z.default_at(m))
            .collect();
        z.flips = flips;
        z
    }

    pub fn empty() -> Self {
        ZSet {
            neg: false,
            rest: false,
            cells: BTreeMap::new(),
            flips: BTreeSet::new(),
        }
    }

    pub fn full() -> Self {
        ZSet::empty().complement()
    }

    pub fn finite(points: impl IntoIterator<Item = i64>) -> Self {
        ZSet {
            flips: points.into_iter().collect(),
            ..ZSet::empty()
        }
    }

    /// `ℤ` minus the listed points.
    pub fn cofinite(excluded: impl IntoIterator<Item = i64>) -> Self {
        ZSet::finite(excluded).complement()
    }

    /// `L_n = {m : m < n}`.
    pub fn left(n: i64) -> Self {
        let (lo, hi) = (n.min(1), n.max(1));
        ZSet::rebuild(true, false, BTreeMap::new(), lo..=hi, |m| m < n)
    }

    /// `R_n = {m : n ≤ m}`.
    pub fn right(n: i64) -> Self {
        ZSet::left(n).complement()
    }

    /// The negative integers `L_0`.
    pub fn negatives() -> Self {
        ZSet::left(0)
    }

    pub fn sparse(kind: Sparse) -> Self {
        let cell = match kind {
            Sparse::DoubleExp => [false, true],
            Sparse::Squares => [true, true],
        };
        ZSet {
            cells: [(0, cell)].into_iter().collect(),
            ..ZSet::empty()
        }
    }

    pub fn with_added(&self, points: impl IntoIterator<Item = i64>) -> Self {
        let added: BTreeSet<i64> = points.into_iter().collect();
        let cands: Vec<i64> = self.flips.union(&added).copied().collect();
        ZSet::rebuild(self.neg, self.rest, self.cells.clone(), cands, |m| {
            added.contains(&m) || self.contains(m)
        })
    }

    pub fn with_removed(&self, points: impl IntoIterator<Item = i64>) -> Self {
        let removed: BTreeSet<i64> = points.into_iter().collect();
        let cands: Vec<i64> = self.flips.union(&removed).copied().collect();
        ZSet::rebuild(self.neg, self.rest, self.cells.clone(), cands, |m| {
            !removed.contains(&m) && self.contains(m)
        })
    }

    fn cell_value(&self, s: i64, kind: usize) -> bool {
        self.cells.get(&s).map_or(self.rest, |c| c[kind])
    }

    fn default_at(&self, m: i64) -> bool {
        if m <= 0 {
            return self.neg;
        }
        for (&s, cell) in &self.cells {
            if let Some(k) = square_root(m as i128 - s as i128) {
                return cell[usize::from(is_double_exp(k * k))];
            }
        }
        self.rest
    }

    pub fn contains(&self, m: i64) -> bool {
        self.default_at(m) ^ self.flips.contains(&m)
    }

    fn combine(&self, other: &ZSet, op: impl Fn(bool, bool) -> bool) -> ZSet {
        let offsets: BTreeSet<i64> = self.cells.keys().chain(other.cells.keys()).copied().collect();
        let cells = offsets
            .iter()
            .map(|&s| {
                let c = [0, 1].map(|k| op(self.cell_value(s, k), other.cell_value(s, k)));
                (s, c)
            })
            .collect();
        let mut cands: BTreeSet<i64> = self.flips.union(&other.flips).copied().collect();
        cands.extend(multi_active(&offsets));
        ZSet::rebuild(
            op(self.neg, other.neg),
            op(self.rest, other.rest),
            cells,
            cands,
            |m| op(self.contains(m), other.contains(m)),
        )
    }

    pub fn union(&self, other: &ZSet) -> ZSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &ZSet) -> ZSet {
        self.combine(other, |a, b| a && b)
    }

    /// `self − other`.
    pub fn difference(&self, other: &ZSet) -> ZSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> ZSet {
        ZSet {
            neg: !self.neg,
            rest: !self.rest,
            cells: self.cells.iter().map(|(&s, c)| (s, [!c[0], !c[1]])).collect(),
            flips: self.flips.clone(),
        }
    }

    /// `t + self`.
    pub fn translate(&self, t: i64) -> ZSet {
        if t == 0 {
            return self.clone();
        }
        let cells: BTreeMap<i64, [bool; 2]> =
            self.cells.iter().map(|(&s, &c)| (s + t, c)).collect();
        let offsets: BTreeSet<i64> = cells.keys().copied().collect();
        let mut cands: BTreeSet<i64> = self.flips.iter().map(|m| m + t).collect();
        cands.extend(multi_active(&offsets));
        if t > 0 {
            cands.extend(1..=t);
        } else {
            cands.extend(t + 1..=0);
        }
        ZSet::rebuild(self.neg, self.rest, cells, cands, |m| self.contains(m - t))
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.flips.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        !self.neg && !self.rest && self.cells.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.neg && self.rest && self.cells.is_empty()
    }

    /// Finite or cofinite.
    pub fn is_elementary(&self) -> bool {
        self.cells.is_empty() && self.neg == self.rest
    }

    pub fn infinitely_many_positive(&self) -> bool {
        self.rest || self.cells.values().any(|c| c[0] || c[1])
    }

    pub fn finitely_many_positive(&self) -> bool {
        !self.infinitely_many_positive()
    }

    pub fn infinitely_many_negative(&self) -> bool {
        self.neg
    }

    pub fn is_subset(&self, other: &ZSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &ZSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Cardinality, if finite.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.flips.len())
    }

    /// The members, if finite.
    pub fn elements(&self) -> Option<&BTreeSet<i64>> {
        self.is_finite().then_some(&self.flips)
    }

    /// Greatest member, if the set is nonempty and bounded above.
    pub fn max_element(&self) -> Option<i64> {
        if self.infinitely_many_positive() {
            return None;
        }
        if let Some(&m) = self.flips.iter().rev().find(|&&m| m > 0) {
            return Some(m);
        }
        if self.neg {
            // Everything ≤ 0 except listed points; walk down to the first member.
            let mut m = 0;
            while self.flips.contains(&m) {
                m -= 1;
            }
            return Some(m);
        }
        self.flips.iter().next_back().copied()
    }

    /// Members within `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> BTreeSet<i64> {
        (lo..=hi).filter(|&m| self.contains(m)).collect()
    }

    /// Listed points where membership differs from the eventual pattern.
    pub fn exceptions(&self) -> &BTreeSet<i64> {
        &self.flips
    }
}

/// The nonempty atoms of the Boolean algebra generated by `family`.
pub fn atoms_of(family: &[ZSet]) -> Vec<ZSet> {
    let mut atoms = alloc::vec![ZSet::full()];
    for s in family {
        let mut next = Vec::with_capacity(atoms.len() * 2);
        for a in &atoms {
            for part in [a.intersection(s), a.difference(s)] {
                if !part.is_empty() {
                    next.push(part);
                }
            }
        }
        atoms = next;
    }
    atoms
}

fn write_list<'a>(f: &mut fmt::Formatter<'_>, xs: impl Iterator<Item = &'a i64>) -> fmt::Result {
    f.write_str("[")?;
    for (k, x) in xs.enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

/// Finite and cofinite sets print as literals; anything else prints its
/// normal form `zset(neg=…,pos=…,cells{s:[sq,dexp]},flip[…])`.
impl fmt::Display for ZSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            f.write_str("finite:")?;
            return write_list(f, self.flips.iter());
        }
        if self.is_cofinite() {
            f.write_str("cofinite-ex:")?;
            return write_list(f, self.flips.iter());
        }
        write!(f, "zset(neg={},pos={}", u8::from(self.neg), u8::from(self.rest))?;
        for (s, c) in &self.cells {
            write!(f, ",sq{s:+}=[{},{}]", u8::from(c[0]), u8::from(c[1]))?;
        }
        if !self.flips.is_empty() {
            f.write_str(",flip")?;
            write_list(f, self.flips.iter())?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn brute(z: &ZSet, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|&m| z.contains(m)).collect()
    }

    #[test]
    fn half_lines() {
        let l = ZSet::left(3);
        assert_eq!(brute(&l, -2, 5), vec![-2, -1, 0, 1, 2]);
        let r = ZSet::right(-2);
        assert_eq!(brute(&r, -4, 1), vec![-2, -1, 0, 1]);
        assert!(l.infinitely_many_negative() && l.finitely_many_positive());
        assert_eq!(ZSet::left(0).union(&ZSet::right(0)), ZSet::full());
    }

    #[test]
    fn sparse_sets() {
        let d = ZSet::sparse(Sparse::DoubleExp);
        assert_eq!(brute(&d, -5, 300), vec![4, 16, 256]);
        let sq = ZSet::sparse(Sparse::Squares);
        assert_eq!(brute(&sq, -5, 30), vec![1, 4, 9, 16, 25]);
        assert!(d.is_subset(&sq));
        assert!(!sq.is_subset(&d));
        assert!(d.infinitely_many_positive());
    }

    #[test]
    fn translation_shifts_membership() {
        let sq = ZSet::sparse(Sparse::Squares).with_added([-3]);
        let t = sq.translate(5);
        for m in -20..200 {
            assert_eq!(t.contains(m), sq.contains(m - 5), "m = {m}");
        }
        assert_eq!(t.translate(-5), sq);
    }

    #[test]
    fn overlapping_square_translates() {
        // 1 + 3 = 4 and 4 + 0: squares and squares+3 meet at 4, 1+... etc.
        let a = ZSet::sparse(Sparse::Squares);
        let b = a.translate(3);
        let both = a.intersection(&b);
        // k² − j² = 3 only for (2, 1): the single common point is 4.
        assert_eq!(both, ZSet::finite([4]));
        let only_a = a.difference(&b);
        for m in 0..500 {
            assert_eq!(only_a.contains(m), a.contains(m) && !b.contains(m));
        }
    }

    #[test]
    fn canonical_equality() {
        let a = ZSet::sparse(Sparse::Squares)
            .difference(&ZSet::sparse(Sparse::DoubleExp))
            .union(&ZSet::sparse(Sparse::DoubleExp));
        assert_eq!(a, ZSet::sparse(Sparse::Squares));
        assert_eq!(ZSet::finite([1, 2]).complement().complement(), ZSet::finite([1, 2]));
        assert!(ZSet::cofinite([0]).is_cofinite());
    }

    #[test]
    fn max_element() {
        assert_eq!(ZSet::finite([3, -7]).max_element(), Some(3));
        assert_eq!(ZSet::left(-4).max_element(), Some(-5));
        assert_eq!(ZSet::left(5).with_removed([4]).max_element(), Some(3));
        assert_eq!(ZSet::right(0).max_element(), None);
        assert_eq!(ZSet::empty().max_element(), None);
    }

    #[test]
    fn atoms_partition() {
        let fam = [ZSet::left(0), ZSet::sparse(Sparse::DoubleExp), ZSet::finite([4, -1])];
        let atoms = atoms_of(&fam);
        for m in -10..300 {
            assert_eq!(atoms.iter().filter(|a| a.contains(m)).count(), 1);
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(alloc::format!("{}", ZSet::finite([5, 9])), "finite:[5,9]");
        assert_eq!(alloc::format!("{}", ZSet::cofinite([0])), "cofinite-ex:[0]");
    }
}
