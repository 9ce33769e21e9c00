//! Equidecomposability of finite sets, ray decompositions, and paradox
//! witnesses over cylinder sets of coin-flip sequences.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::action::{Action, Generator, GroupWord, Point, SpaceSpec};
use crate::{Error, Result};

/// Pieces of a source set, each carried by one word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Witness {
    pub pieces: Vec<(BTreeSet<Point>, GroupWord)>,
}

impl Witness {
    /// The witness for the reverse direction, with every word inverted.
    pub fn inverted(&self, action: &Action) -> Result<Witness> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (piece, w) in &self.pieces {
            let image = piece
                .iter()
                .map(|x| action.apply(w, x))
                .collect::<Result<BTreeSet<Point>>>()?;
            pieces.push((image, w.inverse()));
        }
        Ok(Witness { pieces })
    }
}

/// Finds pieces of `a` that the words in `s` move onto a partition of `b`.
///
/// Builds the graph with an edge `a → b` whenever some word sends `a` to `b`
/// inside `Ω`, then runs augmenting-path matching with sources and targets
/// scanned in set order. Matched pairs are grouped under the first word in
/// `s` realizing them. Words that cannot act on a point contribute no edges.
pub fn equidecomposable(
    action: &Action,
    a: &BTreeSet<Point>,
    b: &BTreeSet<Point>,
    s: &[GroupWord],
    space: &SpaceSpec,
) -> Option<Witness> {
    if a.len() != b.len() {
        return None;
    }
    let src: Vec<&Point> = a.iter().collect();
    let dst: Vec<&Point> = b.iter().collect();
    let dst_index: BTreeMap<&Point, usize> = dst.iter().enumerate().map(|(j, p)| (*p, j)).collect();

    // adj[i] = (target index, first word index realizing the edge)
    let adj: Vec<Vec<(usize, usize)>> = src
        .iter()
        .map(|x| {
            let mut edges: BTreeMap<usize, usize> = BTreeMap::new();
            for (k, w) in s.iter().enumerate() {
                if let Some(y) = action.restricted(w, x, space) {
                    if let Some(&j) = dst_index.get(&y) {
                        edges.entry(j).or_insert(k);
                    }
                }
            }
            edges.into_iter().collect()
        })
        .collect();

    let mut owner: Vec<Option<usize>> = alloc::vec![None; dst.len()];
    fn augment(
        i: usize,
        adj: &[Vec<(usize, usize)>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &(j, _) in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..src.len() {
        let mut seen = alloc::vec![false; dst.len()];
        if !augment(i, &adj, &mut seen, &mut owner) {
            return None;
        }
    }

    let mut by_word: BTreeMap<usize, BTreeSet<Point>> = BTreeMap::new();
    for (j, o) in owner.iter().enumerate() {
        let i = o.expect("perfect matching");
        let k = adj[i].iter().find(|(t, _)| *t == j).map(|&(_, k)| k).unwrap();
        by_word.entry(k).or_default().insert(src[i].clone());
    }
    Some(Witness {
        pieces: by_word.into_iter().map(|(k, p)| (p, s[k].clone())).collect(),
    })
}

/// Checks that the pieces partition `a` and their images partition `b`
/// inside `Ω`.
pub fn verify_witness(
    action: &Action,
    a: &BTreeSet<Point>,
    b: &BTreeSet<Point>,
    w: &Witness,
    space: &SpaceSpec,
) -> bool {
    let mut covered: BTreeSet<&Point> = BTreeSet::new();
    let mut images: BTreeSet<Point> = BTreeSet::new();
    for (piece, word) in &w.pieces {
        for x in piece {
            if !covered.insert(x) {
                return false;
            }
            match action.restricted(word, x, space) {
                Some(y) if images.insert(y.clone()) => {}
                _ => return false,
            }
        }
    }
    covered.len() == a.len() && covered.into_iter().eq(a.iter()) && &images == b
}

/// Pieces `A_h` of a ray prefix, grouped by the move that carries each point
/// to its successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayDecomposition {
    /// `(move, points it carries)` in the order the moves were listed.
    pub pieces: Vec<(GroupWord, BTreeSet<Point>)>,
    /// Length of the prefix; its last element is left unmoved.
    pub truncated_at: usize,
    /// Moved pieces partition the prefix minus its first element.
    pub verified: bool,
}

/// Splits `prefix[..len-1]` by the first listed move linking each point to
/// the next one, then checks the images partition `prefix[1..]`.
pub fn ray_decomposition(
    action: &Action,
    prefix: &[Point],
    moves: &[GroupWord],
    space: &SpaceSpec,
) -> Result<RayDecomposition> {
    let mut seen = BTreeSet::new();
    for x in prefix {
        if !seen.insert(x) {
            return Err(Error::RepeatedPoint(x.to_string()));
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<Point>> = BTreeMap::new();
    for n in 0..prefix.len().saturating_sub(1) {
        let k = moves
            .iter()
            .position(|w| action.restricted(w, &prefix[n], space).as_ref() == Some(&prefix[n + 1]))
            .ok_or(Error::NoMoveFits(n))?;
        groups.entry(k).or_default().insert(prefix[n].clone());
    }
    let pieces: Vec<(GroupWord, BTreeSet<Point>)> = groups
        .into_iter()
        .map(|(k, p)| (moves[k].clone(), p))
        .collect();

    let mut images: BTreeSet<Point> = BTreeSet::new();
    let mut disjoint = true;
    for (w, piece) in &pieces {
        for x in piece {
            match action.restricted(w, x, space) {
                Some(y) => disjoint &= images.insert(y),
                None => disjoint = false,
            }
        }
    }
    let tail: BTreeSet<Point> = prefix.iter().skip(1).cloned().collect();
    Ok(RayDecomposition {
        pieces,
        truncated_at: prefix.len(),
        verified: disjoint && images == tail,
    })
}

/// Sequences `ℤ → {0, 1}` pinned at finitely many coordinates and,
/// optionally, constant from some coordinate on. Pinned values override
/// the tail.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cylinder {
    pub fixed: BTreeMap<i64, bool>,
    pub tail: Option<(i64, bool)>,
}

impl Cylinder {
    /// Every coordinate from `start` on equals `value`.
    pub fn tail(start: i64, value: bool) -> Self {
        Cylinder {
            fixed: BTreeMap::new(),
            tail: Some((start, value)),
        }
    }

    pub fn with(mut self, coord: i64, value: bool) -> Self {
        self.fixed.insert(coord, value);
        self
    }

    fn span(&self) -> Option<(i64, i64)> {
        let coords = self.fixed.keys().copied().chain(self.tail.map(|(n, _)| n));
        coords.fold(None, |acc, c| match acc {
            None => Some((c, c)),
            Some((lo, hi)) => Some((lo.min(c), hi.max(c))),
        })
    }

    fn image(&self, g: &Generator, inverse: bool) -> Result<Cylinder> {
        match g {
            Generator::Shift(k) => {
                let k = if inverse { -k } else { *k };
                Ok(Cylinder {
                    fixed: self.fixed.iter().map(|(&i, &v)| (i + k, v)).collect(),
                    tail: self.tail.map(|(n, v)| (n + k, v)),
                })
            }
            Generator::ReverseMask(mask) => {
                let mut fixed = self.fixed.clone();
                for &i in mask {
                    match fixed.get_mut(&i) {
                        Some(v) => *v = !*v,
                        None => {
                            if let Some((n, v)) = self.tail {
                                if i >= n {
                                    fixed.insert(i, !v);
                                }
                            }
                        }
                    }
                }
                Ok(Cylinder {
                    fixed,
                    tail: self.tail,
                })
            }
            other => Err(Error::VariantMismatch {
                generator: other.to_string(),
                point: format!("{self}"),
            }),
        }
    }

    /// Membership of a sequence known on `[lo, hi]` with the given behaviour
    /// beyond `hi`. Requires every mentioned coordinate to lie in `[lo, hi]`.
    fn holds(&self, lo: i64, hi: i64, bits: u64, far: Far) -> bool {
        let bit = |i: i64| bits >> (i - lo) & 1 == 1;
        if !self.fixed.iter().all(|(&i, &v)| bit(i) == v) {
            return false;
        }
        match self.tail {
            None => true,
            Some((n, v)) => {
                far == Far::All(v)
                    && (n..=hi)
                        .filter(|i| !self.fixed.contains_key(i))
                        .all(|i| bit(i) == v)
            }
        }
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (i, v) in &self.fixed {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{i}:{}", u8::from(*v))?;
        }
        if let Some((n, v)) = self.tail {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{n}..:{}", u8::from(v))?;
        }
        f.write_str("}")
    }
}

/// Behaviour of a sequence past the inspected window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Far {
    All(bool),
    Mixed,
}

/// A set of coin-flip sequences: a finite set of points or a finite union
/// of cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetDesc {
    Finite(BTreeSet<Point>),
    Cylinders(Vec<Cylinder>),
}

impl SetDesc {
    pub fn cylinder(c: Cylinder) -> Self {
        SetDesc::Cylinders(alloc::vec![c])
    }
}

impl fmt::Display for SetDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDesc::Finite(pts) => {
                f.write_str("[")?;
                for (k, x) in pts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
            SetDesc::Cylinders(cs) => {
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ∪ ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Pieces given as cylinder unions, each moved by one word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CylinderWitness {
    pub pieces: Vec<(Vec<Cylinder>, GroupWord)>,
}

/// `E` with disjoint subsets `A`, `B`, each claimed equidecomposable with `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadoxWitness {
    pub e: SetDesc,
    pub a: SetDesc,
    pub b: SetDesc,
    /// Pieces of `A` moved onto `E`.
    pub wa: CylinderWitness,
    /// Pieces of `B` moved onto `E`.
    pub wb: CylinderWitness,
    /// Coordinates in `[-depth, depth]` may be inspected.
    pub depth: usize,
}

/// Outcome of a paradox check with the first failed condition, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadoxVerdict {
    pub holds: bool,
    pub reason: Option<String>,
    /// Number of window assignments inspected.
    pub assignments: u64,
}

/// Verifies a paradox witness exactly.
///
/// Membership in every cylinder involved (the sets, the pieces and the
/// images of the pieces) depends only on the coordinates they mention plus
/// whether the sequence is eventually all 0, all 1, or neither past them.
/// Enumerating those finitely many classes decides every condition. A finite
/// `E` is never paradoxical, and a finite `A` or `B` cannot be
/// equidecomposable with an infinite `E`.
pub fn paradox_witness_check(action: &Action, pw: &ParadoxWitness) -> Result<ParadoxVerdict> {
    let fail = |reason: &str, assignments| {
        Ok(ParadoxVerdict {
            holds: false,
            reason: Some(reason.into()),
            assignments,
        })
    };
    let (e, a, b) = match (&pw.e, &pw.a, &pw.b) {
        (SetDesc::Finite(_), _, _) => return fail("a finite set is never paradoxical", 0),
        (SetDesc::Cylinders(e), SetDesc::Cylinders(a), SetDesc::Cylinders(b)) => (e, a, b),
        _ => return fail("a finite subset cannot be equidecomposable with an infinite set", 0),
    };

    let images = |w: &CylinderWitness| -> Result<Vec<(Vec<Cylinder>, Vec<Cylinder>)>> {
        w.pieces
            .iter()
            .map(|(piece, word)| {
                let mut img = piece.clone();
                for l in &word.letters {
                    let g = action
                        .generators
                        .get(l.generator)
                        .ok_or(Error::UnknownGenerator(l.generator))?;
                    img = img.iter().map(|c| c.image(g, l.inverse)).collect::<Result<_>>()?;
                }
                Ok((piece.clone(), img))
            })
            .collect()
    };
    let wa = images(&pw.wa)?;
    let wb = images(&pw.wb)?;

    let all: Vec<&Cylinder> = e
        .iter()
        .chain(a)
        .chain(b)
        .chain(wa.iter().chain(&wb).flat_map(|(p, i)| p.iter().chain(i)))
        .collect();
    let (lo, hi) = all
        .iter()
        .filter_map(|c| c.span())
        .fold((0i64, 0i64), |(lo, hi), (l, h)| (lo.min(l), hi.max(h)));
    let d = pw.depth as i64;
    if lo < -d || hi > d {
        return Err(Error::TruncationTooShallow { depth: pw.depth });
    }
    let width = hi - lo + 1;
    if width > 24 {
        return Err(Error::UnsupportedShape(format!(
            "cylinders span {width} coordinates; at most 24 are enumerated"
        )));
    }

    let member = |set: &[Cylinder], bits: u64, far: Far| set.iter().any(|c| c.holds(lo, hi, bits, far));
    let count = |sets: &mut dyn Iterator<Item = &Vec<Cylinder>>, bits: u64, far: Far| {
        sets.filter(|s| member(s, bits, far)).count()
    };
    let mut n = 0u64;
    for far in [Far::All(false), Far::All(true), Far::Mixed] {
        for bits in 0..(1u64 << width) {
            n += 1;
            let (in_e, in_a, in_b) = (member(e, bits, far), member(a, bits, far), member(b, bits, far));
            if in_a && in_b {
                return fail("A and B overlap", n);
            }
            if (in_a || in_b) && !in_e {
                return fail("A ∪ B is not inside E", n);
            }
            for (w, in_src, name) in [(&wa, in_a, "A"), (&wb, in_b, "B")] {
                let pieces = count(&mut w.iter().map(|(p, _)| p), bits, far);
                if pieces != usize::from(in_src) {
                    return fail(
                        if name == "A" {
                            "pieces do not partition A"
                        } else {
                            "pieces do not partition B"
                        },
                        n,
                    );
                }
                let imgs = count(&mut w.iter().map(|(_, i)| i), bits, far);
                if imgs != usize::from(in_e) {
                    return fail(
                        if name == "A" {
                            "images of the A pieces do not partition E"
                        } else {
                            "images of the B pieces do not partition E"
                        },
                        n,
                    );
                }
            }
        }
    }
    Ok(ParadoxVerdict {
        holds: true,
        reason: None,
        assignments: n,
    })
}

/// The coin-flip paradox: `E` = heads from toss 2 on, split by toss 1.
///
/// Generators are `g0 = Shift(+1)` and `g1 = ReverseMask{1}`; heads is 1.
pub fn coin_flip_witness(depth: usize) -> (Action, ParadoxWitness) {
    let action = Action::new(alloc::vec![
        Generator::Shift(1),
        Generator::ReverseMask([1].into_iter().collect()),
    ]);
    let e = Cylinder::tail(2, true);
    let a = Cylinder::tail(2, true).with(1, true);
    let b = Cylinder::tail(2, true).with(1, false);
    let shift = GroupWord::gen(0);
    let flip_then_shift = GroupWord::gen(1).then(&GroupWord::gen(0));
    let pw = ParadoxWitness {
        e: SetDesc::cylinder(e),
        a: SetDesc::cylinder(a.clone()),
        b: SetDesc::cylinder(b.clone()),
        wa: CylinderWitness {
            pieces: alloc::vec![(alloc::vec![a], shift)],
        },
        wb: CylinderWitness {
            pieces: alloc::vec![(alloc::vec![b], flip_then_shift)],
        },
        depth,
    };
    (action, pw)
}
