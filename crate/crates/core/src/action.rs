//! Symbolic points, generators and the partial action they induce on `Ω`.
//!
//! Every [`Generator`] is a total bijection of `Ω*` with a computable inverse.
//! Restricting to a [`SpaceSpec`] makes a move undefined at points whose image
//! leaves `Ω`, which is exactly the partial action `θ_g` on `Ω`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::report::CheckReport;
use crate::{int, Error, Quad, Rational, Result};

/// A finitely supported 0/1 sequence: the set of indices flipped from all-zeros.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitSeq(pub BTreeSet<i64>);

impl BitSeq {
    pub fn zeros() -> Self {
        BitSeq(BTreeSet::new())
    }

    pub fn from_support(support: impl IntoIterator<Item = i64>) -> Self {
        BitSeq(support.into_iter().collect())
    }

    pub fn bit(&self, i: i64) -> bool {
        self.0.contains(&i)
    }
}

/// A point of `Ω*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Int(i64),
    /// `p + q·√2/4`.
    Quad(Quad),
    Bits(BitSeq),
    Tuple(Vec<Point>),
}

impl Point {
    pub fn quad(p: Rational, q: i64) -> Self {
        Point::Quad(Quad::new(p, q))
    }

    pub fn rational(p: Rational) -> Self {
        Point::Quad(Quad::rational(p))
    }

    pub fn bits(support: impl IntoIterator<Item = i64>) -> Self {
        Point::Bits(BitSeq::from_support(support))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Int(n) => write!(f, "int:{n}"),
            Point::Quad(q) => write!(f, "quad:{},{}", q.p, q.q),
            Point::Bits(b) => {
                f.write_str("bits:[")?;
                for (k, i) in b.0.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{i}")?;
                }
                f.write_str("]")
            }
            Point::Tuple(items) => {
                f.write_str("tuple:(")?;
                for (k, p) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A finite table of point moves; every unlisted point is fixed.
///
/// Built through [`PermutationTable::new`] the table is a bijection of its
/// domain. [`PermutationTable::unchecked`] admits broken tables so that the
/// axiom verifiers can be exercised on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTable {
    pairs: Vec<(Point, Point)>,
}

impl PermutationTable {
    pub fn new(pairs: Vec<(Point, Point)>) -> Result<Self> {
        let table = PermutationTable { pairs };
        if !table.is_bijection() {
            return Err(Error::InvalidAlgebra(
                "permutation table is not a bijection of its domain".into(),
            ));
        }
        Ok(table)
    }

    pub fn unchecked(pairs: Vec<(Point, Point)>) -> Self {
        PermutationTable { pairs }
    }

    /// Builds the table of a single cycle `c0 → c1 → … → c0`.
    pub fn cycle(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        let pairs = (0..n)
            .map(|i| (points[i].clone(), points[(i + 1) % n].clone()))
            .collect();
        PermutationTable::new(pairs)
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    pub fn is_bijection(&self) -> bool {
        let sources: BTreeSet<&Point> = self.pairs.iter().map(|(a, _)| a).collect();
        let images: BTreeSet<&Point> = self.pairs.iter().map(|(_, b)| b).collect();
        sources.len() == self.pairs.len() && images.len() == self.pairs.len() && sources == images
    }

    fn forward(&self, x: &Point) -> Point {
        self.pairs
            .iter()
            .find(|(a, _)| a == x)
            .map_or_else(|| x.clone(), |(_, b)| b.clone())
    }

    fn backward(&self, x: &Point) -> Point {
        self.pairs
            .iter()
            .find(|(_, b)| b == x)
            .map_or_else(|| x.clone(), |(a, _)| a.clone())
    }
}

/// A bijection of `Ω*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `x ↦ x + step` on integer and quadratic points.
    TranslateRational(Rational),
    /// `x ↦ x + step` on quadratic points.
    TranslateQuad(Quad),
    /// `x ↦ 2c − x` on integer and quadratic points.
    Reflect(Rational),
    PermutationTable(PermutationTable),
    /// Moves the bit at index `i` to index `i + offset`.
    Shift(i64),
    /// Flips the bits at the listed indices.
    ReverseMask(BTreeSet<i64>),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::TranslateRational(s) => write!(f, "translate:{s}"),
            Generator::TranslateQuad(q) => write!(f, "translate-quad:{},{}", q.p, q.q),
            Generator::Reflect(c) => write!(f, "reflect:{c}"),
            Generator::PermutationTable(t) => {
                f.write_str("perm:")?;
                for (k, (a, b)) in t.pairs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{a}=>{b}")?;
                }
                Ok(())
            }
            Generator::Shift(k) => write!(f, "shift:{k}"),
            Generator::ReverseMask(m) => {
                f.write_str("reverse:[")?;
                for (k, i) in m.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{i}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl Generator {
    fn mismatch(&self, x: &Point) -> Error {
        Error::VariantMismatch {
            generator: self.to_string(),
            point: x.to_string(),
        }
    }

    /// Applies the generator (or its inverse) to `x`.
    pub fn apply(&self, x: &Point, inverse: bool) -> Result<Point> {
        match (self, x) {
            (Generator::TranslateRational(step), Point::Int(n)) => {
                if !step.is_integer() {
                    return Err(self.mismatch(x));
                }
                let s = step.to_integer();
                let s: i64 = i64::try_from(s).map_err(|_| self.mismatch(x))?;
                Ok(Point::Int(if inverse { n - s } else { n + s }))
            }
            (Generator::TranslateRational(step), Point::Quad(q)) => {
                let p = if inverse { &q.p - step } else { &q.p + step };
                Ok(Point::Quad(Quad::new(p, q.q)))
            }
            (Generator::TranslateQuad(step), Point::Quad(q)) => {
                Ok(Point::Quad(if inverse { q - step } else { q + step }))
            }
            (Generator::Reflect(c), Point::Int(n)) => {
                let two_c = c * int(2);
                if !two_c.is_integer() {
                    return Err(self.mismatch(x));
                }
                let t: i64 = i64::try_from(two_c.to_integer()).map_err(|_| self.mismatch(x))?;
                Ok(Point::Int(t - n))
            }
            (Generator::Reflect(c), Point::Quad(q)) => {
                Ok(Point::Quad(Quad::new(c * int(2) - &q.p, -q.q)))
            }
            (Generator::PermutationTable(t), _) => Ok(if inverse {
                t.backward(x)
            } else {
                t.forward(x)
            }),
            (Generator::Shift(k), Point::Bits(b)) => {
                let k = if inverse { -k } else { *k };
                Ok(Point::Bits(BitSeq(b.0.iter().map(|i| i + k).collect())))
            }
            (Generator::ReverseMask(m), Point::Bits(b)) => {
                Ok(Point::Bits(BitSeq(b.0.symmetric_difference(m).copied().collect())))
            }
            _ => Err(self.mismatch(x)),
        }
    }
}

/// One letter of a word: a generator index, possibly inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

/// A finite product of generators and their inverses.
///
/// Letters are applied left to right: the word `g0*g1` first applies `g0`
/// and then `g1`. The empty word is the identity and concatenation is
/// composition in that same order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroupWord {
    pub letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn gen(generator: usize) -> Self {
        GroupWord {
            letters: alloc::vec![Letter {
                generator,
                inverse: false
            }],
        }
    }

    pub fn gen_inv(generator: usize) -> Self {
        GroupWord {
            letters: alloc::vec![Letter {
                generator,
                inverse: true
            }],
        }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (usize, bool)>) -> Self {
        GroupWord {
            letters: letters
                .into_iter()
                .map(|(generator, inverse)| Letter { generator, inverse })
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&next.letters);
        GroupWord { letters }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter {
                    generator: l.generator,
                    inverse: !l.inverse,
                })
                .collect(),
        }
    }

    /// `self` repeated `n` times.
    pub fn pow(&self, n: usize) -> GroupWord {
        let mut letters = Vec::with_capacity(self.letters.len() * n);
        for _ in 0..n {
            letters.extend_from_slice(&self.letters);
        }
        GroupWord { letters }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "g{}", l.generator)?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// Symmetric closure `H ∪ H⁻¹`, keeping first-occurrence order.
pub fn symmetrize(words: &[GroupWord]) -> Vec<GroupWord> {
    let mut out: Vec<GroupWord> = Vec::with_capacity(words.len() * 2);
    for w in words.iter().cloned().chain(words.iter().map(GroupWord::inverse)) {
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// The acting group, given by its generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Action {
    pub generators: Vec<Generator>,
}

impl Action {
    pub fn new(generators: Vec<Generator>) -> Self {
        Action { generators }
    }

    pub fn apply(&self, w: &GroupWord, x: &Point) -> Result<Point> {
        let mut y = x.clone();
        for l in &w.letters {
            let g = self
                .generators
                .get(l.generator)
                .ok_or(Error::UnknownGenerator(l.generator))?;
            y = g.apply(&y, l.inverse)?;
        }
        Ok(y)
    }

    /// `θ_w(x)`: the image if the word acts on `x` and lands in `Ω`.
    pub fn restricted(&self, w: &GroupWord, x: &Point, space: &SpaceSpec) -> Option<Point> {
        if !space.contains(x) {
            return None;
        }
        self.apply(w, x).ok().filter(|y| space.contains(y))
    }

    /// Every single generator as a one-letter word.
    pub fn generator_words(&self) -> Vec<GroupWord> {
        (0..self.generators.len()).map(GroupWord::gen).collect()
    }

    /// Renders a word with its generator literals, e.g. `shift:1*reverse:[0]`.
    pub fn describe(&self, w: &GroupWord) -> String {
        if w.is_identity() {
            return "e".into();
        }
        let parts: Vec<String> = w
            .letters
            .iter()
            .map(|l| match self.generators.get(l.generator) {
                Some(g) if l.inverse => format!("({g})^-1"),
                Some(g) => g.to_string(),
                None => format!("g{}?", l.generator),
            })
            .collect();
        parts.join("*")
    }
}

/// Decidable membership predicate for `Ω ⊆ Ω*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    All,
    /// Integer points in `[lo, hi]`; `None` leaves a side unbounded.
    IntRange { lo: Option<i64>, hi: Option<i64> },
    /// Integer or quadratic points in the closed interval `[lo, hi]`.
    Interval { lo: Rational, hi: Rational },
    /// Bit sequences whose support lies in `[lo, hi]`.
    BitsWithin { lo: i64, hi: i64 },
    Finite(BTreeSet<Point>),
}

impl Region {
    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (Region::All, _) => true,
            (Region::IntRange { lo, hi }, Point::Int(n)) => {
                lo.is_none_or(|lo| lo <= *n) && hi.is_none_or(|hi| *n <= hi)
            }
            (Region::Interval { lo, hi }, Point::Int(n)) => {
                let v = int(*n);
                lo <= &v && &v <= hi
            }
            (Region::Interval { lo, hi }, Point::Quad(q)) => q.within(lo, hi),
            (Region::BitsWithin { lo, hi }, Point::Bits(b)) => {
                b.0.iter().all(|i| lo <= i && i <= hi)
            }
            (Region::Finite(set), _) => set.contains(x),
            _ => false,
        }
    }
}

/// `Ω*` (a descriptive label) together with the membership test for `Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSpec {
    pub omega_star: String,
    pub omega: Region,
}

impl SpaceSpec {
    pub fn new(omega_star: impl Into<String>, omega: Region) -> Self {
        SpaceSpec {
            omega_star: omega_star.into(),
            omega,
        }
    }

    pub fn everything(omega_star: impl Into<String>) -> Self {
        SpaceSpec::new(omega_star, Region::All)
    }

    pub fn unit_interval() -> Self {
        SpaceSpec::new(
            "R",
            Region::Interval {
                lo: Rational::zero(),
                hi: Rational::one(),
            },
        )
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.omega.contains(x)
    }
}

/// One discovered point of a closure search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    pub point: Point,
    /// Index of the point this one was reached from.
    pub parent: Option<usize>,
    /// Index into `H` of the move used.
    pub via: Option<usize>,
}

/// Result of exploring `G_{H,x}` within a budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureResult {
    Finite(BTreeSet<Point>),
    /// The first `budget` distinct points in discovery order, each linked to
    /// the point it was reached from. Only a witness of at least `budget`
    /// points, never a proof of infinitude.
    BudgetExceeded { path: Vec<PathStep> },
}

impl ClosureResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, ClosureResult::Finite(_))
    }

    /// Re-checks the structural invariants against the action.
    pub fn verify(&self, action: &Action, h: &[GroupWord], space: &SpaceSpec) -> bool {
        match self {
            ClosureResult::Finite(points) => points.iter().all(|x| {
                h.iter().all(|w| match action.apply(w, x) {
                    Ok(y) => !space.contains(&y) || points.contains(&y),
                    Err(_) => true,
                })
            }),
            ClosureResult::BudgetExceeded { path } => {
                let distinct: BTreeSet<&Point> = path.iter().map(|s| &s.point).collect();
                distinct.len() == path.len()
                    && path.iter().enumerate().all(|(i, step)| {
                        space.contains(&step.point)
                            && match (step.parent, step.via) {
                                (None, None) => i == 0,
                                (Some(p), Some(v)) => {
                                    p < i
                                        && h.get(v).is_some_and(|w| {
                                            action.apply(w, &path[p].point).ok().as_ref()
                                                == Some(&step.point)
                                        })
                                }
                                _ => false,
                            }
                    })
            }
        }
    }
}

/// Breadth-first closure `G_{H,x}` using only moves that stay in `Ω`.
///
/// `H` is used as given; callers wanting `H ∪ H⁻¹` pass [`symmetrize`]d
/// words. Moves are tried in declaration order and the queue is FIFO, so
/// witnesses are reproducible. Returns `Finite` iff the closure has at most
/// `budget` points. Moves that cannot act on a point are skipped.
pub fn partial_orbit_closure(
    action: &Action,
    h: &[GroupWord],
    x: &Point,
    space: &SpaceSpec,
    budget: usize,
) -> Result<ClosureResult> {
    if !space.contains(x) {
        return Err(Error::OutsideSpace(x.to_string()));
    }
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    let mut path: Vec<PathStep> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    if budget == 0 {
        return Ok(ClosureResult::BudgetExceeded { path });
    }
    seen.insert(x.clone());
    path.push(PathStep {
        point: x.clone(),
        parent: None,
        via: None,
    });
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        for (k, w) in h.iter().enumerate() {
            let y = match action.apply(w, &path[i].point) {
                Ok(y) => y,
                Err(Error::VariantMismatch { .. }) => continue,
                Err(e) => return Err(e),
            };
            if !space.contains(&y) || seen.contains(&y) {
                continue;
            }
            if path.len() == budget {
                return Ok(ClosureResult::BudgetExceeded { path });
            }
            seen.insert(y.clone());
            path.push(PathStep {
                point: y,
                parent: Some(i),
                via: Some(k),
            });
            queue.push_back(path.len() - 1);
        }
    }
    Ok(ClosureResult::Finite(seen))
}

/// `x_0 = 0`, `x_{k+1} = x_k + r` if that stays in `[0, 1]`, else `x_k − 1/2`,
/// with `r = √2/4`.
pub fn thm2_interval_sequence(n: usize) -> Vec<Quad> {
    let r = Quad::r();
    let half = Quad::rational(crate::ratio(1, 2));
    let zero = Rational::zero();
    let one = Rational::one();
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(Quad::zero());
    for k in 0..n {
        let up = &xs[k] + &r;
        let next = if up.within(&zero, &one) {
            up
        } else {
            &xs[k] - &half
        };
        debug_assert!(next.within(&zero, &one));
        xs.push(next);
    }
    xs
}

/// Components of the graph `x ~ w·x` on a finite `Ω`, using only moves with
/// both endpoints in `Ω`. Components come out sorted by their least point.
pub fn move_graph_components(
    action: &Action,
    omega: &BTreeSet<Point>,
    moves: &[GroupWord],
) -> Vec<BTreeSet<Point>> {
    let space = FiniteSpace::new(action, omega, moves);
    space
        .components()
        .into_iter()
        .map(|c| c.into_iter().map(|i| space.points[i].clone()).collect())
        .collect()
}

/// A finite `Ω` with each move precomputed as a partial map on point indices.
#[derive(Debug, Clone)]
pub struct FiniteSpace {
    pub points: Vec<Point>,
    index: BTreeMap<Point, usize>,
    pub moves: Vec<MoveMap>,
}

/// The restriction `θ_w` of one move to a finite `Ω`.
#[derive(Debug, Clone)]
pub struct MoveMap {
    pub word: GroupWord,
    pub label: String,
    /// `image[i]` is the index of `w·points[i]`, or `None` if it leaves `Ω`.
    pub image: Vec<Option<usize>>,
}

impl FiniteSpace {
    /// Moves that cannot act on a point are treated as leaving `Ω` there.
    pub fn new(action: &Action, omega: &BTreeSet<Point>, moves: &[GroupWord]) -> Self {
        let points: Vec<Point> = omega.iter().cloned().collect();
        let index: BTreeMap<Point, usize> =
            points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let moves = moves
            .iter()
            .map(|w| MoveMap {
                word: w.clone(),
                label: action.describe(w),
                image: points
                    .iter()
                    .map(|x| action.apply(w, x).ok().and_then(|y| index.get(&y).copied()))
                    .collect(),
            })
            .collect();
        FiniteSpace {
            points,
            index,
            moves,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, x: &Point) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Image of a set of point indices, if every point stays in `Ω`.
    pub fn image_of(&self, mv: usize, set: &BTreeSet<usize>) -> Option<BTreeSet<usize>> {
        let map = &self.moves[mv].image;
        set.iter().map(|&i| map[i]).collect()
    }

    /// Connected components of the move graph as sorted index sets.
    pub fn components(&self) -> Vec<BTreeSet<usize>> {
        let n = self.points.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for mv in &self.moves {
            for (i, img) in mv.image.iter().enumerate() {
                if let Some(j) = *img {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().insert(i);
        }
        let mut out: Vec<BTreeSet<usize>> = groups.into_values().collect();
        out.sort_by_key(|c| c.iter().next().copied());
        out
    }
}

/// Checks PA1–PA3 for the restriction of `action` to `space` on a sample.
///
/// Each generator and its inverse is a move; PA3 runs over all ordered pairs
/// of moves. Points where a move is undefined are recorded as notes.
pub fn verify_partial_action_axioms(
    action: &Action,
    space: &SpaceSpec,
    sample: &BTreeSet<Point>,
) -> CheckReport {
    let mut report = CheckReport::new("partial-action axioms");
    let identity = GroupWord::identity();
    for x in sample {
        if !space.contains(x) {
            report.note(format!("sample point {x} is outside Ω and was ignored"));
            continue;
        }
        let ok = action.apply(&identity, x).ok().as_ref() == Some(x);
        report.check(ok, "PA1", || format!("θ_e({x}) ≠ {x}"));
    }
    let sample: Vec<&Point> = sample.iter().filter(|x| space.contains(x)).collect();

    let mut moves: Vec<GroupWord> = Vec::new();
    for g in 0..action.generators.len() {
        moves.push(GroupWord::gen(g));
        moves.push(GroupWord::gen_inv(g));
    }

    for w in &moves {
        let label = action.describe(w);
        let winv = w.inverse();
        let mut images: BTreeMap<Point, &Point> = BTreeMap::new();
        for &x in &sample {
            match action.restricted(w, x, space) {
                Some(y) => {
                    // x ∈ Dom θ_w  ⟹  θ_w(x) ∈ Dom θ_{w⁻¹} with θ_{w⁻¹}(θ_w(x)) = x
                    let back = action.restricted(&winv, &y, space);
                    report.check(back.as_ref() == Some(x), "PA2", || {
                        format!("{label}: {x} ↦ {y}, but the inverse sends {y} to {back:?}")
                    });
                    if let Some(prev) = images.insert(y.clone(), x) {
                        report.violate(
                            "PA2",
                            format!("{label} is not one-to-one: {prev} and {x} both map to {y}"),
                        );
                    }
                }
                None => report.note(format!("θ[{label}] undefined at {x}")),
            }
            // x ∈ Range θ_{w⁻¹}  ⟹  x ∈ Dom θ_w
            if let Some(y) = action.restricted(&winv, x, space) {
                let fwd = action.restricted(w, &y, space);
                report.check(fwd.as_ref() == Some(x), "PA2", || {
                    format!("{x} = θ[({label})^-1]({y}) is not undone by {label}")
                });
            }
        }
    }

    for g in &moves {
        for h in &moves {
            let hg = g.then(h);
            for &x in &sample {
                let Some(gx) = action.restricted(g, x, space) else {
                    continue;
                };
                let Some(hgx) = action.restricted(h, &gx, space) else {
                    continue;
                };
                let direct = action.restricted(&hg, x, space);
                report.check(direct.as_ref() == Some(&hgx), "PA3", || {
                    format!(
                        "θ[{}]({x}) = {direct:?} but θ_h(θ_g(x)) = {hgx}",
                        action.describe(&hg)
                    )
                });
            }
        }
    }
    report
}

/// Smallest `n ≤ budget` with `w^n` fixing every sample point.
pub fn order_on_sample(
    action: &Action,
    w: &GroupWord,
    sample: &[Point],
    budget: usize,
) -> Option<usize> {
    let mut current: Vec<Point> = sample.to_vec();
    for n in 1..=budget {
        let mut next = Vec::with_capacity(current.len());
        for y in &current {
            next.push(action.apply(w, y).ok()?);
        }
        current = next;
        if current.iter().zip(sample).all(|(a, b)| a == b) {
            return Some(n);
        }
    }
    None
}

/// Points on which a generator's order can be read off exactly.
pub fn order_sample(g: &Generator) -> Vec<Point> {
    match g {
        Generator::PermutationTable(t) => t.pairs().iter().map(|(a, _)| a.clone()).collect(),
        Generator::ReverseMask(_) | Generator::Shift(_) => alloc::vec![Point::bits([0])],
        Generator::TranslateQuad(_) => alloc::vec![Point::Quad(Quad::zero())],
        Generator::TranslateRational(s) if !s.is_integer() => {
            alloc::vec![Point::Quad(Quad::zero())]
        }
        Generator::Reflect(c) if !(c * int(2)).is_integer() => {
            alloc::vec![Point::Quad(Quad::zero()), Point::Quad(Quad::r())]
        }
        Generator::TranslateRational(_) | Generator::Reflect(_) => {
            alloc::vec![Point::Int(0), Point::Int(1)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use alloc::vec;

    fn ints(xs: impl IntoIterator<Item = i64>) -> BTreeSet<Point> {
        xs.into_iter().map(Point::Int).collect()
    }

    #[test]
    fn empty_word_is_identity() {
        let a = Action::new(vec![Generator::TranslateRational(int(1))]);
        assert_eq!(a.apply(&GroupWord::identity(), &Point::Int(7)).unwrap(), Point::Int(7));
    }

    #[test]
    fn translate_by_one() {
        let a = Action::new(vec![Generator::TranslateRational(int(1))]);
        assert_eq!(a.apply(&GroupWord::gen(0), &Point::Int(3)).unwrap(), Point::Int(4));
    }

    #[test]
    fn shift_then_reverse() {
        // {0} --shift+1--> {1} --flip 0--> {0, 1}
        let a = Action::new(vec![
            Generator::Shift(1),
            Generator::ReverseMask([0].into_iter().collect()),
        ]);
        let w = GroupWord::gen(0).then(&GroupWord::gen(1));
        assert_eq!(a.apply(&w, &Point::bits([0])).unwrap(), Point::bits([0, 1]));
    }

    #[test]
    fn variant_mismatch_is_reported() {
        let a = Action::new(vec![Generator::Shift(1)]);
        assert!(matches!(
            a.apply(&GroupWord::gen(0), &Point::Int(0)),
            Err(Error::VariantMismatch { .. })
        ));
        let b = Action::new(vec![Generator::TranslateRational(ratio(1, 2))]);
        assert!(b.apply(&GroupWord::gen(0), &Point::Int(0)).is_err());
        assert!(matches!(
            b.apply(&GroupWord::gen(3), &Point::Int(0)),
            Err(Error::UnknownGenerator(3))
        ));
    }

    #[test]
    fn reverse_mask_closure_has_two_points() {
        let a = Action::new(vec![Generator::ReverseMask([0].into_iter().collect())]);
        let res = partial_orbit_closure(
            &a,
            &[GroupWord::gen(0)],
            &Point::bits([]),
            &SpaceSpec::everything("Z2^Z"),
            10,
        )
        .unwrap();
        assert_eq!(
            res,
            ClosureResult::Finite([Point::bits([]), Point::bits([0])].into_iter().collect())
        );
    }

    #[test]
    fn successor_closure_exceeds_budget_along_a_path() {
        let a = Action::new(vec![Generator::TranslateRational(int(1))]);
        let h = [GroupWord::gen(0)];
        let space = SpaceSpec::everything("Z");
        let res = partial_orbit_closure(&a, &h, &Point::Int(0), &space, 100).unwrap();
        match &res {
            ClosureResult::BudgetExceeded { path } => {
                let pts: Vec<Point> = path.iter().map(|s| s.point.clone()).collect();
                assert_eq!(pts, (0..100).map(Point::Int).collect::<Vec<_>>());
            }
            other => panic!("expected budget exceeded, got {other:?}"),
        }
        assert!(res.verify(&a, &h, &space));
    }

    #[test]
    fn closure_exactly_at_budget_is_finite() {
        let a = Action::new(vec![Generator::TranslateRational(int(1))]);
        let space = SpaceSpec::new("Z", Region::IntRange { lo: Some(0), hi: Some(4) });
        let res =
            partial_orbit_closure(&a, &[GroupWord::gen(0)], &Point::Int(0), &space, 5).unwrap();
        assert_eq!(res, ClosureResult::Finite(ints(0..5)));
    }

    #[test]
    fn closure_rejects_start_outside_omega() {
        let a = Action::new(vec![]);
        let space = SpaceSpec::new("Z", Region::IntRange { lo: Some(0), hi: Some(4) });
        assert!(partial_orbit_closure(&a, &[], &Point::Int(9), &space, 5).is_err());
    }

    #[test]
    fn interval_translations_are_not_locally_finite() {
        let a = Action::new(vec![
            Generator::TranslateRational(ratio(-1, 2)),
            Generator::TranslateQuad(Quad::r()),
        ]);
        let h = [GroupWord::gen(0), GroupWord::gen(1)];
        let space = SpaceSpec::unit_interval();
        let res = partial_orbit_closure(&a, &h, &Point::Quad(Quad::zero()), &space, 1000).unwrap();
        assert!(!res.is_finite());
        assert!(res.verify(&a, &h, &space));
    }

    #[test]
    fn interval_sequence_first_terms() {
        assert_eq!(thm2_interval_sequence(0), vec![Quad::zero()]);
        let xs = thm2_interval_sequence(3);
        assert_eq!(
            xs,
            vec![
                Quad::zero(),
                Quad::new(int(0), 1),
                Quad::new(int(0), 2),
                Quad::new(ratio(-1, 2), 2),
            ]
        );
    }

    #[test]
    fn interval_sequence_has_no_repetitions() {
        let xs = thm2_interval_sequence(1000);
        let distinct: BTreeSet<&Quad> = xs.iter().collect();
        assert_eq!(distinct.len(), 1001);
        assert!(xs.iter().all(|x| x.within(&int(0), &int(1))));
    }

    #[test]
    fn components_without_generators_are_singletons() {
        let a = Action::new(vec![]);
        let comps = move_graph_components(&a, &ints(0..4), &[]);
        assert_eq!(comps.len(), 4);
    }

    #[test]
    fn five_cycle_is_one_component() {
        let pts: Vec<Point> = (0..5).map(Point::Int).collect();
        let a = Action::new(vec![Generator::PermutationTable(
            PermutationTable::cycle(pts).unwrap(),
        )]);
        let comps = move_graph_components(&a, &ints(0..5), &a.generator_words());
        assert_eq!(comps, vec![ints(0..5)]);
    }

    #[test]
    fn restricted_successor_connects_a_segment() {
        let a = Action::new(vec![Generator::TranslateRational(int(1))]);
        let comps = move_graph_components(&a, &ints(0..3), &a.generator_words());
        assert_eq!(comps, vec![ints(0..3)]);
    }

    #[test]
    fn partial_action_axioms_identity_only() {
        let a = Action::new(vec![]);
        let rep = verify_partial_action_axioms(&a, &SpaceSpec::everything("Z"), &ints(0..3));
        assert!(rep.passed());
    }

    #[test]
    fn partial_action_axioms_on_interval() {
        let a = Action::new(vec![Generator::TranslateRational(ratio(1, 2))]);
        let sample: BTreeSet<Point> = [ratio(0, 1), ratio(1, 4), ratio(3, 4)]
            .into_iter()
            .map(Point::rational)
            .collect();
        let rep = verify_partial_action_axioms(&a, &SpaceSpec::unit_interval(), &sample);
        assert!(rep.passed(), "{:?}", rep.violations);
        assert!(rep
            .notes
            .iter()
            .any(|n| n.contains("translate:1/2") && n.contains("quad:3/4,0") && !n.contains("^-1")));
    }

    #[test]
    fn corrupted_table_breaks_pa2() {
        let table = PermutationTable::unchecked(vec![
            (Point::Int(0), Point::Int(2)),
            (Point::Int(1), Point::Int(2)),
            (Point::Int(2), Point::Int(0)),
        ]);
        assert!(!table.is_bijection());
        let a = Action::new(vec![Generator::PermutationTable(table)]);
        let rep = verify_partial_action_axioms(&a, &SpaceSpec::everything("Z"), &ints(0..3));
        assert!(rep.violations_of("PA2").count() > 0);
    }

    #[test]
    fn orders_of_generators() {
        let rev = Action::new(vec![Generator::ReverseMask([0, 3].into_iter().collect())]);
        let g = &rev.generators[0];
        assert_eq!(order_on_sample(&rev, &GroupWord::gen(0), &order_sample(g), 10), Some(2));
        let tr = Action::new(vec![Generator::TranslateRational(int(1))]);
        let g = &tr.generators[0];
        assert_eq!(order_on_sample(&tr, &GroupWord::gen(0), &order_sample(g), 50), None);
    }
}
