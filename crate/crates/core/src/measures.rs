//! `[0, ∞]`-valued measures on finite algebras, the Rényi order, level
//! stacks, and the finite-stage measures of the net construction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use crate::action::{
    partial_orbit_closure, symmetrize, Action, ClosureResult, FiniteSpace, GroupWord, Point,
    SpaceSpec,
};
use crate::{Error, ExtRat, Rational, Result};

/// Most atoms an algebra may have; members are `u32` bitmasks.
pub const MAX_ATOMS: usize = 16;

/// A member of a [`FinAlgebra`]: bit `i` set iff atom `i` is included.
pub type Member = u32;

/// The algebra of unions of a partition of a finite `Ω` into atoms.
///
/// Points are referred to by index into a [`FiniteSpace`] (or any other
/// enumeration of `Ω` of length `points`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinAlgebra {
    points: usize,
    atoms: Vec<BTreeSet<usize>>,
    atom_of: Vec<usize>,
}

impl FinAlgebra {
    pub fn new(points: usize, atoms: Vec<BTreeSet<usize>>) -> Result<Self> {
        if atoms.len() > MAX_ATOMS {
            return Err(Error::AlgebraTooLarge {
                atoms: atoms.len(),
                limit: MAX_ATOMS,
            });
        }
        let mut atom_of = alloc::vec![usize::MAX; points];
        for (k, block) in atoms.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidAlgebra(format!("atom {k} is empty")));
            }
            for &i in block {
                if i >= points {
                    return Err(Error::InvalidAlgebra(format!("atom {k} names point {i}")));
                }
                if atom_of[i] != usize::MAX {
                    return Err(Error::InvalidAlgebra(format!("point {i} lies in two atoms")));
                }
                atom_of[i] = k;
            }
        }
        if let Some(i) = atom_of.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidAlgebra(format!("point {i} lies in no atom")));
        }
        Ok(FinAlgebra {
            points,
            atoms,
            atom_of,
        })
    }

    /// Every point its own atom.
    pub fn powerset(points: usize) -> Result<Self> {
        FinAlgebra::new(points, (0..points).map(|i| [i].into_iter().collect()).collect())
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn point_count(&self) -> usize {
        self.points
    }

    pub fn atoms(&self) -> &[BTreeSet<usize>] {
        &self.atoms
    }

    pub fn full(&self) -> Member {
        full_mask(self.atoms.len())
    }

    /// Index of the atom holding `point`.
    pub fn atom_of(&self, point: usize) -> usize {
        self.atom_of[point]
    }

    pub fn members(&self) -> impl Iterator<Item = Member> {
        0..=self.full()
    }

    pub fn points_of(&self, m: Member) -> BTreeSet<usize> {
        atoms_in(m)
            .flat_map(|k| self.atoms[k].iter().copied())
            .collect()
    }

    /// The member consisting of exactly these points, if it is a union of atoms.
    pub fn member_of(&self, points: &BTreeSet<usize>) -> Option<Member> {
        let mut m: Member = 0;
        for &i in points {
            m |= 1 << *self.atom_of.get(i)?;
        }
        (self.points_of(m) == *points).then_some(m)
    }

    /// Image of a member under a move of `space`, if it stays in `Ω` and in
    /// the algebra.
    pub fn image(&self, space: &FiniteSpace, mv: usize, m: Member) -> Option<Member> {
        let img = space.image_of(mv, &self.points_of(m))?;
        self.member_of(&img)
    }
}

pub(crate) fn full_mask(atoms: usize) -> Member {
    if atoms == 0 {
        0
    } else {
        Member::MAX >> (32 - atoms)
    }
}

pub(crate) fn atoms_in(m: Member) -> impl Iterator<Item = usize> {
    (0..32).filter(move |k| m >> k & 1 == 1)
}

/// A finitely additive `[0, ∞]`-valued measure given by its atom weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub weights: Vec<ExtRat>,
}

impl Measure {
    pub fn new(weights: Vec<ExtRat>) -> Self {
        Measure { weights }
    }

    /// Sums per-point weights over each atom.
    pub fn from_points(algebra: &FinAlgebra, point_weights: &[Rational]) -> Self {
        Measure {
            weights: algebra
                .atoms
                .iter()
                .map(|a| ExtRat::finite(a.iter().map(|&i| point_weights[i].clone()).sum()))
                .collect(),
        }
    }

    pub fn eval(&self, m: Member) -> ExtRat {
        atoms_in(m).map(|k| self.weights[k].clone()).sum()
    }

    pub fn is_null(&self, m: Member) -> bool {
        self.eval(m).is_zero()
    }
}

/// Per-point weights of the canonical invariant measure with unit mass on
/// the target `e` (given as point indices of `space`).
///
/// The `k` move-graph components meeting `e` each get mass `1/k` on their
/// part of `e`, spread evenly over those points; every point of such a
/// component carries that same per-point weight. Other components get 0.
/// The weights are invariant under the moves `space` was built with.
pub fn invariant_unit_weights(space: &FiniteSpace, e: &BTreeSet<usize>) -> Result<Vec<Rational>> {
    if e.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let comps = space.components();
    let meeting: Vec<&BTreeSet<usize>> = comps.iter().filter(|c| !c.is_disjoint(e)).collect();
    let k = meeting.len() as i64;
    let mut w = alloc::vec![Rational::zero(); space.len()];
    for c in meeting {
        let hit = c.intersection(e).count() as i64;
        let per_point = Rational::new(1.into(), (k * hit).into());
        for &i in c {
            w[i] = per_point.clone();
        }
    }
    Ok(w)
}

/// [`invariant_unit_weights`] keyed by point.
pub fn invariant_unit_measure(
    action: &Action,
    omega: &BTreeSet<Point>,
    moves: &[GroupWord],
    e: &BTreeSet<Point>,
) -> Result<BTreeMap<Point, Rational>> {
    let space = FiniteSpace::new(action, omega, moves);
    let idx: BTreeSet<usize> = e
        .iter()
        .map(|x| space.index_of(x).ok_or_else(|| Error::OutsideSpace(x.to_string())))
        .collect::<Result<_>>()?;
    let w = invariant_unit_weights(&space, &idx)?;
    Ok(space.points.iter().cloned().zip(w).collect())
}

/// `μ ≺ ν`: every `ν`-positive member is `μ`-infinite.
pub fn renyi_precedes(mu: &Measure, nu: &Measure, algebra: &FinAlgebra) -> bool {
    algebra
        .members()
        .all(|m| nu.is_null(m) || mu.eval(m).is_infinite())
}

/// Measures `μ_1 ≻ μ_2 ≻ … ≻ μ_N` with every nonempty member positive and
/// finite at exactly its first positive level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStack {
    pub levels: Vec<Measure>,
    /// `index[m]` is the 0-based level `n_A` for member `m ≠ ∅`.
    index: Vec<usize>,
}

impl LevelStack {
    /// Validates the chain and computes the level index of every member.
    pub fn new(levels: Vec<Measure>, algebra: &FinAlgebra) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidStack("no levels".into()));
        }
        if let Some(bad) = levels.iter().position(|l| l.weights.len() != algebra.atom_count()) {
            return Err(Error::InvalidStack(format!("level {} has the wrong number of atoms", bad + 1)));
        }
        for n in 1..levels.len() {
            if !renyi_precedes(&levels[n], &levels[n - 1], algebra) {
                return Err(Error::InvalidStack(format!(
                    "level {} does not precede level {n} in the Rényi order",
                    n + 1
                )));
            }
        }
        let mut index = alloc::vec![0; algebra.full() as usize + 1];
        for m in algebra.members().skip(1) {
            let n = levels
                .iter()
                .position(|l| !l.is_null(m))
                .ok_or_else(|| Error::InvalidStack(format!("member {m:#b} is null at every level")))?;
            if levels[n].eval(m).is_infinite() {
                return Err(Error::InvalidStack(format!(
                    "member {m:#b} is infinite at its first positive level {}",
                    n + 1
                )));
            }
            index[m as usize] = n;
        }
        Ok(LevelStack { levels, index })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// 0-based level `n_A` of a nonempty member.
    pub fn level_of(&self, m: Member) -> usize {
        assert!(m != 0, "the empty set has no level");
        self.index[m as usize]
    }
}

/// The level-stack construction with the canonical measure at every stage.
///
/// `μ_1` is the unit invariant measure on all of `Ω`, which is positive on
/// every nonempty member, so this always stops at `N = 1`.
pub fn build_level_stack(space: &FiniteSpace, algebra: &FinAlgebra) -> Result<LevelStack> {
    build_level_stack_with(space, algebra, &(0..space.len()).collect())
}

/// The level-stack construction with `μ_1` the unit invariant measure on
/// `first_target`.
///
/// At each further stage `E_{n+1}` is the union of the `μ_n`-null atoms;
/// `μ_{n+1}` is the unit invariant measure on `E_{n+1}` there and `∞`
/// elsewhere. Stops once only `∅` is null.
pub fn build_level_stack_with(
    space: &FiniteSpace,
    algebra: &FinAlgebra,
    first_target: &BTreeSet<usize>,
) -> Result<LevelStack> {
    if space.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let w = invariant_unit_weights(space, first_target)?;
    let mut levels = alloc::vec![Measure::from_points(algebra, &w)];
    loop {
        let last = levels.last().unwrap();
        let null: Member = (0..algebra.atom_count())
            .filter(|&k| last.weights[k].is_zero())
            .fold(0, |m, k| m | 1 << k);
        if null == 0 {
            break;
        }
        let target = algebra.points_of(null);
        let w = invariant_unit_weights(space, &target)?;
        let weights = (0..algebra.atom_count())
            .map(|k| {
                if null >> k & 1 == 1 {
                    ExtRat::finite(algebra.atoms()[k].iter().map(|&i| w[i].clone()).sum())
                } else {
                    ExtRat::Infinite
                }
            })
            .collect();
        levels.push(Measure::new(weights));
        if levels.len() > algebra.atom_count() + 1 {
            return Err(Error::InvalidStack("construction did not terminate".into()));
        }
    }
    LevelStack::new(levels, algebra)
}

/// A stage `(H, B)` of the net, ordered by inclusion in both coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetIndex {
    pub h: Vec<GroupWord>,
    pub b: BTreeSet<Point>,
}

impl NetIndex {
    pub fn new(h: Vec<GroupWord>, b: BTreeSet<Point>) -> Self {
        NetIndex { h, b }
    }

    /// `self ⪯ other`.
    pub fn precedes(&self, other: &NetIndex) -> bool {
        self.h.iter().all(|w| other.h.contains(w)) && self.b.is_subset(&other.b)
    }
}

/// `B' = ⋃_{x ∈ B} G_{H',x}` with `H' = H ∪ H⁻¹`.
pub fn net_stage_support(
    action: &Action,
    idx: &NetIndex,
    space: &SpaceSpec,
    budget: usize,
) -> Result<BTreeSet<Point>> {
    let h = symmetrize(&idx.h);
    let mut support = BTreeSet::new();
    for x in &idx.b {
        if support.contains(x) {
            continue;
        }
        match partial_orbit_closure(action, &h, x, space, budget)? {
            ClosureResult::Finite(c) => support.extend(c),
            ClosureResult::BudgetExceeded { .. } => {
                return Err(Error::ClosureBudgetExceeded {
                    start: x.to_string(),
                    budget,
                })
            }
        }
    }
    Ok(support)
}

/// `|U ∩ B'| / |B'|`, the uniform measure of the stage on `U`.
pub fn net_stage_measure(
    action: &Action,
    idx: &NetIndex,
    u: &BTreeSet<Point>,
    space: &SpaceSpec,
    budget: usize,
) -> Result<Rational> {
    let support = net_stage_support(action, idx, space, budget)?;
    if support.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let hit = u.intersection(&support).count();
    Ok(Rational::new(hit.into(), support.len().into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetVerdict {
    Stabilized(Ordering),
    Unstable,
}

/// Stage-by-stage comparison of two sets along a schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetComparison {
    /// Sign of `P(U) − P(V)` at each stage.
    pub signs: Vec<Ordering>,
    pub verdict: NetVerdict,
}

/// Compares `U` and `V` at every stage of an increasing schedule.
///
/// The verdict is `Stabilized` when the sign is constant over the last half
/// of the stages (rounded up). This is evidence about the limit along the
/// schedule, never a proof.
pub fn net_compare(
    action: &Action,
    u: &BTreeSet<Point>,
    v: &BTreeSet<Point>,
    schedule: &[NetIndex],
    space: &SpaceSpec,
    budget: usize,
) -> Result<NetComparison> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if let Some(k) = (1..schedule.len()).find(|&k| !schedule[k - 1].precedes(&schedule[k])) {
        return Err(Error::NotIncreasing(k));
    }
    let mut signs = Vec::with_capacity(schedule.len());
    for idx in schedule {
        let pu = net_stage_measure(action, idx, u, space, budget)?;
        let pv = net_stage_measure(action, idx, v, space, budget)?;
        signs.push(pu.cmp(&pv));
    }
    let tail = &signs[signs.len() / 2..];
    let verdict = if tail.iter().all(|s| *s == tail[0]) {
        NetVerdict::Stabilized(tail[0])
    } else {
        NetVerdict::Unstable
    };
    Ok(NetComparison { signs, verdict })
}

/// Sum of per-point weights over a set of indices.
pub fn total(weights: &[Rational], set: &BTreeSet<usize>) -> Rational {
    set.iter().map(|&i| weights[i].clone()).sum()
}

/// `true` iff the weights sum to one over `set`.
pub fn is_unit_on(weights: &[Rational], set: &BTreeSet<usize>) -> bool {
    total(weights, set).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Generator, PermutationTable, Region};
    use crate::{int, ratio, Quad};
    use alloc::vec;

    fn ints(xs: impl IntoIterator<Item = i64>) -> BTreeSet<Point> {
        xs.into_iter().map(Point::Int).collect()
    }

    fn fin(x: Rational) -> ExtRat {
        ExtRat::finite(x)
    }

    #[test]
    fn transitive_action_gives_uniform_measure() {
        let pts: Vec<Point> = (0..4).map(Point::Int).collect();
        let act = Action::new(vec![Generator::PermutationTable(PermutationTable::cycle(pts).unwrap())]);
        let m = invariant_unit_measure(&act, &ints(0..4), &act.generator_words(), &ints(0..4)).unwrap();
        assert!(m.values().all(|w| *w == ratio(1, 4)));
    }

    #[test]
    fn two_components_split_mass() {
        // Components {0} and {1, 2}: each gets 1/2, spread over its points.
        let act = Action::new(vec![Generator::PermutationTable(
            PermutationTable::new(vec![(Point::Int(1), Point::Int(2)), (Point::Int(2), Point::Int(1))]).unwrap(),
        )]);
        let m = invariant_unit_measure(&act, &ints(0..3), &act.generator_words(), &ints(0..3)).unwrap();
        assert_eq!(m[&Point::Int(0)], ratio(1, 2));
        assert_eq!(m[&Point::Int(1)], ratio(1, 4));
        assert_eq!(m[&Point::Int(2)], ratio(1, 4));
    }

    #[test]
    fn empty_target_rejected() {
        let act = Action::new(vec![]);
        assert_eq!(
            invariant_unit_measure(&act, &ints(0..3), &[], &BTreeSet::new()),
            Err(Error::EmptyTarget)
        );
    }

    #[test]
    fn renyi_examples() {
        let alg = FinAlgebra::powerset(2).unwrap();
        let p = Measure::new(vec![fin(ratio(1, 2)), fin(ratio(1, 2))]);
        assert!(!renyi_precedes(&p, &p, &alg));
        let delta = Measure::new(vec![fin(int(1)), fin(int(0))]);
        let mu = Measure::new(vec![ExtRat::Infinite, fin(int(0))]);
        assert!(renyi_precedes(&mu, &delta, &alg));
        let zero = Measure::new(vec![fin(int(0)), fin(int(0))]);
        assert!(renyi_precedes(&p, &zero, &alg));
    }

    #[test]
    fn canonical_stack_has_one_level() {
        let act = Action::new(vec![Generator::TranslateRational(int(1))]);
        let space = FiniteSpace::new(&act, &ints(0..3), &act.generator_words());
        let alg = FinAlgebra::powerset(3).unwrap();
        let stack = build_level_stack(&space, &alg).unwrap();
        assert_eq!(stack.depth(), 1);
        assert!(stack.levels[0].weights.iter().all(|w| *w == fin(ratio(1, 3))));
    }

    #[test]
    fn targeted_stack_has_two_levels() {
        // Components {0, 1} and {2}; aiming μ_1 at {0} leaves {2} null.
        let act = Action::new(vec![Generator::PermutationTable(
            PermutationTable::new(vec![(Point::Int(0), Point::Int(1)), (Point::Int(1), Point::Int(0))]).unwrap(),
        )]);
        let space = FiniteSpace::new(&act, &ints(0..3), &act.generator_words());
        let alg = FinAlgebra::powerset(3).unwrap();
        let stack = build_level_stack_with(&space, &alg, &[0].into_iter().collect()).unwrap();
        assert_eq!(stack.depth(), 2);
        assert_eq!(stack.levels[0].weights, vec![fin(int(1)), fin(int(1)), fin(int(0))]);
        assert_eq!(stack.levels[1].weights, vec![ExtRat::Infinite, ExtRat::Infinite, fin(int(1))]);
        assert!(renyi_precedes(&stack.levels[1], &stack.levels[0], &alg));
        assert_eq!(stack.level_of(0b100), 1);
        assert_eq!(stack.level_of(0b101), 0);
    }

    #[test]
    fn invalid_stacks_rejected() {
        let alg = FinAlgebra::powerset(2).unwrap();
        let null_b = Measure::new(vec![fin(int(1)), fin(int(0))]);
        assert!(LevelStack::new(vec![null_b.clone()], &alg).is_err());
        assert!(LevelStack::new(vec![null_b.clone(), null_b], &alg).is_err());
    }

    fn coin(k: i64) -> (Action, SpaceSpec) {
        let act = Action::new((0..k).map(|i| Generator::ReverseMask([i].into_iter().collect())).collect());
        (act, SpaceSpec::new("Z2^10", Region::BitsWithin { lo: 0, hi: k - 1 }))
    }

    #[test]
    fn stage_measure_examples() {
        let (act, space) = coin(1);
        let idx = NetIndex::new(vec![GroupWord::gen(0)], [Point::bits([])].into_iter().collect());
        let zero: BTreeSet<Point> = [Point::bits([])].into_iter().collect();
        assert_eq!(net_stage_measure(&act, &idx, &zero, &space, 100).unwrap(), ratio(1, 2));
        let both: BTreeSet<Point> = [Point::bits([]), Point::bits([0])].into_iter().collect();
        assert_eq!(net_stage_measure(&act, &idx, &both, &space, 100).unwrap(), int(1));

        let interval = Action::new(vec![
            Generator::TranslateRational(ratio(-1, 2)),
            Generator::TranslateQuad(Quad::r()),
        ]);
        let idx = NetIndex::new(
            vec![GroupWord::gen(0), GroupWord::gen(1)],
            [Point::Quad(Quad::zero())].into_iter().collect(),
        );
        assert!(matches!(
            net_stage_measure(&interval, &idx, &BTreeSet::new(), &SpaceSpec::unit_interval(), 500),
            Err(Error::ClosureBudgetExceeded { .. })
        ));
    }

    fn growing(ks: impl IntoIterator<Item = i64>) -> Vec<NetIndex> {
        ks.into_iter().map(|k| NetIndex::new(vec![], ints(0..=k))).collect()
    }

    #[test]
    fn net_comparisons() {
        let act = Action::new(vec![]);
        let z = SpaceSpec::everything("Z");
        let u = ints([0, 3]);
        let same = net_compare(&act, &u, &u, &growing(0..6), &z, 10).unwrap();
        assert_eq!(same.verdict, NetVerdict::Stabilized(Ordering::Equal));

        let sub = net_compare(&act, &ints([1]), &ints([1, 2]), &growing(0..8), &z, 10).unwrap();
        assert_eq!(sub.verdict, NetVerdict::Stabilized(Ordering::Less));

        let evens = ints((0..20).step_by(2));
        let odds = ints((1..20).step_by(2));
        let alt = net_compare(&act, &evens, &odds, &growing(0..12), &z, 10).unwrap();
        assert_eq!(alt.verdict, NetVerdict::Unstable);
    }

    #[test]
    fn schedule_errors() {
        let act = Action::new(vec![]);
        let z = SpaceSpec::everything("Z");
        let u = ints([0]);
        assert_eq!(net_compare(&act, &u, &u, &[], &z, 10), Err(Error::EmptySchedule));
        let bad = vec![NetIndex::new(vec![], ints(0..3)), NetIndex::new(vec![], ints(0..2))];
        assert_eq!(net_compare(&act, &u, &u, &bad, &z, 10), Err(Error::NotIncreasing(1)));
    }
}
