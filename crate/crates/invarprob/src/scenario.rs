//! Scenario files: a space, generators and a list of checks to run on them.

use std::collections::{BTreeMap, BTreeSet};

use invarprob_core::action::{
    partial_orbit_closure, symmetrize, thm2_interval_sequence, verify_partial_action_axioms, Action, ClosureResult,
    FiniteSpace, Generator, GroupWord, Point, Region, SpaceSpec,
};
use invarprob_core::cone::{
    c0_compare, cone_exchange_rate, gamma_indicator, gamma_law_check, skew_popper, skew_weak_invariance, ConeOracle,
    GammaValue,
};
use invarprob_core::equidecomp::{equidecomposable, paradox_witness_check, ray_decomposition, verify_witness, coin_flip_witness};
use invarprob_core::measures::{build_level_stack, build_level_stack_with, net_compare, net_stage_measure, net_stage_support, FinAlgebra, LevelStack, NetIndex, NetVerdict};
use invarprob_core::popper::{
    exchange_from_popper, popper_from_exchange, popper_from_levels, verify_exchange_axioms, verify_popper_axioms,
    verify_strong_invariance_exchange, verify_strong_invariance_popper, PopperTable, RateEntry, EXHAUSTIVE_TRIPLE_ATOMS,
};
use invarprob_core::qual::{
    all_masks, finite_order_certificate, lexmax_compare, prop1_skew_check, qual_from_popper, verify_qual_axioms,
    verify_strong_invariance_qual, verify_weak_invariance_qual, AlgebraMoves, CompareVerdict, LexMax, QualOracle,
    SkewBranch, Translations,
};
use invarprob_core::zset::ZSet;
use invarprob_core::{CheckReport, Error as CoreError, ExtRat, Quad};
use serde::{Deserialize, Deserializer};
use serde_json::json;

use crate::literal::{enumerate_region, parse_point, parse_region, parse_word, parse_zset, ParseError};
use crate::report::{Expectation, Outcome, Report, Status};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

impl From<ParseError> for ScenarioError {
    fn from(e: ParseError) -> Self {
        ScenarioError::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for ScenarioError {
    fn from(e: serde_json::Error) -> Self {
        ScenarioError::Parse(e.to_string())
    }
}

/// Default closure budget.
pub const DEFAULT_BUDGET: usize = 10_000;
/// Largest finite `Ω` listed for a sweep.
const ENUMERATE_LIMIT: usize = 1 << 16;

macro_rules! literal {
    ($name:ident, $ty:ty, $parse:path) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub $ty);

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                $parse(&s).map($name).map_err(serde::de::Error::custom)
            }
        }
    };
}

literal!(Z, ZSet, parse_zset);
literal!(P, Point, parse_point);
literal!(R, Region, parse_region);

fn points(ps: &[P]) -> BTreeSet<Point> {
    ps.iter().map(|p| p.0.clone()).collect()
}

fn zsets(zs: &[Z]) -> Vec<ZSet> {
    zs.iter().map(|z| z.0.clone()).collect()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointsParams {
    pub points: Option<Vec<P>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitParams {
    pub point: P,
    #[serde(default)]
    pub moves: Option<Vec<String>>,
    #[serde(default)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalParams {
    pub points: Option<Vec<P>>,
    pub moves: Option<Vec<String>>,
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalParams {
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RaySource {
    /// The interval sequence with its own two moves.
    Interval,
    /// `start, step·start, step²·start, ...`
    Iterate { start: P, step: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayParams {
    pub source: RaySource,
    pub length: usize,
    pub moves: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquiParams {
    pub a: Vec<P>,
    pub b: Vec<P>,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParadoxParams {
    pub witness: String,
    pub depth: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelParams {
    /// A finite part of `Ω` to build the table on; defaults to `Ω`.
    pub region: Option<R>,
    pub moves: Option<Vec<String>>,
    /// Support of the first level; defaults to the whole region.
    pub target: Option<Vec<P>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageParams {
    pub moves: Vec<String>,
    pub points: Vec<P>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetParams {
    pub stages: Vec<StageParams>,
    pub sets: Vec<Vec<P>>,
    #[serde(default)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrderParams {
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleName {
    #[default]
    Cone,
    Lexmax,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualParams {
    #[serde(default)]
    pub oracle: OracleName,
    pub family: Vec<Z>,
    #[serde(default)]
    pub shifts: Vec<i64>,
    /// `a < b`: report whether `{a}` and `{b} = {a} + (b − a)` are equivalent.
    #[serde(default)]
    pub pair: Option<[i64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    pub a: Z,
    pub b: Z,
    #[serde(default)]
    pub oracle: OracleName,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriplesParams {
    pub triples: Vec<[Z; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfLineParams {
    pub m: [i64; 2],
    pub n: [i64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    pub family: Vec<Z>,
    #[serde(default)]
    pub shifts: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Check {
    PaAxioms(PointsParams),
    Orbit(OrbitParams),
    Localfinite(LocalParams),
    IntervalSequence(IntervalParams),
    Ray(RayParams),
    Equidecomp(EquiParams),
    Paradox(ParadoxParams),
    PopperLevels(LevelParams),
    Exchange(LevelParams),
    QualLevels(LevelParams),
    NetInvariance(NetParams),
    FiniteOrder(OrderParams),
    QualVerify(QualParams),
    Compare(PairParams),
    Gamma(PairParams),
    Skew(PairParams),
    GammaLaws(TriplesParams),
    HalfLines(HalfLineParams),
    ConeExchange(FamilyParams),
    SkewInvariance(FamilyParams),
}

/// Every check name a scenario may use.
pub const OPS: &[&str] = &[
    "pa-axioms",
    "orbit",
    "localfinite",
    "interval-sequence",
    "ray",
    "equidecomp",
    "paradox",
    "popper-levels",
    "exchange",
    "qual-levels",
    "net-invariance",
    "finite-order",
    "qual-verify",
    "compare",
    "gamma",
    "skew",
    "gamma-laws",
    "half-lines",
    "cone-exchange",
    "skew-invariance",
];

impl Check {
    pub fn op(&self) -> &'static str {
        match self {
            Check::PaAxioms(_) => "pa-axioms",
            Check::Orbit(_) => "orbit",
            Check::Localfinite(_) => "localfinite",
            Check::IntervalSequence(_) => "interval-sequence",
            Check::Ray(_) => "ray",
            Check::Equidecomp(_) => "equidecomp",
            Check::Paradox(_) => "paradox",
            Check::PopperLevels(_) => "popper-levels",
            Check::Exchange(_) => "exchange",
            Check::QualLevels(_) => "qual-levels",
            Check::NetInvariance(_) => "net-invariance",
            Check::FiniteOrder(_) => "finite-order",
            Check::QualVerify(_) => "qual-verify",
            Check::Compare(_) => "compare",
            Check::Gamma(_) => "gamma",
            Check::Skew(_) => "skew",
            Check::GammaLaws(_) => "gamma-laws",
            Check::HalfLines(_) => "half-lines",
            Check::ConeExchange(_) => "cone-exchange",
            Check::SkewInvariance(_) => "skew-invariance",
        }
    }

    /// Word literals, validated once the generator count is known.
    fn words(&self) -> Vec<&str> {
        fn opt(m: &Option<Vec<String>>) -> Vec<&str> {
            m.iter().flatten().map(String::as_str).collect()
        }
        match self {
            Check::Orbit(p) => opt(&p.moves),
            Check::Localfinite(p) => opt(&p.moves),
            Check::Ray(p) => {
                let mut w: Vec<&str> = p.moves.iter().map(String::as_str).collect();
                if let RaySource::Iterate { step, .. } = &p.source {
                    w.push(step);
                }
                w
            }
            Check::Equidecomp(p) => p.words.iter().map(String::as_str).collect(),
            Check::PopperLevels(p) | Check::Exchange(p) | Check::QualLevels(p) => opt(&p.moves),
            Check::NetInvariance(p) => p.stages.iter().flat_map(|s| s.moves.iter().map(String::as_str)).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub id: String,
    pub check: Check,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub omega_star: String,
    pub region: Region,
    pub generators: Vec<Generator>,
    pub checks: Vec<CheckSpec>,
    pub expected: Vec<Expectation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    description: String,
    space: RawSpace,
    #[serde(default)]
    generators: Vec<String>,
    #[serde(default)]
    checks: Vec<RawCheck>,
    #[serde(default)]
    expected: Vec<Expectation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    omega_star: String,
    omega: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    #[serde(default)]
    id: Option<String>,
    op: String,
    #[serde(default)]
    params: serde_json::Value,
}

impl Scenario {
    /// A scenario with no generators and no checks.
    pub fn empty(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            description: String::new(),
            omega_star: "Z".into(),
            region: Region::All,
            generators: Vec::new(),
            checks: Vec::new(),
            expected: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = serde_json::from_str(text)?;
        let generators = raw
            .generators
            .iter()
            .map(|g| crate::literal::parse_generator(g))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sc = Scenario {
            name: raw.name,
            description: raw.description,
            omega_star: raw.space.omega_star,
            region: parse_region(&raw.space.omega)?,
            generators,
            checks: Vec::new(),
            expected: raw.expected,
        };
        for (k, rc) in raw.checks.into_iter().enumerate() {
            if !OPS.contains(&rc.op.as_str()) {
                return Err(ScenarioError::UnknownCheck(rc.op));
            }
            let params = if rc.params.is_null() { json!({}) } else { rc.params };
            let check: Check = serde_json::from_value(json!({"op": rc.op, "params": params}))
                .map_err(|e| ScenarioError::Parse(format!("check {} ({}): {e}", k, rc.op)))?;
            let id = rc.id.unwrap_or_else(|| format!("{}-{k}", rc.op));
            sc.push(id, check)?;
        }
        sc.validate()?;
        Ok(sc)
    }

    /// Adds a check after validating its words.
    pub fn push(&mut self, id: impl Into<String>, check: Check) -> Result<(), ScenarioError> {
        for w in check.words() {
            parse_word(w, self.generators.len())?;
        }
        self.checks.push(CheckSpec { id: id.into(), check });
        Ok(())
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let mut ids = BTreeSet::new();
        for c in &self.checks {
            if !ids.insert(c.id.as_str()) {
                return Err(ScenarioError::Invalid(format!("duplicate check id `{}`", c.id)));
            }
        }
        for e in &self.expected {
            if !ids.contains(e.check.as_str()) {
                return Err(ScenarioError::Invalid(format!("expectation for unknown check `{}`", e.check)));
            }
        }
        Ok(())
    }

    pub fn action(&self) -> Action {
        Action::new(self.generators.clone())
    }

    pub fn space(&self) -> SpaceSpec {
        SpaceSpec::new(self.omega_star.clone(), self.region.clone())
    }
}

/// Knobs shared by every check of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub budget: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            budget: DEFAULT_BUDGET,
        }
    }
}

struct Ctx<'a> {
    action: Action,
    space: SpaceSpec,
    sc: &'a Scenario,
    opts: RunOptions,
}

type Step = Result<(), String>;

fn core(e: CoreError) -> String {
    e.to_string()
}

impl Ctx<'_> {
    fn words(&self, ws: &[String]) -> Result<Vec<GroupWord>, String> {
        ws.iter()
            .map(|w| parse_word(w, self.sc.generators.len()).map_err(|e| e.to_string()))
            .collect()
    }

    /// Given words, or `H ∪ H⁻¹` over the generators.
    fn moves(&self, ws: &Option<Vec<String>>) -> Result<Vec<GroupWord>, String> {
        match ws {
            Some(ws) => self.words(ws),
            None => Ok(symmetrize(&self.action.generator_words())),
        }
    }

    fn enumerate(&self, region: &Region) -> Result<BTreeSet<Point>, String> {
        enumerate_region(region, ENUMERATE_LIMIT)
            .ok_or_else(|| "this Ω cannot be listed; give the points explicitly".to_string())
    }
}

/// Runs every check in order. Deterministic given the scenario and options.
pub fn run_scenario(sc: &Scenario, opts: RunOptions) -> Report {
    let ctx = Ctx {
        action: sc.action(),
        space: sc.space(),
        sc,
        opts,
    };
    let outcomes = sc
        .checks
        .iter()
        .map(|spec| {
            let mut out = Outcome::new(&spec.id, spec.check.op());
            if let Err(e) = run_check(&ctx, &spec.check, &mut out) {
                out.fail(format!("error: {e}"));
            }
            if let Some(exp) = sc.expected.iter().find(|e| e.check == spec.id) {
                out.matched = Some(exp.matches(&out));
                out.expected = Some(exp.clone());
            }
            out
        })
        .collect();
    Report {
        scenario: sc.name.clone(),
        seed: opts.seed,
        budget: opts.budget,
        outcomes,
    }
}

fn run_check(ctx: &Ctx, check: &Check, out: &mut Outcome) -> Step {
    match check {
        Check::PaAxioms(p) => pa_axioms(ctx, p, out),
        Check::Orbit(p) => orbit(ctx, p, out),
        Check::Localfinite(p) => localfinite(ctx, p, out),
        Check::IntervalSequence(p) => interval_sequence(p, out),
        Check::Ray(p) => ray(ctx, p, out),
        Check::Equidecomp(p) => equidecomp(ctx, p, out),
        Check::Paradox(p) => paradox(ctx, p, out),
        Check::PopperLevels(p) => popper_levels(ctx, p, out),
        Check::Exchange(p) => exchange(ctx, p, out),
        Check::QualLevels(p) => qual_levels(ctx, p, out),
        Check::NetInvariance(p) => net_invariance(ctx, p, out),
        Check::FiniteOrder(p) => finite_order(ctx, p, out),
        Check::QualVerify(p) => qual_verify(p, out),
        Check::Compare(p) => compare(p, out),
        Check::Gamma(p) => gamma(p, out),
        Check::Skew(p) => skew(p, out),
        Check::GammaLaws(p) => gamma_laws(p, out),
        Check::HalfLines(p) => half_lines(p, out),
        Check::ConeExchange(p) => cone_exchange(ctx, p, out),
        Check::SkewInvariance(p) => skew_invariance(p, out),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pa_axioms(ctx: &Ctx, p: &PointsParams, out: &mut Outcome) -> Step {
    let sample = match &p.points {
        Some(ps) => points(ps),
        None => ctx.enumerate(&ctx.sc.region)?,
    };
    out.value("sample", sample.len());
    let rep = verify_partial_action_axioms(&ctx.action, &ctx.space, &sample);
    out.absorb("axioms", &rep);
    if !rep.passed() {
        out.status = Status::Fail;
    }
    Ok(())
}

fn path_json(path: &[invarprob_core::action::PathStep]) -> serde_json::Value {
    path.iter()
        .map(|s| json!([s.point.to_string(), s.parent, s.via]))
        .collect()
}

fn orbit(ctx: &Ctx, p: &OrbitParams, out: &mut Outcome) -> Step {
    let h = ctx.moves(&p.moves)?;
    let budget = p.budget.unwrap_or(ctx.opts.budget);
    let res = partial_orbit_closure(&ctx.action, &h, &p.point.0, &ctx.space, budget).map_err(core)?;
    let verified = res.verify(&ctx.action, &h, &ctx.space);
    out.value("verified", yes(verified));
    match &res {
        ClosureResult::Finite(pts) => {
            out.value("closure", "finite").value("size", pts.len());
            out.attach("closure", pts.iter().map(|x| x.to_string()).collect());
        }
        ClosureResult::BudgetExceeded { path } => {
            out.value("closure", "budget-exceeded").value("discovered", path.len());
            out.attach("path", path_json(path));
            out.notes.push("path entries are [point, parent index, move index]".into());
        }
    }
    if !verified {
        out.fail("closure witness failed re-verification");
    }
    Ok(())
}

/// Moves are always symmetrized, so closures are the components of the
/// move graph and each one is computed once.
fn localfinite(ctx: &Ctx, p: &LocalParams, out: &mut Outcome) -> Step {
    let sample = match &p.points {
        Some(ps) => points(ps),
        None => ctx.enumerate(&ctx.sc.region)?,
    };
    let h = symmetrize(&ctx.moves(&p.moves)?);
    let budget = p.budget.unwrap_or(ctx.opts.budget);
    let mut covered: BTreeSet<Point> = BTreeSet::new();
    let (mut closures, mut largest) = (0usize, 0usize);
    for x in &sample {
        if covered.contains(x) {
            continue;
        }
        match partial_orbit_closure(&ctx.action, &h, x, &ctx.space, budget).map_err(core)? {
            ClosureResult::Finite(c) => {
                if !ClosureResult::Finite(c.clone()).verify(&ctx.action, &h, &ctx.space) {
                    out.fail(format!("closure of {x} failed re-verification"));
                }
                closures += 1;
                largest = largest.max(c.len());
                covered.extend(c);
            }
            ClosureResult::BudgetExceeded { path } => {
                out.value("locally-finite", "unknown").value("exceeded-at", x);
                out.attach("path", path_json(&path[..path.len().min(50)]));
                out.status = Status::Undetermined;
                out.notes.push(format!("closure of {x} has more than {budget} points"));
                return Ok(());
            }
        }
    }
    out.value("locally-finite", "yes")
        .value("points", sample.len())
        .value("closures", closures)
        .value("largest", largest);
    Ok(())
}

/// The interval configuration: `g0 = +√2/4`, `g1 = −1/2` on `Ω = [0, 1]`.
pub fn interval_action() -> (Action, SpaceSpec) {
    let action = Action::new(vec![
        Generator::TranslateQuad(Quad::r()),
        Generator::TranslateRational(invarprob_core::ratio(-1, 2)),
    ]);
    (action, SpaceSpec::unit_interval())
}

fn interval_sequence(p: &IntervalParams, out: &mut Outcome) -> Step {
    let seq = thm2_interval_sequence(p.n);
    let distinct: BTreeSet<&Quad> = seq.iter().collect();
    let (action, space) = interval_action();
    let in_range = seq
        .iter()
        .all(|x| x.within(&invarprob_core::int(0), &invarprob_core::int(1)));
    let h = action.generator_words();
    let res = partial_orbit_closure(&action, &h, &Point::Quad(Quad::zero()), &space, p.n).map_err(core)?;
    let exceeded = !res.is_finite() && res.verify(&action, &h, &space);
    out.value("terms", seq.len())
        .value("distinct", distinct.len())
        .value("in-unit-interval", yes(in_range))
        .value("closure", if exceeded { "budget-exceeded" } else { "finite" });
    out.attach("prefix", seq.iter().take(12).map(|q| format!("{},{}", q.p, q.q)).collect());
    if distinct.len() != seq.len() || !in_range || !exceeded {
        out.fail("sequence is not an injective orbit witness in [0, 1]");
    }
    Ok(())
}

fn ray(ctx: &Ctx, p: &RayParams, out: &mut Outcome) -> Step {
    let moves = ctx.words(&p.moves)?;
    let prefix: Vec<Point> = match &p.source {
        RaySource::Interval => thm2_interval_sequence(p.length.saturating_sub(1))
            .into_iter()
            .map(Point::Quad)
            .collect(),
        RaySource::Iterate { start, step } => {
            let w = parse_word(step, ctx.sc.generators.len()).map_err(|e| e.to_string())?;
            let mut v = vec![start.0.clone()];
            while v.len() < p.length {
                let next = ctx
                    .action
                    .restricted(&w, v.last().unwrap(), &ctx.space)
                    .ok_or_else(|| format!("step leaves Ω after {} points", v.len()))?;
                v.push(next);
            }
            v
        }
    };
    let rd = ray_decomposition(&ctx.action, &prefix, &moves, &ctx.space).map_err(core)?;
    out.value("verified", yes(rd.verified))
        .value("truncated-at", rd.truncated_at)
        .value("pieces", rd.pieces.len());
    let pieces: Vec<serde_json::Value> = rd
        .pieces
        .iter()
        .map(|(w, pts)| {
            json!({
                "word": ctx.action.describe(w),
                "size": pts.len(),
                "points": pts.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    out.attach("pieces", pieces.into());
    if !rd.verified {
        out.fail("moved pieces do not partition the prefix minus its first point");
    }
    Ok(())
}

fn equidecomp(ctx: &Ctx, p: &EquiParams, out: &mut Outcome) -> Step {
    let (a, b) = (points(&p.a), points(&p.b));
    let s = ctx.words(&p.words)?;
    match equidecomposable(&ctx.action, &a, &b, &s, &ctx.space) {
        Some(w) => {
            let ok = verify_witness(&ctx.action, &a, &b, &w, &ctx.space);
            out.value("equidecomposable", "yes").value("pieces", w.pieces.len());
            let pieces: Vec<serde_json::Value> = w
                .pieces
                .iter()
                .map(|(pts, word)| {
                    json!({"word": ctx.action.describe(word), "points": pts.iter().map(|x| x.to_string()).collect::<Vec<_>>()})
                })
                .collect();
            out.attach("pieces", pieces.into());
            if !ok {
                out.fail("witness failed re-verification");
            }
        }
        None => {
            out.value("equidecomposable", "no");
        }
    }
    Ok(())
}

fn paradox(ctx: &Ctx, p: &ParadoxParams, out: &mut Outcome) -> Step {
    if p.witness != "coin-flips" {
        return Err(format!("unknown paradox witness `{}`", p.witness));
    }
    let (action, pw) = coin_flip_witness(p.depth);
    if action.generators != ctx.sc.generators {
        return Err("the coin-flip witness needs generators [shift:1, reverse:[1]]".into());
    }
    let v = paradox_witness_check(&action, &pw).map_err(core)?;
    out.value("holds", yes(v.holds)).value("assignments", v.assignments);
    if let Some(r) = &v.reason {
        out.value("reason", r);
    }
    out.attach(
        "witness",
        json!({
            "E": pw.e.to_string(),
            "A": pw.a.to_string(),
            "B": pw.b.to_string(),
            "A-pieces": pw.wa.pieces.iter().map(|(_, w)| action.describe(w)).collect::<Vec<_>>(),
            "B-pieces": pw.wb.pieces.iter().map(|(_, w)| action.describe(w)).collect::<Vec<_>>(),
            "depth": pw.depth,
        }),
    );
    Ok(())
}

/// A finite space, its powerset algebra, the level stack and its table.
pub struct Levels {
    pub space: FiniteSpace,
    pub algebra: FinAlgebra,
    pub stack: LevelStack,
    pub table: PopperTable,
}

fn levels(ctx: &Ctx, p: &LevelParams, out: &mut Outcome) -> Result<Levels, String> {
    let region = p.region.as_ref().map_or(&ctx.sc.region, |r| &r.0);
    let omega = ctx.enumerate(region)?;
    if let Some(x) = omega.iter().find(|x| !ctx.space.contains(x)) {
        return Err(format!("{x} is outside Ω"));
    }
    let moves = ctx.moves(&p.moves)?;
    let space = FiniteSpace::new(&ctx.action, &omega, &moves);
    let algebra = FinAlgebra::powerset(space.len()).map_err(core)?;
    let stack = match &p.target {
        None => build_level_stack(&space, &algebra),
        Some(t) => {
            let idx = t
                .iter()
                .map(|x| space.index_of(&x.0).ok_or_else(|| format!("target point {} is outside the region", x.0)))
                .collect::<Result<BTreeSet<usize>, String>>()?;
            build_level_stack_with(&space, &algebra, &idx)
        }
    }
    .map_err(core)?;
    let table = popper_from_levels(&stack, &algebra).map_err(core)?;
    out.value("points", space.len())
        .value("atoms", algebra.atom_count())
        .value("levels", stack.depth())
        .value("exhaustive", yes(algebra.atom_count() <= EXHAUSTIVE_TRIPLE_ATOMS));
    let lv: Vec<serde_json::Value> = stack
        .levels
        .iter()
        .map(|m| {
            let w: BTreeMap<String, String> = space
                .points
                .iter()
                .enumerate()
                .map(|(i, x)| (x.to_string(), m.eval(1 << algebra.atom_of(i)).to_string()))
                .collect();
            json!(w)
        })
        .collect();
    out.attach("levels", lv.into());
    Ok(Levels {
        space,
        algebra,
        stack,
        table,
    })
}

/// The level-stack table for a scenario, as the `popper-levels` check
/// builds it. Summary values go to `out`.
pub fn build_levels(sc: &Scenario, p: &LevelParams, out: &mut Outcome) -> Result<Levels, String> {
    let ctx = Ctx {
        action: sc.action(),
        space: sc.space(),
        sc,
        opts: RunOptions::default(),
    };
    levels(&ctx, p, out)
}

fn popper_levels(ctx: &Ctx, p: &LevelParams, out: &mut Outcome) -> Step {
    let lv = levels(ctx, p, out)?;
    let ax = verify_popper_axioms(&lv.table, ctx.opts.seed);
    let st = verify_strong_invariance_popper(&lv.table, &lv.space, &lv.algebra);
    out.absorb("c1-c2", &ax);
    out.absorb("strong", &st);
    if !(ax.passed() && st.passed()) {
        out.status = Status::Fail;
    }
    Ok(())
}

fn exchange(ctx: &Ctx, p: &LevelParams, out: &mut Outcome) -> Step {
    let lv = levels(ctx, p, out)?;
    let c = exchange_from_popper(&lv.table);
    let ax = verify_exchange_axioms(&c, ctx.opts.seed);
    out.absorb("e1-e3", &ax);
    let back = popper_from_exchange(&c, ctx.opts.seed).map_err(core)?;
    let round = back == lv.table;
    let sp = verify_strong_invariance_popper(&lv.table, &lv.space, &lv.algebra).passed();
    let sc = verify_strong_invariance_exchange(&c, &lv.space, &lv.algebra).passed();
    let infinite = (0..=c.full())
        .flat_map(|a| (1..=c.full()).map(move |b| (a, b)))
        .filter(|&(a, b)| matches!(c.get(a, b), RateEntry::Value(ExtRat::Infinite)))
        .count();
    out.value("round-trip", yes(round))
        .value("strong-popper", yes(sp))
        .value("strong-exchange", yes(sc))
        .value("infinite-rates", infinite);
    if !(ax.passed() && round && sp == sc) {
        out.status = Status::Fail;
    }
    Ok(())
}

fn qual_levels(ctx: &Ctx, p: &LevelParams, out: &mut Outcome) -> Step {
    let lv = levels(ctx, p, out)?;
    let o = qual_from_popper(&lv.table);
    let family = all_masks(&lv.algebra);
    let moves = AlgebraMoves {
        space: &lv.space,
        algebra: &lv.algebra,
    };
    let ax = verify_qual_axioms(&o, &family);
    let st = verify_strong_invariance_qual(&o, &moves, &family);
    let wk = verify_weak_invariance_qual(&o, &moves, &family);
    out.absorb("axioms", &ax);
    out.absorb("strong", &st);
    out.absorb("weak", &wk);
    if !(ax.passed() && st.passed() && wk.passed()) {
        out.status = Status::Fail;
    }
    Ok(())
}

fn net_invariance(ctx: &Ctx, p: &NetParams, out: &mut Outcome) -> Step {
    let budget = p.budget.unwrap_or(ctx.opts.budget);
    let schedule = p
        .stages
        .iter()
        .map(|s| Ok(NetIndex::new(ctx.words(&s.moves)?, points(&s.points))))
        .collect::<Result<Vec<_>, String>>()?;
    let sets: Vec<BTreeSet<Point>> = p.sets.iter().map(|s| points(s)).collect();
    let mut rep = CheckReport::new("stage measures");
    for (k, idx) in schedule.iter().enumerate() {
        let support = net_stage_support(&ctx.action, idx, &ctx.space, budget).map_err(core)?;
        let m = |u: &BTreeSet<Point>| net_stage_measure(&ctx.action, idx, u, &ctx.space, budget).map_err(core);
        let whole = m(&support)?;
        rep.check(whole == invarprob_core::int(1), "unit", || format!("stage {k}: P(B') = {whole}"));
        let none = m(&BTreeSet::new())?;
        rep.check(none == invarprob_core::int(0), "empty", || format!("stage {k}: P(∅) = {none}"));
        out.value(&format!("stage-{k}-support"), support.len());
        let mut shown = Vec::new();
        for (i, u) in sets.iter().enumerate() {
            let mu = m(u)?;
            shown.push(mu.to_string());
            for v in sets.iter().skip(i + 1).filter(|v| v.is_disjoint(u)) {
                let (mv, muv) = (m(v)?, m(&u.union(v).cloned().collect())?);
                rep.check(muv == &mu + &mv, "additive", || format!("stage {k}: P(U ∪ V) ≠ P(U) + P(V)"));
            }
            for w in symmetrize(&idx.h) {
                let image: BTreeSet<Point> = u
                    .intersection(&support)
                    .filter_map(|x| ctx.action.restricted(&w, x, &ctx.space))
                    .collect();
                let mg = m(&image)?;
                rep.check(mg == mu, "invariant", || {
                    format!("stage {k}: P({}·U) = {mg} but P(U) = {mu}", ctx.action.describe(&w))
                });
            }
        }
        out.value(&format!("stage-{k}-measures"), shown.join(" "));
    }
    if sets.len() >= 2 {
        let cmp = net_compare(&ctx.action, &sets[0], &sets[1], &schedule, &ctx.space, budget).map_err(core)?;
        out.value(
            "compare-first-two",
            match cmp.verdict {
                NetVerdict::Stabilized(o) => format!("stabilized {o:?}").to_lowercase(),
                NetVerdict::Unstable => "unstable".into(),
            },
        );
    }
    out.absorb("probability", &rep);
    if !rep.passed() {
        out.status = Status::Fail;
    }
    Ok(())
}

fn finite_order(ctx: &Ctx, p: &OrderParams, out: &mut Outcome) -> Step {
    match finite_order_certificate(&ctx.action, p.budget.unwrap_or(ctx.opts.budget)) {
        Ok(rep) => {
            out.value("certificate", "yes");
            out.notes.extend(rep.notes);
        }
        Err(CoreError::OrderNotFound { generator, budget }) => {
            out.value("certificate", "no");
            out.notes.push(format!("{generator} has no order up to {budget}"));
        }
        Err(e) => return Err(core(e)),
    }
    Ok(())
}

fn oracle(name: OracleName) -> Box<dyn QualOracle<ZSet>> {
    match name {
        OracleName::Cone => Box::new(ConeOracle),
        OracleName::Lexmax => Box::new(LexMax),
    }
}

fn qual_verify(p: &QualParams, out: &mut Outcome) -> Step {
    let o = oracle(p.oracle);
    let family = zsets(&p.family);
    let shifts = Translations(p.shifts.clone());
    let ax = verify_qual_axioms(&o, &family);
    let wk = verify_weak_invariance_qual(&o, &shifts, &family);
    let st = verify_strong_invariance_qual(&o, &shifts, &family);
    out.absorb("axioms", &ax);
    out.absorb("weak", &wk);
    out.absorb("strong", &st);
    if let Some([a, b]) = p.pair {
        let (sa, sb) = (ZSet::finite([a]), ZSet::finite([b]));
        let v = o.compare(&sa, &sb);
        out.value("pair", format!("{sa} {v} {sb}"));
        let rep = verify_strong_invariance_qual(&o, &Translations(vec![b - a]), &[sa]);
        out.value("pair-strong", if rep.passed() { "pass" } else { "fail" });
    }
    if !(ax.passed() && wk.passed()) {
        out.status = Status::Fail;
    }
    Ok(())
}

fn verdict_status(v: CompareVerdict) -> Status {
    if v == CompareVerdict::Undetermined {
        Status::Undetermined
    } else {
        Status::Pass
    }
}

fn compare(p: &PairParams, out: &mut Outcome) -> Step {
    let v = match p.oracle {
        OracleName::Cone => c0_compare(&p.a.0, &p.b.0),
        OracleName::Lexmax => lexmax_compare(&p.a.0, &p.b.0).map_err(core)?,
    };
    out.value("verdict", v);
    out.status = verdict_status(v);
    Ok(())
}

fn gamma_outcome(key: &str, g: &GammaValue, out: &mut Outcome) {
    match g {
        GammaValue::Value(v) => {
            out.value(key, v);
        }
        GammaValue::Undefined => {
            out.value(key, "undefined");
        }
        GammaValue::Undetermined { lower, upper } => {
            out.value(key, "undetermined").value("lower", lower).value("upper", upper);
            out.status = Status::Undetermined;
        }
    }
}

fn gamma(p: &PairParams, out: &mut Outcome) -> Step {
    gamma_outcome("gamma", &gamma_indicator(&p.a.0, &p.b.0), out);
    Ok(())
}

fn skew(p: &PairParams, out: &mut Outcome) -> Step {
    let g = skew_popper(&p.a.0, &p.b.0).map_err(core)?;
    gamma_outcome("p", &g, out);
    Ok(())
}

fn gamma_laws(p: &TriplesParams, out: &mut Outcome) -> Step {
    let mut all = CheckReport::new("gamma laws");
    let mut determined = 0;
    for [a, b, c] in &p.triples {
        let rep = gamma_law_check(&a.0, &b.0, &c.0);
        if rep.undetermined == 0 {
            determined += 1;
        }
        all.absorb(rep);
    }
    out.value("triples", p.triples.len()).value("determined", determined);
    out.absorb("laws", &all);
    if !all.passed() {
        out.status = Status::Fail;
    }
    Ok(())
}

fn half_lines(p: &HalfLineParams, out: &mut Outcome) -> Step {
    let (rep, branch) = prop1_skew_check(&ConeOracle, p.m[0]..=p.m[1], p.n[0]..=p.n[1]);
    out.value(
        "branch",
        match branch {
            Some(SkewBranch::LeftBelow) => "i",
            Some(SkewBranch::RightBelow) => "ii",
            None => "none",
        },
    );
    out.absorb("dichotomy", &rep);
    if !rep.passed() {
        out.status = Status::Fail;
    } else if rep.undetermined > 0 {
        out.status = Status::Undetermined;
    }
    Ok(())
}

fn cone_exchange(ctx: &Ctx, p: &FamilyParams, out: &mut Outcome) -> Step {
    let (atoms, c) = cone_exchange_rate(&zsets(&p.family)).map_err(core)?;
    let undetermined = (0..=c.full())
        .flat_map(|a| (1..=c.full()).map(move |b| (a, b)))
        .filter(|&(a, b)| *c.get(a, b) == RateEntry::Undetermined)
        .count();
    out.value("atoms", atoms.len()).value("undetermined-entries", undetermined);
    out.attach("atoms", atoms.iter().map(|z| z.to_string()).collect());
    let rep = verify_exchange_axioms(&c, ctx.opts.seed);
    out.absorb("e1-e3", &rep);
    if !rep.passed() {
        out.status = Status::Fail;
    }
    Ok(())
}

fn skew_invariance(p: &FamilyParams, out: &mut Outcome) -> Step {
    let rep = skew_weak_invariance(&zsets(&p.family), &p.shifts);
    out.absorb("weak", &rep);
    if !rep.passed() {
        out.status = Status::Fail;
    }
    Ok(())
}

/// Scenario files shipped with the crate.
pub const BUNDLED: &[(&str, &str)] = &[
    ("finite-space", include_str!("../scenarios/finite-space.json")),
    ("lottery-translations", include_str!("../scenarios/lottery-translations.json")),
    ("lottery-reflections", include_str!("../scenarios/lottery-reflections.json")),
    ("lottery-finitary", include_str!("../scenarios/lottery-finitary.json")),
    ("coin-shifts", include_str!("../scenarios/coin-shifts.json")),
    ("coin-shifts-reversals", include_str!("../scenarios/coin-shifts-reversals.json")),
    ("coin-reversals", include_str!("../scenarios/coin-reversals.json")),
    ("interval-translations", include_str!("../scenarios/interval-translations.json")),
    ("reals-translations", include_str!("../scenarios/reals-translations.json")),
    ("reals-translations-reflections", include_str!("../scenarios/reals-translations-reflections.json")),
    ("skew-cone", include_str!("../scenarios/skew-cone.json")),
];

pub fn bundled(name: &str) -> Option<Result<Scenario, ScenarioError>> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::from_json(text))
}
