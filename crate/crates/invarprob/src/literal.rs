//! Text forms for sets, points, generators, words and regions.
//!
//! ```text
//! zset    := term (('|' | '~') term)*     union and difference, left to right
//! term    := base (' ' modifier)*
//! base    := finite:[..] | cofinite-ex:[..] | Lm:<n> | Rn:<n>
//!          | sparse:double-exp | sparse:squares
//! modifier:= add:[..] | remove:[..] | shift:<k>
//! point   := int:<n> | rat:<p/q> | quad:<p/q>,<q> | bits:[..] | <n>
//! region  := all | ints:<lo>..<hi> | interval:<lo>,<hi> | bits:<lo>..<hi> | points:[<point>;..]
//! word    := e | g<k>[^-1] ('*' g<k>[^-1])*
//! ```
//!
//! Generators use the same text as their `Display` form, plus
//! `cycle:[a,b,..]` for an integer cycle.

use std::collections::BTreeSet;

use invarprob_core::action::{Generator, GroupWord, PermutationTable, Point, Region};
use invarprob_core::zset::{Sparse, ZSet};
use invarprob_core::{Quad, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {what} `{input}`: {reason}")]
pub struct ParseError {
    pub what: &'static str,
    pub input: String,
    pub reason: String,
}

fn err(what: &'static str, input: &str, reason: impl Into<String>) -> ParseError {
    ParseError {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn bracketed<'a>(what: &'static str, s: &'a str) -> Result<&'a str, ParseError> {
    s.trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(what, s, "expected [..]"))
}

fn int_list(what: &'static str, s: &str) -> Result<Vec<i64>, ParseError> {
    let inner = bracketed(what, s)?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|e| err(what, s, e.to_string())))
        .collect()
}

fn int(what: &'static str, s: &str) -> Result<i64, ParseError> {
    s.trim().parse().map_err(|e: std::num::ParseIntError| err(what, s, e.to_string()))
}

pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| err("rational", s, e.to_string()))
}

pub fn parse_zset(s: &str) -> Result<ZSet, ParseError> {
    let mut out = ZSet::empty();
    let mut rest = s;
    let mut union = true;
    loop {
        let cut = rest.find(['|', '~']);
        let term = parse_term(&rest[..cut.unwrap_or(rest.len())])?;
        out = if union { out.union(&term) } else { out.difference(&term) };
        match cut {
            Some(i) => {
                union = rest.as_bytes()[i] == b'|';
                rest = &rest[i + 1..];
            }
            None => return Ok(out),
        }
    }
}

/// Whitespace-separated tokens, keeping `[..]` lists whole.
fn tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, None);
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            c if c.is_whitespace() && depth == 0 => {
                if let Some(b) = start.take() {
                    out.push(&s[b..i]);
                }
                continue;
            }
            _ => {}
        }
        start.get_or_insert(i);
    }
    out.extend(start.map(|b| &s[b..]));
    out
}

fn parse_term(s: &str) -> Result<ZSet, ParseError> {
    const W: &str = "zset";
    let mut parts = tokens(s).into_iter();
    let base = parts.next().ok_or_else(|| err(W, s, "empty"))?;
    let (kind, arg) = base.split_once(':').ok_or_else(|| err(W, s, "expected kind:argument"))?;
    let mut set = match kind {
        "finite" => ZSet::finite(int_list(W, arg)?),
        "cofinite-ex" => ZSet::cofinite(int_list(W, arg)?),
        "Lm" => ZSet::left(int(W, arg)?),
        "Rn" => ZSet::right(int(W, arg)?),
        "sparse" => match arg {
            "double-exp" => ZSet::sparse(Sparse::DoubleExp),
            "squares" => ZSet::sparse(Sparse::Squares),
            _ => return Err(err(W, s, format!("unknown sparse set `{arg}`"))),
        },
        _ => return Err(err(W, s, format!("unknown kind `{kind}`"))),
    };
    for m in parts {
        set = match m.split_once(':') {
            Some(("add", l)) => set.with_added(int_list(W, l)?),
            Some(("remove", l)) => set.with_removed(int_list(W, l)?),
            Some(("shift", k)) => set.translate(int(W, k)?),
            _ => return Err(err(W, s, format!("unknown modifier `{m}`"))),
        };
    }
    Ok(set)
}

pub fn parse_point(s: &str) -> Result<Point, ParseError> {
    const W: &str = "point";
    let t = s.trim();
    let Some((kind, arg)) = t.split_once(':') else {
        return Ok(Point::Int(int(W, t)?));
    };
    Ok(match kind {
        "int" => Point::Int(int(W, arg)?),
        "rat" => Point::rational(parse_rational(arg)?),
        "quad" => {
            let (p, q) = arg.split_once(',').ok_or_else(|| err(W, s, "expected quad:p,q"))?;
            Point::quad(parse_rational(p)?, int(W, q)?)
        }
        "bits" => Point::bits(int_list(W, arg)?),
        _ => return Err(err(W, s, format!("unknown kind `{kind}`"))),
    })
}

pub fn parse_points<S: AsRef<str>>(items: &[S]) -> Result<BTreeSet<Point>, ParseError> {
    items.iter().map(|p| parse_point(p.as_ref())).collect()
}

fn parse_quad(what: &'static str, s: &str) -> Result<Quad, ParseError> {
    let (p, q) = s.split_once(',').ok_or_else(|| err(what, s, "expected p,q"))?;
    Ok(Quad::new(parse_rational(p)?, int(what, q)?))
}

pub fn parse_generator(s: &str) -> Result<Generator, ParseError> {
    const W: &str = "generator";
    let t = s.trim();
    let (kind, arg) = t.split_once(':').ok_or_else(|| err(W, s, "expected kind:argument"))?;
    Ok(match kind {
        "translate" => Generator::TranslateRational(parse_rational(arg)?),
        "translate-quad" => Generator::TranslateQuad(parse_quad(W, arg)?),
        "reflect" => Generator::Reflect(parse_rational(arg)?),
        "shift" => Generator::Shift(int(W, arg)?),
        "reverse" => Generator::ReverseMask(int_list(W, arg)?.into_iter().collect()),
        "cycle" => {
            let pts = int_list(W, arg)?.into_iter().map(Point::Int).collect();
            Generator::PermutationTable(PermutationTable::cycle(pts).map_err(|e| err(W, s, e.to_string()))?)
        }
        "perm" => {
            let mut pairs = Vec::new();
            for pair in arg.split(';').filter(|p| !p.trim().is_empty()) {
                let (a, b) = pair.split_once("=>").ok_or_else(|| err(W, s, "expected a=>b"))?;
                pairs.push((parse_point(a)?, parse_point(b)?));
            }
            Generator::PermutationTable(PermutationTable::new(pairs).map_err(|e| err(W, s, e.to_string()))?)
        }
        _ => return Err(err(W, s, format!("unknown kind `{kind}`"))),
    })
}

/// Words are checked against the number of generators.
pub fn parse_word(s: &str, generators: usize) -> Result<GroupWord, ParseError> {
    const W: &str = "word";
    let t = s.trim();
    if t == "e" {
        return Ok(GroupWord::identity());
    }
    let mut letters = Vec::new();
    for l in t.split('*') {
        let l = l.trim();
        let (body, inverse) = match l.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (l, false),
        };
        let k: usize = body
            .strip_prefix('g')
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| err(W, s, format!("bad letter `{l}`")))?;
        if k >= generators {
            return Err(err(W, s, format!("g{k} but only {generators} generators")));
        }
        letters.push((k, inverse));
    }
    Ok(GroupWord::from_letters(letters))
}

pub fn parse_region(s: &str) -> Result<Region, ParseError> {
    const W: &str = "region";
    let t = s.trim();
    if t == "all" {
        return Ok(Region::All);
    }
    let (kind, arg) = t.split_once(':').ok_or_else(|| err(W, s, "expected kind:argument"))?;
    let range = |arg: &str| -> Result<(Option<i64>, Option<i64>), ParseError> {
        let (lo, hi) = arg.split_once("..").ok_or_else(|| err(W, s, "expected lo..hi"))?;
        let bound = |b: &str| if b.trim().is_empty() { Ok(None) } else { int(W, b).map(Some) };
        Ok((bound(lo)?, bound(hi)?))
    };
    Ok(match kind {
        "ints" => {
            let (lo, hi) = range(arg)?;
            Region::IntRange { lo, hi }
        }
        "interval" => {
            let (lo, hi) = arg.split_once(',').ok_or_else(|| err(W, s, "expected lo,hi"))?;
            Region::Interval {
                lo: parse_rational(lo)?,
                hi: parse_rational(hi)?,
            }
        }
        "bits" => match range(arg)? {
            (Some(lo), Some(hi)) => Region::BitsWithin { lo, hi },
            _ => return Err(err(W, s, "bit windows need both ends")),
        },
        "points" => {
            let inner = bracketed(W, arg)?;
            let items: Vec<&str> = inner.split(';').filter(|p| !p.trim().is_empty()).collect();
            Region::Finite(parse_points(&items)?)
        }
        _ => return Err(err(W, s, format!("unknown kind `{kind}`"))),
    })
}

/// The points of a region, when it is finite and small enough to list.
pub fn enumerate_region(region: &Region, limit: usize) -> Option<BTreeSet<Point>> {
    match region {
        Region::Finite(s) => Some(s.clone()),
        Region::IntRange {
            lo: Some(lo),
            hi: Some(hi),
        } => {
            let n = usize::try_from(hi - lo + 1).unwrap_or(0);
            (n <= limit).then(|| (*lo..=*hi).map(Point::Int).collect())
        }
        Region::BitsWithin { lo, hi } => {
            let width = u32::try_from(hi - lo + 1).ok()?;
            if width >= 63 || 1usize << width > limit {
                return None;
            }
            Some(
                (0u64..1 << width)
                    .map(|m| Point::bits((0..width).filter(|i| m >> i & 1 == 1).map(|i| lo + i as i64)))
                    .collect(),
            )
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zset_literals() {
        assert_eq!(parse_zset("finite:[5]").unwrap(), ZSet::finite([5]));
        assert_eq!(parse_zset("finite:[]").unwrap(), ZSet::empty());
        assert_eq!(parse_zset("cofinite-ex:[0, 1]").unwrap(), ZSet::cofinite([0, 1]));
        assert_eq!(parse_zset("Lm:0").unwrap(), ZSet::negatives());
        assert_eq!(parse_zset("Rn:-3 remove:[-3] add:[-10]").unwrap(), ZSet::right(-2).with_added([-10]));
        assert_eq!(
            parse_zset("Lm:0 | sparse:double-exp").unwrap(),
            ZSet::negatives().union(&ZSet::sparse(Sparse::DoubleExp))
        );
        assert_eq!(
            parse_zset("sparse:squares ~ sparse:double-exp | finite:[2]").unwrap(),
            ZSet::sparse(Sparse::Squares)
                .difference(&ZSet::sparse(Sparse::DoubleExp))
                .union(&ZSet::finite([2]))
        );
        assert_eq!(parse_zset("Rn:0 shift:-2").unwrap(), ZSet::right(-2));
        assert_eq!(parse_zset(" Lm:0  add:[ 3, 4 ] ").unwrap(), ZSet::left(0).with_added([3, 4]));
        assert!(parse_zset("sparse:primes").is_err());
        assert!(parse_zset("finite:5").is_err());
    }

    #[test]
    fn round_trip_displays() {
        for g in ["translate:1/2", "reflect:0", "shift:1", "reverse:[1,3]", "translate-quad:0,1"] {
            assert_eq!(parse_generator(g).unwrap().to_string(), g);
        }
        for p in ["int:5", "quad:1/2,-1", "bits:[0,4]"] {
            assert_eq!(parse_point(p).unwrap().to_string(), p);
        }
        assert_eq!(parse_point("7").unwrap(), Point::Int(7));
        let w = parse_word("g0*g1^-1", 2).unwrap();
        assert_eq!(w.to_string(), "g0*g1^-1");
        assert!(parse_word("g2", 2).is_err());
    }

    #[test]
    fn regions() {
        assert_eq!(parse_region("ints:0..").unwrap(), Region::IntRange { lo: Some(0), hi: None });
        let r = parse_region("bits:0..2").unwrap();
        assert_eq!(enumerate_region(&r, 100).unwrap().len(), 8);
        let r = parse_region("points:[int:1;int:4]").unwrap();
        assert_eq!(enumerate_region(&r, 100).unwrap().len(), 2);
        assert_eq!(enumerate_region(&parse_region("ints:-2..2").unwrap(), 100).unwrap().len(), 5);
        assert!(enumerate_region(&Region::All, 100).is_none());
    }
}
