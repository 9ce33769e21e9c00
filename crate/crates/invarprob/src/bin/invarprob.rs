use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use invarprob::literal::{parse_generator, parse_region};
use invarprob::report::{Outcome, Report};
use invarprob::scenario::{
    build_levels, bundled, run_scenario, Check, EquiParams, LevelParams, LocalParams, OracleName, OrbitParams,
    PairParams, QualParams, RunOptions, Scenario, BUNDLED, DEFAULT_BUDGET, P, R, Z,
};
use invarprob::table::run_table;

#[derive(Parser)]
#[command(name = "invarprob", version, about = "Invariant conditional, hyperreal and qualitative probabilities")]
struct Cli {
    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest closure explored before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Treat undetermined outcomes as failures.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closure of a point under moves that stay inside Ω.
    Orbit {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        point: String,
        /// Words such as `g0*g1^-1`; defaults to every generator and inverse.
        #[arg(long = "move")]
        moves: Vec<String>,
    },
    /// Whether every listed point has a finite closure.
    Localfinite {
        #[command(flatten)]
        space: SpaceArgs,
        /// Defaults to every point of a finite Ω.
        #[arg(long = "point")]
        points: Vec<String>,
        #[arg(long = "move")]
        moves: Vec<String>,
    },
    /// Search for pieces of A moved onto B by the given words.
    Equidecomp {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "a", required = true)]
        a: Vec<String>,
        #[arg(long = "b", required = true)]
        b: Vec<String>,
        #[arg(long = "word", required = true)]
        words: Vec<String>,
    },
    /// Conditional probability tables from level stacks.
    Popper {
        #[command(subcommand)]
        cmd: PopperCmd,
    },
    /// Qualitative probability oracles.
    Qual {
        #[command(subcommand)]
        cmd: QualCmd,
    },
    /// gamma(1_A, 1_B) for the skewed comparison on subsets of Z.
    Gamma(PairArgs),
    /// The skewed conditional probability P(A | B).
    Skew(PairArgs),
    /// Run a scenario file.
    Scenario {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
    /// Reproduce the existence table from the bundled scenarios.
    Table,
}

#[derive(Args)]
struct SpaceArgs {
    /// Generator literal, repeatable (`translate:1`, `reverse:[0]`, `cycle:[0,1,2]`, ...).
    #[arg(long = "generator", short = 'g')]
    generators: Vec<String>,
    /// Region literal for Ω (`all`, `ints:0..5`, `interval:0,1`, `bits:0..9`, `points:[..]`).
    #[arg(long, default_value = "all")]
    omega: String,
}

#[derive(Args)]
struct LevelArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// A finite part of Ω to build on; defaults to Ω.
    #[arg(long)]
    region: Option<String>,
    #[arg(long = "move")]
    moves: Vec<String>,
    /// Support of the first level, repeatable.
    #[arg(long = "target")]
    target: Vec<String>,
}

#[derive(Subcommand)]
enum PopperCmd {
    /// Print the level measures and the table.
    Build(LevelArgs),
    /// Check C1, C2, strong invariance and the exchange-rate round trip.
    Verify(LevelArgs),
}

#[derive(Subcommand)]
enum QualCmd {
    /// Axioms and translation invariance over a family of subsets of Z.
    Verify {
        #[arg(long, value_enum, default_value_t = OracleArg::Cone)]
        oracle: OracleArg,
        #[arg(long = "set", required = true)]
        family: Vec<String>,
        #[arg(long = "shift", allow_negative_numbers = true)]
        shifts: Vec<i64>,
        /// Compare {a} with {b} and test them for strong invariance.
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        pair: Option<Vec<i64>>,
    },
    /// Compare two subsets of Z.
    Compare {
        #[command(flatten)]
        pair: PairArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Cone,
    Lexmax,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long = "A")]
    a: String,
    #[arg(long = "B")]
    b: String,
    #[arg(long, value_enum, default_value_t = OracleArg::Cone)]
    oracle: OracleArg,
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Run a scenario file, or a bundled one by name.
    Run {
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path")]
        bundled: Option<String>,
    },
    /// List the bundled scenarios.
    List,
}

type Fallible<T> = Result<T, String>;

fn oracle(o: OracleArg) -> OracleName {
    match o {
        OracleArg::Cone => OracleName::Cone,
        OracleArg::Lexmax => OracleName::Lexmax,
    }
}

fn space(args: &SpaceArgs) -> Fallible<Scenario> {
    let mut sc = Scenario::empty("command line");
    sc.region = parse_region(&args.omega).map_err(|e| e.to_string())?;
    sc.generators = args
        .generators
        .iter()
        .map(|g| parse_generator(g))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(sc)
}

fn lit<T: serde::de::DeserializeOwned>(s: &str) -> Fallible<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn lits<T: serde::de::DeserializeOwned>(items: &[String]) -> Fallible<Vec<T>> {
    items.iter().map(|s| lit(s)).collect()
}

fn opt_moves(moves: &[String]) -> Option<Vec<String>> {
    (!moves.is_empty()).then(|| moves.to_vec())
}

fn pair(p: &PairArgs) -> Fallible<PairParams> {
    Ok(PairParams {
        a: lit::<Z>(&p.a)?,
        b: lit::<Z>(&p.b)?,
        oracle: oracle(p.oracle),
    })
}

fn level_params(l: &LevelArgs) -> Fallible<LevelParams> {
    Ok(LevelParams {
        region: l.region.as_deref().map(lit::<R>).transpose()?,
        moves: opt_moves(&l.moves),
        target: (!l.target.is_empty()).then(|| lits::<P>(&l.target)).transpose()?,
    })
}

fn single(mut sc: Scenario, id: &str, check: Check, opts: RunOptions) -> Fallible<Report> {
    sc.push(id, check).map_err(|e| e.to_string())?;
    Ok(run_scenario(&sc, opts))
}

enum Output {
    Report(Report),
    /// One value printed bare in text mode.
    Value(Report, &'static str),
    Text(String, serde_json::Value, bool),
}

fn popper_build(l: &LevelArgs) -> Fallible<Output> {
    let sc = space(&l.space)?;
    let mut out = Outcome::new("build", "popper-levels");
    let lv = build_levels(&sc, &level_params(l)?, &mut out)?;
    let full = lv.table.full();
    let mut text = String::new();
    let mut rows = serde_json::Map::new();
    for (i, x) in lv.space.points.iter().enumerate() {
        text.push_str(&format!("atom {i} = {x}\n"));
    }
    for (k, m) in lv.stack.levels.iter().enumerate() {
        let w: Vec<String> = (0..lv.algebra.atom_count()).map(|a| m.eval(1 << a).to_string()).collect();
        text.push_str(&format!("level {k}: {}\n", w.join(" ")));
    }
    for b in 1..=full {
        let vals: Vec<String> = (0..=full).map(|a| lv.table.get(a, b).to_string()).collect();
        text.push_str(&format!("P(· | {b:#b}) = {}\n", vals.join(" ")));
        rows.insert(format!("{b:#b}"), vals.into());
    }
    let json = serde_json::json!({
        "points": lv.space.points.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "summary": out.values,
        "levels": out.witness,
        "table": rows,
    });
    Ok(Output::Text(text, json, false))
}

fn run(cli: &Cli) -> Fallible<Output> {
    let opts = RunOptions {
        seed: cli.seed,
        budget: cli.budget,
    };
    Ok(match &cli.cmd {
        Cmd::Orbit { space: s, point, moves } => {
            let check = Check::Orbit(OrbitParams {
                point: lit(point)?,
                moves: opt_moves(moves),
                budget: None,
            });
            Output::Report(single(space(s)?, "orbit", check, opts)?)
        }
        Cmd::Localfinite { space: s, points, moves } => {
            let check = Check::Localfinite(LocalParams {
                points: (!points.is_empty()).then(|| lits(points)).transpose()?,
                moves: opt_moves(moves),
                budget: None,
            });
            Output::Report(single(space(s)?, "localfinite", check, opts)?)
        }
        Cmd::Equidecomp { space: s, a, b, words } => {
            let check = Check::Equidecomp(EquiParams {
                a: lits(a)?,
                b: lits(b)?,
                words: words.clone(),
            });
            Output::Report(single(space(s)?, "equidecomp", check, opts)?)
        }
        Cmd::Popper { cmd: PopperCmd::Build(l) } => popper_build(l)?,
        Cmd::Popper { cmd: PopperCmd::Verify(l) } => {
            let mut sc = space(&l.space)?;
            let p = level_params(l)?;
            for (id, c) in [
                ("popper", Check::PopperLevels(p.clone())),
                ("exchange", Check::Exchange(p.clone())),
                ("qualitative", Check::QualLevels(p)),
            ] {
                sc.push(id, c).map_err(|e| e.to_string())?;
            }
            Output::Report(run_scenario(&sc, opts))
        }
        Cmd::Qual {
            cmd: QualCmd::Verify { oracle: o, family, shifts, pair: pr },
        } => {
            let check = Check::QualVerify(QualParams {
                oracle: oracle(*o),
                family: lits(family)?,
                shifts: shifts.clone(),
                pair: pr.as_ref().map(|v| [v[0], v[1]]),
            });
            Output::Report(single(Scenario::empty("command line"), "qual", check, opts)?)
        }
        Cmd::Qual {
            cmd: QualCmd::Compare { pair: p },
        } => Output::Value(
            single(Scenario::empty("command line"), "compare", Check::Compare(pair(p)?), opts)?,
            "verdict",
        ),
        Cmd::Gamma(p) => Output::Value(
            single(Scenario::empty("command line"), "gamma", Check::Gamma(pair(p)?), opts)?,
            "gamma",
        ),
        Cmd::Skew(p) => Output::Value(
            single(Scenario::empty("command line"), "skew", Check::Skew(pair(p)?), opts)?,
            "p",
        ),
        Cmd::Scenario {
            cmd: ScenarioCmd::Run { path, bundled: name },
        } => {
            let sc = match (path, name) {
                (Some(p), _) => {
                    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                    Scenario::from_json(&text)
                }
                (None, Some(n)) => bundled(n).ok_or_else(|| format!("no bundled scenario `{n}`"))?,
                (None, None) => return Err("give a scenario file or --bundled <name>".into()),
            }
            .map_err(|e| e.to_string())?;
            Output::Report(run_scenario(&sc, opts))
        }
        Cmd::Scenario { cmd: ScenarioCmd::List } => {
            let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
            Output::Text(names.join("\n") + "\n", serde_json::json!(names), false)
        }
        Cmd::Table => {
            let t = run_table(opts);
            let failed = t.failed(cli.strict);
            Output::Text(t.to_text(), serde_json::to_value(&t).expect("reports serialize"), failed)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("invarprob: {e}");
            return ExitCode::from(2);
        }
    };
    let json = cli.format == Format::Json;
    let (text, failed) = match output {
        Output::Report(r) => (if json { r.to_json() } else { r.to_text() }, r.failed(cli.strict)),
        Output::Value(r, key) => {
            let failed = r.failed(cli.strict);
            let o = &r.outcomes[0];
            let text = if json {
                r.to_json()
            } else {
                match o.values.get(key) {
                    Some(v) if o.notes.is_empty() => format!("{v}\n"),
                    _ => r.to_text(),
                }
            };
            (text, failed)
        }
        Output::Text(t, j, failed) => (
            if json {
                serde_json::to_string_pretty(&j).expect("json renders")
            } else {
                t
            },
            failed,
        ),
    };
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("invarprob: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
