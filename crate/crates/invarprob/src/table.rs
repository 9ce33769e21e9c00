//! The existence table: which invariant non-classical probabilities exist
//! for each space and symmetry group.
//!
//! A cell is `machine-checked` when bundled checks produce its evidence, or
//! `cited` when the verdict rests on facts this crate cannot compute
//! (supramenability, free subgroups, Banach-Tarski). Cited cells are never
//! counted as computed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::report::{Report, Status};
use crate::scenario::{bundled, run_scenario, RunOptions};

const TABLE: &str = include_str!("../scenarios/table.json");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    columns: Vec<String>,
    rows: Vec<RowSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RowSpec {
    case: String,
    symmetries: String,
    #[serde(default)]
    scenario: Option<String>,
    cells: Vec<CellSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CellSpec {
    verdict: String,
    #[serde(default)]
    evidence: Vec<String>,
    #[serde(default)]
    cited: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    MachineChecked,
    Cited,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub check: String,
    pub status: Option<Status>,
    pub matched: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub column: String,
    pub expected: String,
    pub tag: Tag,
    /// For checked cells: the expected verdict when all evidence came out as
    /// expected, otherwise `unconfirmed`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cite: Option<String>,
}

impl Cell {
    pub fn confirmed(&self) -> bool {
        self.tag == Tag::Cited || self.computed.as_deref() == Some(self.expected.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub case: String,
    pub symmetries: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub seed: u64,
    pub budget: usize,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub scenarios: Vec<Report>,
}

impl TableReport {
    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.rows.iter().flat_map(|r| &r.cells)
    }

    pub fn failed(&self, strict: bool) -> bool {
        self.cells().any(|c| !c.confirmed()) || self.scenarios.iter().any(|s| s.failed(strict))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "existence of invariant non-classical probabilities  (seed {}, budget {})", self.seed, self.budget);
        let _ = writeln!(s);
        let mut widths = [4usize, 10, 0, 0, 0];
        for r in &self.rows {
            widths[0] = widths[0].max(r.case.chars().count());
            widths[1] = widths[1].max(r.symmetries.chars().count());
        }
        let _ = write!(s, "{:<w0$}  {:<w1$}", "case", "symmetries", w0 = widths[0], w1 = widths[1]);
        for c in &self.columns {
            let _ = write!(s, "  {c:<24}");
        }
        let _ = writeln!(s);
        for r in &self.rows {
            let _ = write!(s, "{:<w0$}  {:<w1$}", r.case, r.symmetries, w0 = widths[0], w1 = widths[1]);
            for c in &r.cells {
                let tag = match c.tag {
                    Tag::MachineChecked if c.confirmed() => "machine-checked",
                    Tag::MachineChecked => "UNCONFIRMED",
                    Tag::Cited => "cited",
                };
                let _ = write!(s, "  {:<24}", format!("{} [{tag}]", c.expected));
            }
            let _ = writeln!(s);
        }
        let checked = self.cells().filter(|c| c.tag == Tag::MachineChecked).count();
        let confirmed = self.cells().filter(|c| c.tag == Tag::MachineChecked && c.confirmed()).count();
        let cited = self.cells().filter(|c| c.tag == Tag::Cited).count();
        let _ = writeln!(s);
        let _ = writeln!(s, "{checked} machine-checked cells ({confirmed} confirmed), {cited} cited cells");
        let _ = writeln!(s);
        let _ = writeln!(s, "evidence:");
        for r in &self.rows {
            let mut line = format!("  {} / {}:", r.case, r.symmetries);
            let mut seen = BTreeMap::new();
            for c in &r.cells {
                for e in &c.evidence {
                    seen.entry(e.check.clone()).or_insert((e.status, e.matched));
                }
                if let Some(cite) = &c.cite {
                    let _ = write!(line, " [{}: cited, {cite}]", c.column);
                }
            }
            for (check, (status, matched)) in seen {
                let st = status.map_or("missing", Status::as_str);
                let m = if matched == Some(true) { "as expected" } else { "NOT as expected" };
                let _ = write!(line, " {check}={st} ({m})");
            }
            let _ = writeln!(s, "{line}");
        }
        for rep in &self.scenarios {
            let _ = writeln!(s);
            s.push_str(&rep.to_text());
        }
        s
    }
}

/// Runs every bundled scenario a row refers to and fills in the cells.
pub fn run_table(opts: RunOptions) -> TableReport {
    let file: TableFile = serde_json::from_str(TABLE).expect("bundled table parses");
    let mut reports: BTreeMap<String, Report> = BTreeMap::new();
    let mut order = Vec::new();
    let mut rows = Vec::new();
    for spec in file.rows {
        let report = spec.scenario.as_ref().map(|name| {
            reports
                .entry(name.clone())
                .or_insert_with(|| {
                    order.push(name.clone());
                    let sc = bundled(name)
                        .unwrap_or_else(|| panic!("table refers to unknown scenario {name}"))
                        .expect("bundled scenario parses");
                    run_scenario(&sc, opts)
                })
                .clone()
        });
        let cells = spec
            .cells
            .into_iter()
            .zip(&file.columns)
            .map(|(c, column)| {
                assert!(
                    c.cited.is_some() != !c.evidence.is_empty(),
                    "a cell is either cited or backed by evidence"
                );
                if let Some(cite) = c.cited {
                    return Cell {
                        column: column.clone(),
                        expected: c.verdict,
                        tag: Tag::Cited,
                        computed: None,
                        evidence: Vec::new(),
                        cite: Some(cite),
                    };
                }
                let rep = report.as_ref().expect("checked cells need a scenario");
                let evidence: Vec<Evidence> = c
                    .evidence
                    .iter()
                    .map(|id| {
                        let o = rep.outcome(id);
                        Evidence {
                            check: id.clone(),
                            status: o.map(|o| o.status),
                            matched: o.and_then(|o| o.matched),
                        }
                    })
                    .collect();
                let ok = evidence
                    .iter()
                    .all(|e| e.matched == Some(true) && e.status != Some(Status::Fail));
                Cell {
                    column: column.clone(),
                    computed: Some(if ok { c.verdict.clone() } else { "unconfirmed".into() }),
                    expected: c.verdict,
                    tag: Tag::MachineChecked,
                    evidence,
                    cite: None,
                }
            })
            .collect();
        rows.push(Row {
            case: spec.case,
            symmetries: spec.symmetries,
            scenario: spec.scenario,
            cells,
        });
    }
    TableReport {
        seed: opts.seed,
        budget: opts.budget,
        columns: file.columns,
        rows,
        scenarios: order.into_iter().map(|n| reports.remove(&n).unwrap()).collect(),
    }
}
