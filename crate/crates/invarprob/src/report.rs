//! Check outcomes and their text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use invarprob_core::CheckReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undetermined => "undetermined",
        }
    }
}

/// What a scenario expects of one check. Every listed value must match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cite: Option<String>,
}

impl Expectation {
    pub fn matches(&self, o: &Outcome) -> bool {
        self.status.is_none_or(|s| s == o.status)
            && self.values.iter().all(|(k, v)| o.values.get(k) == Some(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: String,
    pub op: String,
    pub status: Status,
    /// Exact results, rationals as `p/q` and infinity as `inf`.
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expectation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched: Option<bool>,
}

impl Outcome {
    pub fn new(id: impl Into<String>, op: impl Into<String>) -> Self {
        Outcome {
            id: id.into(),
            op: op.into(),
            status: Status::Pass,
            values: BTreeMap::new(),
            witness: None,
            notes: Vec::new(),
            expected: None,
            matched: None,
        }
    }

    pub fn value(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.values.insert(key.to_string(), v.to_string());
        self
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.status = Status::Fail;
        self.notes.push(note.into());
    }

    /// Folds a verifier sweep in under `key`: counts go to values, the first
    /// violations to the witness, and a violation fails the outcome.
    pub fn absorb(&mut self, key: &str, rep: &CheckReport) {
        self.value(key, if rep.passed() { "pass" } else { "fail" });
        self.value(&format!("{key}-checked"), rep.checked);
        if rep.skipped > 0 {
            self.value(&format!("{key}-skipped"), rep.skipped);
        }
        if rep.undetermined > 0 {
            self.value(&format!("{key}-undetermined"), rep.undetermined);
        }
        if !rep.passed() {
            self.value(&format!("{key}-violations"), rep.violations.len());
            let first: Vec<serde_json::Value> = rep
                .violations
                .iter()
                .take(5)
                .map(|v| serde_json::json!({"rule": v.rule, "witness": v.witness}))
                .collect();
            self.attach(key, serde_json::Value::Array(first));
        }
        self.notes.extend(rep.notes.iter().map(|n| format!("{key}: {n}")));
    }

    /// Adds `key: value` to the witness object.
    pub fn attach(&mut self, key: &str, value: serde_json::Value) {
        let w = self.witness.get_or_insert_with(|| serde_json::json!({}));
        if let Some(obj) = w.as_object_mut() {
            obj.insert(key.to_string(), value);
        }
    }

    /// Failed outright, or missed its expectation.
    pub fn is_failure(&self, strict: bool) -> bool {
        self.status == Status::Fail
            || self.matched == Some(false)
            || (strict && self.status == Status::Undetermined)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub budget: usize,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn failed(&self, strict: bool) -> bool {
        self.outcomes.iter().any(|o| o.is_failure(strict))
    }

    pub fn outcome(&self, id: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {}  (seed {}, budget {})", self.scenario, self.seed, self.budget);
        for o in &self.outcomes {
            write_outcome(&mut s, o, "  ");
        }
        let failed = self.outcomes.iter().filter(|o| o.is_failure(false)).count();
        let _ = writeln!(s, "  {} checks, {} failed", self.outcomes.len(), failed);
        s
    }
}

pub(crate) fn write_outcome(s: &mut String, o: &Outcome, indent: &str) {
    let mark = match o.matched {
        Some(true) => "  [as expected]",
        Some(false) => "  [UNEXPECTED]",
        None => "",
    };
    let _ = writeln!(s, "{indent}{:<13} {} ({}){mark}", o.status.as_str(), o.id, o.op);
    for (k, v) in &o.values {
        let _ = writeln!(s, "{indent}    {k} = {v}");
    }
    if let Some(e) = &o.expected {
        if let Some(c) = &e.cite {
            let _ = writeln!(s, "{indent}    cite: {c}");
        }
        if o.matched == Some(false) {
            let want: Vec<String> = e
                .status
                .iter()
                .map(|st| format!("status={}", st.as_str()))
                .chain(e.values.iter().map(|(k, v)| format!("{k}={v}")))
                .collect();
            let _ = writeln!(s, "{indent}    expected: {}", want.join(", "));
        }
    }
    for n in o.notes.iter().take(8) {
        let _ = writeln!(s, "{indent}    note: {n}");
    }
    if o.notes.len() > 8 {
        let _ = writeln!(s, "{indent}    note: ... {} more", o.notes.len() - 8);
    }
}
