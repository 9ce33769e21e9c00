//! Check reports shared by all verifiers.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One failed instance of a rule, with enough context to re-check it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub witness: String,
}

/// Outcome of a verification sweep.
///
/// `undetermined` counts instances the checked object could not decide.
/// They are neither passes nor failures. `skipped` counts instances outside
/// the rule's scope (an undefined product, an image leaving `Ω`, ...).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub undetermined: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violate(&mut self, rule: impl Into<String>, witness: impl Into<String>) {
        self.violations.push(Violation {
            rule: rule.into(),
            witness: witness.into(),
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Records one checked instance; `ok == false` files a violation.
    pub fn check(&mut self, ok: bool, rule: &str, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violate(rule, witness());
        }
    }

    pub fn absorb(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.undetermined += other.undetermined;
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }

    pub fn violations_of<'a>(&'a self, rule: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.rule == rule)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} checked, {} skipped, {} undetermined, {} violations)",
            self.name,
            if self.passed() { "pass" } else { "FAIL" },
            self.checked,
            self.skipped,
            self.undetermined,
            self.violations.len()
        )
    }
}
