//! Pass/fail records shared by the verification suites.

use serde::Serialize;

pub const REPORT_SCHEMA: &str = "qlattice.report/1";
const MAX_WITNESSES: usize = 5;

/// One named check: how many cases were examined, how many failed, and a few witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, anchor: &str) -> Check {
        Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            passed: true,
            cases: 0,
            failures: 0,
            witnesses: Vec::new(),
            note: None,
        }
    }

    /// Records one case; the witness is only rendered for failures.
    pub fn case<F: FnOnce() -> String>(&mut self, ok: bool, witness: F) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.passed = false;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    /// A single yes/no verdict with an explanatory witness either way.
    pub fn verdict(name: &str, anchor: &str, ok: bool, witness: String) -> Check {
        let mut c = Check::new(name, anchor);
        c.cases = 1;
        c.passed = ok;
        if !ok {
            c.failures = 1;
        }
        c.witnesses.push(witness);
        c
    }

    pub fn fail(&mut self, why: String) {
        self.passed = false;
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(why);
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }
}
