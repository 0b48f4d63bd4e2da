use std::fmt::{self, Write as _};
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: &str = "weil-report/1";
const MAX_FAILURES: usize = 20;

/// How much of a finite domain a suite covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
    Generators,
    Factored,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Exhaustive => write!(f, "exhaustive"),
            Scope::Sampled { count, seed } => write!(f, "sampled(n={count},seed={seed})"),
            Scope::Generators => write!(f, "generators"),
            Scope::Factored => write!(f, "factored"),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub scope: String,
    pub checked: u64,
    pub passed: bool,
    pub failures: Vec<String>,
    pub millis: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Accumulates checks for one suite.
#[derive(Debug)]
pub struct Tally {
    name: String,
    scope: Scope,
    checked: u64,
    failed: u64,
    failures: Vec<String>,
    notes: Vec<String>,
    started: Instant,
}

impl Tally {
    pub fn new(name: &str, scope: Scope) -> Self {
        Self {
            name: name.to_string(),
            scope,
            checked: 0,
            failed: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn set_scope(&mut self, scope: Scope) {
        self.scope = scope;
    }

    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) -> bool {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(describe());
            }
        }
        ok
    }

    /// Records an error from the engine as a failed check.
    pub fn check_result<T>(&mut self, r: weil_core::Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{}: {e}", what()));
                None
            }
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn failed(&self) -> u64 {
        self.failed
    }

    pub fn finish(self) -> SuiteResult {
        let mut failures = self.failures;
        if self.failed as usize > failures.len() {
            failures.push(format!("... {} more", self.failed as usize - failures.len()));
        }
        SuiteResult {
            name: self.name,
            scope: self.scope.to_string(),
            checked: self.checked,
            passed: self.failed == 0 && self.checked > 0,
            failures,
            millis: self.started.elapsed().as_millis() as u64,
            notes: self.notes,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckCount {
    pub checked: u64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VariantRecord {
    pub variant: String,
    pub identity: CheckCount,
    pub ansatz: CheckCount,
    pub multiplicativity: CheckCount,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NormalizationReport {
    pub selected: String,
    pub scope: String,
    pub passing: Vec<String>,
    pub variants: Vec<VariantRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub config: RunConfig,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationReport>,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn new(config: RunConfig, mut suites: Vec<SuiteResult>, normalization: Option<NormalizationReport>) -> Self {
        suites.sort_by(|a, b| a.name.cmp(&b.name));
        if config.no_timing {
            for s in &mut suites {
                s.millis = 0;
            }
        }
        let passed = suites.iter().all(|s| s.passed)
            && normalization.as_ref().is_none_or(|n| n.passing.contains(&n.selected));
        Self { schema: SCHEMA, config, passed, normalization, suites }
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,scope,checked,passed,millis,failures\n");
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.name,
                csv_field(&s.scope),
                s.checked,
                s.passed,
                s.millis,
                csv_field(&s.failures.join("; "))
            );
        }
        out
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
