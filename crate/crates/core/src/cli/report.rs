use std::fmt::Write as _;

use serde::Serialize;

use crate::rational::{self, Bounds, Rational};

/// A computed value: exact, or an enclosure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Exact(String),
    Enclosure { lower: String, upper: String },
}

impl From<&Rational> for Value {
    fn from(r: &Rational) -> Self {
        Value::Exact(rational::format(r))
    }
}

impl From<&Bounds> for Value {
    fn from(b: &Bounds) -> Self {
        match b.exact_value() {
            Some(v) => v.into(),
            None => Value::Enclosure { lower: rational::format(&b.lower), upper: rational::format(&b.upper) },
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(v) => f.write_str(v),
            Value::Enclosure { lower, upper } => write!(f, "[{lower}, {upper}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Two independent computations must agree exactly.
    Equality,
    /// `left <= right`.
    Bound,
    /// A certificate or witness substituted back into its defining inequality.
    Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub kind: CheckKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<Value>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn equality(name: &str, left: impl Into<Value>, right: impl Into<Value>) -> Check {
        let (left, right) = (left.into(), right.into());
        let passed = left == right;
        Check::new(name, CheckKind::Equality, passed).sides(left, right)
    }

    pub fn bound(name: &str, left: &Rational, right: &Rational) -> Check {
        Check::new(name, CheckKind::Bound, left <= right).sides(left.into(), right.into())
    }

    pub fn certificate(name: &str, passed: bool, detail: Option<String>) -> Check {
        Check { detail, ..Check::new(name, CheckKind::Certificate, passed) }
    }

    fn new(name: &str, kind: CheckKind, passed: bool) -> Check {
        Check { suite: None, name: name.into(), subject: None, kind, left: None, right: None, passed, detail: None }
    }

    fn sides(mut self, left: Value, right: Value) -> Check {
        self.left = Some(left);
        self.right = Some(right);
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }

    pub fn about(mut self, suite: &str, subject: &str) -> Check {
        self.suite = Some(suite.into());
        self.subject = Some(subject.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub quantity: String,
    pub subject: String,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
    pub verification: Vec<Check>,
}

impl Entry {
    pub fn new(quantity: &str, subject: &str, value: impl Into<Value>) -> Entry {
        Entry {
            quantity: quantity.into(),
            subject: subject.into(),
            value: value.into(),
            certificate: None,
            verification: Vec::new(),
        }
    }

    pub fn certificate<T: Serialize>(mut self, cert: &T) -> Entry {
        self.certificate = Some(serde_json::to_value(cert).expect("certificates serialize"));
        self
    }

    pub fn check(mut self, c: Check) -> Entry {
        self.verification.push(c);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub results: Vec<Entry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    /// Machine-readable payload for commands that produce data (`gen`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<serde_json::Value>,
    pub passed: bool,
    /// Wall-clock time; the only field that varies between identical runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn new(command: Vec<String>) -> Report {
        Report { command, results: Vec::new(), checks: Vec::new(), output: None, passed: true, timing: None }
    }

    pub fn push(&mut self, e: Entry) {
        self.results.push(e);
    }

    /// Recomputes `passed` from every check.
    pub fn finish(&mut self) {
        self.passed = self.checks.iter().chain(self.results.iter().flat_map(|e| &e.verification)).all(|c| c.passed);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.results {
            let _ = writeln!(out, "{} {}: {}", e.quantity, e.subject, e.value);
            for c in &e.verification {
                let _ = writeln!(out, "  {}", line(c));
            }
            if let Some(cert) = &e.certificate {
                let _ = writeln!(out, "  certificate: {}", serde_json::to_string(cert).expect("json"));
            }
        }
        for c in &self.checks {
            let _ = writeln!(out, "{}", line(c));
        }
        if !self.checks.is_empty() {
            let failed = self.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        }
        out
    }
}

fn line(c: &Check) -> String {
    let mut s = format!("{:<4} ", if c.passed { "ok" } else { "FAIL" });
    if let Some(suite) = &c.suite {
        let _ = write!(s, "[{suite}] ");
    }
    s.push_str(&c.name);
    if let Some(subject) = &c.subject {
        let _ = write!(s, " ({subject})");
    }
    match (&c.left, &c.right, c.kind) {
        (Some(l), Some(r), CheckKind::Equality) => {
            let _ = write!(s, ": {l} {} {r}", if c.passed { "=" } else { "!=" });
        }
        (Some(l), Some(r), _) => {
            let _ = write!(s, ": {l} {} {r}", if c.passed { "<=" } else { ">" });
        }
        _ => {}
    }
    if let Some(d) = &c.detail {
        let _ = write!(s, " — {d}");
    }
    s
}
