//! Pass/fail bookkeeping shared by the verification suites.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// An ordered list of named checks. Failures are recorded, never raised.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.push(name, passed, String::new());
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    /// Appends another report's checks, prefixing their names.
    pub fn absorb(&mut self, other: Report) {
        for c in other.checks {
            self.checks.push(Check { name: format!("{}: {}", other.title, c.name), ..c });
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.failures().next()
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "  [{mark}] {}", c.name)?;
            } else {
                writeln!(f, "  [{mark}] {} ({})", c.name, c.detail)?;
            }
        }
        let bad = self.failures().count();
        write!(f, "  {} checks, {} failed", self.len(), bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorb_prefixes_names() {
        let mut inner = Report::new("inner");
        inner.check("a", true);
        inner.push("b", false, "why");
        let mut outer = Report::new("outer");
        outer.absorb(inner);
        assert_eq!(outer.len(), 2);
        assert_eq!(outer.first_failure().unwrap().name, "inner: b");
        assert!(!outer.passed());
    }
}
