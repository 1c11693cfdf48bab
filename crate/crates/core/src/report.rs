//! Ordered check results shared by every verifier.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub subject: String,
    pub pass: bool,
    pub witness: Option<String>,
    #[serde(rename = "cutoff-degree")]
    pub cutoff_degree: Option<usize>,
}

impl Check {
    pub fn new(check: impl Into<String>, subject: impl Into<String>, witness: Option<String>) -> Self {
        Check { check: check.into(), subject: subject.into(), pass: witness.is_none(), witness, cutoff_degree: None }
    }

    pub fn pass(check: impl Into<String>, subject: impl Into<String>) -> Self {
        Self::new(check, subject, None)
    }

    pub fn fail(check: impl Into<String>, subject: impl Into<String>, witness: impl Into<String>) -> Self {
        Self::new(check, subject, Some(witness.into()))
    }

    /// Passing check that still records an informative value.
    pub fn info(check: impl Into<String>, subject: impl Into<String>, value: impl Into<String>) -> Self {
        Check { check: check.into(), subject: subject.into(), pass: true, witness: Some(value.into()), cutoff_degree: None }
    }

    pub fn with_cutoff(mut self, degree: usize) -> Self {
        self.cutoff_degree = Some(degree);
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} {}", if self.pass { "PASS" } else { "FAIL" }, self.check, self.subject)?;
        if let Some(d) = self.cutoff_degree {
            write!(f, " (degree <= {d})")?;
        }
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
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
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromIterator<Check> for Report {
    fn from_iter<I: IntoIterator<Item = Check>>(iter: I) -> Self {
        Report { checks: iter.into_iter().collect() }
    }
}

/// Evaluates `f` on every item in parallel and returns the first witness in item order.
pub fn first_witness<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> crate::Result<Option<String>> + Sync + Send,
) -> crate::Result<Option<String>> {
    use rayon::prelude::*;
    let results: Vec<crate::Result<Option<String>>> = items.par_iter().map(f).collect();
    for r in results {
        if let Some(w) = r? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}
