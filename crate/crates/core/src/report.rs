use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExactMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<String>,
}

/// Named pass/fail results, ordered by name. Serializes as
/// `{name: {pass, witness?, details?}}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    checks: BTreeMap<String, CheckResult>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool) -> &mut Self {
        self.insert(name, CheckResult { pass, witness: None, details: None })
    }

    pub fn check_details(&mut self, name: impl Into<String>, pass: bool, details: impl Into<String>) -> &mut Self {
        self.insert(name, CheckResult { pass, witness: None, details: Some(details.into()) })
    }

    /// Records an equality check; on failure the difference is kept as witness.
    pub fn check_eq(&mut self, name: impl Into<String>, lhs: &ExactMatrix, rhs: &ExactMatrix) -> &mut Self {
        let pass = lhs == rhs;
        let witness = (!pass && lhs.dim() == rhs.dim()).then(|| lhs - rhs);
        self.insert(name, CheckResult { pass, witness, details: None })
    }

    pub fn insert(&mut self, name: impl Into<String>, result: CheckResult) -> &mut Self {
        self.checks.insert(name.into(), result);
        self
    }

    /// Adds every check of `other` under `prefix.name`.
    pub fn merge(&mut self, prefix: &str, other: Report) -> &mut Self {
        for (name, r) in other.checks {
            self.checks.insert(format!("{prefix}.{name}"), r);
        }
        self
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &CheckResult)> {
        self.checks.iter()
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// `Err(Violation)` naming the failed checks, if any.
    pub fn ensure(&self) -> Result<()> {
        if self.all_pass() {
            Ok(())
        } else {
            Err(Error::Violation(self.failures().join(", ")))
        }
    }

    pub fn into_result(self) -> Result<Self> {
        self.ensure()?;
        Ok(self)
    }
}
