use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Thm1,
    Thm2,
    Thm3,
    /// Principal ultraproducts collapse onto the selected factor.
    Collapse,
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TheoremId::Thm1 => "thm1",
            TheoremId::Thm2 => "thm2",
            TheoremId::Thm3 => "thm3",
            TheoremId::Collapse => "collapse",
        })
    }
}

/// Concrete counterexample attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Elements {
        left: usize,
        right: usize,
        detail: String,
    },
    Families {
        left: Vec<String>,
        right: Vec<String>,
        detail: String,
    },
    Detail {
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Number of cases examined.
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub factors: Vec<String>,
    pub index_set_size: usize,
    pub ultrafilter: String,
    /// Families examined, out of `family_space`.
    pub families: usize,
    pub family_space: usize,
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub instance: Instance,
    pub checks: Vec<Check>,
    /// Informational values; nothing here affects `passed`.
    #[serde(default)]
    pub info: BTreeMap<String, serde_json::Value>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(theorem: TheoremId, instance: Instance, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        VerificationReport {
            theorem,
            instance,
            checks,
            info: BTreeMap::new(),
            passed,
        }
    }

    pub fn with_info(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.info.insert(key.to_string(), value.into());
        self
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Accumulates one named check over many cases, keeping the first witness.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    name: &'static str,
    cases: usize,
    witness: Option<Witness>,
    failed: bool,
}

impl Tally {
    pub(crate) fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            witness: None,
            failed: false,
        }
    }

    pub(crate) fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.cases += 1;
        if !ok && !self.failed {
            self.failed = true;
            self.witness = Some(witness());
        }
    }

    pub(crate) fn cases_seen(&self) -> bool {
        self.cases > 0
    }

    pub(crate) fn finish(self) -> Check {
        Check {
            name: self.name.to_string(),
            passed: !self.failed,
            cases: self.cases,
            witness: self.witness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_follows_checks() {
        let instance = Instance {
            factors: vec!["C3".into()],
            index_set_size: 1,
            ultrafilter: "principal:0".into(),
            families: 1,
            family_space: 1,
            exhaustive: true,
            seed: None,
        };
        let mut ok = Tally::new("ok");
        ok.record(true, || unreachable!());
        let mut bad = Tally::new("bad");
        bad.record(false, || Witness::Elements {
            left: 0,
            right: 1,
            detail: "first".into(),
        });
        bad.record(false, || Witness::Detail {
            detail: "second".into(),
        });
        let report =
            VerificationReport::new(TheoremId::Thm1, instance, vec![ok.finish(), bad.finish()]);
        assert!(!report.passed);
        let failed: Vec<_> = report.failed_checks().collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].cases, 2);
        assert!(matches!(
            failed[0].witness,
            Some(Witness::Elements { left: 0, .. })
        ));
        let json = report.to_json();
        assert!(json.contains("\"theorem\": \"thm1\""));
        assert!(json.contains("\"kind\": \"elements\""));
    }
}
