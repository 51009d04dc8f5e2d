//! Verification reports: one checked identity or congruence with its inputs,
//! exact computed values, expected values with provenance and a status.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated by the published result.
    Paper,
    /// Computed by an independent oracle or route.
    Derived,
    /// Immediate from definitions.
    Trivial,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Paper => "paper",
            Provenance::Derived => "derived",
            Provenance::Trivial => "trivial",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Every binding expectation holds, but a value as printed in the
    /// literature disagrees and the disagreement is recorded.
    DiscrepancyDocumented,
}

impl Status {
    pub fn is_failure(self) -> bool {
        self == Status::Fail
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::DiscrepancyDocumented => "discrepancy-documented",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub value: String,
    pub provenance: Provenance,
    /// Name of the computed value this expectation is compared against.
    pub against: String,
    /// Non-binding expectations only downgrade the status to
    /// [`Status::DiscrepancyDocumented`] when they disagree.
    pub binding: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub task: String,
    pub params: BTreeMap<String, Value>,
    pub computed: BTreeMap<String, String>,
    pub expected: BTreeMap<String, Expectation>,
    pub status: Status,
    pub elapsed: Duration,
    pub threads: usize,
    pub version: String,
    pub notes: Vec<String>,
    pub details: Vec<Value>,
}

impl VerificationReport {
    pub fn new(task: impl Into<String>) -> Self {
        VerificationReport {
            task: task.into(),
            params: BTreeMap::new(),
            computed: BTreeMap::new(),
            expected: BTreeMap::new(),
            status: Status::Fail,
            elapsed: Duration::ZERO,
            threads: 1,
            version: VERSION.to_string(),
            notes: Vec::new(),
            details: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn computed(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.computed.insert(key.to_string(), value.to_string());
        self
    }

    /// Binding expectation on the computed value of the same name.
    pub fn expect(mut self, key: &str, value: impl fmt::Display, provenance: Provenance) -> Self {
        self.expected.insert(
            key.to_string(),
            Expectation {
                value: value.to_string(),
                provenance,
                against: key.to_string(),
                binding: true,
            },
        );
        self
    }

    /// Records the value printed in the literature for `against` under `key`
    /// without making it binding.
    pub fn expect_as_printed(mut self, key: &str, against: &str, value: impl fmt::Display) -> Self {
        self.expected.insert(
            key.to_string(),
            Expectation {
                value: value.to_string(),
                provenance: Provenance::Paper,
                against: against.to_string(),
                binding: false,
            },
        );
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn detail(mut self, value: Value) -> Self {
        self.details.push(value);
        self
    }

    pub fn with_timing(mut self, elapsed: Duration, threads: usize) -> Self {
        self.elapsed = elapsed;
        self.threads = threads;
        self
    }

    /// Compares every expectation with its computed value and sets the status.
    pub fn finish(mut self) -> Self {
        let mut status = Status::Pass;
        for e in self.expected.values() {
            let matches = self.computed.get(&e.against) == Some(&e.value);
            if !matches {
                if e.binding {
                    status = Status::Fail;
                    break;
                }
                status = Status::DiscrepancyDocumented;
            }
        }
        self.status = status;
        self
    }

    pub fn passed(&self) -> bool {
        !self.status.is_failure()
    }

    /// Binding expectations that do not match, as `(name, computed, expected)`.
    pub fn mismatches(&self) -> Vec<(String, Option<String>, String)> {
        self.expected
            .iter()
            .filter(|(_, e)| e.binding && self.computed.get(&e.against) != Some(&e.value))
            .map(|(k, e)| {
                (
                    k.clone(),
                    self.computed.get(&e.against).cloned(),
                    e.value.clone(),
                )
            })
            .collect()
    }

    /// JSON value; timing fields are omitted when `timing` is false so two runs
    /// can be compared byte for byte.
    pub fn to_json(&self, timing: bool) -> Value {
        let mut expected = Map::new();
        let mut provenance = Map::new();
        for (k, e) in &self.expected {
            expected.insert(k.clone(), Value::String(e.value.clone()));
            provenance.insert(k.clone(), Value::String(e.provenance.to_string()));
        }
        expected.insert("provenance".into(), Value::Object(provenance));
        let nonbinding: Map<String, Value> = self
            .expected
            .iter()
            .filter(|(_, e)| !e.binding)
            .map(|(k, e)| (k.clone(), Value::String(e.against.clone())))
            .collect();
        if !nonbinding.is_empty() {
            expected.insert("nonbinding".into(), Value::Object(nonbinding));
        }
        let mut out = Map::new();
        out.insert("task".into(), json!(self.task));
        out.insert("params".into(), json!(self.params));
        out.insert("computed".into(), json!(self.computed));
        out.insert("expected".into(), Value::Object(expected));
        out.insert("status".into(), json!(self.status.as_str()));
        if timing {
            out.insert("elapsed_ms".into(), json!(self.elapsed.as_millis() as u64));
        }
        out.insert("threads".into(), json!(self.threads));
        out.insert("version".into(), json!(self.version));
        if !self.notes.is_empty() {
            out.insert("notes".into(), json!(self.notes));
        }
        if !self.details.is_empty() {
            out.insert("details".into(), Value::Array(self.details.clone()));
        }
        Value::Object(out)
    }

    /// Inverse of [`to_json`](Self::to_json); `None` if `v` is not a report.
    /// A missing `elapsed_ms` reads as zero.
    pub fn from_json(v: &Value) -> Option<Self> {
        let o = v.as_object()?;
        let strings = |v: &Value| -> Option<BTreeMap<String, String>> {
            v.as_object()?
                .iter()
                .map(|(k, v)| Some((k.clone(), v.as_str()?.to_string())))
                .collect()
        };
        let exp = o.get("expected")?.as_object()?;
        let prov = exp.get("provenance")?.as_object()?;
        let nonbinding = exp.get("nonbinding").and_then(Value::as_object);
        let mut expected = BTreeMap::new();
        for (k, val) in exp {
            if k == "provenance" || k == "nonbinding" {
                continue;
            }
            let provenance: Provenance = serde_json::from_value(prov.get(k)?.clone()).ok()?;
            let against = nonbinding.and_then(|m| m.get(k)).and_then(Value::as_str);
            expected.insert(
                k.clone(),
                Expectation {
                    value: val.as_str()?.to_string(),
                    provenance,
                    against: against.unwrap_or(k).to_string(),
                    binding: against.is_none(),
                },
            );
        }
        Some(VerificationReport {
            task: o.get("task")?.as_str()?.to_string(),
            params: o.get("params")?.as_object()?.clone().into_iter().collect(),
            computed: strings(o.get("computed")?)?,
            expected,
            status: serde_json::from_value(o.get("status")?.clone()).ok()?,
            elapsed: Duration::from_millis(
                o.get("elapsed_ms").and_then(Value::as_u64).unwrap_or(0),
            ),
            threads: o.get("threads")?.as_u64()? as usize,
            version: o.get("version")?.as_str()?.to_string(),
            notes: match o.get("notes") {
                Some(n) => serde_json::from_value(n.clone()).ok()?,
                None => Vec::new(),
            },
            details: match o.get("details") {
                Some(d) => d.as_array()?.clone(),
                None => Vec::new(),
            },
        })
    }

    /// One row per checked quantity: `task,quantity,computed,expected,provenance,status`.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        let mut rows = Vec::new();
        for (k, v) in &self.computed {
            let direct = self.expected.get(k);
            rows.push([
                self.task.clone(),
                k.clone(),
                v.clone(),
                direct.map(|e| e.value.clone()).unwrap_or_default(),
                direct.map(|e| e.provenance.to_string()).unwrap_or_default(),
                self.status.to_string(),
            ]);
        }
        for (k, e) in &self.expected {
            if self.computed.contains_key(k) {
                continue;
            }
            rows.push([
                self.task.clone(),
                k.clone(),
                self.computed.get(&e.against).cloned().unwrap_or_default(),
                e.value.clone(),
                e.provenance.to_string(),
                self.status.to_string(),
            ]);
        }
        rows
    }

    /// `task: status (a=.., b=..)`.
    pub fn summary_line(&self) -> String {
        let values: Vec<String> = self
            .computed
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}: {} ({})", self.task, self.status, values.join(", "))
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let Value::Object(map) = self.to_json(true) else {
            unreachable!()
        };
        let mut out = serializer.serialize_map(Some(map.len()))?;
        for (k, v) in &map {
            out.serialize_entry(k, v)?;
        }
        out.end()
    }
}
