use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::quadfield::QuadInt;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub element: String,
    pub expected: String,
    pub got: String,
}

impl Failure {
    pub fn new(element: impl ToString, expected: impl ToString, got: impl ToString) -> Self {
        Failure { element: element.to_string(), expected: expected.to_string(), got: got.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    SumOfSquares,
    NotSumOfSquares,
}

/// An element whose oracle verdict the report relies on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub element: QuadInt,
    pub verdict: WitnessKind,
    pub role: String,
}

/// A discrepancy that is recorded but does not fail the claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub element: String,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub claim_id: String,
    #[serde(rename = "D")]
    pub d: i64,
    pub pass: bool,
    pub instances_checked: u64,
    pub failures: Vec<Failure>,
    pub witnesses: Vec<Witness>,
    pub findings: Vec<Finding>,
    pub stats: BTreeMap<String, Value>,
    /// Kept out of the JSONL record so reruns are byte-identical.
    #[serde(skip)]
    pub elapsed: Duration,
    /// Every target the oracle certified as a sum of squares during the run.
    #[serde(skip)]
    pub oracle_found: Vec<QuadInt>,
}

impl Report {
    pub fn new(claim_id: impl Into<String>, d: i64) -> Self {
        Report {
            claim_id: claim_id.into(),
            d,
            pass: true,
            instances_checked: 0,
            failures: Vec::new(),
            witnesses: Vec::new(),
            findings: Vec::new(),
            stats: BTreeMap::new(),
            elapsed: Duration::ZERO,
            oracle_found: Vec::new(),
        }
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        self.stats.insert(key.to_string(), serde_json::to_value(value).expect("serializable stat"));
    }

    pub(crate) fn finish(mut self, elapsed: Duration) -> Self {
        self.pass = self.failures.is_empty();
        self.elapsed = elapsed;
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Writes the `{schema: 1}` header, then one line per report.
pub fn write_jsonl<W: Write>(
    mut out: W,
    header: &impl Serialize,
    reports: &[Report],
) -> io::Result<()> {
    let mut head = serde_json::to_value(header).map_err(io::Error::other)?;
    if let Value::Object(map) = &mut head {
        map.insert("schema".into(), SCHEMA_VERSION.into());
    }
    writeln!(out, "{}", head)?;
    for r in reports {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}
