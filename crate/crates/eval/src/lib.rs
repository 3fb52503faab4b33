//! Acceptance suites for the core library, with the brute-force oracles and
//! fixture generators they compare against.

pub mod blobs;
pub mod fixtures;
pub mod oracle;
pub mod suites;

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use atelier_core::corpus::MultimodalIndex;

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<22} {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Runs `f` and wraps what it reports. Errors count as failures.
pub fn timed(name: &'static str, f: impl FnOnce() -> atelier_core::Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

/// Every criterion, in a fixed order. Suites run one after another so the
/// timing criteria see an otherwise idle process.
pub fn run_all(index: &Arc<MultimodalIndex>) -> Vec<CriterionResult> {
    suites::ALL.iter().map(|(_, suite)| suite(index)).collect()
}

/// Runs only the named criteria; unknown names are returned as failures.
pub fn run_named(index: &Arc<MultimodalIndex>, names: &[String]) -> Vec<CriterionResult> {
    names
        .iter()
        .map(|n| match suites::ALL.iter().find(|(name, _)| name == n) {
            Some((_, suite)) => suite(index),
            None => CriterionResult {
                name: "unknown",
                passed: false,
                detail: format!("no criterion named {n:?}"),
                elapsed: Duration::ZERO,
            },
        })
        .collect()
}
