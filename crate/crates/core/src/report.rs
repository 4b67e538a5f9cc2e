//! Versioned JSON run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ModelConfig;

pub const REPORT_SCHEMA: u32 = 1;

/// What a measured value was compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    /// Integer or bitmask arithmetic, or an exact floating comparison.
    ExactAlgebra,
    /// Full dense diagonalization.
    DenseEig,
    /// Lanczos against a value from an independent route.
    IterativeEig,
    /// State counts from breadth-first closure.
    BfsCount,
    /// A closed-form value derived from the one-body matrices.
    ProductFormula,
    /// A stated numeric threshold.
    Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: Value,
    pub expected: Value,
    /// Absolute tolerance of the comparison; zero for exact checks.
    pub tolerance: f64,
    pub oracle: Oracle,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        pass: bool,
        measured: impl Serialize,
        oracle: Oracle,
    ) -> Self {
        Check {
            name: name.into(),
            pass,
            measured: serde_json::to_value(measured).unwrap_or(Value::Null),
            expected: Value::Null,
            tolerance: 0.0,
            oracle,
        }
    }

    pub fn expect(mut self, expected: impl Serialize, tolerance: f64) -> Self {
        self.expected = serde_json::to_value(expected).unwrap_or(Value::Null);
        self.tolerance = tolerance;
        self
    }

    /// `|measured − expected| ≤ tolerance`.
    pub fn close(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        oracle: Oracle,
    ) -> Self {
        Check::new(
            name,
            (measured - expected).abs() <= tolerance,
            measured,
            oracle,
        )
        .expect(expected, tolerance)
    }

    /// `measured ≤ bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, oracle: Oracle) -> Self {
        Check::new(name, measured <= bound, measured, oracle).expect(0.0, bound)
    }

    /// An exact count compared with its expected value.
    pub fn count(
        name: impl Into<String>,
        measured: usize,
        expected: usize,
        oracle: Oracle,
    ) -> Self {
        Check::new(name, measured == expected, measured, oracle).expect(expected, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    /// The configuration the model was built from, so the run can be repeated.
    pub config: Option<ModelConfig>,
    /// SHA-256 of the serialized term set.
    pub fingerprint: Option<String>,
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Command-specific payload: spectra, certificates, tables.
    pub data: BTreeMap<String, Value>,
    /// Wall-clock seconds per phase; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            schema_version: REPORT_SCHEMA,
            command,
            config: None,
            fingerprint: None,
            pass: true,
            checks: Vec::new(),
            data: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        cs.into_iter().for_each(|c| self.push(c));
    }

    pub fn insert(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(
            key.to_string(),
            serde_json::to_value(v).unwrap_or(Value::Null),
        );
    }

    pub fn time(&mut self, phase: &str, seconds: f64) {
        self.timings.insert(phase.to_string(), seconds);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_failure_fails_the_report() {
        let mut r = RunReport::new(vec!["x".into()]);
        r.push(Check::close("a", 1.0, 1.0 + 1e-13, 1e-12, Oracle::DenseEig));
        assert!(r.pass);
        r.push(Check::count("b", 3, 4, Oracle::BfsCount));
        assert!(!r.pass);
        let back: RunReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
