//! Reports, check records and structured errors.

use std::time::{SystemTime, UNIX_EPOCH};

use kpflow_core::Error;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Residual objects larger than this many coefficients are summarized only.
pub const RESIDUAL_CAP: usize = 4096;

/// Fields excluded when two reports are compared.
pub const VOLATILE_FIELDS: [&str; 1] = ["timestamp"];

/// A failure with its process exit code (1: check failed, 2: config or parse error).
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit: i32,
    pub code: String,
    pub message: String,
    pub detail: Value,
}

impl CliError {
    pub fn new(exit: i32, code: &str, message: String, detail: Value) -> Self {
        CliError { exit, code: code.into(), message, detail }
    }

    pub fn from_core(exit: i32, e: &Error) -> Self {
        CliError::new(exit, e.code(), e.to_string(), error_detail(e))
    }

    /// Parse and ring errors are input problems (2); anything else failed a computation (1).
    pub fn computation(e: &Error) -> Self {
        let exit = match e {
            Error::Parse(_) | Error::RingMismatch(_) | Error::UnsupportedRing(_) => 2,
            _ => 1,
        };
        Self::from_core(exit, e)
    }

    pub fn io(what: &str, e: &std::io::Error) -> Self {
        CliError::new(2, "io_error", format!("{what}: {e}"), Value::Null)
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "code": self.code, "message": self.message, "detail": self.detail, "exit": self.exit } })
    }
}

pub fn error_detail(e: &Error) -> Value {
    match e {
        Error::NonZeroMean { mean } => json!({ "mean": mean }),
        Error::DressingObstruction { step, mean } => json!({ "step": step, "mean": mean }),
        Error::InsufficientDepth { needed, reliable } => json!({ "needed": needed, "reliable": reliable }),
        Error::OrderViolation { index, order } => json!({ "index": index, "order": order }),
        Error::InsufficientKMax { needed, got } => json!({ "needed": needed, "got": got }),
        Error::ValuationWindow { needed, v_max } => json!({ "needed": needed, "vMax": v_max }),
        _ => Value::Null,
    }
}

/// One verdict with its exact residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub family: &'static str,
    pub pass: bool,
    /// Nonzero slots of the residual.
    pub slots: usize,
    pub residual: Value,
    pub weight: usize,
    pub detail: Value,
}

impl CheckRecord {
    pub fn new(name: String, family: &'static str, slots: usize, residual: Value, weight: usize) -> Self {
        CheckRecord { name, family, pass: slots == 0, slots, residual, weight, detail: Value::Null }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn to_json(&self) -> Value {
        let omitted = self.weight > RESIDUAL_CAP;
        json!({
            "name": self.name,
            "family": self.family,
            "verdict": if self.pass { "pass" } else { "fail" },
            "nonzero_slots": self.slots,
            "residual": if omitted { Value::Null } else { self.residual.clone() },
            "residual_omitted": omitted,
            "detail": self.detail,
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Assembles a report; `status` is `pass` iff every check passed.
pub fn assemble(command: &str, input: Value, parameters: Value, result: Value, checks: &[CheckRecord], extra: Map<String, Value>) -> Value {
    let pass = checks.iter().all(|c| c.pass);
    let mut m = Map::new();
    m.insert("tool".into(), json!({ "name": "kpflow", "version": env!("CARGO_PKG_VERSION") }));
    m.insert("command".into(), json!(command));
    m.insert("input".into(), input);
    m.insert("parameters".into(), parameters);
    m.insert("result".into(), result);
    m.insert("checks".into(), Value::Array(checks.iter().map(CheckRecord::to_json).collect()));
    m.insert("status".into(), json!(if pass { "pass" } else { "fail" }));
    m.insert("timestamp".into(), json!(timestamp()));
    m.extend(extra);
    Value::Object(m)
}

/// A report with the volatile fields removed.
pub fn stable(report: &Value) -> Value {
    let mut r = report.clone();
    if let Some(m) = r.as_object_mut() {
        for f in VOLATILE_FIELDS {
            m.remove(f);
        }
    }
    r
}

pub fn failed_checks(report: &Value) -> Vec<String> {
    report["checks"]
        .as_array()
        .map(|cs| cs.iter().filter(|c| c["verdict"] != "pass").filter_map(|c| c["name"].as_str().map(String::from)).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_and_exits() {
        let e = CliError::computation(&Error::DressingObstruction { step: 3, mean: "-1/2".into() });
        assert_eq!((e.exit, e.code.as_str()), (1, "non_zero_mean"));
        assert_eq!(e.detail, json!({ "step": 3, "mean": "-1/2" }));
        assert_eq!(CliError::computation(&Error::Parse("x".into())).exit, 2);
        assert_eq!(CliError::computation(&Error::RingMismatch("x".into())).to_json()["error"]["code"], "ring_mismatch");
    }

    #[test]
    fn residual_cap() {
        let small = CheckRecord::new("a".into(), "lax", 1, json!([1]), 3);
        assert_eq!(small.to_json()["residual"], json!([1]));
        assert_eq!(small.to_json()["verdict"], "fail");
        let big = CheckRecord::new("b".into(), "lax", 0, json!([1]), RESIDUAL_CAP + 1);
        assert_eq!(big.to_json()["residual"], Value::Null);
        assert_eq!(big.to_json()["residual_omitted"], true);
    }

    #[test]
    fn stability_ignores_timestamp() {
        let a = assemble("x", json!(1), json!({}), json!(null), &[], Map::new());
        let mut b = a.clone();
        b["timestamp"] = json!(0);
        assert_ne!(a, b);
        assert_eq!(stable(&a), stable(&b));
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
