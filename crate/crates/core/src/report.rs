//! Machine-readable reports. Serialization is deterministic: maps are sorted
//! and infinities are written as the strings `"inf"` / `"-inf"`.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Serialize, Serializer};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::verify::VerificationResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Serializes non-finite floats as strings so the output stays valid JSON.
pub fn ext_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// JSON value for a float, with the same convention as [`ext_f64`].
pub fn ext_value(v: f64) -> Value {
    serde_json::to_value(Ext(v)).expect("floats always serialize")
}

#[derive(Serialize)]
struct Ext(#[serde(serialize_with = "ext_f64")] f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Nats,
    Bits,
    /// Expected gain; a probability for `g_id` and the simplex gain.
    Gain,
    Loss,
}

/// Why a value is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    ZeroPriorVulnerability,
    ZeroChannelEntry,
    SupportMismatch,
    ZeroProbabilityGuess,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    /// SHA-256 of every input file, keyed by its role.
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(seed: Option<u64>) -> Self {
        Self {
            tool: "qifkit".to_owned(),
            version: crate::VERSION.to_owned(),
            seed,
            inputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, role: &str, bytes: &[u8]) {
        self.inputs.insert(role.to_owned(), sha256_hex(bytes));
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub schema: u32,
    pub measure: String,
    #[serde(serialize_with = "ext_f64")]
    pub value: f64,
    pub unit: Unit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
    pub params: BTreeMap<String, Value>,
    pub diagnostics: BTreeMap<String, Value>,
    pub provenance: Provenance,
}

impl LeakageReport {
    pub fn new(measure: impl Into<String>, value: f64, unit: Unit, provenance: Provenance) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            measure: measure.into(),
            value,
            unit,
            reason: None,
            params: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            provenance,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn diagnostic(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_owned(), value.into());
        self
    }

    pub fn with_reason(mut self, reason: Option<Reason>) -> Self {
        if !self.value.is_finite() {
            self.reason = reason;
        }
        self
    }

    /// Converts a nats-valued report to bits; other units are unchanged.
    pub fn into_bits(mut self) -> Self {
        if self.unit == Unit::Nats {
            self.value /= LN_2;
            self.unit = Unit::Bits;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub suite: String,
    pub passed: bool,
    pub params: BTreeMap<String, Value>,
    pub results: Vec<VerificationResult>,
    pub provenance: Provenance,
}

impl VerifyReport {
    pub fn new(
        suite: impl Into<String>,
        params: BTreeMap<String, Value>,
        results: Vec<VerificationResult>,
        provenance: Provenance,
    ) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            passed: results.iter().all(|r| r.passed),
            params,
            results,
            provenance,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_are_strings() {
        let r = LeakageReport::new("x", f64::INFINITY, Unit::Nats, Provenance::new(None))
            .with_reason(Some(Reason::ZeroPriorVulnerability));
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["value"], "inf");
        assert_eq!(v["reason"], "zero_prior_vulnerability");
        assert_eq!(ext_value(f64::NEG_INFINITY), Value::from("-inf"));
        assert_eq!(ext_value(0.5), Value::from(0.5));
    }

    #[test]
    fn reason_only_for_infinite_values() {
        let r = LeakageReport::new("x", 1.0, Unit::Nats, Provenance::new(None))
            .with_reason(Some(Reason::SupportMismatch));
        assert!(r.reason.is_none());
        assert!(!r.to_json().contains("reason"));
    }

    #[test]
    fn bits_conversion() {
        let r = LeakageReport::new("x", 1.8f64.ln(), Unit::Nats, Provenance::new(None)).into_bits();
        assert_eq!(r.value, 1.8f64.ln() / LN_2);
        assert_eq!(r.unit, Unit::Bits);
        let g = LeakageReport::new("x", 0.5, Unit::Gain, Provenance::new(None)).into_bits();
        assert_eq!(g.value, 0.5);
    }

    #[test]
    fn hashes() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
