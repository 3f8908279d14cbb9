//! Machine-readable report envelope emitted by every CLI command.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Wrapper around a command-specific payload. Deterministic given the same
/// inputs; rationals inside payloads are rendered as `"p/q"` strings with
/// derived decimal fields alongside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    pub inputs_digest: String,
    pub payload: serde_json::Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub c: usize,
}

impl ReportEnvelope {
    pub fn new(
        command: &str,
        instance: Option<Instance>,
        inputs: &[u8],
        payload: serde_json::Value,
    ) -> Self {
        ReportEnvelope {
            tool: "cloneplan".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            instance,
            inputs_digest: digest_hex(inputs),
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// SHA-256 of the raw input bytes, hex-encoded.
pub fn digest_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
