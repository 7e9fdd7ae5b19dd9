//! Canonical JSON envelopes: the body is hashed, then a digest and an
//! optional timestamp are appended. Two runs with the same inputs produce the
//! same body and digest.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

/// Hex SHA-256 of the compact JSON serialization of `body`.
pub fn canonical_digest<T: Serialize>(body: &T) -> Result<String> {
    let bytes = serde_json::to_vec(body).map_err(std::io::Error::other)?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Pretty JSON of `body` followed by `sha256` and, unless `deterministic`,
/// a `timestamp` in seconds since the Unix epoch (not covered by the digest).
pub fn to_json<T: Serialize>(body: &T, deterministic: bool) -> Result<String> {
    let timestamp = (!deterministic).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    let envelope = Envelope {
        body,
        sha256: canonical_digest(body)?,
        timestamp,
    };
    let mut s = serde_json::to_string_pretty(&envelope).map_err(std::io::Error::other)?;
    s.push('\n');
    Ok(s)
}

/// Drops the `timestamp` member from a report produced by [`to_json`].
pub fn strip_timestamp(json: &str) -> Result<String> {
    let mut v: serde_json::Value = serde_json::from_str(json).map_err(std::io::Error::other)?;
    if let Some(map) = v.as_object_mut() {
        map.remove("timestamp");
    }
    Ok(serde_json::to_string_pretty(&v).map_err(std::io::Error::other)?)
}
