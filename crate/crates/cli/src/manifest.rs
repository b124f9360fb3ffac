use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// Provenance of one invocation. `run` depends only on the subcommand, the
/// parameters and the input contents, so reruns produce identical artifacts.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub run: String,
    pub subcommand: String,
    pub inputs: Vec<InputHash>,
    pub parameters: serde_json::Value,
    pub version: String,
    pub seed: u64,
    pub timestamp: u64,
    pub artifacts: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(subcommand: &str, inputs: &[(&Path, &[u8])], parameters: serde_json::Value, seed: u64) -> Self {
        let inputs: Vec<InputHash> =
            inputs.iter().map(|(p, b)| InputHash { path: p.display().to_string(), sha256: sha256_hex(b) }).collect();
        let mut key = format!("{subcommand}\n{parameters}\n{seed}\n");
        for i in &inputs {
            key.push_str(&i.sha256);
            key.push('\n');
        }
        let run = sha256_hex(key.as_bytes())[..16].to_string();
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        RunManifest {
            run,
            subcommand: subcommand.to_string(),
            inputs,
            parameters,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp,
            artifacts: Vec::new(),
        }
    }
}
