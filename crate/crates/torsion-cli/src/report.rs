//! Run reports: a single self-describing JSON document per run, with a
//! human-readable summary on standard output. Re-running with an identical
//! configuration reproduces the report byte for byte except for the wall
//! clock.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn new(
        command: &str,
        inputs_digest: String,
        config: serde_json::Value,
        results: serde_json::Value,
        checks: Vec<CheckLine>,
    ) -> Self {
        let passed = checks.iter().all(|c| c.pass);
        Report {
            command: command.to_string(),
            inputs_digest,
            config,
            results,
            checks,
            passed,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn emit(&self, out: Option<&Path>) -> std::io::Result<()> {
        println!("command: {}", self.command);
        println!("inputs:  {}", self.inputs_digest);
        for check in &self.checks {
            let status = if check.pass { "PASS" } else { "FAIL" };
            if check.detail.is_empty() {
                println!("{status} {}", check.name);
            } else {
                println!("{status} {} ({})", check.name, check.detail);
            }
        }
        println!("overall: {}", if self.passed { "pass" } else { "FAIL" });
        let text = serde_json::to_string_pretty(self).expect("report serializes");
        match out {
            Some(path) => {
                std::fs::write(path, text.as_bytes())?;
                println!("report: {}", path.display());
            }
            None => println!("{text}"),
        }
        Ok(())
    }
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("sha256:{}", hex::encode(hasher.finalize()))
}

pub fn digest_config(description: &str) -> String {
    digest_bytes(description.as_bytes())
}

pub fn complex_json(z: num_complex::Complex64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

pub fn complex_list_json(zs: &[num_complex::Complex64]) -> serde_json::Value {
    serde_json::Value::Array(zs.iter().map(|&z| complex_json(z)).collect())
}
