//! Deterministic result emission: report.json + data.csv, with anything
//! run-dependent (timestamps, worker counts) quarantined to provenance.json
//! so that identical manifest + seed → byte-identical report and CSV.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Full-precision scientific notation: 17 significant digits, enough to
/// round-trip any f64 bit pattern.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV table: a header line plus formatted rows.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    pub header: String,
    pub rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv { header: header.to_string(), rows: Vec::new() }
    }

    pub fn push(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.header.len() + 32 * self.rows.len());
        out.push_str(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// What a runner produces: a structured result block, the data table, a
/// one-line human summary, and the aggregate verdict.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub results: Value,
    pub csv: Csv,
    pub summary: String,
    pub passed: bool,
}

/// Strip every "workers" key, recursively. Worker counts are recorded in
/// provenance.json instead: embedding them in report.json would break the
/// byte-identity of runs that differ only in the pool size.
pub fn strip_workers(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("workers");
            for child in map.values_mut() {
                strip_workers(child);
            }
        }
        Value::Array(items) => {
            for child in items {
                strip_workers(child);
            }
        }
        _ => {}
    }
}

pub fn manifest_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// Assemble the deterministic report body.
pub fn report_json(
    kind: &str,
    manifest_hash: &str,
    seed: Option<u64>,
    artifacts: &Artifacts,
) -> Value {
    let mut results = artifacts.results.clone();
    strip_workers(&mut results);
    json!({
        "experiment": kind,
        "manifest_sha256": manifest_hash,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "convention": euler_crm::stochint::CONVENTION,
        "verdict": if artifacts.passed { "pass" } else { "fail" },
        "results": results,
    })
}

/// Write report.json, data.csv, and provenance.json under `out_dir`.
pub fn write_artifacts(
    out_dir: &Path,
    kind: &str,
    manifest_hash: &str,
    seed: Option<u64>,
    workers: usize,
    artifacts: &Artifacts,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let report = report_json(kind, manifest_hash, seed, artifacts);
    let report_path = out_dir.join("report.json");
    fs::write(&report_path, format!("{:#}\n", report))?;
    let csv_path = out_dir.join("data.csv");
    fs::write(&csv_path, artifacts.csv.render())?;
    let unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let provenance = json!({
        "unix_time_secs": unix,
        "workers": workers,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let prov_path = out_dir.join("provenance.json");
    fs::write(&prov_path, format!("{:#}\n", provenance))?;
    Ok(vec![report_path, csv_path, prov_path])
}
