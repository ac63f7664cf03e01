use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::hex;
use crate::error::CliError;

/// A named table written to `series/<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Header plus one line per row; `f64` display is the shortest string that parses back to the same value.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub config_hash: String,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
    pub checks_failed: usize,
}

fn write_file(dir: &Path, rel: &str, bytes: &[u8], files: &mut Vec<FileEntry>) -> Result<(), CliError> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, bytes)?;
    files.push(FileEntry { path: rel.to_string(), sha256: hex(&Sha256::digest(bytes)), bytes: bytes.len() as u64 });
    Ok(())
}

/// Writes `report.json` and every series, returning their manifest entries in write order.
pub fn write_outputs(dir: &Path, report: &serde_json::Value, series: &[Series]) -> Result<Vec<FileEntry>, CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut text = serde_json::to_string_pretty(report).expect("report serialises");
    text.push('\n');
    write_file(dir, "report.json", text.as_bytes(), &mut files)?;
    for s in series {
        write_file(dir, &format!("series/{}.csv", s.name), s.to_csv().as_bytes(), &mut files)?;
    }
    Ok(files)
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_doubles() {
        let mut s = Series::new("x", &["a", "b"]);
        let vals = [0.1 + 0.2, 1e-300, -2.5e17, std::f64::consts::PI, 5e-324];
        for v in vals {
            s.push(vec![v, -v]);
        }
        let csv = s.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("a,b"));
        for (line, v) in lines.zip(vals) {
            let parsed: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(parsed[0].to_bits(), v.to_bits());
            assert_eq!(parsed[1].to_bits(), (-v).to_bits());
        }
    }

    #[test]
    fn outputs_carry_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Series::new("energy", &["t", "e"]);
        s.push(vec![0.0, 1.0]);
        let files = write_outputs(dir.path(), &serde_json::json!({"k": 1}), &[s]).unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(files[1].path, "series/energy.csv");
        let bytes = fs::read(dir.path().join("series/energy.csv")).unwrap();
        assert_eq!(files[1].sha256, hex(&Sha256::digest(&bytes)));
        assert_eq!(bytes, b"t,e\n0,1\n");
    }
}
