//! Deterministic CSV and manifest output: fixed float formatting (17
//! significant digits), sorted manifest keys, no timestamps.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Format a float with 17 significant digits so values round-trip exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV file from a header and fully formatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> io::Result<()> {
    let mut text =
        String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text)
}

/// FNV-1a hash of the canonical config text, recorded in manifests.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Files and summary metrics produced by one run.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub config_hash: u64,
    /// Paths relative to the output directory, in emission order.
    pub files: Vec<String>,
    /// Summary metrics as key/value strings, written sorted by key.
    pub metrics: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(experiment: &str, seed: u64, config_hash: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed,
            config_hash,
            files: Vec::new(),
            metrics: Vec::new(),
        }
    }

    pub fn push_metric(&mut self, key: &str, value: f64) {
        self.metrics.push((key.to_string(), fmt_float(value)));
    }

    pub fn push_text_metric(&mut self, key: &str, value: &str) {
        self.metrics.push((key.to_string(), value.to_string()));
    }

    /// Write `manifest.txt` into `dir` and return its path.
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let mut lines = vec![
            format!("config_hash={:016x}", self.config_hash),
            format!("experiment={}", self.experiment),
            format!("seed={}", self.seed),
            format!("version={}", env!("CARGO_PKG_VERSION")),
        ];
        for (i, f) in self.files.iter().enumerate() {
            lines.push(format!("file.{i:03}={f}"));
        }
        let mut metrics: Vec<_> = self
            .metrics
            .iter()
            .map(|(k, v)| format!("metric.{k}={v}"))
            .collect();
        metrics.sort();
        lines.extend(metrics);
        let path = dir.join("manifest.txt");
        fs::write(&path, lines.join("\n") + "\n")?;
        Ok(path)
    }
}
