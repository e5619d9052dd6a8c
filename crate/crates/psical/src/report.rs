//! Machine-readable experiment reports: one JSON verdict block per run plus
//! CSV files with the per-point data. Floats print with 17 significant
//! digits; complex columns split into `_re` / `_im`.

use crate::error::Result;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub verdict: Verdict,
    /// Scalar metrics (slopes, suprema, margins), ordered by name.
    pub metrics: BTreeMap<String, f64>,
    /// Per-check verdicts, ordered by name.
    pub checks: BTreeMap<String, bool>,
    pub csv_paths: Vec<String>,
    pub tool_version: String,
    pub config_echo: BTreeMap<String, String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config_echo: BTreeMap<String, String>) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            verdict: Verdict::Pass,
            metrics: BTreeMap::new(),
            checks: BTreeMap::new(),
            csv_paths: Vec::new(),
            tool_version: crate::VERSION.to_string(),
            config_echo,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    /// Record a named check; any failed check fails the experiment.
    pub fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
        if !ok {
            self.verdict = Verdict::Fail;
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn write_json(&self, out_dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(out_dir)?;
        let path = out_dir.join(format!("{}.json", self.experiment));
        let mut f = std::fs::File::create(&path)?;
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| crate::error::Error::Io(std::io::Error::other(e)))?;
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(path)
    }
}

/// Incremental CSV writer with a fixed header.
pub struct CsvWriter {
    file: std::io::BufWriter<std::fs::File>,
    path: PathBuf,
    columns: usize,
}

impl CsvWriter {
    pub fn create(out_dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        let path = out_dir.join(format!("{name}.csv"));
        let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(file, "{}", header.join(","))?;
        Ok(CsvWriter { file, path, columns: header.len() })
    }

    /// One row of mixed text/number cells; numbers should come through
    /// [`fmt_f64`] for stable 17-significant-digit output.
    pub fn row(&mut self, cells: &[String]) -> Result<()> {
        debug_assert_eq!(cells.len(), self.columns);
        writeln!(self.file, "{}", cells.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.file.flush()?;
        Ok(self.path)
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let mut r = ExperimentReport::new("demo", BTreeMap::new());
        r.check("a", true);
        assert!(r.passed());
        r.check("b", false);
        assert!(!r.passed());
    }

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(1.0 / 3.0), "3.3333333333333331e-1");
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join("psical_report_test");
        let mut w = CsvWriter::create(&dir, "demo", &["h", "value_re", "value_im"]).unwrap();
        w.row(&["0.5".into(), fmt_f64(1.25), fmt_f64(-0.5)]).unwrap();
        let path = w.finish().unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.starts_with("h,value_re,value_im\n"));
        assert!(text.contains("1.2500000000000000e0"));
        let _ = std::fs::remove_dir_all(dir);
    }
}
