//! CSV and JSON writers. Everything written here is a pure function of the
//! report, so reruns with the same configuration produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{io_err, Result};
use crate::experiments::{Check, Report};

/// Column order of the per-iteration result files.
pub const RESULT_HEADER: [&str; 13] = [
    "experiment",
    "model",
    "L",
    "n_A",
    "n_B",
    "d",
    "K",
    "beta",
    "seed",
    "iteration",
    "loss",
    "fidelity",
    "wall_time_ms",
];

/// One training iteration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub model: String,
    pub chain_length: usize,
    pub n_ancilla: usize,
    pub n_system: usize,
    pub depth: usize,
    pub order: usize,
    pub beta: f64,
    pub seed: u64,
    pub iteration: usize,
    pub loss: f64,
    pub fidelity: f64,
    pub wall_time_ms: f64,
}

impl ResultRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            self.experiment.clone(),
            self.model.clone(),
            self.chain_length.to_string(),
            self.n_ancilla.to_string(),
            self.n_system.to_string(),
            self.depth.to_string(),
            self.order.to_string(),
            fmt_float(self.beta),
            self.seed.to_string(),
            self.iteration.to_string(),
            fmt_float(self.loss),
            fmt_float(self.fidelity),
            fmt_float(self.wall_time_ms),
        ]
    }

    /// Finite loss and fidelity in `[0, 1 + 1e-9]`.
    pub fn is_valid(&self) -> bool {
        self.loss.is_finite() && (0.0..=1.0 + 1e-9).contains(&self.fidelity)
    }
}

/// A named CSV table. The main table of a report has an empty suffix.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub suffix: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(suffix: &str, header: &[&str]) -> Self {
        Self {
            suffix: suffix.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn from_results(rows: &[ResultRow]) -> Self {
        let mut table = Self::new("", &RESULT_HEADER);
        table.rows = rows.iter().map(ResultRow::cells).collect();
        table
    }

    pub fn file_name(&self, id: &str) -> String {
        if self.suffix.is_empty() {
            format!("{id}.csv")
        } else {
            format!("{id}.{}.csv", self.suffix)
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// 17 significant digits in scientific notation, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    writer.write_record(&table.header)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    writer.flush().map_err(io_err(path))?;
    Ok(())
}

#[derive(Serialize)]
struct Meta<'a> {
    artifact: &'static str,
    version: &'static str,
    experiment: String,
    config: BTreeMap<String, String>,
    files: Vec<String>,
    checks: &'a [Check],
    all_checks_passed: bool,
}

/// Writes every table of `report` plus `<id>.meta.json` into `dir`.
pub fn write_report(dir: &Path, report: &Report) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let id = report.config.id.as_str();
    let mut written = Vec::new();
    let mut files = Vec::new();
    for table in report.tables() {
        let name = table.file_name(id);
        let path = dir.join(&name);
        write_csv(&path, table)?;
        files.push(name);
        written.push(path);
    }
    let meta = Meta {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: id.to_string(),
        config: report.config.to_flat(),
        files,
        checks: &report.checks,
        all_checks_passed: report.passed(),
    };
    let path = dir.join(format!("{id}.meta.json"));
    let mut json = serde_json::to_string_pretty(&meta)?;
    json.push('\n');
    fs::write(&path, json).map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, std::f64::consts::PI] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17);
        }
        assert_eq!(fmt_float(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn csv_uses_lf_and_fixed_header() {
        let dir = tempfile::tempdir().unwrap();
        let row = ResultRow {
            experiment: "ising-sweep".into(),
            model: "ising/ising6".into(),
            chain_length: 5,
            n_ancilla: 1,
            n_system: 5,
            depth: 0,
            order: 2,
            beta: 2.0,
            seed: 3,
            iteration: 0,
            loss: -5.25,
            fidelity: 0.5,
            wall_time_ms: 0.0,
        };
        assert!(row.is_valid());
        let path = dir.path().join("x.csv");
        write_csv(&path, &Table::from_results(&[row])).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULT_HEADER.join(","));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("ising-sweep,ising/ising6,5,1,5,0,2,2.0000000000000000e0,3,0,"));
    }
}
