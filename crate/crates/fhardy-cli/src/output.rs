use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use fhardy::VerificationReport;

use crate::config::RunConfig;
use crate::CliError;

/// Shortest decimal that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Everything a command produces: console lines, one CSV table, and the
/// JSON summary assembled from the same data.
#[derive(Debug, Default)]
pub struct Output {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub reports: Vec<VerificationReport>,
    pub values: serde_json::Map<String, Value>,
    pub lines: Vec<String>,
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    passed: bool,
    error: Option<String>,
    config: &'a RunConfig,
    values: &'a serde_json::Map<String, Value>,
    reports: &'a [VerificationReport],
}

impl Output {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, ..Default::default() }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields);
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) {
        self.values.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// Prints the console table and writes the requested files. A failed
    /// run still writes its partial rows, followed by a marker row.
    pub fn emit(&self, command: &str, cfg: &RunConfig, passed: bool, error: Option<&CliError>) -> Result<(), CliError> {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        for l in &self.lines {
            writeln!(out, "{l}").map_err(io)?;
        }
        if let Some(path) = &cfg.out_csv {
            self.write_csv(path, error)?;
        }
        if let Some(path) = &cfg.out_json {
            let summary = Summary {
                command,
                passed,
                error: error.map(|e| e.to_string()),
                config: cfg,
                values: &self.values,
                reports: &self.reports,
            };
            let mut text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Io(e.to_string()))?;
            text.push('\n');
            std::fs::write(path, text).map_err(io)?;
        }
        Ok(())
    }

    fn write_csv(&self, path: &Path, error: Option<&CliError>) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
        let csv_err = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        if let Some(e) = error {
            w.write_record(["#failed", &e.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}
