use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

pub const SCHEMA: u32 = 1;

/// Errors that stop a command before it produces a report.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Input(_) => 65,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Verified,
    ClaimFailed,
    AccuracyFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::ClaimFailed => 1,
            Status::AccuracyFailure => 2,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub rows: Vec<Value>,
    pub status: Status,
    /// Envelope verdict; defaults to the status name.
    pub verdict: Option<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new() -> Self {
        Self {
            rows: Vec::new(),
            status: Status::Verified,
            verdict: None,
            notes: Vec::new(),
        }
    }

    pub fn push<T: Serialize>(&mut self, row: &T) {
        self.rows.push(serde_json::to_value(row).expect("rows serialize"));
    }

    /// Marks a claim failure unless a worse status is already recorded.
    pub fn claim_failed(&mut self, note: String) {
        if self.status == Status::Verified {
            self.status = Status::ClaimFailed;
        }
        self.notes.push(note);
    }

    pub fn accuracy_failure(mut self, note: String) -> Self {
        self.status = Status::AccuracyFailure;
        self.notes.push(note);
        self
    }

    fn verdict(&self) -> String {
        self.verdict.clone().unwrap_or_else(|| {
            match self.status {
                Status::Verified => "verified",
                Status::ClaimFailed => "claim_failed",
                Status::AccuracyFailure => "accuracy_failure",
            }
            .to_string()
        })
    }
}

/// One numerical check: a computed value against a reference.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub case: String,
    pub value: f64,
    pub reference: Option<f64>,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    command: &'a str,
    config_echo: &'a RunConfig,
    results: &'a [Value],
    verdict: String,
    notes: &'a [String],
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_csv(rows: &[Value]) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(Value::Object(first)) = rows.first() {
        let header: Vec<&String> = first.keys().collect();
        w.write_record(header.iter().map(|s| s.as_str())).map_err(|e| e.to_string())?;
        for row in rows {
            let cells: Vec<String> = header.iter().map(|k| csv_cell(&row[k.as_str()])).collect();
            w.write_record(&cells).map_err(|e| e.to_string())?;
        }
    }
    w.into_inner().map_err(|e| e.to_string())
}

pub fn render(command: &str, cfg: &RunConfig, outcome: &Outcome) -> Result<Vec<u8>, String> {
    match cfg.format {
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA,
                command,
                config_echo: cfg,
                results: &outcome.rows,
                verdict: outcome.verdict(),
                notes: &outcome.notes,
            };
            let mut text = serde_json::to_vec_pretty(&env).map_err(|e| e.to_string())?;
            text.push(b'\n');
            Ok(text)
        }
        Format::Csv => render_csv(&outcome.rows),
    }
}

pub fn write(cfg: &RunConfig, bytes: &[u8]) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Usage(format!("cannot write stdout: {e}"))),
    }
}
