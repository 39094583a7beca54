use std::path::Path;
use std::time::Instant;

use hybridrange::formats::to_json_string;
use hybridrange::{CertificateType, Result};
use serde_json::{json, Map, Value};

/// Machine-readable result of one command plus the line printed to stderr.
pub struct Report {
    pub command: &'static str,
    pub verdict: &'static str,
    pub certificate: CertificateType,
    pub payload: Value,
    pub residuals: Map<String, Value>,
    pub notes: Vec<String>,
    pub summary: String,
    pub exit: u8,
}

impl Report {
    pub fn new(command: &'static str, verdict: &'static str, certificate: CertificateType, exit: u8) -> Self {
        Self {
            command,
            verdict,
            certificate,
            payload: Value::Null,
            residuals: Map::new(),
            notes: Vec::new(),
            summary: String::new(),
            exit,
        }
    }

    pub fn payload(mut self, payload: Value) -> Self {
        self.payload = payload;
        self
    }

    pub fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_string(), json!(value));
        self
    }

    pub fn notes(mut self, notes: impl IntoIterator<Item = String>) -> Self {
        self.notes.extend(notes);
        self
    }

    pub fn summary(mut self, text: impl Into<String>) -> Self {
        self.summary = text.into();
        self
    }

    pub fn to_json(&self, started: Instant) -> Result<String> {
        let total_ms = started.elapsed().as_secs_f64() * 1e3;
        let value = json!({
            "command": self.command,
            "verdict": self.verdict,
            "certificate_type": self.certificate.as_str(),
            "payload": self.payload,
            "residuals": self.residuals,
            "notes": self.notes,
            "timings": { "total_ms": total_ms },
        });
        to_json_string(&value)
    }

    pub fn emit(&self, out: Option<&Path>, started: Instant) -> Result<()> {
        let text = self.to_json(started)?;
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        eprintln!("{}: {} [{}]", self.command, self.summary, self.certificate);
        for note in &self.notes {
            eprintln!("  note: {note}");
        }
        Ok(())
    }
}
