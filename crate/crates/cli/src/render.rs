//! Report rendering: JSON envelope, CSV mirror and a plain-text table.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// One command's output, in every format.
pub struct Report {
    pub command: &'static str,
    pub body: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub text: String,
    pub exit: i32,
}

impl Report {
    pub fn new(command: &'static str, body: impl Serialize) -> Self {
        Report {
            command,
            body: serde_json::to_value(body).expect("reports serialize"),
            header: Vec::new(),
            rows: Vec::new(),
            text: String::new(),
            exit: 0,
        }
    }

    pub fn json(&self) -> Value {
        json!({
            "command": self.command,
            "exit_code": self.exit,
            "report": self.body,
        })
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).unwrap();
                s.push('\n');
                s.into_bytes()
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).unwrap();
                for r in &self.rows {
                    w.write_record(r).unwrap();
                }
                w.into_inner().unwrap()
            }
            Format::Table => self.text.clone().into_bytes(),
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        out.write_all(&self.render(format))
    }
}

pub fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "unknown".into(), T::to_string)
}

/// Shortest round-trip representation, so CSV and JSON carry the same value.
pub fn float(v: f64) -> String {
    serde_json::to_string(&v).unwrap()
}
