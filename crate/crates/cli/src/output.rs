//! Report assembly and serialization for the scalar commands.

use std::io::Write;
use std::path::Path;

use wva_core::experiments::format_number;

/// Ordered key/value pairs backing the text and CSV renderings of a scalar
/// report. JSON goes through the typed structs instead so numbers stay at
/// full shortest-roundtrip precision.
#[derive(Debug, Default)]
pub struct Fields(Vec<(String, String)>);

impl Fields {
    pub fn new() -> Self {
        Fields(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: String) {
        self.0.push((key.to_string(), value));
    }

    pub fn num(&mut self, key: &str, value: f64, precision: usize) {
        self.push(key, format_number(value, precision));
    }

    pub fn opt_num(&mut self, key: &str, value: Option<f64>, precision: usize) {
        self.push(key, value.map(|v| format_number(v, precision)).unwrap_or_default());
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let header: Vec<&str> = self.0.iter().map(|(k, _)| k.as_str()).collect();
        let row: Vec<&str> = self.0.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

/// Write to the path, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())
        }
    }
}
