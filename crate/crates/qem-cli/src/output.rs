//! CSV and JSON output writers. CSV is RFC 4180 with `.` decimals and
//! full-precision (shortest round-trip) doubles; headers are fixed per
//! output kind with units encoded in the column names.

use std::fmt::Write as _;
use std::path::Path;

/// Accumulates one CSV document.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push_str("\r\n");
        Self { buf, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[CsvField]) {
        assert_eq!(fields.len(), self.columns, "row width must match header");
        for (k, f) in fields.iter().enumerate() {
            if k > 0 {
                self.buf.push(',');
            }
            match f {
                CsvField::Num(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                CsvField::Str(s) => {
                    debug_assert!(!s.contains([',', '"', '\n']));
                    self.buf.push_str(s);
                }
            }
        }
        self.buf.push_str("\r\n");
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.as_str())
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

pub enum CsvField<'a> {
    Num(f64),
    Str(&'a str),
}

/// Pretty-printed JSON with stable field order (serde_json preserves struct
/// order; maps used here are BTreeMaps).
pub fn write_json(path: &Path, value: &serde_json::Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text)
}
