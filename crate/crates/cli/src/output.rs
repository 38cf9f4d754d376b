use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};

use crate::error::CliError;

/// Rounds to 12 significant decimal digits.
pub fn sig12(v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    if v == 0.0 {
        return 0.0;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// Text form used in CSV cells.
pub fn num_text(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        sig12(v).to_string()
    }
}

/// A real serialized at 12 significant digits; infinities become the
/// strings `"inf"` / `"-inf"` and NaN becomes null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            s.serialize_none()
        } else if v.is_infinite() {
            s.serialize_str(if v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(sig12(v))
        }
    }
}

pub fn json_bytes<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(doc).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes a report to `--out` when given, otherwise to `stdout`.
pub fn emit(out: Option<&PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| io_error(path, source)),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::Data(format!("failed to write output: {e}"))),
    }
}

pub fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Core(delentropy::Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn opt_text(v: Option<f64>) -> String {
    v.map(num_text).unwrap_or_default()
}
