use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::quality::QualityRecord;
use crate::error::{Error, Result};
use crate::scalar::Real;

const ID_COLUMN: &str = "image_id";

fn schema(message: impl Into<String>) -> Error {
    Error::Schema {
        field: ID_COLUMN.into(),
        message: message.into(),
    }
}

/// Parses a metrics table whose header names `image_id` and one or more
/// numeric columns. Blank cells are left absent.
pub fn read_metrics_csv<T: Real>(reader: impl Read) -> Result<Vec<QualityRecord<T>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| schema(format!("unreadable header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(schema("missing header row"));
    }
    let mut seen = BTreeSet::new();
    for name in headers.iter() {
        if !seen.insert(name) {
            return Err(Error::Schema {
                field: name.into(),
                message: "duplicate column".into(),
            });
        }
    }
    let id_col = headers
        .iter()
        .position(|h| h == ID_COLUMN)
        .ok_or_else(|| schema("required column is missing"))?;
    if headers.len() < 2 {
        return Err(schema("no metric columns"));
    }

    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            row: e.position().map_or(line, |p| p.line() as usize),
            column: String::new(),
            message: e.to_string(),
        })?;
        let image_id = row.get(id_col).unwrap_or_default();
        if image_id.is_empty() {
            return Err(Error::Parse {
                row: line,
                column: ID_COLUMN.into(),
                message: "empty image id".into(),
            });
        }
        let mut rec = QualityRecord {
            image_id: image_id.to_string(),
            ..QualityRecord::default()
        };
        for (col, (name, cell)) in headers.iter().zip(row.iter()).enumerate() {
            if col == id_col || cell.is_empty() {
                continue;
            }
            let value: T = cell
                .parse::<T>()
                .ok()
                .filter(|v| !v.is_nan())
                .ok_or_else(|| Error::Parse {
                    row: line,
                    column: name.into(),
                    message: format!("`{cell}` is not a number"),
                })?;
            match name {
                "psnr" => rec.psnr = Some(value),
                "ssim" => rec.ssim = Some(value),
                _ => {
                    rec.external.insert(name.to_string(), value);
                }
            }
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn ingest_metrics_csv<T: Real>(path: impl AsRef<Path>) -> Result<Vec<QualityRecord<T>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_metrics_csv(file)
}

/// Writes records with columns `image_id, psnr, ssim` followed by the union
/// of external metric names in sorted order. Values use the shortest text
/// that parses back to the same number.
pub fn write_metrics_csv<T: Real>(records: &[QualityRecord<T>], writer: impl Write) -> Result<()> {
    let io_err = |e: csv::Error| Error::Io {
        path: "<metrics csv>".into(),
        source: e.into(),
    };
    let external: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.external.keys().map(String::as_str))
        .collect();
    let has_psnr = records.iter().any(|r| r.psnr.is_some());
    let has_ssim = records.iter().any(|r| r.ssim.is_some());
    let mut header = vec![ID_COLUMN];
    if has_psnr {
        header.push("psnr");
    }
    if has_ssim {
        header.push("ssim");
    }
    header.extend(external.iter().copied());

    let mut w = csv::Writer::from_writer(writer);
    w.write_record(&header).map_err(io_err)?;
    let cell = |v: Option<T>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        let mut row = vec![r.image_id.clone()];
        if has_psnr {
            row.push(cell(r.psnr));
        }
        if has_ssim {
            row.push(cell(r.ssim));
        }
        let ext: &BTreeMap<String, T> = &r.external;
        row.extend(external.iter().map(|k| cell(ext.get(*k).copied())));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<metrics csv>".into(),
        source,
    })?;
    Ok(())
}
