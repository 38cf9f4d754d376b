use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use delentropy::imageio::load_image;
use delentropy::metrics::compare_images;
use delentropy::{Error, QualityRecord64};
use glob::{MatchOptions, Pattern};
use rayon::prelude::*;
use serde::Serialize;
use walkdir::WalkDir;

use crate::error::{kind_code, CliError};
use crate::output::{csv_bytes, emit, json_bytes, opt_text, Num};
use crate::{Format, MetricsArgs};

#[derive(Serialize)]
struct RecordOut {
    image_id: String,
    psnr: Option<Num>,
    ssim: Option<Num>,
}

#[derive(Serialize)]
struct PairError {
    image_id: String,
    message: String,
}

#[derive(Serialize)]
struct MetricsReport {
    channel: &'static str,
    records: Vec<RecordOut>,
    errors: Vec<PairError>,
    warnings: Vec<String>,
}

fn rel_text(rel: &Path) -> String {
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Files under `root` whose root-relative path matches `pattern`, keyed by
/// that path with `/` separators.
fn collect(root: &Path, pattern: &Pattern) -> Result<BTreeMap<String, PathBuf>, CliError> {
    if !root.is_dir() {
        return Err(CliError::Data(format!("{} is not a directory", root.display())));
    }
    let opts = MatchOptions {
        case_sensitive: true,
        require_literal_separator: false,
        require_literal_leading_dot: false,
    };
    let mut found = BTreeMap::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| CliError::Data(format!("failed to list {}: {e}", root.display())))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).expect("walk stays under its root");
        if pattern.matches_path_with(rel, opts) {
            found.insert(rel_text(rel), entry.path().to_path_buf());
        }
    }
    Ok(found)
}

fn measure(id: &str, gt: &Path, render: &Path) -> Result<QualityRecord64, Error> {
    let reference = load_image::<f64>(gt)?;
    let test = load_image::<f64>(render)?;
    compare_images(id, &reference, &test)
}

pub(crate) fn run(args: &MetricsArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let pattern = Pattern::new(&args.pattern)
        .map_err(|e| CliError::Usage(format!("invalid pattern `{}`: {e}", args.pattern)))?;
    let gt = collect(&args.gt, &pattern)?;
    let render = collect(&args.render, &pattern)?;

    let mut warnings = Vec::new();
    for rel in gt.keys().filter(|k| !render.contains_key(*k)) {
        warnings.push(format!("unmatched ground-truth file: {rel}"));
    }
    for rel in render.keys().filter(|k| !gt.contains_key(*k)) {
        warnings.push(format!("unmatched rendered file: {rel}"));
    }
    let matched: Vec<&String> = gt.keys().filter(|k| render.contains_key(*k)).collect();
    if matched.is_empty() {
        for w in &warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        return Err(CliError::Data(format!(
            "no files matching `{}` exist in both {} and {}",
            args.pattern,
            args.gt.display(),
            args.render.display()
        )));
    }

    // Ids drop the extension unless that would merge two files.
    let stripped = |rel: &str| rel_text(&Path::new(rel).with_extension(""));
    let mut counts: HashMap<String, usize> = HashMap::new();
    for rel in &matched {
        *counts.entry(stripped(rel)).or_default() += 1;
    }
    let pairs: Vec<(String, &PathBuf, &PathBuf)> = matched
        .iter()
        .map(|rel| {
            let id = stripped(rel);
            let id = if counts[&id] == 1 { id } else { (*rel).clone() };
            (id, &gt[*rel], &render[*rel])
        })
        .collect();

    let pool = crate::pool(args.workers)?;
    let mut results: Vec<(String, Result<QualityRecord64, Error>)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(id, g, r)| (id.clone(), measure(id, g, r)))
            .collect()
    });
    results.sort_by(|x, y| x.0.cmp(&y.0));

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut first_error_kind = None;
    for (image_id, result) in results {
        match result {
            Ok(q) => records.push(RecordOut {
                image_id,
                psnr: q.psnr.map(Num),
                ssim: q.ssim.map(Num),
            }),
            Err(e) => {
                first_error_kind.get_or_insert(e.kind());
                errors.push(PairError {
                    image_id,
                    message: e.to_string(),
                });
            }
        }
    }
    if !errors.is_empty() {
        warnings.push(format!("{} of {} pairs failed", errors.len(), errors.len() + records.len()));
    }
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let code = match first_error_kind {
        Some(kind) if records.is_empty() => kind_code(kind),
        _ => 0,
    };

    let bytes = match args.output.format {
        Format::Json => json_bytes(&MetricsReport {
            channel: "luma",
            records,
            errors,
            warnings,
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.image_id.clone(),
                        opt_text(r.psnr.map(|v| v.0)),
                        opt_text(r.ssim.map(|v| v.0)),
                    ]
                })
                .collect();
            csv_bytes(&["image_id", "psnr", "ssim"], &rows)
        }
    };
    emit(args.output.out.as_ref(), &bytes, stdout)?;
    Ok(code)
}
