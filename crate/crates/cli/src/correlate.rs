use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use delentropy::metrics::ingest_metrics_csv;
use delentropy::stats::{correlate, ComplexityMeasure};
use delentropy::QualityRecord64;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::output::{csv_bytes, emit, io_error, json_bytes, num_text, Num};
use crate::{CorrelateArgs, Format, Pooling};

struct ComplexityRow {
    scene: String,
    values: [Option<f64>; 3],
}

#[derive(Serialize)]
struct ReportOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    scene: Option<String>,
    metric: String,
    complexity: ComplexityMeasure,
    pearson_r: Num,
    slope: Num,
    intercept: Num,
    n: usize,
    excluded: usize,
    interval_width_mean: Num,
}

#[derive(Serialize)]
struct SceneMean {
    metric: String,
    complexity: ComplexityMeasure,
    scenes: usize,
    mean_pearson_r: Num,
}

#[derive(Serialize)]
struct Excluded {
    complexity_only: usize,
    quality_only: usize,
}

#[derive(Serialize)]
struct CorrelateReport {
    pooling: Pooling,
    level: Num,
    joined: usize,
    excluded: Excluded,
    reports: Vec<ReportOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scene_means: Option<Vec<SceneMean>>,
    warnings: Vec<String>,
}

fn column_measure(name: &str) -> Option<ComplexityMeasure> {
    match name {
        "delentropy" => Some(ComplexityMeasure::Delentropy),
        "shannon_entropy" | "shannon" => Some(ComplexityMeasure::Shannon),
        "glcm_entropy" | "glcm" => Some(ComplexityMeasure::Glcm),
        _ => None,
    }
}

fn slot(m: ComplexityMeasure) -> usize {
    match m {
        ComplexityMeasure::Delentropy => 0,
        ComplexityMeasure::Shannon => 1,
        ComplexityMeasure::Glcm => 2,
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn json_number(v: &Value, path: &Path, what: &str) -> Result<Option<f64>, CliError> {
    let bad = || CliError::Data(format!("{}: `{what}` is not a number", path.display()));
    match v {
        Value::Null => Ok(None),
        Value::Number(n) => n.as_f64().map(Some).ok_or_else(bad),
        Value::String(s) => match s.trim() {
            "inf" | "+inf" => Ok(Some(f64::INFINITY)),
            "-inf" => Ok(Some(f64::NEG_INFINITY)),
            other => other.parse::<f64>().ok().filter(|x| !x.is_nan()).map(Some).ok_or_else(bad),
        },
        _ => Err(bad()),
    }
}

fn json_records<'a>(doc: &'a Value, path: &Path) -> Result<&'a Vec<Value>, CliError> {
    doc.get("records")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Data(format!("{}: expected an object with a `records` array", path.display())))
}

fn record_id(rec: &Value, path: &Path, i: usize) -> Result<String, CliError> {
    match rec.get("image_id") {
        Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
        _ => Err(CliError::Data(format!("{}: records[{i}] has no image_id", path.display()))),
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn read_complexity(path: &Path, rows: &mut BTreeMap<String, ComplexityRow>) -> Result<(), CliError> {
    let mut insert = |id: String, row: ComplexityRow| {
        if rows.insert(id.clone(), row).is_some() {
            return Err(CliError::Data(format!("duplicate image id `{id}` in complexity input")));
        }
        Ok(())
    };
    if is_json(path) {
        let doc = read_json(path)?;
        let scene = doc
            .get("scene_id")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .unwrap_or_else(|| file_stem(path));
        for (i, rec) in json_records(&doc, path)?.iter().enumerate() {
            let id = record_id(rec, path, i)?;
            let mut values = [None; 3];
            for m in ComplexityMeasure::ALL {
                let key = match m {
                    ComplexityMeasure::Delentropy => "delentropy",
                    ComplexityMeasure::Shannon => "shannon_entropy",
                    ComplexityMeasure::Glcm => "glcm_entropy",
                };
                if let Some(v) = rec.get(key) {
                    values[slot(m)] = json_number(v, path, key)?;
                }
            }
            insert(id, ComplexityRow { scene: scene.clone(), values })?;
        }
        return Ok(());
    }

    let data = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(data)?;
    let header = reader.headers().map_err(data)?.clone();
    let id_col = header
        .iter()
        .position(|h| h == "image_id")
        .ok_or_else(|| CliError::Data(format!("{}: missing `image_id` column", path.display())))?;
    let scene_col = header.iter().position(|h| h == "scene_id");
    let measure_cols: Vec<(usize, ComplexityMeasure)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| column_measure(h).map(|m| (i, m)))
        .collect();
    if measure_cols.is_empty() {
        return Err(CliError::Data(format!("{}: no complexity columns", path.display())));
    }
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(data)?;
        let id = rec.get(id_col).unwrap_or("").to_owned();
        if id.is_empty() {
            return Err(CliError::Data(format!("{}: empty image_id at line {}", path.display(), line + 2)));
        }
        let scene = scene_col
            .and_then(|c| rec.get(c))
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .unwrap_or_else(|| file_stem(path));
        let mut values = [None; 3];
        for &(c, m) in &measure_cols {
            let cell = rec.get(c).unwrap_or("");
            if cell.is_empty() {
                continue;
            }
            let v = cell.parse::<f64>().ok().filter(|v| !v.is_nan()).ok_or_else(|| {
                CliError::Data(format!(
                    "{}: line {}, column `{}`: `{cell}` is not a number",
                    path.display(),
                    line + 2,
                    &header[c]
                ))
            })?;
            values[slot(m)] = Some(v);
        }
        insert(id, ComplexityRow { scene, values })?;
    }
    Ok(())
}

fn read_quality(path: &Path, rows: &mut BTreeMap<String, QualityRecord64>) -> Result<(), CliError> {
    let records: Vec<QualityRecord64> = if is_json(path) {
        let doc = read_json(path)?;
        let mut out = Vec::new();
        for (i, rec) in json_records(&doc, path)?.iter().enumerate() {
            let mut q = QualityRecord64 {
                image_id: record_id(rec, path, i)?,
                ..Default::default()
            };
            for (key, v) in rec.as_object().into_iter().flatten() {
                if key == "image_id" {
                    continue;
                }
                let Some(v) = json_number(v, path, key)? else { continue };
                match key.as_str() {
                    "psnr" => q.psnr = Some(v),
                    "ssim" => q.ssim = Some(v),
                    _ => {
                        q.external.insert(key.clone(), v);
                    }
                }
            }
            out.push(q);
        }
        out
    } else {
        ingest_metrics_csv(path)?
    };
    for q in records {
        let id = q.image_id.clone();
        if rows.insert(id.clone(), q).is_some() {
            return Err(CliError::Data(format!("duplicate image id `{id}` in quality input")));
        }
    }
    Ok(())
}

fn preview<'a>(ids: impl Iterator<Item = &'a String>) -> String {
    let ids: Vec<&String> = ids.collect();
    let mut text = ids.iter().take(5).map(|s| s.as_str()).collect::<Vec<_>>().join(", ");
    if ids.len() > 5 {
        text.push_str(&format!(" (+{} more)", ids.len() - 5));
    }
    text
}

pub(crate) fn run(args: &CorrelateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::Usage(format!("interval level {} outside (0, 1)", args.level)));
    }
    let mut complexity = BTreeMap::new();
    for p in &args.complexity {
        read_complexity(p, &mut complexity)?;
    }
    let mut quality = BTreeMap::new();
    for p in &args.quality {
        read_quality(p, &mut quality)?;
    }

    let joined: Vec<(&String, &ComplexityRow, &QualityRecord64)> = complexity
        .iter()
        .filter_map(|(id, c)| quality.get(id).map(|q| (id, c, q)))
        .collect();
    if joined.is_empty() {
        return Err(CliError::Data(format!(
            "no image ids in common; complexity ids: {}; quality ids: {}",
            preview(complexity.keys()),
            preview(quality.keys())
        )));
    }
    let excluded = Excluded {
        complexity_only: complexity.len() - joined.len(),
        quality_only: quality.len() - joined.len(),
    };

    let mut metrics: Vec<String> = Vec::new();
    if joined.iter().any(|(_, _, q)| q.psnr.is_some()) {
        metrics.push("psnr".into());
    }
    if joined.iter().any(|(_, _, q)| q.ssim.is_some()) {
        metrics.push("ssim".into());
    }
    let external: BTreeSet<&String> = joined.iter().flat_map(|(_, _, q)| q.external.keys()).collect();
    metrics.extend(external.into_iter().cloned());
    let measures: Vec<ComplexityMeasure> = ComplexityMeasure::ALL
        .into_iter()
        .filter(|&m| joined.iter().any(|(_, c, _)| c.values[slot(m)].is_some()))
        .collect();

    let mut groups: BTreeMap<Option<&str>, Vec<usize>> = BTreeMap::new();
    for (i, (_, c, _)) in joined.iter().enumerate() {
        let key = match args.pooling {
            Pooling::Pooled => None,
            Pooling::PerScene => Some(c.scene.as_str()),
        };
        groups.entry(key).or_default().push(i);
    }

    let mut warnings = Vec::new();
    let mut reports = Vec::new();
    for (scene, members) in &groups {
        for &m in &measures {
            for metric in &metrics {
                let (mut x, mut y) = (Vec::new(), Vec::new());
                for &i in members {
                    let (_, c, q) = joined[i];
                    if let (Some(a), Some(b)) = (c.values[slot(m)], q.metric(metric)) {
                        if a.is_finite() && b.is_finite() {
                            x.push(a);
                            y.push(b);
                        }
                    }
                }
                let label = match scene {
                    Some(s) => format!("{} vs {metric} in scene {s}", m.name()),
                    None => format!("{} vs {metric}", m.name()),
                };
                match correlate(metric.as_str(), m, &x, &y, args.level) {
                    Ok(r) => reports.push(ReportOut {
                        scene: scene.map(str::to_owned),
                        metric: metric.clone(),
                        complexity: m,
                        pearson_r: Num(r.pearson_r),
                        slope: Num(r.model.slope),
                        intercept: Num(r.model.intercept),
                        n: r.model.n,
                        excluded: members.len() - x.len(),
                        interval_width_mean: Num(r.interval_width_mean),
                    }),
                    Err(e) => warnings.push(format!("skipped {label}: {e}")),
                }
            }
        }
    }
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if reports.is_empty() {
        return Err(CliError::Data(format!(
            "no complexity/metric pairing could be correlated over {} joined rows",
            joined.len()
        )));
    }

    let scene_means = (args.pooling == Pooling::PerScene).then(|| {
        let mut acc: BTreeMap<(ComplexityMeasure, &str), Vec<f64>> = BTreeMap::new();
        for r in &reports {
            acc.entry((r.complexity, r.metric.as_str())).or_default().push(r.pearson_r.0);
        }
        acc.into_iter()
            .map(|((complexity, metric), rs)| SceneMean {
                metric: metric.to_owned(),
                complexity,
                scenes: rs.len(),
                mean_pearson_r: Num(rs.iter().sum::<f64>() / rs.len() as f64),
            })
            .collect()
    });

    let bytes = match args.output.format {
        Format::Json => json_bytes(&CorrelateReport {
            pooling: args.pooling,
            level: Num(args.level),
            joined: joined.len(),
            excluded,
            reports,
            scene_means,
            warnings,
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.scene.clone().unwrap_or_default(),
                        r.metric.clone(),
                        r.complexity.name().to_owned(),
                        num_text(r.pearson_r.0),
                        num_text(r.slope.0),
                        num_text(r.intercept.0),
                        r.n.to_string(),
                        r.excluded.to_string(),
                        num_text(r.interval_width_mean.0),
                    ]
                })
                .collect();
            csv_bytes(
                &[
                    "scene",
                    "metric",
                    "complexity",
                    "pearson_r",
                    "slope",
                    "intercept",
                    "n",
                    "excluded",
                    "interval_width_mean",
                ],
                &rows,
            )
        }
    };
    emit(args.output.out.as_ref(), &bytes, stdout)?;
    Ok(0)
}
