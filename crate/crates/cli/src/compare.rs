use std::io::Write;
use std::path::Path;

use delentropy::dsp::{check_comparability, classify, ComparabilityWarning, ComplexityClass};
use delentropy::imageio::SceneMeta;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::output::{csv_bytes, emit, io_error, json_bytes, num_text, opt_text, Num};
use crate::{CompareArgs, Format};

struct Side {
    scene_id: Option<String>,
    mu: f64,
    sigma: f64,
    alpha: f64,
    beta: f64,
    meta: SceneMeta,
}

#[derive(Serialize)]
struct SideOut {
    scene_id: Option<String>,
    mu: Num,
    sigma: Num,
    alpha: Num,
    beta: Num,
    class: ComplexityClass,
}

#[derive(Serialize)]
struct Deltas {
    mu: Num,
    sigma: Num,
    alpha: Num,
    beta: Num,
}

#[derive(Serialize)]
struct ClassChanges {
    level: bool,
    skew: bool,
    modality: bool,
}

#[derive(Serialize)]
struct ComparabilityOut {
    resolution_ratio: Option<Num>,
    extent_ratio: Option<Num>,
    policy_match: Option<bool>,
    warnings: Vec<ComparabilityWarning>,
}

#[derive(Serialize)]
struct CompareReport {
    a: SideOut,
    b: SideOut,
    /// `b - a`.
    deltas: Deltas,
    class_differs: ClassChanges,
    comparability: ComparabilityOut,
    warnings: Vec<String>,
}

/// Accepts either a `profile` command report or a bare profile object.
fn read_side(path: &Path, warnings: &mut Vec<String>) -> Result<Side, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let profile = match doc.get("profile") {
        Some(Value::Null) => {
            return Err(CliError::Data(format!("{}: the report carries no fitted profile", path.display())))
        }
        Some(p) => p,
        None => &doc,
    };
    let field = |key: &str| {
        profile
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| CliError::Data(format!("{}: profile field `{key}` missing or not a number", path.display())))
    };
    let meta = match doc.get("meta") {
        None | Some(Value::Null) => SceneMeta::default(),
        Some(m) => {
            let resolution = m
                .get("resolution")
                .and_then(Value::as_array)
                .filter(|d| d.len() == 2)
                .and_then(|d| Some((d[0].as_u64()? as usize, d[1].as_u64()? as usize)));
            if m.get("resolution").is_some_and(|r| !r.is_null()) && resolution.is_none() {
                warnings.push(format!("{}: unreadable resolution ignored", path.display()));
            }
            SceneMeta {
                resolution,
                coverage_area_km2: m.get("coverage_area_km2").and_then(Value::as_f64),
                collection_policy: m.get("collection_policy").and_then(Value::as_str).map(str::to_owned),
            }
        }
    };
    Ok(Side {
        scene_id: profile
            .get("scene_id")
            .or_else(|| doc.get("scene_id"))
            .and_then(Value::as_str)
            .map(str::to_owned),
        mu: field("mu")?,
        sigma: field("sigma")?,
        alpha: field("alpha")?,
        beta: field("beta")?,
        meta,
    })
}

fn side_out(s: &Side) -> SideOut {
    SideOut {
        scene_id: s.scene_id.clone(),
        mu: Num(s.mu),
        sigma: Num(s.sigma),
        alpha: Num(s.alpha),
        beta: Num(s.beta),
        class: classify(s.mu, s.alpha, s.beta),
    }
}

pub(crate) fn run(args: &CompareArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let mut warnings = Vec::new();
    let a = read_side(&args.profile_a, &mut warnings)?;
    let b = read_side(&args.profile_b, &mut warnings)?;
    let (oa, ob) = (side_out(&a), side_out(&b));
    let comp = check_comparability(&a.meta, &b.meta);
    for w in &comp.warnings {
        warnings.push(format!("{w}: profiles may not be comparable"));
    }
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let class_differs = ClassChanges {
        level: oa.class.level != ob.class.level,
        skew: oa.class.skew != ob.class.skew,
        modality: oa.class.modality != ob.class.modality,
    };
    let deltas = Deltas {
        mu: Num(b.mu - a.mu),
        sigma: Num(b.sigma - a.sigma),
        alpha: Num(b.alpha - a.alpha),
        beta: Num(b.beta - a.beta),
    };

    let bytes = match args.output.format {
        Format::Json => json_bytes(&CompareReport {
            a: oa,
            b: ob,
            deltas,
            class_differs,
            comparability: ComparabilityOut {
                resolution_ratio: comp.resolution_ratio.map(Num),
                extent_ratio: comp.extent_ratio.map(Num),
                policy_match: comp.policy_match,
                warnings: comp.warnings,
            },
            warnings,
        }),
        Format::Csv => {
            let row = vec![
                oa.scene_id.clone().unwrap_or_default(),
                ob.scene_id.clone().unwrap_or_default(),
                num_text(deltas.mu.0),
                num_text(deltas.sigma.0),
                num_text(deltas.alpha.0),
                num_text(deltas.beta.0),
                class_differs.level.to_string(),
                class_differs.skew.to_string(),
                class_differs.modality.to_string(),
                opt_text(comp.resolution_ratio),
                opt_text(comp.extent_ratio),
                comp.policy_match.map(|m| m.to_string()).unwrap_or_default(),
                comp.warnings.iter().map(|w| w.code()).collect::<Vec<_>>().join(";"),
            ];
            csv_bytes(
                &[
                    "scene_a",
                    "scene_b",
                    "delta_mu",
                    "delta_sigma",
                    "delta_alpha",
                    "delta_beta",
                    "level_differs",
                    "skew_differs",
                    "modality_differs",
                    "resolution_ratio",
                    "extent_ratio",
                    "policy_match",
                    "warnings",
                ],
                &[row],
            )
        }
    };
    emit(args.output.out.as_ref(), &bytes, stdout)?;
    Ok(0)
}
