use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use delentropy::dsp::{classify_profile, profile_histogram, ComplexityClass, MIN_SAMPLES};
use delentropy::entropy::{analyze_image, EntropyConfig, GlcmConfig, GradientRange};
use delentropy::imageio::{load_image, load_mask, parse_manifest, ManifestEntry, SceneManifest};
use delentropy::{ComplexityRecord64, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{kind_code, CliError};
use crate::output::{csv_bytes, emit, json_bytes, num_text, sig12, Num};
use crate::{Format, ProfileArgs};

#[derive(Serialize)]
struct ConfigOut {
    bins: usize,
    blur_kernel: usize,
    blur_sigma: Num,
    sobel_kernel: usize,
    gradient_range: GradientRange,
    glcm_levels: usize,
    glcm_offset: [isize; 2],
    histogram_bins: usize,
}

#[derive(Serialize)]
struct MetaOut {
    resolution: [usize; 2],
    coverage_area_km2: Option<Num>,
    collection_policy: Option<String>,
}

#[derive(Serialize)]
pub(crate) struct RecordOut {
    pub image_id: String,
    pub group: Option<String>,
    pub delentropy: Num,
    pub shannon_entropy: Num,
    pub glcm_entropy: Num,
    pub excluded_fraction: Num,
}

#[derive(Serialize)]
struct EntryError {
    image_id: String,
    message: String,
}

#[derive(Serialize)]
struct ProfileOut {
    scene_id: String,
    n: usize,
    mu: Num,
    sigma: Num,
    alpha: Num,
    beta: Num,
    a: Num,
    b: Num,
    log_likelihood: Num,
    class: ComplexityClass,
}

#[derive(Serialize)]
struct BinOut {
    center: Num,
    count: usize,
    density: Num,
}

#[derive(Serialize)]
struct ProfileReport {
    scene_id: String,
    channel: &'static str,
    config: ConfigOut,
    meta: MetaOut,
    records: Vec<RecordOut>,
    errors: Vec<EntryError>,
    profile: Option<ProfileOut>,
    histogram: Vec<BinOut>,
    warnings: Vec<String>,
}

/// Stable identifiers: the file stem, or the manifest-relative path without
/// extension when stems collide.
fn image_ids(entries: &[ManifestEntry], base: &Path) -> Vec<String> {
    let stem = |p: &Path| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for e in entries {
        *counts.entry(stem(&e.image)).or_default() += 1;
    }
    entries
        .iter()
        .map(|e| {
            let s = stem(&e.image);
            if counts[&s] == 1 {
                return s;
            }
            let rel = e.image.strip_prefix(base).unwrap_or(&e.image).with_extension("");
            rel.components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/")
        })
        .collect()
}

fn analyze_entry(
    id: &str,
    entry: &ManifestEntry,
    manifest: &SceneManifest,
    cfg: &EntropyConfig<f64>,
    glcm: &GlcmConfig,
) -> Result<ComplexityRecord64, Error> {
    let img = load_image::<f64>(&entry.image)?;
    if img.dimensions() != manifest.resolution {
        return Err(Error::Geometry {
            expected: manifest.resolution,
            found: img.dimensions(),
        });
    }
    let mask = match &entry.mask {
        Some(p) => Some(load_mask(p, img.dimensions())?),
        None => None,
    };
    analyze_image(id, &img, mask.as_ref(), cfg, glcm)
}

pub(crate) fn run(args: &ProfileArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = EntropyConfig {
        blur_kernel: args.blur_kernel,
        blur_sigma: args.sigma,
        sobel_kernel: args.sobel_kernel,
        bins: args.bins,
        gradient_range: args.gradient_range.into(),
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let glcm = GlcmConfig {
        levels: args.glcm_levels,
        ..GlcmConfig::default()
    };
    if glcm.levels < 2 {
        return Err(CliError::Usage(format!("GLCM levels must be >= 2, got {}", glcm.levels)));
    }
    if args.hist_bins == 0 {
        return Err(CliError::Usage("histogram bins must be >= 1".into()));
    }

    let manifest = parse_manifest(&args.manifest)?;
    let base = args.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let ids = image_ids(&manifest.entries, &base);

    let pool = crate::pool(args.workers)?;
    let mut results: Vec<(String, Option<String>, Result<ComplexityRecord64, Error>)> = pool.install(|| {
        ids.par_iter()
            .zip(manifest.entries.par_iter())
            .map(|(id, entry)| (id.clone(), entry.group.clone(), analyze_entry(id, entry, &manifest, &cfg, &glcm)))
            .collect()
    });
    results.sort_by(|x, y| x.0.cmp(&y.0));

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut first_error_kind = None;
    for (image_id, group, result) in results {
        match result {
            Ok(r) => records.push(RecordOut {
                image_id,
                group,
                delentropy: Num(sig12(r.delentropy)),
                shannon_entropy: Num(sig12(r.shannon_entropy)),
                glcm_entropy: Num(sig12(r.glcm_entropy)),
                excluded_fraction: Num(sig12(r.excluded_fraction)),
            }),
            Err(e) => {
                first_error_kind.get_or_insert(e.kind());
                errors.push(EntryError {
                    image_id,
                    message: e.to_string(),
                })
            }
        }
    }
    if !errors.is_empty() {
        warnings.push(format!("{} of {} images failed", errors.len(), errors.len() + records.len()));
    }

    // The fit runs on the emitted (rounded) column so that refitting the
    // output reproduces the profile exactly.
    let samples: Vec<f64> = records.iter().map(|r| r.delentropy.0).collect();
    let mut code = 0;
    let mut profile = None;
    let mut histogram = Vec::new();
    if records.is_empty() {
        code = kind_code(first_error_kind.unwrap_or(delentropy::ErrorKind::Data));
    } else if samples.len() < MIN_SAMPLES {
        warnings.push(format!(
            "profile skipped: {} images, the fit needs at least {MIN_SAMPLES}",
            samples.len()
        ));
    } else {
        match profile_histogram(&samples, args.hist_bins, cfg.ceiling()) {
            Ok((p, bins)) => {
                profile = Some(ProfileOut {
                    scene_id: manifest.scene_id.clone(),
                    n: p.n,
                    mu: Num(p.mu),
                    sigma: Num(p.sigma),
                    alpha: Num(p.alpha),
                    beta: Num(p.beta),
                    a: Num(p.a),
                    b: Num(p.b),
                    log_likelihood: Num(p.log_likelihood),
                    class: classify_profile(&p),
                });
                histogram = bins
                    .into_iter()
                    .map(|b| BinOut {
                        center: Num(b.center),
                        count: b.count,
                        density: Num(b.density),
                    })
                    .collect();
            }
            Err(e @ Error::DegenerateScene { .. }) => warnings.push(format!("profile skipped: {e}")),
            Err(e) => {
                code = kind_code(e.kind());
                warnings.push(format!("profile fit failed: {e}"));
            }
        }
    }

    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }

    let bytes = match args.output.format {
        Format::Json => json_bytes(&ProfileReport {
            scene_id: manifest.scene_id.clone(),
            channel: "luma",
            config: ConfigOut {
                bins: cfg.bins,
                blur_kernel: cfg.blur_kernel,
                blur_sigma: Num(cfg.blur_sigma),
                sobel_kernel: cfg.sobel_kernel,
                gradient_range: cfg.gradient_range,
                glcm_levels: glcm.levels,
                glcm_offset: [glcm.offset.0, glcm.offset.1],
                histogram_bins: args.hist_bins,
            },
            meta: MetaOut {
                resolution: [manifest.resolution.0, manifest.resolution.1],
                coverage_area_km2: manifest.coverage_area_km2.map(Num),
                collection_policy: manifest.collection_policy.clone(),
            },
            records,
            errors,
            profile,
            histogram,
            warnings,
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        manifest.scene_id.clone(),
                        r.image_id.clone(),
                        r.group.clone().unwrap_or_default(),
                        num_text(r.delentropy.0),
                        num_text(r.shannon_entropy.0),
                        num_text(r.glcm_entropy.0),
                        num_text(r.excluded_fraction.0),
                    ]
                })
                .collect();
            csv_bytes(
                &[
                    "scene_id",
                    "image_id",
                    "group",
                    "delentropy",
                    "shannon_entropy",
                    "glcm_entropy",
                    "excluded_fraction",
                ],
                &rows,
            )
        }
    };
    emit(args.output.out.as_ref(), &bytes, stdout)?;
    Ok(code)
}
