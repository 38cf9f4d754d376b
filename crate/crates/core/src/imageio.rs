//! Raster decoding, binary masks and scene manifests.
//!
//! Colour inputs are reduced to luminance with fixed BT.601 weights and kept
//! at their native bit depth; nothing is rescaled or rounded.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use image::DynamicImage;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// BT.601 luma weights for (R, G, B).
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    /// Largest representable sample, `2^bits - 1`.
    pub fn max_value(self) -> u32 {
        (1u32 << self.bits()) - 1
    }

    pub fn levels(self) -> usize {
        1usize << self.bits()
    }
}

/// Single-channel raster in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T> {
    width: usize,
    height: usize,
    bitdepth: BitDepth,
    data: Vec<T>,
}

impl<T: Real> GrayImage<T> {
    /// Builds an image, checking the buffer length and that every sample
    /// lies within `[0, 2^bits - 1]`.
    pub fn new(width: usize, height: usize, bitdepth: BitDepth, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::TooSmall {
                width,
                height,
                min_width: 1,
                min_height: 1,
            });
        }
        if data.len() != width * height {
            return Err(Error::LengthMismatch(data.len(), width * height));
        }
        let max = T::from_u32(bitdepth.max_value()).unwrap();
        if let Some(index) = data.iter().position(|&v| !(v >= T::zero() && v <= max)) {
            return Err(Error::ValueRange {
                index,
                value: data[index].as_f64(),
                max: max.as_f64(),
            });
        }
        Ok(Self {
            width,
            height,
            bitdepth,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        bitdepth: BitDepth,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, bitdepth, data)
    }

    pub fn filled(width: usize, height: usize, bitdepth: BitDepth, value: T) -> Result<Self> {
        Self::new(width, height, bitdepth, vec![value; width * height])
    }

    /// Constructor for values derived from an already valid image (convex
    /// combinations stay in range).
    pub(crate) fn from_parts(width: usize, height: usize, bitdepth: BitDepth, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            bitdepth,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bitdepth(&self) -> BitDepth {
        self.bitdepth
    }

    pub fn max_value(&self) -> T {
        T::from_u32(self.bitdepth.max_value()).unwrap()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.width {
            for r in 0..self.height {
                data.push(self.get(r, c));
            }
        }
        Self::from_parts(self.height, self.width, self.bitdepth, data)
    }

    pub fn rotate180(&self) -> Self {
        let mut data = self.data.clone();
        data.reverse();
        Self::from_parts(self.width, self.height, self.bitdepth, data)
    }

    pub fn flip_horizontal(&self) -> Self {
        let mut data = self.data.clone();
        for row in data.chunks_mut(self.width) {
            row.reverse();
        }
        Self::from_parts(self.width, self.height, self.bitdepth, data)
    }
}

/// Per-pixel exclusion flags; `true` marks a pixel left out of the analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::LengthMismatch(data.len(), width * height));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Mask excluding nothing.
    pub fn none(width: usize, height: usize) -> Self {
        Self::from_fn(width, height, |_, _| false)
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn is_excluded(&self, index: usize) -> bool {
        self.data[index]
    }

    pub fn excluded_count(&self) -> usize {
        self.data.iter().filter(|&&x| x).count()
    }

    pub fn excluded_fraction(&self) -> f64 {
        self.excluded_count() as f64 / self.data.len() as f64
    }

    pub fn check_dimensions(&self, expected: (usize, usize)) -> Result<()> {
        if self.dimensions() != expected {
            return Err(Error::Geometry {
                expected,
                found: self.dimensions(),
            });
        }
        Ok(())
    }

    /// 8-bit raster with 255 for excluded pixels and 0 elsewhere.
    pub fn to_raster(&self) -> image::GrayImage {
        let bytes = self.data.iter().map(|&x| if x { 255 } else { 0 }).collect();
        image::GrayImage::from_raw(self.width as u32, self.height as u32, bytes)
            .expect("buffer length matches dimensions")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_raster().save(path).map_err(|e| Error::Decode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Weighted luminance of an RGB triple. Equal channels are returned unchanged.
#[inline]
pub fn luminance<T: Real>(r: T, g: T, b: T) -> T {
    // Expressed relative to G so that r == g == b is an exact fixed point.
    let y = g + T::lit(LUMA_WEIGHTS[0]) * (r - g) + T::lit(LUMA_WEIGHTS[2]) * (b - g);
    y.max(T::zero())
}

fn decode(path: &Path) -> Result<DynamicImage> {
    let reader = image::ImageReader::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = reader.with_guessed_format().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    reader.decode().map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::Format {
            path: path.to_path_buf(),
            format: u.to_string(),
        },
        other => Error::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

fn gray_from_dynamic<T: Real>(img: &DynamicImage, path: &Path) -> Result<GrayImage<T>> {
    let (width, height) = (img.width() as usize, img.height() as usize);
    let from_rgb = |px: &[T]| luminance(px[0], px[1], px[2]);
    let (bitdepth, data): (BitDepth, Vec<T>) = match img {
        DynamicImage::ImageLuma8(buf) => (BitDepth::Eight, buf.iter().map(|&v| T::from_u8(v).unwrap()).collect()),
        DynamicImage::ImageLumaA8(buf) => (
            BitDepth::Eight,
            buf.chunks_exact(2).map(|p| T::from_u8(p[0]).unwrap()).collect(),
        ),
        DynamicImage::ImageRgb8(buf) => (BitDepth::Eight, rgb_rows(buf.as_raw(), 3, from_rgb)),
        DynamicImage::ImageRgba8(buf) => (BitDepth::Eight, rgb_rows(buf.as_raw(), 4, from_rgb)),
        DynamicImage::ImageLuma16(buf) => (
            BitDepth::Sixteen,
            buf.iter().map(|&v| T::from_u16(v).unwrap()).collect(),
        ),
        DynamicImage::ImageLumaA16(buf) => (
            BitDepth::Sixteen,
            buf.chunks_exact(2).map(|p| T::from_u16(p[0]).unwrap()).collect(),
        ),
        DynamicImage::ImageRgb16(buf) => (BitDepth::Sixteen, rgb_rows(buf.as_raw(), 3, from_rgb)),
        DynamicImage::ImageRgba16(buf) => (BitDepth::Sixteen, rgb_rows(buf.as_raw(), 4, from_rgb)),
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                format: format!("{:?}", other.color()),
            })
        }
    };
    let max = T::from_u32(bitdepth.max_value()).unwrap();
    let data = data.into_iter().map(|v| v.min(max)).collect();
    Ok(GrayImage::from_parts(width, height, bitdepth, data))
}

fn rgb_rows<S, T>(raw: &[S], channels: usize, f: impl Fn(&[T]) -> T) -> Vec<T>
where
    S: Copy + Into<u32>,
    T: Real,
{
    let mut px = [T::zero(); 3];
    raw.chunks_exact(channels)
        .map(|p| {
            for (dst, &src) in px.iter_mut().zip(p) {
                *dst = T::from_u32(src.into()).unwrap();
            }
            f(&px)
        })
        .collect()
}

/// Decodes a PNG or JPEG file into a luminance raster at native bit depth.
pub fn load_image<T: Real>(path: impl AsRef<Path>) -> Result<GrayImage<T>> {
    let path = path.as_ref();
    let img = decode(path)?;
    gray_from_dynamic(&img, path)
}

/// Decodes a mask raster; any nonzero sample marks the pixel as excluded.
pub fn load_mask(path: impl AsRef<Path>, expected: (usize, usize)) -> Result<Mask> {
    let path = path.as_ref();
    let img = decode(path)?;
    let found = (img.width() as usize, img.height() as usize);
    if found != expected {
        return Err(Error::Geometry { expected, found });
    }
    let channels = img.color().channel_count() as usize;
    let data = match img {
        DynamicImage::ImageLuma8(_) | DynamicImage::ImageLumaA8(_) | DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => {
            let bytes = img.into_bytes();
            bytes
                .chunks_exact(channels)
                .map(|p| p.iter().any(|&v| v != 0))
                .collect()
        }
        other => {
            let wide = other.into_rgba16();
            wide.pixels().map(|p| p.0.iter().take(3).any(|&v| v != 0)).collect()
        }
    };
    Mask::new(expected.0, expected.1, data)
}

/// Acquisition metadata used for cross-scene comparability checks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SceneMeta {
    pub resolution: Option<(usize, usize)>,
    pub coverage_area_km2: Option<f64>,
    pub collection_policy: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub image: PathBuf,
    pub mask: Option<PathBuf>,
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneManifest {
    pub scene_id: String,
    pub entries: Vec<ManifestEntry>,
    pub resolution: (usize, usize),
    pub coverage_area_km2: Option<f64>,
    pub collection_policy: Option<String>,
}

impl SceneManifest {
    pub fn meta(&self) -> SceneMeta {
        SceneMeta {
            resolution: Some(self.resolution),
            coverage_area_km2: self.coverage_area_km2,
            collection_policy: self.collection_policy.clone(),
        }
    }
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn optional_str(obj: &serde_json::Map<String, Value>, key: &str, field: &str) -> Result<Option<String>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(schema(field, "expected a string or null")),
    }
}

/// Parses and validates a scene manifest from JSON text. Relative paths are
/// resolved against `base_dir`.
pub fn parse_manifest_str(text: &str, base_dir: &Path) -> Result<SceneManifest> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema("<document>", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema("<document>", "expected a JSON object"))?;

    let scene_id = match obj.get("scene_id") {
        Some(Value::String(s)) if !s.is_empty() => s.clone(),
        Some(_) => return Err(schema("scene_id", "expected a non-empty string")),
        None => return Err(schema("scene_id", "missing required field")),
    };

    let resolution = match obj.get("resolution") {
        Some(Value::Array(dims)) if dims.len() == 2 => {
            let dim = |i: usize| {
                dims[i]
                    .as_u64()
                    .filter(|&v| v > 0)
                    .map(|v| v as usize)
                    .ok_or_else(|| schema(format!("resolution[{i}]"), "expected a positive integer"))
            };
            (dim(0)?, dim(1)?)
        }
        Some(_) => return Err(schema("resolution", "expected [width, height]")),
        None => return Err(schema("resolution", "missing required field")),
    };

    let coverage_area_km2 = match obj.get("coverage_area_km2") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_f64()
                .filter(|a| *a > 0.0 && a.is_finite())
                .ok_or_else(|| schema("coverage_area_km2", "expected a positive number or null"))?,
        ),
    };
    let collection_policy = optional_str(obj, "collection_policy", "collection_policy")?;

    let raw_entries = match obj.get("entries") {
        Some(Value::Array(list)) => list,
        Some(_) => return Err(schema("entries", "expected an array")),
        None => return Err(schema("entries", "missing required field")),
    };
    if raw_entries.is_empty() {
        return Err(schema("entries", "entry list is empty"));
    }

    let resolve = |p: &str| {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base_dir.join(p)
        }
    };

    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(raw_entries.len());
    for (i, raw) in raw_entries.iter().enumerate() {
        let entry = raw
            .as_object()
            .ok_or_else(|| schema(format!("entries[{i}]"), "expected an object"))?;
        let image = match entry.get("image") {
            Some(Value::String(s)) if !s.is_empty() => resolve(s),
            Some(_) => return Err(schema(format!("entries[{i}].image"), "expected a non-empty string")),
            None => return Err(schema(format!("entries[{i}].image"), "missing required field")),
        };
        if !seen.insert(image.clone()) {
            return Err(schema(
                format!("entries[{i}].image"),
                format!("duplicate image path {}", image.display()),
            ));
        }
        let mask = optional_str(entry, "mask", &format!("entries[{i}].mask"))?.map(|s| resolve(&s));
        let group = optional_str(entry, "group", &format!("entries[{i}].group"))?;
        entries.push(ManifestEntry { image, mask, group });
    }

    Ok(SceneManifest {
        scene_id,
        entries,
        resolution,
        coverage_area_km2,
        collection_policy,
    })
}

/// Reads a manifest file; relative entry paths resolve against its directory.
pub fn parse_manifest(path: impl AsRef<Path>) -> Result<SceneManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest_str(&text, base)
}
