//! Baseline complexity measures: first-order pixel entropy and gray-level
//! co-occurrence (GLCM) texture entropy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::{GrayImage, Mask};
use crate::scalar::Real;

fn entropy_of_counts<T: Real>(counts: &[u64]) -> Result<T> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptySupport);
    }
    let n = T::from_u64(total).unwrap();
    let mut h = T::zero();
    for &c in counts.iter().filter(|&&c| c > 0) {
        let p = T::from_u64(c).unwrap() / n;
        h -= p * p.log2();
    }
    Ok(h.max(T::zero()))
}

/// Shannon entropy of the intensity histogram, one bin per representable
/// level. Non-integer samples are rounded to the nearest level.
pub fn shannon_pixel_entropy<T: Real>(img: &GrayImage<T>, mask: Option<&Mask>) -> Result<T> {
    if let Some(m) = mask {
        m.check_dimensions(img.dimensions())?;
    }
    let levels = img.bitdepth().levels();
    let mut counts = vec![0u64; levels];
    for (i, &v) in img.data().iter().enumerate() {
        if mask.is_some_and(|m| m.is_excluded(i)) {
            continue;
        }
        let level = v.round().to_usize().unwrap_or(0).min(levels - 1);
        counts[level] += 1;
    }
    entropy_of_counts(&counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlcmConfig {
    pub levels: usize,
    /// `(row, column)` displacement of the second pixel of each pair.
    pub offset: (isize, isize),
}

impl Default for GlcmConfig {
    fn default() -> Self {
        Self {
            levels: 32,
            offset: (0, 1),
        }
    }
}

/// Entropy of the symmetric, normalized co-occurrence matrix of quantized
/// gray levels for pixel pairs `(p, p + offset)` with both pixels included.
pub fn glcm_texture_entropy<T: Real>(img: &GrayImage<T>, mask: Option<&Mask>, cfg: &GlcmConfig) -> Result<T> {
    let levels = cfg.levels;
    if levels < 2 {
        return Err(Error::Config(format!("GLCM levels must be >= 2, got {levels}")));
    }
    let (w, h) = img.dimensions();
    let (dr, dc) = cfg.offset;
    if dr.unsigned_abs() >= h || dc.unsigned_abs() >= w {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min_width: dc.unsigned_abs() + 1,
            min_height: dr.unsigned_abs() + 1,
        });
    }
    if let Some(m) = mask {
        m.check_dimensions(img.dimensions())?;
    }

    let scale = T::from_count(levels) / (img.max_value() + T::one());
    let quantized: Vec<u32> = img
        .data()
        .iter()
        // samples are nonnegative, so truncation is floor
        .map(|&v| (v * scale).to_u32().unwrap_or(0).min(levels as u32 - 1))
        .collect();

    // Ordered pair counts; the symmetric matrix is `m + m^T`.
    let mut ordered = vec![0u64; levels * levels];
    let rows = if dr >= 0 { 0..h - dr as usize } else { (-dr) as usize..h };
    let (c0, c1) = if dc >= 0 { (0, w - dc as usize) } else { ((-dc) as usize, w) };
    for r in rows {
        let first = r * w + c0;
        let second = ((r as isize + dr) * w as isize + c0 as isize + dc) as usize;
        let len = c1 - c0;
        let a = &quantized[first..first + len];
        let b = &quantized[second..second + len];
        match mask {
            None => {
                for (&x, &y) in a.iter().zip(b) {
                    ordered[x as usize * levels + y as usize] += 1;
                }
            }
            Some(m) => {
                let ma = &m.data()[first..first + len];
                let mb = &m.data()[second..second + len];
                for (((&x, &y), &ex), &ey) in a.iter().zip(b).zip(ma).zip(mb) {
                    if !ex && !ey {
                        ordered[x as usize * levels + y as usize] += 1;
                    }
                }
            }
        }
    }
    let mut counts = vec![0u64; levels * levels];
    for i in 0..levels {
        for j in 0..levels {
            counts[i * levels + j] = ordered[i * levels + j] + ordered[j * levels + i];
        }
    }
    entropy_of_counts(&counts)
}
