use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::entropy::gaussian_half_kernel;
use crate::error::{Error, Result};
use crate::imageio::GrayImage;
use crate::scalar::Real;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QualityRecord<T> {
    pub image_id: String,
    /// Decibels; `+inf` for identical frames.
    pub psnr: Option<T>,
    pub ssim: Option<T>,
    /// Metrics computed elsewhere, keyed by column name (e.g. `lpips`).
    pub external: BTreeMap<String, T>,
}

impl<T: Real> QualityRecord<T> {
    /// Looks a metric up by name across the built-in and external columns.
    pub fn metric(&self, name: &str) -> Option<T> {
        match name {
            "psnr" => self.psnr,
            "ssim" => self.ssim,
            _ => self.external.get(name).copied(),
        }
    }
}

fn check_pair<T: Real>(reference: &GrayImage<T>, test: &GrayImage<T>) -> Result<()> {
    if reference.dimensions() != test.dimensions() {
        return Err(Error::Geometry {
            expected: reference.dimensions(),
            found: test.dimensions(),
        });
    }
    if reference.bitdepth() != test.bitdepth() {
        return Err(Error::BitDepthMismatch(reference.bitdepth().bits(), test.bitdepth().bits()));
    }
    Ok(())
}

/// Peak signal-to-noise ratio, `10 log10(MAX^2 / MSE)`.
pub fn psnr<T: Real>(reference: &GrayImage<T>, test: &GrayImage<T>) -> Result<T> {
    check_pair(reference, test)?;
    let mut sse = T::zero();
    for (&a, &b) in reference.data().iter().zip(test.data()) {
        let d = a - b;
        sse += d * d;
    }
    if sse == T::zero() {
        return Ok(T::infinity());
    }
    let mse = sse / T::from_count(reference.data().len());
    let max = reference.max_value();
    Ok(T::lit(10.0) * (max * max / mse).log10())
}

/// Mean structural similarity over every fully contained 11x11 Gaussian
/// window (sigma 1.5), with `C1 = (0.01 MAX)^2` and `C2 = (0.03 MAX)^2`.
pub fn ssim<T: Real>(reference: &GrayImage<T>, test: &GrayImage<T>) -> Result<T> {
    check_pair(reference, test)?;
    let (w, h) = reference.dimensions();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min_width: SSIM_WINDOW,
            min_height: SSIM_WINDOW,
        });
    }
    let half = gaussian_half_kernel::<T>(SSIM_WINDOW, T::lit(SSIM_SIGMA))?;
    let p = SSIM_WINDOW / 2;
    let kernel: Vec<T> = (0..SSIM_WINDOW).map(|j| half[j.abs_diff(p)]).collect();
    let max = reference.max_value();
    let c1 = (T::lit(0.01) * max).powi(2);
    let c2 = (T::lit(0.03) * max).powi(2);

    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    // Horizontally filtered x, y, xx, yy, xy for the last 11 rows.
    let mut ring = vec![[vec![T::zero(); ow], vec![T::zero(); ow], vec![T::zero(); ow], vec![T::zero(); ow], vec![
        T::zero();
        ow
    ]]; SSIM_WINDOW];
    let mut total = T::zero();
    let mut row_vals = [T::zero(); 5];
    for r in 0..h {
        let (xr, yr) = (reference.row(r), test.row(r));
        let slot = &mut ring[r % SSIM_WINDOW];
        for c in 0..ow {
            let mut acc = [T::zero(); 5];
            for (j, &k) in kernel.iter().enumerate() {
                let (x, y) = (xr[c + j], yr[c + j]);
                acc[0] += k * x;
                acc[1] += k * y;
                acc[2] += k * (x * x);
                acc[3] += k * (y * y);
                acc[4] += k * (x * y);
            }
            for (ch, v) in acc.into_iter().enumerate() {
                slot[ch][c] = v;
            }
        }
        if r + 1 < SSIM_WINDOW {
            continue;
        }
        let top = r + 1 - SSIM_WINDOW;
        let mut row_total = T::zero();
        for c in 0..ow {
            row_vals.fill(T::zero());
            for (j, &k) in kernel.iter().enumerate() {
                let s = &ring[(top + j) % SSIM_WINDOW];
                for ch in 0..5 {
                    row_vals[ch] += k * s[ch][c];
                }
            }
            let [mx, my, exx, eyy, exy] = row_vals;
            let vx = exx - mx * mx;
            let vy = eyy - my * my;
            let cxy = exy - mx * my;
            let two = T::lit(2.0);
            let num = (two * (mx * my) + c1) * (two * cxy + c2);
            let den = (mx * mx + my * my + c1) * (vx + vy + c2);
            row_total += num / den;
        }
        total += row_total;
    }
    Ok(total / T::from_count(ow * oh))
}

/// PSNR and SSIM of `test` against `reference`.
pub fn compare_images<T: Real>(
    image_id: impl Into<String>,
    reference: &GrayImage<T>,
    test: &GrayImage<T>,
) -> Result<QualityRecord<T>> {
    Ok(QualityRecord {
        image_id: image_id.into(),
        psnr: Some(psnr(reference, test)?),
        ssim: Some(ssim(reference, test)?),
        external: BTreeMap::new(),
    })
}
