//! Per-image complexity measures.
//!
//! Delentropy is computed as blur -> Sobel -> joint gradient histogram ->
//! halved Shannon entropy. Masked pixels are dropped only when the histogram
//! is accumulated; filtering always runs over the full raster.

mod baseline;
mod density;
mod filter;

use serde::{Deserialize, Serialize};

pub use baseline::{glcm_texture_entropy, shannon_pixel_entropy, GlcmConfig};
pub use density::{deldensity_with_range, delentropy, Deldensity, GradientField};
pub use filter::{gaussian_blur_with, gaussian_half_kernel, SobelKernel};

use crate::error::{Error, Result};
use crate::imageio::{GrayImage, Mask};
use crate::scalar::Real;
use density::DensityAccumulator;
use filter::{gradient_rows, BlurRows};

/// How the symmetric quantization bound `G` of the deldensity is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientRange {
    /// Largest response the Sobel kernel can produce for the bit depth,
    /// e.g. `4 * 255 = 1020` for 8-bit input and a 3x3 kernel.
    Theoretical,
    /// Largest absolute gradient observed among included pixels.
    PerImageMax,
}

impl std::str::FromStr for GradientRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(Self::Theoretical),
            "per-image-max" => Ok(Self::PerImageMax),
            other => Err(Error::Config(format!("unknown gradient range `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyConfig<T> {
    pub blur_kernel: usize,
    pub blur_sigma: T,
    pub sobel_kernel: usize,
    pub bins: usize,
    pub gradient_range: GradientRange,
}

impl<T: Real> Default for EntropyConfig<T> {
    fn default() -> Self {
        Self {
            blur_kernel: 3,
            blur_sigma: T::one(),
            sobel_kernel: 3,
            bins: 256,
            gradient_range: GradientRange::Theoretical,
        }
    }
}

impl<T: Real> EntropyConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("blur", self.blur_kernel), ("sobel", self.sobel_kernel)] {
            if k < 3 || k % 2 == 0 {
                return Err(Error::Config(format!("{name} kernel must be odd and >= 3, got {k}")));
            }
        }
        if self.bins < 2 {
            return Err(Error::Config(format!("bins must be >= 2, got {}", self.bins)));
        }
        if !(self.blur_sigma > T::zero()) || !self.blur_sigma.is_finite() {
            return Err(Error::Domain {
                name: "blur sigma",
                value: self.blur_sigma.as_f64(),
            });
        }
        Ok(())
    }

    /// Upper bound of delentropy under this binning, `log2(bins)` bits.
    pub fn ceiling(&self) -> T {
        T::from_count(self.bins).log2()
    }
}

/// Gaussian blur with the configured kernel size and sigma.
pub fn gaussian_blur<T: Real>(img: &GrayImage<T>, cfg: &EntropyConfig<T>) -> Result<GrayImage<T>> {
    gaussian_blur_with(img, cfg.blur_kernel, cfg.blur_sigma)
}

/// Unnormalized 3x3 Sobel responses.
pub fn sobel_gradients<T: Real>(img: &GrayImage<T>) -> Result<GradientField<T>> {
    GradientField::compute(img, &SobelKernel::new(3)?)
}

/// Theoretical bound `G` for an image of this bit depth under `kernel`.
pub fn theoretical_range<T: Real>(img: &GrayImage<T>, kernel: &SobelKernel<T>) -> T {
    kernel.bound_factor() * img.max_value()
}

/// Joint histogram of `(fx, fy)` over `[-G, G]^2`.
pub fn deldensity<T: Real>(grad: &GradientField<T>, mask: Option<&Mask>, cfg: &EntropyConfig<T>) -> Result<Deldensity<T>> {
    cfg.validate()?;
    let range = match cfg.gradient_range {
        GradientRange::Theoretical => grad.bound,
        GradientRange::PerImageMax => per_image_range(grad, mask),
    };
    deldensity_with_range(grad, mask, cfg.bins, range)
}

fn per_image_range<T: Real>(grad: &GradientField<T>, mask: Option<&Mask>) -> T {
    let m = grad.max_abs(mask);
    // a flat field has no spread; any positive bound puts it in the centre cell
    if m > T::zero() {
        m
    } else {
        T::one()
    }
}

/// Full delentropy pipeline for one image, in bits.
pub fn compute_delentropy<T: Real>(img: &GrayImage<T>, mask: Option<&Mask>, cfg: &EntropyConfig<T>) -> Result<T> {
    Ok(delentropy(&compute_deldensity(img, mask, cfg)?))
}

/// Blur, differentiate and histogram one image.
pub fn compute_deldensity<T: Real>(
    img: &GrayImage<T>,
    mask: Option<&Mask>,
    cfg: &EntropyConfig<T>,
) -> Result<Deldensity<T>> {
    cfg.validate()?;
    if let Some(m) = mask {
        m.check_dimensions(img.dimensions())?;
    }
    let kernel = SobelKernel::new(cfg.sobel_kernel)?;
    match cfg.gradient_range {
        GradientRange::Theoretical => {
            // Blur, differentiate and bin row by row; no full-size rasters.
            let range = theoretical_range(img, &kernel);
            let mut acc = DensityAccumulator::new(cfg.bins, range);
            let mut blurred = BlurRows::new(img, cfg.blur_kernel, cfg.blur_sigma)?;
            let (w, h) = img.dimensions();
            gradient_rows(w, h, &kernel, |r, dst| blurred.fill(r, dst), |r, fx, fy| {
                acc.add_row(fx, fy, mask.map(|m| &m.data()[r * w..(r + 1) * w]));
            })?;
            acc.finish()
        }
        GradientRange::PerImageMax => {
            let blurred = gaussian_blur(img, cfg)?;
            let grad = GradientField::compute(&blurred, &kernel)?;
            deldensity_with_range(&grad, mask, cfg.bins, per_image_range(&grad, mask))
        }
    }
}

/// The three complexity measures for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRecord<T> {
    pub image_id: String,
    pub delentropy: T,
    pub shannon_entropy: T,
    pub glcm_entropy: T,
    pub excluded_fraction: T,
}

pub fn analyze_image<T: Real>(
    image_id: impl Into<String>,
    img: &GrayImage<T>,
    mask: Option<&Mask>,
    cfg: &EntropyConfig<T>,
    glcm: &GlcmConfig,
) -> Result<ComplexityRecord<T>> {
    let excluded_fraction = mask.map_or(T::zero(), |m| T::lit(m.excluded_fraction()));
    Ok(ComplexityRecord {
        image_id: image_id.into(),
        delentropy: compute_delentropy(img, mask, cfg)?,
        shannon_entropy: shannon_pixel_entropy(img, mask)?,
        glcm_entropy: glcm_texture_entropy(img, mask, glcm)?,
        excluded_fraction,
    })
}
