use crate::error::{Error, Result};
use crate::imageio::{GrayImage, Mask};
use crate::scalar::Real;

use super::filter::{for_each_gradient_row, SobelKernel};

/// Per-pixel derivative pair. `fx` follows the vertical image axis and `fy`
/// the horizontal one.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField<T> {
    pub width: usize,
    pub height: usize,
    pub fx: Vec<T>,
    pub fy: Vec<T>,
    /// Largest absolute response the kernel can produce for the source bit
    /// depth.
    pub bound: T,
}

impl<T: Real> GradientField<T> {
    pub fn compute(img: &GrayImage<T>, kernel: &SobelKernel<T>) -> Result<Self> {
        let (w, h) = img.dimensions();
        let mut fx = Vec::with_capacity(w * h);
        let mut fy = Vec::with_capacity(w * h);
        for_each_gradient_row(img, kernel, |_, rx, ry| {
            fx.extend_from_slice(rx);
            fy.extend_from_slice(ry);
        })?;
        Ok(Self {
            width: w,
            height: h,
            fx,
            fy,
            bound: kernel.bound_factor() * img.max_value(),
        })
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Largest absolute component over the included pixels.
    pub fn max_abs(&self, mask: Option<&Mask>) -> T {
        let mut m = T::zero();
        for (i, (&x, &y)) in self.fx.iter().zip(&self.fy).enumerate() {
            if mask.is_some_and(|mk| mk.is_excluded(i)) {
                continue;
            }
            m = m.max(x.abs()).max(y.abs());
        }
        m
    }
}

/// Maps a gradient value onto one of `bins` equal subintervals of `[-G, G]`,
/// clamping out-of-range values to the outer bins.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Quantizer<T> {
    bins: usize,
    bins_t: T,
    range: T,
    span: T,
}

impl<T: Real> Quantizer<T> {
    pub(crate) fn new(bins: usize, range: T) -> Self {
        Self {
            bins,
            bins_t: T::from_count(bins),
            range,
            span: range + range,
        }
    }

    #[inline]
    pub(crate) fn index(&self, v: T) -> usize {
        // Divide last so integer-valued gradients on a bin edge land exactly.
        // Truncation is floor on the positive branch.
        let x = (v + self.range) * self.bins_t / self.span;
        if x >= self.bins_t {
            self.bins - 1
        } else if x > T::zero() {
            x.to_usize().unwrap_or(0)
        } else {
            0
        }
    }
}

/// Normalized joint histogram of gradient pairs over `bins x bins` cells;
/// cell `(i, j)` counts pixels with `fx` in bin `i` and `fy` in bin `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deldensity<T> {
    bins: usize,
    counts: Vec<u64>,
    cells: Vec<T>,
    total_weight: u64,
    range: T,
}

impl<T: Real> Deldensity<T> {
    /// Normalizes raw cell counts (row-major, `bins * bins` long).
    pub fn from_counts(bins: usize, counts: Vec<u64>, range: T) -> Result<Self> {
        if bins < 2 {
            return Err(Error::Config(format!("bins must be >= 2, got {bins}")));
        }
        if counts.len() != bins * bins {
            return Err(Error::LengthMismatch(counts.len(), bins * bins));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptySupport);
        }
        let n = T::from_u64(total).unwrap();
        let cells = counts.iter().map(|&c| T::from_u64(c).unwrap() / n).collect();
        Ok(Self {
            bins,
            counts,
            cells,
            total_weight: total,
            range,
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Symmetric quantization bound `G`.
    pub fn range(&self) -> T {
        self.range
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> T {
        self.cells[i * self.bins + j]
    }

    /// Indices of nonempty cells in row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, _)| (k / self.bins, k % self.bins))
            .collect()
    }
}

/// Accumulates gradient pairs of included pixels into a histogram.
pub(crate) struct DensityAccumulator<T> {
    quantizer: Quantizer<T>,
    counts: Vec<u64>,
}

impl<T: Real> DensityAccumulator<T> {
    pub(crate) fn new(bins: usize, range: T) -> Self {
        Self {
            quantizer: Quantizer::new(bins, range),
            counts: vec![0; bins * bins],
        }
    }

    #[inline]
    pub(crate) fn add_row(&mut self, fx: &[T], fy: &[T], excluded: Option<&[bool]>) {
        let bins = self.quantizer.bins;
        match excluded {
            None => {
                for (&x, &y) in fx.iter().zip(fy) {
                    let k = self.quantizer.index(x) * bins + self.quantizer.index(y);
                    self.counts[k] += 1;
                }
            }
            Some(ex) => {
                for ((&x, &y), &skip) in fx.iter().zip(fy).zip(ex) {
                    if !skip {
                        let k = self.quantizer.index(x) * bins + self.quantizer.index(y);
                        self.counts[k] += 1;
                    }
                }
            }
        }
    }

    pub(crate) fn finish(self) -> Result<Deldensity<T>> {
        Deldensity::from_counts(self.quantizer.bins, self.counts, self.quantizer.range)
    }
}

/// Histograms the gradient field over `[-range, range]`, skipping excluded
/// pixels.
pub fn deldensity_with_range<T: Real>(
    grad: &GradientField<T>,
    mask: Option<&Mask>,
    bins: usize,
    range: T,
) -> Result<Deldensity<T>> {
    if bins < 2 {
        return Err(Error::Config(format!("bins must be >= 2, got {bins}")));
    }
    if !(range > T::zero()) {
        return Err(Error::Domain {
            name: "gradient range",
            value: range.as_f64(),
        });
    }
    if let Some(m) = mask {
        m.check_dimensions(grad.dimensions())?;
    }
    let mut acc = DensityAccumulator::new(bins, range);
    let w = grad.width;
    for r in 0..grad.height {
        let span = r * w..(r + 1) * w;
        acc.add_row(
            &grad.fx[span.clone()],
            &grad.fy[span.clone()],
            mask.map(|m| &m.data()[span]),
        );
    }
    acc.finish()
}

/// `-1/2 * sum p log2 p` over nonempty cells, in bits.
pub fn delentropy<T: Real>(d: &Deldensity<T>) -> T {
    let mut h = T::zero();
    for &p in d.cells() {
        if p > T::zero() {
            h -= p * p.log2();
        }
    }
    (h * T::lit(0.5)).max(T::zero())
}
