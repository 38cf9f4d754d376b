//! Separable Gaussian smoothing and Sobel derivatives with edge replication.
//!
//! Symmetric taps are applied as `w0 * x[c] + sum_i w_i * (x[c - i] + x[c + i])`
//! and antisymmetric ones as `sum_i d_i * (x[c + i] - x[c - i])`. Pairing the
//! mirrored samples before weighting makes a 180-degree rotation negate the
//! derivatives exactly, and the Sobel response of a transposed image is the
//! exact transpose of the swapped components.

use crate::error::{Error, Result};
use crate::imageio::GrayImage;
use crate::scalar::Real;

#[inline]
fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Symmetric kernel stored as `[w0, w1, ..., wp]`.
#[inline]
fn smooth_row<T: Real>(src: &[T], half: &[T], dst: &mut [T]) {
    let n = src.len();
    let p = half.len() - 1;
    if n > 2 * p {
        let inner = &mut dst[p..n - p];
        for (d, &x) in inner.iter_mut().zip(&src[p..n - p]) {
            *d = half[0] * x;
        }
        for (i, &w) in half.iter().enumerate().skip(1) {
            let lo = &src[p - i..n - p - i];
            let hi = &src[p + i..n - p + i];
            for ((d, &a), &b) in inner.iter_mut().zip(lo).zip(hi) {
                *d += w * (a + b);
            }
        }
    }
    for c in (0..n).filter(|&c| c < p || c + p >= n) {
        let mut acc = half[0] * src[c];
        for (i, &w) in half.iter().enumerate().skip(1) {
            let lo = clamp_index(c as isize - i as isize, n);
            let hi = clamp_index(c as isize + i as isize, n);
            acc += w * (src[lo] + src[hi]);
        }
        dst[c] = acc;
    }
}

/// Antisymmetric kernel stored as `[_, d1, ..., dp]` (index 0 ignored).
#[inline]
fn diff_row<T: Real>(src: &[T], half: &[T], dst: &mut [T]) {
    let n = src.len();
    let p = half.len() - 1;
    if n > 2 * p {
        let inner = &mut dst[p..n - p];
        inner.fill(T::zero());
        for (i, &d) in half.iter().enumerate().skip(1) {
            let lo = &src[p - i..n - p - i];
            let hi = &src[p + i..n - p + i];
            for ((v, &a), &b) in inner.iter_mut().zip(lo).zip(hi) {
                *v += d * (b - a);
            }
        }
    }
    for c in (0..n).filter(|&c| c < p || c + p >= n) {
        let mut acc = T::zero();
        for (i, &d) in half.iter().enumerate().skip(1) {
            let lo = clamp_index(c as isize - i as isize, n);
            let hi = clamp_index(c as isize + i as isize, n);
            acc += d * (src[hi] - src[lo]);
        }
        dst[c] = acc;
    }
}

/// Small cache of per-row intermediate results for a sliding vertical window.
struct RowCache<T> {
    slots: Vec<Vec<T>>,
    owner: Vec<Option<usize>>,
}

impl<T: Real> RowCache<T> {
    fn new(rows: usize, width: usize) -> Self {
        Self {
            slots: vec![vec![T::zero(); width]; rows],
            owner: vec![None; rows],
        }
    }

    fn ensure(&mut self, row: usize, fill: impl FnOnce(&mut [T])) {
        let slot = row % self.slots.len();
        if self.owner[slot] != Some(row) {
            fill(&mut self.slots[slot]);
            self.owner[slot] = Some(row);
        }
    }

    fn get(&self, row: usize) -> &[T] {
        let slot = row % self.slots.len();
        debug_assert_eq!(self.owner[slot], Some(row));
        &self.slots[slot]
    }
}

/// Combines cached rows with a symmetric vertical kernel centred on `r`.
fn smooth_vertical<T: Real>(cache: &RowCache<T>, r: usize, height: usize, half: &[T], dst: &mut [T]) {
    let center = cache.get(r);
    for (d, &x) in dst.iter_mut().zip(center) {
        *d = half[0] * x;
    }
    for (j, &w) in half.iter().enumerate().skip(1) {
        let up = cache.get(clamp_index(r as isize - j as isize, height));
        let down = cache.get(clamp_index(r as isize + j as isize, height));
        for ((d, &a), &b) in dst.iter_mut().zip(up).zip(down) {
            *d += w * (a + b);
        }
    }
}

/// Half of a normalized 1D Gaussian: `[w0, w1, ..., wp]` with
/// `w0 + 2 * (w1 + ... + wp) = 1`.
pub fn gaussian_half_kernel<T: Real>(size: usize, sigma: T) -> Result<Vec<T>> {
    if size < 3 || size % 2 == 0 {
        return Err(Error::Config(format!("blur kernel must be odd and >= 3, got {size}")));
    }
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::Domain {
            name: "blur sigma",
            value: sigma.as_f64(),
        });
    }
    let p = size / 2;
    let two_var = T::lit(2.0) * sigma * sigma;
    let raw: Vec<T> = (0..=p)
        .map(|i| {
            let x = T::from_count(i);
            (-(x * x) / two_var).exp()
        })
        .collect();
    let total = raw[0] + T::lit(2.0) * raw[1..].iter().copied().sum::<T>();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Produces blurred rows on demand, in nondecreasing row order, keeping only
/// a window of horizontally smoothed input rows.
pub(crate) struct BlurRows<'a, T> {
    img: &'a GrayImage<T>,
    half: Vec<T>,
    cache: RowCache<T>,
}

impl<'a, T: Real> BlurRows<'a, T> {
    pub(crate) fn new(img: &'a GrayImage<T>, size: usize, sigma: T) -> Result<Self> {
        let half = gaussian_half_kernel(size, sigma)?;
        let (w, h) = img.dimensions();
        if size > w || size > h {
            return Err(Error::TooSmall {
                width: w,
                height: h,
                min_width: size,
                min_height: size,
            });
        }
        Ok(Self {
            img,
            half,
            cache: RowCache::new(size, w),
        })
    }

    pub(crate) fn fill(&mut self, r: usize, dst: &mut [T]) {
        let h = self.img.height();
        let p = self.half.len() - 1;
        for q in r.saturating_sub(p)..=(r + p).min(h - 1) {
            let (img, half) = (self.img, &self.half);
            self.cache.ensure(q, |d| smooth_row(img.row(q), half, d));
        }
        smooth_vertical(&self.cache, r, h, &self.half, dst);
    }
}

/// Separable Gaussian blur with edge replication.
pub fn gaussian_blur_with<T: Real>(img: &GrayImage<T>, size: usize, sigma: T) -> Result<GrayImage<T>> {
    let mut rows = BlurRows::new(img, size, sigma)?;
    let (w, h) = img.dimensions();
    let mut out = vec![T::zero(); w * h];
    for (r, dst) in out.chunks_exact_mut(w).enumerate() {
        rows.fill(r, dst);
    }
    Ok(GrayImage::from_parts(w, h, img.bitdepth(), out))
}

/// Sobel derivative pair of odd size `k`: a binomial smoothing kernel of
/// length `k` and a derivative kernel formed by convolving the binomial of
/// length `k - 2` with `[-1, 0, 1]`. Size 3 yields the classic
/// `[1, 2, 1]` / `[-1, 0, 1]` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SobelKernel<T> {
    size: usize,
    smooth: Vec<T>,
    deriv: Vec<T>,
}

fn binomial_row(len: usize) -> Vec<f64> {
    let mut row = vec![1.0f64];
    for _ in 1..len {
        let mut next = vec![1.0; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

impl<T: Real> SobelKernel<T> {
    pub fn new(size: usize) -> Result<Self> {
        if size < 3 || size % 2 == 0 {
            return Err(Error::Config(format!("sobel kernel must be odd and >= 3, got {size}")));
        }
        let p = size / 2;
        let smooth_full = binomial_row(size);
        let base = binomial_row(size - 2);
        // base convolved with [-1, 0, 1]
        let mut deriv_full = vec![0.0f64; size];
        for (i, &b) in base.iter().enumerate() {
            deriv_full[i] -= b;
            deriv_full[i + 2] += b;
        }
        Ok(Self {
            size,
            smooth: smooth_full[p..].iter().map(|&v| T::lit(v)).collect(),
            deriv: deriv_full[p..].iter().map(|&v| T::lit(v)).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Largest possible absolute response per unit of input range:
    /// `sum(smooth) * sum(positive derivative taps)`; 4 for size 3.
    pub fn bound_factor(&self) -> T {
        let s = self.smooth[0] + T::lit(2.0) * self.smooth[1..].iter().copied().sum::<T>();
        let d: T = self.deriv[1..].iter().copied().sum();
        s * d
    }
}

/// Streams Sobel responses row by row: `f(row, fx_row, fy_row)`, where `fx`
/// differentiates along the vertical axis and `fy` along the horizontal one.
pub(crate) fn for_each_gradient_row<T: Real>(
    img: &GrayImage<T>,
    kernel: &SobelKernel<T>,
    f: impl FnMut(usize, &[T], &[T]),
) -> Result<()> {
    let (w, h) = img.dimensions();
    gradient_rows(w, h, kernel, |r, dst| dst.copy_from_slice(img.row(r)), f)
}

/// As [`for_each_gradient_row`], for an image supplied row by row through
/// `source(row, dst)`. Rows are requested once each, in increasing order.
pub(crate) fn gradient_rows<T: Real>(
    w: usize,
    h: usize,
    kernel: &SobelKernel<T>,
    mut source: impl FnMut(usize, &mut [T]),
    mut f: impl FnMut(usize, &[T], &[T]),
) -> Result<()> {
    let k = kernel.size;
    if w < k || h < k {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min_width: k,
            min_height: k,
        });
    }
    let p = k / 2;
    let mut rows = RowCache::new(k, w);
    let mut dcache = RowCache::new(k, w);
    let mut vdiff = vec![T::zero(); w];
    let mut fx = vec![T::zero(); w];
    let mut fy = vec![T::zero(); w];
    for r in 0..h {
        let window = r.saturating_sub(p)..=(r + p).min(h - 1);
        for q in window.clone() {
            rows.ensure(q, |dst| source(q, dst));
        }
        // fy: horizontal derivative, smoothed vertically.
        for q in window {
            dcache.ensure(q, |dst| diff_row(rows.get(q), &kernel.deriv, dst));
        }
        smooth_vertical(&dcache, r, h, &kernel.smooth, &mut fy);

        // fx: vertical derivative, smoothed horizontally.
        vdiff.fill(T::zero());
        for (i, &d) in kernel.deriv.iter().enumerate().skip(1) {
            let up = rows.get(clamp_index(r as isize - i as isize, h));
            let down = rows.get(clamp_index(r as isize + i as isize, h));
            for ((v, &a), &b) in vdiff.iter_mut().zip(up).zip(down) {
                *v += d * (b - a);
            }
        }
        smooth_row(&vdiff, &kernel.smooth, &mut fx);

        f(r, &fx, &fy);
    }
    Ok(())
}
