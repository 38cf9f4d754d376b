//! Straightforward reference implementations used as test oracles. Nothing
//! here calls into the library; every quantity is recomputed from its
//! textbook definition with plain loops.
#![allow(dead_code)]

pub type Raster = Vec<Vec<f64>>;

fn at(img: &Raster, r: isize, c: isize) -> f64 {
    let h = img.len() as isize;
    let w = img[0].len() as isize;
    img[r.clamp(0, h - 1) as usize][c.clamp(0, w - 1) as usize]
}

/// Direct 2D Gaussian convolution with edge replication.
pub fn blur(img: &Raster, size: usize, sigma: f64) -> Raster {
    let p = (size / 2) as isize;
    let mut k = vec![vec![0.0; size]; size];
    let mut total = 0.0;
    for i in -p..=p {
        for j in -p..=p {
            let v = (-((i * i + j * j) as f64) / (2.0 * sigma * sigma)).exp();
            k[(i + p) as usize][(j + p) as usize] = v;
            total += v;
        }
    }
    let h = img.len();
    let w = img[0].len();
    let mut out = vec![vec![0.0; w]; h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for i in -p..=p {
                for j in -p..=p {
                    acc += k[(i + p) as usize][(j + p) as usize] / total * at(img, r as isize + i, c as isize + j);
                }
            }
            out[r][c] = acc;
        }
    }
    out
}

/// Unnormalized 3x3 Sobel: `fx` differentiates down the rows, `fy` along them.
pub fn sobel(img: &Raster) -> (Raster, Raster) {
    const KX: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
    const KY: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    let h = img.len();
    let w = img[0].len();
    let mut fx = vec![vec![0.0; w]; h];
    let mut fy = vec![vec![0.0; w]; h];
    for r in 0..h {
        for c in 0..w {
            for i in 0..3 {
                for j in 0..3 {
                    let v = at(img, r as isize + i as isize - 1, c as isize + j as isize - 1);
                    fx[r][c] += KX[i][j] * v;
                    fy[r][c] += KY[i][j] * v;
                }
            }
        }
    }
    (fx, fy)
}

pub fn bin_of(v: f64, range: f64, bins: usize) -> usize {
    let t = (v + range) / (2.0 * range) * bins as f64;
    if t < 0.0 {
        0
    } else {
        (t.floor() as usize).min(bins - 1)
    }
}

/// Counts per `(i, j)` cell, skipping pixels where `excluded` is true.
pub fn joint_histogram(fx: &Raster, fy: &Raster, excluded: Option<&Vec<Vec<bool>>>, range: f64, bins: usize) -> Vec<Vec<u64>> {
    let mut counts = vec![vec![0u64; bins]; bins];
    for r in 0..fx.len() {
        for c in 0..fx[0].len() {
            if excluded.is_some_and(|m| m[r][c]) {
                continue;
            }
            counts[bin_of(fx[r][c], range, bins)][bin_of(fy[r][c], range, bins)] += 1;
        }
    }
    counts
}

pub fn entropy_bits(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().collect();
    let total: u64 = counts.iter().sum();
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

pub fn delentropy_of_counts(counts: &[Vec<u64>]) -> f64 {
    0.5 * entropy_bits(counts.iter().flatten().copied())
}

/// Blur 3x3 sigma 1, Sobel, 256 bins over `[-4 max, 4 max]`.
pub fn delentropy(img: &Raster, excluded: Option<&Vec<Vec<bool>>>, max_value: f64) -> f64 {
    let (fx, fy) = sobel(&blur(img, 3, 1.0));
    delentropy_of_counts(&joint_histogram(&fx, &fy, excluded, 4.0 * max_value, 256))
}

pub fn shannon(img: &Raster, levels: usize) -> f64 {
    let mut counts = vec![0u64; levels];
    for row in img {
        for &v in row {
            counts[v as usize] += 1;
        }
    }
    entropy_bits(counts)
}

pub fn glcm(img: &Raster, levels: usize, max_value: f64, offset: (isize, isize)) -> f64 {
    let q = |v: f64| ((v * levels as f64 / (max_value + 1.0)).floor() as usize).min(levels - 1);
    let h = img.len() as isize;
    let w = img[0].len() as isize;
    let mut m = vec![vec![0u64; levels]; levels];
    for r in 0..h {
        for c in 0..w {
            let (r2, c2) = (r + offset.0, c + offset.1);
            if r2 < 0 || r2 >= h || c2 < 0 || c2 >= w {
                continue;
            }
            let a = q(img[r as usize][c as usize]);
            let b = q(img[r2 as usize][c2 as usize]);
            m[a][b] += 1;
            m[b][a] += 1;
        }
    }
    entropy_bits(m.into_iter().flatten())
}

pub fn psnr(a: &Raster, b: &Raster, max_value: f64) -> f64 {
    let mut sse = 0.0;
    let mut n = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            sse += (x - y) * (x - y);
            n += 1.0;
        }
    }
    if sse == 0.0 {
        return f64::INFINITY;
    }
    10.0 * (max_value * max_value / (sse / n)).log10()
}

/// Mean SSIM over valid 11x11 windows, each evaluated directly with the
/// 2D Gaussian weights.
pub fn ssim(a: &Raster, b: &Raster, max_value: f64) -> f64 {
    let p = 5isize;
    let mut k = [[0.0; 11]; 11];
    let mut total = 0.0;
    for i in -p..=p {
        for j in -p..=p {
            let v = (-((i * i + j * j) as f64) / (2.0 * 1.5 * 1.5)).exp();
            k[(i + p) as usize][(j + p) as usize] = v;
            total += v;
        }
    }
    let c1 = (0.01 * max_value).powi(2);
    let c2 = (0.03 * max_value).powi(2);
    let h = a.len();
    let w = a[0].len();
    let mut sum = 0.0;
    let mut count = 0.0;
    for r in 0..=h - 11 {
        for c in 0..=w - 11 {
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    mx += k[i][j] / total * a[r + i][c + j];
                    my += k[i][j] / total * b[r + i][c + j];
                }
            }
            let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let wgt = k[i][j] / total;
                    let (dx, dy) = (a[r + i][c + j] - mx, b[r + i][c + j] - my);
                    vx += wgt * dx * dx;
                    vy += wgt * dy * dy;
                    cov += wgt * dx * dy;
                }
            }
            sum += (2.0 * mx * my + c1) * (2.0 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1.0;
        }
    }
    sum / count
}

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // stop at the tolerance or once the estimate is converged to rounding
        if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= 1e-15 * (left + right).abs() {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// ln Gamma by upward recurrence to x >= 30 and the Stirling series.
pub fn ln_gamma(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 30.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2) - 1.0 / (1680.0 * z * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

pub fn student_t_pdf(t: f64, dof: f64) -> f64 {
    let ln_norm = ln_gamma((dof + 1.0) / 2.0) - ln_gamma(dof / 2.0) - 0.5 * (dof * std::f64::consts::PI).ln();
    (ln_norm - (dof + 1.0) / 2.0 * (1.0 + t * t / dof).ln()).exp()
}

/// Upper quantile by Newton iteration on the integrated density.
pub fn student_t_quantile(p: f64, dof: f64) -> f64 {
    assert!(p > 0.5);
    let mut q = 2.0;
    for _ in 0..100 {
        let cdf = 0.5 + integrate(&|t| student_t_pdf(t, dof), 0.0, q, 1e-15);
        let mut next = q - (cdf - p) / student_t_pdf(q, dof);
        if next <= 0.0 {
            next = 0.5 * q;
        }
        if (next - q).abs() < 1e-14 * q {
            return next;
        }
        q = next;
    }
    q
}

/// Pearson r from raw sums in a single pass.
pub fn pearson_one_pass(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}
