//! Maximum-likelihood fit of a four-parameter Beta distribution to a scene's
//! per-image delentropy values.
//!
//! The support `[a, b]` is pinned just outside the sample extrema; only the
//! shapes are optimized, by damped Newton steps on the digamma score
//! equations starting from the method-of-moments estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stats::{digamma, log_beta, trigamma};

/// Minimum sample count accepted by [`fit_dsp`].
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneProfile<T> {
    pub alpha: T,
    pub beta: T,
    /// Lower support bound, bits.
    pub a: T,
    /// Upper support bound, bits.
    pub b: T,
    /// Sample mean, bits.
    pub mu: T,
    /// Sample standard deviation (n - 1 denominator), bits.
    pub sigma: T,
    pub n: usize,
    /// Log-likelihood at the optimum, nats.
    pub log_likelihood: T,
}

impl<T: Real> SceneProfile<T> {
    /// Mean of the fitted distribution, `a + (b - a) * alpha / (alpha + beta)`.
    pub fn fitted_mean(&self) -> T {
        self.a + (self.b - self.a) * self.alpha / (self.alpha + self.beta)
    }

    pub fn pdf(&self, x: T) -> T {
        truncated_beta_pdf(x, self.alpha, self.beta, self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions<T> {
    /// Stop once an iteration improves the log-likelihood by less than this.
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-9),
            max_iterations: 500,
        }
    }
}

/// Density of the Beta distribution rescaled to `[a, b]`; zero outside.
pub fn truncated_beta_pdf<T: Real>(x: T, alpha: T, beta: T, a: T, b: T) -> T {
    if !(x > a && x < b) {
        return T::zero();
    }
    let Ok(lb) = log_beta(alpha, beta) else {
        return T::nan();
    };
    let one = T::one();
    ((alpha - one) * (x - a).ln() + (beta - one) * (b - x).ln() - (alpha + beta - one) * (b - a).ln() - lb).exp()
}

/// Sum of log densities of `samples` under the rescaled Beta, in nats.
pub fn beta_log_likelihood<T: Real>(alpha: T, beta: T, a: T, b: T, samples: &[T]) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha.as_f64(),
        });
    }
    if !(beta > T::zero()) {
        return Err(Error::Domain {
            name: "beta",
            value: beta.as_f64(),
        });
    }
    if let Some(index) = samples.iter().position(|&h| !(h > a && h < b)) {
        return Err(Error::Support {
            index,
            value: samples[index].as_f64(),
            a: a.as_f64(),
            b: b.as_f64(),
        });
    }
    let one = T::one();
    let n = T::from_count(samples.len());
    let (mut s_lo, mut s_hi) = (T::zero(), T::zero());
    for &h in samples {
        s_lo += (h - a).ln();
        s_hi += (b - h).ln();
    }
    Ok((alpha - one) * s_lo + (beta - one) * s_hi - n * ((alpha + beta - one) * (b - a).ln() + log_beta(alpha, beta)?))
}

/// Support bounds placed a margin `max(1e-3 * range, 1e-6)` beyond the
/// sample extrema, pulled inwards (halfway to the limit) where the margin
/// would cross `0` or `ceiling`.
pub fn support_bounds<T: Real>(min: T, max: T, ceiling: T) -> (T, T) {
    let delta = (T::lit(1e-3) * (max - min)).max(T::lit(1e-6));
    let half = T::lit(0.5);
    let a = if min - delta >= T::zero() {
        min - delta
    } else if min > T::zero() {
        min * half
    } else {
        min - delta
    };
    let b = if max + delta <= ceiling {
        max + delta
    } else if max < ceiling {
        (max + ceiling) * half
    } else {
        max + delta
    };
    (a, b)
}

fn mean_std<T: Real>(v: &[T]) -> (T, T) {
    let n = T::from_count(v.len());
    let mean = v.iter().copied().sum::<T>() / n;
    let ss: T = v.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - T::one())).sqrt())
}

/// Log-likelihood of the shapes given rescaled sufficient statistics.
struct ShapeObjective<T> {
    n: T,
    sum_ln_t: T,
    sum_ln_1mt: T,
}

impl<T: Real> ShapeObjective<T> {
    fn value(&self, alpha: T, beta: T) -> T {
        let one = T::one();
        match log_beta(alpha, beta) {
            Ok(lb) => (alpha - one) * self.sum_ln_t + (beta - one) * self.sum_ln_1mt - self.n * lb,
            Err(_) => T::neg_infinity(),
        }
    }

    /// Newton direction `-H^{-1} g`; the Hessian is negative definite.
    fn newton_step(&self, alpha: T, beta: T) -> (T, T) {
        let s = alpha + beta;
        let psi_s = digamma(s);
        let g1 = self.sum_ln_t - self.n * (digamma(alpha) - psi_s);
        let g2 = self.sum_ln_1mt - self.n * (digamma(beta) - psi_s);
        let c = trigamma(s);
        let p = trigamma(alpha) - c;
        let q = trigamma(beta) - c;
        let det = p * q - c * c;
        let scale = (self.n * det).recip();
        ((q * g1 + c * g2) * scale, (c * g1 + p * g2) * scale)
    }
}

pub fn fit_dsp<T: Real>(samples: &[T], ceiling: T) -> Result<SceneProfile<T>> {
    fit_dsp_with(samples, ceiling, &FitOptions::default())
}

pub fn fit_dsp_with<T: Real>(samples: &[T], ceiling: T, opts: &FitOptions<T>) -> Result<SceneProfile<T>> {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientData {
            required: MIN_SAMPLES,
            got: n,
        });
    }
    if let Some(index) = samples.iter().position(|&h| !(h >= T::zero() && h <= ceiling)) {
        return Err(Error::ValueRange {
            index,
            value: samples[index].as_f64(),
            max: ceiling.as_f64(),
        });
    }
    let (mu, sigma) = mean_std(samples);
    let (min, max) = samples
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &h| (lo.min(h), hi.max(h)));
    if min == max {
        return Err(Error::DegenerateScene { n, mu: mu.as_f64() });
    }

    let (a, b) = support_bounds(min, max, ceiling);
    fit_shapes(samples, a, b, mu, sigma, opts)
}

/// Fits the shapes on a caller-supplied support `[a, b]`, for scenes whose
/// delentropy range is known independently of the sample extrema.
pub fn fit_dsp_on_support<T: Real>(samples: &[T], a: T, b: T, opts: &FitOptions<T>) -> Result<SceneProfile<T>> {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientData {
            required: MIN_SAMPLES,
            got: n,
        });
    }
    if let Some(index) = samples.iter().position(|&h| !(h > a && h < b)) {
        return Err(Error::Support {
            index,
            value: samples[index].as_f64(),
            a: a.as_f64(),
            b: b.as_f64(),
        });
    }
    let (mu, sigma) = mean_std(samples);
    if sigma == T::zero() {
        return Err(Error::DegenerateScene { n, mu: mu.as_f64() });
    }
    fit_shapes(samples, a, b, mu, sigma, opts)
}

fn fit_shapes<T: Real>(samples: &[T], a: T, b: T, mu: T, sigma: T, opts: &FitOptions<T>) -> Result<SceneProfile<T>> {
    let n = samples.len();
    let width = b - a;
    let t: Vec<T> = samples.iter().map(|&h| (h - a) / width).collect();
    let objective = ShapeObjective {
        n: T::from_count(n),
        sum_ln_t: samples.iter().map(|&h| ((h - a) / width).ln()).sum(),
        sum_ln_1mt: samples.iter().map(|&h| ((b - h) / width).ln()).sum(),
    };

    let (m, s) = mean_std(&t);
    let common = m * (T::one() - m) / (s * s) - T::one();
    let (lo, hi) = (T::lit(0.05), T::lit(500.0));
    let clamp = |v: T| if v.is_finite() { v.max(lo).min(hi) } else { lo };
    let (mut alpha, mut beta) = (clamp(m * common), clamp((T::one() - m) * common));

    let mut ll = objective.value(alpha, beta);
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let (da, db) = objective.newton_step(alpha, beta);
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let (na, nb) = (alpha + step * da, beta + step * db);
            if na > T::zero() && nb > T::zero() {
                let nll = objective.value(na, nb);
                if nll >= ll {
                    accepted = Some((na, nb, nll));
                    break;
                }
            }
            step *= T::lit(0.5);
        }
        let Some((na, nb, nll)) = accepted else {
            // no ascent direction left at working precision
            converged = true;
            break;
        };
        let gain = nll - ll;
        alpha = na;
        beta = nb;
        ll = nll;
        if gain < opts.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: opts.max_iterations,
            alpha: alpha.as_f64(),
            beta: beta.as_f64(),
        });
    }

    Ok(SceneProfile {
        alpha,
        beta,
        a,
        b,
        mu,
        sigma,
        n,
        log_likelihood: beta_log_likelihood(alpha, beta, a, b, samples)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_special_case() {
        let samples = [0.2f64, 1.7, 2.9, 3.3];
        let ll = beta_log_likelihood(1.0, 1.0, 0.0, 4.0, &samples).unwrap();
        assert!((ll + 4.0 * 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn midpoint_closed_form() {
        let ll = beta_log_likelihood(2.0f64, 2.0, 0.0, 1.0, &[0.5]).unwrap();
        assert!((ll - 1.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn support_violation_identifies_sample() {
        match beta_log_likelihood(2.0f64, 2.0, 0.0, 1.0, &[0.5, 1.0, 0.2]) {
            Err(Error::Support { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fit_error_paths() {
        assert!(matches!(
            fit_dsp(&[1.0f64; 5], 8.0),
            Err(Error::InsufficientData { required: 8, got: 5 })
        ));
        assert!(matches!(fit_dsp(&[3.0f64; 10], 8.0), Err(Error::DegenerateScene { n: 10, .. })));
        let mut bad = vec![1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 7.5];
        bad[3] = 9.0;
        assert!(matches!(fit_dsp(&bad, 8.0), Err(Error::ValueRange { index: 3, .. })));
    }

    #[test]
    fn iteration_cap_reports_last_iterate() {
        let samples: Vec<f64> = (0..40).map(|i| 3.0 + ((i * 37) % 40) as f64 * 0.05 + (i as f64 * 0.01).powi(2)).collect();
        let opts = FitOptions {
            tolerance: 0.0,
            max_iterations: 1,
        };
        match fit_dsp_with(&samples, 8.0, &opts) {
            Err(Error::Convergence { iterations, alpha, beta }) => {
                assert_eq!(iterations, 1);
                assert!(alpha > 0.0 && beta > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fixed_support_rejects_outside_samples() {
        let samples = [3.1f64, 3.2, 3.3, 3.4, 3.5, 3.6, 3.7, 5.0];
        assert!(matches!(
            fit_dsp_on_support(&samples, 3.0, 5.0, &FitOptions::default()),
            Err(Error::Support { index: 7, .. })
        ));
    }

    #[test]
    fn bounds_stay_inside_limits() {
        let (a, b) = support_bounds(0.0005f64, 7.9999995, 8.0);
        assert!(a > 0.0 && a < 0.0005);
        assert!(b > 7.9999995 && b < 8.0);
        let (a, b) = support_bounds(3.0f64, 5.0, 8.0);
        assert!((a - 2.998).abs() < 1e-12);
        assert!((b - 5.002).abs() < 1e-12);
    }
}
