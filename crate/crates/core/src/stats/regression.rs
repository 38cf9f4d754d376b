use serde::{Deserialize, Serialize};

use super::special::student_t_quantile;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_pair<T: Real>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            got: x.len(),
        });
    }
    Ok(())
}

fn mean<T: Real>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::from_count(v.len())
}

/// Centered sums `(x_mean, y_mean, Sxx, Syy, Sxy)`.
fn moments<T: Real>(x: &[T], y: &[T]) -> (T, T, T, T, T) {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    (mx, my, sxx, syy, sxy)
}

/// Sample Pearson correlation coefficient.
pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    check_pair(x, y)?;
    let (_, _, sxx, syy, sxy) = moments(x, y);
    if sxx == T::zero() {
        return Err(Error::DegenerateVariance("x"));
    }
    if syy == T::zero() {
        return Err(Error::DegenerateVariance("y"));
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

/// Simple linear model `y = intercept + slope * x` fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel<T> {
    pub slope: T,
    pub intercept: T,
    /// `SSE / (n - 2)`.
    pub residual_variance: T,
    pub n: usize,
    pub x_mean: T,
    /// `sum (x - x_mean)^2`.
    pub x_ss: T,
}

impl<T: Real> RegressionModel<T> {
    pub fn predict(&self, x: T) -> T {
        self.intercept + self.slope * x
    }
}

pub fn ols_fit<T: Real>(x: &[T], y: &[T]) -> Result<RegressionModel<T>> {
    check_pair(x, y)?;
    let (mx, my, sxx, syy, sxy) = moments(x, y);
    if sxx == T::zero() {
        return Err(Error::DegenerateVariance("x"));
    }
    if syy == T::zero() {
        return Err(Error::DegenerateVariance("y"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut sse = T::zero();
    let mut y_scale = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        let e = b - (intercept + slope * a);
        sse += e * e;
        y_scale = y_scale.max(b.abs());
    }
    let n = T::from_count(x.len());
    // Residuals at the level of rounding noise mean the data lie on a line.
    let noise = T::lit(8.0) * T::epsilon() * y_scale.max(T::one());
    if sse <= n * noise * noise {
        sse = T::zero();
    }
    Ok(RegressionModel {
        slope,
        intercept,
        residual_variance: sse / (n - T::lit(2.0)),
        n: x.len(),
        x_mean: mx,
        x_ss: sxx,
    })
}

/// Classical OLS prediction interval for a new observation at `x0`:
/// `y(x0) +/- t_{n-2,(1+level)/2} * s * sqrt(1 + 1/n + (x0 - x_mean)^2 / x_ss)`.
pub fn prediction_interval<T: Real>(m: &RegressionModel<T>, x0: T, level: T) -> Result<(T, T)> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::Config(format!("interval level {} outside (0, 1)", level.as_f64())));
    }
    if m.n < 3 || !(m.x_ss > T::zero()) {
        return Err(Error::InsufficientData { required: 3, got: m.n });
    }
    let y0 = m.predict(x0);
    if m.residual_variance == T::zero() {
        return Ok((y0, y0));
    }
    let n = T::from_count(m.n);
    let t = student_t_quantile((T::one() + level) * T::lit(0.5), n - T::lit(2.0))?;
    let dx = x0 - m.x_mean;
    let half = t * m.residual_variance.sqrt() * (T::one() + n.recip() + dx * dx / m.x_ss).sqrt();
    Ok((y0 - half, y0 + half))
}

/// The complexity measures a quality metric can be correlated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexityMeasure {
    Delentropy,
    Shannon,
    Glcm,
}

impl ComplexityMeasure {
    pub const ALL: [ComplexityMeasure; 3] = [Self::Delentropy, Self::Shannon, Self::Glcm];

    pub fn name(self) -> &'static str {
        match self {
            Self::Delentropy => "delentropy",
            Self::Shannon => "shannon",
            Self::Glcm => "glcm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport<T> {
    pub metric_name: String,
    pub complexity: ComplexityMeasure,
    pub pearson_r: T,
    pub model: RegressionModel<T>,
    /// Mean width of the prediction interval over the observed `x`.
    pub interval_width_mean: T,
}

/// Pearson correlation, OLS fit and mean prediction-interval width for one
/// (complexity, metric) pairing.
pub fn correlate<T: Real>(
    metric_name: impl Into<String>,
    complexity: ComplexityMeasure,
    x: &[T],
    y: &[T],
    level: T,
) -> Result<CorrelationReport<T>> {
    let pearson_r = pearson(x, y)?;
    let model = ols_fit(x, y)?;
    let mut total = T::zero();
    for &x0 in x {
        let (lo, hi) = prediction_interval(&model, x0, level)?;
        total += hi - lo;
    }
    Ok(CorrelationReport {
        metric_name: metric_name.into(),
        complexity,
        pearson_r,
        model,
        interval_width_mean: total / T::from_count(x.len()),
    })
}
