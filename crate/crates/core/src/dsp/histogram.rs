use serde::{Deserialize, Serialize};

use super::fit::{fit_dsp, SceneProfile};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin<T> {
    pub center: T,
    pub count: usize,
    /// Fitted density at `center`, per bit.
    pub density: T,
}

/// Equal-width histogram of `samples` over the profile's support, with the
/// fitted density evaluated at each bin center.
pub fn histogram_for<T: Real>(profile: &SceneProfile<T>, samples: &[T], bins: usize) -> Result<Vec<HistogramBin<T>>> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let width = (profile.b - profile.a) / T::from_count(bins);
    let mut counts = vec![0usize; bins];
    for &h in samples {
        let pos = ((h - profile.a) / width).floor();
        let i = if pos < T::zero() {
            0
        } else {
            pos.to_usize().unwrap_or(bins - 1).min(bins - 1)
        };
        counts[i] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let center = profile.a + (T::from_count(i) + T::lit(0.5)) * width;
            HistogramBin {
                center,
                count,
                density: profile.pdf(center),
            }
        })
        .collect())
}

/// Fits the profile and returns it with its plot histogram.
pub fn profile_histogram<T: Real>(
    samples: &[T],
    bins: usize,
    ceiling: T,
) -> Result<(SceneProfile<T>, Vec<HistogramBin<T>>)> {
    let profile = fit_dsp(samples, ceiling)?;
    let hist = histogram_for(&profile, samples, bins)?;
    Ok((profile, hist))
}
