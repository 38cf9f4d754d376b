//! Scene complexity analysis built on delentropy.
//!
//! Per-image delentropy is computed from the joint histogram of Sobel
//! gradients; a scene's delentropy values are summarized by a truncated Beta
//! fit (the delentropic scene profile), and can be correlated with
//! reconstruction quality metrics.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod dsp;
pub mod entropy;
pub mod error;
pub mod imageio;
pub mod metrics;
pub mod scalar;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Real;

pub type GrayImage64 = imageio::GrayImage<f64>;
pub type GrayImage32 = imageio::GrayImage<f32>;
pub type GradientField64 = entropy::GradientField<f64>;
pub type Deldensity64 = entropy::Deldensity<f64>;
pub type EntropyConfig64 = entropy::EntropyConfig<f64>;
pub type ComplexityRecord64 = entropy::ComplexityRecord<f64>;
pub type SceneProfile64 = dsp::SceneProfile<f64>;
pub type HistogramBin64 = dsp::HistogramBin<f64>;
pub type QualityRecord64 = metrics::QualityRecord<f64>;
pub type RegressionModel64 = stats::RegressionModel<f64>;
pub type CorrelationReport64 = stats::CorrelationReport<f64>;
