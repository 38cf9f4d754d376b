//! Delentropic scene profile: a truncated Beta fitted to the per-image
//! delentropy values of one scene, its interpretation, and cross-scene
//! comparability checks.

mod classify;
mod compare;
mod fit;
mod histogram;

pub use classify::{
    classify, classify_profile, ComplexityClass, Level, Modality, Skew, BALANCED_SKEW_BAND, HIGH_COMPLEXITY_ABOVE,
    LOW_COMPLEXITY_BELOW,
};
pub use compare::{
    check_comparability, ComparabilityReport, ComparabilityWarning, EXTENT_RATIO_ABOVE, RESOLUTION_BREAK_AT,
    RESOLUTION_DRIFT_ABOVE,
};
pub use fit::{
    beta_log_likelihood, fit_dsp, fit_dsp_on_support, fit_dsp_with, support_bounds, truncated_beta_pdf, FitOptions, SceneProfile,
    MIN_SAMPLES,
};
pub use histogram::{histogram_for, profile_histogram, HistogramBin};
