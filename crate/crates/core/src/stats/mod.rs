//! Special functions and the correlation/regression primitives.

mod regression;
mod special;

pub use regression::{
    correlate, ols_fit, pearson, prediction_interval, ComplexityMeasure, CorrelationReport, RegressionModel,
};
pub use special::{
    digamma, log_beta, log_gamma, regularized_incomplete_beta, student_t_cdf, student_t_quantile, trigamma,
};
