use serde::{Deserialize, Serialize};

use super::fit::SceneProfile;
use crate::scalar::Real;

pub const LOW_COMPLEXITY_BELOW: f64 = 2.5;
pub const HIGH_COMPLEXITY_ABOVE: f64 = 4.75;
/// Shapes within this relative distance of each other count as balanced.
pub const BALANCED_SKEW_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Low,
    Moderate,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Skew {
    LowDetailSkewed,
    HighDetailSkewed,
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modality {
    Bimodal,
    UnimodalConcentrated,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexityClass {
    pub level: Level,
    pub skew: Skew,
    pub modality: Modality,
}

/// Interprets the scene descriptors `(mu, alpha, beta)`.
pub fn classify<T: Real>(mu: T, alpha: T, beta: T) -> ComplexityClass {
    let level = if mu < T::lit(LOW_COMPLEXITY_BELOW) {
        Level::Low
    } else if mu > T::lit(HIGH_COMPLEXITY_ABOVE) {
        Level::High
    } else {
        Level::Moderate
    };
    let skew = if (alpha - beta).abs() <= T::lit(BALANCED_SKEW_BAND) * alpha.max(beta) {
        Skew::Balanced
    } else if alpha < beta {
        Skew::LowDetailSkewed
    } else {
        Skew::HighDetailSkewed
    };
    let one = T::one();
    let modality = if alpha < one && beta < one {
        Modality::Bimodal
    } else if alpha > one && beta > one {
        Modality::UnimodalConcentrated
    } else {
        Modality::Indeterminate
    };
    ComplexityClass { level, skew, modality }
}

pub fn classify_profile<T: Real>(p: &SceneProfile<T>) -> ComplexityClass {
    classify(p.mu, p.alpha, p.beta)
}
