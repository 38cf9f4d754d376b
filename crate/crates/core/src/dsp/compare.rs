use std::fmt;

use serde::{Deserialize, Serialize};

use crate::imageio::SceneMeta;

/// Linear resolution deviation above which profiles start to drift.
pub const RESOLUTION_DRIFT_ABOVE: f64 = 0.10;
/// Linear resolution deviation at which high-frequency content changes materially.
pub const RESOLUTION_BREAK_AT: f64 = 0.25;
/// Coverage-area ratio beyond which extents are not comparable.
pub const EXTENT_RATIO_ABOVE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComparabilityWarning {
    ResolutionDrift,
    ResolutionBreak,
    ExtentMismatch,
    PolicyMismatch,
}

impl ComparabilityWarning {
    pub fn code(self) -> &'static str {
        match self {
            Self::ResolutionDrift => "RESOLUTION_DRIFT",
            Self::ResolutionBreak => "RESOLUTION_BREAK",
            Self::ExtentMismatch => "EXTENT_MISMATCH",
            Self::PolicyMismatch => "POLICY_MISMATCH",
        }
    }
}

impl fmt::Display for ComparabilityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityReport {
    /// Smaller over larger linear resolution, taken on the worse axis.
    pub resolution_ratio: Option<f64>,
    /// Larger over smaller coverage area.
    pub extent_ratio: Option<f64>,
    pub policy_match: Option<bool>,
    pub warnings: Vec<ComparabilityWarning>,
}

impl ComparabilityReport {
    pub fn is_comparable(&self) -> bool {
        self.warnings.is_empty()
    }
}

fn axis_ratio(p: usize, q: usize) -> f64 {
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    if hi == 0 {
        1.0
    } else {
        lo as f64 / hi as f64
    }
}

pub fn check_comparability(x: &SceneMeta, y: &SceneMeta) -> ComparabilityReport {
    let mut warnings = Vec::new();

    let resolution_ratio = match (x.resolution, y.resolution) {
        (Some((xw, xh)), Some((yw, yh))) => Some(axis_ratio(xw, yw).min(axis_ratio(xh, yh))),
        _ => None,
    };
    if let Some(r) = resolution_ratio {
        let deviation = 1.0 - r;
        if deviation >= RESOLUTION_BREAK_AT {
            warnings.push(ComparabilityWarning::ResolutionBreak);
        } else if deviation > RESOLUTION_DRIFT_ABOVE {
            warnings.push(ComparabilityWarning::ResolutionDrift);
        }
    }

    let extent_ratio = match (x.coverage_area_km2, y.coverage_area_km2) {
        (Some(p), Some(q)) if p > 0.0 && q > 0.0 => Some(p.max(q) / p.min(q)),
        _ => None,
    };
    if extent_ratio.is_some_and(|r| r > EXTENT_RATIO_ABOVE) {
        warnings.push(ComparabilityWarning::ExtentMismatch);
    }

    let policy_match = match (&x.collection_policy, &y.collection_policy) {
        (Some(p), Some(q)) => Some(p == q),
        _ => None,
    };
    if policy_match == Some(false) {
        warnings.push(ComparabilityWarning::PolicyMismatch);
    }

    ComparabilityReport {
        resolution_ratio,
        extent_ratio,
        policy_match,
        warnings,
    }
}
