//! Loss curves: `(n, mean, stderr)` sequences for one adversary strength.

use alloc::vec::Vec;

use crate::stats::Estimate;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub n: u64,
    pub mean_loss: f64,
    pub stderr: f64,
    pub replications: u64,
}

impl CurvePoint {
    pub fn from_estimate(n: u64, e: Estimate) -> Self {
        CurvePoint { n, mean_loss: e.mean, stderr: e.stderr, replications: e.replications as u64 }
    }

    pub fn exact(n: u64, value: f64) -> Self {
        CurvePoint { n, mean_loss: value, stderr: 0.0, replications: 1 }
    }
}

/// Points are kept sorted by `n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossCurve {
    pub epsilon: f64,
    pub points: Vec<CurvePoint>,
}

impl LossCurve {
    pub fn new(epsilon: f64, mut points: Vec<CurvePoint>) -> Self {
        points.sort_by_key(|p| p.n);
        LossCurve { epsilon, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
