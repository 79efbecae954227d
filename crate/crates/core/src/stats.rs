//! Replication summaries.

use alloc::format;

use crate::{Error, Result};

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub replications: usize,
}

impl Estimate {
    /// An exact value: no sampling error.
    pub fn exact(value: f64) -> Self {
        Estimate { mean: value, stderr: 0.0, replications: 1 }
    }

    /// Two-pass mean and `s / sqrt(k)` in index order, so the result does
    /// not depend on how the values were produced.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let k = values.len();
        if k < 2 {
            return Err(Error::domain(format!("need at least 2 replications, got {k}")));
        }
        let mean = values.iter().sum::<f64>() / k as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let var = ss / (k - 1) as f64;
        Ok(Estimate { mean, stderr: libm::sqrt(var / k as f64), replications: k })
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        libm::sqrt(self.stderr * self.stderr + other.stderr * other.stderr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr() {
        let e = Estimate::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.mean, 2.5);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((e.stderr - libm::sqrt(5.0 / 12.0)).abs() < 1e-15);
        assert_eq!(e.replications, 4);
    }

    #[test]
    fn constant_values_have_zero_stderr() {
        let e = Estimate::from_values(&[0.25; 10]).unwrap();
        assert_eq!(e.mean, 0.25);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn rejects_single_value() {
        assert!(Estimate::from_values(&[1.0]).is_err());
    }
}
