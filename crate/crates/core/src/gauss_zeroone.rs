//! One-dimensional Gaussian mixture under the 0-1 loss.
//!
//! Adversarial training reduces to a plain threshold fit on the neutralized
//! dataset `x' = x - y eps`; the empirical objective `sum_i y_i 1[x'_i < w]`
//! is piecewise constant, so its minimizers form a union of intervals from
//! which a tiebreak policy picks the threshold.

use alloc::format;
use alloc::vec::Vec;

use rand::rand_core::RngCore;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::curve::{CurvePoint, LossCurve};
use crate::numerics::{derive_substream, std_normal_cdf_unchecked};
use crate::stats::Estimate;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabeledSample1D {
    pub x: f64,
    /// `+1` or `-1`.
    pub y: i8,
}

impl LabeledSample1D {
    pub fn new(x: f64, y: i8) -> Self {
        debug_assert!(y == 1 || y == -1);
        LabeledSample1D { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SegmentKind {
    /// `(lo, hi]` with both ends finite.
    LeftOpenRightClosed,
    /// `(-inf, hi]`, represented by the point `hi`.
    SpecialLeft,
    /// `(lo, +inf)`, represented by the point `lo + eta`.
    SpecialRight,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub kind: SegmentKind,
    /// The point chosen for this segment when it is unbounded.
    pub representative: f64,
}

impl Segment {
    pub fn contains(&self, w: f64) -> bool {
        match self.kind {
            SegmentKind::SpecialLeft => w <= self.hi,
            SegmentKind::SpecialRight => w > self.lo,
            SegmentKind::LeftOpenRightClosed => self.lo < w && w <= self.hi,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.kind == SegmentKind::LeftOpenRightClosed
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MinimizerRegion {
    pub segments: Vec<Segment>,
    pub objective_value: f64,
}

impl MinimizerRegion {
    pub fn contains(&self, w: f64) -> bool {
        self.segments.iter().any(|s| s.contains(w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TiebreakPolicy {
    /// Uniform over the minimizing set.
    Agnostic,
    /// The minimizer closest to zero.
    OptimalHindsight,
}

/// `x' = x - y eps`.
pub fn neutralize(dataset: &[LabeledSample1D], epsilon: f64) -> Vec<LabeledSample1D> {
    dataset
        .iter()
        .map(|s| LabeledSample1D { x: s.x - f64::from(s.y) * epsilon, y: s.y })
        .collect()
}

/// `sum_i y_i 1[x'_i < w]`.
pub fn empirical_robust_objective(neutralized: &[LabeledSample1D], w: f64) -> f64 {
    neutralized
        .iter()
        .filter(|s| s.x < w)
        .map(|s| f64::from(s.y))
        .sum()
}

/// `eta` used to represent the right-unbounded interval.
pub fn right_offset(neutralized: &[LabeledSample1D]) -> f64 {
    1e-9 * (1.0 + neutralized.iter().map(|s| s.x.abs()).fold(0.0, f64::max))
}

/// All intervals on which the empirical objective attains its minimum.
///
/// With distinct sorted values `a_1 < ... < a_m` and prefix label sums
/// `S_k`, the objective is `0` on `(-inf, a_1]`, `S_k` on `(a_k, a_{k+1}]`
/// and `S_m` on `(a_m, inf)`. Adjacent bounded minimizing intervals are
/// merged.
pub fn minimizer_region(neutralized: &[LabeledSample1D]) -> Result<MinimizerRegion> {
    if neutralized.is_empty() {
        return Err(Error::domain("minimizer region of an empty dataset"));
    }
    if let Some(s) = neutralized.iter().find(|s| !s.x.is_finite()) {
        return Err(Error::domain(format!("non-finite sample value {}", s.x)));
    }
    let mut pts: Vec<(f64, i32)> = neutralized.iter().map(|s| (s.x, i32::from(s.y))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Distinct values with cumulative label sums through each value.
    let mut values: Vec<f64> = Vec::new();
    let mut prefix: Vec<i32> = Vec::new();
    let mut acc = 0;
    for (x, y) in pts {
        acc += y;
        if values.last() == Some(&x) {
            *prefix.last_mut().unwrap() = acc;
        } else {
            values.push(x);
            prefix.push(acc);
        }
    }
    let m = values.len();
    let min = prefix.iter().copied().fold(0, i32::min);
    let eta = right_offset(neutralized);

    let mut segments: Vec<Segment> = Vec::new();
    if min == 0 {
        segments.push(Segment {
            lo: f64::NEG_INFINITY,
            hi: values[0],
            kind: SegmentKind::SpecialLeft,
            representative: values[0],
        });
    }
    for k in 0..m - 1 {
        if prefix[k] != min {
            continue;
        }
        let (lo, hi) = (values[k], values[k + 1]);
        match segments.last_mut() {
            Some(last) if last.is_bounded() && last.hi == lo => {
                last.hi = hi;
                last.representative = hi;
            }
            _ => segments.push(Segment { lo, hi, kind: SegmentKind::LeftOpenRightClosed, representative: hi }),
        }
    }
    if prefix[m - 1] == min {
        segments.push(Segment {
            lo: values[m - 1],
            hi: f64::INFINITY,
            kind: SegmentKind::SpecialRight,
            representative: values[m - 1] + eta,
        });
    }
    Ok(MinimizerRegion { segments, objective_value: f64::from(min) })
}

/// Picks a threshold from the minimizing set.
///
/// `Agnostic` samples uniformly over the union of the bounded segments
/// (weighted by length); when there are none it picks uniformly among the
/// unbounded segments' representative points. `OptimalHindsight` returns the
/// point of least absolute value in the closure of the region.
pub fn tiebreak<R: RngCore + ?Sized>(region: &MinimizerRegion, policy: TiebreakPolicy, rng: &mut R) -> f64 {
    match policy {
        TiebreakPolicy::OptimalHindsight => closest_to_zero(region),
        TiebreakPolicy::Agnostic => agnostic(region, rng),
    }
}

fn closest_to_zero(region: &MinimizerRegion) -> f64 {
    let mut best = f64::INFINITY;
    for s in &region.segments {
        let c = if s.lo <= 0.0 && 0.0 <= s.hi {
            0.0
        } else if s.lo > 0.0 {
            s.lo
        } else {
            s.hi
        };
        if c.abs() < best.abs() {
            best = c;
        }
    }
    best
}

fn agnostic<R: RngCore + ?Sized>(region: &MinimizerRegion, rng: &mut R) -> f64 {
    let total: f64 = region
        .segments
        .iter()
        .filter(|s| s.is_bounded())
        .map(|s| s.hi - s.lo)
        .sum();
    if total > 0.0 {
        let mut target = rng.random::<f64>() * total;
        let bounded: Vec<&Segment> = region.segments.iter().filter(|s| s.is_bounded()).collect();
        for s in &bounded {
            let len = s.hi - s.lo;
            if target < len {
                // (lo, hi]: measure from the right end so lo is excluded.
                let w = s.hi - target;
                return if w > s.lo { w } else { s.hi };
            }
            target -= len;
        }
        return bounded.last().unwrap().hi;
    }
    let k = rng.random_range(0..region.segments.len());
    region.segments[k].representative
}

/// Clean test loss `1/2 + 1/2 [Phi((w - mu)/sigma) - Phi((w + mu)/sigma)]`.
pub fn zero_one_test_loss(w: f64, mu: f64, sigma: f64) -> f64 {
    if w.is_infinite() {
        return 0.5;
    }
    0.5 + 0.5 * (std_normal_cdf_unchecked((w - mu) / sigma) - std_normal_cdf_unchecked((w + mu) / sigma))
}

/// `n` points of the mixture `y ~ U{+-1}`, `x | y ~ N(y mu, sigma^2)`.
pub fn sample_gaussian_1d<R: RngCore + ?Sized>(mu: f64, sigma: f64, n: usize, rng: &mut R) -> Vec<LabeledSample1D> {
    (0..n)
        .map(|_| {
            let y: i8 = if rng.random::<bool>() { 1 } else { -1 };
            let z: f64 = rng.sample(StandardNormal);
            LabeledSample1D { x: f64::from(y) * mu + sigma * z, y }
        })
        .collect()
}

/// One replication: sample, neutralize, pick a threshold, score it.
pub fn zero_one_replication<R: RngCore + ?Sized>(
    mu: f64,
    sigma: f64,
    epsilon: f64,
    policy: TiebreakPolicy,
    n: usize,
    rng: &mut R,
) -> Result<f64> {
    let data = sample_gaussian_1d(mu, sigma, n, rng);
    let region = minimizer_region(&neutralize(&data, epsilon))?;
    let w = tiebreak(&region, policy, rng);
    Ok(zero_one_test_loss(w, mu, sigma))
}

/// Stream index of replication `r` at the `k`-th training-set size.
pub fn zero_one_stream_index(k: usize, r: usize) -> u64 {
    ((k as u64) << 32) | r as u64
}

pub fn mc_zero_one_curve(
    mu: f64,
    sigma: f64,
    epsilon: f64,
    policy: TiebreakPolicy,
    n_values: &[usize],
    replications: usize,
    seed: u64,
) -> Result<LossCurve> {
    if !(mu > 0.0 && sigma > 0.0 && epsilon >= 0.0) {
        return Err(Error::domain(format!(
            "need mu > 0, sigma > 0, eps >= 0; got mu={mu}, sigma={sigma}, eps={epsilon}"
        )));
    }
    let mut points = Vec::with_capacity(n_values.len());
    for (k, &n) in n_values.iter().enumerate() {
        if n == 0 {
            return Err(Error::domain("training-set size must be positive"));
        }
        let mut values = Vec::with_capacity(replications);
        for r in 0..replications {
            let mut rng = derive_substream(seed, zero_one_stream_index(k, r));
            values.push(zero_one_replication(mu, sigma, epsilon, policy, n, &mut rng)?);
        }
        points.push(CurvePoint::from_estimate(n as u64, Estimate::from_values(&values)?));
    }
    Ok(LossCurve::new(epsilon, points))
}
