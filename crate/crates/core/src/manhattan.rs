//! The Manhattan model: `2N` support points `(j, y mu)` for columns
//! `j = 1..N`, and step-function classifiers `f(s) = sum_j alpha_j 1[s in I_j]`
//! with `I_j = (j - eps, j + eps)`. A point is labelled `+1` above `f` and
//! `-1` below it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::rand_core::RngCore;
use rand::Rng;

use crate::numerics::{derive_substream, powf, LimitExcess};
use crate::stats::Estimate;
use crate::{Error, Result};

/// Loss contributed by each occupied column: one of its two support points,
/// each of mass `1/(2N)`, is misclassified.
pub const OCCUPIED_COLUMN_LOSS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManhattanSpec {
    columns: usize,
    mu: f64,
}

impl ManhattanSpec {
    pub fn new(columns: usize, mu: f64) -> Result<Self> {
        if columns == 0 {
            return Err(Error::domain("the Manhattan model needs at least one column"));
        }
        if !(mu > 0.0 && mu < 0.25) {
            return Err(Error::domain(format!("mu must lie in (0, 1/4), got {mu}")));
        }
        Ok(ManhattanSpec { columns, mu })
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The `2N` support points in column order, positive first.
    pub fn support(&self) -> Vec<ManhattanSample> {
        (1..=self.columns)
            .flat_map(|s| [ManhattanSample::new(s, 1, self.mu), ManhattanSample::new(s, -1, self.mu)])
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManhattanSample {
    /// Column, `1..=N`.
    pub s: usize,
    pub t: f64,
    pub y: i8,
}

impl ManhattanSample {
    pub fn new(s: usize, y: i8, mu: f64) -> Self {
        ManhattanSample { s, t: f64::from(y) * mu, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepClassifier {
    /// `alpha_j` for columns `1..=N`, stored at index `j - 1`.
    pub levels: Vec<f64>,
    pub epsilon: f64,
}

impl StepClassifier {
    pub fn zero(columns: usize, epsilon: f64) -> Self {
        StepClassifier { levels: vec![0.0; columns], epsilon }
    }

    /// `f(s)`.
    pub fn value_at(&self, s: f64) -> f64 {
        let j = libm::round(s);
        if j >= 1.0 && j <= self.levels.len() as f64 && (s - j).abs() < self.epsilon {
            self.levels[j as usize - 1]
        } else {
            0.0
        }
    }
}

/// Which class an exactly tied mixed column serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieConvention {
    ServePositive,
    ServeNegative,
}

pub fn sample_manhattan<R: RngCore + ?Sized>(spec: &ManhattanSpec, n: usize, rng: &mut R) -> Vec<ManhattanSample> {
    (0..n)
        .map(|_| {
            let k = rng.random_range(0..2 * spec.columns);
            let y = if k % 2 == 0 { 1 } else { -1 };
            ManhattanSample::new(k / 2 + 1, y, spec.mu)
        })
        .collect()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain(format!("eps must lie in (0, 1/2) for the step classifier, got {epsilon}")));
    }
    Ok(())
}

/// The robust step classifier, serving the positive class on exact ties.
pub fn fit_manhattan_robust(training: &[ManhattanSample], spec: &ManhattanSpec, epsilon: f64) -> Result<StepClassifier> {
    fit_manhattan_robust_with(training, spec, epsilon, TieConvention::ServePositive)
}

/// Per column: empty gives 0; one class only gives the smallest level that
/// keeps that class robustly correct; mixed columns give 0 when `eps <= mu`
/// and otherwise serve the majority with `+-(mu - eps)`.
pub fn fit_manhattan_robust_with(
    training: &[ManhattanSample],
    spec: &ManhattanSpec,
    epsilon: f64,
    tie: TieConvention,
) -> Result<StepClassifier> {
    check_epsilon(epsilon)?;
    let n_cols = spec.columns;
    let mut pos = vec![0usize; n_cols];
    let mut neg = vec![0usize; n_cols];
    for p in training {
        if p.s == 0 || p.s > n_cols {
            return Err(Error::domain(format!("column {} outside 1..={n_cols}", p.s)));
        }
        if p.y > 0 {
            pos[p.s - 1] += 1;
        } else {
            neg[p.s - 1] += 1;
        }
    }
    let mu = spec.mu;
    let levels = pos
        .iter()
        .zip(&neg)
        .map(|(&p, &q)| match (p, q) {
            (0, 0) => 0.0,
            (_, 0) => f64::min(0.0, mu - epsilon),
            (0, _) => f64::max(0.0, epsilon - mu),
            _ if epsilon <= mu => 0.0,
            _ if p > q => mu - epsilon,
            _ if q > p => epsilon - mu,
            _ => match tie {
                TieConvention::ServePositive => mu - epsilon,
                TieConvention::ServeNegative => epsilon - mu,
            },
        })
        .collect();
    Ok(StepClassifier { levels, epsilon })
}

/// `+1` above the boundary, `-1` below, a fair coin on it.
pub fn classify<R: RngCore + ?Sized>(clf: &StepClassifier, point: (f64, f64), rng: &mut R) -> i8 {
    let f = clf.value_at(point.0);
    if point.1 > f {
        1
    } else if point.1 < f {
        -1
    } else if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// Expected clean 0-1 loss over the uniform support (boundary points count
/// one half).
pub fn support_loss(clf: &StepClassifier, spec: &ManhattanSpec) -> f64 {
    let support = spec.support();
    let total: f64 = support
        .iter()
        .map(|p| {
            let margin = f64::from(p.y) * (p.t - clf.value_at(p.s as f64));
            if margin < 0.0 {
                1.0
            } else if margin == 0.0 {
                0.5
            } else {
                0.0
            }
        })
        .sum();
    total / support.len() as f64
}

/// `sum_j |alpha_j| * 2 eps`.
pub fn l1_norm(clf: &StepClassifier) -> f64 {
    clf.levels.iter().map(|a| a.abs()).sum::<f64>() * 2.0 * clf.epsilon
}

/// Exact `L_n`: zero when `eps < 2 mu`, otherwise
/// `c (1 - (1 - 1/N)^n)` with `c` = [`OCCUPIED_COLUMN_LOSS`].
pub fn exact_manhattan_loss(spec: &ManhattanSpec, epsilon: f64, n: u64) -> Result<f64> {
    exact_manhattan_parts(spec, epsilon, n).map(|p| p.total())
}

/// [`exact_manhattan_loss`] as `c + (-c (1 - 1/N)^n)`; the excess keeps
/// successive values distinct after the total has rounded to `c`.
pub fn exact_manhattan_parts(spec: &ManhattanSpec, epsilon: f64, n: u64) -> Result<LimitExcess> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::domain(format!("eps must lie in (0, 1/2], got {epsilon}")));
    }
    let mu = spec.mu;
    if epsilon == 2.0 * mu {
        return Err(Error::Unsupported(format!("eps = 2 mu = {epsilon} is a boundary case with no closed form")));
    }
    if epsilon < 2.0 * mu {
        return Ok(LimitExcess { limit: 0.0, excess: 0.0 });
    }
    let empty = powf(1.0 - 1.0 / spec.columns as f64, n as f64);
    Ok(LimitExcess { limit: OCCUPIED_COLUMN_LOSS, excess: -OCCUPIED_COLUMN_LOSS * empty })
}

/// One replication: sample, fit, evaluate exactly on the support.
pub fn manhattan_replication<R: RngCore + ?Sized>(
    spec: &ManhattanSpec,
    epsilon: f64,
    n: usize,
    rng: &mut R,
) -> Result<f64> {
    let training = sample_manhattan(spec, n, rng);
    let clf = fit_manhattan_robust(&training, spec, epsilon)?;
    Ok(support_loss(&clf, spec))
}

pub fn mc_manhattan_loss(
    spec: &ManhattanSpec,
    epsilon: f64,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<Estimate> {
    check_epsilon(epsilon)?;
    let mut values = Vec::with_capacity(replications);
    for r in 0..replications {
        values.push(manhattan_replication(spec, epsilon, n, &mut derive_substream(seed, r as u64))?);
    }
    Estimate::from_values(&values)
}
