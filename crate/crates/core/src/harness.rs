//! Sweep definitions, per-cell evaluation and trend detection.
//!
//! A sweep is a grid of `(eps, n, replication)` cells. Each cell draws from
//! its own substream, so any evaluation order (and any degree of
//! parallelism) produces the same curves. The parallel driver lives in the
//! std crate; [`run_sweep_serial`] is the reference order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::curve::{CurvePoint, LossCurve};
use crate::gauss_linear::{exact_generalization_loss, mc_linear_replication, AdversarySetting, GaussianMixtureSpec};
use crate::gauss_zeroone::{zero_one_replication, TiebreakPolicy};
use crate::manhattan::{manhattan_replication, ManhattanSpec};
use crate::numerics::derive_substream;
use crate::stats::Estimate;
use crate::trainers::{linreg_replication, svm_replication, LinRegConfig, SvmConfig, XDist};
use crate::{Error, Result};

/// Default gate for [`detect_trend`]: a difference counts when it exceeds
/// three combined standard errors.
pub const DEFAULT_NOISE_MULTIPLIER: f64 = 3.0;

const MAX_EPSILONS: usize = 1 << 16;
const MAX_N_VALUES: usize = 1 << 16;
const MAX_REPLICATIONS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Family {
    GaussLinearExact,
    GaussLinearMC,
    GaussZeroOne,
    Manhattan,
    Svm,
    LinReg,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::GaussLinearExact,
        Family::GaussLinearMC,
        Family::GaussZeroOne,
        Family::Manhattan,
        Family::Svm,
        Family::LinReg,
    ];

    /// Stable identifier mixed into cell seeds. Never renumber.
    pub fn id(self) -> u8 {
        match self {
            Family::GaussLinearExact => 1,
            Family::GaussLinearMC => 2,
            Family::GaussZeroOne => 3,
            Family::Manhattan => 4,
            Family::Svm => 5,
            Family::LinReg => 6,
        }
    }

    /// Name used in the `family` CSV column.
    pub fn name(self) -> &'static str {
        match self {
            Family::GaussLinearExact => "gauss-linear-exact",
            Family::GaussLinearMC => "gauss-linear-mc",
            Family::GaussZeroOne => "gauss-zeroone",
            Family::Manhattan => "manhattan",
            Family::Svm => "svm",
            Family::LinReg => "linreg",
        }
    }

    pub fn is_exact(self) -> bool {
        self == Family::GaussLinearExact
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FamilyParams {
    GaussLinear { spec: GaussianMixtureSpec, weight_bound: f64 },
    ZeroOne { mu: f64, sigma: f64, tiebreak: TiebreakPolicy },
    Manhattan { spec: ManhattanSpec },
    Svm { mu: [f64; 2], lambda: f64, step_size: f64, iterations: usize },
    LinReg { w_star: f64, x_dist: XDist },
}

impl FamilyParams {
    fn fits(&self, family: Family) -> bool {
        matches!(
            (family, self),
            (Family::GaussLinearExact | Family::GaussLinearMC, FamilyParams::GaussLinear { .. })
                | (Family::GaussZeroOne, FamilyParams::ZeroOne { .. })
                | (Family::Manhattan, FamilyParams::Manhattan { .. })
                | (Family::Svm, FamilyParams::Svm { .. })
                | (Family::LinReg, FamilyParams::LinReg { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentConfig {
    pub family: Family,
    pub params: FamilyParams,
    pub epsilons: Vec<f64>,
    pub n_values: Vec<u64>,
    pub replications: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.params.fits(self.family) {
            return Err(Error::domain(format!("parameters do not match family {}", self.family.name())));
        }
        if self.epsilons.is_empty() {
            return Err(Error::domain("the epsilon list is empty"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::domain(format!("epsilon must be finite and >= 0, got {e}")));
        }
        if self.n_values.is_empty() {
            return Err(Error::domain("the n list is empty"));
        }
        if self.n_values[0] == 0 {
            return Err(Error::domain("training-set sizes must be positive"));
        }
        if let Some(w) = self.n_values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!("n values must be strictly increasing, got {} then {}", w[0], w[1])));
        }
        if self.epsilons.len() > MAX_EPSILONS || self.n_values.len() > MAX_N_VALUES {
            return Err(Error::domain("grid too large for the cell seeding scheme"));
        }
        if !self.family.is_exact() {
            if self.replications < 2 {
                return Err(Error::domain(format!("need at least 2 replications, got {}", self.replications)));
            }
            if self.replications > MAX_REPLICATIONS {
                return Err(Error::domain(format!("at most {MAX_REPLICATIONS} replications per cell")));
            }
        }
        match &self.params {
            FamilyParams::GaussLinear { weight_bound, .. } => {
                AdversarySetting::new(0.0, *weight_bound)?;
            }
            FamilyParams::ZeroOne { mu, sigma, .. } => {
                if !(*mu > 0.0 && *sigma > 0.0 && mu.is_finite() && sigma.is_finite()) {
                    return Err(Error::domain(format!("need mu > 0 and sigma > 0, got mu={mu}, sigma={sigma}")));
                }
            }
            FamilyParams::Manhattan { .. } => {
                if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && **e < 0.5)) {
                    return Err(Error::domain(format!("Manhattan eps must lie in (0, 1/2), got {e}")));
                }
            }
            FamilyParams::Svm { .. } => {
                for &e in &self.epsilons {
                    self.svm_config(e).expect("params checked").validate()?;
                }
            }
            FamilyParams::LinReg { .. } => {}
        }
        Ok(())
    }

    fn svm_config(&self, epsilon: f64) -> Option<SvmConfig> {
        match self.params {
            FamilyParams::Svm { lambda, step_size, iterations, .. } => {
                Some(SvmConfig { lambda, epsilon, step_size, iterations })
            }
            _ => None,
        }
    }

    /// Number of replications actually run per `(eps, n)` point.
    pub fn replications_per_point(&self) -> usize {
        if self.family.is_exact() {
            0
        } else {
            self.replications
        }
    }
}

/// SplitMix64 finalizer: a bijection on `u64`.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Substream of one cell: family (8 bits), eps index (16), n index (16) and
/// replication (24) packed and mixed. Distinct cells get distinct streams.
pub fn cell_stream_index(family: Family, eps_index: usize, n_index: usize, replication: usize) -> u64 {
    debug_assert!(eps_index < MAX_EPSILONS && n_index < MAX_N_VALUES && replication < MAX_REPLICATIONS);
    let packed = (u64::from(family.id()) << 56)
        | ((eps_index as u64) << 40)
        | ((n_index as u64) << 24)
        | replication as u64;
    mix64(packed)
}

/// One replication of a stochastic family.
pub fn evaluate_cell(config: &ExperimentConfig, eps_index: usize, n_index: usize, replication: usize) -> Result<f64> {
    let epsilon = config.epsilons[eps_index];
    let n = config.n_values[n_index];
    let mut rng = derive_substream(
        config.master_seed,
        cell_stream_index(config.family, eps_index, n_index, replication),
    );
    let size = usize::try_from(n).map_err(|_| Error::domain(format!("n = {n} does not fit in memory")))?;
    match (&config.params, config.family) {
        (FamilyParams::GaussLinear { spec, weight_bound }, Family::GaussLinearMC) => {
            let setting = AdversarySetting::new(epsilon, *weight_bound)?;
            Ok(mc_linear_replication(spec, &setting, n, &mut rng))
        }
        (FamilyParams::ZeroOne { mu, sigma, tiebreak }, _) => {
            zero_one_replication(*mu, *sigma, epsilon, *tiebreak, size, &mut rng)
        }
        (FamilyParams::Manhattan { spec }, _) => manhattan_replication(spec, epsilon, size, &mut rng),
        (FamilyParams::Svm { mu, .. }, _) => {
            let cfg = config.svm_config(epsilon).expect("params checked");
            svm_replication(mu, &cfg, size, &mut rng)
        }
        (FamilyParams::LinReg { w_star, x_dist }, _) => {
            linreg_replication(&LinRegConfig::new(epsilon, *w_star, *x_dist), size, &mut rng)
        }
        _ => Err(Error::domain(format!("family {} has no replication kernel", config.family.name()))),
    }
}

/// Closed-form value at one `(eps, n)` point of an exact family.
pub fn evaluate_exact(config: &ExperimentConfig, eps_index: usize, n_index: usize) -> Result<f64> {
    match &config.params {
        FamilyParams::GaussLinear { spec, weight_bound } if config.family.is_exact() => {
            let setting = AdversarySetting::new(config.epsilons[eps_index], *weight_bound)?;
            exact_generalization_loss(spec, &setting, config.n_values[n_index] as f64)
        }
        _ => Err(Error::domain(format!("family {} has no closed form", config.family.name()))),
    }
}

/// Folds per-cell values, ordered by `(eps, n, replication)`, into curves.
/// For exact families `values` holds one entry per `(eps, n)`.
pub fn assemble_curves(config: &ExperimentConfig, values: &[f64]) -> Result<Vec<LossCurve>> {
    let per_point = config.replications_per_point().max(1);
    let expected = config.epsilons.len() * config.n_values.len() * per_point;
    if values.len() != expected {
        return Err(Error::domain(format!("expected {expected} cell values, got {}", values.len())));
    }
    let mut chunks = values.chunks(per_point);
    let mut curves = Vec::with_capacity(config.epsilons.len());
    for &epsilon in &config.epsilons {
        let mut points = Vec::with_capacity(config.n_values.len());
        for &n in &config.n_values {
            let chunk = chunks.next().expect("length checked");
            points.push(if config.family.is_exact() {
                CurvePoint::exact(n, chunk[0])
            } else {
                CurvePoint::from_estimate(n, Estimate::from_values(chunk)?)
            });
        }
        curves.push(LossCurve::new(epsilon, points));
    }
    Ok(curves)
}

/// All cells in aggregation order.
pub fn cells(config: &ExperimentConfig) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    let reps = config.replications_per_point().max(1);
    (0..config.epsilons.len())
        .flat_map(move |e| (0..config.n_values.len()).flat_map(move |k| (0..reps).map(move |r| (e, k, r))))
}

/// Value of one cell, whatever the family.
pub fn evaluate(config: &ExperimentConfig, cell: (usize, usize, usize)) -> Result<f64> {
    if config.family.is_exact() {
        evaluate_exact(config, cell.0, cell.1)
    } else {
        evaluate_cell(config, cell.0, cell.1, cell.2)
    }
}

pub fn run_sweep_serial(config: &ExperimentConfig) -> Result<Vec<LossCurve>> {
    config.validate()?;
    let values = cells(config).map(|c| evaluate(config, c)).collect::<Result<Vec<f64>>>()?;
    assemble_curves(config, &values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TrendLabel {
    Decreasing,
    Increasing,
    DoubleDescentLike,
    Flat,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrendVerdict {
    pub label: TrendLabel,
    /// `n` at which the significant differences change sign.
    pub change_points: Vec<u64>,
    pub confidence_note: String,
}

/// Classifies a curve from the signs of its significant successive
/// differences. A difference is significant when `|delta| > k * se`, with
/// `se` the combined standard error of its two points.
pub fn detect_trend(curve: &LossCurve, noise_multiplier: f64) -> Result<TrendVerdict> {
    if curve.len() < 4 {
        return Err(Error::domain(format!("trend detection needs at least 4 points, got {}", curve.len())));
    }
    if !(noise_multiplier > 0.0 && noise_multiplier.is_finite()) {
        return Err(Error::domain(format!("noise multiplier must be positive, got {noise_multiplier}")));
    }
    let mut significant: Vec<(u64, bool)> = Vec::new();
    for w in curve.points.windows(2) {
        let delta = w[1].mean_loss - w[0].mean_loss;
        let se = libm::sqrt(w[0].stderr * w[0].stderr + w[1].stderr * w[1].stderr);
        if delta.abs() > noise_multiplier * se {
            significant.push((w[0].n, delta > 0.0));
        }
    }
    let mut runs: Vec<bool> = Vec::new();
    let mut change_points = Vec::new();
    for &(n, up) in &significant {
        if runs.last() != Some(&up) {
            if !runs.is_empty() {
                change_points.push(n);
            }
            runs.push(up);
        }
    }
    let label = match runs.as_slice() {
        [] => TrendLabel::Flat,
        [false] => TrendLabel::Decreasing,
        [true] => TrendLabel::Increasing,
        [false, true, false] => TrendLabel::DoubleDescentLike,
        _ => TrendLabel::Inconclusive,
    };
    let confidence_note = format!(
        "{} of {} differences significant at {} x combined stderr",
        significant.len(),
        curve.len() - 1,
        noise_multiplier
    );
    Ok(TrendVerdict { label, change_points, confidence_note })
}
