//! Adversarially trained soft-margin SVM (2-D Gaussian mixture, hinge loss)
//! and adversarially trained 1-D linear regression (squared loss).

use alloc::format;
use alloc::vec::Vec;

use rand::rand_core::RngCore;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::numerics::{sign, sqrt, std_normal_cdf_unchecked, std_normal_pdf};
use crate::{Error, Result};

/// A labelled 2-D point, `y = +-1`.
pub type Sample2 = ([f64; 2], f64);

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    pub w: [f64; 2],
    pub b: f64,
}

impl SvmModel {
    pub const ZERO: SvmModel = SvmModel { w: [0.0, 0.0], b: 0.0 };

    fn score(&self, x: &[f64; 2]) -> f64 {
        self.w[0] * x[0] + self.w[1] * x[1] - self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmConfig {
    pub lambda: f64,
    pub epsilon: f64,
    /// Initial step; iteration `k` (from 1) uses `step_size / sqrt(k)`.
    pub step_size: f64,
    pub iterations: usize,
}

impl SvmConfig {
    pub fn new(epsilon: f64) -> Self {
        SvmConfig { lambda: 1e-3, epsilon, step_size: 0.05, iterations: 5000 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::domain(format!("step size must be positive, got {}", self.step_size)));
        }
        if self.iterations == 0 {
            return Err(Error::domain("iterations must be positive"));
        }
        Ok(())
    }
}

/// `max{0, 1 - y(<w, x> - b) + eps ||w||_1}`, the hinge loss at the worst
/// point of the `l_inf` ball around `x`.
pub fn robust_hinge_loss(model: &SvmModel, sample: &Sample2, epsilon: f64) -> f64 {
    let (x, y) = sample;
    let l1 = model.w[0].abs() + model.w[1].abs();
    f64::max(0.0, 1.0 - y * model.score(x) + epsilon * l1)
}

/// Mean robust hinge plus `lambda/2 ||w||^2`.
pub fn svm_objective(model: &SvmModel, data: &[Sample2], lambda: f64, epsilon: f64) -> f64 {
    let hinge: f64 = data.iter().map(|s| robust_hinge_loss(model, s, epsilon)).sum::<f64>() / data.len() as f64;
    hinge + 0.5 * lambda * (model.w[0] * model.w[0] + model.w[1] * model.w[1])
}

/// Full-batch subgradient descent from `w = 0, b = 0`, returning the iterate
/// with the smallest training objective. The bias is neither penalised nor
/// perturbed.
pub fn train_svm_robust(data: &[Sample2], config: &SvmConfig) -> Result<SvmModel> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::domain("cannot train on an empty dataset"));
    }
    let (lambda, eps) = (config.lambda, config.epsilon);
    let inv_n = 1.0 / data.len() as f64;
    let mut model = SvmModel::ZERO;
    let mut best = (svm_objective(&model, data, lambda, eps), model);

    for k in 1..=config.iterations {
        let mut gw = [lambda * model.w[0], lambda * model.w[1]];
        let mut gb = 0.0;
        let sw = [sign(model.w[0]), sign(model.w[1])];
        for (x, y) in data {
            let l1 = model.w[0].abs() + model.w[1].abs();
            if 1.0 - y * model.score(x) + eps * l1 > 0.0 {
                gw[0] += inv_n * (-y * x[0] + eps * sw[0]);
                gw[1] += inv_n * (-y * x[1] + eps * sw[1]);
                gb += inv_n * y;
            }
        }
        let step = config.step_size / sqrt(k as f64);
        model.w[0] -= step * gw[0];
        model.w[1] -= step * gw[1];
        model.b -= step * gb;

        let obj = svm_objective(&model, data, lambda, eps);
        if !obj.is_finite() {
            return Err(Error::Divergence { iteration: k, value: obj });
        }
        if obj < best.0 {
            best = (obj, model);
        }
    }
    Ok(best.1)
}

/// Expected clean hinge loss for `x ~ N(y mu, I)`, `y ~ U{+-1}`.
///
/// For label `y` the margin is Gaussian with mean `m_y = <w, mu> - y b` and
/// deviation `s = ||w||_2`, and `E max{0, 1 - z} = (1-m) Phi((1-m)/s) +
/// s phi((1-m)/s)`.
pub fn svm_standard_test_loss(model: &SvmModel, mu: &[f64; 2]) -> f64 {
    let wm = model.w[0] * mu[0] + model.w[1] * mu[1];
    let s = sqrt(model.w[0] * model.w[0] + model.w[1] * model.w[1]);
    let per_label = |m: f64| {
        let a = 1.0 - m;
        if s == 0.0 {
            a.max(0.0)
        } else {
            a * std_normal_cdf_unchecked(a / s) + s * std_normal_pdf(a / s)
        }
    };
    0.5 * (per_label(wm - model.b) + per_label(wm + model.b))
}

pub fn sample_gaussian_mixture_2d<R: RngCore + ?Sized>(mu: &[f64; 2], n: usize, rng: &mut R) -> Vec<Sample2> {
    (0..n)
        .map(|_| {
            let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let z0: f64 = rng.sample(StandardNormal);
            let z1: f64 = rng.sample(StandardNormal);
            ([y * mu[0] + z0, y * mu[1] + z1], y)
        })
        .collect()
}

/// One SVM replication: train on `n` fresh points, return the clean test loss.
pub fn svm_replication<R: RngCore + ?Sized>(mu: &[f64; 2], config: &SvmConfig, n: usize, rng: &mut R) -> Result<f64> {
    let data = sample_gaussian_mixture_2d(mu, n, rng);
    let model = train_svm_robust(&data, config)?;
    Ok(svm_standard_test_loss(&model, mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum XDist {
    StandardGaussian,
    /// `Poisson(5) + 1`.
    ShiftedPoisson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinRegConfig {
    pub epsilon: f64,
    pub w_star: f64,
    pub x_dist: XDist,
    pub search_bracket: (f64, f64),
    pub tol: f64,
}

impl LinRegConfig {
    /// Bracket `[-10(1+|w*|), 10(1+|w*|)]`, tolerance `1e-9`.
    pub fn new(epsilon: f64, w_star: f64, x_dist: XDist) -> Self {
        let r = 10.0 * (1.0 + w_star.abs());
        LinRegConfig { epsilon, w_star, x_dist, search_bracket: (-r, r), tol: 1e-9 }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.search_bracket;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain(format!("search bracket must satisfy lo < hi, got [{lo}, {hi}]")));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// `(|y - w x| + eps |w|)^2`.
pub fn robust_squared_loss(w: f64, sample: (f64, f64), epsilon: f64) -> f64 {
    let (x, y) = sample;
    let r = (y - w * x).abs() + epsilon * w.abs();
    r * r
}

pub fn linreg_objective(w: f64, data: &[(f64, f64)], epsilon: f64) -> f64 {
    data.iter().map(|&s| robust_squared_loss(w, s, epsilon)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinRegFit {
    pub w: f64,
    /// The minimiser was found within `tol` of a bracket end, so the bracket
    /// may be too small.
    pub at_boundary: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search of the (convex) robust objective over the bracket.
pub fn train_linreg_robust(data: &[(f64, f64)], config: &LinRegConfig) -> Result<LinRegFit> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::domain("cannot train on an empty dataset"));
    }
    let eps = config.epsilon;
    let obj = |w: f64| linreg_objective(w, data, eps);
    let (lo0, hi0) = config.search_bracket;
    let (mut a, mut b) = (lo0, hi0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (obj(c), obj(d));
    while b - a > config.tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = obj(d);
        }
    }
    let w = polish(0.5 * (a + b), data, eps, config.tol).clamp(lo0, hi0);
    let at_boundary = w - lo0 <= config.tol || hi0 - w <= config.tol;
    Ok(LinRegFit { w, at_boundary })
}

/// Right derivative of [`linreg_objective`].
pub fn linreg_right_derivative(w: f64, data: &[(f64, f64)], epsilon: f64) -> f64 {
    data.iter()
        .map(|&(x, y)| {
            let r = y - w * x;
            let h = r.abs() + epsilon * w.abs();
            let dr = if r > 0.0 { -x } else if r < 0.0 { x } else { x.abs() };
            let dw = if w < 0.0 { -epsilon } else { epsilon };
            2.0 * h * (dr + dw)
        })
        .sum()
}

/// Refines a golden-section result by bisection on the sign of the right
/// derivative.
fn polish(w: f64, data: &[(f64, f64)], epsilon: f64, tol: f64) -> f64 {
    let d = |v: f64| linreg_right_derivative(v, data, epsilon);
    let mut delta = tol.max(1e-12 * (1.0 + w.abs()));
    let (mut lo, mut hi) = (w - delta, w + delta);
    for _ in 0..40 {
        if d(lo) < 0.0 && d(hi) >= 0.0 {
            break;
        }
        delta *= 2.0;
        lo = w - delta;
        hi = w + delta;
    }
    if !(d(lo) < 0.0 && d(hi) >= 0.0) {
        return w;
    }
    while hi - lo > 0.5 * tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if d(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(w - w*)^2`, the clean squared loss net of noise and scaled by `E x^2`.
pub fn scaled_test_loss(w: f64, w_star: f64) -> f64 {
    (w - w_star) * (w - w_star)
}

/// `y = w* x + e`, `e ~ N(0, 1)`.
pub fn sample_linreg<R: RngCore + ?Sized>(config: &LinRegConfig, n: usize, rng: &mut R) -> Vec<(f64, f64)> {
    let poisson = Poisson::new(5.0).expect("rate 5 is valid");
    (0..n)
        .map(|_| {
            let x = match config.x_dist {
                XDist::StandardGaussian => rng.sample(StandardNormal),
                XDist::ShiftedPoisson => poisson.sample(rng) + 1.0,
            };
            let e: f64 = rng.sample(StandardNormal);
            (x, config.w_star * x + e)
        })
        .collect()
}

pub fn linreg_replication<R: RngCore + ?Sized>(config: &LinRegConfig, n: usize, rng: &mut R) -> Result<f64> {
    let data = sample_linreg(config, n, rng);
    let fit = train_linreg_robust(&data, config)?;
    Ok(scaled_test_loss(fit.w, config.w_star))
}
