//! Gaussian mixture with a linear loss: the closed-form robust classifier,
//! its exact generalization loss, the derivative of that loss in `n`, and the
//! weak / medium / strong regime classification.
//!
//! Reduced coordinates per feature `j`:
//! `v = sqrt(n) mu / (sqrt 2 sigma)`, `eps' = eps / mu`, `t = exp(-v^2)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::rand_core::RngCore;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{
    self, derive_substream, erfc_unchecked, exp, find_root, ln, scan_sign_changes_on, sqrt,
    Bracket, Sign, SignInterval,
};
pub use crate::numerics::LimitExcess;
use crate::stats::Estimate;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianMixtureSpec {
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

impl GaussianMixtureSpec {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if mu.len() != sigma.len() {
            return Err(Error::domain(format!(
                "mu has length {} but sigma has length {}",
                mu.len(),
                sigma.len()
            )));
        }
        if let Some(m) = mu.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::domain(format!("mu entries must be finite and >= 0, got {m}")));
        }
        if let Some(s) = sigma.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::domain(format!("sigma entries must be finite and > 0, got {s}")));
        }
        Ok(GaussianMixtureSpec { mu, sigma })
    }

    /// `d` identical coordinates.
    pub fn isotropic(d: usize, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(alloc::vec![mu; d], alloc::vec![sigma; d])
    }

    pub fn d(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn max_mu(&self) -> f64 {
        self.mu.iter().copied().fold(0.0, f64::max)
    }

    /// `mu/sigma` when it is the same for every coordinate.
    pub fn common_ratio(&self) -> Option<f64> {
        let r0 = self.mu[0] / self.sigma[0];
        let same = self
            .mu
            .iter()
            .zip(&self.sigma)
            .all(|(m, s)| ((m / s) - r0).abs() <= 1e-12 * r0.abs().max(1e-300));
        same.then_some(r0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdversarySetting {
    pub epsilon: f64,
    pub weight_bound: f64,
}

impl AdversarySetting {
    pub fn new(epsilon: f64, weight_bound: f64) -> Result<Self> {
        let s = AdversarySetting { epsilon, weight_bound };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::domain(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        if !(self.weight_bound.is_finite() && self.weight_bound > 0.0) {
            return Err(Error::domain(format!(
                "weight bound must be finite and > 0, got {}",
                self.weight_bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReducedCoords {
    pub v: f64,
    pub eps_prime: f64,
    pub t: f64,
}

impl ReducedCoords {
    /// A coordinate with `mu = 0` is only meaningful at `eps = 0`, where it
    /// is given `eps' = 0` (its loss contribution is zero either way).
    pub fn new(mu: f64, sigma: f64, epsilon: f64, n: f64) -> Result<Self> {
        let eps_prime = if mu > 0.0 {
            epsilon / mu
        } else if epsilon == 0.0 {
            0.0
        } else {
            return Err(Error::domain(format!("eps' = eps/mu is undefined for mu = 0 and eps = {epsilon}")));
        };
        let v = sqrt(n) * mu / (numerics::SQRT_2 * sigma);
        Ok(ReducedCoords { v, eps_prime, t: exp(-v * v) })
    }

    /// `ln t = -v^2`, available even when `t` underflows.
    pub fn ln_t(&self) -> f64 {
        -self.v * self.v
    }
}

/// `W sign(u - eps sign(u))` per coordinate, with `sign(0) = 0`.
pub fn robust_weights(u: &[f64], setting: &AdversarySetting) -> Vec<f64> {
    let w = setting.weight_bound;
    let eps = setting.epsilon;
    u.iter()
        .map(|&uj| w * numerics::sign(uj - eps * numerics::sign(uj)))
        .collect()
}

/// `erf(v) + erf(v(eps'-1)) - erf(v(eps'+1))`, rewritten through `erfc` as a
/// limit plus a tail so that the tail keeps full relative precision.
pub fn loss_kernel_parts(v: f64, eps_prime: f64) -> LimitExcess {
    let a = erfc_unchecked(v);
    let plus = erfc_unchecked(v * (1.0 + eps_prime));
    if eps_prime < 1.0 {
        LimitExcess { limit: -1.0, excess: (erfc_unchecked(v * (1.0 - eps_prime)) - a) + plus }
    } else if eps_prime == 1.0 {
        LimitExcess { limit: 0.0, excess: plus - a }
    } else {
        LimitExcess { limit: 1.0, excess: plus - (a + erfc_unchecked(v * (eps_prime - 1.0))) }
    }
}

/// The loss kernel `L(v, eps')`.
pub fn loss_kernel_l(v: f64, eps_prime: f64) -> f64 {
    loss_kernel_parts(v, eps_prime).total()
}

fn check_n(n: f64) -> Result<()> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::domain(format!("n must be finite and > 0, got {n}")));
    }
    Ok(())
}

fn reduced_all(spec: &GaussianMixtureSpec, setting: &AdversarySetting, n: f64) -> Result<Vec<ReducedCoords>> {
    setting.validate()?;
    check_n(n)?;
    spec.mu
        .iter()
        .zip(&spec.sigma)
        .map(|(&m, &s)| ReducedCoords::new(m, s, setting.epsilon, n))
        .collect()
}

/// `W sum_j mu_j L(v_j, eps'_j)` as a limit/excess pair. Differences in `n`
/// should be taken on `excess`, which stays accurate after the total has
/// rounded to its limit.
pub fn exact_generalization_parts(
    spec: &GaussianMixtureSpec,
    setting: &AdversarySetting,
    n: f64,
) -> Result<LimitExcess> {
    let coords = reduced_all(spec, setting, n)?;
    let mut limit = 0.0;
    let mut excess = 0.0;
    for (rc, &m) in coords.iter().zip(&spec.mu) {
        if m == 0.0 {
            continue;
        }
        let k = loss_kernel_parts(rc.v, rc.eps_prime);
        limit += m * k.limit;
        excess += m * k.excess;
    }
    let w = setting.weight_bound;
    Ok(LimitExcess { limit: w * limit, excess: w * excess })
}

/// Exact expected linear loss `L_n` of the robust classifier.
pub fn exact_generalization_loss(spec: &GaussianMixtureSpec, setting: &AdversarySetting, n: f64) -> Result<f64> {
    exact_generalization_parts(spec, setting, n).map(|p| p.total())
}

fn f_terms(eps_prime: f64) -> [(f64, f64); 3] {
    let p = 1.0 + eps_prime;
    let q = 1.0 - eps_prime;
    [(1.0, 1.0), (-p, p * p), (-q, q * q)]
}

fn check_t_eps(t: f64, eps_prime: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!("t must lie in (0, 1), got {t}")));
    }
    if !(eps_prime.is_finite() && eps_prime >= 0.0) {
        return Err(Error::domain(format!("eps' must be finite and >= 0, got {eps_prime}")));
    }
    Ok(())
}

/// `f(t, eps') = t - (1+eps') t^{(1+eps')^2} - (1-eps') t^{(1-eps')^2}`.
pub fn f_kernel(t: f64, eps_prime: f64) -> Result<f64> {
    check_t_eps(t, eps_prime)?;
    Ok(f_terms(eps_prime).iter().map(|&(c, e)| c * numerics::powf(t, e)).sum())
}

/// `df/dt`.
pub fn f_prime(t: f64, eps_prime: f64) -> Result<f64> {
    check_t_eps(t, eps_prime)?;
    Ok(f_terms(eps_prime)
        .iter()
        .filter(|&&(c, _)| c != 0.0)
        .map(|&(c, e)| c * e * numerics::powf(t, e - 1.0))
        .sum())
}

/// `d^2 f/dt^2`.
pub fn f_second(t: f64, eps_prime: f64) -> Result<f64> {
    check_t_eps(t, eps_prime)?;
    Ok(f_terms(eps_prime)
        .iter()
        .filter(|&&(c, e)| c != 0.0 && e != 1.0)
        .map(|&(c, e)| c * e * (e - 1.0) * numerics::powf(t, e - 2.0))
        .sum())
}

/// `f(e^s, eps') = e^{m s} * value`, with `m` the smallest exponent carrying a
/// nonzero coefficient. `value` has the sign of `f` and does not underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledF {
    pub m: f64,
    pub value: f64,
}

pub fn f_scaled(ln_t: f64, eps_prime: f64) -> ScaledF {
    let terms = f_terms(eps_prime);
    let m = terms
        .iter()
        .filter(|&&(c, _)| c != 0.0)
        .map(|&(_, e)| e)
        .fold(f64::INFINITY, f64::min);
    let value = terms
        .iter()
        .filter(|&&(c, _)| c != 0.0)
        .map(|&(c, e)| if e == m { c } else { c * exp((e - m) * ln_t) })
        .sum();
    ScaledF { m, value }
}

/// Stationary point of `f'` in `t`:
/// `[((1+e)/(1-e))^3 ((2+e)/(2-e))]^{-1/(4e)}`.
pub fn critical_point_t0(eps_prime: f64) -> Result<f64> {
    if !(eps_prime > 0.0 && eps_prime < 1.0) {
        return Err(Error::domain(format!("t0 needs eps' in (0, 1), got {eps_prime}")));
    }
    let e = eps_prime;
    let ln_a = 3.0 * ln((1.0 + e) / (1.0 - e)) + ln((2.0 + e) / (2.0 - e));
    Ok(exp(-ln_a / (4.0 * e)))
}

const PROFILE_UNIFORM_POINTS: usize = 4096;
const PROFILE_LOG_POINTS: usize = 2048;
const PROFILE_MARGIN: f64 = 1e-9;
const PROFILE_LN_T_MIN: f64 = -690.0;

fn profile_grid_ln_t() -> Vec<f64> {
    let mut grid = Vec::with_capacity(PROFILE_UNIFORM_POINTS + PROFILE_LOG_POINTS);
    let ln_margin = ln(PROFILE_MARGIN);
    for i in 0..PROFILE_LOG_POINTS - 1 {
        let frac = i as f64 / (PROFILE_LOG_POINTS - 1) as f64;
        grid.push(PROFILE_LN_T_MIN + frac * (ln_margin - PROFILE_LN_T_MIN));
    }
    let lo = PROFILE_MARGIN;
    let hi = 1.0 - PROFILE_MARGIN;
    for i in 0..PROFILE_UNIFORM_POINTS {
        let t = lo + (hi - lo) * i as f64 / (PROFILE_UNIFORM_POINTS - 1) as f64;
        grid.push(ln(t));
    }
    grid
}

/// Maximal intervals of `(0, 1)` on which `f(., eps')` has constant sign.
///
/// The scan runs in `ln t` on a uniform grid in `t` plus a logarithmic grid
/// reaching down to `t = e^-690`; crossovers are refined by bisection.
pub fn f_sign_profile(eps_prime: f64) -> Result<Vec<SignInterval>> {
    if !(eps_prime.is_finite() && eps_prime >= 0.0) {
        return Err(Error::domain(format!("eps' must be finite and >= 0, got {eps_prime}")));
    }
    let g = |s: f64| f_scaled(s, eps_prime).value;
    let grid = profile_grid_ln_t();
    let mut crossings = Vec::new();
    for b in scan_sign_changes_on(g, &grid) {
        crossings.push(exp(find_root(g, b, numerics::DEFAULT_ROOT_TOL)?));
    }
    let first = grid
        .iter()
        .find_map(|&s| Sign::of(g(s)))
        .ok_or_else(|| Error::domain("f vanishes on the whole scan grid"))?;

    let mut out = Vec::with_capacity(crossings.len() + 1);
    let mut lo = 0.0;
    let mut sign = first;
    for c in crossings {
        out.push(SignInterval { lo, hi: c, sign });
        lo = c;
        sign = sign.flip();
    }
    out.push(SignInterval { lo, hi: 1.0, sign });
    Ok(out)
}

/// Per-coordinate derivative terms as `(log weight, scaled f)`:
/// term_j = `exp(a_j) * value_j` with `a_j = ln(mu^2/sigma) + m_j ln t_j`.
fn derivative_terms(spec: &GaussianMixtureSpec, setting: &AdversarySetting, n: f64) -> Result<Vec<(f64, f64)>> {
    let coords = reduced_all(spec, setting, n)?;
    let mut terms = Vec::with_capacity(coords.len());
    for ((rc, &m), &s) in coords.iter().zip(&spec.mu).zip(&spec.sigma) {
        if m == 0.0 {
            continue;
        }
        let sf = f_scaled(rc.ln_t(), rc.eps_prime);
        terms.push((ln(m * m / s) + sf.m * rc.ln_t(), sf.value));
    }
    Ok(terms)
}

/// `dL_n/dn = W / sqrt(2 n pi) * sum_j mu_j^2 / sigma_j * f(t_j, eps'_j)`.
pub fn loss_derivative_in_n(spec: &GaussianMixtureSpec, setting: &AdversarySetting, n: f64) -> Result<f64> {
    let terms = derivative_terms(spec, setting, n)?;
    let sum: f64 = terms.iter().map(|&(a, v)| exp(a) * v).sum();
    Ok(setting.weight_bound / sqrt(2.0 * n * core::f64::consts::PI) * sum)
}

/// A positive multiple of [`loss_derivative_in_n`] normalised so that it
/// does not underflow; use it for signs at large `n`.
pub fn loss_derivative_scaled(spec: &GaussianMixtureSpec, setting: &AdversarySetting, n: f64) -> Result<f64> {
    let terms = derivative_terms(spec, setting, n)?;
    let a_max = terms.iter().map(|&(a, _)| a).fold(f64::NEG_INFINITY, f64::max);
    if !a_max.is_finite() {
        return Ok(0.0);
    }
    Ok(terms.iter().map(|&(a, v)| exp(a - a_max) * v).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegimeLabel {
    Weak,
    Medium,
    Strong,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Threshold {
    pub name: String,
    pub n: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegimeReport {
    pub label: RegimeLabel,
    pub thresholds: Vec<Threshold>,
    /// Sign of `dL_n/dn` on a partition of `(0, n_max]`.
    pub sign_pattern: Vec<SignInterval>,
    pub eps_prime_range: (f64, f64),
}

impl RegimeReport {
    pub fn threshold(&self, name: &str) -> Option<f64> {
        self.thresholds.iter().find(|t| t.name == name).map(|t| t.n)
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.sign_pattern.iter().map(|s| s.sign).collect()
    }
}

/// `n` at which coordinates with ratio `mu/sigma` reach `t = tau`.
pub fn n_from_tau(tau: f64, mu: f64, sigma: f64) -> f64 {
    2.0 * ln(1.0 / tau) * (sigma * sigma) / (mu * mu)
}

const REGIME_GRID_POINTS: usize = 8192;
const REGIME_SPAN: f64 = 1e-12;
const REGIME_MIN_RELATIVE_WIDTH: f64 = 1e-6;

/// Sign intervals of `dL_n/dn` on `(0, n_max]`.
fn derivative_sign_pattern(
    spec: &GaussianMixtureSpec,
    setting: &AdversarySetting,
    n_max: f64,
) -> Result<Vec<SignInterval>> {
    let u_hi = ln(n_max);
    let u_lo = ln(n_max * REGIME_SPAN);
    let g = |u: f64| loss_derivative_scaled(spec, setting, exp(u)).unwrap_or(f64::NAN);
    let grid: Vec<f64> = (0..REGIME_GRID_POINTS)
        .map(|i| {
            if i + 1 == REGIME_GRID_POINTS {
                u_hi
            } else {
                u_lo + (u_hi - u_lo) * i as f64 / (REGIME_GRID_POINTS - 1) as f64
            }
        })
        .collect();
    // Surface domain errors before scanning.
    loss_derivative_scaled(spec, setting, n_max)?;

    let mut crossings = Vec::new();
    for b in scan_sign_changes_on(g, &grid) {
        crossings.push(exp(find_root(g, b, 1e-13)?));
    }
    let first = grid
        .iter()
        .find_map(|&u| Sign::of(g(u)))
        .ok_or_else(|| Error::domain("derivative vanishes on the whole scan grid"))?;

    let mut out = Vec::new();
    let mut lo = 0.0;
    let mut sign = first;
    for c in crossings {
        out.push(SignInterval { lo, hi: c, sign });
        lo = c;
        sign = sign.flip();
    }
    out.push(SignInterval { lo, hi: n_max, sign });
    Ok(merge_short_intervals(out))
}

/// Drops sign intervals narrower than a relative `1e-6` of their upper end
/// and merges the (same-sign) neighbours.
fn merge_short_intervals(mut iv: Vec<SignInterval>) -> Vec<SignInterval> {
    while iv.len() > 1 {
        let Some(i) = iv
            .iter()
            .position(|s| s.hi - s.lo < REGIME_MIN_RELATIVE_WIDTH * s.hi)
        else {
            break;
        };
        if i == 0 {
            iv[1].lo = iv[0].lo;
            iv.remove(0);
        } else if i + 1 == iv.len() {
            iv[i - 1].hi = iv[i].hi;
            iv.remove(i);
        } else {
            iv[i - 1].hi = iv[i + 1].hi;
            iv.drain(i..=i + 1);
        }
    }
    iv
}

/// Classifies the loss curve on `(0, n_max]` into weak, medium (double
/// descent) or strong regimes and locates the thresholds.
///
/// Medium thresholds are `N1` (start of the increasing stage) and `N2` (its
/// end); the strong threshold `N5` is where the loss starts increasing for
/// good. Medium requires a common `mu/sigma` ratio; otherwise a non-monotone
/// pattern is reported as indeterminate.
pub fn classify_regime(spec: &GaussianMixtureSpec, setting: &AdversarySetting, n_max: f64) -> Result<RegimeReport> {
    if !(n_max.is_finite() && n_max > 0.0) {
        return Err(Error::domain(format!("n_max must be finite and > 0, got {n_max}")));
    }
    setting.validate()?;
    if let Some(m) = spec.mu.iter().find(|&&m| m <= 0.0) {
        return Err(Error::domain(format!("regime classification needs every mu > 0, got {m}")));
    }
    let eps_primes: Vec<f64> = spec.mu.iter().map(|m| setting.epsilon / m).collect();
    let eps_prime_range = (
        eps_primes.iter().copied().fold(f64::INFINITY, f64::min),
        eps_primes.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );

    let pattern = derivative_sign_pattern(spec, setting, n_max)?;
    let signs: Vec<Sign> = pattern.iter().map(|s| s.sign).collect();
    let strong_side = setting.epsilon >= spec.max_mu();

    let mut thresholds = Vec::new();
    let label = if strong_side {
        if *signs.last().unwrap() == Sign::Positive {
            let n5 = if pattern.len() > 1 { pattern[pattern.len() - 1].lo } else { 0.0 };
            thresholds.push(Threshold { name: "N5".to_string(), n: n5 });
            RegimeLabel::Strong
        } else {
            RegimeLabel::Indeterminate
        }
    } else if signs == [Sign::Negative] {
        RegimeLabel::Weak
    } else if signs == [Sign::Negative, Sign::Positive, Sign::Negative] && spec.common_ratio().is_some() {
        thresholds.push(Threshold { name: "N1".to_string(), n: pattern[1].lo });
        thresholds.push(Threshold { name: "N2".to_string(), n: pattern[1].hi });
        RegimeLabel::Medium
    } else {
        RegimeLabel::Indeterminate
    };

    Ok(RegimeReport { label, thresholds, sign_pattern: pattern, eps_prime_range })
}

/// Positive exactly when `sup_t f(t, eps') > 0`.
///
/// `f'` rises to its maximum at `t0` and falls after, so when `f'(t0) > 0`
/// the local maximum of `f` sits at the larger zero of `f'`.
fn sup_f_indicator(eps_prime: f64) -> Result<f64> {
    let t0 = critical_point_t0(eps_prime)?;
    let fp0 = f_prime(t0, eps_prime)?;
    if fp0 <= 0.0 {
        return Ok(fp0.min(-f64::MIN_POSITIVE));
    }
    let fp = |t: f64| f_prime(t, eps_prime).unwrap_or(f64::NAN);
    let tb = find_root(fp, Bracket::new(t0, 1.0 - 1e-12)?, 1e-15)?;
    let v = f_kernel(tb, eps_prime)?;
    Ok(if v == 0.0 { -f64::MIN_POSITIVE } else { v })
}

const CRITICAL_BRACKET: (f64, f64) = (0.05, 0.99);
const CRITICAL_WIDTH: f64 = 1e-7;

/// Numerically located `eps'*` at which `sup_t f(t, eps')` turns positive,
/// returned as a bisection bracket `(low, high)` of width `<= 1e-7`:
/// the supremum is nonpositive at `low` and positive at `high`.
pub fn critical_epsilon_prime() -> Result<(f64, f64)> {
    let (mut lo, mut hi) = CRITICAL_BRACKET;
    if sup_f_indicator(lo)? > 0.0 || sup_f_indicator(hi)? <= 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo: sup_f_indicator(lo)?, f_hi: sup_f_indicator(hi)? });
    }
    while hi - lo > CRITICAL_WIDTH {
        let mid = 0.5 * (lo + hi);
        if sup_f_indicator(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// `sup_t f(t, eps')` sign witness used by [`critical_epsilon_prime`]; exposed
/// for checking both bracket ends.
pub fn sup_f_is_positive(eps_prime: f64) -> Result<bool> {
    Ok(sup_f_indicator(eps_prime)? > 0.0)
}

fn check_mc(spec: &GaussianMixtureSpec, setting: &AdversarySetting, n: u64, replications: usize) -> Result<()> {
    reduced_all(spec, setting, n as f64)?;
    if replications < 2 {
        return Err(Error::domain(format!("need at least 2 replications, got {replications}")));
    }
    Ok(())
}

fn score(spec: &GaussianMixtureSpec, setting: &AdversarySetting, u: &[f64]) -> f64 {
    let w = robust_weights(u, setting);
    -w.iter().zip(&spec.mu).map(|(a, b)| a * b).sum::<f64>()
}

/// One replication: draws the empirical mean `u ~ N(mu, diag(sigma^2)/n)`
/// directly and returns the clean test loss `-<w, mu>`.
pub fn mc_linear_replication<R: RngCore + ?Sized>(
    spec: &GaussianMixtureSpec,
    setting: &AdversarySetting,
    n: u64,
    rng: &mut R,
) -> f64 {
    let root_n = sqrt(n as f64);
    let u: Vec<f64> = spec
        .mu
        .iter()
        .zip(&spec.sigma)
        .map(|(&m, &s)| {
            let z: f64 = rng.sample(StandardNormal);
            m + s / root_n * z
        })
        .collect();
    score(spec, setting, &u)
}

/// One replication that samples all `n` labelled points.
pub fn mc_linear_replication_slow<R: RngCore + ?Sized>(
    spec: &GaussianMixtureSpec,
    setting: &AdversarySetting,
    n: u64,
    rng: &mut R,
) -> f64 {
    let d = spec.d();
    let mut acc = alloc::vec![0.0; d];
    for _ in 0..n {
        let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
        for j in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            let x = y * spec.mu[j] + spec.sigma[j] * z;
            acc[j] += y * x;
        }
    }
    let u: Vec<f64> = acc.iter().map(|a| a / n as f64).collect();
    score(spec, setting, &u)
}

/// Monte Carlo estimate of `L_n`; replication `r` uses substream `(seed, r)`.
pub fn mc_generalization_loss(
    spec: &GaussianMixtureSpec,
    setting: &AdversarySetting,
    n: u64,
    replications: usize,
    seed: u64,
) -> Result<Estimate> {
    check_mc(spec, setting, n, replications)?;
    let values: Vec<f64> = (0..replications)
        .map(|r| mc_linear_replication(spec, setting, n, &mut derive_substream(seed, r as u64)))
        .collect();
    Estimate::from_values(&values)
}

/// Same estimate through [`mc_linear_replication_slow`].
pub fn mc_generalization_loss_slow(
    spec: &GaussianMixtureSpec,
    setting: &AdversarySetting,
    n: u64,
    replications: usize,
    seed: u64,
) -> Result<Estimate> {
    check_mc(spec, setting, n, replications)?;
    let values: Vec<f64> = (0..replications)
        .map(|r| mc_linear_replication_slow(spec, setting, n, &mut derive_substream(seed, r as u64)))
        .collect();
    Estimate::from_values(&values)
}
