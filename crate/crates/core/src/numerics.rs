//! Scalar numerics shared by every model: the error function, the standard
//! normal CDF, bisection, sign-change scanning and seeded random substreams.

use alloc::format;
use alloc::vec::Vec;

use rand::rand_core::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Iteration cap for [`find_root`].
pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Default absolute tolerance for [`find_root`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

pub const SQRT_2: f64 = core::f64::consts::SQRT_2;
pub const SQRT_PI: f64 = 1.772_453_850_905_516;
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Error function, `2/sqrt(pi) * int_0^x exp(-t^2) dt`.
///
/// Absolute error is below 1e-13 on `[-6, 6]`; beyond that the result is
/// `±1` to working precision. The evaluation is exactly odd.
pub fn erf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("erf of non-finite value {x}")));
    }
    Ok(erf_unchecked(x))
}

/// [`erf`] without the finiteness check; NaN propagates.
#[inline]
pub fn erf_unchecked(x: f64) -> f64 {
    // libm evaluates on |x| and restores the sign, so odd symmetry is exact.
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)`, accurate in the far tail.
#[inline]
pub fn erfc_unchecked(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal CDF, `1/2 [1 + erf(x / sqrt 2)]`.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("normal CDF of non-finite value {x}")));
    }
    Ok(std_normal_cdf_unchecked(x))
}

#[inline]
pub fn std_normal_cdf_unchecked(x: f64) -> f64 {
    0.5 * (1.0 + erf_unchecked(x / SQRT_2))
}

#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * exp(-0.5 * x * x)
}

/// `sign` with `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("bracket requires finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Bracket { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[inline]
fn strict_sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on a sign-changing bracket.
///
/// Returns the midpoint of a final enclosing interval of width `<= tol`.
/// When the interval has shrunk to adjacent floating-point numbers before
/// reaching `tol`, that interval is returned as converged.
pub fn find_root<F>(f: F, bracket: Bracket, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::domain(format!("root tolerance must be positive, got {tol}")));
    }
    let Bracket { mut lo, mut hi } = bracket;
    let f_lo = f(lo);
    let f_hi = f(hi);
    let s_lo = strict_sign(f_lo);
    let s_hi = strict_sign(f_hi);
    if s_lo == 0 || s_hi == 0 || s_lo == s_hi || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }

    for _ in 0..MAX_BISECTION_ITERATIONS {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let s_mid = strict_sign(f(mid));
        if s_mid == 0 {
            return Ok(mid);
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= tol {
        return Ok(0.5 * (lo + hi));
    }
    Err(Error::Convergence { iterations: MAX_BISECTION_ITERATIONS, width: hi - lo })
}

/// Every consecutive pair of a uniform grid on `[lo, hi]` across which `f`
/// changes strict sign, in increasing order.
pub fn scan_sign_changes<F>(f: F, lo: f64, hi: f64, grid_points: usize) -> Result<Vec<Bracket>>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::domain(format!("scan requires lo < hi, got [{lo}, {hi}]")));
    }
    if grid_points < 2 {
        return Err(Error::domain("scan requires at least 2 grid points"));
    }
    let step = (hi - lo) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| if i + 1 == grid_points { hi } else { lo + step * i as f64 })
        .collect();
    Ok(scan_sign_changes_on(f, &grid))
}

/// Same as [`scan_sign_changes`] on an arbitrary increasing grid.
pub fn scan_sign_changes_on<F>(f: F, grid: &[f64]) -> Vec<Bracket>
where
    F: Fn(f64) -> f64,
{
    let mut out = Vec::new();
    let mut prev: Option<(f64, i8)> = None;
    for &x in grid {
        let s = strict_sign(f(x));
        if let Some((px, ps)) = prev {
            if ps != 0 && s != 0 && ps != s && px < x {
                out.push(Bracket { lo: px, hi: x });
            }
        }
        prev = Some((x, s));
    }
    out
}

/// A value split as `limit + excess`, where `limit` is the `v -> infinity`
/// value and `excess` is the remaining (tail) part.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitExcess {
    pub limit: f64,
    pub excess: f64,
}

impl LimitExcess {
    pub fn total(&self) -> f64 {
        self.limit + self.excess
    }
}

/// Strict sign of a quantity on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Option<Sign> {
        if v > 0.0 {
            Some(Sign::Positive)
        } else if v < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// An interval `[lo, hi]` on which some function has constant strict sign.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignInterval {
    pub lo: f64,
    pub hi: f64,
    pub sign: Sign,
}

/// A deterministic random stream identified by `(master_seed, stream_index)`.
///
/// Backed by ChaCha8 keyed from the master seed, with the ChaCha stream id set
/// to the index, so distinct indices never share a keystream.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    master_seed: u64,
    stream_index: u64,
}

impl RandomStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform draw on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }

    /// Uniform index in `0..n` (`n > 0`).
    pub fn index(&mut self, n: usize) -> usize {
        use rand::Rng;
        self.rng.random_range(0..n)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn derive_substream(master_seed: u64, index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    RandomStream { rng, master_seed, stream_index: index }
}
