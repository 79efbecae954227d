//! Independent reference computations used only by unit tests.

use crate::numerics::SQRT_PI;

fn simpson(
    f: &dyn Fn(f64) -> f64,
    (a, b): (f64, f64),
    (fa, fm, fb): (f64, f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, (a, m), (fa, flm, fm), left, 0.5 * tol, depth - 1)
        + simpson(f, (m, b), (fm, frm, fb), right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson integral of `f` on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, (a, b), (fa, fm, fb), whole, tol, 50)
}

/// erf by quadrature of `2/sqrt(pi) exp(-t^2)`; does not touch libm's erf.
pub fn erf_quadrature(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let g = |t: f64| 2.0 / SQRT_PI * libm::exp(-t * t);
    let v = integrate(&g, 0.0, x.abs(), 1e-16);
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub fn normal_cdf_quadrature(x: f64) -> f64 {
    0.5 * (1.0 + erf_quadrature(x / core::f64::consts::SQRT_2))
}
