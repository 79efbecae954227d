//! Independent reference computations: quadrature, enumeration and brute
//! force. Nothing here calls the closed forms it is used to check.

use robustgen_core::gauss_zeroone::LabeledSample1D;
use robustgen_core::manhattan::{ManhattanSample, ManhattanSpec};
use robustgen_core::trainers::{Sample2, SvmModel};

fn simpson<F: Fn(f64) -> f64>(
    f: &F,
    (a, b): (f64, f64),
    (fa, fm, fb): (f64, f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, (a, m), (fa, flm, fm), left, 0.5 * tol, depth - 1)
        + simpson(f, (m, b), (fm, frm, fb), right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, (a, b), (fa, fm, fb), whole, tol, 50)
}

/// `erf(x)` as the integral of `2/sqrt(pi) exp(-t^2)` over `[0, x]`.
pub fn erf_by_quadrature(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let c = 2.0 / std::f64::consts::PI.sqrt();
    let v = integrate(|t| c * (-t * t).exp(), 0.0, x.abs(), 1e-16);
    v.copysign(x)
}

/// Worst hinge loss over the four corners of the `l_inf` ball. The hinge
/// is convex in the perturbation, so a corner attains the maximum.
pub fn hinge_by_corners(model: &SvmModel, sample: &Sample2, epsilon: f64) -> f64 {
    let (x, y) = sample;
    let mut worst = f64::NEG_INFINITY;
    for d0 in [-epsilon, epsilon] {
        for d1 in [-epsilon, epsilon] {
            let score = model.w[0] * (x[0] + d0) + model.w[1] * (x[1] + d1) - model.b;
            worst = worst.max((1.0 - y * score).max(0.0));
        }
    }
    worst
}

/// Worst squared loss over `points` evenly spaced perturbations in
/// `[-eps, eps]`, both ends included.
pub fn squared_by_grid(w: f64, sample: (f64, f64), epsilon: f64, points: usize) -> f64 {
    let (x, y) = sample;
    (0..points)
        .map(|i| {
            let d = -epsilon + 2.0 * epsilon * i as f64 / (points - 1) as f64;
            let r = y - w * (x + d);
            r * r
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `sum_i y_i 1[x_i < w]` counted directly.
pub fn zero_one_count(data: &[LabeledSample1D], w: f64) -> f64 {
    data.iter().filter(|s| s.x < w).map(|s| f64::from(s.y)).sum()
}

/// Thresholds that visit every cell of the arrangement of `data`: each
/// point, each midpoint, and one point beyond either end.
pub fn zero_one_probes(data: &[LabeledSample1D]) -> Vec<f64> {
    let mut xs: Vec<f64> = data.iter().map(|s| s.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut probes = vec![xs[0] - 1.0, xs[xs.len() - 1] + 1.0];
    probes.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    probes.extend(xs.iter().copied());
    probes
}

/// Robustly correct under every perturbation in the open `eps` ball: the
/// point keeps a signed vertical margin of at least `eps` over `alpha`.
pub fn manhattan_point_correct(p: &ManhattanSample, alpha: f64, epsilon: f64) -> bool {
    f64::from(p.y) * (p.t - alpha) >= epsilon - 1e-12
}

/// Candidate levels: the signal levels shifted by `eps`, plus a uniform grid.
pub fn manhattan_level_family(mu: f64, epsilon: f64) -> Vec<f64> {
    let mut levels = vec![0.0];
    for base in [mu - epsilon, mu, mu + epsilon, epsilon - mu] {
        levels.extend([base, -base]);
    }
    levels.extend((-10..=10).map(|k| k as f64 * 0.05));
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    levels
}

/// Minimal adversarial error count over all level vectors drawn from the
/// family, and the least `l1` norm among the vectors that attain it.
pub fn manhattan_brute_force(
    training: &[ManhattanSample],
    spec: &ManhattanSpec,
    epsilon: f64,
) -> (usize, f64) {
    let family = manhattan_level_family(spec.mu(), epsilon);
    let n_cols = spec.columns();
    let mut idx = vec![0usize; n_cols];
    let mut levels = vec![0.0; n_cols];
    let mut best = (usize::MAX, f64::INFINITY);
    loop {
        for (l, &i) in levels.iter_mut().zip(&idx) {
            *l = family[i];
        }
        let errors = manhattan_errors(training, &levels, epsilon);
        let l1 = levels.iter().map(|a| a.abs()).sum::<f64>() * 2.0 * epsilon;
        if errors < best.0 || (errors == best.0 && l1 < best.1 - 1e-12) {
            best = (errors, l1);
        }
        let mut k = 0;
        while k < n_cols {
            idx[k] += 1;
            if idx[k] < family.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n_cols {
            return best;
        }
    }
}

/// Adversarial error count of given levels on a training set.
pub fn manhattan_errors(training: &[ManhattanSample], levels: &[f64], epsilon: f64) -> usize {
    training
        .iter()
        .filter(|p| !manhattan_point_correct(p, levels[p.s - 1], epsilon))
        .count()
}

/// Every ordered training set of size `n` over the support.
pub fn all_training_sets(spec: &ManhattanSpec, n: usize) -> Vec<Vec<ManhattanSample>> {
    let support = spec.support();
    let m = support.len();
    (0..m.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let p = support[code % m];
                    code /= m;
                    p
                })
                .collect()
        })
        .collect()
}
