//! The oracle cross-check suite behind `robustgen verify`.

use rayon::prelude::*;
use robustgen_core::gauss_linear::{
    exact_generalization_loss, mc_generalization_loss, AdversarySetting, GaussianMixtureSpec,
};
use robustgen_core::gauss_zeroone::{minimizer_region, LabeledSample1D};
use robustgen_core::manhattan::{fit_manhattan_robust, l1_norm, ManhattanSpec};
use robustgen_core::numerics::{derive_substream, erf, RandomStream};
use robustgen_core::stats::Estimate;
use robustgen_core::trainers::{
    robust_hinge_loss, robust_squared_loss, sample_gaussian_mixture_2d, svm_standard_test_loss, SvmModel,
};

use crate::oracles;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult { name, passed, detail }
    }

    /// `PASS name: detail` or `FAIL name: detail`.
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Stream ids for the suite's random cases, one block per check.
const STREAM_HINGE: u64 = 1 << 40;
const STREAM_SQUARED: u64 = 2 << 40;
const STREAM_ZERO_ONE: u64 = 3 << 40;
const STREAM_SVM: u64 = 4 << 40;

pub fn erf_vs_quadrature(points: usize) -> CheckResult {
    let worst = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = -6.0 + 12.0 * i as f64 / (points - 1) as f64;
            let v = erf(x).map(|e| (e - oracles::erf_by_quadrature(x)).abs()).unwrap_or(f64::INFINITY);
            (v, x)
        })
        .reduce(|| (0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    CheckResult::new(
        "erf-vs-quadrature",
        worst.0 <= 1e-13,
        format!("max |err| = {:.3e} at x = {:.6} over {points} points in [-6, 6]", worst.0, worst.1),
    )
}

fn uniform(rng: &mut RandomStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

pub fn hinge_vs_corners(seed: u64, cases: usize) -> CheckResult {
    let mut rng = derive_substream(seed, STREAM_HINGE);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let model = SvmModel {
            w: [uniform(&mut rng, -3.0, 3.0), uniform(&mut rng, -3.0, 3.0)],
            b: uniform(&mut rng, -2.0, 2.0),
        };
        let x = [uniform(&mut rng, -3.0, 3.0), uniform(&mut rng, -3.0, 3.0)];
        let y = if rng.coin() { 1.0 } else { -1.0 };
        let eps = uniform(&mut rng, 0.0, 2.0);
        let err = (robust_hinge_loss(&model, &(x, y), eps) - oracles::hinge_by_corners(&model, &(x, y), eps)).abs();
        worst = worst.max(err);
    }
    CheckResult::new(
        "robust-hinge-vs-corners",
        worst <= 1e-12,
        format!("max |err| = {worst:.3e} over {cases} random cases"),
    )
}

pub fn squared_vs_grid(seed: u64, cases: usize) -> CheckResult {
    let mut rng = derive_substream(seed, STREAM_SQUARED);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let w = uniform(&mut rng, -3.0, 3.0);
        let sample = (uniform(&mut rng, -3.0, 3.0), uniform(&mut rng, -3.0, 3.0));
        let eps = uniform(&mut rng, 0.0, 2.0);
        let err = (robust_squared_loss(w, sample, eps) - oracles::squared_by_grid(w, sample, eps, 2001)).abs();
        worst = worst.max(err);
    }
    CheckResult::new(
        "robust-squared-vs-grid",
        worst <= 1e-9,
        format!("max |err| = {worst:.3e} over {cases} random cases, 2001-point grid"),
    )
}

/// Random dataset of size 1..=8 on a half-integer lattice, so that ties
/// between points are common.
fn random_dataset(rng: &mut RandomStream) -> Vec<LabeledSample1D> {
    let size = 1 + rng.index(8);
    (0..size)
        .map(|_| {
            let x = (rng.index(13) as f64 - 6.0) * 0.5;
            LabeledSample1D::new(x, if rng.coin() { 1 } else { -1 })
        })
        .collect()
}

pub fn minimizer_vs_brute_force(seed: u64, datasets: usize) -> CheckResult {
    let mut rng = derive_substream(seed, STREAM_ZERO_ONE);
    let mut mismatches = 0usize;
    for _ in 0..datasets {
        let data = random_dataset(&mut rng);
        let probes = oracles::zero_one_probes(&data);
        let best = probes.iter().map(|&w| oracles::zero_one_count(&data, w)).fold(f64::INFINITY, f64::min);
        let ok = match minimizer_region(&data) {
            Ok(region) => {
                region.objective_value == best
                    && probes
                        .iter()
                        .all(|&w| region.contains(w) == (oracles::zero_one_count(&data, w) == best))
            }
            Err(_) => false,
        };
        mismatches += usize::from(!ok);
    }
    CheckResult::new(
        "minimizer-region-vs-brute-force",
        mismatches == 0,
        format!("{mismatches} mismatches over {datasets} random datasets of size <= 8"),
    )
}

/// Standard normal hinge risk by direct simulation.
fn svm_mc_loss(model: &SvmModel, mu: &[f64; 2], draws: usize, rng: &mut RandomStream) -> Estimate {
    let values: Vec<f64> = sample_gaussian_mixture_2d(mu, draws, rng)
        .iter()
        .map(|(x, y)| (1.0 - y * (model.w[0] * x[0] + model.w[1] * x[1] - model.b)).max(0.0))
        .collect();
    Estimate::from_values(&values).expect("at least two draws")
}

pub fn svm_closed_form_vs_mc(seed: u64, models: usize, draws: usize) -> CheckResult {
    let mu = [1.0, 1.0];
    let results: Vec<(f64, bool)> = (0..models)
        .into_par_iter()
        .map(|k| {
            let mut rng = derive_substream(seed, STREAM_SVM + k as u64);
            let model = SvmModel {
                w: [uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0)],
                b: uniform(&mut rng, -1.5, 1.5),
            };
            let exact = svm_standard_test_loss(&model, &mu);
            let e = svm_mc_loss(&model, &mu, draws, &mut rng);
            let z = (e.mean - exact).abs() / e.stderr;
            (z, z <= 4.0)
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    CheckResult::new(
        "svm-test-loss-vs-mc",
        results.iter().all(|r| r.1),
        format!("max |z| = {worst:.2} over {models} models, {draws} draws each (gate 4)"),
    )
}

pub fn gauss_linear_exact_vs_mc(seed: u64, replications: usize) -> CheckResult {
    let spec = GaussianMixtureSpec::isotropic(1, 1.0, 2.0).expect("valid spec");
    let cells: Vec<(u64, f64)> =
        [1u64, 10, 100].iter().flat_map(|&n| [0.5, 0.95, 1.5].map(|e| (n, e))).collect();
    let results: Vec<(f64, bool)> = cells
        .par_iter()
        .enumerate()
        .map(|(k, &(n, eps))| {
            let setting = AdversarySetting::new(eps, 1.0).expect("valid setting");
            let exact = exact_generalization_loss(&spec, &setting, n as f64).unwrap_or(f64::NAN);
            match mc_generalization_loss(&spec, &setting, n, replications, seed.wrapping_add(k as u64)) {
                Ok(e) => {
                    let z = (e.mean - exact).abs() / e.stderr;
                    (z, z <= 4.0)
                }
                Err(_) => (f64::INFINITY, false),
            }
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    CheckResult::new(
        "gauss-linear-exact-vs-mc",
        results.iter().all(|r| r.1),
        format!("max |z| = {worst:.2} over {} cells, {replications} replications each (gate 4)", cells.len()),
    )
}

/// Manhattan fit against brute force over every training set with up to
/// `max_size` points and `max_columns` columns: minimal adversarial error,
/// minimal `l1` norm among minimizers, and the `2 N eps |mu - eps|` bound.
pub fn manhattan_fit_vs_brute_force(mu: f64, epsilons: &[f64], max_columns: usize, max_size: usize) -> CheckResult {
    let mut cases = Vec::new();
    for &eps in epsilons {
        for n_cols in 1..=max_columns {
            for size in 0..=max_size {
                cases.push((eps, n_cols, size));
            }
        }
    }
    let per_case: Vec<(usize, usize)> = cases
        .par_iter()
        .map(|&(eps, n_cols, size)| {
            let spec = ManhattanSpec::new(n_cols, mu).expect("valid spec");
            let mut bad = 0usize;
            let sets = oracles::all_training_sets(&spec, size);
            for data in &sets {
                let Ok(clf) = fit_manhattan_robust(data, &spec, eps) else {
                    bad += 1;
                    continue;
                };
                let (min_errors, min_l1) = oracles::manhattan_brute_force(data, &spec, eps);
                let errors = oracles::manhattan_errors(data, &clf.levels, eps);
                let l1 = l1_norm(&clf);
                let bound = 2.0 * n_cols as f64 * eps * (mu - eps).abs();
                if errors != min_errors || (l1 - min_l1).abs() > 1e-12 || l1 > bound + 1e-12 {
                    bad += 1;
                }
            }
            (bad, sets.len())
        })
        .collect();
    let bad: usize = per_case.iter().map(|c| c.0).sum();
    let total: usize = per_case.iter().map(|c| c.1).sum();
    CheckResult::new(
        "manhattan-fit-vs-brute-force",
        bad == 0,
        format!("{bad} mismatches over {total} training sets (N <= {max_columns}, size <= {max_size}, eps in {epsilons:?})"),
    )
}

/// The full suite at the sizes used by `robustgen verify`.
pub fn run_suite(seed: u64) -> Vec<CheckResult> {
    vec![
        erf_vs_quadrature(10_000),
        hinge_vs_corners(seed, 1_000),
        squared_vs_grid(seed, 1_000),
        minimizer_vs_brute_force(seed, 1_000),
        svm_closed_form_vs_mc(seed, 20, 1_000_000),
        gauss_linear_exact_vs_mc(seed, 100_000),
        manhattan_fit_vs_brute_force(0.1, &[0.05, 0.4], 2, 3),
    ]
}
