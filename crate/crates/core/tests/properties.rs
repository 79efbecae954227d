use proptest::prelude::*;

use robustgen_core::gauss_linear::{
    exact_generalization_loss, exact_generalization_parts, f_kernel, f_sign_profile, loss_derivative_scaled,
    robust_weights, classify_regime, AdversarySetting, GaussianMixtureSpec, RegimeLabel,
};
use robustgen_core::gauss_zeroone::{
    empirical_robust_objective, minimizer_region, neutralize, tiebreak, zero_one_test_loss, LabeledSample1D,
    TiebreakPolicy,
};
use robustgen_core::manhattan::{
    exact_manhattan_loss, exact_manhattan_parts, fit_manhattan_robust, fit_manhattan_robust_with, l1_norm, mc_manhattan_loss,
    sample_manhattan, support_loss, ManhattanSpec, TieConvention,
};
use robustgen_core::numerics::{self, derive_substream, find_root, Bracket, Sign};
use robustgen_core::trainers::{
    robust_hinge_loss, robust_squared_loss, train_linreg_robust, linreg_objective, LinRegConfig, SvmModel, XDist,
};

proptest! {
    #[test]
    fn erf_is_odd_and_bounded(x in -40.0f64..40.0) {
        let v = numerics::erf(x).unwrap();
        prop_assert_eq!(numerics::erf(-x).unwrap(), -v);
        prop_assert!(v.abs() <= 1.0);
    }

    #[test]
    fn erf_is_increasing(x in -3.0f64..3.0, dx in 1e-6f64..1.0, far in -40.0f64..40.0) {
        prop_assert!(numerics::erf(x + dx).unwrap() > numerics::erf(x).unwrap());
        prop_assert!(numerics::erf(far + dx).unwrap() >= numerics::erf(far).unwrap());
    }

    #[test]
    fn normal_cdf_complement(x in -30.0f64..30.0) {
        let s = numerics::std_normal_cdf(x).unwrap() + numerics::std_normal_cdf(-x).unwrap();
        prop_assert!((s - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn root_residual_bounded_by_slope(r in -5.0f64..5.0, a in 0.1f64..10.0) {
        let f = |x: f64| a * (x - r) + 0.1 * (x - r).powi(3);
        let root = find_root(f, Bracket::new(-6.0, 6.0).unwrap(), 1e-10).unwrap();
        let slope = a + 0.3 * (root - r).powi(2);
        prop_assert!(f(root).abs() <= slope * 1e-10 * 1.01);
    }

    #[test]
    fn robust_weights_scale_with_bound(
        u in prop::collection::vec(-3.0f64..3.0, 1..6),
        eps in 0.0f64..2.0,
        w in 0.1f64..10.0,
    ) {
        let unit = robust_weights(&u, &AdversarySetting::new(eps, 1.0).unwrap());
        let scaled = robust_weights(&u, &AdversarySetting::new(eps, w).unwrap());
        for (a, b) in unit.iter().zip(&scaled) {
            prop_assert_eq!(*b, w * a);
            prop_assert!(*a == 0.0 || a.abs() == 1.0);
        }
    }

    #[test]
    fn exact_loss_is_linear_in_bound(
        mu in 0.1f64..3.0, sigma in 0.1f64..3.0, eps in 0.0f64..3.0, n in 0.5f64..500.0, w in 0.1f64..5.0,
    ) {
        let spec = GaussianMixtureSpec::isotropic(2, mu, sigma).unwrap();
        let one = exact_generalization_loss(&spec, &AdversarySetting::new(eps, 1.0).unwrap(), n).unwrap();
        let many = exact_generalization_loss(&spec, &AdversarySetting::new(eps, w).unwrap(), n).unwrap();
        prop_assert!((many - w * one).abs() <= 1e-14 * w.max(1.0));
    }

    #[test]
    fn zero_epsilon_reduces_to_erf(mu in 0.1f64..3.0, sigma in 0.1f64..3.0, n in 1u32..2000) {
        let spec = GaussianMixtureSpec::isotropic(1, mu, sigma).unwrap();
        let s = AdversarySetting::new(0.0, 1.0).unwrap();
        let v = (n as f64).sqrt() * mu / (std::f64::consts::SQRT_2 * sigma);
        let l = exact_generalization_loss(&spec, &s, n as f64).unwrap();
        prop_assert!((l + mu * numerics::erf(v).unwrap()).abs() <= 1e-14 * mu.max(1.0));
        let a = exact_generalization_parts(&spec, &s, n as f64).unwrap();
        let b = exact_generalization_parts(&spec, &s, n as f64 + 1.0).unwrap();
        prop_assert!(b.excess <= a.excess);
        if a.excess >= f64::MIN_POSITIVE {
            prop_assert!(b.excess < a.excess);
        }
    }

    #[test]
    fn crossovers_are_zeros_of_f(eps in 0.7f64..3.0) {
        let p = f_sign_profile(eps).unwrap();
        for w in p.windows(2) {
            let t = w[0].hi;
            prop_assert!(f_kernel(t, eps).unwrap().abs() <= 1e-9);
            prop_assert_ne!(w[0].sign, w[1].sign);
        }
        prop_assert_eq!(p.last().unwrap().sign, Sign::Negative);
    }

    #[test]
    fn neutralization_matches_corner_adversary(
        pts in prop::collection::vec((-3.0f64..3.0, any::<bool>()), 1..6),
        eps in 0.0f64..1.5,
    ) {
        let data: Vec<LabeledSample1D> =
            pts.iter().map(|&(x, p)| LabeledSample1D::new(x, if p { 1 } else { -1 })).collect();
        let neutral = neutralize(&data, eps);
        // Worst case over x~ in {x - eps, x + eps} of y 1[x~ < w].
        for k in -80..=80 {
            let w = k as f64 * 0.05 + 0.0123;
            let adversarial: f64 = data
                .iter()
                .map(|s| {
                    [s.x - eps, s.x + eps]
                        .iter()
                        .map(|&xt| if xt < w { f64::from(s.y) } else { 0.0 })
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .sum();
            prop_assert_eq!(adversarial, empirical_robust_objective(&neutral, w));
        }
    }

    #[test]
    fn region_objective_is_global_minimum(
        pts in prop::collection::vec((-3i32..3, any::<bool>()), 1..9),
    ) {
        let data: Vec<LabeledSample1D> = pts
            .iter()
            .map(|&(x, p)| LabeledSample1D::new(x as f64 * 0.5, if p { 1 } else { -1 }))
            .collect();
        let region = minimizer_region(&data).unwrap();
        let mut xs: Vec<f64> = data.iter().map(|s| s.x).collect();
        xs.sort_by(f64::total_cmp);
        let mut probes = vec![xs[0] - 1.0, xs[xs.len() - 1] + 1.0];
        for w in xs.windows(2) {
            probes.push(0.5 * (w[0] + w[1]));
        }
        probes.extend(xs.iter().copied());
        let best = probes.iter().map(|&w| empirical_robust_objective(&data, w)).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(best, region.objective_value);
        for &w in &probes {
            let v = empirical_robust_objective(&data, w);
            prop_assert_eq!(region.contains(w), v == best, "w = {}", w);
        }
    }

    #[test]
    fn hindsight_pick_has_least_magnitude(
        pts in prop::collection::vec((-4.0f64..4.0, any::<bool>()), 1..9),
        seed in any::<u64>(),
    ) {
        let data: Vec<LabeledSample1D> =
            pts.iter().map(|&(x, p)| LabeledSample1D::new(x, if p { 1 } else { -1 })).collect();
        let region = minimizer_region(&data).unwrap();
        let mut rng = derive_substream(seed, 0);
        let w_opt = tiebreak(&region, TiebreakPolicy::OptimalHindsight, &mut rng);
        for _ in 0..50 {
            let w = tiebreak(&region, TiebreakPolicy::Agnostic, &mut rng);
            prop_assert!(region.contains(w));
            prop_assert!(w_opt.abs() <= w.abs());
        }
    }

    #[test]
    fn zero_one_loss_is_unimodal(w in 0.0f64..8.0, dw in 1e-3f64..1.0, mu in 0.1f64..3.0, sigma in 0.1f64..3.0) {
        prop_assert!(zero_one_test_loss(w + dw, mu, sigma) >= zero_one_test_loss(w, mu, sigma));
        prop_assert!(zero_one_test_loss(-w - dw, mu, sigma) >= zero_one_test_loss(-w, mu, sigma));
    }

    #[test]
    fn small_adversary_keeps_levels_inside_signal(
        n_cols in 1usize..6, mu in 0.05f64..0.24, frac in 0.01f64..0.99, n in 0usize..30, seed in any::<u64>(),
    ) {
        let spec = ManhattanSpec::new(n_cols, mu).unwrap();
        let eps = (frac * 2.0 * mu).min(0.49);
        prop_assume!(eps > 0.0 && eps < 2.0 * mu);
        let data = sample_manhattan(&spec, n, &mut derive_substream(seed, 0));
        let clf = fit_manhattan_robust(&data, &spec, eps).unwrap();
        prop_assert!(clf.levels.iter().all(|a| a.abs() < mu));
        prop_assert_eq!(support_loss(&clf, &spec), 0.0);
    }

    #[test]
    fn fitted_norm_obeys_bound(n_cols in 1usize..8, mu in 0.01f64..0.24, eps in 0.01f64..0.49, n in 0usize..40, seed in any::<u64>()) {
        let spec = ManhattanSpec::new(n_cols, mu).unwrap();
        let data = sample_manhattan(&spec, n, &mut derive_substream(seed, 1));
        let clf = fit_manhattan_robust(&data, &spec, eps).unwrap();
        prop_assert!(l1_norm(&clf) <= 2.0 * n_cols as f64 * eps * (mu - eps).abs() * (1.0 + 1e-12));
    }

    #[test]
    fn tie_convention_is_loss_invariant(n_cols in 1usize..5, n in 0usize..12, seed in any::<u64>()) {
        let spec = ManhattanSpec::new(n_cols, 0.1).unwrap();
        let data = sample_manhattan(&spec, n, &mut derive_substream(seed, 2));
        let a = fit_manhattan_robust_with(&data, &spec, 0.4, TieConvention::ServePositive).unwrap();
        let b = fit_manhattan_robust_with(&data, &spec, 0.4, TieConvention::ServeNegative).unwrap();
        prop_assert_eq!(support_loss(&a, &spec), support_loss(&b, &spec));
    }

    #[test]
    fn hinge_closed_form_matches_corners(
        w0 in -3.0f64..3.0, w1 in -3.0f64..3.0, b in -2.0f64..2.0,
        x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, pos in any::<bool>(), eps in 0.0f64..1.0,
    ) {
        let m = SvmModel { w: [w0, w1], b };
        let y = if pos { 1.0 } else { -1.0 };
        let mut worst = f64::NEG_INFINITY;
        for c0 in [-eps, eps] {
            for c1 in [-eps, eps] {
                worst = worst.max(f64::max(0.0, 1.0 - y * (w0 * (x0 + c0) + w1 * (x1 + c1) - b)));
            }
        }
        let closed = robust_hinge_loss(&m, &([x0, x1], y), eps);
        prop_assert!((closed - worst).abs() <= 1e-12);
        prop_assert!(closed >= robust_hinge_loss(&m, &([x0, x1], y), 0.0));
        prop_assert!(robust_hinge_loss(&m, &([x0, x1], y), eps + 0.1) >= closed);
    }

    #[test]
    fn squared_closed_form_matches_endpoints(w in -5.0f64..5.0, x in -3.0f64..3.0, y in -3.0f64..3.0, eps in 0.0f64..2.0) {
        let worst = [x - eps, x + eps].iter().map(|xt| (y - w * xt).powi(2)).fold(f64::NEG_INFINITY, f64::max);
        let closed = robust_squared_loss(w, (x, y), eps);
        prop_assert!((closed - worst).abs() <= 1e-12 * (1.0 + worst));
    }

    #[test]
    fn linreg_golden_section_agrees_with_grid(seed in any::<u64>(), eps in 0.0f64..3.0, poisson in any::<bool>()) {
        let dist = if poisson { XDist::ShiftedPoisson } else { XDist::StandardGaussian };
        let cfg = LinRegConfig::new(eps, 0.5, dist);
        let data = robustgen_core::trainers::sample_linreg(&cfg, 15, &mut derive_substream(seed, 0));
        let (lo, hi) = cfg.search_bracket;
        let k = 20_000;
        let spacing = (hi - lo) / k as f64;
        let (mut best_w, mut best_v) = (lo, f64::INFINITY);
        for i in 0..=k {
            let w = lo + spacing * i as f64;
            let v = linreg_objective(w, &data, eps);
            if v < best_v {
                best_v = v;
                best_w = w;
            }
        }
        let fit = train_linreg_robust(&data, &cfg).unwrap();
        prop_assert!((fit.w - best_w).abs() <= 2.0 * spacing);
    }
}

#[test]
fn strong_profiles_start_positive() {
    for eps in [1.0, 1.2, 2.0, 3.0] {
        let p = f_sign_profile(eps).unwrap();
        assert_eq!(p[0].sign, Sign::Positive, "eps' = {eps}");
    }
}

#[test]
fn increasing_stage_grows_toward_signal() {
    let spec = GaussianMixtureSpec::isotropic(1, 1.0, 2.0).unwrap();
    let stage = |eps: f64| {
        let r = classify_regime(&spec, &AdversarySetting::new(eps, 1.0).unwrap(), 1e4).unwrap();
        assert_eq!(r.label, RegimeLabel::Medium);
        r.threshold("N2").unwrap() - r.threshold("N1").unwrap()
    };
    let (a, b, c) = (stage(0.97), stage(0.99), stage(0.999));
    assert!(a < b && b < c, "{a} {b} {c}");
}

#[test]
fn differences_follow_derivative_sign() {
    for eps in [0.1, 0.5, 0.95, 1.0, 1.5] {
        let spec = GaussianMixtureSpec::isotropic(1, 1.0, 2.0).unwrap();
        let s = AdversarySetting::new(eps, 1.0).unwrap();
        let report = classify_regime(&spec, &s, 1e4).unwrap();
        let near_threshold = |n: f64| report.thresholds.iter().any(|t| (t.n - n).abs() <= 1.0);
        for n in 1..300 {
            let n = n as f64;
            if near_threshold(n + 0.5) {
                continue;
            }
            let a = exact_generalization_parts(&spec, &s, n).unwrap();
            let b = exact_generalization_parts(&spec, &s, n + 1.0).unwrap();
            let diff = b.excess - a.excess;
            let d = loss_derivative_scaled(&spec, &s, n + 0.5).unwrap();
            if diff != 0.0 {
                assert_eq!(diff > 0.0, d > 0.0, "eps={eps} n={n}");
            }
        }
    }
}

#[test]
fn manhattan_closed_form_increases() {
    for n_cols in [2, 3, 5, 10] {
        let spec = ManhattanSpec::new(n_cols, 0.1).unwrap();
        for eps in [0.25, 0.4, 0.5] {
            let mut prev = exact_manhattan_parts(&spec, eps, 1).unwrap();
            for n in 2..=100 {
                let l = exact_manhattan_parts(&spec, eps, n).unwrap();
                assert!(l.excess > prev.excess, "N={n_cols} eps={eps} n={n}");
                assert!(l.total() >= prev.total());
                prev = l;
            }
        }
    }
}

#[test]
fn manhattan_mc_agrees_on_grid() {
    let mut seed = 100;
    for n_cols in [2, 4, 7] {
        let spec = ManhattanSpec::new(n_cols, 0.1).unwrap();
        for n in [1, 3, 8] {
            for eps in [0.25, 0.35, 0.45] {
                seed += 1;
                let e = mc_manhattan_loss(&spec, eps, n, 20_000, seed).unwrap();
                let exact = exact_manhattan_loss(&spec, eps, n as u64).unwrap();
                assert!((e.mean - exact).abs() <= 4.0 * e.stderr + 1e-12, "N={n_cols} n={n} eps={eps}");
            }
        }
    }
}
