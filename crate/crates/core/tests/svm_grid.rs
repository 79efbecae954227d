use robustgen_core::numerics::derive_substream;
use robustgen_core::trainers::{sample_gaussian_mixture_2d, svm_objective, train_svm_robust, SvmConfig, SvmModel};

/// Minimum of the objective over a 61^3 grid on [-3, 3]^3, refined by
/// shrinking 5^3 grids around the incumbent.
fn grid_minimum(f: impl Fn(&SvmModel) -> f64) -> f64 {
    let mut best = (f64::INFINITY, SvmModel::ZERO);
    let at = |i: i32| -3.0 + 0.1 * i as f64;
    for i in 0..=60 {
        for j in 0..=60 {
            for k in 0..=60 {
                let m = SvmModel { w: [at(i), at(j)], b: at(k) };
                let v = f(&m);
                if v < best.0 {
                    best = (v, m);
                }
            }
        }
    }
    let mut h = 0.1;
    for _ in 0..40 {
        let c = best.1;
        for i in -2..=2 {
            for j in -2..=2 {
                for k in -2..=2 {
                    let m = SvmModel {
                        w: [c.w[0] + h * i as f64 / 2.0, c.w[1] + h * j as f64 / 2.0],
                        b: c.b + h * k as f64 / 2.0,
                    };
                    let v = f(&m);
                    if v < best.0 {
                        best = (v, m);
                    }
                }
            }
        }
        if best.1 == c {
            h *= 0.5;
        }
    }
    best.0
}

#[test]
fn trained_svm_reaches_grid_optimum() {
    let eps = 0.3;
    let config = SvmConfig::new(eps);
    let data = sample_gaussian_mixture_2d(&[1.0, 1.0], 20, &mut derive_substream(1, 0));
    let model = train_svm_robust(&data, &config).unwrap();
    let trained = svm_objective(&model, &data, config.lambda, eps);
    let grid = grid_minimum(|m| svm_objective(m, &data, config.lambda, eps));
    assert!(trained <= grid + 1e-3, "trained {trained} vs grid {grid}");
}

#[test]
fn doubling_iterations_never_hurts() {
    for seed in 1..=6 {
        let data = sample_gaussian_mixture_2d(&[1.0, 1.0], 20, &mut derive_substream(seed, 0));
        let mut config = SvmConfig::new(0.3);
        let mut prev = f64::INFINITY;
        for _ in 0..4 {
            let v = svm_objective(&train_svm_robust(&data, &config).unwrap(), &data, config.lambda, 0.3);
            assert!(v <= prev, "seed {seed}");
            prev = v;
            config.iterations *= 2;
        }
    }
}

#[test]
fn training_is_deterministic() {
    let data = sample_gaussian_mixture_2d(&[1.0, 1.0], 30, &mut derive_substream(9, 0));
    let config = SvmConfig::new(0.5);
    assert_eq!(train_svm_robust(&data, &config).unwrap(), train_svm_robust(&data, &config).unwrap());
}
