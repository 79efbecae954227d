//! Parallel sweep driver.

use rayon::prelude::*;
use robustgen_core::curve::LossCurve;
use robustgen_core::harness::{assemble_curves, cells, evaluate, ExperimentConfig};

use crate::error::AppError;

/// Runs every cell of the sweep on `workers` threads. Values are gathered in
/// `(eps, n, replication)` order, so the curves do not depend on `workers`.
pub fn run_sweep(config: &ExperimentConfig, workers: usize) -> Result<Vec<LossCurve>, AppError> {
    config.validate().map_err(|e| AppError::Config(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Config(format!("cannot start {workers} workers: {e}")))?;
    let all: Vec<(usize, usize, usize)> = cells(config).collect();
    let values: Vec<f64> = pool.install(|| {
        all.par_iter()
            .map(|&cell| {
                evaluate(config, cell).map_err(|source| AppError::Numeric {
                    family: config.family.name(),
                    epsilon: config.epsilons[cell.0],
                    n: config.n_values[cell.1],
                    replication: cell.2,
                    source,
                })
            })
            .collect::<Result<Vec<f64>, AppError>>()
    })?;
    assemble_curves(config, &values).map_err(AppError::Analysis)
}

/// Worker count used when none is configured.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
