//! Flat `key=value` configuration with `start:stop:step` ranges.
//!
//! A config file holds one `key=value` per line; blank lines and lines
//! starting with `#` are skipped. `--set key=value` overrides are applied
//! after the file, in order. Each subcommand accepts a fixed set of keys and
//! rejects the rest.

use std::path::Path;

use robustgen_core::gauss_linear::GaussianMixtureSpec;
use robustgen_core::gauss_zeroone::TiebreakPolicy;
use robustgen_core::harness::{ExperimentConfig, Family, FamilyParams};
use robustgen_core::manhattan::ManhattanSpec;
use robustgen_core::trainers::XDist;
use serde::Serialize;

use crate::error::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Regimes,
    Curve,
    Mc,
    ZeroOne,
    Manhattan,
    Svm,
    LinReg,
    Verify,
}

impl Command {
    pub fn family(self) -> Option<Family> {
        match self {
            Command::Curve => Some(Family::GaussLinearExact),
            Command::Mc => Some(Family::GaussLinearMC),
            Command::ZeroOne => Some(Family::GaussZeroOne),
            Command::Manhattan => Some(Family::Manhattan),
            Command::Svm => Some(Family::Svm),
            Command::LinReg => Some(Family::LinReg),
            Command::Regimes | Command::Verify => None,
        }
    }

    /// Keys accepted by this subcommand. `epsilon` is an alias of
    /// `sweep.epsilons` and `seed` of `sweep.seed`.
    pub fn keys(self) -> &'static [&'static str] {
        macro_rules! sweep {
            ($($k:literal),*) => {
                &[$($k,)* "epsilon", "sweep.epsilons", "sweep.n_values", "sweep.replications", "seed", "sweep.seed", "sweep.workers"]
            };
        }
        match self {
            Command::Regimes => &["mu", "sigma", "d", "weight_bound", "epsilon", "sweep.epsilons", "regimes.n_max"],
            Command::Curve => &["mu", "sigma", "d", "weight_bound", "epsilon", "sweep.epsilons", "sweep.n_values"],
            Command::Mc => sweep!("mu", "sigma", "d", "weight_bound"),
            Command::ZeroOne => sweep!("mu", "sigma", "tiebreak"),
            Command::Manhattan => sweep!("mu", "columns"),
            Command::Svm => sweep!("mu", "lambda", "step_size", "iterations"),
            Command::LinReg => sweep!("w_star", "x_dist"),
            Command::Verify => &["seed", "sweep.seed", "sweep.workers"],
        }
    }
}

/// Lines of a config file as `(key, value)` pairs.
pub fn parse_config_text(text: &str, origin: &str) -> Result<Vec<(String, String)>, AppError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let pair = parse_assignment(line)
            .map_err(|e| AppError::Config(format!("{origin}:{}: {e}", i + 1)))?;
        out.push(pair);
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_config_text(&text, &path.display().to_string())
}

/// `key=value`, both sides trimmed and nonempty.
pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(format!("expected key=value, got `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, AppError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| AppError::Config(format!("{key}: `{v}` is not a finite number")))
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, AppError> {
    v.parse::<T>().map_err(|_| AppError::Config(format!("{key}: `{v}` is not a valid integer")))
}

/// Comma list, or an inclusive `start:stop:step` range.
pub fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>, AppError> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h) = (parse_f64(key, start)?, parse_f64(key, stop)?, parse_f64(key, step)?);
            if !(h > 0.0) || b < a {
                return Err(AppError::Config(format!("{key}: range `{v}` needs step > 0 and start <= stop")));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * h).collect())
        }
        [_] => v.split(',').map(|x| parse_f64(key, x.trim())).collect(),
        _ => Err(AppError::Config(format!("{key}: `{v}` is neither a list nor start:stop:step"))),
    }
}

pub fn parse_u64_list(key: &str, v: &str) -> Result<Vec<u64>, AppError> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h): (u64, u64, u64) = (parse_int(key, start)?, parse_int(key, stop)?, parse_int(key, step)?);
            if h == 0 || b < a {
                return Err(AppError::Config(format!("{key}: range `{v}` needs step > 0 and start <= stop")));
            }
            Ok((a..=b).step_by(h as usize).collect())
        }
        [_] => v.split(',').map(|x| parse_int(key, x.trim())).collect(),
        _ => Err(AppError::Config(format!("{key}: `{v}` is neither a list nor start:stop:step"))),
    }
}

/// Every setting any subcommand understands, with its defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    #[serde(skip)]
    pub command: Command,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub d: Option<usize>,
    pub weight_bound: f64,
    pub tiebreak: TiebreakPolicy,
    pub columns: usize,
    pub lambda: f64,
    pub step_size: f64,
    pub iterations: usize,
    pub w_star: f64,
    pub x_dist: XDist,
    pub epsilons: Vec<f64>,
    pub n_values: Vec<u64>,
    pub replications: usize,
    pub seed: u64,
    #[serde(skip)]
    pub workers: Option<usize>,
    pub n_max: f64,
}

impl Settings {
    pub fn defaults(command: Command) -> Self {
        let mut s = Settings {
            command,
            mu: vec![1.0],
            sigma: vec![2.0],
            d: None,
            weight_bound: 1.0,
            tiebreak: TiebreakPolicy::Agnostic,
            columns: 5,
            lambda: 1e-3,
            step_size: 0.05,
            iterations: 5000,
            w_star: 0.5,
            x_dist: XDist::StandardGaussian,
            epsilons: vec![0.1, 0.5, 0.95, 1.5],
            n_values: (1..=100).collect(),
            replications: 10_000,
            seed: 0,
            workers: None,
            n_max: 1e4,
        };
        match command {
            Command::Regimes => s.epsilons = vec![0.95],
            Command::Curve | Command::Verify => {}
            Command::Mc => {
                s.epsilons = vec![0.5, 0.95, 1.5];
                s.n_values = vec![1, 10, 100];
            }
            Command::ZeroOne => {
                s.sigma = vec![1.0];
                s.epsilons = vec![0.1, 2.0];
                s.n_values = vec![5, 10, 20, 50, 100];
            }
            Command::Manhattan => {
                s.mu = vec![0.1];
                s.epsilons = vec![0.1, 0.4];
                s.n_values = (1..=50).collect();
            }
            Command::Svm => {
                s.mu = vec![1.0, 1.0];
                s.epsilons = vec![0.2, 0.5, 0.7, 1.5];
                s.n_values = vec![5, 20, 80, 320];
                s.replications = 200;
            }
            Command::LinReg => {
                s.epsilons = vec![0.4, 1.2];
                s.n_values = vec![5, 20, 80, 320];
                s.replications = 500;
            }
        }
        s
    }

    /// Applies one `key=value`; keys the subcommand does not accept are
    /// rejected by name.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), AppError> {
        if !self.command.keys().contains(&key) {
            return Err(AppError::Usage(format!(
                "unknown key `{key}` for this subcommand (accepted: {})",
                self.command.keys().join(", ")
            )));
        }
        match key {
            "mu" => self.mu = parse_f64_list(key, value)?,
            "sigma" => self.sigma = parse_f64_list(key, value)?,
            "d" => self.d = Some(parse_int(key, value)?),
            "weight_bound" => self.weight_bound = parse_f64(key, value)?,
            "tiebreak" => {
                self.tiebreak = match value {
                    "agnostic" => TiebreakPolicy::Agnostic,
                    "hindsight" | "optimal-hindsight" => TiebreakPolicy::OptimalHindsight,
                    _ => return Err(AppError::Config(format!("tiebreak: expected agnostic|hindsight, got `{value}`"))),
                }
            }
            "columns" => self.columns = parse_int(key, value)?,
            "lambda" => self.lambda = parse_f64(key, value)?,
            "step_size" => self.step_size = parse_f64(key, value)?,
            "iterations" => self.iterations = parse_int(key, value)?,
            "w_star" => self.w_star = parse_f64(key, value)?,
            "x_dist" => {
                self.x_dist = match value {
                    "gaussian" => XDist::StandardGaussian,
                    "poisson" => XDist::ShiftedPoisson,
                    _ => return Err(AppError::Config(format!("x_dist: expected gaussian|poisson, got `{value}`"))),
                }
            }
            "epsilon" | "sweep.epsilons" => self.epsilons = parse_f64_list(key, value)?,
            "sweep.n_values" => self.n_values = parse_u64_list(key, value)?,
            "sweep.replications" => self.replications = parse_int(key, value)?,
            "seed" | "sweep.seed" => self.seed = parse_int(key, value)?,
            "sweep.workers" => {
                let w: usize = parse_int(key, value)?;
                if w == 0 {
                    return Err(AppError::Config("sweep.workers must be at least 1".into()));
                }
                self.workers = Some(w);
            }
            "regimes.n_max" => self.n_max = parse_f64(key, value)?,
            _ => unreachable!("key table and match arms disagree on `{key}`"),
        }
        Ok(())
    }

    pub fn apply_all(&mut self, pairs: &[(String, String)]) -> Result<(), AppError> {
        pairs.iter().try_for_each(|(k, v)| self.apply(k, v))
    }

    /// The Gaussian mixture: scalars are broadcast to `d` coordinates.
    pub fn gaussian_spec(&self) -> Result<GaussianMixtureSpec, AppError> {
        let d = self.d.unwrap_or(self.mu.len().max(self.sigma.len()));
        let expand = |name: &str, v: &[f64]| -> Result<Vec<f64>, AppError> {
            match v.len() {
                1 => Ok(vec![v[0]; d]),
                k if k == d => Ok(v.to_vec()),
                k => Err(AppError::Config(format!("{name} has {k} entries but d = {d}"))),
            }
        };
        GaussianMixtureSpec::new(expand("mu", &self.mu)?, expand("sigma", &self.sigma)?)
            .map_err(|e| AppError::Config(e.to_string()))
    }

    fn scalar(&self, name: &str, v: &[f64]) -> Result<f64, AppError> {
        match v {
            [x] => Ok(*x),
            _ => Err(AppError::Config(format!("{name} must be a single number for this subcommand"))),
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, AppError> {
        let family = self
            .command
            .family()
            .ok_or_else(|| AppError::Usage("this subcommand does not run a sweep".into()))?;
        let params = match family {
            Family::GaussLinearExact | Family::GaussLinearMC => {
                FamilyParams::GaussLinear { spec: self.gaussian_spec()?, weight_bound: self.weight_bound }
            }
            Family::GaussZeroOne => FamilyParams::ZeroOne {
                mu: self.scalar("mu", &self.mu)?,
                sigma: self.scalar("sigma", &self.sigma)?,
                tiebreak: self.tiebreak,
            },
            Family::Manhattan => {
                let spec = ManhattanSpec::new(self.columns, self.scalar("mu", &self.mu)?)
                    .map_err(|e| AppError::Config(e.to_string()))?;
                FamilyParams::Manhattan { spec }
            }
            Family::Svm => {
                let mu = match self.mu.as_slice() {
                    [m] => [*m, *m],
                    [a, b] => [*a, *b],
                    _ => return Err(AppError::Config("svm mu needs 1 or 2 entries".into())),
                };
                FamilyParams::Svm { mu, lambda: self.lambda, step_size: self.step_size, iterations: self.iterations }
            }
            Family::LinReg => FamilyParams::LinReg { w_star: self.w_star, x_dist: self.x_dist },
        };
        let config = ExperimentConfig {
            family,
            params,
            epsilons: self.epsilons.clone(),
            n_values: self.n_values.clone(),
            replications: if family.is_exact() { 1 } else { self.replications },
            master_seed: self.seed,
        };
        config.validate().map_err(|e| AppError::Config(e.to_string()))?;
        Ok(config)
    }
}
