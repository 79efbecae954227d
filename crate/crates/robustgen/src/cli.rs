//! Command-line grammar and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use robustgen_core::gauss_linear::{classify_regime, critical_epsilon_prime, AdversarySetting, RegimeReport};
use serde::Serialize;

use crate::config::{parse_assignment, read_config_file, Command, Settings};
use crate::emit::{emit_results, write_to, write_value, Destination, Format};
use crate::error::{AppError, EXIT_OK};
use crate::sweep::{default_workers, run_sweep};
use crate::verify::run_suite;

#[derive(Debug, Parser)]
#[command(name = "robustgen", version, about = "Generalization curves of adversarially trained models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Regime of the Gaussian linear model and its thresholds, as JSON.
    Regimes(Common),
    /// Exact Gaussian linear loss curves.
    Curve(Common),
    /// Monte Carlo Gaussian linear loss curves.
    Mc(Common),
    /// 0-1 loss curves of the 1-D Gaussian model.
    Zeroone(Common),
    /// Manhattan step-classifier loss curves.
    Manhattan(Common),
    /// Robust soft-margin SVM loss curves.
    Svm(Common),
    /// Robust 1-D linear regression loss curves.
    Linreg(Common),
    /// Cross-check closed forms against independent oracles.
    Verify(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Config file of key=value lines.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one key; repeatable, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_assignment_arg)]
    pub overrides: Vec<(String, String)>,
    /// Output path, `-` for standard output.
    #[arg(long, value_name = "PATH", default_value = "-")]
    pub out: String,
    /// Output format (default csv; regimes always writes json).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Master seed; overrides `sweep.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_assignment_arg(s: &str) -> Result<(String, String), String> {
    parse_assignment(s)
}

/// A parsed command line.
#[derive(Debug, Clone)]
pub struct CliInvocation {
    pub command: Command,
    pub common: Common,
}

impl CliInvocation {
    pub fn destination(&self) -> Destination {
        Destination::parse(&self.common.out)
    }

    /// Defaults, then the config file, then `--set` overrides in order, then
    /// `--seed`.
    pub fn settings(&self) -> Result<Settings, AppError> {
        let mut s = Settings::defaults(self.command);
        if let Some(path) = &self.common.config {
            s.apply_all(&read_config_file(path)?)?;
        }
        s.apply_all(&self.common.overrides)?;
        if let Some(seed) = self.common.seed {
            s.seed = seed;
        }
        Ok(s)
    }
}

/// Parses `argv` (including the program name). Help and version requests
/// come back as `Err` with exit status 0.
pub fn parse_invocation<I, T>(argv: I) -> Result<CliInvocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (command, common) = match cli.command {
        Sub::Regimes(c) => (Command::Regimes, c),
        Sub::Curve(c) => (Command::Curve, c),
        Sub::Mc(c) => (Command::Mc, c),
        Sub::Zeroone(c) => (Command::ZeroOne, c),
        Sub::Manhattan(c) => (Command::Manhattan, c),
        Sub::Svm(c) => (Command::Svm, c),
        Sub::Linreg(c) => (Command::LinReg, c),
        Sub::Verify(c) => (Command::Verify, c),
    };
    Ok(CliInvocation { command, common })
}

#[derive(Debug, Serialize)]
struct RegimeEntry {
    epsilon: f64,
    #[serde(flatten)]
    report: RegimeReport,
}

#[derive(Debug, Serialize)]
struct RegimesOutput {
    mu: Vec<f64>,
    sigma: Vec<f64>,
    weight_bound: f64,
    n_max: f64,
    critical_eps_prime_bracket: (f64, f64),
    reports: Vec<RegimeEntry>,
}

fn run_regimes(inv: &CliInvocation, s: &Settings) -> Result<(), AppError> {
    if inv.common.format == Some(Format::Csv) {
        return Err(AppError::Usage("regimes writes JSON only".into()));
    }
    let spec = s.gaussian_spec()?;
    if !(s.n_max > 0.0) {
        return Err(AppError::Config(format!("regimes.n_max must be positive, got {}", s.n_max)));
    }
    let mut reports = Vec::with_capacity(s.epsilons.len());
    for &epsilon in &s.epsilons {
        let setting = AdversarySetting::new(epsilon, s.weight_bound).map_err(|e| AppError::Config(e.to_string()))?;
        let report = classify_regime(&spec, &setting, s.n_max).map_err(AppError::Analysis)?;
        reports.push(RegimeEntry { epsilon, report });
    }
    let out = RegimesOutput {
        mu: spec.mu().to_vec(),
        sigma: spec.sigma().to_vec(),
        weight_bound: s.weight_bound,
        n_max: s.n_max,
        critical_eps_prime_bracket: critical_epsilon_prime().map_err(AppError::Analysis)?,
        reports,
    };
    write_value(&out, &inv.destination())
}

fn run_verify(inv: &CliInvocation, s: &Settings) -> Result<(), AppError> {
    let results = run_suite(s.seed);
    let failed = results.iter().filter(|r| !r.passed).count();
    match inv.common.format.unwrap_or(Format::Csv) {
        Format::Json => {
            #[derive(Serialize)]
            struct Line<'a> {
                name: &'a str,
                passed: bool,
                detail: &'a str,
            }
            let lines: Vec<Line> =
                results.iter().map(|r| Line { name: r.name, passed: r.passed, detail: &r.detail }).collect();
            write_value(&lines, &inv.destination())?;
        }
        Format::Csv => write_to(&inv.destination(), |w| {
            for r in &results {
                writeln!(w, "{}", r.line())?;
            }
            Ok(())
        })?,
    }
    if failed > 0 {
        return Err(AppError::Verification(failed));
    }
    Ok(())
}

/// Executes a parsed invocation.
pub fn run(inv: &CliInvocation) -> Result<(), AppError> {
    let s = inv.settings()?;
    match inv.command {
        Command::Regimes => run_regimes(inv, &s),
        Command::Verify => {
            let workers = s.workers.unwrap_or_else(default_workers);
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| AppError::Config(format!("cannot start {workers} workers: {e}")))?;
            pool.install(|| run_verify(inv, &s))
        }
        _ => {
            let config = s.experiment()?;
            let workers = s.workers.unwrap_or_else(default_workers);
            eprintln!(
                "robustgen: {} sweep, {} eps x {} n x {} replications on {workers} workers",
                config.family.name(),
                config.epsilons.len(),
                config.n_values.len(),
                config.replications_per_point().max(1)
            );
            let curves = run_sweep(&config, workers)?;
            emit_results(&config, &curves, inv.common.format.unwrap_or(Format::Csv), &inv.destination())
        }
    }
}

/// Parses and runs; returns the process exit code. Errors go to stderr.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let inv = match parse_invocation(argv) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&inv) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("robustgen: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides_in_order() {
        let inv = parse_invocation(["robustgen", "regimes", "--set", "mu=1", "--set", "sigma=2", "--set", "epsilon=0.95"])
            .unwrap();
        assert_eq!(inv.command, Command::Regimes);
        assert_eq!(inv.common.overrides.len(), 3);
        assert_eq!(inv.common.overrides[2], ("epsilon".to_string(), "0.95".to_string()));
    }

    #[test]
    fn parses_config_and_out() {
        let inv = parse_invocation(["robustgen", "curve", "--config", "sweep.cfg", "--out", "curves.csv"]).unwrap();
        assert_eq!(inv.command, Command::Curve);
        assert_eq!(inv.common.config.as_deref(), Some(std::path::Path::new("sweep.cfg")));
        assert_eq!(inv.destination(), Destination::File("curves.csv".into()));
        assert_eq!(inv.common.format, None);
    }

    #[test]
    fn bad_tokens_are_usage_errors() {
        let e = parse_invocation(["robustgen", "bogus"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("bogus"));
        let e = parse_invocation(["robustgen", "curve", "--frobnicate"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(parse_invocation(["robustgen", "curve", "--set", "novalue"]).is_err());
        let e = parse_invocation(["robustgen", "svm", "--help"]).unwrap_err();
        assert_eq!(e.exit_code(), 0);
    }
}
