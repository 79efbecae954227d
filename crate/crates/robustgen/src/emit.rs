//! CSV and JSON output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use robustgen_core::curve::LossCurve;
use robustgen_core::harness::ExperimentConfig;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

pub const CSV_HEADER: &str = "family,epsilon,n,mean_loss,stderr,replications,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    /// `-` means standard output.
    pub fn parse(s: &str) -> Self {
        if s == "-" {
            Destination::Stdout
        } else {
            Destination::File(PathBuf::from(s))
        }
    }

    fn label(&self) -> &Path {
        match self {
            Destination::Stdout => Path::new("<stdout>"),
            Destination::File(p) => p,
        }
    }
}

/// JSON document: the effective configuration next to its curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub config: ExperimentConfig,
    pub curves: Vec<LossCurve>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write + ?Sized>(out: &mut W, config: &ExperimentConfig, curves: &[LossCurve]) -> io::Result<()> {
    write!(out, "{CSV_HEADER}\n")?;
    for c in curves {
        for p in &c.points {
            write!(
                out,
                "{},{},{},{},{},{},{}\n",
                config.family.name(),
                format_float(c.epsilon),
                p.n,
                format_float(p.mean_loss),
                format_float(p.stderr),
                p.replications,
                config.master_seed
            )?;
        }
    }
    Ok(())
}

pub fn write_json<W: Write + ?Sized>(out: &mut W, config: &ExperimentConfig, curves: &[LossCurve]) -> io::Result<()> {
    let doc = SweepDocument { config: config.clone(), curves: curves.to_vec() };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    out.write_all(b"\n")
}

/// Writes any serializable value as pretty JSON to `dest`.
pub fn write_value<T: Serialize>(value: &T, dest: &Destination) -> Result<(), AppError> {
    write_to(dest, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

pub fn emit_results(
    config: &ExperimentConfig,
    curves: &[LossCurve],
    format: Format,
    dest: &Destination,
) -> Result<(), AppError> {
    write_to(dest, |w| match format {
        Format::Csv => write_csv(w, config, curves),
        Format::Json => write_json(w, config, curves),
    })
}

pub(crate) fn write_to<F>(dest: &Destination, body: F) -> Result<(), AppError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let result = match dest {
        Destination::Stdout => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock).and_then(|_| lock.flush())
        }
        Destination::File(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush()
        }),
    };
    result.map_err(|e| AppError::io(dest.label(), e))
}

pub fn read_document(path: &Path) -> Result<SweepDocument, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
}
