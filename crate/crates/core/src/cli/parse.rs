//! Text and document parsers behind the command line. Each one is total:
//! malformed input yields an error, never a panic.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classify::{default_scan, ClassifyOptions, Property, RegularityReport};
use crate::error::{Error, Result};
use crate::gallery::{make_example, ExampleSpec};
use crate::kernel::{ComplexValue, OperatorFunction, TimeWindow, Vector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

fn default_seed() -> u64 {
    crate::classify::DEFAULT_SEED
}

/// The single JSON document driving a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub function: ExampleSpec,
    /// Initial vector of the orbit; all ones when absent.
    #[serde(default)]
    pub vector: Option<Vec<ComplexValue>>,
    #[serde(default)]
    pub property: Option<Property>,
    #[serde(default = "default_scan")]
    pub scan: Vec<usize>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Seed of the random probe vectors.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub options: Option<ClassifyOptions>,
}

impl RunConfig {
    pub fn operator_function(&self) -> Result<OperatorFunction> {
        make_example(&self.function)
    }

    pub fn initial_vector(&self, dim: usize) -> Result<Vector> {
        match &self.vector {
            None => Ok(Vector::from_element(dim, C64::new(1.0, 0.0))),
            Some(v) if v.len() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            }),
            Some(v) if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) => {
                Err(Error::config("vector", "entries must be finite"))
            }
            Some(v) => Ok(Vector::from_iterator(dim, v.iter().map(|&z| C64::from(z)))),
        }
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        let mut opts = self.options.clone().unwrap_or_default();
        opts.seed = self.seed;
        opts
    }
}

/// Parses and validates a run configuration: the example must build and the
/// vector must match its dimension.
pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
    let f = cfg.operator_function()?;
    cfg.initial_vector(f.dim())?;
    if cfg.scan.first() != Some(&0) || cfg.scan.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            "scan",
            "must start at 0 and increase strictly",
        ));
    }
    Ok(cfg)
}

pub fn parse_report(text: &str) -> Result<RegularityReport> {
    serde_json::from_str(text).map_err(|e| Error::config("report", e.to_string()))
}

fn parse_number(field: &str, s: &str) -> Result<f64> {
    let s = s.trim();
    let v: f64 = s
        .parse()
        .map_err(|_| Error::config(field, format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::config(field, format!("must be finite, got {s:?}")));
    }
    Ok(v)
}

/// Comma-separated finite reals, e.g. `0.1,-0.1`.
pub fn parse_f64_list(field: &str, s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(Error::config(field, "empty list"));
    }
    s.split(',').map(|item| parse_number(field, item)).collect()
}

/// `a`, `bi`, `a+bi`, `a-bi` or `a,b`.
pub fn parse_complex(field: &str, s: &str) -> Result<C64> {
    let s = s.trim();
    if let Some((re, im)) = s.split_once(',') {
        return Ok(C64::new(parse_number(field, re)?, parse_number(field, im)?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_number(field, s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (parse_number(field, &body[..p])?, &body[p..]),
        None => (0.0, body),
    };
    let im = match im.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_number(field, other)?,
    };
    Ok(C64::new(re, im))
}

/// `lo,hi` or `lo,` / `lo,inf` for the half-line.
pub fn parse_window(field: &str, s: &str) -> Result<TimeWindow> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| Error::config(field, format!("expected lo,hi, got {s:?}")))?;
    let lo = parse_number(field, lo)?;
    match hi.trim() {
        "" | "inf" => TimeWindow::unbounded(lo),
        h => TimeWindow::new(lo, parse_number(field, h)?),
    }
}
