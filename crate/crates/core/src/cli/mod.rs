//! The `reg` command line.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 inconclusive where a
//! decisive verdict was required, 1 for I/O failures. `REG_THREADS` caps the
//! worker pool.

mod parse;
mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub use parse::{
    parse_complex, parse_f64_list, parse_report, parse_run_config, parse_window, Format,
    OutputSpec, RunConfig,
};
pub use verify::{run_suite, CheckResult, SuiteReport, SUITES};

use crate::analytic::{
    analyticity_radius, analyticity_seminorm, default_ladder, default_resolution, RadiusReport,
};
use crate::classify::{uniform_threshold, RegularityReport};
use crate::error::{Error, Result};
use crate::finitediff::{diff_quotient, diff_quotient_pair, StepBox, Strategy};
use crate::holoext::{extend_eval, render_svg, HolomorphyDomain, DEFAULT_TRUNCATION};
use crate::kernel::{
    ComplexValue, ExtRealVerdict, Operator, Orbit, Resolution, TimeWindow, VerdictKind,
};
use crate::mollifier::{smoothness_probe, MollifierFamily, SmoothnessReport, DEFAULT_LADDER};
use crate::seminorm::{SeminormProperty, SeminormSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "reg",
    version,
    about = "Eventual regularity of operator-valued functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Output format, overriding the configuration.
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one seminorm on the configured orbit.
    Seminorm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        property: String,
        /// `lo,hi` or `lo,` for a half-line.
        #[arg(long)]
        window: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        delta_cap: f64,
        #[arg(long, default_value_t = 64)]
        per_unit: usize,
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Difference quotient with strategy cross-check.
    Diffquot {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        t: f64,
        /// Comma-separated increments.
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
    /// Mollified derivative at a point, or the smoothness probe on a window.
    Mollify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        t: Option<f64>,
        /// Run the smoothness probe on `lo,hi` instead.
        #[arg(long)]
        window: Option<String>,
    },
    /// Cauchy seminorm at one radius, or the radius ladder.
    Analytic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        ladder: Option<String>,
        #[arg(long, default_value_t = crate::analytic::DEFAULT_K_MAX)]
        k_max: usize,
    },
    /// Individual and uniform thresholds of the configured property.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Holomorphic extension at a complex point.
    Extend {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: f64,
        /// `a+bi` or `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        k: usize,
    },
    /// SVG drawing of the extension domain.
    DomainSvg {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_parser = ["text", "json"], default_value = "text")]
        format: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormOutput {
    pub function: String,
    pub property: SeminormProperty,
    pub window: TimeWindow,
    pub verdict: ExtRealVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffquotOutput {
    pub function: String,
    pub t: f64,
    pub h: Vec<f64>,
    pub subset_sum: Vec<ComplexValue>,
    pub nested: Vec<ComplexValue>,
    pub integral: Option<Vec<ComplexValue>>,
    /// `‖SubsetSum − Nested‖ / max(1, ‖SubsetSum‖)`.
    pub nested_gap: f64,
    pub integral_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum MollifyOutput {
    Point {
        function: String,
        l: u32,
        k: usize,
        t: f64,
        value: Vec<ComplexValue>,
        kernel_mass: f64,
    },
    Probe {
        function: String,
        report: SmoothnessReport,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum AnalyticOutput {
    Radius {
        function: String,
        t: f64,
        r: f64,
        k_max: usize,
        verdict: ExtRealVerdict,
    },
    Ladder {
        function: String,
        report: RadiusReport,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendOutput {
    pub function: String,
    pub z: ComplexValue,
    pub witness: usize,
    pub center: f64,
    pub truncation: usize,
    /// Row-major entries.
    pub value: Vec<Vec<ComplexValue>>,
    pub cauchy_constant: f64,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    pub truncation_warning: bool,
}

fn complex_list(v: &crate::kernel::Vector) -> Vec<ComplexValue> {
    v.iter().map(|&z| z.into()).collect()
}

fn rows(op: &Operator) -> Vec<Vec<ComplexValue>> {
    let d = op.dim();
    (0..d)
        .map(|i| (0..d).map(|j| op.entry(i, j).into()).collect())
        .collect()
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_trace(header: &str, trace: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for &(a, b) in trace {
        out.push_str(&format!("{},{}\n", fmt_f(a), fmt_f(b)));
    }
    out
}

fn csv_vector(v: &[ComplexValue]) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, z) in v.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", fmt_f(z.re), fmt_f(z.im)));
    }
    out
}

/// CSV rendering of a subcommand output.
pub trait ToCsv {
    fn to_csv(&self) -> String;
}

impl ToCsv for SeminormOutput {
    fn to_csv(&self) -> String {
        csv_trace("resolution,partial_sup", &self.verdict.refinement_trace)
    }
}

impl ToCsv for DiffquotOutput {
    fn to_csv(&self) -> String {
        let mut out = String::from("strategy,index,re,im\n");
        let mut push = |name: &str, v: &[ComplexValue]| {
            for (i, z) in v.iter().enumerate() {
                out.push_str(&format!("{name},{i},{},{}\n", fmt_f(z.re), fmt_f(z.im)));
            }
        };
        push("SubsetSum", &self.subset_sum);
        push("Nested", &self.nested);
        if let Some(v) = &self.integral {
            push("Integral", v);
        }
        out
    }
}

impl ToCsv for MollifyOutput {
    fn to_csv(&self) -> String {
        match self {
            MollifyOutput::Point { value, .. } => csv_vector(value),
            MollifyOutput::Probe { report, .. } => {
                let mut out = String::from("order,l,l_next,distance,converged\n");
                for o in &report.orders {
                    for &(l, m, d) in &o.distances {
                        out.push_str(&format!("{},{l},{m},{},{}\n", o.k, fmt_f(d), o.converged));
                    }
                }
                out
            }
        }
    }
}

impl ToCsv for AnalyticOutput {
    fn to_csv(&self) -> String {
        match self {
            AnalyticOutput::Radius { verdict, .. } => {
                csv_trace("resolution,partial_sup", &verdict.refinement_trace)
            }
            AnalyticOutput::Ladder { report, .. } => {
                let mut out = String::from("r,verdict,value\n");
                for (r, v) in &report.per_radius {
                    let value = v.value.map_or_else(String::new, fmt_f);
                    out.push_str(&format!("{},{:?},{value}\n", fmt_f(*r), v.kind));
                }
                out
            }
        }
    }
}

impl ToCsv for ExtendOutput {
    fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for (i, row) in self.value.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                out.push_str(&format!("{i},{j},{},{}\n", fmt_f(z.re), fmt_f(z.im)));
            }
        }
        out
    }
}

impl ToCsv for RegularityReport {
    fn to_csv(&self) -> String {
        RegularityReport::to_csv(self)
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| {
        Error::config(
            "config",
            format!("cannot read {}: {e}", common.config.display()),
        )
    })?;
    let mut cfg = parse_run_config(&text)?;
    if let Some(f) = &common.format {
        cfg.output.format = if f == "csv" {
            Format::Csv
        } else {
            Format::Json
        };
    }
    if let Some(p) = &common.output {
        cfg.output.path = Some(p.clone());
    }
    Ok(cfg)
}

fn config_orbit(cfg: &RunConfig) -> Result<Orbit> {
    let f = cfg.operator_function()?;
    let x = cfg.initial_vector(f.dim())?;
    f.orbit(x)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit<T: Serialize + ToCsv>(out: &OutputSpec, value: &T) -> Result<()> {
    let text = match out.format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Csv => value.to_csv(),
    };
    write_text(out.path.as_deref(), &text)
}

fn parse_property(name: &str) -> Result<SeminormProperty> {
    SeminormProperty::ALL
        .into_iter()
        .find(|p| format!("{p:?}").eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::config("property", format!("unknown seminorm {name:?}")))
}

fn decisive(kind: VerdictKind) -> i32 {
    if kind == VerdictKind::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Seminorm {
            common,
            property,
            window,
            alpha,
            delta_cap,
            per_unit,
            levels,
        } => {
            let cfg = load_config(&common)?;
            let property = parse_property(&property)?;
            let window = parse_window("window", &window)?;
            let spec = SeminormSpec::new(property, window)
                .with_alpha(alpha)
                .with_delta_cap(delta_cap)
                .with_resolution(Resolution::new(per_unit, levels)?);
            let verdict = spec.evaluate(&config_orbit(&cfg)?)?;
            let code = decisive(verdict.kind);
            emit(
                &cfg.output,
                &SeminormOutput {
                    function: cfg.function.name().to_string(),
                    property,
                    window,
                    verdict,
                },
            )?;
            Ok(code)
        }
        Command::Diffquot {
            common,
            order,
            t,
            h,
        } => {
            let cfg = load_config(&common)?;
            let h = parse_f64_list("h", &h)?;
            if h.len() != order {
                return Err(Error::config(
                    "h",
                    format!("order {order} needs {order} increments, got {}", h.len()),
                ));
            }
            let delta = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let b = StepBox::new(t, delta, h.clone())?;
            let orbit = config_orbit(&cfg)?;
            let (subset, nested) = diff_quotient_pair(&orbit, &b)?;
            let scale = orbit.norm_of(&subset).max(1.0);
            let integral = if orbit.has_oracle() {
                Some(diff_quotient(&orbit, &b, Strategy::Integral)?)
            } else {
                None
            };
            let out = DiffquotOutput {
                function: cfg.function.name().to_string(),
                t,
                h,
                nested_gap: orbit.norm_of(&(&subset - &nested)) / scale,
                integral_gap: integral
                    .as_ref()
                    .map(|v| orbit.norm_of(&(&subset - v)) / scale),
                subset_sum: complex_list(&subset),
                nested: complex_list(&nested),
                integral: integral.as_ref().map(complex_list),
            };
            emit(&cfg.output, &out)?;
            Ok(EXIT_OK)
        }
        Command::Mollify {
            common,
            k,
            l,
            t,
            window,
        } => {
            let cfg = load_config(&common)?;
            let orbit = config_orbit(&cfg)?;
            let function = cfg.function.name().to_string();
            let out = match (window, l, t) {
                (Some(w), _, _) => {
                    let window = parse_window("window", &w)?;
                    MollifyOutput::Probe {
                        function,
                        report: smoothness_probe(&orbit, &window, k, &DEFAULT_LADDER)?,
                    }
                }
                (None, Some(l), Some(t)) => {
                    let fam = MollifierFamily::new(l, k)?;
                    MollifyOutput::Point {
                        function,
                        l,
                        k,
                        t,
                        value: complex_list(&fam.apply(&orbit, t)),
                        kernel_mass: fam.mass(),
                    }
                }
                _ => return Err(Error::config("mollify", "give --l and --t, or --window")),
            };
            emit(&cfg.output, &out)?;
            Ok(EXIT_OK)
        }
        Command::Analytic {
            common,
            t,
            r,
            ladder,
            k_max,
        } => {
            let cfg = load_config(&common)?;
            let orbit = config_orbit(&cfg)?;
            let function = cfg.function.name().to_string();
            let (out, code) = match r {
                Some(r) => {
                    let verdict = analyticity_seminorm(&orbit, t, r, k_max, &default_resolution())?;
                    let code = decisive(verdict.kind);
                    (
                        AnalyticOutput::Radius {
                            function,
                            t,
                            r,
                            k_max,
                            verdict,
                        },
                        code,
                    )
                }
                None => {
                    let ladder = match ladder {
                        Some(s) => parse_f64_list("ladder", &s)?,
                        None => default_ladder(),
                    };
                    let report = analyticity_radius(&orbit, t, &ladder, k_max)?;
                    (AnalyticOutput::Ladder { function, report }, EXIT_OK)
                }
            };
            emit(&cfg.output, &out)?;
            Ok(code)
        }
        Command::Classify { common } => {
            let cfg = load_config(&common)?;
            let property = cfg
                .property
                .ok_or_else(|| Error::config("property", "classify needs a property"))?;
            let f = cfg.operator_function()?;
            let mut report = uniform_threshold(&f, &property, &cfg.scan, &cfg.classify_options())?;
            report.lattice = cfg.function.time_lattice();
            emit(&cfg.output, &report)?;
            Ok(EXIT_OK)
        }
        Command::Extend { common, t, r, z, k } => {
            let cfg = load_config(&common)?;
            let f = cfg.operator_function()?;
            let dom = HolomorphyDomain::new(t, r, 1)?;
            let z: ComplexValue = parse_complex("z", &z)?.into();
            let e = extend_eval(&f, &dom, z, k)?;
            let out = ExtendOutput {
                function: cfg.function.name().to_string(),
                z,
                witness: e.witness,
                center: e.center,
                truncation: e.truncation,
                value: rows(&e.value),
                cauchy_constant: e.cauchy_constant,
                tail_bound: e.tail_bound,
                rounding_bound: e.rounding_bound,
                truncation_warning: e.truncation_warning(),
            };
            emit(&cfg.output, &out)?;
            Ok(EXIT_OK)
        }
        Command::DomainSvg { t, r, n, output } => {
            let dom = HolomorphyDomain::new(t, r, n)?;
            write_text(output.as_deref(), &render_svg(&dom))?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite, format } => {
            let report = run_suite(&suite)?;
            if format == "json" {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for c in &report.checks {
                    println!(
                        "{} {}: {}",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.detail
                    );
                }
            }
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_IO
            })
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("REG_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::config(
            "REG_THREADS",
            format!("expected a positive integer, got {v:?}"),
        )
    })?;
    // A pool built earlier in this process stays in place.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. }
        | Error::DimensionMismatch { .. }
        | Error::OutOfDomain { .. }
        | Error::Json(_) => EXIT_CONFIG,
        Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        Error::Io(_) => EXIT_IO,
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| execute(cli.command));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
