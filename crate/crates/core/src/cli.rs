//! Command-line front end.
//!
//! `polarshort <construct|pattern|spectrum|compare|simulate> [flags]`.
//! Exit codes: 0 on success, 2 for usage or configuration errors, 1 for
//! I/O failures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::channel::{run_sweep, StopRule};
use crate::error::Error;
use crate::ga::{build_profile, GaParams, ReliabilityProfile};
use crate::shortening::{generate_pattern, validate_pattern, CodeSpec, Method, ShortenPattern};
use crate::spectrum::{compare_methods, exact_f64, exact_string, MethodSpectrum};
use crate::VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// GA reliability profile and channel rank.
    Construct,
    /// Generate or check a shortening pattern.
    Pattern,
    /// Path spectrum and spectrum distances of one pattern.
    Spectrum,
    /// Spectrum comparison of PD, RQUP and CW.
    Compare,
    /// BER/FER Monte Carlo sweep.
    Simulate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Construct => "construct",
            Command::Pattern => "pattern",
            Command::Spectrum => "spectrum",
            Command::Compare => "compare",
            Command::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A code family selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Pd,
    Cw,
    Rqup,
    /// The unshortened mother code (`n' = n`).
    Mother,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Pd => "pd",
            MethodArg::Cw => "cw",
            MethodArg::Rqup => "rqup",
            MethodArg::Mother => "mother",
        }
    }

    fn method(self) -> Method {
        match self {
            MethodArg::Pd | MethodArg::Mother => Method::Pd,
            MethodArg::Cw => Method::Cw,
            MethodArg::Rqup => Method::Rqup,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "polarshort", version, about = "Shortened polar code toolkit")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Mother code length (power of two).
    #[arg(long)]
    pub n: Option<usize>,
    /// Shortened (transmitted) length n'.
    #[arg(long = "n-short")]
    pub n_short: Option<usize>,
    /// Information bits.
    #[arg(long)]
    pub k: Option<usize>,
    /// Pattern method(s), comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "pd")]
    pub method: Vec<MethodArg>,
    /// Design SNR of the GA construction, dB.
    #[arg(
        long = "design-snr",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub design_snr: f64,
    /// Eb/N0 points in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub ebn0: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long = "min-frame-errors", default_value_t = 100)]
    pub min_frame_errors: u64,
    #[arg(long = "max-frames", default_value_t = 1_000_000)]
    pub max_frames: u64,
    /// Output file. For several simulated methods the method name is
    /// appended to the file stem.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// JSON pattern file (`{"n", "n_short", "method", "indices"}`).
    #[arg(long = "pattern-file")]
    pub pattern_file: Option<PathBuf>,
    /// Evaluation point of the removed-path polynomials in `compare`.
    #[arg(long, default_value_t = 0.5)]
    pub x: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl RunConfig {
    fn require(&self, value: Option<usize>, flag: &str) -> CliResult<usize> {
        value.ok_or_else(|| {
            Failure::Usage(format!("--{flag} is required for {}", self.command.name()))
        })
    }

    fn n(&self) -> CliResult<usize> {
        let n = self.require(self.n, "n")?;
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n).into());
        }
        Ok(n)
    }

    fn profile(&self, n: usize) -> CliResult<Arc<ReliabilityProfile>> {
        let params = GaParams::from_design_snr(self.design_snr)?;
        Ok(Arc::new(build_profile(n, &params)?))
    }

    fn single_method(&self) -> CliResult<MethodArg> {
        match self.method.as_slice() {
            [m] => Ok(*m),
            _ => Err(Failure::Usage(format!(
                "{} takes a single --method",
                self.command.name()
            ))),
        }
    }

    /// Canonical command line for one method; re-running it reproduces the
    /// output.
    fn command_line(&self, method: Option<MethodArg>) -> String {
        let mut s = format!("polarshort {}", self.command.name());
        if let Some(n) = self.n {
            let _ = write!(s, " --n {n}");
        }
        if let Some(n) = self.n_short {
            let _ = write!(s, " --n-short {n}");
        }
        if let Some(k) = self.k {
            let _ = write!(s, " --k {k}");
        }
        if let Some(path) = &self.pattern_file {
            let _ = write!(s, " --pattern-file {}", path.display());
        } else if let Some(m) = method {
            let _ = write!(s, " --method {}", m.name());
        }
        let _ = write!(s, " --design-snr {}", self.design_snr);
        match self.command {
            Command::Simulate => {
                let list: Vec<String> = self.ebn0.iter().map(|e| e.to_string()).collect();
                let _ = write!(
                    s,
                    " --ebn0 {} --seed {} --min-frame-errors {} --max-frames {}",
                    list.join(","),
                    self.seed,
                    self.min_frame_errors,
                    self.max_frames
                );
            }
            Command::Compare => {
                let _ = write!(s, " --x {}", self.x);
            }
            _ => {}
        }
        let _ = write!(
            s,
            " --format {}",
            match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
        );
        s
    }

    fn provenance(&self, method: Option<MethodArg>) -> Vec<String> {
        vec![
            format!("polarshort {VERSION}"),
            format!("command: {}", self.command_line(method)),
            format!("seed: {}", self.seed),
        ]
    }

    fn provenance_json(&self, method: Option<MethodArg>) -> serde_json::Value {
        json!({
            "toolkit": format!("polarshort {VERSION}"),
            "command": self.command_line(method),
            "seed": self.seed,
        })
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    if let Some(path) = path {
        fs::write(path, text)?;
    }
    Ok(())
}

fn csv_with_header(provenance: &[String], body: &str) -> String {
    let mut out = String::new();
    for line in provenance {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str(body);
    out
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_construct(cfg: &RunConfig) -> CliResult<()> {
    let n = cfg.n()?;
    let profile = cfg.profile(n)?;
    println!("rank: {}", join(&profile.rank));
    let text = match cfg.format {
        Format::Csv => csv_with_header(&cfg.provenance(None), &profile.to_csv()),
        Format::Json => serde_json::to_string_pretty(&json!({
            "provenance": cfg.provenance_json(None),
            "profile": *profile,
        }))
        .expect("profile serializes"),
    };
    write_output(cfg.out.as_deref(), &text)
}

/// The pattern named by `--pattern-file`, or generated by `--method`.
fn load_pattern(cfg: &RunConfig, profile_n: Option<usize>) -> CliResult<ShortenPattern> {
    if let Some(path) = &cfg.pattern_file {
        let text = fs::read_to_string(path)?;
        let pattern = ShortenPattern::from_json(&text)?;
        if let Some(n) = profile_n.or(cfg.n) {
            if n != pattern.n() {
                return Err(Failure::Usage(format!(
                    "pattern file is for n = {}, not {n}",
                    pattern.n()
                )));
            }
        }
        return Ok(pattern);
    }
    let n = cfg.n()?;
    let n_short = cfg.require(cfg.n_short, "n-short")?;
    let arg = cfg.single_method()?;
    let profile = cfg.profile(n)?;
    let n_short = if arg == MethodArg::Mother { n } else { n_short };
    Ok(generate_pattern(arg.method(), &profile, n_short)?)
}

fn checked(pattern: &ShortenPattern) -> CliResult<()> {
    validate_pattern(pattern).map_err(|v| Failure::Usage(format!("invalid pattern: {v}")))
}

fn cmd_pattern(cfg: &RunConfig) -> CliResult<()> {
    let pattern = load_pattern(cfg, None)?;
    checked(&pattern)?;
    println!(
        "pattern {} (n={}, n'={}): {} (valid)",
        pattern.method(),
        pattern.n(),
        pattern.n_short(),
        join(pattern.indices())
    );
    let mut doc: serde_json::Value = serde_json::from_str(&pattern.to_json()).expect("json");
    doc["provenance"] = cfg.provenance_json(cfg.method.first().copied());
    write_output(
        cfg.out.as_deref(),
        &serde_json::to_string_pretty(&doc).expect("json"),
    )
}

fn cmd_spectrum(cfg: &RunConfig) -> CliResult<()> {
    let pattern = load_pattern(cfg, None)?;
    checked(&pattern)?;
    let half = num_rational::BigRational::from_float(cfg.x)
        .ok_or_else(|| Failure::Usage("--x must be finite".into()))?;
    let ms = MethodSpectrum::new(&pattern, &half)?;
    println!(
        "{}: lambda = {} ({:.4}), d = {} ({:.4})",
        ms.method,
        exact_string(&ms.lambda),
        exact_f64(&ms.lambda),
        exact_string(&ms.d),
        exact_f64(&ms.d)
    );
    let mut doc = ms.to_json();
    doc["provenance"] = cfg.provenance_json(cfg.method.first().copied());
    write_output(
        cfg.out.as_deref(),
        &serde_json::to_string_pretty(&doc).expect("json"),
    )
}

fn cmd_compare(cfg: &RunConfig) -> CliResult<()> {
    let n = cfg.n()?;
    let n_short = cfg.require(cfg.n_short, "n-short")?;
    let profile = cfg.profile(n)?;
    let cmp = compare_methods(n.trailing_zeros(), n_short, &profile, cfg.x)?;
    for m in &cmp.methods {
        println!(
            "{:<5} lambda = {} ({:.4})  d = {} ({:.4})",
            m.method,
            exact_string(&m.lambda),
            exact_f64(&m.lambda),
            exact_string(&m.d),
            exact_f64(&m.d)
        );
    }
    let mut ranking = String::new();
    for (i, m) in cmp.ranking.iter().enumerate() {
        if i > 0 {
            let prev = cmp.get(cmp.ranking[i - 1]).expect("present").lambda;
            let cur = cmp.get(*m).expect("present").lambda;
            ranking.push_str(if prev == cur { " = " } else { " > " });
        }
        ranking.push_str(m.as_str());
    }
    println!("ranking: {ranking}");
    let mut doc = cmp.to_json();
    doc["provenance"] = cfg.provenance_json(None);
    write_output(
        cfg.out.as_deref(),
        &serde_json::to_string_pretty(&doc).expect("json"),
    )
}

fn series_path(out: &Path, method: MethodArg) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut name = format!("{stem}_{}", method.name());
    if let Some(ext) = out.extension() {
        name.push('.');
        name.push_str(&ext.to_string_lossy());
    }
    out.with_file_name(name)
}

fn cmd_simulate(cfg: &RunConfig) -> CliResult<()> {
    let n = cfg.n()?;
    let k = cfg.require(cfg.k, "k")?;
    if cfg.ebn0.is_empty() {
        return Err(Failure::Usage("--ebn0 is required for simulate".into()));
    }
    let stop = StopRule::new(cfg.min_frame_errors, cfg.max_frames)?;
    let profile = cfg.profile(n)?;

    // Build every code before running anything so config errors exit early.
    let mut codes = Vec::new();
    if cfg.pattern_file.is_some() {
        let pattern = load_pattern(cfg, Some(n))?;
        codes.push((None, CodeSpec::from_pattern(profile.clone(), pattern, k)?));
    } else {
        let n_short = cfg.require(cfg.n_short, "n-short")?;
        for &m in &cfg.method {
            let spec = if m == MethodArg::Mother {
                CodeSpec::mother(profile.clone(), k)?
            } else {
                if k > n_short {
                    return Err(Failure::Usage(format!(
                        "k = {k} exceeds the shortened length {n_short}"
                    )));
                }
                CodeSpec::from_pattern(
                    profile.clone(),
                    generate_pattern(m.method(), &profile, n_short)?,
                    k,
                )?
            };
            codes.push((Some(m), spec));
        }
    }

    let many = codes.len() > 1;
    for (method, spec) in &codes {
        let label = method.map_or("custom", |m| m.name());
        let result = run_sweep(spec, &cfg.ebn0, &stop, cfg.seed)?;
        for p in &result.points {
            println!(
                "{label:<6} n'={} k={} ebn0={:.2} dB frames={} bit_errors={} frame_errors={} ber={:.3e} fer={:.3e}",
                spec.n_short, spec.k, p.ebn0_db, p.frames, p.bit_errors, p.frame_errors, p.ber, p.fer
            );
        }
        let text = match cfg.format {
            Format::Csv => result.to_csv(&cfg.provenance(*method)),
            Format::Json => result.to_json(cfg.provenance_json(*method)),
        };
        if let Some(out) = &cfg.out {
            let path = match (many, method) {
                (true, Some(m)) => series_path(out, *m),
                _ => out.clone(),
            };
            write_output(Some(&path), &text)?;
        }
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> i32 {
    let outcome = match cfg.command {
        Command::Construct => cmd_construct(cfg),
        Command::Pattern => cmd_pattern(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Compare => cmd_compare(cfg),
        Command::Simulate => cmd_simulate(cfg),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_IO
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}
