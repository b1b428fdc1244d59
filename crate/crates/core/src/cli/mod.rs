//! Command-line front end: `spectrum`, `sweep`, `plot`, `rkt` and `verify`.
//!
//! Exit codes: 0 on success, 2 when the result carries warnings (or the RKT
//! verdict is inconsistent), 1 on invalid input or a failed computation.

mod svg;
mod table;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::rkt::rkt_decision;
use crate::spectrum::{find_eigenvalues_with, sweep_with, SpectrumOptions, DEFAULT_TOL, DEFAULT_TRUNC_N};

pub use svg::{render_svg, PlotData};
pub use table::{format_number, parse_sweep_csv, spectrum_csv, sweep_csv};
pub use verify::{run_verify, Check, Level, VerifyReport};

/// Caps the rayon pool used by every command.
pub const THREADS_ENV: &str = "HARDY_SPECTRA_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_WARN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hardy-spectra", version, about = "Spectra of the Hardy kernel matrices K_alpha")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of K_alpha above the band [0, 2/alpha].
    Spectrum(SpectrumArgs),
    /// Rescaled spectra of alpha K_alpha over an alpha grid, as CSV.
    Sweep(SweepArgs),
    /// SVG figure from a sweep CSV.
    Plot(PlotArgs),
    /// Reproducing kernel thesis verdict.
    Rkt(RktArgs),
    /// Cross-module invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct Numerics {
    /// Root tolerance in the spectral parameter s.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Truncation order of the cross-check oracle.
    #[arg(long = "trunc-n", default_value_t = DEFAULT_TRUNC_N)]
    pub trunc_n: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Kernel exponent, alpha > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[command(flatten)]
    pub numerics: Numerics,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// First grid point.
    #[arg(long, allow_hyphen_values = true)]
    pub min: f64,
    /// Last grid point (inclusive up to rounding).
    #[arg(long, allow_hyphen_values = true)]
    pub max: f64,
    /// Grid step.
    #[arg(long, allow_hyphen_values = true)]
    pub step: f64,
    #[command(flatten)]
    pub numerics: Numerics,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Sweep CSV to draw.
    #[arg(long)]
    pub input: PathBuf,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "svg")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RktArgs {
    /// Kernel exponent, alpha > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Kernel exponent, alpha > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "quick")]
    pub level: Level,
    #[command(flatten)]
    pub numerics: Numerics,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Product of a command: the text to emit and whether it carries warnings.
struct Output {
    text: String,
    code: i32,
}

fn check_alpha(alpha: f64) -> Result<Alpha> {
    Alpha::new(alpha).map_err(|_| Error::Config(format!("--alpha must be positive and finite, got {alpha}")))
}

fn check_numerics(n: &Numerics) -> Result<SpectrumOptions> {
    if !(n.tol > 0.0 && n.tol < 1.0) {
        return Err(Error::Config(format!("--tol must lie in (0, 1), got {}", n.tol)));
    }
    if n.trunc_n < 2 {
        return Err(Error::Config(format!("--trunc-n must be at least 2, got {}", n.trunc_n)));
    }
    Ok(SpectrumOptions {
        tol: n.tol,
        trunc_n: n.trunc_n,
        oracle: true,
    })
}

fn only(format: Format, allowed: &[Format], command: &str) -> Result<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Error::Config(format!("{command} does not write {format:?} output")))
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn warn_code(warned: bool) -> i32 {
    if warned {
        EXIT_WARN
    } else {
        EXIT_OK
    }
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<Output> {
    only(args.format, &[Format::Json, Format::Csv], "spectrum")?;
    let alpha = check_alpha(args.alpha)?;
    let opts = check_numerics(&args.numerics)?;
    let report = find_eigenvalues_with(alpha, opts)?;
    let text = match args.format {
        Format::Csv => spectrum_csv(&report),
        _ => json(&report),
    };
    Ok(Output {
        text,
        code: warn_code(report.has_warnings()),
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<Output> {
    only(args.format, &[Format::Csv, Format::Json], "sweep")?;
    let opts = check_numerics(&args.numerics)?;
    let rows = sweep_with(args.min, args.max, args.step, opts)?;
    let warned = rows.iter().any(|r| !r.warnings.is_empty());
    let text = match args.format {
        Format::Json => json(&rows),
        _ => sweep_csv(&rows),
    };
    Ok(Output {
        text,
        code: warn_code(warned),
    })
}

fn cmd_plot(args: &PlotArgs) -> Result<Output> {
    only(args.format, &[Format::Svg], "plot")?;
    let raw = fs::read_to_string(&args.input)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.input.display())))?;
    let data = parse_sweep_csv(&raw)?;
    Ok(Output {
        text: render_svg(&data),
        code: EXIT_OK,
    })
}

fn cmd_rkt(args: &RktArgs) -> Result<Output> {
    only(args.format, &[Format::Json], "rkt")?;
    let alpha = check_alpha(args.alpha)?;
    Ok(Output {
        text: json(&rkt_decision(alpha)?),
        code: EXIT_OK,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<Output> {
    only(args.format, &[Format::Json], "verify")?;
    let alpha = check_alpha(args.alpha)?;
    let opts = check_numerics(&args.numerics)?;
    let report = run_verify(alpha, args.level, opts);
    let code = if report.pass { EXIT_OK } else { EXIT_ERROR };
    Ok(Output {
        text: json(&report),
        code,
    })
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(raw) = std::env::var_os(THREADS_ENV) {
        let n = raw
            .to_str()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start the thread pool: {e}")))
}

fn dispatch(cli: &Cli) -> (Result<Output>, Option<&PathBuf>) {
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => return (Err(e), None),
    };
    pool.install(|| match &cli.command {
        Command::Spectrum(a) => (cmd_spectrum(a), a.out.as_ref()),
        Command::Sweep(a) => (cmd_sweep(a), a.out.as_ref()),
        Command::Plot(a) => (cmd_plot(a), a.out.as_ref()),
        Command::Rkt(a) => (cmd_rkt(a), a.out.as_ref()),
        Command::Verify(a) => (cmd_verify(a), a.out.as_ref()),
    })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
            let _ = if code == EXIT_OK {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    let inconsistent_exit = matches!(cli.command, Command::Rkt(_));
    let (result, out) = dispatch(&cli);
    match result {
        Ok(output) => {
            let written = match out {
                Some(path) => fs::write(path, &output.text),
                None => stdout.write_all(output.text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_ERROR;
            }
            output.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if inconsistent_exit && matches!(e, Error::Inconsistent(_)) {
                EXIT_WARN
            } else {
                EXIT_ERROR
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["hardy-spectra"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn flags_are_validated() {
        assert_eq!(run_args(&["spectrum", "--alpha", "-1"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["spectrum", "--alpha", "0"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["spectrum", "--alpha", "1", "--bogus"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["spectrum", "--alpha", "1", "--trunc-n", "1"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["sweep", "--min", "1", "--max", "0.5", "--step", "0.1"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["verify", "--alpha", "0"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["rkt", "--alpha", "1", "--format", "csv"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn spectrum_json_small_alpha() {
        let (code, out, _) = run_args(&["spectrum", "--alpha", "0.5", "--trunc-n", "500"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], 0);
        assert_eq!(v["ac_band"], serde_json::json!([0.0, 4.0]));
        assert!(v["warnings"].as_array().unwrap().is_empty());
    }

    #[test]
    fn thread_cap_is_checked() {
        std::env::set_var(THREADS_ENV, "zero");
        let code = run_args(&["spectrum", "--alpha", "0.5"]).0;
        std::env::remove_var(THREADS_ENV);
        assert_eq!(code, EXIT_ERROR);
    }
}
