//! `phlab` command-line front end: resolves configuration (flags > JSON file >
//! defaults), runs solvers or claim suites, and writes JSON, CSV or Markdown.
//!
//! Exit codes: 0 all checks passed, 1 a claim failed, 2 usage or
//! configuration error, 3 numerical or I/O failure. Every error also emits a
//! single JSON line on stderr.

pub mod args;
pub mod emit;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use phlab_core::config::{validate_config, DomainChoice, OutputFormat, RawConfig, ResolvedConfig};
use phlab_core::harness::{ClaimSuite, SpectraCache, SuiteContext};
use phlab_core::oned::solve_1d_spectrum;
use phlab_core::{PhlabError, Result};

use args::{Cli, Command, Flags};
use emit::{SpectrumRecord, SuiteRecord};

pub const THREADS_ENV: &str = "PHLAB_THREADS";

/// Runs `phlab` with `argv` (including the program name) against the process
/// streams and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{}", e.render());
            return 0;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let message = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            return report_error(err, &PhlabError::Usage(message.trim_start_matches("error: ").to_string()));
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => report_error(err, &e),
    }
}

fn report_error(err: &mut dyn Write, e: &PhlabError) -> i32 {
    let code = e.exit_code();
    let line = serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code });
    let _ = writeln!(err, "{line}");
    code
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(PhlabError::Usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

/// Flags over the optional JSON config file over defaults.
pub fn resolve(flags: &Flags) -> Result<(ResolvedConfig, RawConfig)> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| PhlabError::Usage(format!("config file {}: {e}", path.display())))?;
            RawConfig::from_json_str(&text)?
        }
        None => RawConfig::default(),
    };
    let raw = file.overlay(flags.raw());
    Ok((validate_config(raw.clone())?, raw))
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<i32> {
    let flags = command.flags();
    let (mut config, raw) = resolve(flags)?;
    if matches!(command, Command::Report { .. }) && raw.format.is_none() {
        config.format = OutputFormat::Markdown;
    }
    if matches!(command, Command::Oned(_)) {
        config.domain = DomainChoice::Interval;
    }
    if let Some(p) = flags.perturb {
        if !(p.is_finite() && p > 0.0) {
            return Err(PhlabError::Usage(format!("perturb must be strictly positive, got {p}")));
        }
    }
    let threads = threads_from_env()?;
    let started = Instant::now();
    let elapsed = |stable: bool| if stable { 0 } else { started.elapsed().as_millis() as u64 };

    let cache = SpectraCache::new(config.tolerances).with_neumann_scale(flags.perturb.unwrap_or(1.0));
    let (text, code) = match command {
        Command::Oned(_) | Command::Spectrum2d(_) => {
            let spectrum = match command {
                Command::Oned(_) => solve_1d_spectrum(config.m, config.bc, config.count, config.length, &config.tolerances)?,
                _ => cache.spectrum(config.m, config.bc, config.n, config.rect()?, Some(config.count))?,
            };
            let rec = SpectrumRecord::new(
                command.name(),
                &spectrum,
                config.echo(),
                elapsed(flags.stable_output),
                config.tolerances,
            );
            let text = match config.format {
                OutputFormat::Json => emit::to_json(&rec)?,
                OutputFormat::Csv => emit::spectrum_csv(&rec.eigenvalues),
                OutputFormat::Markdown => emit::spectrum_markdown(&rec),
            };
            (text, 0)
        }
        Command::Verify { .. } | Command::Report { .. } | Command::All(_) => {
            let set = match command {
                Command::Verify { set, .. } | Command::Report { set, .. } => set.as_str(),
                _ => "all",
            };
            if config.format == OutputFormat::Csv {
                return Err(PhlabError::Usage("csv output is only available for spectra (oned, spectrum2d)".into()));
            }
            let suite = ClaimSuite::for_set(set, &config)?;
            let ctx = SuiteContext { cache, seed: config.seed, samples: config.samples };
            let reports = suite.run(&ctx, threads)?;
            let rec = SuiteRecord::new(command.name(), set, reports, config.echo(), elapsed(flags.stable_output));
            let code = if rec.passed { 0 } else { 1 };
            let text = match config.format {
                OutputFormat::Markdown => emit::suite_markdown(&rec),
                _ => emit::to_json(&rec)?,
            };
            (text, code)
        }
    };
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(code)
}
