//! Artifact formats. Floats are always written with 17 significant digits
//! (`{:.16e}`), which round-trips every finite `f64`.

use std::fmt::Write as _;
use std::io;

use phlab_core::model::{Domain, ReportStatus, Spectrum, ToleranceConfig, VerificationReport};
use phlab_core::{PhlabError, Result};
use serde::Serialize;
use serde_json::ser::Formatter;

pub const SCHEMA_VERSION: &str = "1";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `serde_json` formatter writing every float with 17 significant digits.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser).map_err(|e| PhlabError::Io(e.to_string()))?;
    let mut s = String::from_utf8(buf).expect("serde_json writes utf-8");
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainRecord {
    pub shape: &'static str,
    pub lx: f64,
    /// `None` for intervals, where `lx` is the length.
    pub ly: Option<f64>,
}

impl From<Domain> for DomainRecord {
    fn from(d: Domain) -> Self {
        match d {
            Domain::Interval { length } => DomainRecord { shape: "interval", lx: length, ly: None },
            Domain::Rectangle { lx, ly } => {
                DomainRecord { shape: if lx == ly { "square" } else { "rectangle" }, lx, ly: Some(ly) }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub m: u32,
    pub bc: &'static str,
    pub domain: DomainRecord,
    pub method: phlab_core::Method,
    pub eigenvalues: Vec<f64>,
    pub trusted_count: usize,
    pub tolerances: ToleranceConfig,
    pub config: serde_json::Value,
    pub runtime_ms: u64,
}

impl SpectrumRecord {
    pub fn new(command: &'static str, spectrum: &Spectrum, config: serde_json::Value, runtime_ms: u64, tol: ToleranceConfig) -> Self {
        SpectrumRecord {
            schema_version: SCHEMA_VERSION,
            command,
            m: spectrum.m.get(),
            bc: spectrum.bc.as_str(),
            domain: spectrum.domain.into(),
            method: spectrum.method,
            eigenvalues: spectrum.values.clone(),
            trusted_count: spectrum.trusted_count,
            tolerances: tol,
            config,
            runtime_ms,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub informational: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteRecord {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub set: String,
    pub passed: bool,
    pub summary: SuiteSummary,
    pub config: serde_json::Value,
    pub reports: Vec<VerificationReport>,
    pub runtime_ms: u64,
}

impl SuiteRecord {
    pub fn new(command: &'static str, set: &str, reports: Vec<VerificationReport>, config: serde_json::Value, runtime_ms: u64) -> Self {
        let informational = reports.iter().filter(|r| r.status == ReportStatus::Informational).count();
        let failed = reports.iter().filter(|r| r.is_failure()).count();
        SuiteRecord {
            schema_version: SCHEMA_VERSION,
            command,
            set: set.to_string(),
            passed: failed == 0,
            summary: SuiteSummary { total: reports.len(), passed: reports.len() - failed - informational, failed, informational },
            config,
            reports,
            runtime_ms,
        }
    }
}

pub fn spectrum_csv(values: &[f64]) -> String {
    let mut s = String::from("k,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, fmt_f64(*v));
    }
    s
}

/// Inverse of [`spectrum_csv`]; rows must be numbered 1, 2, ... in order.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<f64>> {
    let bad = |line: usize, what: &str| PhlabError::Usage(format!("csv line {line}: {what}"));
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("k,value") {
        return Err(bad(1, "expected header `k,value`"));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once(',').ok_or_else(|| bad(i + 2, "expected two columns"))?;
        let k: usize = k.trim().parse().map_err(|_| bad(i + 2, "bad index"))?;
        if k != out.len() + 1 {
            return Err(bad(i + 2, "indices must be consecutive from 1"));
        }
        out.push(v.trim().parse().map_err(|_| bad(i + 2, "bad value"))?);
    }
    Ok(out)
}

pub fn spectrum_markdown(rec: &SpectrumRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Spectrum: m = {}, {} ({})\n", rec.m, rec.bc, rec.domain.shape);
    let _ = writeln!(s, "trusted count: {}\n", rec.trusted_count);
    s.push_str("| k | value |\n|---:|---:|\n");
    for (i, v) in rec.eigenvalues.iter().enumerate() {
        let _ = writeln!(s, "| {} | {} |", i + 1, fmt_f64(*v));
    }
    s
}

fn badge(r: &VerificationReport) -> &'static str {
    match (r.status, r.passed) {
        (ReportStatus::Informational, _) => "`[INFO]`",
        (_, true) => "**`[PASS]`**",
        (_, false) => "**`[FAIL]`**",
    }
}

/// One `##` section per claim, each with its badge and margin table.
pub fn suite_markdown(rec: &SuiteRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Verification report: `{}`\n", rec.set);
    let _ = writeln!(
        s,
        "{} claims: {} passed, {} failed, {} informational.\n",
        rec.summary.total, rec.summary.passed, rec.summary.failed, rec.summary.informational
    );
    for r in &rec.reports {
        let _ = writeln!(s, "## {}\n", r.claim_id);
        let _ = writeln!(s, "{} {}\n", badge(r), r.statement);
        let _ = writeln!(s, "margin: `{}`\n", fmt_f64(r.margin));
        for note in &r.notes {
            let _ = writeln!(s, "> {note}\n");
        }
        if !r.details.is_empty() {
            s.push_str("| k | lhs | rhs | slack | ok |\n|---:|---:|---:|---:|:---:|\n");
            for d in &r.details {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} |",
                    d.k,
                    fmt_f64(d.lhs),
                    fmt_f64(d.rhs),
                    fmt_f64(d.slack),
                    if d.ok { "yes" } else { "no" }
                );
            }
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e300, 5e-324, -0.0, 97.40909103400242] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(2.0), "2.0000000000000000e0");
    }

    #[test]
    fn json_floats_use_fixed_digits() {
        let s = to_json(&serde_json::json!({"x": 0.5, "v": [1.0]})).unwrap();
        assert_eq!(s, "{\"v\":[1.0000000000000000e0],\"x\":5.0000000000000000e-1}\n");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"], 0.5);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(parse_spectrum_csv("k,val\n").is_err());
        assert!(parse_spectrum_csv("k,value\n2,1.0\n").is_err());
        assert!(parse_spectrum_csv("k,value\n1,abc\n").is_err());
        assert_eq!(parse_spectrum_csv("k,value\n").unwrap(), Vec::<f64>::new());
    }
}
