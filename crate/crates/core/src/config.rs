//! Run configuration: a raw record of optional keys (from flags or a JSON
//! file) and its validated, fully defaulted form.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PhlabError, Result};
use crate::model::{BoundaryKind, Domain, OperatorOrder, Rect, ToleranceConfig};

pub const DEFAULT_N: usize = 16;
pub const DEFAULT_COUNT: usize = 10;
pub const DEFAULT_K_MAX: usize = 8;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = PhlabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(PhlabError::Usage(format!("format: expected json, csv or markdown, got {other:?}"))),
        }
    }
}

/// Every key is optional; `None` means "not given at this layer".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub m: Option<u32>,
    pub bc: Option<String>,
    pub n: Option<usize>,
    pub count: Option<usize>,
    pub k_max: Option<usize>,
    pub domain: Option<String>,
    pub lx: Option<f64>,
    pub ly: Option<f64>,
    pub length: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol_zero: Option<f64>,
    pub tol_root: Option<f64>,
    pub tol_identity: Option<f64>,
    pub margin_factor: Option<f64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl RawConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| PhlabError::Usage(format!("config file: {e}")))
    }

    /// Keys set in `over` win.
    pub fn overlay(self, over: RawConfig) -> RawConfig {
        RawConfig {
            m: over.m.or(self.m),
            bc: over.bc.or(self.bc),
            n: over.n.or(self.n),
            count: over.count.or(self.count),
            k_max: over.k_max.or(self.k_max),
            domain: over.domain.or(self.domain),
            lx: over.lx.or(self.lx),
            ly: over.ly.or(self.ly),
            length: over.length.or(self.length),
            seed: over.seed.or(self.seed),
            samples: over.samples.or(self.samples),
            tol_zero: over.tol_zero.or(self.tol_zero),
            tol_root: over.tol_root.or(self.tol_root),
            tol_identity: over.tol_identity.or(self.tol_identity),
            margin_factor: over.margin_factor.or(self.margin_factor),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainChoice {
    Square,
    Rectangle,
    Interval,
}

/// Fully defaulted and range-checked configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub m: OperatorOrder,
    pub bc: BoundaryKind,
    pub n: usize,
    pub count: usize,
    pub k_max: usize,
    pub domain: DomainChoice,
    pub lx: f64,
    pub ly: f64,
    pub length: f64,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: ToleranceConfig,
    pub format: OutputFormat,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for ResolvedConfig {
    fn default() -> Self {
        validate_config(RawConfig::default()).expect("defaults are valid")
    }
}

impl ResolvedConfig {
    pub fn rect(&self) -> Result<Rect> {
        match self.domain {
            DomainChoice::Square => Rect::new(self.lx, self.lx),
            DomainChoice::Rectangle => Rect::new(self.lx, self.ly),
            DomainChoice::Interval => {
                Err(PhlabError::Usage("domain: this command needs a square or rectangle".into()))
            }
        }
    }

    pub fn domain(&self) -> Result<Domain> {
        match self.domain {
            DomainChoice::Interval => Domain::interval(self.length),
            _ => Ok(self.rect()?.domain()),
        }
    }

    /// JSON echo embedded into every output.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(PhlabError::Usage(format!("{key} must be strictly positive and finite, got {v}")))
    }
}

fn at_least_one(key: &str, v: usize) -> Result<usize> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(PhlabError::Usage(format!("{key} must be >= 1")))
    }
}

pub fn validate_config(raw: RawConfig) -> Result<ResolvedConfig> {
    let m = match raw.m {
        None => OperatorOrder::new(1)?,
        Some(0) => return Err(PhlabError::Usage("m must be >= 1".into())),
        Some(m) => OperatorOrder::new(m)?,
    };
    let bc = match raw.bc.as_deref() {
        None => BoundaryKind::Dirichlet,
        Some(s) => s.parse().map_err(|_| PhlabError::Usage(format!("bc: expected dirichlet or neumann, got {s:?}")))?,
    };
    let domain = match raw.domain.as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("square") => DomainChoice::Square,
        Some("rectangle") | Some("rect") => DomainChoice::Rectangle,
        Some("interval") => DomainChoice::Interval,
        Some(other) => {
            return Err(PhlabError::Usage(format!("domain: expected square, rectangle or interval, got {other:?}")))
        }
    };
    let tolerances = ToleranceConfig {
        tol_zero: positive("tol_zero", raw.tol_zero.unwrap_or(1e-6))?,
        tol_root: positive("tol_root", raw.tol_root.unwrap_or(1e-12))?,
        tol_identity: positive("tol_identity", raw.tol_identity.unwrap_or(1e-9))?,
        margin_factor: positive("margin_factor", raw.margin_factor.unwrap_or(5.0))?,
    };
    let n = raw.n.unwrap_or(DEFAULT_N);
    if n < m.as_usize() + 1 {
        return Err(PhlabError::Usage(format!("n must be at least m + 1 = {}", m.as_usize() + 1)));
    }
    Ok(ResolvedConfig {
        m,
        bc,
        n,
        count: at_least_one("count", raw.count.unwrap_or(DEFAULT_COUNT))?,
        k_max: at_least_one("k_max", raw.k_max.unwrap_or(DEFAULT_K_MAX))?,
        domain,
        lx: positive("lx", raw.lx.unwrap_or(1.0))?,
        ly: positive("ly", raw.ly.unwrap_or(1.0))?,
        length: positive("length", raw.length.unwrap_or(1.0))?,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        samples: raw.samples.unwrap_or(DEFAULT_SAMPLES),
        tolerances,
        format: raw.format.as_deref().map(str::parse).transpose()?.unwrap_or(OutputFormat::Json),
        out: raw.out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_defaults() {
        let c = validate_config(RawConfig::default()).unwrap();
        assert_eq!(c.m.get(), 1);
        assert_eq!(c.bc, BoundaryKind::Dirichlet);
        assert_eq!(c.tolerances, ToleranceConfig::default());
        assert_eq!(c.format, OutputFormat::Json);
        assert_eq!(c.rect().unwrap(), Rect::unit());
    }

    #[test]
    fn negative_tolerance_names_key() {
        let raw = RawConfig { tol_root: Some(-1.0), ..Default::default() };
        match validate_config(raw) {
            Err(PhlabError::Usage(msg)) => assert!(msg.contains("tol_root")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsupported_order_names_range() {
        let raw = RawConfig { m: Some(4), ..Default::default() };
        match validate_config(raw) {
            Err(e @ PhlabError::Capability(_)) => {
                assert!(e.to_string().contains("1..=3"));
                assert_eq!(e.exit_code(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RawConfig::from_json_str(r#"{"m": 2, "tol_rot": 1e-9}"#).unwrap_err();
        assert!(err.to_string().contains("tol_rot"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = RawConfig::from_json_str(r#"{"m": 2, "n": 12}"#).unwrap();
        let flags = RawConfig { n: Some(20), ..Default::default() };
        let c = validate_config(file.overlay(flags)).unwrap();
        assert_eq!((c.m.get(), c.n), (2, 20));
    }

    #[test]
    fn bad_enums_are_usage_errors() {
        for raw in [
            RawConfig { bc: Some("robin".into()), ..Default::default() },
            RawConfig { domain: Some("disk".into()), ..Default::default() },
            RawConfig { format: Some("xml".into()), ..Default::default() },
            RawConfig { lx: Some(0.0), ..Default::default() },
        ] {
            assert!(matches!(validate_config(raw), Err(PhlabError::Usage(_))));
        }
    }
}
