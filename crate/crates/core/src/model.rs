//! Shared vocabulary: operator order, boundary kinds, domains, spectra,
//! tolerances and verification reports.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PhlabError, Result};

/// Largest supported order of `(-Δ)^m`.
pub const MAX_ORDER: u32 = 3;

/// Order `m` of the polyharmonic operator `(-Δ)^m`, restricted to `1..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct OperatorOrder(u32);

impl OperatorOrder {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(PhlabError::InvalidArgument("operator order m must be >= 1".into()));
        }
        if m > MAX_ORDER {
            return Err(PhlabError::Capability(format!(
                "operator order m = {m} is outside the supported range 1..={MAX_ORDER}"
            )));
        }
        Ok(OperatorOrder(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u32> for OperatorOrder {
    type Error = PhlabError;
    fn try_from(m: u32) -> Result<Self> {
        OperatorOrder::new(m)
    }
}

impl From<OperatorOrder> for u32 {
    fn from(m: OperatorOrder) -> u32 {
        m.0
    }
}

impl fmt::Display for OperatorOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Form problem posed on `H^m_0`: clamped.
    Dirichlet,
    /// Form problem posed on all of `H^m`: free.
    Neumann,
}

impl BoundaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundaryKind {
    type Err = PhlabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(BoundaryKind::Dirichlet),
            "neumann" | "n" => Ok(BoundaryKind::Neumann),
            other => Err(PhlabError::Usage(format!(
                "unknown boundary kind '{other}' (expected dirichlet or neumann)"
            ))),
        }
    }
}

/// An interval `(0, length)` or the rectangle `(0, lx) x (0, ly)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Domain {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Domain {
    pub fn interval(length: f64) -> Result<Self> {
        check_length("length", length)?;
        Ok(Domain::Interval { length })
    }

    pub fn rectangle(lx: f64, ly: f64) -> Result<Self> {
        check_length("lx", lx)?;
        check_length("ly", ly)?;
        Ok(Domain::Rectangle { lx, ly })
    }

    pub fn unit_square() -> Self {
        Domain::Rectangle { lx: 1.0, ly: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain::Interval { length } => check_length("length", length),
            Domain::Rectangle { lx, ly } => {
                check_length("lx", lx)?;
                check_length("ly", ly)
            }
        }
    }
}

fn check_length(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(PhlabError::InvalidArgument(format!(
            "domain {name} must be positive and finite, got {v}"
        )))
    }
}

/// Axis-aligned rectangle `(0, lx) x (0, ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub lx: f64,
    pub ly: f64,
}

impl Rect {
    pub fn new(lx: f64, ly: f64) -> Result<Self> {
        check_length("lx", lx)?;
        check_length("ly", ly)?;
        Ok(Rect { lx, ly })
    }

    pub fn unit() -> Self {
        Rect { lx: 1.0, ly: 1.0 }
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn domain(&self) -> Domain {
        Domain::Rectangle { lx: self.lx, ly: self.ly }
    }
}

impl TryFrom<Domain> for Rect {
    type Error = PhlabError;
    fn try_from(d: Domain) -> Result<Self> {
        match d {
            Domain::Rectangle { lx, ly } => Rect::new(lx, ly),
            Domain::Interval { .. } => Err(PhlabError::InvalidArgument(
                "a two-dimensional domain is required".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    #[serde(rename = "exact_1d")]
    Exact1D,
    #[serde(rename = "galerkin_2d")]
    Galerkin2D { n_per_axis: usize },
}

/// Dimension of the space of polynomials of total degree at most `m - 1` in
/// `d` variables, i.e. `C(d + m - 1, d)`.
pub fn n_poly_dim(d: usize, m: usize) -> Result<usize> {
    if d < 1 || m < 1 {
        return Err(PhlabError::InvalidArgument(format!(
            "n_poly_dim requires d >= 1 and m >= 1, got d = {d}, m = {m}"
        )));
    }
    Ok(binomial(d + m - 1, d) as usize)
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Ordered eigenvalue list with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub m: OperatorOrder,
    pub bc: BoundaryKind,
    pub domain: Domain,
    pub values: Vec<f64>,
    pub method: Method,
    pub trusted_count: usize,
}

impl Spectrum {
    /// Builds a spectrum from raw ascending values, clamping eigensolver noise
    /// around zero and enforcing the zero-mode structure.
    pub fn new(
        m: OperatorOrder,
        bc: BoundaryKind,
        domain: Domain,
        raw: Vec<f64>,
        method: Method,
        trusted_count: usize,
        tol_zero: f64,
    ) -> Result<Self> {
        domain.validate()?;
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(PhlabError::Numerical("non-finite eigenvalue".into()));
        }
        if raw.windows(2).any(|w| w[1] < w[0]) {
            return Err(PhlabError::Numerical("eigenvalues are not sorted ascending".into()));
        }
        if trusted_count > raw.len() {
            return Err(PhlabError::InvalidArgument(format!(
                "trusted_count {trusted_count} exceeds {} values",
                raw.len()
            )));
        }
        let values = clamp_zero_modes(raw, tol_zero)?;
        let spectrum = Spectrum { m, bc, domain, values, method, trusted_count };
        spectrum.check_zero_modes()?;
        Ok(spectrum)
    }

    pub fn zero_mode_count(&self) -> usize {
        self.values.iter().take_while(|&&v| v == 0.0).count()
    }

    fn check_zero_modes(&self) -> Result<()> {
        let zeros = self.zero_mode_count();
        match self.bc {
            BoundaryKind::Dirichlet => {
                if zeros > 0 {
                    return Err(PhlabError::Numerical(
                        "Dirichlet spectrum has a zero eigenvalue".into(),
                    ));
                }
            }
            BoundaryKind::Neumann => {
                let expected = n_poly_dim(self.domain.dim(), self.m.as_usize())?;
                let visible = expected.min(self.values.len());
                let ok = if self.values.len() > expected {
                    zeros == expected
                } else {
                    zeros == visible
                };
                if !ok {
                    return Err(PhlabError::Numerical(format!(
                        "Neumann spectrum has {zeros} zero modes, expected {expected}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// 1-based access.
    pub fn value(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Clamps values that are negligible against the first positive eigenvalue
/// to exactly zero.
///
/// The first positive eigenvalue is the last `v_j > 0` (`j >= 1`) that
/// dominates every earlier entry, `max_{i<j} |v_i| <= tol_zero * v_j`; those
/// earlier entries become `0.0`. Taking the last such index skips solver
/// noise like `1e-100` sitting just after exact zeros; genuine spectra never
/// jump by `1 / tol_zero` between neighbours. When no such `j` exists the
/// list has no zero block and is returned unchanged (after a sign check).
pub fn clamp_zero_modes(mut values: Vec<f64>, tol_zero: f64) -> Result<Vec<f64>> {
    let mut running_max = 0.0f64;
    let mut reference = None;
    for (j, &v) in values.iter().enumerate() {
        if j > 0 && v > 0.0 && running_max <= tol_zero * v {
            reference = Some(j);
        }
        running_max = running_max.max(v.abs());
    }
    match reference {
        Some(j) => values[..j].iter_mut().for_each(|v| *v = 0.0),
        None => {
            let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if scale == 0.0 {
                return Ok(values);
            }
            if let Some(neg) = values.iter().find(|&&v| v < 0.0) {
                if neg.abs() > tol_zero * scale {
                    return Err(PhlabError::Numerical(format!("negative eigenvalue {neg:e}")));
                }
            }
        }
    }
    if let Some(neg) = values.iter().find(|&&v| v < 0.0) {
        return Err(PhlabError::Numerical(format!("negative eigenvalue {neg:e}")));
    }
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub tol_zero: f64,
    pub tol_root: f64,
    pub tol_identity: f64,
    pub margin_factor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { tol_zero: 1e-6, tol_root: 1e-12, tol_identity: 1e-9, margin_factor: 5.0 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_zero", self.tol_zero),
            ("tol_root", self.tol_root),
            ("tol_identity", self.tol_identity),
            ("margin_factor", self.margin_factor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(PhlabError::Usage(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// One checked comparison inside a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed distance to the rule's threshold; non-negative means satisfied.
    pub slack: f64,
    pub ok: bool,
}

impl ClaimRecord {
    /// Record whose rule is `slack >= 0`.
    pub fn new(k: usize, lhs: f64, rhs: f64, slack: f64) -> Self {
        ClaimRecord { k, lhs, rhs, slack, ok: slack >= 0.0 }
    }

    /// Record whose rule is `slack > 0`.
    pub fn strict(k: usize, lhs: f64, rhs: f64, slack: f64) -> Self {
        ClaimRecord { k, lhs, rhs, slack, ok: slack > 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    /// Counts towards the suite verdict.
    Asserted,
    /// Recorded only; never fails a run.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub statement: String,
    pub status: ReportStatus,
    pub passed: bool,
    pub margin: f64,
    pub details: Vec<ClaimRecord>,
    pub notes: Vec<String>,
    /// Reserved for a certified lower-bound method; always `None` today.
    pub lower_bound_method: Option<String>,
    pub config_echo: serde_json::Value,
}

impl VerificationReport {
    pub fn from_records(
        claim_id: impl Into<String>,
        statement: impl Into<String>,
        details: Vec<ClaimRecord>,
        config_echo: serde_json::Value,
    ) -> Self {
        let passed = details.iter().all(|r| r.ok);
        let margin = details.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        VerificationReport {
            claim_id: claim_id.into(),
            statement: statement.into(),
            status: ReportStatus::Asserted,
            passed,
            margin: if details.is_empty() { 0.0 } else { margin },
            details,
            notes: Vec::new(),
            lower_bound_method: None,
            config_echo,
        }
    }

    pub fn informational(mut self) -> Self {
        self.status = ReportStatus::Informational;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Whether this report fails a run.
    pub fn is_failure(&self) -> bool {
        self.status == ReportStatus::Asserted && !self.passed
    }
}
