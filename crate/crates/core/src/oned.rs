//! Exact interval spectra of `(-1)^m u^{(2m)} = λ u` on `(0, L)`.
//!
//! Positive eigenvalues are the zeros of the determinant of the `2m x 2m`
//! boundary system written in a real solution basis. The determinant is
//! scanned in `β = λ^{1/(2m)}` for sign changes and refined by bisection.
//! Neumann zero modes (the polynomials of degree `< m`) are inserted
//! analytically.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use crate::error::{PhlabError, Result};
use crate::linalg::Matrix;
use crate::model::{
    BoundaryKind, ClaimRecord, Domain, Method, OperatorOrder, Spectrum, ToleranceConfig, VerificationReport,
};

const MAX_BISECTION_STEPS: usize = 200;
/// Scan step in β-space, as a fraction of `π / L`.
const SCAN_FRACTION: f64 = 0.02;

/// The `2m` roots of the characteristic equation `(-1)^m ρ^{2m} = λ`,
/// `ρ_j = λ^{1/(2m)} e^{iπ(m+2j)/(2m)}`, `j = 0..2m`.
///
/// For odd `m` this is the set `λ^{1/(2m)} e^{iπ(2j+1)/(2m)}`; for even `m`
/// that set solves `ρ^{2m} = -λ` instead, and the true roots include the
/// real pair `±λ^{1/(2m)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicRoots {
    pub m: OperatorOrder,
    pub lambda: f64,
    pub roots: Vec<Complex64>,
}

fn root_angle(m: usize, j: usize) -> f64 {
    PI * (m + 2 * j) as f64 / (2 * m) as f64
}

pub fn characteristic_roots(m: OperatorOrder, lambda: f64) -> Result<CharacteristicRoots> {
    check_lambda(lambda)?;
    let mm = m.as_usize();
    let radius = lambda.powf(1.0 / (2 * mm) as f64);
    let roots: Vec<Complex64> = (0..2 * mm).map(|j| Complex64::from_polar(radius, root_angle(mm, j))).collect();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() <= 1e-14 * radius {
                return Err(PhlabError::Numerical("characteristic roots are not distinct".into()));
            }
        }
    }
    Ok(CharacteristicRoots { m, lambda, roots })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(PhlabError::InvalidArgument(format!("lambda must be positive and finite, got {lambda}")))
    }
}

fn check_length(length: f64) -> Result<()> {
    if length.is_finite() && length > 0.0 {
        Ok(())
    } else {
        Err(PhlabError::InvalidArgument(format!("interval length must be positive, got {length}")))
    }
}

/// One real building block of the solution space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisTerm {
    /// Conjugate pair `a ± ib`, `b > 0`: `e^{a(x-s)} cos(bx)` and `e^{a(x-s)} sin(bx)`.
    Oscillating { a: f64, b: f64, shift: f64 },
    /// Real root `a`: `e^{a(x-s)}`.
    Exponential { a: f64, shift: f64 },
}

/// Real basis of the solution space built from the characteristic roots.
/// The shift `s` is `L` for growing exponentials and `0` otherwise, which
/// keeps every envelope at most 1 on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSolutionBasis {
    pub m: OperatorOrder,
    pub lambda: f64,
    pub length: f64,
    pub terms: Vec<BasisTerm>,
}

impl RealSolutionBasis {
    pub fn new(m: OperatorOrder, lambda: f64, length: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_length(length)?;
        let mm = m.as_usize();
        let beta = lambda.powf(1.0 / (2 * mm) as f64);
        let shift_for = |a: f64| if a > 0.0 { length } else { 0.0 };
        let mut terms = Vec::with_capacity(2 * mm);
        for j in 0..2 * mm {
            let theta = root_angle(mm, j);
            let (sin, cos) = theta.sin_cos();
            let mut a = beta * cos;
            if a.abs() <= 1e-14 * beta {
                a = 0.0;
            }
            if sin.abs() <= 1e-14 {
                terms.push(BasisTerm::Exponential { a, shift: shift_for(a) });
            } else if sin > 0.0 {
                terms.push(BasisTerm::Oscillating { a, b: beta * sin, shift: shift_for(a) });
            }
        }
        Ok(RealSolutionBasis { m, lambda, length, terms })
    }

    pub fn len(&self) -> usize {
        self.terms
            .iter()
            .map(|t| match t {
                BasisTerm::Oscillating { .. } => 2,
                BasisTerm::Exponential { .. } => 1,
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `order`-th derivative of every basis function at `x`.
    pub fn derivatives(&self, order: u32, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for term in &self.terms {
            match *term {
                BasisTerm::Oscillating { a, b, shift } => {
                    // d^p/dx^p e^{(a+ib)x} e^{-as} = (a+ib)^p e^{a(x-s)} e^{ibx}
                    let z = Complex64::new(a, b).powu(order)
                        * (a * (x - shift)).exp()
                        * Complex64::from_polar(1.0, b * x);
                    out.push(z.re);
                    out.push(z.im);
                }
                BasisTerm::Exponential { a, shift } => out.push(a.powi(order as i32) * (a * (x - shift)).exp()),
            }
        }
        out
    }
}

/// The boundary system at `λ`: rows `(p, 0)` and `(p, L)` for
/// `p ∈ 0..m` (Dirichlet) or `p ∈ m..2m` (Neumann).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    pub m: OperatorOrder,
    pub lambda: f64,
    pub bc: BoundaryKind,
    pub entries: Matrix,
}

pub fn boundary_matrix(m: OperatorOrder, lambda: f64, bc: BoundaryKind, length: f64) -> Result<BoundaryMatrix> {
    let basis = RealSolutionBasis::new(m, lambda, length)?;
    let mm = m.get();
    let orders = match bc {
        BoundaryKind::Dirichlet => 0..mm,
        BoundaryKind::Neumann => mm..2 * mm,
    };
    let mut rows = Vec::with_capacity(2 * mm as usize);
    for p in orders {
        rows.push(basis.derivatives(p, 0.0));
        rows.push(basis.derivatives(p, length));
    }
    let entries = Matrix::from_rows(&rows);
    if entries.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(PhlabError::Numerical(format!("non-finite boundary matrix at lambda = {lambda}")));
    }
    Ok(BoundaryMatrix { m, lambda, bc, entries })
}

/// Sign and `ln|det|` of a square matrix by LU with partial pivoting.
pub fn signed_log_det(matrix: &Matrix) -> (i8, f64) {
    let n = matrix.rows();
    let mut a = matrix.clone();
    let mut sign: i8 = 1;
    let mut log_mag = 0.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .expect("non-empty range");
        let pivot = a[(pivot_row, col)];
        if pivot == 0.0 {
            return (0, f64::NEG_INFINITY);
        }
        if pivot_row != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = t;
            }
            sign = -sign;
        }
        if pivot < 0.0 {
            sign = -sign;
        }
        log_mag += pivot.abs().ln();
        for i in col + 1..n {
            let f = a[(i, col)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a[(col, j)];
                a[(i, j)] -= f * v;
            }
        }
    }
    (sign, log_mag)
}

/// Determinant indicator `(sign, ln|det M(λ)|)` of the boundary system.
pub fn det_indicator(m: OperatorOrder, lambda: f64, bc: BoundaryKind, length: f64) -> Result<(i8, f64)> {
    let bm = boundary_matrix(m, lambda, bc, length)?;
    Ok(signed_log_det(&bm.entries))
}

fn indicator_sign_at_beta(m: OperatorOrder, beta: f64, bc: BoundaryKind, length: f64) -> Result<i8> {
    let lambda = beta.powi(2 * m.get() as i32);
    Ok(det_indicator(m, lambda, bc, length)?.0)
}

/// The first `count` positive zeros of the determinant, as `β = λ^{1/(2m)}`.
pub fn positive_roots_beta(
    m: OperatorOrder,
    bc: BoundaryKind,
    count: usize,
    length: f64,
    tol_root: f64,
) -> Result<Vec<f64>> {
    check_length(length)?;
    let step = SCAN_FRACTION * PI / length;
    // roots sit roughly at (k + m/2) π / L; leave generous room
    let beta_limit = (count as f64 + m.get() as f64 + 4.0) * PI / length;
    let mut roots = Vec::with_capacity(count);
    let mut prev_beta = step;
    let mut prev_sign = indicator_sign_at_beta(m, prev_beta, bc, length)?;
    if prev_sign == 0 {
        roots.push(prev_beta);
    }
    let mut i = 1usize;
    while roots.len() < count {
        i += 1;
        let beta = i as f64 * step;
        if beta > beta_limit {
            return Err(PhlabError::Numerical(format!(
                "found only {} of {count} roots below beta = {beta_limit}",
                roots.len()
            )));
        }
        let sign = indicator_sign_at_beta(m, beta, bc, length)?;
        if sign == 0 {
            roots.push(beta);
        } else if prev_sign != 0 && sign != prev_sign {
            roots.push(bisect(m, bc, length, prev_beta, beta, prev_sign, tol_root)?);
        }
        prev_beta = beta;
        prev_sign = sign;
    }
    Ok(roots)
}

fn bisect(
    m: OperatorOrder,
    bc: BoundaryKind,
    length: f64,
    mut lo: f64,
    mut hi: f64,
    sign_lo: i8,
    tol_root: f64,
) -> Result<f64> {
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol_root * lo || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let s = indicator_sign_at_beta(m, mid, bc, length)?;
        if s == 0 {
            return Ok(mid);
        }
        if s == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(PhlabError::Numerical(format!(
        "bisection on [{lo}, {hi}] did not converge in {MAX_BISECTION_STEPS} steps"
    )))
}

/// First `count` eigenvalues on `(0, length)`, zero modes included for Neumann.
pub fn solve_1d_spectrum(
    m: OperatorOrder,
    bc: BoundaryKind,
    count: usize,
    length: f64,
    tol: &ToleranceConfig,
) -> Result<Spectrum> {
    if count == 0 {
        return Err(PhlabError::InvalidArgument("count must be >= 1".into()));
    }
    let zeros = match bc {
        BoundaryKind::Dirichlet => 0,
        BoundaryKind::Neumann => m.as_usize().min(count),
    };
    let betas = positive_roots_beta(m, bc, count - zeros, length, tol.tol_root)?;
    let mut values = vec![0.0; zeros];
    values.extend(betas.iter().map(|b| b.powi(2 * m.get() as i32)));
    Spectrum::new(m, bc, Domain::interval(length)?, values, Method::Exact1D, count, tol.tol_zero)
}

/// Compares the first `count` positive Dirichlet and Neumann eigenvalues on
/// an interval, i.e. `μ_{k+m} = λ_k` within relative tolerance `tol`.
pub fn check_remark12(
    m: OperatorOrder,
    count: usize,
    length: f64,
    tol: f64,
    tolerances: &ToleranceConfig,
) -> Result<VerificationReport> {
    let dir = solve_1d_spectrum(m, BoundaryKind::Dirichlet, count, length, tolerances)?;
    let neu = solve_1d_spectrum(m, BoundaryKind::Neumann, count + m.as_usize(), length, tolerances)?;
    let records = (1..=count)
        .map(|k| {
            let lambda = dir.values[k - 1];
            let mu = neu.values[k - 1 + m.as_usize()];
            let rel = (mu - lambda).abs() / lambda;
            ClaimRecord::new(k, mu, lambda, tol - rel)
        })
        .collect();
    Ok(VerificationReport::from_records(
        format!("remark12-m{m}"),
        format!("interval: positive Neumann and Dirichlet eigenvalues coincide, mu_(k+{m}) = lambda_k"),
        records,
        json!({ "m": m.get(), "count": count, "length": length, "tol": tol, "tolerances": tolerances }),
    ))
}
