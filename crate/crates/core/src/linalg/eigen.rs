//! Dense symmetric and symmetric-definite eigensolvers.
//!
//! The symmetric kernel is cyclic Jacobi with Rutishauser's threshold
//! strategy. Exactly zero off-diagonal entries are never rotated, so rows that
//! vanish identically keep an exactly zero eigenvalue.

use super::cholesky::cholesky_spd;
use super::matrix::{Matrix, SymMatrix};
use crate::error::{PhlabError, Result};

pub const MAX_PENCIL_DIM: usize = 2500;
const MAX_SWEEPS: usize = 60;

/// Ascending eigenvalues and the matching eigenvectors (as columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Full eigensystem of a symmetric matrix, ascending, orthonormal vectors.
pub fn symmetric_eig(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut converged = n <= 1;
    for sweep in 1..=MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).map(|(p, q)| a[(p, q)].abs()).sum();
        if off == 0.0 {
            converged = true;
            break;
        }
        let threshold = if sweep < 4 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = 100.0 * apq.abs();
                if sweep > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[(p, q)] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let shift = t * apq;
                z[p] -= shift;
                z[q] += shift;
                d[p] -= shift;
                d[q] += shift;
                a[(p, q)] = 0.0;
                let rotate = |x: f64, y: f64| (x - s * (y + x * tau), y + s * (x - y * tau));
                for j in 0..p {
                    let (x, y) = rotate(a[(j, p)], a[(j, q)]);
                    a[(j, p)] = x;
                    a[(j, q)] = y;
                }
                for j in p + 1..q {
                    let (x, y) = rotate(a[(p, j)], a[(j, q)]);
                    a[(p, j)] = x;
                    a[(j, q)] = y;
                }
                for j in q + 1..n {
                    let (x, y) = rotate(a[(p, j)], a[(q, j)]);
                    a[(p, j)] = x;
                    a[(q, j)] = y;
                }
                for j in 0..n {
                    let (x, y) = rotate(v[(j, p)], v[(j, q)]);
                    v[(j, p)] = x;
                    v[(j, q)] = y;
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    if !converged {
        return Err(PhlabError::Numerical(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (n = {n})"
        )));
    }
    Ok(sorted(d, v))
}

fn sorted(values: Vec<f64>, vectors: Matrix) -> EigenDecomposition {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let vals = order.iter().map(|&i| values[i]).collect();
    let vecs = Matrix::from_fn(vectors.rows(), n, |r, c| vectors[(r, order[c])]);
    EigenDecomposition { values: vals, vectors: vecs }
}

/// Full ascending eigensystem of the pencil `(A, B)`, `B` positive definite.
///
/// Reduces `B = L Lᵀ`, solves `L⁻¹ A L⁻ᵀ y = λ y` and maps back with
/// `x = L⁻ᵀ y`, so the returned vectors are `B`-orthonormal. Index sets that
/// are exactly decoupled in both `A` and `B` are solved as separate blocks.
pub fn generalized_sym_eig(a: &SymMatrix, b: &SymMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    if b.dim() != n {
        return Err(PhlabError::DimensionMismatch { expected: n, found: b.dim() });
    }
    if n > MAX_PENCIL_DIM {
        return Err(PhlabError::Capability(format!(
            "pencil dimension {n} exceeds the dense limit {MAX_PENCIL_DIM}"
        )));
    }
    let blocks = coupled_blocks(a, b);
    if blocks.len() == 1 {
        return dense_pencil(a, b);
    }
    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<(f64, usize, Vec<f64>)> = Vec::with_capacity(n);
    for (bi, idx) in blocks.iter().enumerate() {
        let sub = dense_pencil(&a.submatrix(idx), &b.submatrix(idx)).map_err(|e| match e {
            PhlabError::NotPositiveDefinite { pivot, value } => {
                PhlabError::NotPositiveDefinite { pivot: idx[pivot], value }
            }
            other => other,
        })?;
        for c in 0..sub.len() {
            let mut full = vec![0.0; n];
            for (r, &gi) in idx.iter().enumerate() {
                full[gi] = sub.vectors[(r, c)];
            }
            columns.push((sub.values[c], bi, full));
        }
    }
    columns.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut vectors = Matrix::zeros(n, n);
    for (c, (val, _, col)) in columns.into_iter().enumerate() {
        values.push(val);
        for r in 0..n {
            vectors[(r, c)] = col[r];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn dense_pencil(a: &SymMatrix, b: &SymMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let chol = cholesky_spd(b)?;
    // X = L⁻¹ A, column by column
    let mut x = Matrix::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        chol.forward_substitute(&mut col);
        for i in 0..n {
            x[(i, j)] = col[i];
        }
    }
    // C = L⁻¹ Xᵀ = L⁻¹ A L⁻ᵀ
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        let mut col = x.row(j).to_vec();
        chol.forward_substitute(&mut col);
        for i in 0..n {
            c[(i, j)] = col[i];
        }
    }
    let reduced = symmetric_eig(&SymMatrix::from_matrix(&c))?;
    let mut vectors = Matrix::zeros(n, n);
    for k in 0..n {
        let mut y = reduced.vectors.column(k);
        chol.backward_substitute(&mut y);
        for i in 0..n {
            vectors[(i, k)] = y[i];
        }
    }
    Ok(EigenDecomposition { values: reduced.values, vectors })
}

/// Connected components of the coupling graph `A_ij != 0 || B_ij != 0`.
fn coupled_blocks(a: &SymMatrix, b: &SymMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for j in 0..n {
                if label[j] == usize::MAX && (a.get(i, j) != 0.0 || b.get(i, j) != 0.0) {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}
