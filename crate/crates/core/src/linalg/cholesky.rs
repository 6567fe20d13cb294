use super::matrix::{Matrix, SymMatrix};
use crate::error::{PhlabError, Result};

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L y = b` in place.
    pub fn forward_substitute(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let row = self.l.row(i);
            let s: f64 = row[..i].iter().zip(&b[..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - s) / row[i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_substitute(&self, y: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
    }

    pub fn reconstruct(&self) -> Matrix {
        self.l.matmul(&self.l.transpose())
    }
}

/// Cholesky factorization of a symmetric positive definite matrix.
///
/// Fails with [`PhlabError::NotPositiveDefinite`] naming the first pivot that
/// is not strictly positive.
pub fn cholesky_spd(m: &SymMatrix) -> Result<Cholesky> {
    let n = m.dim();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j)[..j].to_vec();
        let d = m.get(j, j) - lj.iter().map(|x| x * x).sum::<f64>();
        if !(d > 0.0) || !d.is_finite() {
            return Err(PhlabError::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let s: f64 = l.row(i)[..j].iter().zip(&lj).map(|(a, b)| a * b).sum();
            l[(i, j)] = (m.get(i, j) - s) / djj;
        }
    }
    Ok(Cholesky { l })
}
