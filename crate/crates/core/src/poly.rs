//! Small dense polynomials in monomial form, used for weight functions and
//! for the random samples of the interpolation checks.

use crate::model::binomial;

/// `Σ c[k] t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1 {
    pub coeffs: Vec<f64>,
}

impl Poly1 {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly1 { coeffs }
    }

    /// `(1 - t²)^p`.
    pub fn bubble(p: usize) -> Self {
        let mut coeffs = vec![0.0; 2 * p + 1];
        for k in 0..=p {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[2 * k] = sign * binomial(p, k) as f64;
        }
        Poly1 { coeffs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly1 {
        if self.coeffs.len() <= 1 {
            return Poly1 { coeffs: vec![0.0] };
        }
        Poly1 { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect() }
    }

    /// `[f(t), f'(t), ..., f^{(max_deriv)}(t)]`.
    pub fn eval_derivatives(&self, t: f64, max_deriv: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(max_deriv + 1);
        let mut p = self.clone();
        for _ in 0..=max_deriv {
            out.push(p.eval(t));
            p = p.derivative();
        }
        out
    }
}

/// `Σ c[i][j] x^i y^j` on the reference square.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    coeffs: Vec<Vec<f64>>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { coeffs: vec![vec![0.0]] }
    }

    pub fn from_coeffs(coeffs: Vec<Vec<f64>>) -> Self {
        assert!(!coeffs.is_empty() && coeffs.iter().all(|r| r.len() == coeffs[0].len()));
        Poly2 { coeffs }
    }

    /// `f(x) g(y)`.
    pub fn separable(fx: &Poly1, gy: &Poly1) -> Self {
        let coeffs = fx.coeffs.iter().map(|&a| gy.coeffs.iter().map(|&b| a * b).collect()).collect();
        Poly2 { coeffs }
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree_y(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, row| acc * x + row.iter().rev().fold(0.0, |a, &c| a * y + c))
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let nx = self.degree_x() + other.degree_x() + 1;
        let ny = self.degree_y() + other.degree_y() + 1;
        let mut out = vec![vec![0.0; ny]; nx];
        for (i, ra) in self.coeffs.iter().enumerate() {
            for (j, &a) in ra.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k, rb) in other.coeffs.iter().enumerate() {
                    for (l, &b) in rb.iter().enumerate() {
                        out[i + k][j + l] += a * b;
                    }
                }
            }
        }
        Poly2 { coeffs: out }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let nx = self.coeffs.len().max(other.coeffs.len());
        let ny = self.coeffs[0].len().max(other.coeffs[0].len());
        let get = |p: &Poly2, i: usize, j: usize| p.coeffs.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0);
        let coeffs = (0..nx).map(|i| (0..ny).map(|j| get(self, i, j) + get(other, i, j)).collect()).collect();
        Poly2 { coeffs }
    }

    pub fn scaled(&self, c: f64) -> Poly2 {
        Poly2 { coeffs: self.coeffs.iter().map(|r| r.iter().map(|&v| c * v).collect()).collect() }
    }

    pub fn dx(&self) -> Poly2 {
        if self.coeffs.len() == 1 {
            return Poly2 { coeffs: vec![vec![0.0; self.coeffs[0].len()]] };
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, r)| r.iter().map(|&c| i as f64 * c).collect()).collect();
        Poly2 { coeffs }
    }

    pub fn dy(&self) -> Poly2 {
        if self.coeffs[0].len() == 1 {
            return Poly2 { coeffs: vec![vec![0.0]; self.coeffs.len()] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|r| r.iter().enumerate().skip(1).map(|(j, &c)| j as f64 * c).collect())
            .collect();
        Poly2 { coeffs }
    }

    /// `∂_x^a ∂_y^b`.
    pub fn partial(&self, a: usize, b: usize) -> Poly2 {
        let mut p = self.clone();
        for _ in 0..a {
            p = p.dx();
        }
        for _ in 0..b {
            p = p.dy();
        }
        p
    }

    pub fn laplacian(&self) -> Poly2 {
        self.partial(2, 0).add(&self.partial(0, 2))
    }
}
