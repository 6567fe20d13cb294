//! Gauss–Legendre rules on `[-1, 1]`.

use crate::error::{PhlabError, Result};

pub const MAX_GAUSS_NODES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Number of nodes; the rule integrates polynomials of degree `2 * order - 1` exactly.
    pub order: usize,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|&t| mid + half * t).collect();
        let w = self.weights.iter().map(|&w| half * w).collect();
        (x, w)
    }
}

/// `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = nf * (t * p - p_prev) / (t * t - 1.0);
    (p, dp)
}

/// `n`-point Gauss–Legendre rule, nodes found by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_GAUSS_NODES {
        return Err(PhlabError::Capability(format!(
            "Gauss-Legendre rule with {n} nodes is outside 1..={MAX_GAUSS_NODES}"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..half {
        // i-th largest root
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() <= 1e-16 * t.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            let (p, _) = legendre_with_derivative(n, t);
            if p.abs() > 1e-15 {
                return Err(PhlabError::Numerical(format!(
                    "Newton iteration for Gauss-Legendre node {i} of {n} did not converge"
                )));
            }
        }
        let (_, dp) = legendre_with_derivative(n, t);
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[n - 1 - i] = t;
        nodes[i] = -t;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights, order: n })
}
