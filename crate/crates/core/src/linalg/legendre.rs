/// Values and derivatives of `P_0..P_{n-1}` at `t`: `table[i][a] = P_i^{(a)}(t)`.
///
/// Derivatives come from differentiating the three-term recurrence `a` times:
/// `(k+1) P_{k+1}^{(a)} = (2k+1) (t P_k^{(a)} + a P_k^{(a-1)}) - k P_{k-1}^{(a)}`.
/// Derivatives beyond the degree come out as exact zeros.
pub fn legendre_table(n: usize, t: f64, max_deriv: usize) -> Vec<Vec<f64>> {
    let width = max_deriv + 1;
    let mut table = vec![vec![0.0; width]; n];
    if n == 0 {
        return table;
    }
    table[0][0] = 1.0;
    if n == 1 {
        return table;
    }
    table[1][0] = t;
    if width > 1 {
        table[1][1] = 1.0;
    }
    for k in 1..n - 1 {
        let kf = k as f64;
        for a in 0..width {
            let lower = if a > 0 { a as f64 * table[k][a - 1] } else { 0.0 };
            table[k + 1][a] =
                ((2.0 * kf + 1.0) * (t * table[k][a] + lower) - kf * table[k - 1][a]) / (kf + 1.0);
        }
    }
    table
}

/// `(P_i(t), P_i'(t), ..., P_i^{(max_deriv)}(t))`.
pub fn legendre_eval(i: usize, t: f64, max_deriv: usize) -> Vec<f64> {
    debug_assert!(t.abs() <= 1.0 + 1e-12, "Legendre evaluation outside [-1, 1]");
    legendre_table(i + 1, t, max_deriv).pop().expect("non-empty table")
}
