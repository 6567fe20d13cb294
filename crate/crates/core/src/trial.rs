//! Plane-wave trial spaces `V_ω = span{e^{iξ_j ω·x}}` over the m-th roots of
//! unity `ξ_j`, and the certified Rayleigh-quotient chain on `U ⊕ V_ω`.
//!
//! Every derivative here is closed form. Complex forms are realified before
//! they reach the real eigensolver.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{PhlabError, Result};
use crate::galerkin::{GalerkinSolution, ShapeBasis1D};
use crate::linalg::{cholesky_spd, dot, gauss_legendre, generalized_sym_eig, symmetric_eig, SymMatrix};
use crate::model::{binomial, BoundaryKind, OperatorOrder, Rect};

pub const GOLDEN_ANGLE: f64 = PI * (3.0 - 2.236_067_977_499_79);
pub const MAX_OMEGA_TRIES: usize = 64;
pub const GRAM_DEGENERACY: f64 = 1e-8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `ξ_j = e^{2πij/m}`, `j = 0..m-1`.
pub fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| match (4 * j) % (4 * m.max(1)) {
            // exact values on the axes keep small cases free of rounding
            0 => Complex64::new(1.0, 0.0),
            r if r == m => Complex64::new(0.0, 1.0),
            r if r == 2 * m => Complex64::new(-1.0, 0.0),
            r if r == 3 * m => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64),
        })
        .collect()
}

/// `|Π_{i<j} (ζ_j - ζ_i)|`.
pub fn vandermonde_check(zetas: &[Complex64]) -> f64 {
    let mut prod = 1.0;
    for j in 0..zetas.len() {
        for i in 0..j {
            prod *= (zetas[j] - zetas[i]).norm();
        }
    }
    prod
}

/// `v(x) = Σ_j α_j e^{iξ_j ω·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpace {
    pub m: OperatorOrder,
    pub omega: [f64; 2],
    pub xi: Vec<Complex64>,
    pub alpha: Vec<Complex64>,
}

/// Closed-form evaluation of a trial function at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialValue {
    pub value: Complex64,
    /// `∂^m_{j_1..j_m} v` for every ordered tuple; bit `r` of the index selects
    /// `j_{r+1}` (0 = x, 1 = y).
    pub partials: Vec<Complex64>,
    pub polyharmonic: Complex64,
}

impl TrialValue {
    /// `|D^m v|²` summed over all `2^m` ordered tuples.
    pub fn mth_gradient_sq(&self) -> f64 {
        self.partials.iter().map(|p| p.norm_sqr()).sum()
    }
}

impl TrialSpace {
    pub fn new(m: OperatorOrder, omega: [f64; 2], alpha: Vec<Complex64>) -> Result<Self> {
        if omega[0] == 0.0 && omega[1] == 0.0 || !omega.iter().all(|w| w.is_finite()) {
            return Err(PhlabError::InvalidArgument("ω must be finite and nonzero".into()));
        }
        if alpha.len() != m.as_usize() {
            return Err(PhlabError::DimensionMismatch { expected: m.as_usize(), found: alpha.len() });
        }
        Ok(TrialSpace { m, omega, xi: roots_of_unity(m.as_usize()), alpha })
    }

    /// `|ω|^{2m}`.
    pub fn lambda(&self) -> f64 {
        (self.omega[0] * self.omega[0] + self.omega[1] * self.omega[1]).powi(self.m.get() as i32)
    }

    /// `∂_x^a ∂_y^b e^{iξ ω·x} = (iξω_x)^a (iξω_y)^b e^{iξ ω·x}`.
    fn wave_factors(&self, xi: Complex64) -> (Complex64, Complex64) {
        (I * xi * self.omega[0], I * xi * self.omega[1])
    }

    pub fn eval(&self, x: [f64; 2]) -> TrialValue {
        trial_eval(self, x)
    }
}

pub fn trial_eval(ts: &TrialSpace, x: [f64; 2]) -> TrialValue {
    let m = ts.m.as_usize();
    let mut value = Complex64::new(0.0, 0.0);
    let mut partials = vec![Complex64::new(0.0, 0.0); 1 << m];
    let mut polyharmonic = Complex64::new(0.0, 0.0);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    for (&xi, &alpha) in ts.xi.iter().zip(&ts.alpha) {
        let e = alpha * (I * xi * (ts.omega[0] * x[0] + ts.omega[1] * x[1])).exp();
        value += e;
        let (kx, ky) = ts.wave_factors(xi);
        for (tuple, p) in partials.iter_mut().enumerate() {
            let ny = tuple.count_ones() as i32;
            *p += kx.powi(m as i32 - ny) * ky.powi(ny) * e;
        }
        // (-Δ)^m = (-1)^m Σ_a C(m, a) ∂_x^{2a} ∂_y^{2(m-a)}
        let lap: Complex64 = (0..=m)
            .map(|a| binomial(m, a) as f64 * kx.powi(2 * a as i32) * ky.powi(2 * (m - a) as i32))
            .sum();
        polyharmonic += sign * lap * e;
    }
    TrialValue { value, partials, polyharmonic }
}

/// `max |(-Δ)^m v - |ω|^{2m} v| / (|ω|^{2m} max |v|)`; zero for `v ≡ 0`.
pub fn verify_pde_identity(ts: &TrialSpace, points: &[[f64; 2]]) -> f64 {
    let lambda = ts.lambda();
    let evals: Vec<TrialValue> = points.iter().map(|&p| trial_eval(ts, p)).collect();
    let vmax = evals.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
    if vmax == 0.0 {
        return 0.0;
    }
    let worst = evals.iter().map(|e| (e.polyharmonic - lambda * e.value).norm()).fold(0.0, f64::max);
    worst / (lambda * vmax)
}

/// `max ||D^m v|² - |ω|^{2m} |v|²| / (|ω|^{2m} max |v|²)`, summing over all
/// ordered index tuples; zero for `v ≡ 0`.
pub fn verify_mth_gradient_identity(ts: &TrialSpace, points: &[[f64; 2]]) -> f64 {
    let lambda = ts.lambda();
    let evals: Vec<TrialValue> = points.iter().map(|&p| trial_eval(ts, p)).collect();
    let vmax = evals.iter().map(|e| e.value.norm_sqr()).fold(0.0, f64::max);
    if vmax == 0.0 {
        return 0.0;
    }
    let worst = evals
        .iter()
        .map(|e| (e.mth_gradient_sq() - lambda * e.value.norm_sqr()).abs())
        .fold(0.0, f64::max);
    worst / (lambda * vmax)
}

/// `|D^m v|²` grouped by the number of x-derivatives, `Σ_a C(m, a) |∂_x^a ∂_y^{m-a} v|²`.
pub fn grouped_mth_gradient_sq(ts: &TrialSpace, x: [f64; 2]) -> f64 {
    let m = ts.m.as_usize();
    (0..=m)
        .map(|a| {
            let d: Complex64 = ts
                .xi
                .iter()
                .zip(&ts.alpha)
                .map(|(&xi, &alpha)| {
                    let (kx, ky) = ts.wave_factors(xi);
                    alpha * kx.powi(a as i32) * ky.powi((m - a) as i32) * (I * xi * (ts.omega[0] * x[0] + ts.omega[1] * x[1])).exp()
                })
                .sum();
            binomial(m, a) as f64 * d.norm_sqr()
        })
        .sum()
}

/// Per-axis integrals against `e^{κ_j x}` on `[0, len]`.
struct AxisIntegrals {
    /// `basis[a]`: `n x waves`, `∫ φ_i^{(a)} conj(κ_j^a e^{κ_j x})`.
    basis: Vec<Vec<Vec<Complex64>>>,
    /// `waves[a]`: `waves x waves`, `∫ κ_j^a e^{κ_j x} conj(κ_l^a e^{κ_l x})`.
    waves: Vec<Vec<Vec<Complex64>>>,
}

fn axis_integrals(basis: &ShapeBasis1D, len: f64, kappas: &[Complex64], nodes: usize) -> Result<AxisIntegrals> {
    let m = basis.m.as_usize();
    let rule = gauss_legendre(nodes)?;
    let (xs, ws) = rule.mapped(0.0, len);
    let ts: Vec<f64> = xs.iter().map(|&x| 2.0 * x / len - 1.0).collect();
    let tab = basis.tabulate(&ts, m);
    let s = 2.0 / len;
    // conj(κ^a e^{κ x}) at the nodes
    let wave_vals: Vec<Vec<Vec<Complex64>>> = (0..=m)
        .map(|a| kappas.iter().map(|&k| xs.iter().map(|&x| (k.powi(a as i32) * (k * x).exp()).conj()).collect()).collect())
        .collect();
    let mut out_basis = Vec::with_capacity(m + 1);
    let mut out_waves = Vec::with_capacity(m + 1);
    for a in 0..=m {
        let scale = s.powi(a as i32);
        let b: Vec<Vec<Complex64>> = (0..basis.n)
            .map(|i| {
                wave_vals[a]
                    .iter()
                    .map(|wv| ws.iter().enumerate().map(|(q, &w)| w * scale * tab[a][(q, i)] * wv[q]).sum())
                    .collect()
            })
            .collect();
        let v: Vec<Vec<Complex64>> = (0..kappas.len())
            .map(|j| {
                (0..kappas.len())
                    .map(|l| ws.iter().enumerate().map(|(q, &w)| w * wave_vals[a][j][q].conj() * wave_vals[a][l][q]).sum())
                    .collect()
            })
            .collect();
        out_basis.push(b);
        out_waves.push(v);
    }
    Ok(AxisIntegrals { basis: out_basis, waves: out_waves })
}

/// Per-axis node count resolving both the polynomial basis and the wave.
pub fn oscillatory_nodes(n: usize, m: usize, omega_norm: f64, len: f64) -> usize {
    let wave = n + 2 * (omega_norm * len / PI).ceil() as usize + 10;
    wave.max(n + 2 * m + 2)
}

/// Hermitian stiffness and mass forms on a set of trial functions.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForms {
    pub stiffness: Vec<Vec<Complex64>>,
    pub mass: Vec<Vec<Complex64>>,
}

/// `[[Re H, -Im H], [Im H, Re H]]`.
pub fn realify(h: &[Vec<Complex64>]) -> SymMatrix {
    let d = h.len();
    SymMatrix::from_lower(2 * d, |i, j| {
        let (bi, ri) = (i / d, i % d);
        let (bj, rj) = (j / d, j % d);
        let z = h[ri][rj];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (1, 0) => z.im,
            _ => -z.im,
        }
    })
}

/// Scales a Hermitian pair so the mass has a unit diagonal.
fn normalize(forms: &HermitianForms) -> Result<HermitianForms> {
    let d = forms.mass.len();
    let scale: Vec<f64> = (0..d)
        .map(|i| {
            let g = forms.mass[i][i].re;
            if g > 0.0 {
                Ok(1.0 / g.sqrt())
            } else {
                Err(PhlabError::GramDegenerate { min_sv: 0.0 })
            }
        })
        .collect::<Result<_>>()?;
    let apply = |h: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
        (0..d).map(|i| (0..d).map(|j| h[i][j] * scale[i] * scale[j]).collect()).collect()
    };
    Ok(HermitianForms { stiffness: apply(&forms.stiffness), mass: apply(&forms.mass) })
}

/// Smallest singular value of the unit-diagonal Gram matrix.
pub fn gram_min_sv(mass: &[Vec<Complex64>]) -> Result<f64> {
    let forms = normalize(&HermitianForms { stiffness: mass.to_vec(), mass: mass.to_vec() })?;
    let eig = symmetric_eig(&realify(&forms.mass))?;
    Ok(eig.values[0].max(0.0))
}

/// Gram matrix of several plane-wave families `V_ω` on the rectangle.
pub fn wave_gram(m: OperatorOrder, omegas: &[[f64; 2]], rect: Rect, nodes: usize) -> Result<Vec<Vec<Complex64>>> {
    let xi = roots_of_unity(m.as_usize());
    let mut kx = Vec::new();
    let mut ky = Vec::new();
    for w in omegas {
        for &x in &xi {
            kx.push(I * x * w[0]);
            ky.push(I * x * w[1]);
        }
    }
    let rule = gauss_legendre(nodes)?;
    let integrate = |len: f64, ks: &[Complex64]| -> Vec<Vec<Complex64>> {
        let (xs, ws) = rule.mapped(0.0, len);
        (0..ks.len())
            .map(|j| {
                (0..ks.len())
                    .map(|l| xs.iter().zip(&ws).map(|(&x, &w)| w * (ks[j] * x).exp() * (ks[l] * x).exp().conj()).sum())
                    .collect()
            })
            .collect()
    };
    let gx = integrate(rect.lx, &kx);
    let gy = integrate(rect.ly, &ky);
    Ok((0..kx.len()).map(|j| (0..kx.len()).map(|l| gx[j][l] * gy[j][l]).collect()).collect())
}

/// Forms on `W = span(u_1..u_k) ⊕ V_ω`, discrete eigenvectors first.
pub fn chain_forms(sol: &GalerkinSolution, k: usize, omega: [f64; 2], quad_nodes: Option<usize>) -> Result<HermitianForms> {
    let p = &sol.pencil;
    if p.bc != BoundaryKind::Dirichlet {
        return Err(PhlabError::InvalidArgument("the trial chain needs a Dirichlet solution".into()));
    }
    if k == 0 || k > sol.values.len() {
        return Err(PhlabError::InvalidArgument(format!("k = {k} out of range")));
    }
    let m = p.m.as_usize();
    let n = p.n;
    let xi = roots_of_unity(m);
    let omega_norm = omega[0].hypot(omega[1]);
    let basis = ShapeBasis1D::new(p.bc, p.m, n)?;
    let nodes_for = |len: f64| {
        let min = oscillatory_nodes(n, m, omega_norm, len);
        quad_nodes.map_or(min, |q| q.max(min))
    };
    let kx: Vec<Complex64> = xi.iter().map(|&x| I * x * omega[0]).collect();
    let ky: Vec<Complex64> = xi.iter().map(|&x| I * x * omega[1]).collect();
    let ix = axis_integrals(&basis, p.rect.lx, &kx, nodes_for(p.rect.lx))?;
    let iy = axis_integrals(&basis, p.rect.ly, &ky, nodes_for(p.rect.ly))?;

    let d = k + m;
    let zero = Complex64::new(0.0, 0.0);
    let mut stiffness = vec![vec![zero; d]; d];
    let mut mass = vec![vec![zero; d]; d];
    let vecs: Vec<Vec<f64>> = (0..k).map(|i| sol.coefficients(i)).collect();
    for i in 0..k {
        let ai = p.stiffness.matvec(&vecs[i]);
        let bi = p.mass.matvec(&vecs[i]);
        for j in 0..k {
            stiffness[i][j] = Complex64::new(dot(&vecs[j], &ai), 0.0);
            mass[i][j] = Complex64::new(dot(&vecs[j], &bi), 0.0);
        }
    }
    // Σ_{i1,i2} c[i1][i2] X[i1] Y[i2]
    let contract = |c: &[f64], x: &[Vec<Complex64>], y: &[Vec<Complex64>], j: usize| -> Complex64 {
        let mut acc = zero;
        for i1 in 0..n {
            let mut row = zero;
            for i2 in 0..n {
                row += c[i1 * n + i2] * y[i2][j];
            }
            acc += x[i1][j] * row;
        }
        acc
    };
    for i in 0..k {
        for j in 0..m {
            let mm = contract(&vecs[i], &ix.basis[0], &iy.basis[0], j);
            let ss: Complex64 = (0..=m)
                .map(|a| binomial(m, a) as f64 * contract(&vecs[i], &ix.basis[a], &iy.basis[m - a], j))
                .sum();
            mass[i][k + j] = mm;
            mass[k + j][i] = mm.conj();
            stiffness[i][k + j] = ss;
            stiffness[k + j][i] = ss.conj();
        }
    }
    for j in 0..m {
        for l in 0..m {
            mass[k + j][k + l] = ix.waves[0][j][l] * iy.waves[0][j][l];
            stiffness[k + j][k + l] =
                (0..=m).map(|a| binomial(m, a) as f64 * ix.waves[a][j][l] * iy.waves[m - a][j][l]).sum();
        }
    }
    Ok(HermitianForms { stiffness, mass })
}

/// Outcome of the Rayleigh chain on `W = U ⊕ V_ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCertificate {
    pub k: usize,
    pub lambda_hat: f64,
    pub omega: [f64; 2],
    pub max_rayleigh: f64,
    pub gram_min_sv: f64,
    /// `max_rayleigh <= lambda_hat (1 + tol)`.
    pub certified: bool,
}

impl ChainCertificate {
    pub fn relative_excess(&self) -> f64 {
        (self.max_rayleigh - self.lambda_hat) / self.lambda_hat
    }
}

/// `ω = λ̂^{1/(2m)} (cos θ, sin θ)`.
pub fn omega_at(m: OperatorOrder, lambda_hat: f64, theta: f64) -> [f64; 2] {
    let r = lambda_hat.powf(1.0 / (2.0 * m.get() as f64));
    [r * theta.cos(), r * theta.sin()]
}

/// First golden-angle direction for which `U ∪ V_ω` has a well-conditioned Gram.
pub fn select_omega(sol: &GalerkinSolution, k: usize, tol: f64) -> Result<[f64; 2]> {
    let lambda_hat = *sol
        .values
        .get(k.wrapping_sub(1))
        .ok_or_else(|| PhlabError::InvalidArgument(format!("k = {k} out of range")))?;
    if !(lambda_hat > 0.0) {
        return Err(PhlabError::InvalidArgument("λ̂ must be positive to place a trial wave".into()));
    }
    for i in 0..MAX_OMEGA_TRIES {
        let omega = omega_at(sol.pencil.m, lambda_hat, i as f64 * GOLDEN_ANGLE);
        let forms = chain_forms(sol, k, omega, None)?;
        if gram_min_sv(&forms.mass)? > tol {
            return Ok(omega);
        }
    }
    Err(PhlabError::Numerical(format!("no admissible trial direction in {MAX_OMEGA_TRIES} golden-angle steps")))
}

/// Largest generalized eigenvalue of the forms on `W` against `λ̂_k`.
pub fn certified_chain_bound(
    sol: &GalerkinSolution,
    k: usize,
    omega: [f64; 2],
    quad_nodes: Option<usize>,
    tol: f64,
) -> Result<ChainCertificate> {
    let lambda_hat = *sol
        .values
        .get(k.wrapping_sub(1))
        .ok_or_else(|| PhlabError::InvalidArgument(format!("k = {k} out of range")))?;
    let wave = (omega[0] * omega[0] + omega[1] * omega[1]).powi(sol.pencil.m.get() as i32);
    if ((wave - lambda_hat) / lambda_hat).abs() > 1e-12 {
        return Err(PhlabError::InvalidArgument(format!("|ω|^(2m) = {wave} does not match λ̂_{k} = {lambda_hat}")));
    }
    let forms = normalize(&chain_forms(sol, k, omega, quad_nodes)?)?;
    let min_sv = symmetric_eig(&realify(&forms.mass))?.values[0];
    if min_sv <= GRAM_DEGENERACY {
        return Err(PhlabError::GramDegenerate { min_sv });
    }
    let eig = generalized_sym_eig(&realify(&forms.stiffness), &realify(&forms.mass))?;
    let max_rayleigh = *eig.values.last().expect("nonempty pencil");
    Ok(ChainCertificate {
        k,
        lambda_hat,
        omega,
        max_rayleigh,
        gram_min_sv: min_sv,
        certified: max_rayleigh <= lambda_hat * (1.0 + tol),
    })
}

/// Relative distance, in the norm `(∫|v|² + ∫|D^m v|²)^{1/2}`, from
/// `v = Σ α_j e^{iξ_j ω·x}` to the discrete Dirichlet space of `sol`.
pub fn dirichlet_projection_residual(sol: &GalerkinSolution, ts: &TrialSpace) -> Result<f64> {
    let p = &sol.pencil;
    let m = p.m.as_usize();
    if ts.m != p.m {
        return Err(PhlabError::InvalidArgument("trial space and solution orders differ".into()));
    }
    let n = p.n;
    let basis = ShapeBasis1D::new(BoundaryKind::Dirichlet, p.m, n)?;
    let omega_norm = ts.omega[0].hypot(ts.omega[1]);
    let kx: Vec<Complex64> = ts.xi.iter().map(|&x| I * x * ts.omega[0]).collect();
    let ky: Vec<Complex64> = ts.xi.iter().map(|&x| I * x * ts.omega[1]).collect();
    let ix = axis_integrals(&basis, p.rect.lx, &kx, oscillatory_nodes(n, m, omega_norm, p.rect.lx))?;
    let iy = axis_integrals(&basis, p.rect.ly, &ky, oscillatory_nodes(n, m, omega_norm, p.rect.ly))?;

    // b_(i1,i2) = <φ_i1 φ_i2, v> in the combined inner product
    let mut b_re = vec![0.0; n * n];
    let mut b_im = vec![0.0; n * n];
    for i1 in 0..n {
        for i2 in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &alpha) in ts.alpha.iter().enumerate() {
                let mut form = ix.basis[0][i1][j] * iy.basis[0][i2][j];
                for a in 0..=m {
                    form += binomial(m, a) as f64 * ix.basis[a][i1][j] * iy.basis[m - a][i2][j];
                }
                acc += alpha.conj() * form;
            }
            b_re[i1 * n + i2] = acc.re;
            b_im[i1 * n + i2] = acc.im;
        }
    }
    let mut norm_sq = 0.0;
    for (j, &aj) in ts.alpha.iter().enumerate() {
        for (l, &al) in ts.alpha.iter().enumerate() {
            let mut form = ix.waves[0][j][l] * iy.waves[0][j][l];
            for a in 0..=m {
                form += binomial(m, a) as f64 * ix.waves[a][j][l] * iy.waves[m - a][j][l];
            }
            norm_sq += (aj * al.conj() * form).re;
        }
    }
    if norm_sq <= 0.0 {
        return Ok(0.0);
    }
    let mut gram = p.stiffness.clone();
    for i in 0..n * n {
        for j in 0..=i {
            gram.add(i, j, p.mass.get(i, j));
        }
    }
    let chol = cholesky_spd(&gram)?;
    let mut proj_sq = 0.0;
    for b in [b_re, b_im] {
        let mut y = b.clone();
        chol.forward_substitute(&mut y);
        proj_sq += y.iter().map(|v| v * v).sum::<f64>();
    }
    Ok(((norm_sq - proj_sq).max(0.0) / norm_sq).sqrt())
}

/// Seeded coefficient helper shared by tests and claim checks.
pub fn random_alpha(m: usize, rng: &mut impl rand::Rng) -> Vec<Complex64> {
    (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}
