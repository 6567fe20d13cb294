//! Individual claim checks. Each takes already computed spectra (or computes
//! its own small inputs) and returns a [`VerificationReport`].

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{PhlabError, Result};
use crate::galerkin::{ConvergenceTable, GalerkinSolution};
use crate::linalg::gauss_legendre;
use crate::model::{
    binomial, n_poly_dim, BoundaryKind, ClaimRecord, Domain, OperatorOrder, Rect, Spectrum, ToleranceConfig,
    VerificationReport,
};
use crate::poly::{Poly1, Poly2};
use crate::trial::{
    certified_chain_bound, dirichlet_projection_residual, omega_at, random_alpha, roots_of_unity, select_omega,
    vandermonde_check, verify_mth_gradient_identity, verify_pde_identity, TrialSpace, GOLDEN_ANGLE,
    GRAM_DEGENERACY,
};

/// Relative slack of the weak inequality.
pub const WEAK_SLACK: f64 = 1e-9;
/// Relative slack of the order-monotonicity check.
pub const MONOTONICITY_SLACK: f64 = 0.01;
pub const INTERPOLATION_SLACK: f64 = 1e-12;
pub const LAPLACIAN_POWER_TOL: f64 = 1e-11;
pub const COUNTEREXAMPLE_TOL: f64 = 1e-14;
pub const TRIAL_IDENTITY_TOL: f64 = 1e-12;
pub const CHAIN_TOL: f64 = 1e-8;
pub const PROJECTION_FLOOR: f64 = 0.01;

pub fn spectrum_echo(s: &Spectrum) -> serde_json::Value {
    json!({
        "m": s.m.get(),
        "bc": s.bc,
        "domain": s.domain,
        "method": s.method,
        "trusted_count": s.trusted_count,
    })
}

fn require_len(s: &Spectrum, needed: usize, what: &str) -> Result<()> {
    if s.len() < needed {
        return Err(PhlabError::InvalidArgument(format!(
            "{what}: {} {} eigenvalues available, {needed} needed",
            s.bc,
            s.len()
        )));
    }
    Ok(())
}

fn require_pair(spec_d: &Spectrum, spec_n: &Spectrum) -> Result<()> {
    if spec_d.bc != BoundaryKind::Dirichlet || spec_n.bc != BoundaryKind::Neumann {
        return Err(PhlabError::InvalidArgument("expected a Dirichlet and a Neumann spectrum".into()));
    }
    if spec_d.m != spec_n.m || spec_d.domain != spec_n.domain {
        return Err(PhlabError::InvalidArgument("spectra must share order and domain".into()));
    }
    Ok(())
}

/// Strict inequality `μ̂_{k+m} < λ̂_k`, asserted only when the gap beats
/// `margin_factor` times the discretization error estimate of `λ̂_k`.
pub fn verify_theorem_main(
    spec_d: &Spectrum,
    spec_n: &Spectrum,
    conv: &ConvergenceTable,
    k_max: usize,
    tol: &ToleranceConfig,
) -> Result<VerificationReport> {
    require_pair(spec_d, spec_n)?;
    if spec_d.domain.dim() < 2 {
        return Err(PhlabError::InvalidArgument(
            "the strict inequality needs a domain of dimension >= 2; on an interval the positive \
             Dirichlet and Neumann eigenvalues coincide (mu_(k+m) = lambda_k)"
                .into(),
        ));
    }
    let m = spec_d.m.as_usize();
    if k_max + m > spec_n.trusted_count {
        return Err(PhlabError::Capability(format!(
            "k_max + m = {} exceeds the trusted Neumann count {}",
            k_max + m,
            spec_n.trusted_count
        )));
    }
    require_len(spec_n, k_max + m, "theorem")?;
    require_len(spec_d, k_max, "theorem")?;
    let finest = conv.finest();
    if finest.bc != BoundaryKind::Dirichlet || finest.m != spec_d.m {
        return Err(PhlabError::InvalidArgument("convergence table must describe the Dirichlet spectrum".into()));
    }
    let mut records = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let lambda = spec_d.values[k - 1];
        let mu = spec_n.values[k + m - 1];
        let err = conv
            .error_estimate(k)
            .ok_or_else(|| PhlabError::InvalidArgument(format!("no convergence estimate for k = {k}")))?;
        records.push(ClaimRecord::strict(k, mu, lambda, (lambda - mu) - tol.margin_factor * err));
    }
    Ok(VerificationReport::from_records(
        format!("theorem-m{m}"),
        format!("mu_(k+{m}) < lambda_k with gap above {} x discretization error", tol.margin_factor),
        records,
        json!({
            "dirichlet": spectrum_echo(spec_d),
            "neumann": spectrum_echo(spec_n),
            "convergence_n": conv.n_list,
            "k_max": k_max,
            "tolerances": tol,
        }),
    )
    .with_note("both sides are conforming upper bounds; slack = gap - margin_factor * |lambda_k(n_last) - lambda_k(n_prev)|"))
}

/// `μ̂_k <= λ̂_k (1 + 1e-9)`.
pub fn verify_weak_minmax(spec_d: &Spectrum, spec_n: &Spectrum, k_max: usize) -> Result<VerificationReport> {
    require_pair(spec_d, spec_n)?;
    require_len(spec_d, k_max, "weak min-max")?;
    require_len(spec_n, k_max, "weak min-max")?;
    let records = (1..=k_max)
        .map(|k| {
            let (lambda, mu) = (spec_d.values[k - 1], spec_n.values[k - 1]);
            ClaimRecord::new(k, mu, lambda, lambda * (1.0 + WEAK_SLACK) - mu)
        })
        .collect();
    Ok(VerificationReport::from_records(
        format!("weak-minmax-m{}", spec_d.m),
        "mu_k <= lambda_k",
        records,
        json!({ "dirichlet": spectrum_echo(spec_d), "neumann": spectrum_echo(spec_n), "k_max": k_max }),
    ))
}

/// Exactly `n(d, m)` eigenvalues below `tol_zero` times the first positive one.
pub fn verify_zero_modes(spec_n: &Spectrum, d: usize, m: OperatorOrder, tol_zero: f64) -> Result<VerificationReport> {
    if spec_n.bc != BoundaryKind::Neumann {
        return Err(PhlabError::InvalidArgument("zero modes are a Neumann property".into()));
    }
    let expected = n_poly_dim(d, m.as_usize())?;
    require_len(spec_n, expected + 1, "zero modes")?;
    let first_positive = spec_n
        .values
        .iter()
        .copied()
        .find(|&v| v > 0.0)
        .ok_or_else(|| PhlabError::Numerical("spectrum has no positive eigenvalue".into()))?;
    let threshold = tol_zero * first_positive;
    let count = spec_n.values.iter().take_while(|&&v| v <= threshold).count();
    let next = spec_n.values[expected];
    let records = vec![
        ClaimRecord::new(1, count as f64, expected as f64, 0.0 - (count as f64 - expected as f64).abs()),
        ClaimRecord::strict(expected + 1, next, threshold, next - threshold),
    ];
    let tag = match spec_n.method {
        crate::model::Method::Exact1D => "1d".to_string(),
        crate::model::Method::Galerkin2D { n_per_axis } => format!("2d-n{n_per_axis}"),
    };
    Ok(VerificationReport::from_records(
        format!("zero-modes-{tag}-m{m}"),
        format!("exactly n({d},{m}) = {expected} zero Neumann eigenvalues, the next one positive"),
        records,
        json!({ "neumann": spectrum_echo(spec_n), "d": d, "tol_zero": tol_zero }),
    ))
}

/// `∫ |D^j u|²` over the rectangle for `u` given in reference coordinates
/// `t ∈ [-1, 1]²`.
pub fn dm_energy(u: &Poly2, j: usize, rect: Rect) -> f64 {
    let (sx, sy) = (2.0 / rect.lx, 2.0 / rect.ly);
    let parts: Vec<Poly2> =
        (0..=j).map(|a| u.partial(a, j - a).scaled(sx.powi(a as i32) * sy.powi((j - a) as i32))).collect();
    let weights: Vec<f64> = (0..=j).map(|a| binomial(j, a) as f64).collect();
    integrate_squares(&parts, &weights, rect)
}

/// `Σ_p w_p ∫ f_p²` with a rule exact for the squared degrees.
fn integrate_squares(parts: &[Poly2], weights: &[f64], rect: Rect) -> f64 {
    let dx = parts.iter().map(Poly2::degree_x).max().unwrap_or(0);
    let dy = parts.iter().map(Poly2::degree_y).max().unwrap_or(0);
    let rx = gauss_legendre(dx + 1).expect("degree within quadrature range");
    let ry = gauss_legendre(dy + 1).expect("degree within quadrature range");
    let mut total = 0.0;
    for (p, &w) in parts.iter().zip(weights) {
        let mut acc = 0.0;
        for (x, wx) in rx.nodes.iter().zip(&rx.weights) {
            for (y, wy) in ry.nodes.iter().zip(&ry.weights) {
                acc += wx * wy * p.eval(*x, *y).powi(2);
            }
        }
        total += w * acc;
    }
    total * rect.area() / 4.0
}

fn physical_laplacian(u: &Poly2, rect: Rect) -> Poly2 {
    let (sx, sy) = (2.0 / rect.lx, 2.0 / rect.ly);
    u.partial(2, 0).scaled(sx * sx).add(&u.partial(0, 2).scaled(sy * sy))
}

/// `∫ |Δ^{m/2} u|²` (even `m`) or `∫ |∇ Δ^{(m-1)/2} u|²` (odd `m`).
pub fn laplacian_power_energy(u: &Poly2, m: usize, rect: Rect) -> f64 {
    let mut w = u.clone();
    for _ in 0..m / 2 {
        w = physical_laplacian(&w, rect);
    }
    if m % 2 == 0 {
        integrate_squares(&[w], &[1.0], rect)
    } else {
        dm_energy(&w, 1, rect)
    }
}

/// `p(t) ((1 - t_x²)(1 - t_y²))^{m+1}` with `p` of degree `<= 3` per variable.
pub fn interpolation_sample(m: usize, rng: &mut impl Rng) -> Poly2 {
    let p = Poly2::from_coeffs((0..4).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect());
    let bubble = Poly1::bubble(m + 1);
    p.mul(&Poly2::separable(&bubble, &bubble))
}

/// Interpolation inequality `∫|D^m u|² <= (∫|D^{m+1}u|²)^{1/2} (∫|D^{m-1}u|²)^{1/2}`
/// and the Laplacian-power form of `∫|D^m u|²` on seeded samples.
pub fn verify_interpolation(m: OperatorOrder, sample_count: usize, seed: u64, rect: Rect) -> VerificationReport {
    let m = m.as_usize();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(2 * sample_count);
    let mut identity = Vec::with_capacity(sample_count);
    for s in 1..=sample_count {
        let u = interpolation_sample(m, &mut rng);
        let mid = dm_energy(&u, m, rect);
        let rhs = (dm_energy(&u, m + 1, rect) * dm_energy(&u, m - 1, rect)).sqrt();
        records.push(ClaimRecord::new(s, mid, rhs, rhs * (1.0 + INTERPOLATION_SLACK) - mid));
        let power = laplacian_power_energy(&u, m, rect);
        let rel = if mid == 0.0 && power == 0.0 { 0.0 } else { (mid - power).abs() / mid.abs().max(power.abs()) };
        identity.push(ClaimRecord::new(s, mid, power, LAPLACIAN_POWER_TOL - rel));
    }
    records.extend(identity);
    VerificationReport::from_records(
        format!("interpolation-m{m}"),
        format!("int|D^{m}u|^2 <= (int|D^{}u|^2 int|D^{}u|^2)^(1/2), and int|D^{m}u|^2 equals its Laplacian-power form", m + 1, m - 1),
        records,
        json!({ "m": m, "samples": sample_count, "seed": seed, "domain": rect.domain() }),
    )
    .with_note(format!(
        "records 1..{sample_count}: interpolation inequality (rhs = geometric mean); the following {sample_count}: \
         Laplacian-power identity (rhs = power form)"
    ))
}

/// `(λ̂_k^m)^{1/m} <= (λ̂_k^{m+1})^{1/(m+1)} (1 + 1%)` for consecutive orders.
pub fn verify_root_monotonicity(spectra_by_m: &[Spectrum], k_max: usize) -> Result<VerificationReport> {
    if spectra_by_m.len() < 2 {
        return Err(PhlabError::InvalidArgument("need spectra for at least two orders".into()));
    }
    for w in spectra_by_m.windows(2) {
        if w[1].m.get() != w[0].m.get() + 1 || w[0].domain != w[1].domain {
            return Err(PhlabError::InvalidArgument("spectra must have consecutive orders on one domain".into()));
        }
    }
    let mut records = Vec::new();
    for s in spectra_by_m {
        if s.bc != BoundaryKind::Dirichlet {
            return Err(PhlabError::InvalidArgument("monotonicity is checked on Dirichlet spectra".into()));
        }
        require_len(s, k_max, "monotonicity")?;
    }
    for w in spectra_by_m.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for k in 1..=k_max {
            let lhs = a.values[k - 1].powf(1.0 / a.m.get() as f64);
            let rhs = b.values[k - 1].powf(1.0 / b.m.get() as f64) * (1.0 + MONOTONICITY_SLACK);
            records.push(ClaimRecord::new(k, lhs, rhs, rhs - lhs));
        }
    }
    let orders: Vec<u32> = spectra_by_m.iter().map(|s| s.m.get()).collect();
    Ok(VerificationReport::from_records(
        "root-monotonicity",
        "(lambda_k^m)^(1/m) is nondecreasing in m (1% slack)",
        records,
        json!({ "spectra": spectra_by_m.iter().map(spectrum_echo).collect::<Vec<_>>(), "k_max": k_max }),
    )
    .with_note(format!("records grouped by consecutive order pairs of {orders:?}")))
}

/// `π² (p² + q²) / L²`, `p, q >= start`, ascending.
pub fn square_laplace_values(side: f64, start: usize, count: usize) -> Vec<f64> {
    let top = start + count + 2;
    let mut v: Vec<f64> = (start..top)
        .flat_map(|p| (start..top).map(move |q| (p * p + q * q) as f64))
        .map(|s| PI * PI * s / (side * side))
        .collect();
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

/// `μ̂_k(m=2) <= (μ_k(m=1))²` on a square, the right side in closed form.
pub fn verify_convex_square(spec_n2: &Spectrum, k_max: usize) -> Result<VerificationReport> {
    let side = match spec_n2.domain {
        Domain::Rectangle { lx, ly } if lx == ly => lx,
        _ => return Err(PhlabError::InvalidArgument("the convex-domain check runs on a square".into())),
    };
    if spec_n2.m.get() != 2 || spec_n2.bc != BoundaryKind::Neumann {
        return Err(PhlabError::InvalidArgument("expected the Neumann spectrum of order 2".into()));
    }
    require_len(spec_n2, k_max, "convex square")?;
    let exact = square_laplace_values(side, 0, k_max);
    let records = (1..=k_max)
        .map(|k| {
            let rhs = exact[k - 1] * exact[k - 1];
            ClaimRecord::new(k, spec_n2.values[k - 1], rhs, rhs - spec_n2.values[k - 1])
        })
        .collect();
    Ok(VerificationReport::from_records(
        "convex-square",
        "mu_k(m=2) <= mu_k(m=1)^2 on the square (left side is an upper bound, right side exact)",
        records,
        json!({ "neumann": spectrum_echo(spec_n2), "k_max": k_max }),
    ))
}

/// Records `λ̂_k - μ̂_{n(d,m)+k}`; never asserted.
pub fn conjecture_probe(
    spec_d: &Spectrum,
    spec_n: &Spectrum,
    d: usize,
    m: OperatorOrder,
    k_max: usize,
) -> Result<VerificationReport> {
    require_pair(spec_d, spec_n)?;
    let offset = n_poly_dim(d, m.as_usize())?;
    require_len(spec_d, k_max, "conjecture probe")?;
    require_len(spec_n, k_max + offset, "conjecture probe")?;
    let records = (1..=k_max)
        .map(|k| {
            let (lambda, mu) = (spec_d.values[k - 1], spec_n.values[k + offset - 1]);
            ClaimRecord::new(k, mu, lambda, lambda - mu)
        })
        .collect();
    Ok(VerificationReport::from_records(
        format!("conjecture-m{m}"),
        format!("conjecture - not asserted: mu_(n({d},{m})+k) <= lambda_k with n({d},{m}) = {offset}"),
        records,
        json!({ "dirichlet": spectrum_echo(spec_d), "neumann": spectrum_echo(spec_n), "d": d, "k_max": k_max }),
    )
    .informational())
}

/// On `(0, 1)` with `m = 1`, `v = cos(kπx)` is a Neumann eigenfunction lying
/// in `U + V`: `v = e^{ikπx} - i sin(kπx)`.
pub fn oned_counterexample(k: usize) -> Result<VerificationReport> {
    if k == 0 {
        return Err(PhlabError::InvalidArgument("k must be >= 1".into()));
    }
    let w = k as f64 * PI;
    // v'(x) = -w sin(w x), measured relative to w
    let d0 = (w * 0.0).sin().abs();
    let d1 = (w * 1.0).sin().abs();
    let residual = (0..100)
        .map(|i| {
            let x = (i as f64 + 0.5) / 100.0;
            let wave = num_complex::Complex64::new(0.0, w * x).exp();
            let u = num_complex::Complex64::new(0.0, -(w * x).sin());
            (wave + u - (w * x).cos()).norm()
        })
        .fold(0.0, f64::max);
    let records = vec![
        ClaimRecord::new(1, d0, 0.0, COUNTEREXAMPLE_TOL - d0),
        ClaimRecord::new(2, d1, 0.0, COUNTEREXAMPLE_TOL - d1),
        ClaimRecord::new(3, residual, 0.0, COUNTEREXAMPLE_TOL - residual),
    ];
    Ok(VerificationReport::from_records(
        format!("counterexample-1d-k{k}"),
        format!("interval, m = 1: v = cos({k} pi x) is a Neumann eigenfunction inside U + V"),
        records,
        json!({ "k": k, "tol": COUNTEREXAMPLE_TOL }),
    )
    .with_note("records: |v'(0)|/(k pi), |v'(1)|/(k pi), max |e^(ik pi x) - i sin(k pi x) - v| over 100 points")
    .with_note(
        "in one dimension U + V meets the Neumann eigenspace, so the strictness argument has nothing to exclude; \
         the positive spectra coincide instead",
    ))
}

/// `|λ̂_k - exact_k| / exact_k <= rel_tol` for a list of closed-form values.
pub fn verify_against_reference(
    claim_id: impl Into<String>,
    statement: impl Into<String>,
    spec: &Spectrum,
    exact: &[f64],
    rel_tol: f64,
) -> Result<VerificationReport> {
    require_len(spec, exact.len(), "reference comparison")?;
    let records = exact
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let got = spec.values[i];
            let err = if e == 0.0 { got.abs() } else { (got - e).abs() / e };
            ClaimRecord::new(i + 1, got, e, rel_tol - err)
        })
        .collect();
    Ok(VerificationReport::from_records(
        claim_id,
        statement,
        records,
        json!({ "spectrum": spectrum_echo(spec), "rel_tol": rel_tol }),
    ))
}

/// Largest root of `cos β cosh β = 1` in `(lo, hi)` by plain bisection.
pub fn clamped_beam_root(lo: f64, hi: f64) -> f64 {
    let f = |b: f64| b.cos() * b.cosh() - 1.0;
    let (mut lo, mut hi) = (lo, hi);
    let positive_lo = f(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == positive_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Per-`k` nonincrease across nested discretizations.
pub fn verify_nested_convergence(conv: &ConvergenceTable, slack: f64) -> VerificationReport {
    let finest = conv.finest();
    let count = conv.error_estimates.len();
    let records = (1..=count)
        .map(|k| {
            let seq = conv.sequence(k);
            let inc = seq.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            ClaimRecord::new(k, inc, slack, slack - inc)
        })
        .collect();
    VerificationReport::from_records(
        format!("convergence-{}-m{}", finest.bc, finest.m),
        "eigenvalues are nonincreasing as the nested discretization grows",
        records,
        json!({ "spectrum": spectrum_echo(finest), "n_list": conv.n_list, "slack": slack }),
    )
    .with_note("lhs: largest increase of lambda_k between consecutive n")
}

/// Closed-form identities of plane-wave trial functions at seeded random points.
pub fn verify_trial_identities(seed: u64, points: usize) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for m in 1..=3u32 {
        let order = OperatorOrder::new(m)?;
        let theta: f64 = rng.gen_range(0.0..2.0 * PI);
        let r: f64 = rng.gen_range(1.0..8.0);
        let ts = TrialSpace::new(order, [r * theta.cos(), r * theta.sin()], random_alpha(m as usize, &mut rng))?;
        let pts: Vec<[f64; 2]> = (0..points).map(|_| [rng.gen(), rng.gen()]).collect();
        let pde = verify_pde_identity(&ts, &pts);
        let grad = verify_mth_gradient_identity(&ts, &pts);
        records.push(ClaimRecord::new(m as usize, pde, TRIAL_IDENTITY_TOL, TRIAL_IDENTITY_TOL - pde));
        records.push(ClaimRecord::new(m as usize, grad, TRIAL_IDENTITY_TOL, TRIAL_IDENTITY_TOL - grad));
    }
    Ok(VerificationReport::from_records(
        "trial-identities",
        "(-Delta)^m v = |w|^(2m) v and |D^m v|^2 = |w|^(2m) |v|^2 pointwise",
        records,
        json!({ "seed": seed, "points": points, "orders": [1, 2, 3] }),
    )
    .with_note("k = m; per order the first record is the polyharmonic identity, the second the m-th gradient identity"))
}

/// `|det V|` of the m-th roots of unity is positive.
pub fn verify_vandermonde(max_m: usize) -> VerificationReport {
    let records = (1..=max_m)
        .map(|m| {
            let det = vandermonde_check(&roots_of_unity(m));
            ClaimRecord::strict(m, det, 0.0, det)
        })
        .collect();
    VerificationReport::from_records(
        "vandermonde",
        "the Vandermonde matrix of the m-th roots of unity is nonsingular",
        records,
        json!({ "max_m": max_m }),
    )
}

/// Rayleigh chain on `U ⊕ V_ω` for `k = 1..=k_max`.
pub fn verify_chain(sol: &GalerkinSolution, k_max: usize) -> Result<VerificationReport> {
    let mut records = Vec::with_capacity(k_max);
    let mut notes = Vec::new();
    for k in 1..=k_max {
        let omega = select_omega(sol, k, GRAM_DEGENERACY)?;
        let cert = certified_chain_bound(sol, k, omega, None, CHAIN_TOL)?;
        let rhs = cert.lambda_hat * (1.0 + CHAIN_TOL);
        records.push(ClaimRecord::new(k, cert.max_rayleigh, rhs, rhs - cert.max_rayleigh));
        notes.push(format!(
            "k = {k}: omega = ({:.6}, {:.6}), gram_min_sv = {:.3e}",
            omega[0], omega[1], cert.gram_min_sv
        ));
    }
    let p = &sol.pencil;
    let mut report = VerificationReport::from_records(
        format!("chain-m{}", p.m),
        "max Rayleigh quotient on U + V_w is at most lambda_k, with dim(U + V_w) = k + m",
        records,
        json!({ "m": p.m.get(), "n": p.n, "domain": p.rect.domain(), "k_max": k_max, "tol": CHAIN_TOL }),
    )
    .with_note("U holds discrete Dirichlet eigenfunctions, so the certificate is against the computed lambda_k");
    report.notes.extend(notes);
    Ok(report)
}

/// Plane waves keep an `H^m`-norm distance of at least 1% from the discrete
/// Dirichlet space.
pub fn verify_projection_residual(sol: &GalerkinSolution, k_max: usize, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = sol.pencil.m;
    let mut records = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let omega = omega_at(m, sol.values[k - 1], k as f64 * GOLDEN_ANGLE);
        let ts = TrialSpace::new(m, omega, random_alpha(m.as_usize(), &mut rng))?;
        let r = dirichlet_projection_residual(sol, &ts)?;
        records.push(ClaimRecord::new(k, r, PROJECTION_FLOOR, r - PROJECTION_FLOOR));
    }
    Ok(VerificationReport::from_records(
        format!("projection-m{m}"),
        "plane waves stay at relative distance >= 1% from the discrete Dirichlet space",
        records,
        json!({ "m": m.get(), "n": sol.pencil.n, "domain": sol.pencil.rect.domain(), "seed": seed }),
    )
    .with_note("distance measured in the norm (int|v|^2 + int|D^m v|^2)^(1/2)"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Method;

    fn order(m: u32) -> OperatorOrder {
        OperatorOrder::new(m).unwrap()
    }

    fn square_spectrum(bc: BoundaryKind, m: u32, values: Vec<f64>) -> Spectrum {
        let n = values.len();
        Spectrum::new(order(m), bc, Domain::unit_square(), values, Method::Galerkin2D { n_per_axis: 8 }, n, 1e-6).unwrap()
    }

    #[test]
    fn weak_minmax_closed_forms() {
        let d = square_spectrum(BoundaryKind::Dirichlet, 1, square_laplace_values(1.0, 1, 12));
        let n = square_spectrum(BoundaryKind::Neumann, 1, square_laplace_values(1.0, 0, 12));
        let r = verify_weak_minmax(&d, &n, 12).unwrap();
        assert!(r.passed);
        assert_eq!(r.details[0].lhs, 0.0);
    }

    #[test]
    fn theorem_rejects_intervals() {
        let tol = ToleranceConfig::default();
        let d = crate::oned::solve_1d_spectrum(order(1), BoundaryKind::Dirichlet, 4, 1.0, &tol).unwrap();
        let n = crate::oned::solve_1d_spectrum(order(1), BoundaryKind::Neumann, 6, 1.0, &tol).unwrap();
        let conv = crate::galerkin::convergence_table(vec![d.clone(), d.clone()], vec![1, 2]).unwrap();
        let err = verify_theorem_main(&d, &n, &conv, 3, &tol).unwrap_err();
        assert!(err.to_string().contains("coincide"));
    }

    #[test]
    fn hand_computed_energies() {
        // u = (1 - x²)(1 - y²) on [-1, 1]²
        let u = Poly2::separable(&Poly1::bubble(1), &Poly1::bubble(1));
        let rect = Rect::new(2.0, 2.0).unwrap();
        assert!((dm_energy(&u, 0, rect) - 256.0 / 225.0).abs() < 1e-12);
        assert!((dm_energy(&u, 1, rect) - 256.0 / 45.0).abs() < 1e-12);
        assert!((dm_energy(&u, 2, rect) - 1408.0 / 45.0).abs() < 1e-12);
        assert!((laplacian_power_energy(&u, 1, rect) - 256.0 / 45.0).abs() < 1e-12);
        let zero = Poly2::zero();
        assert_eq!(dm_energy(&zero, 2, rect), 0.0);
    }

    #[test]
    fn interpolation_samples_pass() {
        for m in 1..=2 {
            let r = verify_interpolation(order(m), 10, 7, Rect::new(2.0, 2.0).unwrap());
            assert!(r.passed, "m={m}: {:?}", r.details.iter().find(|d| !d.ok));
        }
    }

    #[test]
    fn counterexample_checks() {
        for k in 1..=3 {
            let r = oned_counterexample(k).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn monotonicity_reflexive_case() {
        let a = square_spectrum(BoundaryKind::Dirichlet, 1, vec![4.0, 9.0]);
        let b = square_spectrum(BoundaryKind::Dirichlet, 2, vec![16.0, 81.0]);
        let r = verify_root_monotonicity(&[a.clone(), b], 2).unwrap();
        assert!(r.passed);
        assert!(verify_root_monotonicity(&[a.clone(), a], 2).is_err());
    }

    #[test]
    fn beam_root() {
        assert!((clamped_beam_root(4.0, 5.0) - 4.730_040_7).abs() < 1e-7);
    }

    #[test]
    fn vandermonde_positive() {
        assert!(verify_vandermonde(12).passed);
    }
}
