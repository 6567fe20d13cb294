//! Claim suites: named checks with fixed or configured inputs, executed
//! concurrently over a shared spectra cache and merged in `claim_id` order.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::claims::*;
use crate::config::{DomainChoice, ResolvedConfig};
use crate::error::{PhlabError, Result};
use crate::galerkin::{convergence_table, solve_2d, trusted_count, ConvergenceTable, GalerkinSolution};
use crate::model::{BoundaryKind, OperatorOrder, Rect, Spectrum, ToleranceConfig, VerificationReport};
use crate::oned::{check_remark12, solve_1d_spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SolveKey {
    m: u32,
    bc: BoundaryKind,
    n: usize,
    lx: u64,
    ly: u64,
}

type Slot = Arc<OnceLock<Result<Arc<GalerkinSolution>>>>;

/// Memoized Galerkin solutions shared by concurrent claims.
pub struct SpectraCache {
    tol: ToleranceConfig,
    neumann_scale: f64,
    slots: Mutex<HashMap<SolveKey, Slot>>,
}

impl SpectraCache {
    pub fn new(tol: ToleranceConfig) -> Self {
        SpectraCache { tol, neumann_scale: 1.0, slots: Mutex::new(HashMap::new()) }
    }

    /// Fault injection: every Neumann eigenvalue is multiplied by `scale`.
    pub fn with_neumann_scale(mut self, scale: f64) -> Self {
        self.neumann_scale = scale;
        self
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tol
    }

    pub fn solution(&self, m: OperatorOrder, bc: BoundaryKind, n: usize, rect: Rect) -> Result<Arc<GalerkinSolution>> {
        let key = SolveKey { m: m.get(), bc, n, lx: rect.lx.to_bits(), ly: rect.ly.to_bits() };
        let slot = self.slots.lock().expect("cache lock").entry(key).or_default().clone();
        slot.get_or_init(|| {
            let mut sol = solve_2d(m, bc, n, rect, &self.tol)?;
            if bc == BoundaryKind::Neumann && self.neumann_scale != 1.0 {
                sol.values.iter_mut().for_each(|v| *v *= self.neumann_scale);
            }
            Ok(Arc::new(sol))
        })
        .clone()
    }

    /// First `count` values, capped at the trusted count when `count` is `None`.
    pub fn spectrum(&self, m: OperatorOrder, bc: BoundaryKind, n: usize, rect: Rect, count: Option<usize>) -> Result<Spectrum> {
        self.solution(m, bc, n, rect)?.spectrum(count.unwrap_or_else(|| trusted_count(n)), &self.tol)
    }

    pub fn convergence(&self, m: OperatorOrder, bc: BoundaryKind, rect: Rect, n_list: &[usize], count: usize) -> Result<ConvergenceTable> {
        if n_list.len() < 2 || n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PhlabError::InvalidArgument("n_list must be strictly increasing with length >= 2".into()));
        }
        let spectra = n_list
            .iter()
            .map(|&n| self.spectrum(m, bc, n, rect, Some(count)))
            .collect::<Result<Vec<_>>>()?;
        convergence_table(spectra, n_list.to_vec())
    }
}

/// Inputs shared by every claim of a suite run.
pub struct SuiteContext {
    pub cache: SpectraCache,
    pub seed: u64,
    pub samples: usize,
}

impl SuiteContext {
    pub fn tol(&self) -> &ToleranceConfig {
        self.cache.tolerances()
    }
}

type ClaimFn = Box<dyn Fn(&SuiteContext) -> Result<VerificationReport> + Send + Sync>;

pub struct ClaimDescriptor {
    pub claim_id: String,
    run: ClaimFn,
}

impl ClaimDescriptor {
    pub fn new(claim_id: impl Into<String>, run: impl Fn(&SuiteContext) -> Result<VerificationReport> + Send + Sync + 'static) -> Self {
        ClaimDescriptor { claim_id: claim_id.into(), run: Box::new(run) }
    }
}

/// Ordered, uniquely named claims.
#[derive(Default)]
pub struct ClaimSuite {
    claims: Vec<ClaimDescriptor>,
}

pub const CLAIM_SETS: &[&str] = &[
    "remark12",
    "theorem",
    "weak-minmax",
    "zero-modes",
    "interpolation",
    "monotonicity",
    "convex-square",
    "conjecture",
    "counterexample",
    "trial-identities",
    "chain",
    "vandermonde",
    "convergence",
    "projection",
];

fn order(m: u32) -> OperatorOrder {
    OperatorOrder::new(m).expect("orders in suites are within range")
}

fn unit() -> Rect {
    Rect::unit()
}

impl ClaimSuite {
    pub fn push(&mut self, claim: ClaimDescriptor) -> Result<()> {
        if self.claims.iter().any(|c| c.claim_id == claim.claim_id) {
            return Err(PhlabError::InvalidArgument(format!("duplicate claim id {}", claim.claim_id)));
        }
        self.claims.push(claim);
        Ok(())
    }

    pub fn claim_ids(&self) -> Vec<&str> {
        self.claims.iter().map(|c| c.claim_id.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    /// Runs every claim, `threads` workers (`None`: rayon default), and returns
    /// the reports sorted by `claim_id`. The first error aborts the run.
    pub fn run(&self, ctx: &SuiteContext, threads: Option<usize>) -> Result<Vec<VerificationReport>> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            builder = builder.num_threads(t.max(1));
        }
        let pool = builder.build().map_err(|e| PhlabError::Numerical(format!("thread pool: {e}")))?;
        let mut reports = pool.install(|| {
            self.claims
                .par_iter()
                .map(|c| {
                    let mut r = (c.run)(ctx)?;
                    r.claim_id = c.claim_id.clone();
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()
        })?;
        reports.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
        Ok(reports)
    }

    /// The complete acceptance suite at its fixed configurations.
    pub fn acceptance() -> ClaimSuite {
        let mut s = ClaimSuite::default();
        let mut add = |id: &str, f: ClaimFn| s.push(ClaimDescriptor { claim_id: id.to_string(), run: f }).expect("unique ids");

        // intervals
        add(
            "oned-reference-m1-dirichlet",
            Box::new(|ctx| {
                let spec = solve_1d_spectrum(order(1), BoundaryKind::Dirichlet, 10, 1.0, ctx.tol())?;
                let exact: Vec<f64> = (1..=10).map(|k| (k * k) as f64 * PI * PI).collect();
                verify_against_reference("", "interval, m = 1: lambda_k = k^2 pi^2", &spec, &exact, 1e-10)
            }),
        );
        add(
            "oned-reference-m1-neumann",
            Box::new(|ctx| {
                let spec = solve_1d_spectrum(order(1), BoundaryKind::Neumann, 10, 1.0, ctx.tol())?;
                let exact: Vec<f64> = (0..10).map(|k| (k * k) as f64 * PI * PI).collect();
                verify_against_reference("", "interval, m = 1: mu_k = (k-1)^2 pi^2", &spec, &exact, 1e-10)
            }),
        );
        add(
            "oned-beam-m2",
            Box::new(|ctx| {
                let spec = solve_1d_spectrum(order(2), BoundaryKind::Dirichlet, 1, 1.0, ctx.tol())?;
                let beta = clamped_beam_root(4.0, 5.0);
                verify_against_reference("", "clamped beam: lambda_1 = beta^4, cos(beta) cosh(beta) = 1", &spec, &[beta.powi(4)], 1e-9)
            }),
        );
        for (m, count) in [(1u32, 10usize), (2, 8), (3, 5)] {
            add(&format!("remark12-m{m}"), Box::new(move |ctx| check_remark12(order(m), count, 1.0, 1e-8, ctx.tol())));
        }
        add(
            "zero-modes-1d-m3",
            Box::new(|ctx| {
                let spec = solve_1d_spectrum(order(3), BoundaryKind::Neumann, 5, 1.0, ctx.tol())?;
                verify_zero_modes(&spec, 1, order(3), ctx.tol().tol_zero)
            }),
        );
        add("counterexample-1d-k1", Box::new(|_| oned_counterexample(1)));
        add("counterexample-1d-k2", Box::new(|_| oned_counterexample(2)));
        add("counterexample-1d-k3", Box::new(|_| oned_counterexample(3)));

        // Laplacian on the square
        add(
            "laplace-square-dirichlet",
            Box::new(|ctx| {
                let spec = ctx.cache.spectrum(order(1), BoundaryKind::Dirichlet, 16, unit(), Some(10))?;
                verify_against_reference("", "square, m = 1: Dirichlet values match pi^2 (p^2 + q^2), p, q >= 1", &spec, &square_laplace_values(1.0, 1, 10), 1e-3)
            }),
        );
        add(
            "laplace-square-neumann",
            Box::new(|ctx| {
                let spec = ctx.cache.spectrum(order(1), BoundaryKind::Neumann, 16, unit(), Some(10))?;
                verify_against_reference("", "square, m = 1: Neumann values match pi^2 (p^2 + q^2), p, q >= 0", &spec, &square_laplace_values(1.0, 0, 10), 1e-3)
            }),
        );
        add("theorem-m1", Box::new(|ctx| theorem(ctx, 1, &[12, 16], 9)));
        add("theorem-m2", Box::new(|ctx| theorem(ctx, 2, &[16, 20], 8)));

        // plate
        for n in [12usize, 16, 20] {
            add(
                &format!("zero-modes-2d-n{n}-m2"),
                Box::new(move |ctx| {
                    let spec = ctx.cache.spectrum(order(2), BoundaryKind::Neumann, n, unit(), Some(20))?;
                    verify_zero_modes(&spec, 2, order(2), ctx.tol().tol_zero)
                }),
            );
        }
        for (m, n) in [(1u32, 16usize), (3, 14)] {
            add(
                &format!("zero-modes-2d-n{n}-m{m}"),
                Box::new(move |ctx| {
                    let spec = ctx.cache.spectrum(order(m), BoundaryKind::Neumann, n, unit(), Some(20))?;
                    verify_zero_modes(&spec, 2, order(m), ctx.tol().tol_zero)
                }),
            );
        }
        for bc in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
            add(
                &format!("convergence-{bc}-m2"),
                Box::new(move |ctx| {
                    let conv = ctx.cache.convergence(order(2), bc, unit(), &[12, 16, 20], 40)?;
                    Ok(verify_nested_convergence(&conv, 1e-8))
                }),
            );
        }
        for (m, n, k_max) in [(1u32, 16usize, 20usize), (2, 20, 20), (3, 14, 20)] {
            add(
                &format!("weak-minmax-m{m}"),
                Box::new(move |ctx| {
                    let d = ctx.cache.spectrum(order(m), BoundaryKind::Dirichlet, n, unit(), None)?;
                    let nn = ctx.cache.spectrum(order(m), BoundaryKind::Neumann, n, unit(), None)?;
                    verify_weak_minmax(&d, &nn, k_max)
                }),
            );
        }
        add(
            "conjecture-m2",
            Box::new(|ctx| {
                let d = ctx.cache.spectrum(order(2), BoundaryKind::Dirichlet, 20, unit(), None)?;
                let nn = ctx.cache.spectrum(order(2), BoundaryKind::Neumann, 20, unit(), None)?;
                conjecture_probe(&d, &nn, 2, order(2), 5)
            }),
        );

        // trial space
        add("trial-identities", Box::new(|ctx| verify_trial_identities(ctx.seed, 100)));
        add("vandermonde", Box::new(|_| Ok(verify_vandermonde(12))));
        for (m, k_max) in [(1u32, 3usize), (2, 5)] {
            add(
                &format!("chain-m{m}"),
                Box::new(move |ctx| verify_chain(&*ctx.cache.solution(order(m), BoundaryKind::Dirichlet, 16, unit())?, k_max)),
            );
        }
        for m in [1u32, 2] {
            add(
                &format!("projection-m{m}"),
                Box::new(move |ctx| {
                    verify_projection_residual(&*ctx.cache.solution(order(m), BoundaryKind::Dirichlet, 12, unit())?, 3, ctx.seed)
                }),
            );
        }

        // remaining inequalities
        for m in [1u32, 2] {
            add(
                &format!("interpolation-m{m}"),
                Box::new(move |ctx| Ok(verify_interpolation(order(m), ctx.samples, ctx.seed, Rect { lx: 2.0, ly: 2.0 }))),
            );
        }
        add(
            "root-monotonicity",
            Box::new(|ctx| {
                let spectra = (1..=3)
                    .map(|m| ctx.cache.spectrum(order(m), BoundaryKind::Dirichlet, 20, unit(), Some(5)))
                    .collect::<Result<Vec<_>>>()?;
                verify_root_monotonicity(&spectra, 5)
            }),
        );
        add(
            "convex-square",
            Box::new(|ctx| {
                let spec = ctx.cache.spectrum(order(2), BoundaryKind::Neumann, 20, unit(), Some(10))?;
                verify_convex_square(&spec, 10)
            }),
        );
        s
    }

    /// Claims of one named set at the configured parameters.
    pub fn for_set(name: &str, c: &ResolvedConfig) -> Result<ClaimSuite> {
        let mut s = ClaimSuite::default();
        let m = c.m;
        let (n, k_max, count) = (c.n, c.k_max, c.count);
        let length = c.length;
        let rect_or_err = || c.rect();
        match name {
            "remark12" => {
                s.push(ClaimDescriptor::new(format!("remark12-m{m}"), move |ctx| {
                    check_remark12(m, count, length, 1e-8, ctx.tol())
                }))?;
            }
            "theorem" => {
                let rect = rect_or_err()?;
                let coarse = if n >= m.as_usize() + 5 { n - 4 } else { n };
                let fine = if coarse == n { n + 4 } else { n };
                s.push(ClaimDescriptor::new(format!("theorem-m{m}"), move |ctx| {
                    let d = ctx.cache.spectrum(m, BoundaryKind::Dirichlet, fine, rect, None)?;
                    let nn = ctx.cache.spectrum(m, BoundaryKind::Neumann, fine, rect, None)?;
                    let conv = ctx.cache.convergence(m, BoundaryKind::Dirichlet, rect, &[coarse, fine], k_max)?;
                    verify_theorem_main(&d, &nn, &conv, k_max, ctx.tol())
                }))?;
            }
            "weak-minmax" => {
                let rect = rect_or_err()?;
                s.push(ClaimDescriptor::new(format!("weak-minmax-m{m}"), move |ctx| {
                    let d = ctx.cache.spectrum(m, BoundaryKind::Dirichlet, n, rect, None)?;
                    let nn = ctx.cache.spectrum(m, BoundaryKind::Neumann, n, rect, None)?;
                    verify_weak_minmax(&d, &nn, k_max)
                }))?;
            }
            "zero-modes" => {
                if c.domain == DomainChoice::Interval {
                    s.push(ClaimDescriptor::new(format!("zero-modes-1d-m{m}"), move |ctx| {
                        let spec = solve_1d_spectrum(m, BoundaryKind::Neumann, m.as_usize() + 2, length, ctx.tol())?;
                        verify_zero_modes(&spec, 1, m, ctx.tol().tol_zero)
                    }))?;
                } else {
                    let rect = rect_or_err()?;
                    s.push(ClaimDescriptor::new(format!("zero-modes-2d-n{n}-m{m}"), move |ctx| {
                        let spec = ctx.cache.spectrum(m, BoundaryKind::Neumann, n, rect, None)?;
                        verify_zero_modes(&spec, 2, m, ctx.tol().tol_zero)
                    }))?;
                }
            }
            "interpolation" => {
                let rect = rect_or_err()?;
                s.push(ClaimDescriptor::new(format!("interpolation-m{m}"), move |ctx| {
                    Ok(verify_interpolation(m, ctx.samples, ctx.seed, rect))
                }))?;
            }
            "monotonicity" => {
                let rect = rect_or_err()?;
                s.push(ClaimDescriptor::new("root-monotonicity", move |ctx| {
                    let spectra = (1..=3)
                        .map(|mm| ctx.cache.spectrum(order(mm), BoundaryKind::Dirichlet, n, rect, Some(k_max)))
                        .collect::<Result<Vec<_>>>()?;
                    verify_root_monotonicity(&spectra, k_max)
                }))?;
            }
            "convex-square" => {
                let rect = rect_or_err()?;
                s.push(ClaimDescriptor::new("convex-square", move |ctx| {
                    let spec = ctx.cache.spectrum(order(2), BoundaryKind::Neumann, n, rect, Some(k_max))?;
                    verify_convex_square(&spec, k_max)
                }))?;
            }
            "conjecture" => {
                let rect = rect_or_err()?;
                s.push(ClaimDescriptor::new(format!("conjecture-m{m}"), move |ctx| {
                    let d = ctx.cache.spectrum(m, BoundaryKind::Dirichlet, n, rect, None)?;
                    let nn = ctx.cache.spectrum(m, BoundaryKind::Neumann, n, rect, None)?;
                    conjecture_probe(&d, &nn, 2, m, k_max)
                }))?;
            }
            "counterexample" => {
                for k in 1..=count.min(10) {
                    s.push(ClaimDescriptor::new(format!("counterexample-1d-k{k}"), move |_| oned_counterexample(k)))?;
                }
            }
            "trial-identities" => {
                s.push(ClaimDescriptor::new("trial-identities", |ctx| verify_trial_identities(ctx.seed, 100)))?;
            }
            "chain" => {
                let rect = rect_or_err()?;
                s.push(ClaimDescriptor::new(format!("chain-m{m}"), move |ctx| {
                    verify_chain(&*ctx.cache.solution(m, BoundaryKind::Dirichlet, n, rect)?, k_max)
                }))?;
            }
            "vandermonde" => {
                s.push(ClaimDescriptor::new("vandermonde", |_| Ok(verify_vandermonde(12))))?;
            }
            "convergence" => {
                let rect = rect_or_err()?;
                let bc = c.bc;
                let n_list: Vec<usize> = [n.saturating_sub(8), n.saturating_sub(4), n]
                    .into_iter()
                    .filter(|&x| x > m.as_usize())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                s.push(ClaimDescriptor::new(format!("convergence-{bc}-m{m}"), move |ctx| {
                    let cnt = count.min(trusted_count(n_list[0]));
                    let conv = ctx.cache.convergence(m, bc, rect, &n_list, cnt)?;
                    Ok(verify_nested_convergence(&conv, 1e-8))
                }))?;
            }
            "projection" => {
                let rect = rect_or_err()?;
                s.push(ClaimDescriptor::new(format!("projection-m{m}"), move |ctx| {
                    verify_projection_residual(&*ctx.cache.solution(m, BoundaryKind::Dirichlet, n, rect)?, k_max, ctx.seed)
                }))?;
            }
            "all" => return Ok(ClaimSuite::acceptance()),
            other => {
                return Err(PhlabError::Usage(format!(
                    "unknown claim set {other:?}; expected one of {}",
                    CLAIM_SETS.join(", ")
                )))
            }
        }
        Ok(s)
    }
}

fn theorem(ctx: &SuiteContext, m: u32, n_list: &[usize], k_max: usize) -> Result<VerificationReport> {
    let n = *n_list.last().expect("nonempty");
    let d = ctx.cache.spectrum(order(m), BoundaryKind::Dirichlet, n, unit(), None)?;
    let nn = ctx.cache.spectrum(order(m), BoundaryKind::Neumann, n, unit(), None)?;
    let conv = ctx.cache.convergence(order(m), BoundaryKind::Dirichlet, unit(), n_list, k_max)?;
    verify_theorem_main(&d, &nn, &conv, k_max, ctx.tol())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_ids_are_unique_and_sets_resolve() {
        let suite = ClaimSuite::acceptance();
        let ids: BTreeSet<_> = suite.claim_ids().into_iter().collect();
        assert_eq!(ids.len(), suite.len());
        let cfg = ResolvedConfig::default();
        for set in CLAIM_SETS {
            assert!(!ClaimSuite::for_set(set, &cfg).unwrap().is_empty(), "{set}");
        }
        assert!(matches!(ClaimSuite::for_set("nope", &cfg), Err(PhlabError::Usage(_))));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut s = ClaimSuite::default();
        s.push(ClaimDescriptor::new("a", |_| Ok(verify_vandermonde(2)))).unwrap();
        assert!(s.push(ClaimDescriptor::new("a", |_| Ok(verify_vandermonde(2)))).is_err());
    }

    #[test]
    fn cache_shares_solutions() {
        let cache = SpectraCache::new(ToleranceConfig::default());
        let a = cache.solution(order(1), BoundaryKind::Dirichlet, 6, unit()).unwrap();
        let b = cache.solution(order(1), BoundaryKind::Dirichlet, 6, unit()).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
