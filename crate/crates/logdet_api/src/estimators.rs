use std::time::Instant;

use direct_solvers::tree_factorize;
use sparse_core::SymmetricSparse;
use sparsifiers::{build_chain, spectral_sparsify};

use sparse_core::seed::tag;
use trace_estimator::{
    finish_from_pilot, mc_logdet_remainder, normal_quantile, plan_samples_with, run_pilot,
    solver_tolerance, PlanRule, RemainderEstimate, RemainderProblem, PILOT_SAMPLES,
};

use crate::allocate::{allocate, RunCost};
use crate::error::{LogdetError, Result};
use crate::pipeline::{component_seed, reduce, tree_bound, Job, JobKind, Reduced, RunSpec};
use crate::report::{ChainReport, EstimateOptions, EstimateReport, LevelReport, Method, Side};

/// Sparsifier precision used by [`fast_inexact_logdet`].
pub const FAST_SPARSIFY_EPS: f64 = 1.0 / 16.0;
/// Per-vertex precision of the estimate on the sparsified graphs.
pub const FAST_INNER_EPS: f64 = 0.25;

struct Bounds {
    lower: f64,
    upper: f64,
}

fn bounds_of(
    reduced: &Reduced,
    seed: u64,
) -> Result<(Bounds, Vec<Vec<crate::pipeline::TreeBound>>)> {
    let (mut lower, mut upper) = (0.0, 0.0);
    let mut trees = Vec::new();
    for (side, comps) in &reduced.sides {
        let mut per_side = Vec::new();
        for (c, comp) in comps.iter().enumerate() {
            let b = tree_bound(&comp.graph, component_seed(seed, "tree", *side, c))?;
            match side {
                Side::Tilde => {
                    lower += b.lower;
                    upper += b.upper;
                }
                Side::Hat => {
                    lower -= b.upper;
                    upper -= b.lower;
                }
            }
            per_side.push(b);
        }
        trees.push(per_side);
    }
    let n = reduced.n as f64;
    Ok((
        Bounds {
            lower: lower / n,
            upper: upper / n,
        },
        trees,
    ))
}

fn capped_estimate(l: usize) -> RemainderEstimate {
    RemainderEstimate {
        estimate: 0.0,
        std_error: 0.0,
        samples: 0,
        truncation: l,
        solver_failures: 0,
        capped: true,
    }
}

fn level_report(
    jobs: &[Job],
    run: &RunSpec,
    eps: f64,
    eta: f64,
    r: &RemainderEstimate,
) -> LevelReport {
    let job = &jobs[run.job];
    LevelReport {
        side: job.side,
        component: job.component,
        level: run.level,
        dim: run.dim,
        edges: run.edges.0,
        precond_edges: run.edges.1,
        kappa: run.kappa,
        kappa_b: run.kappa_b,
        nu: run.nu,
        eps,
        eta,
        samples: r.samples,
        truncation: r.truncation,
        remainder: r.estimate,
        std_error: r.std_error,
        solver_failures: r.solver_failures,
        capped: r.capped,
    }
}

/// Runs every remainder of every job under the absolute error budget
/// `n * eps` and failure probability `eta / 2` per side, split evenly
/// across that side's runs. Returns `sum sign * pld` and the run reports.
///
/// The budget is first split with per-dimension precision proportional to
/// `kappa^(1/3)`, which fixes the inner solver tolerances. Under the
/// empirical rule every run then draws its pilot, the budget is re-split
/// to minimize the total work given the pilot spreads (never below a
/// quarter of the first split), and the runs are completed.
fn run_jobs(
    jobs: &[Job],
    n: usize,
    eps: f64,
    opts: &EstimateOptions,
) -> Result<(f64, Vec<LevelReport>)> {
    let mut runs: Vec<RunSpec> = jobs
        .iter()
        .enumerate()
        .flat_map(|(j, job)| job.runs(j))
        .collect();
    let total = n as f64 * eps;
    let weight: f64 = runs.iter().map(|r| r.dim as f64 * r.kappa.cbrt()).sum();
    let eps0: Vec<f64> = runs
        .iter()
        .map(|r| total * r.kappa.cbrt() / weight)
        .collect();
    let on_side = |side: Side| runs.iter().filter(|r| jobs[r.job].side == side).count();
    let (tilde, hat) = (on_side(Side::Tilde), on_side(Side::Hat));
    let eta: Vec<f64> = runs
        .iter()
        .map(|r| {
            let count = if jobs[r.job].side == Side::Tilde {
                tilde
            } else {
                hat
            };
            opts.eta / 2.0 / count as f64
        })
        .collect();
    for (r, e) in runs.iter_mut().zip(&eps0) {
        if let Some(kb) = r.kappa_b {
            r.nu = solver_tolerance(e / 4.0, r.kappa, kb, opts.tolerance_rule);
        }
    }
    let key = |r: &RunSpec| {
        let job = &jobs[r.job];
        [
            tag("remainder"),
            job.side as u64,
            job.component as u64,
            r.level as u64,
        ]
    };
    let plan = |i: usize, e: f64| {
        plan_samples_with(opts.plan_rule, e, eta[i], 1.0 / runs[i].kappa, runs[i].dim)
    };

    let mut results = Vec::with_capacity(runs.len());
    let mut final_eps = eps0.clone();
    if opts.plan_rule == PlanRule::Empirical {
        let mut pilots = Vec::with_capacity(runs.len());
        let mut failures = vec![0; runs.len()];
        for (i, r) in runs.iter().enumerate() {
            let p0 = plan(i, eps0[i])?;
            let count = PILOT_SAMPLES.min(p0.p);
            if count as u128 * p0.l as u128 > opts.max_work as u128 {
                pilots.push(Err(p0.l));
                continue;
            }
            let inv = r.inverse();
            let prob = RemainderProblem::new(&r.a, &inv, r.kappa, r.nu)?;
            let before = r.failures();
            pilots.push(Ok(run_pilot(&prob, count, p0.l, opts.seed, &key(r))));
            failures[i] += r.failures() - before;
        }
        let costs: Vec<RunCost> = runs
            .iter()
            .zip(&pilots)
            .enumerate()
            .filter_map(|(i, (r, p))| {
                p.as_ref().ok().map(|p| RunCost {
                    dim: r.dim,
                    delta: 1.0 / r.kappa,
                    std: p.std_at(p.truncation()),
                    z: normal_quantile(eta[i]),
                    floor: p.samples(),
                    eps0: eps0[i],
                })
            })
            .collect();
        if costs.len() == runs.len() {
            final_eps = allocate(&costs, total);
        }
        for (i, (r, pilot)) in runs.iter().zip(pilots).enumerate() {
            let pilot = match pilot {
                Ok(p) => p,
                Err(l) => {
                    results.push(capped_estimate(l));
                    continue;
                }
            };
            let plan = plan(i, final_eps[i])?;
            let cap = (opts.max_work / plan.l.max(1) as u64) as usize;
            let inv = r.inverse();
            let prob = RemainderProblem::new(&r.a, &inv, r.kappa, r.nu)?;
            let before = r.failures();
            let mut est = finish_from_pilot(
                &prob,
                pilot,
                &plan.with_max_samples(cap),
                opts.seed,
                &key(r),
            )?;
            est.solver_failures += failures[i] + r.failures() - before;
            results.push(est);
        }
    } else {
        for (i, r) in runs.iter().enumerate() {
            let plan = plan(i, eps0[i])?;
            if plan.p as u128 * plan.l as u128 > opts.max_work as u128 {
                results.push(capped_estimate(plan.l));
                continue;
            }
            let inv = r.inverse();
            let prob = RemainderProblem::new(&r.a, &inv, r.kappa, r.nu)?;
            let before = r.failures();
            let mut est = mc_logdet_remainder(&prob, &plan, opts.seed, &key(r))?;
            est.solver_failures += r.failures() - before;
            results.push(est);
        }
    }

    let mut sum: f64 = jobs
        .iter()
        .map(|j| j.side.sign() * j.deterministic_pld())
        .sum();
    let mut levels = Vec::with_capacity(runs.len());
    for (i, (r, est)) in runs.iter().zip(&results).enumerate() {
        sum += jobs[r.job].side.sign() * r.dim as f64 * est.estimate;
        levels.push(level_report(jobs, r, final_eps[i], eta[i], est));
    }
    Ok((sum, levels))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    a: &SymmetricSparse,
    method: Method,
    opts: &EstimateOptions,
    raw: f64,
    bounds: &Bounds,
    half_width: Option<f64>,
    levels: Vec<LevelReport>,
    jobs: &[Job],
    start: Instant,
) -> Result<EstimateReport> {
    let n = a.n();
    let mut estimate = raw / n as f64;
    let mut degraded_reason = None;
    if levels.iter().any(|l| l.capped) {
        estimate = 0.5 * (bounds.lower + bounds.upper);
        degraded_reason =
            Some("sample plan exceeds the compute cap; reporting the stretch bounds".into());
    } else if levels.iter().any(|l| l.solver_failures > 0) {
        degraded_reason = Some("some preconditioned solves missed their tolerance".into());
    }
    if !estimate.is_finite() {
        return Err(LogdetError::InvalidParameter(format!(
            "estimate is not finite ({estimate})"
        )));
    }
    Ok(EstimateReport {
        estimate,
        raw_logdet: estimate * n as f64,
        lower: Some(bounds.lower),
        upper: Some(bounds.upper),
        half_width,
        eps: opts.eps,
        eta: opts.eta,
        seed: opts.seed,
        method,
        n,
        m: a.off_diagonal_count(),
        levels,
        chains: jobs
            .iter()
            .filter_map(|j| {
                j.chain().map(|c| ChainReport {
                    side: j.side,
                    component: j.component,
                    chain: c.summary(),
                })
            })
            .collect(),
        degraded: degraded_reason.is_some(),
        degraded_reason,
        time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Estimate of `n^-1 ln det A` preconditioning each reduced Laplacian
/// component by a low-stretch spanning tree.
pub fn tree_logdet(a: &SymmetricSparse, opts: &EstimateOptions) -> Result<EstimateReport> {
    opts.validate()?;
    let start = Instant::now();
    let reduced = reduce(a)?;
    let (bounds, trees) = bounds_of(&reduced, opts.seed)?;
    let mut jobs = Vec::new();
    for ((side, comps), side_trees) in reduced.sides.iter().zip(trees) {
        for (c, (comp, tb)) in comps.iter().zip(side_trees).enumerate() {
            let n = comp.graph.n();
            let kind = if n <= 1 {
                JobKind::Trivial
            } else {
                JobKind::Tree {
                    factor: tree_factorize(&tb.tree, n - 1)?,
                    stretch: tb.stretch,
                }
            };
            jobs.push(Job {
                side: *side,
                component: c,
                graph: comp.graph.clone(),
                kind,
            });
        }
    }
    let (raw, levels) = run_jobs(&jobs, reduced.n, opts.eps, opts)?;
    finish(
        a,
        Method::Tree,
        opts,
        raw,
        &bounds,
        None,
        levels,
        &jobs,
        start,
    )
}

fn chain_jobs(
    reduced: &Reduced,
    seed: u64,
    graphs: Option<&[Vec<sparse_core::WeightedGraph>]>,
) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for (s, (side, comps)) in reduced.sides.iter().enumerate() {
        for (c, comp) in comps.iter().enumerate() {
            let graph = match graphs {
                Some(g) => g[s][c].clone(),
                None => comp.graph.clone(),
            };
            let kind = if graph.n() <= 1 {
                JobKind::Trivial
            } else {
                JobKind::Chain(build_chain(
                    &graph,
                    component_seed(seed, "chain", *side, c),
                )?)
            };
            jobs.push(Job {
                side: *side,
                component: c,
                graph,
                kind,
            });
        }
    }
    Ok(jobs)
}

/// Estimate of `n^-1 ln det A` through a preconditioning chain per
/// reduced Laplacian component; components below the chain's base size
/// are factored exactly.
pub fn ultra_logdet(a: &SymmetricSparse, opts: &EstimateOptions) -> Result<EstimateReport> {
    opts.validate()?;
    let start = Instant::now();
    let reduced = reduce(a)?;
    let (bounds, _) = bounds_of(&reduced, opts.seed)?;
    let jobs = chain_jobs(&reduced, opts.seed, None)?;
    let (raw, levels) = run_jobs(&jobs, reduced.n, opts.eps, opts)?;
    finish(
        a,
        Method::Ultra,
        opts,
        raw,
        &bounds,
        None,
        levels,
        &jobs,
        start,
    )
}

/// Coarse estimate (precision 1/2 per vertex) computed on spectral
/// sparsifiers of the reduced Laplacians.
///
/// Each component `G` is replaced by `H = sparsify(G, 1/16) / (1 + 1/16)`,
/// so `pld(H) <= pld(G) <= pld(H) + (n_G - 1) ln(17/15)`; the estimate
/// takes the midpoint of that interval, with `pld(H)` estimated to 1/4.
pub fn fast_inexact_logdet(a: &SymmetricSparse, opts: &EstimateOptions) -> Result<EstimateReport> {
    let opts = EstimateOptions {
        eps: FAST_INNER_EPS,
        ..*opts
    };
    opts.validate()?;
    let start = Instant::now();
    let reduced = reduce(a)?;
    let (bounds, _) = bounds_of(&reduced, opts.seed)?;
    let e = FAST_SPARSIFY_EPS;
    let width = ((1.0 + e) / (1.0 - e)).ln();
    let mut offset = 0.0;
    let mut half = 0.0;
    let mut sparse = Vec::new();
    for (side, comps) in &reduced.sides {
        let mut per_side = Vec::new();
        for (c, comp) in comps.iter().enumerate() {
            let g = &comp.graph;
            if g.n() <= 1 {
                per_side.push(g.clone());
                continue;
            }
            let h = spectral_sparsify(g, e, component_seed(opts.seed, "sparsify", *side, c))?;
            per_side.push(h.scaled(1.0 / (1.0 + e)));
            let w = (g.n() - 1) as f64 * width;
            offset += side.sign() * 0.5 * w;
            half += 0.5 * w;
        }
        sparse.push(per_side);
    }
    let jobs = chain_jobs(&reduced, opts.seed, Some(&sparse))?;
    let (raw, levels) = run_jobs(&jobs, reduced.n, opts.eps, &opts)?;
    let n = reduced.n as f64;
    finish(
        a,
        Method::Fast,
        &opts,
        raw + offset,
        &bounds,
        Some(half / n),
        levels,
        &jobs,
        start,
    )
}

/// Deterministic bounds `(lower, upper)` on `n^-1 ln det A` from exact
/// tree determinants and tree stretch of each reduced component.
pub fn logdet_bounds(a: &SymmetricSparse, seed: u64) -> Result<(f64, f64)> {
    let reduced = reduce(a)?;
    let (b, _) = bounds_of(&reduced, seed)?;
    Ok((b.lower, b.upper))
}

/// [`logdet_bounds`] as a report whose estimate is the midpoint.
pub fn bounds_report(a: &SymmetricSparse, opts: &EstimateOptions) -> Result<EstimateReport> {
    let start = Instant::now();
    let reduced = reduce(a)?;
    let (bounds, _) = bounds_of(&reduced, opts.seed)?;
    let raw = 0.5 * (bounds.lower + bounds.upper) * reduced.n as f64;
    finish(
        a,
        Method::Bounds,
        opts,
        raw,
        &bounds,
        None,
        Vec::new(),
        &[],
        start,
    )
}
