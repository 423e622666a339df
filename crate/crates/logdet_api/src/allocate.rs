use trace_estimator::{empirical_bias, truncation_for_bias};

/// What the empirical plan of one run depends on.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RunCost {
    pub dim: usize,
    pub delta: f64,
    /// Pilot standard deviation of the per-sample values.
    pub std: f64,
    /// Normal quantile for the run's failure probability.
    pub z: f64,
    /// Samples already drawn by the pilot.
    pub floor: usize,
    /// Provisional precision; the result never goes below a quarter of it.
    pub eps0: f64,
}

/// Grid of candidate precisions, as multiples of `eps0`.
const STEPS_PER_OCTAVE: i32 = 8;
const LOWEST: i32 = -2 * STEPS_PER_OCTAVE;
const HIGHEST: i32 = 5 * STEPS_PER_OCTAVE;

impl RunCost {
    /// Power steps of the empirical plan at per-dimension precision `eps`,
    /// weighted by the dimension.
    fn work(&self, eps: f64) -> f64 {
        let bias = empirical_bias(eps, self.delta);
        let l = truncation_for_bias(bias, self.delta) as f64;
        let p = (self.z * self.std / (eps - bias)).powi(2).ceil();
        self.dim as f64 * l * p.max(self.floor as f64)
    }
}

/// Per-dimension precisions `eps_i` with `sum dim_i eps_i = total` that
/// approximately minimize the total work of the runs.
///
/// Each run picks from a geometric grid the point minimizing
/// `work_i + mu dim_i eps_i`; `mu` is bisected until the budget is met,
/// and any budget left by the grid is then spread proportionally.
pub(crate) fn allocate(runs: &[RunCost], total: f64) -> Vec<f64> {
    if runs.is_empty() {
        return Vec::new();
    }
    let tables: Vec<Vec<(f64, f64)>> = runs
        .iter()
        .map(|r| {
            (LOWEST..=HIGHEST)
                .map(|k| {
                    let eps = r.eps0 * 2f64.powf(k as f64 / STEPS_PER_OCTAVE as f64);
                    (eps, r.work(eps))
                })
                .collect()
        })
        .collect();
    let choose = |mu: f64| -> Vec<f64> {
        runs.iter()
            .zip(&tables)
            .map(|(r, t)| {
                t.iter()
                    .min_by(|a, b| {
                        let ca = a.1 + mu * r.dim as f64 * a.0;
                        let cb = b.1 + mu * r.dim as f64 * b.0;
                        ca.total_cmp(&cb)
                    })
                    .expect("nonempty grid")
                    .0
            })
            .collect()
    };
    let used = |e: &[f64]| -> f64 { runs.iter().zip(e).map(|(r, e)| r.dim as f64 * e).sum() };
    // The budget shrinks as mu grows; find the smallest mu that fits.
    let (mut lo, mut hi) = (-80.0f64, 80.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(&choose(mid.exp())) <= total {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let eps = choose(hi.exp());
    let scale = total / used(&eps);
    eps.into_iter().map(|e| e * scale).collect()
}
