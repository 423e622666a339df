use rand::Rng;
use rand_distr::{Binomial, Distribution};
use sparse_core::seed::{stream, tag};
use sparse_core::WeightedGraph;
use stretch::approx_effective_resistances;

use crate::error::{require_connected, Result, SparsifyError};

/// Precision of the resistance sketch behind the sampling probabilities.
pub const SKETCH_EPS: f64 = 0.5;
pub const MAX_ATTEMPTS: usize = 5;

/// Samples drawn by [`spectral_sparsify`]: `ceil(9 n ln n / eps^2)`.
pub fn sample_count(n: usize, eps: f64) -> usize {
    (9.0 * n as f64 * (n as f64).ln() / (eps * eps)).ceil() as usize
}

/// Draws multinomial counts for `q` trials over probabilities `p`.
fn multinomial<R: Rng>(q: usize, p: &[f64], rng: &mut R) -> Vec<u64> {
    let mut left = q as u64;
    let mut mass = 1.0;
    let mut out = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        let c = if i + 1 == p.len() || pi >= mass {
            left
        } else {
            let prob = (pi / mass).clamp(0.0, 1.0);
            Binomial::new(left, prob)
                .expect("valid binomial")
                .sample(rng)
        };
        out[i] = c;
        left -= c;
        mass -= pi;
    }
    out
}

/// Importance-samples `ceil(9 n ln n / eps^2)` edges with probability
/// proportional to `w_e R(e)` and reweights them to be unbiased.
pub fn spectral_sparsify(g: &WeightedGraph, eps: f64, seed: u64) -> Result<WeightedGraph> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SparsifyError::InvalidParameter(format!(
            "eps = {eps} must lie in (0, 1)"
        )));
    }
    require_connected(g)?;
    if g.m() <= 1 {
        return Ok(g.clone());
    }
    let sketch = approx_effective_resistances(g, SKETCH_EPS, seed)?;
    let scores: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| e.w * sketch.query(e.u, e.v))
        .collect();
    let total: f64 = scores.iter().sum();
    let p: Vec<f64> = scores.iter().map(|s| s / total).collect();
    let q = sample_count(g.n(), eps);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(seed, &[tag("spectral-sparsify"), attempt as u64]);
        let counts = multinomial(q, &p, &mut rng);
        let h = WeightedGraph::new(
            g.n(),
            g.edges()
                .iter()
                .zip(&counts)
                .zip(&p)
                .filter(|((_, &c), _)| c > 0)
                .map(|((e, &c), &pe)| (e.u, e.v, e.w * (c as f64 / q as f64) / pe)),
        )?;
        if h.is_connected() {
            return Ok(h);
        }
    }
    Err(SparsifyError::SparsificationFailed {
        attempts: MAX_ATTEMPTS,
    })
}
