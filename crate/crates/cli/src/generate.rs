//! Test matrices of the form `L_G + s I`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use sparse_core::seed::{stream, tag};
use sparse_core::{laplacian_of, SymmetricSparse, WeightedGraph};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Grid { w: usize, h: usize },
    Torus { w: usize, h: usize },
    RandomRegular { n: usize, d: usize },
    Tree { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights {
    Unit,
    Uniform { lo: f64, hi: f64 },
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidParameter(msg.into())
}

fn pair<T: FromStr>(s: &str, sep: char, what: &str) -> Result<(T, T)> {
    let (a, b) = s
        .split_once(sep)
        .ok_or_else(|| invalid(format!("{what}: expected two values separated by '{sep}'")))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<T>()
            .map_err(|_| invalid(format!("{what}: cannot parse '{x}'")))
    };
    Ok((parse(a)?, parse(b)?))
}

/// `grid:WxH`, `torus:WxH`, `random-regular:N,D` or `tree:N`.
impl FromStr for GraphKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("graph '{s}' needs the form kind:params")))?;
        match kind {
            "grid" => pair(args, 'x', "grid").map(|(w, h)| Self::Grid { w, h }),
            "torus" => pair(args, 'x', "torus").map(|(w, h)| Self::Torus { w, h }),
            "random-regular" => {
                pair(args, ',', "random-regular").map(|(n, d)| Self::RandomRegular { n, d })
            }
            "tree" => args
                .trim()
                .parse()
                .map(|n| Self::Tree { n })
                .map_err(|_| invalid(format!("tree: cannot parse '{args}'"))),
            _ => Err(invalid(format!("unknown graph kind '{kind}'"))),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Grid { w, h } => write!(f, "grid:{w}x{h}"),
            Self::Torus { w, h } => write!(f, "torus:{w}x{h}"),
            Self::RandomRegular { n, d } => write!(f, "random-regular:{n},{d}"),
            Self::Tree { n } => write!(f, "tree:{n}"),
        }
    }
}

/// `unit` or `uniform:A,B`.
impl FromStr for Weights {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "unit" {
            return Ok(Self::Unit);
        }
        match s.split_once(':') {
            Some(("uniform", args)) => {
                pair(args, ',', "uniform").map(|(lo, hi)| Self::Uniform { lo, hi })
            }
            _ => Err(invalid(format!("unknown weights '{s}'"))),
        }
    }
}

impl Weights {
    fn validate(self) -> Result<()> {
        if let Self::Uniform { lo, hi } = self {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(invalid(format!(
                    "uniform weights need 0 < a <= b, got {lo}, {hi}"
                )));
            }
        }
        Ok(())
    }

    fn draw<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            Self::Unit => 1.0,
            Self::Uniform { lo, hi } if lo == hi => lo,
            Self::Uniform { lo, hi } => rng.random_range(lo..hi),
        }
    }
}

fn grid_edges(w: usize, h: usize, wrap: bool) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let v = r * w + c;
            if c + 1 < w {
                e.push((v, v + 1));
            } else if wrap {
                e.push((v, r * w));
            }
            if r + 1 < h {
                e.push((v, v + w));
            } else if wrap {
                e.push((v, c));
            }
        }
    }
    e
}

/// Pairs `d` stubs per vertex uniformly among the legal choices,
/// restarting whenever the pairing gets stuck.
fn regular_edges<R: Rng>(n: usize, d: usize, rng: &mut R) -> Vec<(usize, usize)> {
    'restart: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut seen = HashSet::new();
        let mut edges = Vec::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let legal = |a: usize, b: usize, seen: &HashSet<(usize, usize)>| {
                a != b && !seen.contains(&(a.min(b), a.max(b)))
            };
            let mut picked = None;
            for _ in 0..64 {
                let i = rng.random_range(0..stubs.len());
                let j = rng.random_range(0..stubs.len());
                if legal(stubs[i], stubs[j], &seen) {
                    picked = Some((i, j));
                    break;
                }
            }
            if picked.is_none() {
                let options: Vec<(usize, usize)> = (0..stubs.len())
                    .flat_map(|i| ((i + 1)..stubs.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| legal(stubs[i], stubs[j], &seen))
                    .collect();
                if options.is_empty() {
                    continue 'restart;
                }
                picked = Some(options[rng.random_range(0..options.len())]);
            }
            let (i, j) = picked.unwrap();
            let (a, b) = (stubs[i], stubs[j]);
            seen.insert((a.min(b), a.max(b)));
            edges.push((a, b));
            for k in [i.max(j), i.min(j)] {
                stubs.swap_remove(k);
            }
        }
        return edges;
    }
}

pub fn generate_graph(kind: GraphKind, weights: Weights, seed: u64) -> Result<WeightedGraph> {
    weights.validate()?;
    let mut rng = stream(seed, &[tag("generate")]);
    let (n, edges) = match kind {
        GraphKind::Grid { w, h } => {
            if w == 0 || h == 0 {
                return Err(invalid("grid sides must be positive"));
            }
            (w * h, grid_edges(w, h, false))
        }
        GraphKind::Torus { w, h } => {
            if w < 3 || h < 3 {
                return Err(invalid("torus sides must be at least 3"));
            }
            (w * h, grid_edges(w, h, true))
        }
        GraphKind::RandomRegular { n, d } => {
            if n == 0 || d == 0 || d >= n {
                return Err(invalid(format!(
                    "random-regular needs 0 < d < n, got n={n}, d={d}"
                )));
            }
            if (n * d) % 2 == 1 {
                return Err(invalid(format!(
                    "random-regular needs n*d even, got n={n}, d={d}"
                )));
            }
            (n, regular_edges(n, d, &mut rng))
        }
        GraphKind::Tree { n } => {
            if n == 0 {
                return Err(invalid("tree needs n > 0"));
            }
            let e = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            (n, e)
        }
    };
    let weighted: Vec<(usize, usize, f64)> = edges
        .into_iter()
        .map(|(u, v)| (u, v, weights.draw(&mut rng)))
        .collect();
    Ok(WeightedGraph::new(n, weighted)?)
}

/// `L_G + shift * I` for a generated graph `G`.
pub fn generate(
    kind: GraphKind,
    weights: Weights,
    shift: f64,
    seed: u64,
) -> Result<SymmetricSparse> {
    if !(shift >= 0.0 && shift.is_finite()) {
        return Err(invalid(format!("shift must be >= 0, got {shift}")));
    }
    let g = generate_graph(kind, weights, seed)?;
    let mut t = laplacian_of(&g).entries().to_vec();
    if shift > 0.0 {
        t.extend((0..g.n()).map(|i| (i, i, shift)));
    }
    Ok(SymmetricSparse::from_triplets(g.n(), &t)?)
}
