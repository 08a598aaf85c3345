//! Random road-network generators.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{DeliveryError, GeneratorKind, RoadNetwork};
use crate::seed;

pub const MIN_NODES: usize = 8;
pub const MAX_NODES: usize = 64;
pub const MAX_ATTEMPTS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Watts-Strogatz lattice degree (even).
    pub ws_neighbors: usize,
    pub ws_rewire: f64,
    pub degree_mean: f64,
    pub degree_sd: f64,
    /// Erdős–Rényi edge count as a multiple of the node count.
    pub er_edges_per_node: usize,
    pub sf_edges_per_node: usize,
    pub sf_exponent: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            ws_neighbors: 4,
            ws_rewire: 0.3,
            degree_mean: 4.0,
            degree_sd: 1.0,
            er_edges_per_node: 2,
            sf_edges_per_node: 2,
            sf_exponent: 2.0,
        }
    }
}

/// Generates a connected network, redrawing with a fresh sub-seed until the
/// graph is connected (at most [`MAX_ATTEMPTS`] draws). Generated networks
/// carry a circle layout.
pub fn generate_network(
    kind: GeneratorKind,
    n: usize,
    params: &GeneratorParams,
    rng_seed: u64,
) -> Result<RoadNetwork, DeliveryError> {
    if !(MIN_NODES..=MAX_NODES).contains(&n) {
        return Err(DeliveryError::InvalidNetwork(format!(
            "node count {n} outside [{MIN_NODES}, {MAX_NODES}]"
        )));
    }
    if kind == GeneratorKind::Manual {
        return Err(DeliveryError::InvalidNetwork("manual networks are not generated".into()));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seed::rng_from(seed::mix(rng_seed, attempt));
        let edges = match kind {
            GeneratorKind::WattsStrogatz => watts_strogatz(n, params.ws_neighbors, params.ws_rewire, &mut rng),
            GeneratorKind::ExpectedDegree => expected_degree(n, params.degree_mean, params.degree_sd, &mut rng)?,
            GeneratorKind::ErdosRenyi => erdos_renyi(n, params.er_edges_per_node * n, &mut rng),
            GeneratorKind::StaticScaleFree => {
                static_scale_free(n, params.sf_edges_per_node * n, params.sf_exponent, &mut rng)
            }
            GeneratorKind::Manual => unreachable!(),
        };
        let edges: Vec<_> = edges.into_iter().collect();
        let net = RoadNetwork::new(n, &edges, kind)?;
        if net.is_connected() {
            return Ok(net.with_circle_layout());
        }
    }
    Err(DeliveryError::GenerationFailed {
        kind,
        n,
        attempts: MAX_ATTEMPTS,
    })
}

type EdgeSet = BTreeSet<(usize, usize)>;

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Ring lattice with `k/2` neighbours per side, each lattice edge rewired to
/// a uniformly chosen new endpoint with probability `p`.
fn watts_strogatz<R: Rng>(n: usize, k: usize, p: f64, rng: &mut R) -> EdgeSet {
    let half = (k / 2).clamp(1, (n - 1) / 2);
    let mut edges = EdgeSet::new();
    for u in 0..n {
        for j in 1..=half {
            edges.insert(key(u, (u + j) % n));
        }
    }
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            if !edges.contains(&key(u, v)) || rng.random::<f64>() >= p {
                continue;
            }
            let degree = edges.iter().filter(|&&(a, b)| a == u || b == u).count();
            if degree >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !edges.contains(&key(u, w)) {
                    break w;
                }
            };
            edges.remove(&key(u, v));
            edges.insert(key(u, w));
        }
    }
    edges
}

/// Chung–Lu graph: each pair is joined with probability
/// `min(1, w_i w_j / Σw)` for expected degrees `w ~ Normal(mean, sd)`
/// clipped to `[1, n-1]`.
fn expected_degree<R: Rng>(n: usize, mean: f64, sd: f64, rng: &mut R) -> Result<EdgeSet, DeliveryError> {
    let normal = Normal::new(mean, sd)
        .map_err(|e| DeliveryError::InvalidNetwork(format!("degree distribution: {e}")))?;
    let weights: Vec<f64> = (0..n)
        .map(|_| normal.sample(rng).clamp(1.0, (n - 1) as f64))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut edges = EdgeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < (weights[i] * weights[j] / total).min(1.0) {
                edges.insert((i, j));
            }
        }
    }
    Ok(edges)
}

/// Uniform graph with exactly `m` edges (capped at the complete graph).
fn erdos_renyi<R: Rng>(n: usize, m: usize, rng: &mut R) -> EdgeSet {
    let m = m.min(n * (n - 1) / 2);
    let mut edges = EdgeSet::new();
    while edges.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.insert(key(a, b));
        }
    }
    edges
}

/// Static scale-free graph: endpoints drawn with fitness
/// `(i + offset)^(-1/(exponent-1))`, rejecting loops and multi-edges. The
/// offset follows the usual finite-size correction, which for exponent 2
/// degenerates to `offset = n`.
fn static_scale_free<R: Rng>(n: usize, m: usize, exponent: f64, rng: &mut R) -> EdgeSet {
    let m = m.min(n * (n - 1) / 2);
    let alpha = -1.0 / (exponent - 1.0);
    let mut offset = 0.0;
    if alpha < -0.5 {
        let nf = n as f64;
        let j = nf.powf(1.0 + 0.5 / alpha) * (10.0 * 2f64.sqrt() * (1.0 + alpha)).powf(-1.0 / alpha) - 1.0;
        offset = if j < nf { nf } else { j };
    }
    let fitness: Vec<f64> = (0..n).map(|i| (i as f64 + offset.max(1.0)).powf(alpha)).collect();
    let total: f64 = fitness.iter().sum();
    let cumulative: Vec<f64> = fitness
        .iter()
        .scan(0.0, |acc, f| {
            *acc += f / total;
            Some(*acc)
        })
        .collect();
    let draw = |rng: &mut R| {
        let u: f64 = rng.random();
        cumulative.iter().position(|&c| u < c).unwrap_or(n - 1)
    };
    let mut edges = EdgeSet::new();
    let max_draws = 100 * m.max(1);
    let mut draws = 0;
    while edges.len() < m && draws < max_draws {
        draws += 1;
        let a = draw(rng);
        let b = draw(rng);
        if a != b {
            edges.insert(key(a, b));
        }
    }
    edges
}
