//! Seeded generators for random instances: split systems, metrics, point
//! clouds, connected (hyper)graphs, demand vectors and valid diversities.
//! Every generator is deterministic in the supplied RNG, so suites can be
//! reproduced from a single seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diversity::{TabulatedDiversity, TabulatedMetric};
use crate::flowcut::SubsetVector;
use crate::ground::{GroundSet, Subset};
use crate::splits::SplitSystem;
use crate::zoo::{
    diameter_diversity, hypergraph_steiner_diversity, steiner_diversity, PointCloud,
    WeightedGraph, WeightedHypergraph,
};

/// Derive an independent case RNG from a suite seed and a case index.
pub fn case_rng(seed: u64, stream: u64, case: u64) -> ChaCha8Rng {
    // splitmix-style mixing keeps distinct (stream, case) pairs independent.
    let mut z = seed ^ stream.wrapping_mul(0x9e3779b97f4a7c15) ^ case.wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

pub fn random_split_system(rng: &mut impl Rng, n: usize, density: f64) -> SplitSystem {
    let ground = GroundSet::with_size(n).expect("small ground set");
    let mut sys = SplitSystem::zero(ground.clone());
    for side in ground.subsets() {
        if side.contains(0) && side != ground.full() && rng.gen::<f64>() < density {
            sys.set_lambda(side, rng.gen::<f64>() * 2.0).expect("canonical side");
        }
    }
    sys
}

pub fn random_point_cloud(rng: &mut impl Rng, n: usize, dim: usize, scale: f64) -> PointCloud {
    let ground = GroundSet::with_size(n).expect("small ground set");
    let coords = (0..n)
        .map(|_| (0..dim).map(|_| (rng.gen::<f64>() - 0.5) * 2.0 * scale).collect())
        .collect();
    PointCloud::new(ground, coords).expect("well-formed cloud")
}

/// A random metric via the ℓ1 distances of a random point cloud.
pub fn random_metric(rng: &mut impl Rng, n: usize) -> TabulatedMetric {
    let cloud = random_point_cloud(rng, n, 3, 1.0);
    crate::zoo::metric_of_cloud(&cloud, crate::zoo::l1_distance)
}

/// A connected graph: a random spanning tree plus extra random edges, with
/// weights uniform in `[w_min, w_max]`.
pub fn random_connected_graph(
    rng: &mut impl Rng,
    n: usize,
    extra_edges: usize,
    w_min: f64,
    w_max: f64,
) -> WeightedGraph {
    let ground = GroundSet::with_size(n).expect("small ground set");
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((Subset::from_indices([u, v]), w_min + rng.gen::<f64>() * (w_max - w_min)));
    }
    for _ in 0..extra_edges {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            let e = Subset::from_indices([u, v]);
            if !edges.iter().any(|&(s, _)| s == e) {
                edges.push((e, w_min + rng.gen::<f64>() * (w_max - w_min)));
            }
        }
    }
    WeightedGraph::new(ground, edges).expect("edges are valid")
}

/// A connected hypergraph: a spanning tree of 2-element edges plus random
/// hyperedges of size ≥ 2, `max_edges` total, weights in `[w_min, w_max]`.
pub fn random_connected_hypergraph(
    rng: &mut impl Rng,
    n: usize,
    max_edges: usize,
    w_min: f64,
    w_max: f64,
) -> WeightedHypergraph {
    let ground = GroundSet::with_size(n).expect("small ground set");
    let mut edges: Vec<(Subset, f64)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((Subset::from_indices([u, v]), w_min + rng.gen::<f64>() * (w_max - w_min)));
    }
    // Distinct member sets of size ≥ 2 bound how many edges can exist.
    let target = max_edges.max(n - 1).min(ground.table_len() - n - 1);
    while edges.len() < target {
        let mask = rng.gen_range(1..ground.table_len() as u32);
        let s = Subset(mask);
        if s.len() >= 2 && !edges.iter().any(|&(e, _)| e == s) {
            edges.push((s, w_min + rng.gen::<f64>() * (w_max - w_min)));
        }
    }
    WeightedHypergraph::new(ground, edges).expect("edges are valid")
}

/// A demand vector supported on `count` random subsets of size ≥ 2.
pub fn random_demands(
    rng: &mut impl Rng,
    ground: &GroundSet,
    count: usize,
    w_min: f64,
    w_max: f64,
) -> SubsetVector {
    let mut d = SubsetVector::zero(ground.clone());
    let count = count.min(ground.table_len() - ground.len() - 1);
    let mut placed = 0;
    while placed < count {
        let mask = rng.gen_range(3..ground.table_len() as u32);
        let s = Subset(mask);
        if s.len() >= 2 && d.get(s) == 0.0 {
            d.set(s, w_min + rng.gen::<f64>() * (w_max - w_min));
            placed += 1;
        }
    }
    d
}

/// A valid diversity drawn from a mixture of constructions: split systems,
/// Steiner diversities of random graphs and hypergraphs, diameter
/// diversities, and positive combinations of those.
pub fn random_valid_diversity(rng: &mut impl Rng, n: usize) -> TabulatedDiversity {
    match rng.gen_range(0..5u8) {
        0 => random_split_system(rng, n, 0.6).tabulate(),
        1 => steiner_diversity(&random_connected_graph(rng, n, n, 0.2, 2.0))
            .expect("connected by construction"),
        2 => hypergraph_steiner_diversity(&random_connected_hypergraph(rng, n, n + 2, 0.2, 2.0))
            .expect("connected by construction"),
        3 => diameter_diversity(&random_metric(rng, n)),
        _ => {
            let a = random_split_system(rng, n, 0.5).tabulate();
            let b = steiner_diversity(&random_connected_graph(rng, n, n, 0.2, 2.0))
                .expect("connected by construction");
            let alpha = 0.2 + rng.gen::<f64>();
            TabulatedDiversity::tabulate(a.ground().clone(), |s| a.get(s) + alpha * b.get(s))
        }
    }
}
