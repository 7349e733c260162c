//! Constructors that tabulate the standard diversity families on a finite
//! ground set: diameter, ℓ1, cut, graph/hypergraph Steiner, phylogenetic,
//! travelling-salesman, measure, segregation and mean-width diversities.
//!
//! Everything here is exact except [`mean_width_diversity`], which is a
//! seeded Monte Carlo estimate of a sphere integral. Steiner values are
//! computed by brute-force enumeration of edge subsets so they can serve as
//! oracles for the LP machinery; the edge count is capped accordingly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diversity::{TabulatedDiversity, TabulatedMetric};
use crate::ground::{GroundSet, Subset};

/// Cap on edge counts for the exact Steiner enumeration (`2^|E|` subsets).
pub const MAX_STEINER_EDGES: usize = 20;
/// Cap on ground-set size for exact tour enumeration (`(|A|-1)!/2` tours).
pub const MAX_TOUR_POINTS: usize = 10;
/// Cap on atom count of a finite measure space (atom sets are `u64` masks).
pub const MAX_ATOMS: usize = 64;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ZooError {
    #[error("edge {0:?} does not have the required cardinality")]
    BadEdge(Subset),
    #[error("negative or non-finite weight {weight} on edge {edge:?}")]
    BadWeight { edge: Subset, weight: f64 },
    #[error("no connected edge family covers {set:?}; the (hyper)graph is disconnected there")]
    Disconnected { set: Subset },
    #[error("{got} edges exceed the exact-enumeration cap of {cap}")]
    TooManyEdges { got: usize, cap: usize },
    #[error("{got} points exceed the tour-enumeration cap of {cap}")]
    TooManyPoints { got: usize, cap: usize },
    #[error("point cloud is empty or has mismatched dimensions")]
    BadPointCloud,
    #[error("measure space invalid: {0}")]
    BadMeasure(String),
    #[error("random family invalid: {0}")]
    BadFamily(String),
    #[error("tree invalid: {0}")]
    BadTree(String),
    #[error("Monte Carlo sample count must be at least 1")]
    NoSamples,
}

// ---------------------------------------------------------------------------
// Input structures
// ---------------------------------------------------------------------------

/// An edge-weighted graph on the ground set. Edges are 2-element subsets.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    ground: GroundSet,
    edges: Vec<(Subset, f64)>,
}

impl WeightedGraph {
    pub fn new(ground: GroundSet, edges: Vec<(Subset, f64)>) -> Result<Self, ZooError> {
        for &(e, w) in &edges {
            if e.len() != 2 || ground.check(e).is_err() {
                return Err(ZooError::BadEdge(e));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(ZooError::BadWeight { edge: e, weight: w });
            }
        }
        Ok(WeightedGraph { ground, edges })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn edges(&self) -> &[(Subset, f64)] {
        &self.edges
    }

    /// Complete graph realizing a metric: edge `{i,j}` weighted `d(i,j)`.
    pub fn complete_from_metric(m: &TabulatedMetric) -> Result<Self, ZooError> {
        let n = m.ground().len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((Subset::from_indices([i, j]), m.get(i, j)));
            }
        }
        WeightedGraph::new(m.ground().clone(), edges)
    }
}

/// A capacity-weighted hypergraph. Edges have at least two members;
/// duplicate member sets are allowed (capacities add where that matters).
#[derive(Clone, Debug)]
pub struct WeightedHypergraph {
    ground: GroundSet,
    edges: Vec<(Subset, f64)>,
}

impl WeightedHypergraph {
    pub fn new(ground: GroundSet, edges: Vec<(Subset, f64)>) -> Result<Self, ZooError> {
        for &(e, w) in &edges {
            if e.len() < 2 || ground.check(e).is_err() {
                return Err(ZooError::BadEdge(e));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(ZooError::BadWeight { edge: e, weight: w });
            }
        }
        Ok(WeightedHypergraph { ground, edges })
    }

    pub fn from_graph(g: &WeightedGraph) -> Self {
        WeightedHypergraph { ground: g.ground.clone(), edges: g.edges.clone() }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn edges(&self) -> &[(Subset, f64)] {
        &self.edges
    }
}

/// A finite atomic measure space: atom `i` has mass `masses[i]`.
#[derive(Clone, Debug)]
pub struct FiniteMeasureSpace {
    masses: Vec<f64>,
}

impl FiniteMeasureSpace {
    pub fn new(masses: Vec<f64>) -> Result<Self, ZooError> {
        if masses.is_empty() || masses.len() > MAX_ATOMS {
            return Err(ZooError::BadMeasure(format!(
                "atom count {} outside 1..={MAX_ATOMS}",
                masses.len()
            )));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(ZooError::BadMeasure("atom masses must be nonnegative".into()));
        }
        Ok(FiniteMeasureSpace { masses })
    }

    pub fn atoms(&self) -> usize {
        self.masses.len()
    }

    pub fn measure(&self, atom_mask: u64) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .filter(|(i, _)| atom_mask & (1 << i) != 0)
            .map(|(_, m)| m)
            .sum()
    }
}

/// A finite family of jointly distributed discrete variables, one per ground
/// element, given by outcomes: each outcome has a probability and one state
/// id per element.
#[derive(Clone, Debug)]
pub struct DiscreteRandomFamily {
    outcomes: Vec<(f64, Vec<u32>)>,
}

impl DiscreteRandomFamily {
    pub fn new(n: usize, outcomes: Vec<(f64, Vec<u32>)>, eps: f64) -> Result<Self, ZooError> {
        let mut total = 0.0;
        for (p, states) in &outcomes {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(ZooError::BadFamily("probabilities must be nonnegative".into()));
            }
            if states.len() != n {
                return Err(ZooError::BadFamily(format!(
                    "outcome assigns {} states, expected {n}",
                    states.len()
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > eps {
            return Err(ZooError::BadFamily(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DiscreteRandomFamily { outcomes })
    }
}

/// Points in `ℝ^k`, one per ground element.
#[derive(Clone, Debug)]
pub struct PointCloud {
    ground: GroundSet,
    dim: usize,
    coords: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(ground: GroundSet, coords: Vec<Vec<f64>>) -> Result<Self, ZooError> {
        if coords.len() != ground.len() {
            return Err(ZooError::BadPointCloud);
        }
        let dim = coords.first().map_or(0, Vec::len);
        if dim == 0 || coords.iter().any(|c| c.len() != dim) {
            return Err(ZooError::BadPointCloud);
        }
        if coords.iter().flatten().any(|x| !x.is_finite()) {
            return Err(ZooError::BadPointCloud);
        }
        Ok(PointCloud { ground, dim, coords })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    /// `±e_1, …, ±e_k`: the cloud where the ℓ1 diversity of the full set is
    /// exactly `k` times its ℓ1 diameter.
    pub fn signed_units(k: usize) -> Result<Self, ZooError> {
        let ground = GroundSet::new(
            (0..k).flat_map(|i| [format!("p{i}"), format!("m{i}")]),
        )
        .expect("valid labels");
        let mut coords = Vec::with_capacity(2 * k);
        for i in 0..k {
            for sign in [1.0, -1.0] {
                let mut v = vec![0.0; k];
                v[i] = sign;
                coords.push(v);
            }
        }
        PointCloud::new(ground, coords)
    }
}

/// A tree with weighted edges whose nodes carry the ground-set elements
/// (several elements may share a node; internal nodes may be unlabeled).
#[derive(Clone, Debug)]
pub struct PhyloTree {
    node_count: usize,
    edges: Vec<(usize, usize, f64)>,
    /// node index for each ground element
    labels: Vec<usize>,
    ground: GroundSet,
}

impl PhyloTree {
    pub fn new(
        ground: GroundSet,
        node_count: usize,
        edges: Vec<(usize, usize, f64)>,
        labels: Vec<usize>,
    ) -> Result<Self, ZooError> {
        if node_count == 0 {
            return Err(ZooError::BadTree("tree must have at least one node".into()));
        }
        if edges.len() + 1 != node_count {
            return Err(ZooError::BadTree(format!(
                "{} edges on {} nodes cannot be a tree",
                edges.len(),
                node_count
            )));
        }
        for &(a, b, w) in &edges {
            if a >= node_count || b >= node_count || a == b {
                return Err(ZooError::BadTree(format!("edge ({a},{b}) references bad nodes")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(ZooError::BadTree(format!("edge ({a},{b}) has weight {w}")));
            }
        }
        if labels.len() != ground.len() || labels.iter().any(|&v| v >= node_count) {
            return Err(ZooError::BadTree("every ground element must map to one node".into()));
        }
        // Connectivity; acyclicity follows from the edge count.
        let mut adj = vec![Vec::new(); node_count];
        for (i, &(a, b, _)) in edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        let mut seen = vec![false; node_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(u, _) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(ZooError::BadTree("tree is not connected".into()));
        }
        Ok(PhyloTree { node_count, edges, labels, ground })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// `δ(A) = max_{a,b∈A} d(a,b)`.
pub fn diameter_diversity(m: &TabulatedMetric) -> TabulatedDiversity {
    TabulatedDiversity::tabulate(m.ground().clone(), |s| {
        let members: Vec<usize> = s.iter().collect();
        let mut best = 0.0f64;
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                best = best.max(m.get(i, j));
            }
        }
        best
    })
}

/// `δ(A) =` sum over coordinates of the coordinate range of `A`.
pub fn l1_diversity(p: &PointCloud) -> TabulatedDiversity {
    TabulatedDiversity::tabulate(p.ground().clone(), |s| {
        (0..p.dim)
            .map(|c| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in s.iter() {
                    lo = lo.min(p.coords[i][c]);
                    hi = hi.max(p.coords[i][c]);
                }
                hi - lo
            })
            .sum()
    })
}

/// The ℓ1 metric between two rows of a point cloud.
pub fn l1_distance(p: &PointCloud, i: usize, j: usize) -> f64 {
    (0..p.dim).map(|c| (p.coords[i][c] - p.coords[j][c]).abs()).sum()
}

/// The Euclidean metric between two rows of a point cloud.
pub fn l2_distance(p: &PointCloud, i: usize, j: usize) -> f64 {
    (0..p.dim).map(|c| (p.coords[i][c] - p.coords[j][c]).powi(2)).sum::<f64>().sqrt()
}

/// Metric table of a point cloud under the given pairwise distance.
pub fn metric_of_cloud(
    p: &PointCloud,
    dist: impl Fn(&PointCloud, usize, usize) -> f64,
) -> TabulatedMetric {
    let n = p.ground().len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i * n + j] = dist(p, i, j);
            }
        }
    }
    TabulatedMetric::new(p.ground().clone(), d, 1e-12).expect("pairwise distances form a metric")
}

/// `δ_U(A) = 1` iff the bipartition `{U, V∖U}` cuts `A` in two.
pub fn cut_diversity(ground: &GroundSet, side: Subset) -> TabulatedDiversity {
    let g = ground.clone();
    TabulatedDiversity::tabulate(ground.clone(), move |s| {
        if s.crossed_by(side, &g) {
            1.0
        } else {
            0.0
        }
    })
}

/// Minimum Steiner tree weight in a graph, per subset. Exact.
pub fn steiner_diversity(g: &WeightedGraph) -> Result<TabulatedDiversity, ZooError> {
    steiner_from_edges(g.ground(), g.edges())
}

/// Minimum weight of a connected covering sub-hypergraph, per subset. Exact
/// by enumeration over edge subsets; `|E|` capped at [`MAX_STEINER_EDGES`].
pub fn hypergraph_steiner_diversity(
    h: &WeightedHypergraph,
) -> Result<TabulatedDiversity, ZooError> {
    steiner_from_edges(h.ground(), h.edges())
}

/// Steiner diversity of the complete graph realizing a metric: the maximal
/// diversity whose induced metric is dominated by `m`.
pub fn steiner_of_metric(m: &TabulatedMetric) -> Result<TabulatedDiversity, ZooError> {
    steiner_diversity(&WeightedGraph::complete_from_metric(m)?)
}

fn steiner_from_edges(
    ground: &GroundSet,
    edges: &[(Subset, f64)],
) -> Result<TabulatedDiversity, ZooError> {
    let m = edges.len();
    if m > MAX_STEINER_EDGES {
        return Err(ZooError::TooManyEdges { got: m, cap: MAX_STEINER_EDGES });
    }
    let table = ground.table_len();
    // best[span] = least weight of a connected edge family with that span
    let mut best = vec![f64::INFINITY; table];
    best[0] = 0.0;

    let mut dsu = Dsu::new(ground.len());
    for choice in 1u32..(1 << m) {
        let mut weight = 0.0;
        let mut span = Subset::EMPTY;
        dsu.reset();
        for e in Subset(choice).iter() {
            let (members, w) = edges[e];
            weight += w;
            span = span.union(members);
            let mut it = members.iter();
            let first = it.next().expect("edges have >= 2 members");
            for v in it {
                dsu.union(first, v);
            }
        }
        if weight >= best[span.0 as usize] {
            continue;
        }
        let mut members = span.iter();
        let root = dsu.find(members.next().expect("span nonempty"));
        if members.all(|v| dsu.find(v) == root) {
            best[span.0 as usize] = weight;
        }
    }

    // δ(A) = min over spans ⊇ A.
    for bit in 0..ground.len() {
        for mask in 0..table {
            if mask & (1 << bit) == 0 {
                let sup = best[mask | (1 << bit)];
                if sup < best[mask] {
                    best[mask] = sup;
                }
            }
        }
    }

    for mask in 0..table {
        if Subset(mask as u32).len() >= 2 && !best[mask].is_finite() {
            return Err(ZooError::Disconnected { set: Subset(mask as u32) });
        }
    }
    Ok(TabulatedDiversity::tabulate(ground.clone(), |s| best[s.0 as usize]))
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Total weight of the minimal subtree spanning the nodes labeled by each
/// subset.
pub fn phylogenetic_diversity(t: &PhyloTree) -> TabulatedDiversity {
    // Root at node 0; compute a parent order once.
    let mut adj = vec![Vec::new(); t.node_count];
    for &(a, b, w) in &t.edges {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let mut parent: Vec<Option<(usize, f64)>> = vec![None; t.node_count];
    let mut order = Vec::with_capacity(t.node_count);
    let mut stack = vec![0usize];
    let mut seen = vec![false; t.node_count];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(u, w) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                parent[u] = Some((v, w));
                stack.push(u);
            }
        }
    }

    TabulatedDiversity::tabulate(t.ground.clone(), |s| {
        let mut marked = vec![0u32; t.node_count];
        let mut distinct = 0u32;
        for i in s.iter() {
            if marked[t.labels[i]] == 0 {
                distinct += 1;
            }
            marked[t.labels[i]] = 1;
        }
        if distinct <= 1 {
            return 0.0;
        }
        // Count marked nodes in each subtree; an edge joins the spanning
        // subtree iff its child side holds some but not all marked nodes.
        let mut below = marked.clone();
        let mut total = 0.0;
        for &v in order.iter().rev() {
            if let Some((p, w)) = parent[v] {
                if below[v] > 0 && below[v] < distinct {
                    total += w;
                }
                below[p] += below[v];
            }
        }
        total
    })
}

/// Half the minimum closed-tour length through each subset, by exhaustive
/// tour enumeration. `n` capped at [`MAX_TOUR_POINTS`].
pub fn tsp_diversity(m: &TabulatedMetric) -> Result<TabulatedDiversity, ZooError> {
    let n = m.ground().len();
    if n > MAX_TOUR_POINTS {
        return Err(ZooError::TooManyPoints { got: n, cap: MAX_TOUR_POINTS });
    }
    Ok(TabulatedDiversity::tabulate(m.ground().clone(), |s| {
        let members: Vec<usize> = s.iter().collect();
        match members.len() {
            0 | 1 => 0.0,
            2 => m.get(members[0], members[1]),
            _ => {
                // Fix the first element against rotations; orientation is
                // halved by requiring the second element below the last.
                let first = members[0];
                let mut rest: Vec<usize> = members[1..].to_vec();
                let mut best = f64::INFINITY;
                permute(&mut rest, 0, &mut |tour: &[usize]| {
                    if tour[0] > tour[tour.len() - 1] {
                        return;
                    }
                    let mut len = m.get(first, tour[0]) + m.get(tour[tour.len() - 1], first);
                    for w in tour.windows(2) {
                        len += m.get(w[0], w[1]);
                    }
                    best = best.min(len);
                });
                best / 2.0
            }
        }
    }))
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// `δ(A) = μ(⋃ E_i) − μ(⋂ E_i)` over the atom sets attached to `A`'s
/// elements. `atom_sets[i]` is a bitmask over the atoms of `space`.
pub fn measure_diversity(
    space: &FiniteMeasureSpace,
    atom_sets: &[u64],
    ground: &GroundSet,
) -> Result<TabulatedDiversity, ZooError> {
    if atom_sets.len() != ground.len() {
        return Err(ZooError::BadMeasure("one atom set per ground element required".into()));
    }
    if space.atoms() < MAX_ATOMS {
        let limit = 1u64 << space.atoms();
        if atom_sets.iter().any(|&s| s >= limit) {
            return Err(ZooError::BadMeasure("atom set references unknown atoms".into()));
        }
    }
    let sets = atom_sets.to_vec();
    let sp = space.clone();
    Ok(TabulatedDiversity::tabulate(ground.clone(), move |s| {
        let mut union = 0u64;
        let mut inter = u64::MAX;
        for i in s.iter() {
            union |= sets[i];
            inter &= sets[i];
        }
        sp.measure(union) - sp.measure(inter)
    }))
}

/// `δ(A) =` probability that the variables of `A` do not all share a state.
pub fn segregation_diversity(
    f: &DiscreteRandomFamily,
    ground: &GroundSet,
) -> Result<TabulatedDiversity, ZooError> {
    if f.outcomes.iter().any(|(_, states)| states.len() != ground.len()) {
        return Err(ZooError::BadFamily("outcome arity does not match ground set".into()));
    }
    let outcomes = f.outcomes.clone();
    Ok(TabulatedDiversity::tabulate(ground.clone(), move |s| {
        outcomes
            .iter()
            .filter(|(_, states)| {
                let mut it = s.iter();
                let first = states[it.next().expect("len >= 2")];
                it.any(|i| states[i] != first)
            })
            .map(|(p, _)| p)
            .sum()
    }))
}

/// `π / B(k/2, 1/2)`: the normalization that makes the mean-width diversity
/// induce the Euclidean metric. Exact for integer `k` via the half-integer
/// gamma recursion.
pub fn mean_width_factor(k: usize) -> f64 {
    // ln Γ(m/2) for m ≥ 1
    fn ln_gamma_half(m: usize) -> f64 {
        let mut acc = if m % 2 == 1 { 0.5 * std::f64::consts::PI.ln() } else { 0.0 };
        let mut v = if m % 2 == 1 { 1 } else { 2 }; // Γ(1/2)=√π, Γ(1)=1
        while v < m {
            acc += (v as f64 / 2.0).ln();
            v += 2;
        }
        acc
    }
    let ln_beta = ln_gamma_half(k) + ln_gamma_half(1) - ln_gamma_half(k + 1);
    std::f64::consts::PI / ln_beta.exp()
}

/// Monte Carlo mean-width diversity: `δ(A) ≈ π/B(k/2,1/2)` times the mean
/// over uniform unit directions of the width of `A` in that direction.
/// Deterministic for a fixed seed.
///
/// Each direction contributes a 1-dimensional diameter diversity, so the
/// returned table satisfies the diversity axioms up to rounding even at low
/// sample counts; only the absolute scale carries Monte Carlo error.
pub fn mean_width_diversity(
    p: &PointCloud,
    samples: usize,
    seed: u64,
) -> Result<TabulatedDiversity, ZooError> {
    if samples == 0 {
        return Err(ZooError::NoSamples);
    }
    let n = p.ground().len();
    let table = p.ground().table_len();
    let mut acc = vec![0.0f64; table];
    let mut proj = vec![0.0f64; n];
    let mut hi = vec![0.0f64; table];
    let mut lo = vec![0.0f64; table];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = GaussianSource::default();

    for _ in 0..samples {
        // Uniform unit direction: normalized Gaussian vector.
        let mut u = vec![0.0f64; p.dim];
        loop {
            let mut norm2 = 0.0;
            for x in u.iter_mut() {
                *x = gauss.next(&mut rng);
                norm2 += *x * *x;
            }
            if norm2 > 1e-300 {
                let inv = norm2.sqrt().recip();
                u.iter_mut().for_each(|x| *x *= inv);
                break;
            }
        }
        for i in 0..n {
            proj[i] = (0..p.dim).map(|c| p.coords[i][c] * u[c]).sum();
        }
        // Subset ranges by sharing the low-bit split.
        for mask in 1..table {
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let v = proj[low.trailing_zeros() as usize];
            if rest == 0 {
                hi[mask] = v;
                lo[mask] = v;
            } else {
                hi[mask] = hi[rest].max(v);
                lo[mask] = lo[rest].min(v);
            }
            acc[mask] += hi[mask] - lo[mask];
        }
    }

    let factor = mean_width_factor(p.dim) / samples as f64;
    Ok(TabulatedDiversity::tabulate(p.ground().clone(), |s| acc[s.0 as usize] * factor))
}

/// Box–Muller pairs over a uniform stream.
#[derive(Default)]
struct GaussianSource {
    spare: Option<f64>,
}

impl GaussianSource {
    fn next(&mut self, rng: &mut impl Rng) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}
