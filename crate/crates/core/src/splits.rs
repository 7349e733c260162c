//! The cut cone on a finite ground set: split systems, recovery of split
//! weights from a table by alternating superset sums, the ℓ1-embeddability
//! certificate, and the constructive chain embedding into `ℓ1^m`.
//!
//! A split system stores a symmetric weight `λ(U) = λ(V∖U)` per bipartition
//! side and evaluates to `δ(A) = Σ_U λ(U)·δ_U(A)` with `U` running over both
//! sides of every split. ℓ1-embeddable diversities are exactly these
//! evaluations, and membership is decided by two closed-form conditions on
//! the table: an alternating subset-sum identity and nonnegativity of the
//! recovered weights.

use thiserror::Error;

use crate::diversity::TabulatedDiversity;
use crate::ground::{GroundSet, Subset};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SplitError {
    #[error("{0:?} is not a valid split side (must be nonempty and proper)")]
    BadSide(Subset),
    #[error("split weight {0} must be a nonnegative finite number")]
    BadWeight(f64),
    #[error("recovered weight for {set:?} is negative ({value}); table is outside the cut cone")]
    NegativeWeight { set: Subset, value: f64 },
    #[error("recovered splits do not reproduce the table at {set:?} ({expected} vs {actual}); table is outside the cut cone")]
    NotReproduced { set: Subset, expected: f64, actual: f64 },
    #[error("cyclic part list is empty or contains an empty part")]
    BadParts,
}

/// Nonnegative weights on bipartitions of the ground set, with the symmetric
/// convention `λ(U) = λ(V∖U)`. Internally one weight is stored per split,
/// keyed by the side containing element 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSystem {
    ground: GroundSet,
    /// `lambdas[U >> 1]` for canonical sides `U` (bit 0 set, `U ≠ V`).
    lambdas: Vec<f64>,
}

impl SplitSystem {
    pub fn zero(ground: GroundSet) -> Self {
        let half = 1usize << (ground.len() - 1);
        SplitSystem { ground, lambdas: vec![0.0; half] }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    fn canonical(&self, side: Subset) -> Result<usize, SplitError> {
        self.ground.check(side).map_err(|_| SplitError::BadSide(side))?;
        if side.is_empty() || side == self.ground.full() {
            return Err(SplitError::BadSide(side));
        }
        let u = if side.contains(0) { side } else { side.complement_in(&self.ground) };
        Ok((u.0 >> 1) as usize)
    }

    /// The symmetric per-side weight of the split `{side, V∖side}`.
    pub fn lambda(&self, side: Subset) -> f64 {
        match self.canonical(side) {
            Ok(idx) => self.lambdas[idx],
            Err(_) => 0.0,
        }
    }

    /// Set the weight of a split, on both sides at once.
    pub fn set_lambda(&mut self, side: Subset, weight: f64) -> Result<(), SplitError> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(SplitError::BadWeight(weight));
        }
        let idx = self.canonical(side)?;
        self.lambdas[idx] = weight;
        Ok(())
    }

    pub fn add_lambda(&mut self, side: Subset, weight: f64) -> Result<(), SplitError> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(SplitError::BadWeight(weight));
        }
        let idx = self.canonical(side)?;
        self.lambdas[idx] += weight;
        Ok(())
    }

    /// Splits with positive weight, as (canonical side, λ) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.lambdas
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l != 0.0)
            .map(|(i, &l)| (Subset(((i as u32) << 1) | 1), l))
    }

    pub fn is_zero(&self) -> bool {
        self.lambdas.iter().all(|&l| l == 0.0)
    }

    /// `δ(A) = Σ_U λ(U)·δ_U(A)` over all subsets `U`; each split contributes
    /// twice (once per side), hence the factor 2.
    pub fn tabulate(&self) -> TabulatedDiversity {
        let ground = self.ground.clone();
        let full = ground.full();
        TabulatedDiversity::tabulate(self.ground.clone(), |s| {
            let mut total = 0.0;
            for (i, &l) in self.lambdas.iter().enumerate() {
                if l == 0.0 {
                    continue;
                }
                let side = Subset(((i as u32) << 1) | 1);
                if side != full && s.crossed_by(side, &ground) {
                    total += 2.0 * l;
                }
            }
            total
        })
    }

    /// Recover a split system from a table by the alternating superset sums,
    /// averaging the two sides and clamping float dust in `[-eps, 0)` to
    /// zero. Fails when a recovered weight is genuinely negative or when the
    /// recovered system does not reproduce the table (either way the table is
    /// not a split-system diversity).
    pub fn from_diversity(t: &TabulatedDiversity, eps: f64) -> Result<Self, SplitError> {
        let raw = raw_split_weights(t);
        let ground = t.ground().clone();
        let full = ground.full();
        let mut worst: Option<(Subset, f64)> = None;
        for (mask, &v) in raw.iter().enumerate() {
            let s = Subset(mask as u32);
            if s.is_empty() || s == full {
                continue;
            }
            if v < -eps && worst.is_none_or(|(_, w)| v < w) {
                worst = Some((s, v));
            }
        }
        if let Some((set, value)) = worst {
            return Err(SplitError::NegativeWeight { set, value });
        }
        let mut sys = SplitSystem::zero(ground.clone());
        for mask in 0..raw.len() {
            let s = Subset(mask as u32);
            if !s.contains(0) || s == full {
                continue;
            }
            let avg = 0.5 * (raw[mask] + raw[s.complement_in(&ground).0 as usize]);
            sys.set_lambda(s, avg.max(0.0))?;
        }
        let back = sys.tabulate();
        let tol = eps * (1.0 + t.max_value()) * 4.0;
        for s in ground.subsets() {
            if (back.get(s) - t.get(s)).abs() > tol {
                return Err(SplitError::NotReproduced {
                    set: s,
                    expected: t.get(s),
                    actual: back.get(s),
                });
            }
        }
        Ok(sys)
    }
}

/// The alternating superset sums `-½ Σ_{B ⊇ A} (−1)^{|B∖A|} δ(B)` for every
/// subset `A` (entries for `∅` and the full set are forced to zero). On a
/// split-system diversity this recovers the symmetric weight `λ(A)`; on
/// other tables the raw values may go negative or asymmetric.
pub fn raw_split_weights(t: &TabulatedDiversity) -> Vec<f64> {
    let n = t.ground().len();
    let table = 1usize << n;
    let mut g: Vec<f64> = t.values().to_vec();
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..table {
            if mask & b == 0 {
                g[mask] -= g[mask | b];
            }
        }
    }
    let mut out: Vec<f64> = g.iter().map(|v| -0.5 * v).collect();
    out[0] = 0.0;
    out[table - 1] = 0.0;
    out
}

/// `Σ_{B ⊆ A} (−1)^{|B|} δ(B)` for every subset `A`. Split-system
/// diversities satisfy `s[A] = δ(A)` identically.
pub fn alternating_subset_sums(t: &TabulatedDiversity) -> Vec<f64> {
    let n = t.ground().len();
    let table = 1usize << n;
    let mut h: Vec<f64> = t
        .values()
        .iter()
        .enumerate()
        .map(|(m, &v)| if (m.count_ones() & 1) == 1 { -v } else { v })
        .collect();
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..table {
            if mask & b != 0 {
                h[mask] += h[mask ^ b];
            }
        }
    }
    h
}

/// Why a table fails the ℓ1-embeddability conditions.
#[derive(Clone, Debug, PartialEq)]
pub enum ConeViolation {
    /// The alternating subset-sum identity fails at `set`.
    AlternatingIdentity { set: Subset, table_value: f64, sum_value: f64 },
    /// A recovered split weight is negative at `set`.
    NegativeWeight { set: Subset, value: f64 },
}

/// Outcome of the embeddability decision: either a split system that
/// reproduces the table, or the first violated condition.
#[derive(Clone, Debug)]
pub enum L1Certificate {
    Embeddable(SplitSystem),
    NotEmbeddable(ConeViolation),
}

impl L1Certificate {
    pub fn is_embeddable(&self) -> bool {
        matches!(self, L1Certificate::Embeddable(_))
    }

    pub fn witness(&self) -> Option<&SplitSystem> {
        match self {
            L1Certificate::Embeddable(s) => Some(s),
            L1Certificate::NotEmbeddable(_) => None,
        }
    }
}

/// Decide ℓ1-embeddability of a valid diversity by the two closed-form
/// conditions: the alternating identity on every subset, and nonnegativity
/// of the recovered split weights on every proper nonempty subset.
pub fn l1_certificate(t: &TabulatedDiversity, eps: f64) -> L1Certificate {
    let sums = alternating_subset_sums(t);
    let mut worst: Option<(Subset, f64)> = None;
    for s in t.ground().subsets() {
        let gap = (sums[s.0 as usize] - t.get(s)).abs();
        if gap > eps && worst.is_none_or(|(_, w)| gap > w) {
            worst = Some((s, gap));
        }
    }
    if let Some((set, _)) = worst {
        return L1Certificate::NotEmbeddable(ConeViolation::AlternatingIdentity {
            set,
            table_value: t.get(set),
            sum_value: sums[set.0 as usize],
        });
    }
    match SplitSystem::from_diversity(t, eps) {
        Ok(sys) => L1Certificate::Embeddable(sys),
        Err(SplitError::NegativeWeight { set, value }) => {
            L1Certificate::NotEmbeddable(ConeViolation::NegativeWeight { set, value })
        }
        Err(SplitError::NotReproduced { set, expected, actual }) => {
            L1Certificate::NotEmbeddable(ConeViolation::AlternatingIdentity {
                set,
                table_value: expected,
                sum_value: actual,
            })
        }
        Err(e) => unreachable!("from_diversity only fails into the cone errors: {e}"),
    }
}

/// An isometric embedding of a split-system diversity into the ℓ1 diversity
/// of `ℝ^m`, one coordinate vector per ground element.
#[derive(Clone, Debug)]
pub struct L1Embedding {
    pub ground: GroundSet,
    pub anchor: usize,
    pub coords: Vec<Vec<f64>>,
}

impl L1Embedding {
    pub fn dim(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }
}

/// Embed a split system into `ℓ1^m` with `m = C(n−1, ⌊(n−1)/2⌋)`.
///
/// Split sides containing the anchor are identified with subsets of the
/// remaining `n−1` elements; a symmetric chain decomposition of that Boolean
/// lattice (the bracketing construction) groups the splits into chains, and
/// each chain contributes one coordinate: element `x` gets the total weight
/// of the chain's splits whose anchor side excludes `x`. Nesting within a
/// chain makes each coordinate's range reproduce the chain's share of the
/// diversity, so the map is isometric.
pub fn chain_embedding(sys: &SplitSystem, anchor: usize) -> L1Embedding {
    let ground = sys.ground().clone();
    let n = ground.len();
    assert!(anchor < n, "anchor must be a ground element");
    let others: Vec<usize> = (0..n).filter(|&i| i != anchor).collect();
    let k = others.len();
    let chains = symmetric_chains(k);
    let m = chains.chain_count;

    let mut coords = vec![vec![0.0; m]; n];
    for w in 0..(1usize << k) {
        // Anchor side of the split: anchor plus the positions in w.
        let mut side = Subset::singleton(anchor);
        for (pos, &elt) in others.iter().enumerate() {
            if w & (1 << pos) != 0 {
                side = side.insert(elt);
            }
        }
        if side == ground.full() {
            continue; // trivial split, weight 0 by construction
        }
        let total = 2.0 * sys.lambda(side); // both sides of the split
        if total == 0.0 {
            continue;
        }
        let chain = chains.chain_of[w];
        for (pos, &elt) in others.iter().enumerate() {
            if w & (1 << pos) == 0 {
                coords[elt][chain] += total;
            }
        }
    }
    L1Embedding { ground, anchor, coords }
}

/// A symmetric chain decomposition of the Boolean lattice on `k` positions,
/// via parenthesis matching: position bits read as '(' for 0 and ')' for 1;
/// matched pairs are frozen and the unmatched positions (always a block of
/// ones followed by zeros) slide from all-zero to all-one along the chain.
struct ChainDecomposition {
    chain_of: Vec<usize>,
    chain_count: usize,
}

fn symmetric_chains(k: usize) -> ChainDecomposition {
    let size = 1usize << k;
    let mut chain_of = vec![usize::MAX; size];
    let mut rep_id = vec![usize::MAX; size];
    let mut count = 0;
    let mut stack: Vec<usize> = Vec::with_capacity(k);
    for w in 0..size {
        // Match parentheses; the unmatched ones are cleared to find the
        // chain's bottom element, which names the chain.
        stack.clear();
        let mut bottom = w;
        for pos in 0..k {
            if w & (1 << pos) == 0 {
                stack.push(pos);
            } else if stack.pop().is_none() {
                bottom &= !(1 << pos); // unmatched ')': free position
            }
        }
        if rep_id[bottom] == usize::MAX {
            rep_id[bottom] = count;
            count += 1;
        }
        chain_of[w] = rep_id[bottom];
    }
    ChainDecomposition { chain_of, chain_count: count }
}

/// Result of the cyclic ℓ1 inequality check
/// `δ(⋃ parts) ≤ ½ Σ_i δ(A_i ∪ A_{i+1 mod p})`.
#[derive(Clone, Debug)]
pub struct CyclicCheck {
    pub union_value: f64,
    pub bound: f64,
    /// `bound − union_value`; nonnegative when the inequality holds.
    pub slack: f64,
}

impl CyclicCheck {
    pub fn holds(&self, eps: f64) -> bool {
        self.slack >= -eps
    }
}

/// Check the cyclic inequality satisfied by every ℓ1-embeddable diversity.
/// A single part is read as the two-term cycle `(A₁, A₁)`.
pub fn cyclic_bound(
    t: &TabulatedDiversity,
    parts: &[Subset],
) -> Result<CyclicCheck, SplitError> {
    if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(SplitError::BadParts);
    }
    let mut union = Subset::EMPTY;
    for &p in parts {
        union = union.union(p);
    }
    let bound = if parts.len() == 1 {
        t.get(parts[0])
    } else {
        0.5 * (0..parts.len())
            .map(|i| t.get(parts[i].union(parts[(i + 1) % parts.len()])))
            .sum::<f64>()
    };
    let union_value = t.get(union);
    Ok(CyclicCheck { union_value, bound, slack: bound - union_value })
}

/// Worst slack of `Σ_{i<j∈A} d(a_i,a_j) − (|A|−1)·δ(A)` over all subsets
/// with at least two elements, where `d` is the induced metric. Nonnegative
/// for every ℓ1-embeddable diversity; pairs always sit at slack zero.
#[derive(Clone, Debug)]
pub struct PairwiseSumSlack {
    pub min_slack: f64,
    pub witness: Subset,
}

pub fn pairwise_sum_slack(t: &TabulatedDiversity) -> PairwiseSumSlack {
    let n = t.ground().len();
    let table = 1usize << n;
    // pair_sum[s] = sum of induced distances over unordered pairs inside s
    let mut pair_sum = vec![0.0f64; table];
    for mask in 1..table {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let i = low.trailing_zeros() as usize;
        let mut add = 0.0;
        for j in Subset(rest as u32).iter() {
            add += t.get(Subset::from_indices([i, j]));
        }
        pair_sum[mask] = pair_sum[rest] + add;
    }
    let mut min_slack = f64::INFINITY;
    let mut witness = Subset::EMPTY;
    for s in t.ground().subsets() {
        if s.len() < 2 {
            continue;
        }
        let slack = pair_sum[s.0 as usize] - (s.len() as f64 - 1.0) * t.get(s);
        if slack < min_slack {
            min_slack = slack;
            witness = s;
        }
    }
    PairwiseSumSlack { min_slack, witness }
}
