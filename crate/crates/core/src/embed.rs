//! Minimal-distortion approximation of a diversity by an ℓ1-embeddable one.
//!
//! The optimal distortion is computed by a linear program over split
//! weights: pin the approximation above the input (`δ̂ ≥ δ`), bound it by
//! `c·δ` from above, force zero where the input vanishes, and minimize `c`.
//! Any feasible two-sided factorization rescales into this normal form, so
//! the optimum is the true minimal distortion. The row duals of the same LP
//! are a capacity/demand pair certifying the distortion through the
//! flow–cut machinery, which is what makes tight instances extractable.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diversity::TabulatedDiversity;
use crate::flowcut::SubsetVector;
use crate::ground::Subset;
use crate::linprog::{solve_lp, LpProblem, LpStatus, RowSense, Sense};
use crate::splits::SplitSystem;
use crate::zoo::{hypergraph_steiner_diversity, WeightedHypergraph, ZooError};

/// Practical cap for the distortion LP: `2^{n-1}` split variables and
/// `2^{n+1}` rows.
pub const MAX_EMBED_GROUND: usize = 8;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum EmbedError {
    #[error("ground set of {0} elements exceeds the distortion-LP cap of {MAX_EMBED_GROUND}")]
    TooLarge(usize),
    #[error("distortion LP did not solve to optimality (status {0:?})")]
    LpFailed(LpStatus),
    #[error("steiner construction failed: {0}")]
    Zoo(#[from] ZooError),
}

/// The minimal distortion between a diversity and the cut cone, with the
/// split system achieving it and the LP row duals.
#[derive(Clone, Debug)]
pub struct MinDistortion {
    /// Optimal distortion; 1 exactly when the input is ℓ1-embeddable.
    pub distortion: f64,
    /// Split system whose table `δ̂` satisfies `δ ≤ δ̂ ≤ distortion·δ`.
    pub witness: SplitSystem,
    /// Duals of the upper-bound rows: a capacity vector with `C·δ = 1`.
    pub capacity_duals: SubsetVector,
    /// Duals of the lower-bound rows: a demand vector with `D·δ = distortion`
    /// and `D·δ_U ≤ C·δ_U` for every cut.
    pub demand_duals: SubsetVector,
}

/// Compute the minimal distortion of `t` into the cut cone, by LP.
/// Identically-zero inputs embed exactly with an empty witness.
pub fn min_distortion_l1(t: &TabulatedDiversity) -> Result<MinDistortion, EmbedError> {
    let ground = t.ground().clone();
    let n = ground.len();
    if n > MAX_EMBED_GROUND {
        return Err(EmbedError::TooLarge(n));
    }
    if t.is_identically_zero() {
        return Ok(MinDistortion {
            distortion: 1.0,
            witness: SplitSystem::zero(ground.clone()),
            capacity_duals: SubsetVector::zero(ground.clone()),
            demand_duals: SubsetVector::zero(ground),
        });
    }

    // Variables: one total weight per split (sides containing element 0,
    // full set excluded), plus the distortion bound c.
    let splits: Vec<Subset> =
        ground.subsets().filter(|s| s.contains(0) && *s != ground.full()).collect();
    let c_var = splits.len();
    let mut lp = LpProblem::new(Sense::Minimize, splits.len() + 1);
    lp.set_objective(c_var, 1.0);

    let rows: Vec<Subset> = ground.subsets().filter(|s| s.len() >= 2).collect();
    let mut ge_row = vec![usize::MAX; ground.table_len()];
    let mut le_row = vec![usize::MAX; ground.table_len()];
    for &a in &rows {
        let crossing: Vec<(usize, f64)> = splits
            .iter()
            .enumerate()
            .filter(|&(_, u)| a.crossed_by(*u, &ground))
            .map(|(i, _)| (i, 1.0))
            .collect();
        let value = t.get(a).max(0.0);
        ge_row[a.0 as usize] = lp.add_row(RowSense::Ge, value, &crossing);
        let mut upper = crossing.clone();
        upper.push((c_var, -value));
        le_row[a.0 as usize] = lp.add_row(RowSense::Le, 0.0, &upper);
    }

    let sol = solve_lp(&lp, crate::linprog::EPS_LP).map_err(|_| {
        EmbedError::LpFailed(LpStatus::Numerical)
    })?;
    if sol.status != LpStatus::Optimal {
        return Err(EmbedError::LpFailed(sol.status));
    }

    let mut witness = SplitSystem::zero(ground.clone());
    for (i, &side) in splits.iter().enumerate() {
        let w = sol.primal[i].max(0.0);
        if w > 0.0 {
            witness.set_lambda(side, w / 2.0).expect("canonical side");
        }
    }
    let mut capacity_duals = SubsetVector::zero(ground.clone());
    let mut demand_duals = SubsetVector::zero(ground);
    for &a in &rows {
        // Minimization: ≥-rows carry nonnegative duals, ≤-rows nonpositive.
        let d = sol.row_duals[ge_row[a.0 as usize]].max(0.0);
        let c = (-sol.row_duals[le_row[a.0 as usize]]).max(0.0);
        if d > 0.0 {
            demand_duals.set(a, d);
        }
        if c > 0.0 {
            capacity_duals.set(a, c);
        }
    }
    Ok(MinDistortion {
        distortion: sol.primal[c_var],
        witness,
        capacity_duals,
        demand_duals,
    })
}

/// Best weighted diversity found by randomized search over hyperedge
/// weights of a fixed topology: a heuristic lower bound on the worst-case
/// distortion over all diversities the topology supports.
#[derive(Clone, Debug)]
pub struct DistortionSearch {
    pub distortion: f64,
    pub weights: Vec<f64>,
    pub diversity: TabulatedDiversity,
}

/// Randomized search for a high-distortion Steiner diversity on a hypergraph
/// topology. Restart 0 uses unit weights; the rest draw log-uniform weights
/// in `[0.1, 10]`. Deterministic for a fixed seed. This is explicitly a
/// lower bound: the true supremum ranges over a cone no finite search
/// exhausts.
pub fn search_max_distortion(
    topology: &WeightedHypergraph,
    restarts: usize,
    seed: u64,
) -> Result<DistortionSearch, EmbedError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<DistortionSearch> = None;
    for restart in 0..restarts.max(1) {
        let weights: Vec<f64> = if restart == 0 {
            vec![1.0; topology.edges().len()]
        } else {
            (0..topology.edges().len())
                .map(|_| {
                    let ln = rng.gen::<f64>() * (10.0f64.ln() - 0.1f64.ln()) + 0.1f64.ln();
                    ln.exp()
                })
                .collect()
        };
        let reweighted = WeightedHypergraph::new(
            topology.ground().clone(),
            topology
                .edges()
                .iter()
                .zip(&weights)
                .map(|(&(e, _), &w)| (e, w))
                .collect(),
        )?;
        let diversity = hypergraph_steiner_diversity(&reweighted)?;
        let found = min_distortion_l1(&diversity)?;
        if best.as_ref().is_none_or(|b| found.distortion > b.distortion) {
            best = Some(DistortionSearch { distortion: found.distortion, weights, diversity });
        }
    }
    Ok(best.expect("at least one restart"))
}
