//! Cross-module property suites over random instances, runnable from tests
//! and from the command line. Each suite draws its cases deterministically
//! from a seed, checks one bridge between modules (constructor validity,
//! cone round trips, packing duality, cut oracles, sandwich bounds, tight
//! extraction), and reports failures as strings.

use crate::diversity::{distortion_between, TabulatedDiversity, EPS_DIV};
use crate::flowcut::{
    extract_tight_instance, flow_cut_gap, max_steiner_packing, min_ratio_cut, packing_dual,
    verify_flow_cut_sandwich, SubsetVector,
};
use crate::ground::{GroundSet, Subset};
use crate::linprog::{solve_lp, LpProblem, LpStatus, RowSense, Sense, EPS_LP};
use crate::random::{
    case_rng, random_connected_graph, random_connected_hypergraph, random_demands,
    random_point_cloud, random_split_system, random_valid_diversity,
};
use crate::splits::{
    alternating_subset_sums, chain_embedding, cyclic_bound, l1_certificate, pairwise_sum_slack,
    SplitSystem,
};
use crate::zoo::{
    diameter_diversity, hypergraph_steiner_diversity, l1_distance, l1_diversity, l2_distance,
    mean_width_diversity, metric_of_cloud, steiner_of_metric, PointCloud,
};
use rand::Rng;

/// One suite: a name plus a per-case check.
pub struct Suite {
    pub name: &'static str,
    pub check: fn(&mut rand_chacha::ChaCha8Rng, usize) -> Result<(), String>,
}

/// All cross-module suites, in a fixed order.
pub fn suites() -> Vec<Suite> {
    vec![
        Suite { name: "constructor-validity", check: constructor_validity },
        Suite { name: "steiner-maximality", check: steiner_maximality },
        Suite { name: "diam-steiner-sandwich", check: diam_steiner_sandwich },
        Suite { name: "cone-round-trip", check: cone_round_trip },
        Suite { name: "cone-inequalities", check: cone_inequalities },
        Suite { name: "reduced-axiom-agreement", check: reduced_axiom_agreement },
        Suite { name: "distortion-one-iff-cone", check: distortion_one_iff_cone },
        Suite { name: "packing-duality", check: packing_duality },
        Suite { name: "cut-equals-split-lp", check: cut_equals_split_lp },
        Suite { name: "flowcut-sandwich", check: flowcut_sandwich },
        Suite { name: "tight-extraction", check: tight_extraction },
        Suite { name: "single-pair-gap-is-one", check: single_pair_gap_is_one },
        Suite { name: "l1-dimension-bounds", check: l1_dimension_bounds },
        Suite { name: "fixed-dimension-lower-bound", check: fixed_dimension_lower_bound },
    ]
}

/// Outcome of one case.
#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub suite: &'static str,
    pub case: u64,
    pub error: Option<String>,
}

/// Run every suite `count` times at ground sizes up to `n_cap`, spreading
/// cases over `threads` workers. Case results are deterministic in `seed`
/// and independent of the thread count.
pub fn run_suites(seed: u64, n_cap: usize, count: u64, threads: usize) -> Vec<CaseOutcome> {
    let all = suites();
    let jobs: Vec<(usize, u64)> = (0..all.len())
        .flat_map(|s| (0..count).map(move |c| (s, c)))
        .collect();
    let threads = threads.max(1).min(jobs.len().max(1));

    let run_one = |&(si, case): &(usize, u64)| -> CaseOutcome {
        let suite = &suites()[si];
        let mut rng = case_rng(seed, si as u64, case);
        let n = 3 + (case as usize % n_cap.saturating_sub(2).max(1));
        CaseOutcome {
            suite: suite.name,
            case,
            error: (suite.check)(&mut rng, n.min(n_cap)).err(),
        }
    };

    if threads <= 1 {
        return jobs.iter().map(run_one).collect();
    }
    let chunk = jobs.len().div_ceil(threads);
    let mut out: Vec<Vec<CaseOutcome>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(run_one).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            out.push(h.join().expect("suite worker panicked"));
        }
    });
    out.into_iter().flatten().collect()
}

fn fail(msg: impl Into<String>) -> Result<(), String> {
    Err(msg.into())
}

fn constructor_validity(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let t = random_valid_diversity(rng, n);
    let report = t.validate(EPS_DIV);
    if !report.ok() {
        return fail(format!("random diversity violates axioms: {:?}", report.violations[0]));
    }
    let cloud = random_point_cloud(rng, n.min(5), 2, 1.0);
    let mw = mean_width_diversity(&cloud, 4000, rng.gen()).map_err(|e| e.to_string())?;
    if !mw.validate(1e-8).ok() {
        return fail("mean-width table violates axioms beyond rounding");
    }
    let m = t.induced_metric();
    crate::diversity::TabulatedMetric::new(m.ground().clone(), m.matrix().to_vec(), EPS_DIV)
        .map_err(|e| format!("induced metric invalid: {e}"))?;
    let id: Vec<usize> = (0..t.ground().len()).collect();
    let r = distortion_between(&t, &t, &id).map_err(|e| e.to_string())?;
    if r.distortion != 1.0 {
        return fail(format!("identity map distortion is {}, not exactly 1", r.distortion));
    }
    Ok(())
}

fn steiner_maximality(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(5);
    let h = random_connected_hypergraph(rng, n, n + 2, 0.2, 2.0);
    let steiner = hypergraph_steiner_diversity(&h).map_err(|e| e.to_string())?;
    let candidate = random_split_system(rng, n, 0.6).tabulate();
    // Scale the candidate until it obeys every hyperedge cap.
    let mut scale = f64::INFINITY;
    for &(e, w) in h.edges() {
        if candidate.get(e) > 0.0 {
            scale = scale.min(w / candidate.get(e));
        }
    }
    let scale = if scale.is_finite() { scale } else { 1.0 };
    for s in steiner.ground().subsets() {
        if candidate.get(s) * scale > steiner.get(s) + 1e-9 {
            return fail(format!(
                "edge-dominated diversity exceeds the Steiner diversity at {s:?}"
            ));
        }
    }
    Ok(())
}

fn diam_steiner_sandwich(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(6); // the Steiner oracle uses the complete graph
    let t = random_valid_diversity(rng, n);
    let m = t.induced_metric();
    let diam = diameter_diversity(&m);
    let steiner = steiner_of_metric(&m).map_err(|e| e.to_string())?;
    for s in t.ground().subsets() {
        if s.len() < 2 {
            continue;
        }
        let k = s.len() as f64 - 1.0;
        if diam.get(s) > t.get(s) + 1e-9
            || t.get(s) > steiner.get(s) + 1e-9
            || steiner.get(s) > k * diam.get(s) + 1e-9
        {
            return fail(format!(
                "sandwich fails at {s:?}: {} / {} / {} / {}",
                diam.get(s),
                t.get(s),
                steiner.get(s),
                k * diam.get(s)
            ));
        }
    }
    Ok(())
}

fn cone_round_trip(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(6);
    let sys = random_split_system(rng, n, 0.6);
    let t = sys.tabulate();
    let sums = alternating_subset_sums(&t);
    for s in t.ground().subsets() {
        if (sums[s.0 as usize] - t.get(s)).abs() > 1e-12 * (1.0 + t.max_value()) {
            return fail(format!("alternating identity fails at {s:?}"));
        }
    }
    let rec = SplitSystem::from_diversity(&t, EPS_DIV).map_err(|e| e.to_string())?;
    for (side, l) in sys.iter() {
        if (rec.lambda(side) - l).abs() > 1e-12 * (1.0 + l) {
            return fail(format!("weight recovery off at {side:?}"));
        }
    }
    let anchor = rng.gen_range(0..n);
    let emb = chain_embedding(&sys, anchor);
    let image = l1_diversity(
        &PointCloud::new(emb.ground.clone(), emb.coords.clone()).map_err(|e| e.to_string())?,
    );
    for s in t.ground().subsets() {
        if (image.get(s) - t.get(s)).abs() > 1e-12 * (1.0 + t.max_value()) {
            return fail(format!("chain embedding is not isometric at {s:?}"));
        }
    }
    let bound = binomial(n, n / 2);
    if emb.dim() > bound {
        return fail(format!("embedding dimension {} exceeds {bound}", emb.dim()));
    }
    Ok(())
}

fn cone_inequalities(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(5);
    let t = random_split_system(rng, n, 0.6).tabulate();
    let ground = t.ground().clone();
    let small: Vec<Subset> = ground.subsets().filter(|s| (1..=2).contains(&s.len())).collect();
    for _ in 0..40 {
        let len = rng.gen_range(1..=4usize);
        let parts: Vec<Subset> =
            (0..len).map(|_| small[rng.gen_range(0..small.len())]).collect();
        let check = cyclic_bound(&t, &parts).map_err(|e| e.to_string())?;
        if !check.holds(EPS_DIV) {
            return fail(format!("cyclic bound fails for parts {parts:?}"));
        }
    }
    if pairwise_sum_slack(&t).min_slack < -EPS_DIV {
        return fail("pairwise-sum condition fails on an embeddable table");
    }
    Ok(())
}

fn reduced_axiom_agreement(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(5);
    let mut t = random_valid_diversity(rng, n);
    if rng.gen::<bool>() && !t.is_identically_zero() {
        // Perturb one non-singleton entry to break the axioms half the time.
        let mut values = t.values().to_vec();
        let idx = loop {
            let i = rng.gen_range(0..values.len());
            if Subset(i as u32).len() >= 2 {
                break i;
            }
        };
        values[idx] += t.max_value() * (0.5 + rng.gen::<f64>());
        t = TabulatedDiversity::new(t.ground().clone(), values).map_err(|e| e.to_string())?;
    }
    let full = t.validate(EPS_DIV).ok();
    let reduced = t.satisfies_axioms_reduced(EPS_DIV);
    if full != reduced {
        return fail(format!("full check says {full}, reduced says {reduced}"));
    }
    Ok(())
}

fn distortion_one_iff_cone(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(5);
    let t = random_valid_diversity(rng, n);
    if t.is_identically_zero() {
        return Ok(());
    }
    let embeddable = l1_certificate(&t, 1e-9).is_embeddable();
    let k = crate::embed::min_distortion_l1(&t).map_err(|e| e.to_string())?.distortion;
    match (embeddable, k) {
        (true, k) if (k - 1.0).abs() > 1e-6 => fail(format!("embeddable but k = {k}")),
        (false, k) if k <= 1.0 + 1e-7 => fail("outside the cone but k = 1".to_string()),
        _ => Ok(()),
    }
}

/// Random capacity/demand instance at the acceptance scale.
pub fn random_flow_instance(
    rng: &mut impl Rng,
    n: usize,
) -> (SubsetVector, SubsetVector) {
    let n = n.clamp(3, 5);
    let edge_count = rng.gen_range(n - 1..=8.max(n - 1));
    let h = random_connected_hypergraph(rng, n, edge_count, 0.1, 2.0);
    let c = SubsetVector::from_hypergraph(&h);
    let demand_count = rng.gen_range(1..=3);
    let d = random_demands(rng, h.ground(), demand_count, 0.1, 2.0);
    (c, d)
}

fn packing_duality(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let (c, d) = random_flow_instance(rng, n);
    let primal = max_steiner_packing(&c, &d).map_err(|e| e.to_string())?;
    let dual = packing_dual(&c, &d).map_err(|e| e.to_string())?;
    let tol = 1e-6 * (1.0 + primal.value.abs());
    if (primal.value - dual.value).abs() > tol {
        return fail(format!("duality gap: primal {} vs dual {}", primal.value, dual.value));
    }
    for (ei, &(_, cap)) in primal.edges.iter().enumerate() {
        if primal.edge_loads[ei] > cap + 1e-6 {
            return fail(format!("edge {ei} overloaded"));
        }
    }
    // Every positive demand receives its share of the packing.
    for (s, ds) in d.active() {
        let routed: f64 =
            primal.flows.iter().filter(|f| f.demand == s).map(|f| f.weight).sum();
        if routed < primal.value * ds - 1e-6 {
            return fail(format!("demand {s:?} shorted: {routed} < {}", primal.value * ds));
        }
    }
    Ok(())
}

/// Independent oracle for the cut: minimize `C·μ` over split-system
/// diversities `μ` with `D·μ = 1` by LP; the optimum sits at a single cut.
pub fn min_cut_via_split_lp(
    capacities: &SubsetVector,
    demands: &SubsetVector,
) -> Result<f64, String> {
    let ground = capacities.ground().clone();
    let sides: Vec<Subset> =
        ground.subsets().filter(|s| s.contains(0) && *s != ground.full()).collect();
    let cost: Vec<f64> = sides
        .iter()
        .map(|&u| {
            capacities
                .active()
                .filter(|(a, _)| a.crossed_by(u, &ground))
                .map(|(_, c)| c)
                .sum()
        })
        .collect();
    let dem: Vec<f64> = sides
        .iter()
        .map(|&u| {
            demands
                .active()
                .filter(|(s, _)| s.crossed_by(u, &ground))
                .map(|(_, d)| d)
                .sum()
        })
        .collect();
    let mut lp = LpProblem::new(Sense::Minimize, sides.len());
    for (i, &c) in cost.iter().enumerate() {
        lp.set_objective(i, c);
    }
    let terms: Vec<(usize, f64)> = dem.iter().cloned().enumerate().collect();
    lp.add_row(RowSense::Eq, 1.0, &terms);
    let sol = solve_lp(&lp, EPS_LP).map_err(|e| e.to_string())?;
    if sol.status != LpStatus::Optimal {
        return Err(format!("cut oracle LP status {:?}", sol.status));
    }
    Ok(sol.objective)
}

fn cut_equals_split_lp(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let (c, d) = random_flow_instance(rng, n);
    let report = min_ratio_cut(&c, &d).map_err(|e| e.to_string())?;
    // The reported value reproduces from the per-cut crossings.
    let recomputed = report
        .per_cut
        .iter()
        .filter(|x| x.demand > 0.0)
        .map(|x| x.capacity / x.demand)
        .fold(f64::INFINITY, f64::min);
    if (report.value - recomputed).abs() > 1e-12 * (1.0 + recomputed.abs()) {
        return fail(format!("cut report value {} not reproduced ({recomputed})", report.value));
    }
    let via_lp = min_cut_via_split_lp(&c, &d)?;
    if (report.value - via_lp).abs() > 1e-6 * (1.0 + report.value.abs()) {
        return fail(format!("cut {} vs split-LP {via_lp}", report.value));
    }
    Ok(())
}

fn flowcut_sandwich(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let (c, d) = random_flow_instance(rng, n);
    let report = verify_flow_cut_sandwich(&c, &d).map_err(|e| e.to_string())?;
    if !report.holds(1e-6) {
        return fail(format!(
            "sandwich fails: {} ≤ {} ≤ {}·{}",
            report.packing_value, report.cut_value, report.distortion, report.packing_value
        ));
    }
    Ok(())
}

fn tight_extraction(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(5);
    let use_graph = rng.gen::<bool>();
    let extra = rng.gen_range(0..=n);
    let h = if use_graph {
        crate::zoo::WeightedHypergraph::from_graph(&random_connected_graph(rng, n, extra, 0.1, 2.0))
    } else {
        random_connected_hypergraph(rng, n, n - 1 + extra.min(3), 0.1, 2.0)
    };
    let t = hypergraph_steiner_diversity(&h).map_err(|e| e.to_string())?;
    let k = crate::embed::min_distortion_l1(&t).map_err(|e| e.to_string())?.distortion;
    let (c, d) = extract_tight_instance(&t, &h).map_err(|e| e.to_string())?;
    let gap = flow_cut_gap(&c, &d).map_err(|e| e.to_string())?.gap;
    if (gap - k).abs() > 1e-5 * (1.0 + k) {
        return fail(format!("gap {gap} differs from distortion {k}"));
    }
    Ok(())
}

fn single_pair_gap_is_one(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.min(5);
    let extra = rng.gen_range(0..=n);
    let g = random_connected_graph(rng, n, extra, 0.1, 2.0);
    let c = SubsetVector::from_hypergraph(&crate::zoo::WeightedHypergraph::from_graph(&g));
    let pair = loop {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            break Subset::from_indices([i, j]);
        }
    };
    let d = SubsetVector::from_entries(g.ground().clone(), [(pair, 1.0)]);
    let gap = flow_cut_gap(&c, &d).map_err(|e| e.to_string())?.gap;
    if (gap - 1.0).abs() > 1e-6 {
        return fail(format!("single-pair gap is {gap}"));
    }
    Ok(())
}

fn l1_dimension_bounds(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let dim = rng.gen_range(1..=3usize);
    let cloud = random_point_cloud(rng, n.min(6), dim, 2.0);
    let l1 = l1_diversity(&cloud);
    let diam1 = diameter_diversity(&metric_of_cloud(&cloud, l1_distance));
    for s in l1.ground().subsets() {
        if l1.get(s) < diam1.get(s) - 1e-9
            || l1.get(s) > dim as f64 * diam1.get(s) + 1e-9
        {
            return fail(format!("ℓ1/diameter bounds fail at {s:?}"));
        }
    }
    // Mean width dominates the Euclidean diameter, within MC noise.
    let mw = mean_width_diversity(&cloud, 20_000, rng.gen()).map_err(|e| e.to_string())?;
    let diam2 = diameter_diversity(&metric_of_cloud(&cloud, l2_distance));
    for s in l1.ground().subsets() {
        if mw.get(s) < diam2.get(s) * (1.0 - 0.05) - 1e-9 {
            return fail(format!("mean width under Euclidean diameter at {s:?}"));
        }
    }
    Ok(())
}

fn fixed_dimension_lower_bound(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Result<(), String> {
    let n = n.clamp(3, 6);
    let t = crate::diversity::count_diversity(GroundSet::with_size(n).unwrap());
    let fit = crate::embed::min_distortion_l1(&t).map_err(|e| e.to_string())?;
    let anchor = rng.gen_range(0..n);
    let emb = chain_embedding(&fit.witness, anchor);
    let image = l1_diversity(
        &PointCloud::new(emb.ground.clone(), emb.coords.clone()).map_err(|e| e.to_string())?,
    );
    let phi: Vec<usize> = (0..n).collect();
    let report = distortion_between(&t, &image, &phi).map_err(|e| e.to_string())?;
    let bound = (n as f64 - 1.0) / emb.dim() as f64;
    if report.distortion < bound - 1e-6 {
        return fail(format!(
            "distortion {} under the dimension bound {bound}",
            report.distortion
        ));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}
