//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them). Tolerances
//! are pinned here, not configurable.

use std::time::Instant;

use divlab_core::diversity::{count_diversity, distortion_between};
use divlab_core::embed::min_distortion_l1;
use divlab_core::flowcut::{
    extract_tight_instance, flow_cut_gap, max_steiner_packing, min_ratio_cut, packing_dual,
    verify_flow_cut_sandwich, SubsetVector,
};
use divlab_core::ground::{GroundSet, Subset};
use divlab_core::random::{case_rng, random_connected_graph, random_valid_diversity};
use divlab_core::splits::{
    alternating_subset_sums, chain_embedding, cyclic_bound, pairwise_sum_slack, SplitSystem,
};
use divlab_core::verify::min_cut_via_split_lp;
use divlab_core::zoo::{
    diameter_diversity, hypergraph_steiner_diversity, l1_distance, l1_diversity,
    mean_width_diversity, metric_of_cloud, steiner_of_metric, PointCloud, WeightedHypergraph,
};
use rand::Rng;

fn triangle() -> WeightedHypergraph {
    let g = GroundSet::new(["a", "b", "c"]).unwrap();
    WeightedHypergraph::new(
        g,
        vec![(Subset(0b011), 1.0), (Subset(0b101), 1.0), (Subset(0b110), 1.0)],
    )
    .unwrap()
}

/// The shared random batch for the packing/cut/sandwich criteria:
/// `n ≤ 5`, at most 8 positive-capacity edges, weights in `[0.1, 2]`.
fn flow_batch(count: u64) -> Vec<(SubsetVector, SubsetVector)> {
    (0..count)
        .map(|case| {
            let mut rng = case_rng(0xACCE97, 0, case);
            let n = 3 + (case % 3) as usize;
            divlab_core::verify::random_flow_instance(&mut rng, n)
        })
        .collect()
}

#[test]
fn criterion_01_triangle_tightness() {
    let start = Instant::now();
    let h = triangle();
    let c = SubsetVector::from_hypergraph(&h);
    let d = SubsetVector::from_entries(h.ground().clone(), [(h.ground().full(), 1.0)]);
    let packing = max_steiner_packing(&c, &d).unwrap().value;
    let cut = min_ratio_cut(&c, &d).unwrap().value;
    let gap = cut / packing;
    let t = hypergraph_steiner_diversity(&h).unwrap();
    let distortion = min_distortion_l1(&t).unwrap().distortion;
    let elapsed = start.elapsed();

    assert!((packing - 1.5).abs() <= 1e-6, "packing {packing}");
    assert!((cut - 2.0).abs() <= 1e-6, "cut {cut}");
    assert!((gap - 4.0 / 3.0).abs() <= 1e-6, "gap {gap}");
    assert!((distortion - 4.0 / 3.0).abs() <= 1e-6, "distortion {distortion}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "PASS triangle tightness: packing={packing} cut={cut} gap={gap} \
         distortion={distortion} ({elapsed:?})"
    );
}

#[test]
fn criterion_02_packing_strong_duality() {
    let start = Instant::now();
    let batch = flow_batch(100);
    let mut worst = 0.0f64;
    for (c, d) in &batch {
        let primal = max_steiner_packing(c, d).unwrap().value;
        let dual = packing_dual(c, d).unwrap().value;
        let gap = (primal - dual).abs() / (1.0 + primal.abs());
        worst = worst.max(gap);
        assert!(gap <= 1e-6, "duality gap {gap} (primal {primal}, dual {dual})");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("PASS packing strong duality: 100 instances, worst residual {worst:.2e} ({elapsed:?})");
}

#[test]
fn criterion_03_cut_equals_split_cone_minimum() {
    let batch = flow_batch(100);
    let mut worst = 0.0f64;
    for (c, d) in &batch {
        let enumerated = min_ratio_cut(c, d).unwrap().value;
        let via_lp = min_cut_via_split_lp(c, d).unwrap();
        let gap = (enumerated - via_lp).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-6 * (1.0 + enumerated.abs()), "cut {enumerated} vs LP {via_lp}");
    }
    println!("PASS cut-cone minimum: 100 instances, worst gap {worst:.2e}");
}

#[test]
fn criterion_04_flow_cut_sandwich() {
    let batch = flow_batch(100);
    for (c, d) in &batch {
        let s = verify_flow_cut_sandwich(c, d).unwrap();
        assert!(
            s.packing_value <= s.cut_value + 1e-6,
            "lower side: {} > {}",
            s.packing_value,
            s.cut_value
        );
        assert!(
            s.cut_value <= s.distortion * s.packing_value + 1e-6,
            "upper side: {} > {}·{}",
            s.cut_value,
            s.distortion,
            s.packing_value
        );
    }
    println!("PASS flow-cut sandwich: 100 instances within 1e-6");
}

#[test]
fn criterion_05_tight_instance_extraction() {
    let mut worst = 0.0f64;
    for case in 0..50u64 {
        let mut rng = case_rng(0xACCE97, 5, case);
        let n = 3 + (case % 3) as usize;
        let h = if case % 2 == 0 {
            WeightedHypergraph::from_graph(&random_connected_graph(&mut rng, n, n, 0.1, 2.0))
        } else {
            divlab_core::random::random_connected_hypergraph(&mut rng, n, n + 2, 0.1, 2.0)
        };
        let t = hypergraph_steiner_diversity(&h).unwrap();
        let k = min_distortion_l1(&t).unwrap().distortion;
        let (c, d) = extract_tight_instance(&t, &h).unwrap();
        let gap = flow_cut_gap(&c, &d).unwrap().gap;
        let err = (gap - k).abs();
        worst = worst.max(err);
        assert!(err <= 1e-5, "case {case}: gap {gap} vs distortion {k}");
    }
    println!("PASS tight-instance extraction: 50 instances, worst |gap − k| = {worst:.2e}");
}

#[test]
fn criterion_06_cut_cone_round_trip() {
    fn binom(n: usize, k: usize) -> usize {
        let mut r = 1usize;
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    }
    let mut worst = 0.0f64;
    for case in 0..100u64 {
        let mut rng = case_rng(0xACCE97, 6, case);
        let n = 2 + (case % 5) as usize; // up to 6
        let ground = GroundSet::with_size(n).unwrap();
        let mut sys = SplitSystem::zero(ground.clone());
        for side in ground.subsets() {
            if side.contains(0) && side != ground.full() && rng.gen::<f64>() < 0.6 {
                sys.set_lambda(side, rng.gen::<f64>()).unwrap();
            }
        }
        let t = sys.tabulate();

        let sums = alternating_subset_sums(&t);
        for s in ground.subsets() {
            let err = (sums[s.0 as usize] - t.get(s)).abs();
            worst = worst.max(err);
            assert!(err <= 1e-12, "identity residual {err} at {s:?} (n={n})");
        }

        let recovered = SplitSystem::from_diversity(&t, 1e-9).unwrap();
        for side in ground.subsets() {
            if side.contains(0) && side != ground.full() {
                let err = (recovered.lambda(side) - sys.lambda(side)).abs();
                worst = worst.max(err);
                assert!(err <= 1e-12, "weight recovery {err} at {side:?}");
            }
        }

        let anchor = rng.gen_range(0..n);
        let emb = chain_embedding(&sys, anchor);
        assert!(emb.dim() <= binom(n, n / 2), "dim {} at n={n}", emb.dim());
        let image =
            l1_diversity(&PointCloud::new(emb.ground.clone(), emb.coords.clone()).unwrap());
        for s in ground.subsets() {
            let err = (image.get(s) - t.get(s)).abs();
            worst = worst.max(err);
            assert!(err <= 1e-12, "embedding residual {err} at {s:?}");
        }
    }
    println!("PASS cut-cone round trip: 100 systems, worst residual {worst:.2e}");
}

#[test]
fn criterion_07_non_embeddability_witness() {
    let t = count_diversity(GroundSet::with_size(3).unwrap());
    let full = t.ground().full();

    let sums = alternating_subset_sums(&t);
    assert_eq!(sums[full.0 as usize], 1.0);
    assert_eq!(t.get(full), 2.0);

    let parts = [Subset(0b001), Subset(0b010), Subset(0b100)];
    let cyc = cyclic_bound(&t, &parts).unwrap();
    assert_eq!(cyc.union_value, 2.0);
    assert_eq!(cyc.bound, 1.5);
    assert!(!cyc.holds(1e-9));

    let ep = pairwise_sum_slack(&t);
    assert_eq!(ep.min_slack, -1.0);
    assert_eq!(ep.witness, full);

    let k = min_distortion_l1(&t).unwrap().distortion;
    assert!((k - 4.0 / 3.0).abs() <= 1e-6, "distortion {k}");
    println!(
        "PASS non-embeddability witness: identity 1 vs 2, cyclic 2 > 1.5, \
         pairwise slack -1, distortion {k}"
    );
}

#[test]
fn criterion_08_value_sandwiches() {
    // Diameter ≤ δ ≤ Steiner ≤ (|A|−1)·diameter on random valid diversities.
    for case in 0..100u64 {
        let mut rng = case_rng(0xACCE97, 8, case);
        let n = 3 + (case % 4) as usize; // up to 6
        let t = random_valid_diversity(&mut rng, n);
        let m = t.induced_metric();
        let diam = diameter_diversity(&m);
        let steiner = steiner_of_metric(&m).unwrap();
        for s in t.ground().subsets() {
            if s.len() < 2 {
                continue;
            }
            let k = s.len() as f64 - 1.0;
            assert!(diam.get(s) <= t.get(s) + 1e-9, "diam > value at {s:?} (case {case})");
            assert!(t.get(s) <= steiner.get(s) + 1e-9, "value > steiner at {s:?}");
            assert!(steiner.get(s) <= k * diam.get(s) + 1e-9, "steiner > (|A|-1)diam at {s:?}");
        }
    }
    // ℓ1 bounds on random clouds, with the signed-unit cloud exactly extremal.
    for case in 0..100u64 {
        let mut rng = case_rng(0xACCE97, 80, case);
        let n = 3 + (case % 4) as usize;
        let dim = 1 + (case % 3) as usize;
        let cloud = divlab_core::random::random_point_cloud(&mut rng, n, dim, 2.0);
        let l1 = l1_diversity(&cloud);
        let diam = diameter_diversity(&metric_of_cloud(&cloud, l1_distance));
        for s in l1.ground().subsets() {
            assert!(diam.get(s) <= l1.get(s) + 1e-9);
            assert!(l1.get(s) <= dim as f64 * diam.get(s) + 1e-9);
        }
    }
    for k in 1..=3usize {
        let cloud = PointCloud::signed_units(k).unwrap();
        let l1 = l1_diversity(&cloud);
        let diam = diameter_diversity(&metric_of_cloud(&cloud, l1_distance));
        let full = cloud.ground().full();
        assert_eq!(l1.get(full), k as f64 * diam.get(full));
    }
    println!("PASS value sandwiches: 200 random instances + signed-unit equality");
}

#[test]
fn criterion_09_fixed_dimension_lower_bound() {
    let n = 5;
    let t = count_diversity(GroundSet::with_size(n).unwrap());
    let fit = min_distortion_l1(&t).unwrap();
    let emb = chain_embedding(&fit.witness, 0);
    let image = l1_diversity(&PointCloud::new(emb.ground.clone(), emb.coords.clone()).unwrap());
    let phi: Vec<usize> = (0..n).collect();
    let report = distortion_between(&t, &image, &phi).unwrap();
    let bound = (n as f64 - 1.0) / emb.dim() as f64;
    assert!(
        report.distortion >= bound - 1e-6,
        "distortion {} below (n-1)/k = {bound}",
        report.distortion
    );
    println!(
        "PASS fixed-dimension lower bound: distortion {} ≥ {bound} (dim {})",
        report.distortion,
        emb.dim()
    );
}

#[test]
fn criterion_10_mean_width_calibration() {
    // Two points at Euclidean distance 5.
    let g = GroundSet::new(["p", "q"]).unwrap();
    let cloud = PointCloud::new(g, vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
    let t = mean_width_diversity(&cloud, 1_000_000, 42).unwrap();
    let pair = t.get(Subset(0b11));
    assert!((pair - 5.0).abs() / 5.0 <= 0.01, "two-point value {pair}");

    // Unit equilateral triangle in the plane.
    let g3 = GroundSet::new(["a", "b", "c"]).unwrap();
    let tri = PointCloud::new(
        g3,
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]],
    )
    .unwrap();
    let t3 = mean_width_diversity(&tri, 1_000_000, 43).unwrap();
    let full = t3.get(Subset(0b111));
    assert!((full - 1.5).abs() / 1.5 <= 0.01, "triangle value {full}");
    println!("PASS mean-width calibration: pair {pair} (→5), triangle {full} (→1.5)");
}

#[test]
fn criterion_11_single_pair_gap_is_one() {
    for case in 0..20u64 {
        let mut rng = case_rng(0xACCE97, 11, case);
        let n = 3 + (case % 3) as usize;
        let g = random_connected_graph(&mut rng, n, n, 0.1, 2.0);
        let c = SubsetVector::from_hypergraph(&WeightedHypergraph::from_graph(&g));
        let (i, j) = loop {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j {
                break (i, j);
            }
        };
        let d = SubsetVector::from_entries(
            g.ground().clone(),
            [(Subset::from_indices([i, j]), 1.0)],
        );
        let gap = flow_cut_gap(&c, &d).unwrap().gap;
        assert!((gap - 1.0).abs() <= 1e-6, "case {case}: single-pair gap {gap}");
    }
    println!("PASS single-pair max-flow/min-cut: 20 graphs at gap 1");
}
