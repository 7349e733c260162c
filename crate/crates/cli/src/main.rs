//! `divlab`: batch front end for diversity computations.
//!
//! ```text
//! divlab <command> [--in FILE] [--out FILE] [--mode M] [--seed N] [--tol X] [--n N] [--count K]
//! ```
//!
//! Commands: `validate`, `build` (`--mode` picks the constructor), `embed`,
//! `flowcut` (`--mode` in `maxhsp|mincut|gamma|verify|tight`), `verify`.
//! Exit codes: 0 success, 1 domain failure, 2 usage or parse error.
//! `DIVLAB_THREADS` caps the verify worker count (default 1).

mod doc;

use std::io::Write;
use std::process::ExitCode;

use serde_json::json;

use divlab_core::diversity::{Violation, EPS_DIV};
use divlab_core::embed::min_distortion_l1;
use divlab_core::flowcut::{
    extract_tight_instance, flow_cut_gap, max_steiner_packing, min_ratio_cut,
    verify_flow_cut_sandwich, SubsetVector,
};
use divlab_core::splits::chain_embedding;
use divlab_core::verify::run_suites;
use divlab_core::zoo::{
    cut_diversity, diameter_diversity, hypergraph_steiner_diversity, l1_diversity,
    mean_width_diversity, measure_diversity, phylogenetic_diversity, segregation_diversity,
    steiner_diversity, tsp_diversity,
};

use doc::{
    split_entries, subset_labels, table_entries, vector_entries, DocError, InstanceDocument,
};

struct Args {
    command: String,
    input: Option<String>,
    output: Option<String>,
    mode: Option<String>,
    seed: Option<u64>,
    tol: Option<f64>,
    n: Option<usize>,
    count: Option<u64>,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut args = Args {
        command: argv.first().cloned().ok_or("missing command")?,
        input: None,
        output: None,
        mode: None,
        seed: None,
        tol: None,
        n: None,
        count: None,
    };
    let mut it = argv[1..].iter();
    while let Some(flag) = it.next() {
        let value = it.next().ok_or_else(|| format!("flag {flag} needs a value"))?;
        match flag.as_str() {
            "--in" => args.input = Some(value.clone()),
            "--out" => args.output = Some(value.clone()),
            "--mode" => args.mode = Some(value.clone()),
            "--seed" => args.seed = Some(value.parse().map_err(|_| "bad --seed")?),
            "--tol" => args.tol = Some(value.parse().map_err(|_| "bad --tol")?),
            "--n" => args.n = Some(value.parse().map_err(|_| "bad --n")?),
            "--count" => args.count = Some(value.parse().map_err(|_| "bad --count")?),
            other => return Err(format!("unknown flag {other}")),
        }
    }
    Ok(args)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(e) => return usage_error(&e),
    };
    let result = match args.command.as_str() {
        "validate" => cmd_validate(&args),
        "build" => cmd_build(&args),
        "embed" => cmd_embed(&args),
        "flowcut" => cmd_flowcut(&args),
        "verify" => cmd_verify(&args),
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => usage_error(&msg),
        Err(CliError::Domain(msg)) => {
            eprintln!("divlab: {msg}");
            ExitCode::from(1)
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("divlab: {msg}");
    eprintln!(
        "usage: divlab <validate|build|embed|flowcut|verify> \
         [--in FILE] [--out FILE] [--mode M] [--seed N] [--tol X] [--n N] [--count K]"
    );
    ExitCode::from(2)
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Structure(m) => CliError::Usage(m),
            DocError::Domain(m) => CliError::Domain(m),
        }
    }
}

fn load_document(args: &Args) -> Result<InstanceDocument, CliError> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --in FILE".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    Ok(InstanceDocument::parse(&text)?)
}

fn emit(args: &Args, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    match &args.output {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Domain(format!("cannot write {path}: {e}"))),
        None => {
            let mut out = std::io::stdout();
            writeln!(out, "{text}").map_err(|e| CliError::Domain(e.to_string()))
        }
    }
}

fn describe_violation(t: &divlab_core::TabulatedDiversity, v: &Violation) -> String {
    let g = t.ground();
    match v {
        Violation::EmptySetNonZero { value } => format!("value of {{}} is {value}, not 0"),
        Violation::SingletonNonZero { set, value } => {
            format!("value of {} is {value}, not 0", g.render(*set))
        }
        Violation::Negative { set, value } => {
            format!("value of {} is negative ({value})", g.render(*set))
        }
        Violation::NotStrictlyPositive { set, value } => {
            format!("value of {} is not strictly positive ({value})", g.render(*set))
        }
        Violation::Monotonicity { sub, sup, sub_value, sup_value } => format!(
            "monotonicity fails: {}={sub_value} exceeds {}={sup_value}",
            g.render(*sub),
            g.render(*sup)
        ),
        Violation::Triangle { a, b, c, lhs, rhs } => format!(
            "triangle fails at A={}, B={}, C={}: {lhs} < {rhs}",
            g.render(*a),
            g.render(*b),
            g.render(*c)
        ),
    }
}

fn cmd_validate(args: &Args) -> Result<ExitCode, CliError> {
    let doc = load_document(args)?;
    doc.expect_payload(&["diversity"])?;
    let table = doc.diversity_table()?;
    let eps = args.tol.unwrap_or(doc.tolerance_or(EPS_DIV));
    let report = table.validate(eps);
    let value = json!({
        "ok": report.ok(),
        "violations": report.violations.iter()
            .map(|v| describe_violation(&table, v))
            .collect::<Vec<_>>(),
        "truncated": report.truncated,
    });
    emit(args, &value)?;
    Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_build(args: &Args) -> Result<ExitCode, CliError> {
    let kind = args
        .mode
        .as_ref()
        .ok_or_else(|| CliError::Usage("build needs --mode KIND".into()))?
        .clone();
    let doc = load_document(args)?;
    let eps = args.tol.unwrap_or(doc.tolerance_or(EPS_DIV));
    let domain = |e: divlab_core::zoo::ZooError| CliError::Domain(e.to_string());
    let table = match kind.as_str() {
        "diameter" => {
            doc.expect_payload(&["metric"])?;
            diameter_diversity(&doc.metric_table(eps)?)
        }
        "l1" => {
            doc.expect_payload(&["points"])?;
            l1_diversity(&doc.points_value()?)
        }
        "steiner" => {
            doc.expect_payload(&["hypergraph"])?;
            steiner_diversity(&doc.graph_value()?).map_err(domain)?
        }
        "hsteiner" => {
            doc.expect_payload(&["hypergraph"])?;
            hypergraph_steiner_diversity(&doc.hypergraph_value()?).map_err(domain)?
        }
        "phylo" => {
            doc.expect_payload(&["tree"])?;
            phylogenetic_diversity(&doc.tree_value()?)
        }
        "tsp" => {
            doc.expect_payload(&["metric"])?;
            tsp_diversity(&doc.metric_table(eps)?).map_err(domain)?
        }
        "measure" => {
            doc.expect_payload(&["measure"])?;
            let (space, sets, ground) = doc.measure_value()?;
            measure_diversity(&space, &sets, &ground).map_err(domain)?
        }
        "sdiv" => {
            doc.expect_payload(&["family"])?;
            let (fam, ground) = doc.family_value(eps)?;
            segregation_diversity(&fam, &ground).map_err(domain)?
        }
        "meanwidth" => {
            doc.expect_payload(&["points", "samples"])?;
            let samples = doc.samples.unwrap_or(0);
            let seed = args.seed.or(doc.seed).unwrap_or(0);
            mean_width_diversity(&doc.points_value()?, samples, seed).map_err(domain)?
        }
        "cut" => {
            doc.expect_payload(&["cut"])?;
            let (ground, side) = doc.cut_side()?;
            cut_diversity(&ground, side)
        }
        other => return Err(CliError::Usage(format!("unknown build kind {other}"))),
    };
    let out = InstanceDocument {
        ground: doc.ground.clone(),
        diversity: Some(table_entries(&table)),
        seed: if kind == "meanwidth" { Some(args.seed.or(doc.seed).unwrap_or(0)) } else { None },
        ..Default::default()
    };
    emit(args, &serde_json::to_value(&out).expect("serializable document"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_embed(args: &Args) -> Result<ExitCode, CliError> {
    let doc = load_document(args)?;
    doc.expect_payload(&["diversity"])?;
    let table = doc.diversity_table()?;
    let fit = min_distortion_l1(&table).map_err(|e| CliError::Domain(e.to_string()))?;
    let embedding = chain_embedding(&fit.witness, 0);
    let ground = table.ground();
    let value = json!({
        "distortion": fit.distortion,
        "witness_splits": split_entries(&fit.witness),
        "embedding": {
            "anchor": ground.label(0),
            "dim": embedding.dim(),
            "coords": embedding.coords,
        },
        "capacity_duals": vector_entries(&fit.capacity_duals),
        "demand_duals": vector_entries(&fit.demand_duals),
    });
    emit(args, &value)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_flowcut(args: &Args) -> Result<ExitCode, CliError> {
    let mode = args
        .mode
        .as_ref()
        .ok_or_else(|| {
            CliError::Usage("flowcut needs --mode maxhsp|mincut|gamma|verify|tight".into())
        })?
        .clone();
    let doc = load_document(args)?;
    let domain = |e: divlab_core::flowcut::FlowCutError| CliError::Domain(e.to_string());

    let load_cd = |doc: &InstanceDocument| -> Result<(SubsetVector, SubsetVector), CliError> {
        doc.expect_payload(&["capacities", "demands"])?;
        Ok((
            doc.subset_vector(&doc.capacities, "capacities")?,
            doc.subset_vector(&doc.demands, "demands")?,
        ))
    };

    let value = match mode.as_str() {
        "maxhsp" => {
            let (c, d) = load_cd(&doc)?;
            let p = max_steiner_packing(&c, &d).map_err(domain)?;
            let ground = c.ground();
            json!({
                "value": p.value,
                "flows": p.flows.iter().map(|f| json!({
                    "demand": subset_labels(ground, f.demand),
                    "cover": f.cover.iter()
                        .map(|&e| subset_labels(ground, p.edges[e].0))
                        .collect::<Vec<_>>(),
                    "weight": f.weight,
                })).collect::<Vec<_>>(),
                "edge_loads": p.edges.iter().zip(&p.edge_loads).map(|(&(e, cap), &load)| json!({
                    "members": subset_labels(ground, e),
                    "capacity": cap,
                    "load": load,
                })).collect::<Vec<_>>(),
            })
        }
        "mincut" => {
            let (c, d) = load_cd(&doc)?;
            let r = min_ratio_cut(&c, &d).map_err(domain)?;
            let ground = c.ground();
            json!({
                "value": r.value,
                "best_side": subset_labels(ground, r.best_side),
                "cuts": r.per_cut.iter().map(|x| json!({
                    "side": subset_labels(ground, x.side),
                    "capacity": x.capacity,
                    "demand": x.demand,
                })).collect::<Vec<_>>(),
            })
        }
        "gamma" => {
            let (c, d) = load_cd(&doc)?;
            let g = flow_cut_gap(&c, &d).map_err(domain)?;
            json!({
                "gap": g.gap,
                "packing_value": g.packing.value,
                "dual_value": g.dual.value,
                "cut_value": g.cut.value,
                "duality_residual": g.duality_residual(),
            })
        }
        "verify" => {
            let (c, d) = load_cd(&doc)?;
            let s = verify_flow_cut_sandwich(&c, &d).map_err(domain)?;
            json!({
                "packing_value": s.packing_value,
                "cut_value": s.cut_value,
                "distortion": s.distortion,
                "dual_value": s.dual_value,
                "holds": s.holds(1e-6),
            })
        }
        "tight" => {
            doc.expect_payload(&["hypergraph"])?;
            let h = doc.hypergraph_value()?;
            let t = hypergraph_steiner_diversity(&h)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            let fit = min_distortion_l1(&t).map_err(|e| CliError::Domain(e.to_string()))?;
            let (c, d) = extract_tight_instance(&t, &h).map_err(domain)?;
            let g = flow_cut_gap(&c, &d).map_err(domain)?;
            json!({
                "distortion": fit.distortion,
                "gap": g.gap,
                "capacities": vector_entries(&c),
                "demands": vector_entries(&d),
            })
        }
        other => return Err(CliError::Usage(format!("unknown flowcut mode {other}"))),
    };
    emit(args, &value)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &Args) -> Result<ExitCode, CliError> {
    let seed = args.seed.unwrap_or(0);
    let n = args.n.unwrap_or(4).clamp(3, 6);
    let count = args.count.unwrap_or(50);
    let threads: usize = std::env::var("DIVLAB_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1);
    let outcomes = run_suites(seed, n, count, threads);
    let failures: Vec<_> = outcomes
        .iter()
        .filter(|o| o.error.is_some())
        .map(|o| {
            json!({
                "suite": o.suite,
                "case": o.case,
                "error": o.error.clone().unwrap_or_default(),
            })
        })
        .collect();
    let ok = failures.is_empty();
    let value = json!({
        "seed": seed,
        "n": n,
        "count": count,
        "cases": outcomes.len(),
        "failures": failures,
    });
    emit(args, &value)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
