use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use netotc::bench::{
    align, distance_matrix, knn_classify, oracle_check, run_factor_bench, run_isomorphism_bench, run_sbm_bench,
    BenchResult, BenchSolver, FactorBenchOptions, SbmBenchSpec,
};
use netotc::cost::{attribute_cost, degree_cost, network_embedding_cost, zero_one_identity, CostMatrix};
use netotc::generators::GeneratorSpec;
use netotc::io::{parse_network_file, parse_tu_dataset};
use netotc::otc::hard_alignment;
use netotc::{DegreeMode, EntropicParams, Error, Network};
use serde::Serialize;
use serde_json::json;

use crate::{Command, CostKind, Format, IsoClass, OutputArgs, PairArgs, SolverArgs, SolverKind};

/// Error reported on stderr as `{"error": kind, "message": ...}`.
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Compare(pair) => compare(&pair),
        Command::Align { pair, hard } => align_pair(&pair, hard),
        Command::Isomorph {
            classes,
            trials,
            seed,
            solver,
            output,
        } => isomorph(&classes, trials, seed, solver, &output),
        Command::SbmBench {
            trials,
            seed,
            solver,
            output,
        } => {
            let result = run_sbm_bench(&SbmBenchSpec::default(), trials, bench_solver(solver)?, seed)?;
            emit_bench(&output, &[("sbm".to_owned(), result)])
        }
        Command::FactorBench {
            sigmas,
            epsilon,
            trials,
            compatible_only,
            seed,
            solver,
            output,
        } => {
            let options = FactorBenchOptions {
                epsilon,
                trials,
                compatible_only,
            };
            let results = run_factor_bench(&sigmas, options, bench_solver(solver)?, seed)?;
            let named: Vec<(String, BenchResult)> = sigmas
                .iter()
                .zip(results)
                .map(|(s, r)| (format!("sigma={s}"), r))
                .collect();
            emit_bench(&output, &named)
        }
        Command::Classify {
            dir,
            name,
            cost,
            k,
            train_fraction,
            repeats,
            seed,
            solver,
            output,
        } => {
            let data = parse_tu_dataset(&dir, &name)?;
            let solver = bench_solver(solver)?;
            let d = distance_matrix(&data.graphs, solver, |a, b| build_cost(a, b, cost))?;
            let mut classes: Vec<i64> = data.labels.clone();
            classes.sort_unstable();
            classes.dedup();
            let ids: Vec<usize> = data
                .labels
                .iter()
                .map(|l| classes.binary_search(l).expect("label present"))
                .collect();
            let r = knn_classify(&d, &ids, k, train_fraction, repeats, seed)?;
            let summary = format!("{:.2} ± {:.2}", 100.0 * r.mean, 100.0 * r.sd);
            match output.format {
                Format::Json => write_out(
                    &output,
                    &pretty(&json!({
                        "dataset": data.name,
                        "graphs": data.graphs.len(),
                        "solver": solver.name(),
                        "k": k,
                        "accuracies": r.accuracies,
                        "mean": r.mean,
                        "sd": r.sd,
                        "summary": summary,
                    })),
                ),
                Format::Csv => {
                    let mut s = String::from("repeat,accuracy\n");
                    for (i, a) in r.accuracies.iter().enumerate() {
                        writeln!(s, "{i},{a}").unwrap();
                    }
                    write_out(&output, &s)
                }
            }?;
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { trials, seed, output } => {
            let report = oracle_check(trials, seed)?;
            let summary = format!("{} mismatches", report.mismatches);
            match output.format {
                Format::Json => {
                    let mut doc = serde_json::to_value(&report).expect("report serializes");
                    doc["summary"] = json!(summary);
                    write_out(&output, &pretty(&doc))?;
                }
                Format::Csv => write_out(
                    &output,
                    &format!(
                        "trials,mismatches,max_gap\n{},{},{:e}\n",
                        report.trials, report.mismatches, report.max_gap
                    ),
                )?,
            }
            if report.mismatches > 0 {
                return Err(CliError {
                    kind: "OracleMismatch",
                    message: summary,
                });
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output documents serialize") + "\n"
}

fn write_out(output: &OutputArgs, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn bench_solver(args: SolverArgs) -> CliResult<BenchSolver> {
    Ok(match args.solver {
        SolverKind::Exact => BenchSolver::Exact,
        SolverKind::Onestep => BenchSolver::OneStep,
        SolverKind::Ot => BenchSolver::MarginalOt,
        SolverKind::Entropic => {
            if args.outer == 0 || args.horizon == 0 || args.sinkhorn_iters == 0 || !(args.xi > 0.0) {
                return Err(Error::InvalidParameter("L, T and --sinkhorn-iters must be ≥ 1 and --xi > 0".into()).into());
            }
            BenchSolver::Entropic(EntropicParams {
                outer_iterations: args.outer,
                horizon: args.horizon,
                xi: args.xi,
                sinkhorn_iterations: args.sinkhorn_iters,
            })
        }
    })
}

fn build_cost(g1: &Network, g2: &Network, kind: CostKind) -> Result<CostMatrix, Error> {
    match kind {
        CostKind::Identity => {
            if g1.n() != g2.n() {
                return Err(Error::DimensionMismatch {
                    expected: g1.n(),
                    found: g2.n(),
                });
            }
            Ok(zero_one_identity(g1.n()))
        }
        CostKind::Attr => attribute_cost(g1, g2),
        CostKind::Degree => degree_cost(g1, g2, false, DegreeMode::Out),
        CostKind::Sdegree => degree_cost(g1, g2, true, DegreeMode::Out),
        CostKind::Eucl => network_embedding_cost(g1, g2, false),
        CostKind::Sqeucl => network_embedding_cost(g1, g2, true),
    }
}

fn load_pair(pair: &PairArgs) -> CliResult<(Network, Network, CostMatrix)> {
    let g1 = parse_network_file(&pair.g1)?;
    let g2 = parse_network_file(&pair.g2)?;
    let cost = build_cost(&g1, &g2, pair.cost)?;
    Ok((g1, g2, cost))
}

fn compare(pair: &PairArgs) -> CliResult<ExitCode> {
    let (g1, g2, cost) = load_pair(pair)?;
    let solver = bench_solver(pair.solver)?;
    let doc = match solver {
        BenchSolver::MarginalOt => {
            let a = align(&g1, &g2, &cost, solver)?;
            json!({ "rho": a.rho, "solver": solver.name() })
        }
        _ => {
            let sol = solve(&g1, &g2, &cost, solver)?;
            json!({
                "rho": sol.rho,
                "solver": solver.name(),
                "iterations": sol.diagnostics.iterations,
                "objective_history": sol.diagnostics.objective_history,
                "sinkhorn_residual": sol.diagnostics.sinkhorn_residual,
            })
        }
    };
    match pair.output.format {
        Format::Json => write_out(&pair.output, &pretty(&doc))?,
        Format::Csv => write_out(
            &pair.output,
            &format!("solver,rho\n{},{}\n", solver.name(), doc["rho"].as_f64().unwrap_or(f64::NAN)),
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(g1: &Network, g2: &Network, cost: &CostMatrix, solver: BenchSolver) -> Result<netotc::OtcSolution, Error> {
    match solver {
        BenchSolver::Exact => netotc::solve_exact_otc(g1, g2, cost),
        BenchSolver::Entropic(p) => netotc::solve_entropic_otc(g1, g2, cost, p),
        BenchSolver::OneStep => netotc::otc::one_step_otc_baseline(g1, g2, cost),
        BenchSolver::MarginalOt => unreachable!("handled by the caller"),
    }
}

fn align_pair(pair: &PairArgs, hard: bool) -> CliResult<ExitCode> {
    let (g1, g2, cost) = load_pair(pair)?;
    let solver = bench_solver(pair.solver)?;
    let a = align(&g1, &g2, &cost, solver)?;
    let psi = hard.then(|| hard_alignment(&a.vertex));
    match pair.output.format {
        Format::Json => {
            let rows: Vec<Vec<f64>> = a.vertex.row_iter().map(|r| r.iter().copied().collect()).collect();
            let mut doc = json!({
                "rho": a.rho,
                "solver": solver.name(),
                "vertex_alignment": rows,
            });
            if let Some(edges) = &a.edge {
                doc["edge_alignment"] = serde_json::to_value(edges).expect("edges serialize");
            }
            if let Some(psi) = &psi {
                doc["hard_alignment"] = json!(psi);
            }
            write_out(&pair.output, &pretty(&doc))?;
        }
        Format::Csv => {
            let mut s = String::from("kind,u,v,u_next,v_next,mass\n");
            for u in 0..a.vertex.nrows() {
                for v in 0..a.vertex.ncols() {
                    let m = a.vertex[(u, v)];
                    if m > 0.0 {
                        writeln!(s, "vertex,{u},{v},,,{m}").unwrap();
                    }
                }
            }
            for e in a.edge.iter().flatten() {
                writeln!(s, "edge,{},{},{},{},{}", e.edge1.0, e.edge2.0, e.edge1.1, e.edge2.1, e.mass).unwrap();
            }
            for (u, v) in psi.iter().flatten().enumerate() {
                writeln!(s, "hard,{u},{v},,,").unwrap();
            }
            write_out(&pair.output, &s)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn class_spec(class: IsoClass) -> (&'static str, GeneratorSpec) {
    match class {
        IsoClass::ErSmallThird => ("er-small-third", GeneratorSpec::erdos_renyi((6, 15), 1.0 / 3.0)),
        IsoClass::ErSmallTwoThirds => ("er-small-two-thirds", GeneratorSpec::erdos_renyi((6, 15), 2.0 / 3.0)),
        IsoClass::ErLargeQuarter => ("er-large-quarter", GeneratorSpec::erdos_renyi((16, 25), 0.25)),
        IsoClass::ErLargeThreeQuarters => ("er-large-three-quarters", GeneratorSpec::erdos_renyi((16, 25), 0.75)),
        IsoClass::Sbm7777 => ("sbm-7-7-7-7", GeneratorSpec::sbm(vec![7, 7, 7, 7], 0.7, 0.1)),
        IsoClass::Sbm1086 => ("sbm-10-8-6", GeneratorSpec::sbm(vec![10, 8, 6], 0.7, 0.1)),
        IsoClass::Sbm777 => ("sbm-7-7-7", GeneratorSpec::sbm(vec![7, 7, 7], 0.7, 0.1)),
        IsoClass::Weighted012 => ("weighted-012", GeneratorSpec::random_weighted_adjacency(vec![0, 1, 2])),
        IsoClass::Lollipop => ("lollipop", GeneratorSpec::lollipop()),
    }
}

fn isomorph(classes: &[IsoClass], trials: usize, seed: u64, solver: SolverArgs, output: &OutputArgs) -> CliResult<ExitCode> {
    let solver = bench_solver(solver)?;
    let all = [
        IsoClass::ErSmallThird,
        IsoClass::ErSmallTwoThirds,
        IsoClass::ErLargeQuarter,
        IsoClass::ErLargeThreeQuarters,
        IsoClass::Sbm7777,
        IsoClass::Sbm1086,
        IsoClass::Sbm777,
        IsoClass::Weighted012,
        IsoClass::Lollipop,
    ];
    let chosen = if classes.is_empty() { &all[..] } else { classes };
    let mut results = Vec::with_capacity(chosen.len());
    for &class in chosen {
        let (name, spec) = class_spec(class);
        results.push((name.to_owned(), run_isomorphism_bench(&spec, trials, solver, seed)?));
    }
    emit_bench(output, &results)
}

fn emit_bench(output: &OutputArgs, results: &[(String, BenchResult)]) -> CliResult<ExitCode> {
    match output.format {
        Format::Json => {
            let docs: Vec<serde_json::Value> = results
                .iter()
                .map(|(name, r)| {
                    let mut doc = json!({
                        "name": name,
                        "summary": format!("{:.2} ± {:.2}", r.mean, r.sd),
                    });
                    if let (Some(m), Some(s)) = (r.secondary_mean, r.secondary_sd) {
                        doc["secondary_summary"] = json!(format!("{m:.2} ± {s:.2}"));
                    }
                    doc["result"] = serde_json::to_value(r).expect("bench results serialize");
                    doc
                })
                .collect();
            write_out(output, &pretty(&docs))?;
        }
        Format::Csv => {
            let mut s = String::from("name,solver,trials,mean,sd,secondary_mean,secondary_sd\n");
            for (name, r) in results {
                let opt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_default();
                writeln!(
                    s,
                    "{name},{},{},{:.4},{:.4},{},{}",
                    r.solver,
                    r.records.len(),
                    r.mean,
                    r.sd,
                    opt(r.secondary_mean),
                    opt(r.secondary_sd)
                )
                .unwrap();
            }
            write_out(output, &s)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
