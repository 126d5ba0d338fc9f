use crate::{SolveArgs, SolveMethod, Topology};
use anyhow::{Context, Result};
use sqaoa_core::baselines::{exact_optimum, greedy_multicolor, TieBreak};
use sqaoa_core::engine::subspace::MixerTopology;
use sqaoa_core::experiments::report::{fmt_f64, CsvTable};
use sqaoa_core::model::{metrics, AllocationBits};
use sqaoa_core::qaoa::{optimize, AnsatzConfig, AnsatzKind, NelderMead, OptimizationResult, QaoaRunner};
use sqaoa_core::ProblemInstance;
use std::path::PathBuf;

fn label(method: SolveMethod) -> &'static str {
    match method {
        SolveMethod::Exact => "exact",
        SolveMethod::Greedy => "greedy",
        SolveMethod::Standard => "standard",
        SolveMethod::DickeXy => "dicke-xy",
        SolveMethod::Dual => "dual",
    }
}

struct Outcome {
    witness: Option<AllocationBits>,
    notes: Vec<String>,
    qaoa: Option<OptimizationResult>,
}

fn run_qaoa(inst: &ProblemInstance, args: &SolveArgs, kind: AnsatzKind) -> Result<Outcome> {
    let mut config = AnsatzConfig::new(kind)
        .with_depth(args.depth)
        .with_shots(args.shots)
        .with_seed(args.seed);
    config.lambda = args.lambda;
    config.topology = match args.topology {
        Topology::Complete => MixerTopology::Complete,
        Topology::Ring => MixerTopology::Ring,
    };
    let runner = QaoaRunner::<f64>::new(inst, config)?;
    let result = optimize(&runner, &NelderMead::with_budget(args.budget))?;
    let params = result
        .best_params
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(" ");
    let notes = vec![
        format!("best_params={params}"),
        format!("best_mean_cost={}", fmt_f64(result.best_cost)),
        format!("evaluations={}", result.trace.len()),
        format!("final_feasibility_ratio={}", fmt_f64(result.final_feasibility_ratio)),
    ];
    Ok(Outcome {
        witness: result.best_feasible.as_ref().map(|b| b.1.clone()),
        notes,
        qaoa: Some(result),
    })
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let inst = ProblemInstance::from_json_file(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let outcome = match args.method {
        SolveMethod::Exact => {
            let r = exact_optimum(&inst)?;
            Outcome {
                notes: vec![format!("optimal_count={}", r.optimal_count)],
                witness: Some(r.witness),
                qaoa: None,
            }
        }
        SolveMethod::Greedy => {
            let tie = if args.random_ties {
                TieBreak::Random(args.seed)
            } else {
                TieBreak::Deterministic
            };
            let r = greedy_multicolor(&inst, tie)?;
            Outcome {
                notes: vec![format!("unmet_demand={}", r.unmet_demand)],
                witness: Some(r.allocation),
                qaoa: None,
            }
        }
        SolveMethod::Standard => run_qaoa(&inst, args, AnsatzKind::StandardPenalty)?,
        SolveMethod::DickeXy => run_qaoa(&inst, args, AnsatzKind::DickeXy)?,
        SolveMethod::Dual => run_qaoa(&inst, args, AnsatzKind::DualPlaquette)?,
    };

    let method = label(args.method);
    let dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("sqaoa-out/solve-{method}-seed{}", args.seed)));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut table = CsvTable::new(
        args.seed,
        &["method", "witness", "conflicts", "deviation", "node_feasible", "channel_feasible", "penalty_cost"],
    );
    table.comment(format!("instance={}", inst.name()));
    for note in &outcome.notes {
        table.comment(note.clone());
    }
    println!("instance {} (n={}, m={})", inst.name(), inst.n(), inst.m());
    println!("method {method}, seed {}", args.seed);
    match &outcome.witness {
        Some(x) => {
            let m = metrics(&inst, x, args.lambda)?;
            table.push(vec![
                method.to_string(),
                x.to_string(),
                m.conflicts.to_string(),
                m.deviation.to_string(),
                m.node_feasible.to_string(),
                m.channel_feasible.to_string(),
                fmt_f64(m.penalty_cost),
            ]);
            println!("allocation {x}");
            println!("conflicts {}", m.conflicts);
            println!("deviation {}", m.deviation);
        }
        None => println!("no feasible sample observed"),
    }
    for note in &outcome.notes {
        println!("{}", note.replace('=', " "));
    }
    let solution = dir.join("solution.csv");
    std::fs::write(&solution, table.to_csv_string()?)
        .with_context(|| format!("writing {}", solution.display()))?;
    println!("wrote {}", solution.display());
    if let Some(r) = &outcome.qaoa {
        let trace = dir.join("trace.csv");
        std::fs::write(&trace, r.trace.table(args.seed).to_csv_string()?)
            .with_context(|| format!("writing {}", trace.display()))?;
        println!("wrote {}", trace.display());
    }
    Ok(())
}
