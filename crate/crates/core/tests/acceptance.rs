//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tt_grouper::bench::{best_gap, sweep, Method, RunRecord};
use tt_grouper::bounds::{analytic_lower_bound, compute_bounds};
use tt_grouper::exact::{brute_force_oracle, solve_exact, SolveLimits};
use tt_grouper::heuristic::{construct_greedy, local_search, LocalSearchConfig};
use tt_grouper::instance::{generate_instance, micro_instance, GeneratorParams, MicroParams};
use tt_grouper::milp::{
    build_model, export_lp, model_statistics, parse_lp, solution_values, FamilyCounts, LpOptions,
};
use tt_grouper::par::Execution;
use tt_grouper::schedule::{check_solution, evaluate, expand_start_times, timeline_consistency};
use tt_grouper::{Instance, Time};

const MICRO_SUITE: u64 = 100;

/// Seeds alternate between a binding and a non-binding maximum group size.
fn micro_suite() -> Vec<Instance> {
    (0..MICRO_SUITE)
        .map(|seed| {
            let params = MicroParams {
                huge_smax: seed % 2 == 1,
                ..MicroParams::default()
            };
            micro_instance(&params, seed)
        })
        .collect()
}

type Verdict = Result<String, String>;

fn within(started: Instant, budget: Duration, detail: String) -> Verdict {
    let elapsed = started.elapsed();
    if elapsed > budget {
        Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}"))
    } else {
        Ok(format!("{detail}; {elapsed:.2?}"))
    }
}

fn oracle_equivalence(suite: &[Instance]) -> Verdict {
    let started = Instant::now();
    for (seed, inst) in suite.iter().enumerate() {
        let exact = solve_exact(inst, &SolveLimits::unlimited()).map_err(|e| e.to_string())?;
        let oracle = brute_force_oracle(inst).map_err(|e| e.to_string())?;
        if !exact.optimal || exact.cmax != oracle.cmax {
            return Err(format!(
                "seed {seed}: exact {} (optimal {}) vs oracle {}",
                exact.cmax, exact.optimal, oracle.cmax
            ));
        }
    }
    within(
        started,
        Duration::from_secs(60),
        format!("{} instances equal", suite.len()),
    )
}

fn bound_sandwich(suite: &[Instance]) -> Verdict {
    for (seed, inst) in suite.iter().enumerate() {
        let b = compute_bounds(inst, &SolveLimits::unlimited()).map_err(|e| e.to_string())?;
        let exact = brute_force_oracle(inst).map_err(|e| e.to_string())?.cmax;
        if !(b.lower_optimal && b.upper_optimal) {
            return Err(format!("seed {seed}: bound model not solved to optimality"));
        }
        if !(b.analytic_lower <= b.lower && b.lower <= exact && exact <= b.upper) {
            return Err(format!(
                "seed {seed}: analytic {} lb {} exact {exact} ub {}",
                b.analytic_lower, b.lower, b.upper
            ));
        }
    }
    Ok(format!(
        "analytic <= lb <= exact <= ub on {} instances",
        suite.len()
    ))
}

fn sweep_trends(suite: &[Instance]) -> Verdict {
    let started = Instant::now();
    let hs: [Time; 4] = [0, 1, 2, 3];
    let mut cells_checked = 0;
    for (seed, inst) in suite.iter().take(20).enumerate() {
        let m = inst.tasks.iter().map(|t| t.proc).max().unwrap_or(1);
        let smax = [m + 3, m + 6, m + 10, 1000];
        let cells = sweep(
            inst,
            &hs,
            &smax,
            Method::Exact,
            &SolveLimits::unlimited(),
            Execution::Parallel,
        );
        let at = |h: usize, s: usize| {
            let c = &cells[h * smax.len() + s];
            match (c.cmax, c.optimal) {
                (Some(v), true) => Ok(v),
                _ => Err(format!(
                    "seed {seed} hs {} smax {}: {:?}",
                    hs[h], smax[s], c.error
                )),
            }
        };
        for h in 0..hs.len() {
            for s in 0..smax.len() {
                let v = at(h, s)?;
                cells_checked += 1;
                if s > 0 && v > at(h, s - 1)? {
                    return Err(format!(
                        "seed {seed} hs {}: Cmax rises with Smax {} -> {}",
                        hs[h],
                        smax[s - 1],
                        smax[s]
                    ));
                }
                if h > 0 && v < at(h - 1, s)? {
                    return Err(format!(
                        "seed {seed} smax {}: Cmax falls with hs {} -> {}",
                        smax[s],
                        hs[h - 1],
                        hs[h]
                    ));
                }
            }
        }
    }
    within(
        started,
        Duration::from_secs(300),
        format!("{cells_checked} cells monotone over 20 instances"),
    )
}

fn bounds_collapse(suite: &[Instance]) -> Verdict {
    for (seed, inst) in suite.iter().enumerate() {
        let largest_class: Time = inst
            .tasks_by_period()
            .iter()
            .map(|c| c.iter().map(|&i| inst.tasks[i].proc).sum())
            .max()
            .unwrap_or(0);
        let relaxed = Instance {
            header_size: 0,
            max_group_size: largest_class.max(1),
            ..inst.clone()
        };
        let b = compute_bounds(&relaxed, &SolveLimits::unlimited()).map_err(|e| e.to_string())?;
        let exact = solve_exact(&relaxed, &SolveLimits::unlimited()).map_err(|e| e.to_string())?;
        if !(b.lower == exact.cmax && exact.cmax == b.upper) {
            return Err(format!(
                "seed {seed}: lb {} exact {} ub {}",
                b.lower, exact.cmax, b.upper
            ));
        }
    }
    Ok(format!("lb = exact = ub on {} instances", suite.len()))
}

fn timeline_invariants() -> Verdict {
    let started = Instant::now();
    let mut largest = 0;
    for seed in 0..200u64 {
        let params = GeneratorParams {
            tasks: 50 + (seed as usize * 37) % 551,
            period_count: 1 + (seed as usize % 6),
            multiplier_choices: vec![2, 3, 4],
            base_period: 4000,
            ..GeneratorParams::default()
        };
        largest = largest.max(params.tasks);
        let inst = generate_instance(&params, seed).map_err(|e| e.to_string())?;
        let sol = construct_greedy(&inst).map_err(|e| e.to_string())?;
        if !timeline_consistency(&inst, &sol) {
            return Err(format!("seed {seed}: timeline inconsistent"));
        }
        // Explicit periodicity check on top of the consistency predicate.
        let timeline = expand_start_times(&inst, &sol).map_err(|e| e.to_string())?;
        let mut first: Vec<Option<Time>> = vec![None; sol.groups.len()];
        for o in &timeline.occurrences {
            let start0 = *first[o.group].get_or_insert(o.start);
            let period = inst.periods[o.period_index];
            if o.start != start0 + o.occurrence as Time * period {
                return Err(format!(
                    "seed {seed}: group {} occurrence {} off period",
                    o.group, o.occurrence
                ));
            }
        }
        let row_max = (0..timeline.row_count)
            .map(|r| {
                timeline
                    .row(r)
                    .last()
                    .map_or(0, |o| o.end - r as Time * timeline.base_period)
            })
            .max()
            .unwrap_or(0);
        let cmax = evaluate(&inst, &sol).map_err(|e| e.to_string())?.cmax;
        if row_max != cmax {
            return Err(format!("seed {seed}: row walk {row_max} vs modular {cmax}"));
        }
    }
    within(
        started,
        Duration::from_secs(120),
        format!("200 greedy schedules consistent, up to n = {largest}"),
    )
}

fn heuristic_quality(suite: &[Instance]) -> Verdict {
    let mut gaps = Vec::new();
    for (seed, inst) in suite.iter().enumerate() {
        let start = construct_greedy(inst).map_err(|e| e.to_string())?;
        let start_cmax = evaluate(inst, &start).map_err(|e| e.to_string())?.cmax;
        let config = LocalSearchConfig {
            seed: seed as u64,
            ..LocalSearchConfig::default()
        };
        let improved = local_search(inst, &start, &config).map_err(|e| e.to_string())?;
        if !check_solution(inst, &improved).ok {
            return Err(format!(
                "seed {seed}: local search returned an invalid solution"
            ));
        }
        let cmax = evaluate(inst, &improved).map_err(|e| e.to_string())?.cmax;
        if cmax > start_cmax {
            return Err(format!(
                "seed {seed}: local search worsened {start_cmax} -> {cmax}"
            ));
        }
        let oracle = brute_force_oracle(inst).map_err(|e| e.to_string())?.cmax;
        let records = [
            RunRecord {
                method: "oracle".into(),
                cmax: Some(oracle),
                ..Default::default()
            },
            RunRecord {
                method: "local".into(),
                cmax: Some(cmax),
                ..Default::default()
            },
        ];
        gaps.push(best_gap(&records.iter().collect::<Vec<_>>())["local"]);
    }
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len();
    let median = if n % 2 == 1 {
        gaps[n / 2]
    } else {
        (gaps[n / 2 - 1] + gaps[n / 2]) / 2.0
    };
    let mean = gaps.iter().sum::<f64>() / n as f64;
    let optimal = gaps.iter().filter(|&&g| g == 0.0).count();
    let target = if median <= 10.0 { "met" } else { "missed" };
    Ok(format!(
        "valid and non-worsening; median bg {median:.2}% (soft target 10%: {target}), mean bg {mean:.2}%, max {:.2}%, {optimal}/{n} optimal",
        gaps[n - 1]
    ))
}

fn milp_soundness(suite: &[Instance]) -> Verdict {
    let options = LpOptions::default();
    for (seed, inst) in suite.iter().enumerate() {
        let oracle = brute_force_oracle(inst).map_err(|e| e.to_string())?;
        let text = export_lp(inst, &options).map_err(|e| e.to_string())?;
        let parsed = parse_lp(&text).map_err(|e| e.to_string())?;
        if parsed != build_model(inst, &options).map_err(|e| e.to_string())? {
            return Err(format!(
                "seed {seed}: parsed model differs from built model"
            ));
        }
        let values = solution_values(inst, &oracle.solution).map_err(|e| e.to_string())?;
        let violated = parsed.violations(&values);
        if !violated.is_empty() {
            return Err(format!("seed {seed}: violated {violated:?}"));
        }
        if parsed.objective_value(&values) != oracle.cmax as i64 {
            return Err(format!(
                "seed {seed}: objective {} vs {}",
                parsed.objective_value(&values),
                oracle.cmax
            ));
        }
        let stats = model_statistics(inst, &options).map_err(|e| e.to_string())?;
        if FamilyCounts::recount(&parsed) != stats.counts {
            return Err(format!("seed {seed}: recount differs from statistics"));
        }
    }
    Ok(format!(
        "{} oracle optima feasible with equal objective; counts match",
        suite.len()
    ))
}

fn cli(args: &[&str], dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tt-grouper"))
        .args(args)
        .current_dir(dir)
        .env_remove("TT_GROUPER_WORKERS")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let read = |name: &str| std::fs::read(d.join(name)).map_err(|e| format!("{name}: {e}"));
    let mut compared = 0;
    let mut same = |a: Vec<u8>, b: Vec<u8>, what: &str| -> Result<(), String> {
        compared += 1;
        if a.is_empty() || a != b {
            return Err(format!("{what} differs between runs"));
        }
        Ok(())
    };

    let gen = [
        "generate",
        "--seed",
        "7",
        "--tasks",
        "120",
        "--periods",
        "5",
    ];
    same(cli(&gen, d)?, cli(&gen, d)?, "generate")?;
    cli(&[&gen[..], &["-o", "big.txt"]].concat(), d)?;
    for seed in 0..4 {
        let name = format!("m{seed}.txt");
        let s = seed.to_string();
        cli(&["generate", "--micro", "--seed", &s, "-o", &name], d)?;
    }
    std::fs::write(
        d.join("suite.txt"),
        "m0.txt 1\nm1.txt 2\nm2.txt 3\nm3.txt 4\nbig.txt 5\n",
    )
    .map_err(|e| e.to_string())?;

    for method in ["exact", "local", "greedy", "ub", "lb"] {
        let args = [
            "solve",
            "big.txt",
            "--method",
            method,
            "--seed",
            "3",
            "--node-limit",
            "20000",
        ];
        same(cli(&args, d)?, cli(&args, d)?, method)?;
    }
    cli(
        &[
            "solve", "big.txt", "--method", "local", "--seed", "3", "-o", "big.sol",
        ],
        d,
    )?;

    for kind in ["svg", "text"] {
        let args = ["render", "big.txt", "big.sol", "--kind", kind];
        same(cli(&args, d)?, cli(&args, d)?, kind)?;
    }
    same(
        cli(&["export-lp", "big.txt"], d)?,
        cli(&["export-lp", "big.txt"], d)?,
        "export-lp",
    )?;

    let suite = |out: &str, workers: &str| {
        cli(
            &[
                "--workers",
                workers,
                "bench",
                "suite",
                "suite.txt",
                "--methods",
                "greedy,local,exact,oracle,ub,lb",
                "--node-limit",
                "20000",
                "--out-dir",
                out,
            ],
            d,
        )
    };
    suite("r1", "1")?;
    suite("r2", "4")?;
    for file in ["runs.csv", "table.csv"] {
        same(
            read(&format!("r1/{file}"))?,
            read(&format!("r2/{file}"))?,
            file,
        )?;
    }
    let sweep = [
        "bench", "sweep", "m0.txt", "--hs", "0,1,2", "--smax", "20,40",
    ];
    same(cli(&sweep, d)?, cli(&sweep, d)?, "sweep")?;
    Ok(format!("{compared} output pairs byte-identical"))
}

fn instance_a() -> Verdict {
    let inst = Instance::new(vec![4, 8], 1, 4)
        .with_task("t1", 4, 2)
        .with_task("t2", 8, 1)
        .with_task("t3", 8, 1);
    let oracle = brute_force_oracle(&inst).map_err(|e| e.to_string())?;
    let eval = evaluate(&inst, &oracle.solution).map_err(|e| e.to_string())?;
    let exact = solve_exact(&inst, &SolveLimits::unlimited()).map_err(|e| e.to_string())?;
    let analytic = analytic_lower_bound(&inst);
    if (eval.cmax, eval.feasible, eval.margin, exact.cmax) != (5, false, -1, 5) {
        return Err(format!(
            "cmax {} feasible {} margin {} exact {}",
            eval.cmax, eval.feasible, eval.margin, exact.cmax
        ));
    }
    Ok(format!(
        "cmax 5, feasible false, margin -1, analytic bound {analytic}"
    ))
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() -> ExitCode {
    let suite = micro_suite();
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        (
            "1 oracle equivalence",
            Box::new(|| oracle_equivalence(&suite)),
        ),
        ("2 bound sandwich", Box::new(|| bound_sandwich(&suite))),
        ("3 hs/Smax sweep trends", Box::new(|| sweep_trends(&suite))),
        ("4 bounds collapse", Box::new(|| bounds_collapse(&suite))),
        (
            "5 canonical timeline invariants",
            Box::new(timeline_invariants),
        ),
        (
            "6 heuristic quality report",
            Box::new(|| heuristic_quality(&suite)),
        ),
        (
            "7 MILP export soundness",
            Box::new(|| milp_soundness(&suite)),
        ),
        ("8 determinism", Box::new(determinism)),
        ("9 worked instance A", Box::new(instance_a)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
