//! Solver comparison over instance suites and parameter sweeps.
//!
//! Every instance × method run is independent and gets its own seed derived
//! from the suite entry, so results do not depend on the worker count or on
//! the execution mode.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::{compute_bounds, lower_bound_problem, solve_reduced, upper_bound_problem};
use crate::error::Result;
use crate::exact::{brute_force_oracle, solve_exact, SolveLimits};
use crate::heuristic::{construct_greedy, local_search, LocalSearchConfig};
use crate::instance::{validate, Instance, Time};
use crate::par::{map_collect, with_workers, Execution};
use crate::schedule::{check_solution, evaluate, Solution};

mod io;
mod metrics;

pub use io::{
    load_manifest, parse_manifest, read_runs_csv, write_runs_csv, write_sweep_csv, write_table_csv,
    write_timings_csv,
};
pub use metrics::{best_gap, comparison_table, rank, ComparisonTable, TableRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Oracle,
    Greedy,
    /// Greedy followed by local search.
    Local,
    /// Singleton-group bound model.
    Ub,
    /// Merged-group bound model.
    Lb,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Exact,
        Method::Oracle,
        Method::Greedy,
        Method::Local,
        Method::Ub,
        Method::Lb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Oracle => "oracle",
            Method::Greedy => "greedy",
            Method::Local => "local",
            Method::Ub => "ub",
            Method::Lb => "lb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                format!("unknown method `{s}` (expected exact, oracle, greedy, local, ub or lb)")
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodOutcome {
    pub solution: Solution,
    pub cmax: Time,
    pub optimal: bool,
}

/// Runs one method. `seed` drives the local-search tie-breaks; the other
/// methods are deterministic on their own.
///
/// The `lb` solution may exceed the maximum group size: it is checked
/// against the instance with the capacity relaxed.
pub fn run_method(
    instance: &Instance,
    method: Method,
    limits: &SolveLimits,
    seed: u64,
) -> Result<MethodOutcome> {
    let (solution, optimal) = match method {
        Method::Exact => {
            let r = solve_exact(instance, limits)?;
            (r.solution, r.optimal)
        }
        Method::Oracle => {
            let r = brute_force_oracle(instance)?;
            (r.solution, true)
        }
        Method::Greedy => (construct_greedy(instance)?, false),
        Method::Local => {
            let config = LocalSearchConfig {
                seed,
                execution: limits.execution,
                ..LocalSearchConfig::default()
            };
            (
                local_search(instance, &construct_greedy(instance)?, &config)?,
                false,
            )
        }
        Method::Ub => {
            let r = solve_reduced(&upper_bound_problem(instance)?, limits)?;
            (r.solution, r.optimal)
        }
        Method::Lb => {
            let r = solve_reduced(&lower_bound_problem(instance)?, limits)?;
            (r.solution, r.optimal)
        }
    };
    let checked_against = match method {
        Method::Lb => Instance {
            max_group_size: Time::MAX / 4,
            ..instance.clone()
        },
        _ => instance.clone(),
    };
    let report = check_solution(&checked_against, &solution);
    assert!(report.ok, "{method} produced an invalid solution: {report}");
    let cmax = evaluate(&checked_against, &solution)?.cmax;
    Ok(MethodOutcome {
        solution,
        cmax,
        optimal,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub method: String,
    /// Absent when the run failed.
    pub cmax: Option<Time>,
    pub optimal: bool,
    pub seed: u64,
    pub error: Option<String>,
    /// Not part of `runs.csv`, which stays byte-reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteEntry {
    pub id: String,
    pub instance: Instance,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub methods: Vec<Method>,
    /// Limits for each run; their execution mode applies inside a run.
    pub limits: SolveLimits,
    /// Distribution of runs over workers.
    pub execution: Execution,
    pub workers: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::Greedy, Method::Local, Method::Exact],
            limits: SolveLimits::nodes(1_000_000),
            execution: Execution::default(),
            workers: None,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one run; depends only on the entry seed and the method.
pub fn run_seed(entry_seed: u64, method: Method) -> u64 {
    let index = Method::ALL.iter().position(|&m| m == method).unwrap_or(0) as u64;
    splitmix64(entry_seed ^ splitmix64(index + 1))
}

/// One record per entry × method, entry-major in input order.
pub fn run_suite(entries: &[SuiteEntry], config: &SuiteConfig) -> Vec<RunRecord> {
    let jobs: Vec<(&SuiteEntry, Method)> = entries
        .iter()
        .flat_map(|e| config.methods.iter().map(move |&m| (e, m)))
        .collect();
    with_workers(config.workers, || {
        map_collect(config.execution, &jobs, |&(entry, method)| {
            let seed = run_seed(entry.seed, method);
            let started = Instant::now();
            let outcome = run_method(&entry.instance, method, &config.limits, seed);
            let wall_time = started.elapsed();
            let (cmax, optimal, error) = match outcome {
                Ok(o) => (Some(o.cmax), o.optimal, None),
                Err(e) => (None, false, Some(e.to_string())),
            };
            RunRecord {
                instance: entry.id.clone(),
                method: method.to_string(),
                cmax,
                optimal,
                seed,
                error,
                wall_time,
            }
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepCell {
    pub header_size: Time,
    pub max_group_size: Time,
    pub cmax: Option<Time>,
    pub optimal: bool,
    pub upper: Option<Time>,
    pub upper_optimal: bool,
    /// A proven bound only when `lower_optimal` holds.
    pub lower: Option<Time>,
    pub lower_optimal: bool,
    pub error: Option<String>,
}

/// Method value plus both bound models for every (hs, Smax) pair, hs-major.
/// Cells whose mutated instance is invalid carry the validation error.
pub fn sweep(
    instance: &Instance,
    header_sizes: &[Time],
    max_group_sizes: &[Time],
    method: Method,
    limits: &SolveLimits,
    execution: Execution,
) -> Vec<SweepCell> {
    let grid: Vec<(Time, Time)> = header_sizes
        .iter()
        .flat_map(|&hs| max_group_sizes.iter().map(move |&smax| (hs, smax)))
        .collect();
    map_collect(execution, &grid, |&(hs, smax)| {
        let mutated = Instance {
            header_size: hs,
            max_group_size: smax,
            ..instance.clone()
        };
        let mut cell = SweepCell {
            header_size: hs,
            max_group_size: smax,
            cmax: None,
            optimal: false,
            upper: None,
            upper_optimal: false,
            lower: None,
            lower_optimal: false,
            error: None,
        };
        let report = validate(&mutated);
        if !report.ok {
            cell.error = Some(report.to_string());
            return cell;
        }
        match run_method(&mutated, method, limits, 0) {
            Ok(o) => {
                cell.cmax = Some(o.cmax);
                cell.optimal = o.optimal;
            }
            Err(e) => cell.error = Some(e.to_string()),
        }
        if let Ok(b) = compute_bounds(&mutated, limits) {
            cell.upper = Some(b.upper);
            cell.upper_optimal = b.upper_optimal;
            cell.lower = Some(b.lower);
            cell.lower_optimal = b.lower_optimal;
        }
        cell
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{micro_instance, MicroParams};
    use crate::schedule::tests::instance_a;

    fn suite() -> Vec<SuiteEntry> {
        (0..6)
            .map(|seed| SuiteEntry {
                id: format!("micro-{seed}"),
                instance: micro_instance(&MicroParams::default(), seed),
                seed,
            })
            .collect()
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("gurobi".parse::<Method>().is_err());
    }

    #[test]
    fn every_method_on_instance_a() {
        let limits = SolveLimits::unlimited();
        let get = |m| run_method(&instance_a(), m, &limits, 1).unwrap();
        assert_eq!(get(Method::Exact).cmax, 5);
        assert_eq!(get(Method::Oracle).cmax, 5);
        assert!(get(Method::Greedy).cmax <= 6);
        assert_eq!(get(Method::Local).cmax, 5);
        assert_eq!(get(Method::Ub).cmax, 5);
        assert_eq!(get(Method::Lb).cmax, 5);
    }

    fn untimed(records: &[RunRecord]) -> Vec<RunRecord> {
        records
            .iter()
            .map(|r| RunRecord {
                wall_time: Duration::ZERO,
                ..r.clone()
            })
            .collect()
    }

    #[test]
    fn suite_is_independent_of_execution_and_workers() {
        let config = SuiteConfig {
            methods: Method::ALL.to_vec(),
            limits: SolveLimits::unlimited(),
            execution: Execution::Sequential,
            workers: None,
        };
        let seq = run_suite(&suite(), &config);
        let par = run_suite(
            &suite(),
            &SuiteConfig {
                execution: Execution::Parallel,
                workers: Some(3),
                ..config.clone()
            },
        );
        assert_eq!(seq.len(), 6 * Method::ALL.len());
        assert_eq!(untimed(&seq), untimed(&par));
        for chunk in seq.chunks(Method::ALL.len()) {
            assert_eq!(chunk[0].cmax, chunk[1].cmax, "exact and oracle agree");
        }
    }

    #[test]
    fn failures_are_recorded() {
        let mut big = Instance::new(vec![1, 16], 0, 1000);
        for n in 0..12 {
            big = big.with_task(format!("t{n}"), 16, 1);
        }
        let entries = vec![SuiteEntry {
            id: "big".into(),
            instance: big,
            seed: 0,
        }];
        let config = SuiteConfig {
            methods: vec![Method::Oracle, Method::Greedy],
            ..Default::default()
        };
        let records = run_suite(&entries, &config);
        assert_eq!(records[0].cmax, None);
        assert!(records[0].error.as_deref().unwrap().contains("too large"));
        assert!(records[1].cmax.is_some());
    }

    #[test]
    fn sweep_trends_on_a_micro_instance() {
        let inst = micro_instance(&MicroParams::default(), 5);
        let hs = [0, 1, 2, 3];
        let smax = [15, 20, 30, 1000];
        let cells = sweep(
            &inst,
            &hs,
            &smax,
            Method::Exact,
            &SolveLimits::unlimited(),
            Execution::Parallel,
        );
        assert_eq!(cells.len(), 16);
        let at = |h: usize, s: usize| cells[h * smax.len() + s].cmax;
        for h in 0..hs.len() {
            for s in 1..smax.len() {
                if let (Some(a), Some(b)) = (at(h, s - 1), at(h, s)) {
                    assert!(b <= a);
                }
            }
        }
        for s in 0..smax.len() {
            for h in 1..hs.len() {
                if let (Some(a), Some(b)) = (at(h - 1, s), at(h, s)) {
                    assert!(b >= a);
                }
            }
        }
        let collapsed = &cells[smax.len() - 1];
        assert_eq!(collapsed.upper, collapsed.cmax);
        assert_eq!(collapsed.lower, collapsed.cmax);
        assert!(collapsed.upper_optimal && collapsed.lower_optimal);
    }

    #[test]
    fn sweep_records_invalid_cells() {
        let cells = sweep(
            &instance_a(),
            &[1],
            &[2, 4],
            Method::Greedy,
            &SolveLimits::unlimited(),
            Execution::Sequential,
        );
        assert!(cells[0]
            .error
            .as_deref()
            .unwrap()
            .contains("TASK_TOO_LARGE"));
        assert_eq!(cells[1].cmax.map(|c| c <= 6), Some(true));
    }
}
