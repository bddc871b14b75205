//! Exact solvers: an exhaustive enumeration oracle for micro instances and a
//! branch-and-bound search with symmetry breaking and bound pruning.

use std::time::{Duration, Instant};

use crate::bounds::analytic_lower_bound;
use crate::error::Result;
use crate::heuristic::{greedy_groups, improve, LocalSearchConfig};
use crate::instance::{Instance, Time};
use crate::model::{to_solution, Grouping, Model};
use crate::par::Execution;
use crate::schedule::{evaluate, Solution};

mod oracle;
pub(crate) mod search;

pub use oracle::{brute_force_oracle, oracle_search_space, ORACLE_SPACE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveLimits {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Stop as soon as a solution with at most this Cmax is known.
    pub target: Option<Time>,
    /// Parallel mode splits the search tree across the rayon pool; only the
    /// objective value, not the returned solution, is then reproducible.
    pub execution: Execution,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            target: None,
            execution: Execution::Sequential,
        }
    }
}

impl SolveLimits {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn nodes(limit: u64) -> Self {
        Self {
            node_limit: Some(limit),
            ..Self::default()
        }
    }

    pub fn time(limit: Duration) -> Self {
        Self {
            time_limit: Some(limit),
            ..Self::default()
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub solution: Solution,
    pub cmax: Time,
    /// `true` only when no solution with a smaller Cmax exists.
    pub optimal: bool,
    pub nodes: u64,
    pub wall_time: Duration,
}

pub fn solve_exact(instance: &Instance, limits: &SolveLimits) -> Result<SolveResult> {
    let started = Instant::now();
    let model = Model::new(instance, Grouping::Full)?;
    let outcome = solve_model(
        &model,
        Grouping::Full,
        analytic_lower_bound(instance),
        limits,
    );
    let solution = to_solution(&outcome.groups, instance.periods.len());
    let cmax = evaluate(instance, &solution)?.cmax;
    debug_assert_eq!(cmax, outcome.cmax);
    Ok(SolveResult {
        solution,
        cmax,
        optimal: outcome.optimal,
        nodes: outcome.nodes,
        wall_time: started.elapsed(),
    })
}

/// Heuristic incumbent followed by branch and bound.
pub(crate) fn solve_model(
    model: &Model,
    grouping: Grouping,
    lower_bound: Time,
    limits: &SolveLimits,
) -> search::Outcome {
    let ls = LocalSearchConfig {
        execution: limits.execution,
        ..LocalSearchConfig::default()
    }
    .for_grouping(grouping);
    let incumbent = improve(model, greedy_groups(model, grouping), &ls);
    search::branch_and_bound(model, grouping, incumbent, lower_bound, limits)
}
