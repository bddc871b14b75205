//! Bounds on the optimal Cmax from two simplified models and a utilization
//! argument.
//!
//! * Upper bound: every task travels in its own group (one header per task),
//!   leaving only the interval assignment to optimize. Any such solution is
//!   feasible for the full problem.
//! * Lower bound: the group capacity is dropped, so all tasks of one period
//!   placed in the same interval share a single header. Every full solution
//!   maps to a merged solution that is no worse.
//! * Analytic bound: average row utilization without headers, and the
//!   largest contribution some row must carry.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::exact::{solve_model, SolveLimits};
use crate::instance::{derive_period_structure, Instance, PeriodStructure, Time};
use crate::model::{merge_shared_intervals, to_solution, Grouping, Model};
use crate::schedule::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedKind {
    UpperSingleton,
    LowerMerged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedItem {
    pub task: usize,
    /// `hs + proc` for singleton items; the bare payload for merged items,
    /// whose header is charged once per used interval.
    pub size: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedProblem {
    pub kind: ReducedKind,
    /// Items per period index.
    pub items: Vec<Vec<ReducedItem>>,
    pub structure: PeriodStructure,
    pub header_size: Time,
    instance: Instance,
}

pub fn upper_bound_problem(instance: &Instance) -> Result<ReducedProblem> {
    reduced(instance, ReducedKind::UpperSingleton)
}

pub fn lower_bound_problem(instance: &Instance) -> Result<ReducedProblem> {
    reduced(instance, ReducedKind::LowerMerged)
}

fn reduced(instance: &Instance, kind: ReducedKind) -> Result<ReducedProblem> {
    // Model::new validates.
    Model::new(instance, Grouping::Full)?;
    let structure = derive_period_structure(instance)?;
    let header = match kind {
        ReducedKind::UpperSingleton => instance.header_size,
        ReducedKind::LowerMerged => 0,
    };
    let items = instance
        .tasks_by_period()
        .into_iter()
        .map(|class| {
            class
                .into_iter()
                .map(|task| ReducedItem {
                    task,
                    size: header + instance.tasks[task].proc,
                })
                .collect()
        })
        .collect();
    Ok(ReducedProblem {
        kind,
        items,
        structure,
        header_size: instance.header_size,
        instance: instance.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSolution {
    pub value: Time,
    /// For the merged model this solution may exceed the maximum group size;
    /// it is valid for the instance with the capacity relaxed.
    pub solution: Solution,
    pub optimal: bool,
}

/// Exact branch and bound within `limits`, started from a heuristic
/// incumbent; on budget exhaustion the best solution found is returned with
/// `optimal = false`.
pub fn solve_reduced(problem: &ReducedProblem, limits: &SolveLimits) -> Result<ReducedSolution> {
    let grouping = match problem.kind {
        ReducedKind::UpperSingleton => Grouping::Singleton,
        ReducedKind::LowerMerged => Grouping::Merged,
    };
    let model = Model::new(&problem.instance, grouping)?;
    let outcome = solve_model(
        &model,
        grouping,
        analytic_lower_bound(&problem.instance),
        limits,
    );
    let groups = match problem.kind {
        ReducedKind::LowerMerged => merge_shared_intervals(&model, outcome.groups),
        ReducedKind::UpperSingleton => outcome.groups,
    };
    Ok(ReducedSolution {
        value: outcome.cmax,
        solution: to_solution(&groups, problem.structure.periods.len()),
        optimal: outcome.optimal,
    })
}

/// Cheap valid lower bound; 0 for an instance without tasks.
pub fn analytic_lower_bound(instance: &Instance) -> Time {
    let Ok(structure) = derive_period_structure(instance) else {
        return 0;
    };
    if instance.tasks.is_empty() || structure.row_count == 0 {
        return 0;
    }
    let classes = instance.tasks_by_period();
    let payload_mass: Time = classes
        .iter()
        .enumerate()
        .flat_map(|(u, class)| {
            let occ = structure.occurrences(u) as Time;
            class.iter().map(move |&i| instance.tasks[i].proc * occ)
        })
        .sum();
    let average = payload_mass.div_ceil(structure.row_count as Time);

    let largest_task = instance
        .tasks
        .iter()
        .map(|t| instance.header_size + t.proc)
        .max()
        .unwrap_or(0);
    // Shortest-period tasks occupy every row.
    let base_class = classes.first().filter(|c| !c.is_empty()).map_or(0, |c| {
        instance.header_size + c.iter().map(|&i| instance.tasks[i].proc).sum::<Time>()
    });

    average.max(largest_task).max(base_class)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub lower: Time,
    pub lower_optimal: bool,
    pub upper: Time,
    pub upper_optimal: bool,
    pub analytic_lower: Time,
    pub wall_time: Duration,
}

pub fn compute_bounds(instance: &Instance, limits: &SolveLimits) -> Result<BoundsReport> {
    let started = Instant::now();
    let lower = solve_reduced(&lower_bound_problem(instance)?, limits)?;
    let upper = solve_reduced(&upper_bound_problem(instance)?, limits)?;
    Ok(BoundsReport {
        lower: lower.value,
        lower_optimal: lower.optimal,
        upper: upper.value,
        upper_optimal: upper.optimal,
        analytic_lower: analytic_lower_bound(instance),
        wall_time: started.elapsed(),
    })
}
