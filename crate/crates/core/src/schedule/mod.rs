//! Solutions (grouping plus first-occurrence interval), their evaluation, and
//! expansion into explicit start times under canonical order.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::instance::{
    derive_period_structure, Instance, PeriodStructure, Time, ValidationReport, Violation,
    ViolationCode,
};

mod format;
mod timeline;

pub use format::{parse_solution, serialize_solution};
pub use timeline::{expand_start_times, timeline_consistency, Occurrence, ScheduleTimeline};

/// A message: same-period tasks sent with one header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub period_index: usize,
    /// Unique within the period.
    pub group_id: u32,
    /// Task indices into [`Instance::tasks`].
    pub members: Vec<usize>,
    /// Interval of the first occurrence; `None` only for empty groups.
    pub interval: Option<usize>,
}

impl Group {
    pub fn new(period_index: usize, group_id: u32, members: Vec<usize>, interval: usize) -> Self {
        Self {
            period_index,
            group_id,
            members,
            interval: Some(interval),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Solution {
    pub groups: Vec<Group>,
}

impl Solution {
    pub fn new(groups: Vec<Group>) -> Self {
        Self { groups }
    }

    /// Sorts groups into canonical `(period_index, group_id)` order and
    /// members ascending; drops empty groups.
    pub fn normalized(mut self) -> Self {
        self.groups.retain(|g| !g.is_empty());
        for g in &mut self.groups {
            g.members.sort_unstable();
        }
        self.groups.sort_by_key(|g| (g.period_index, g.group_id));
        self
    }

    pub fn nonempty_groups(&self) -> impl Iterator<Item = &Group> {
        self.groups.iter().filter(|g| !g.is_empty())
    }
}

/// Size of a group: header plus payload when nonempty, zero otherwise.
pub fn group_size(members: &[usize], instance: &Instance) -> Result<Time> {
    if members.is_empty() {
        return Ok(0);
    }
    let mut size = instance.header_size;
    for &m in members {
        size += instance.tasks.get(m).ok_or(Error::UnknownTask(m))?.proc;
    }
    Ok(size)
}

pub fn check_solution(instance: &Instance, solution: &Solution) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |code, message: String| violations.push(Violation { code, message });

    let structure = match derive_period_structure(instance) {
        Ok(s) => s,
        Err(e) => {
            push(ViolationCode::NonHarmonic, e.to_string());
            return ValidationReport::from_violations(violations);
        }
    };

    let mut seen_ids = HashSet::new();
    let mut task_count = vec![0usize; instance.tasks.len()];
    for g in &solution.groups {
        let label = format!("group {}/{}", g.period_index, g.group_id);
        if !seen_ids.insert((g.period_index, g.group_id)) {
            push(
                ViolationCode::DuplicateGroup,
                format!("{label} defined twice"),
            );
        }
        let Some(&period) = instance.periods.get(g.period_index) else {
            push(
                ViolationCode::BadPeriodRef,
                format!("{label} refers to unknown period index"),
            );
            continue;
        };
        let mut size = if g.is_empty() {
            0
        } else {
            instance.header_size
        };
        for &m in &g.members {
            let Some(task) = instance.tasks.get(m) else {
                push(
                    ViolationCode::NotPartition,
                    format!("{label} contains unknown task index {m}"),
                );
                continue;
            };
            task_count[m] += 1;
            size += task.proc;
            if task.period != period {
                push(
                    ViolationCode::MixedPeriodGroup,
                    format!(
                        "{label} has period {period} but task {:?} has period {}",
                        task.id, task.period
                    ),
                );
            }
        }
        if g.is_empty() {
            continue;
        }
        if size > instance.max_group_size {
            push(
                ViolationCode::GroupTooLarge,
                format!(
                    "{label} has size {size} > max group size {}",
                    instance.max_group_size
                ),
            );
        }
        match g.interval {
            None => push(
                ViolationCode::UnassignedNonemptyGroup,
                format!("{label} is nonempty but has no interval"),
            ),
            Some(k) if k >= structure.interval_counts[g.period_index] => push(
                ViolationCode::IntervalOutOfRange,
                format!(
                    "{label} assigned to interval {k}, admissible are 0..{}",
                    structure.interval_counts[g.period_index]
                ),
            ),
            Some(_) => {}
        }
    }
    for (i, &count) in task_count.iter().enumerate() {
        if count != 1 {
            push(
                ViolationCode::NotPartition,
                format!("task {:?} appears in {count} groups", instance.tasks[i].id),
            );
        }
    }
    ValidationReport::from_violations(violations)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    /// `period_loads[u][k]`: total size of period-`u` groups whose first
    /// occurrence is in interval `k`.
    pub period_loads: Vec<Vec<Time>>,
    /// Utilization of each observation interval (row).
    pub row_totals: Vec<Time>,
    pub cmax: Time,
    pub feasible: bool,
    /// `T_0 - cmax`; negative when infeasible.
    pub margin: i64,
}

pub fn evaluate(instance: &Instance, solution: &Solution) -> Result<Evaluation> {
    check_solution(instance, solution).into_result(Error::InvalidSolution)?;
    let structure = derive_period_structure(instance)?;
    Ok(evaluate_checked(instance, &structure, solution))
}

/// Evaluation of a solution already known to be valid.
pub(crate) fn evaluate_checked(
    instance: &Instance,
    structure: &PeriodStructure,
    solution: &Solution,
) -> Evaluation {
    let mut period_loads: Vec<Vec<Time>> = structure
        .interval_counts
        .iter()
        .map(|&c| vec![0; c])
        .collect();
    for g in solution.nonempty_groups() {
        let size = instance.header_size
            + g.members
                .iter()
                .map(|&m| instance.tasks[m].proc)
                .sum::<Time>();
        period_loads[g.period_index][g.interval.expect("checked")] += size;
    }
    let row_totals: Vec<Time> = (0..structure.row_count)
        .map(|k| {
            period_loads
                .iter()
                .zip(&structure.interval_counts)
                .map(|(loads, &count)| loads[k % count])
                .sum()
        })
        .collect();
    let cmax = row_totals.iter().copied().max().unwrap_or(0);
    let base = structure.base_period();
    Evaluation {
        period_loads,
        row_totals,
        cmax,
        feasible: cmax <= base,
        margin: base as i64 - cmax as i64,
    }
}
