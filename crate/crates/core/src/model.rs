//! Dense, index-based view of an instance shared by the solvers.

use crate::error::{Error, Result};
use crate::instance::{derive_period_structure, validate, Instance, Time};
use crate::schedule::{Group, Solution};

/// How tasks may be combined into groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Any partition whose groups respect the maximum group size.
    Full,
    /// Every task in its own group.
    Singleton,
    /// Group capacity relaxed; same-period tasks sharing an interval form one
    /// group.
    Merged,
}

#[derive(Debug, Clone)]
pub(crate) struct Model {
    pub row_count: usize,
    pub hs: Time,
    /// Maximum group size, `Time::MAX` when relaxed.
    pub capacity: Time,
    pub interval_counts: Vec<usize>,
    pub task_period: Vec<usize>,
    pub proc: Vec<Time>,
    pub classes: Vec<Vec<usize>>,
}

impl Model {
    /// Builds the model of a validated instance.
    pub fn new(instance: &Instance, grouping: Grouping) -> Result<Self> {
        let report = validate(instance);
        if !report.ok {
            return Err(Error::InvalidInstance(report));
        }
        let structure = derive_period_structure(instance)?;
        let task_period = (0..instance.tasks.len())
            .map(|i| instance.task_period_index(i))
            .collect();
        Ok(Self {
            row_count: structure.row_count,
            hs: instance.header_size,
            capacity: match grouping {
                Grouping::Merged => Time::MAX,
                _ => instance.max_group_size,
            },
            interval_counts: structure.interval_counts,
            task_period,
            proc: instance.tasks.iter().map(|t| t.proc).collect(),
            classes: instance.tasks_by_period(),
        })
    }

    pub fn task_count(&self) -> usize {
        self.proc.len()
    }

    /// Rows covered by a period-`u` group first placed in interval `k`.
    #[inline]
    pub fn rows(&self, u: usize, k: usize) -> std::iter::StepBy<std::ops::Range<usize>> {
        (k..self.row_count).step_by(self.interval_counts[u])
    }

    #[inline]
    pub fn occurrences(&self, u: usize) -> usize {
        self.row_count / self.interval_counts[u]
    }

    pub fn add(&self, rows: &mut [Time], u: usize, k: usize, amount: Time) {
        for r in self.rows(u, k) {
            rows[r] += amount;
        }
    }

    pub fn sub(&self, rows: &mut [Time], u: usize, k: usize, amount: Time) {
        for r in self.rows(u, k) {
            rows[r] -= amount;
        }
    }

    /// Largest row value after adding `amount` to the rows of `(u, k)`.
    #[inline]
    pub fn peak_with(&self, rows: &[Time], u: usize, k: usize, amount: Time) -> Time {
        self.rows(u, k).map(|r| rows[r] + amount).max().unwrap_or(0)
    }
}

/// Group under construction inside a solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct WorkGroup {
    pub period: usize,
    pub interval: usize,
    pub size: Time,
    pub members: Vec<usize>,
}

/// Converts solver groups into a [`Solution`], numbering groups from 1 within
/// each period in their current order and skipping empty ones.
pub(crate) fn to_solution(groups: &[WorkGroup], period_count: usize) -> Solution {
    let mut next_id = vec![1u32; period_count];
    let groups = groups
        .iter()
        .filter(|g| !g.members.is_empty())
        .map(|g| {
            let id = next_id[g.period];
            next_id[g.period] += 1;
            let mut members = g.members.clone();
            members.sort_unstable();
            Group::new(g.period, id, members, g.interval)
        })
        .collect();
    Solution::new(groups).normalized()
}

/// Reads a valid solution back into solver groups.
pub(crate) fn from_solution(model: &Model, solution: &Solution) -> Vec<WorkGroup> {
    let mut groups: Vec<&Group> = solution.nonempty_groups().collect();
    groups.sort_by_key(|g| (g.period_index, g.group_id));
    groups
        .into_iter()
        .map(|g| WorkGroup {
            period: g.period_index,
            interval: g.interval.expect("nonempty groups are assigned"),
            size: model.hs + g.members.iter().map(|&m| model.proc[m]).sum::<Time>(),
            members: g.members.clone(),
        })
        .collect()
}

pub(crate) fn row_loads(model: &Model, groups: &[WorkGroup]) -> Vec<Time> {
    let mut rows = vec![0; model.row_count];
    for g in groups.iter().filter(|g| !g.members.is_empty()) {
        model.add(&mut rows, g.period, g.interval, g.size);
    }
    rows
}

/// Merges same-period groups that share an interval. Never increases any
/// row load; only meaningful when capacity is relaxed.
pub(crate) fn merge_shared_intervals(model: &Model, groups: Vec<WorkGroup>) -> Vec<WorkGroup> {
    let mut merged: Vec<WorkGroup> = Vec::new();
    for g in groups.into_iter().filter(|g| !g.members.is_empty()) {
        match merged
            .iter_mut()
            .find(|m| m.period == g.period && m.interval == g.interval)
        {
            Some(m) => {
                m.size += g.size - model.hs;
                m.members.extend(g.members);
            }
            None => merged.push(g),
        }
    }
    merged
}
