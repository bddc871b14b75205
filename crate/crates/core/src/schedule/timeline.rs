use std::collections::BTreeMap;

use super::{check_solution, evaluate_checked, Solution};
use crate::error::{Error, Result};
use crate::instance::{derive_period_structure, Instance, Time};

/// One transmission of a group within one observation interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    /// Index into [`Solution::groups`].
    pub group: usize,
    pub period_index: usize,
    pub group_id: u32,
    /// 0 for the first occurrence in the hyperperiod.
    pub occurrence: usize,
    pub row: usize,
    pub start: Time,
    pub end: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleTimeline {
    /// Ordered by row, then canonical order within the row.
    pub occurrences: Vec<Occurrence>,
    pub row_count: usize,
    pub base_period: Time,
}

impl ScheduleTimeline {
    pub fn row(&self, row: usize) -> impl Iterator<Item = &Occurrence> {
        self.occurrences.iter().filter(move |o| o.row == row)
    }
}

/// Lays out every row by walking it: groups present in a row are placed
/// back to back, shorter periods first, then by group id.
pub fn expand_start_times(instance: &Instance, solution: &Solution) -> Result<ScheduleTimeline> {
    check_solution(instance, solution).into_result(Error::InvalidSolution)?;
    let structure = derive_period_structure(instance)?;
    let base = structure.base_period();

    let mut order: Vec<usize> = (0..solution.groups.len())
        .filter(|&g| !solution.groups[g].is_empty())
        .collect();
    order.sort_by_key(|&g| (solution.groups[g].period_index, solution.groups[g].group_id));
    let sizes: Vec<Time> = solution
        .groups
        .iter()
        .map(|g| {
            instance.header_size
                + g.members
                    .iter()
                    .map(|&m| instance.tasks[m].proc)
                    .sum::<Time>()
        })
        .collect();

    let mut occurrences = Vec::new();
    let mut seen = vec![0usize; solution.groups.len()];
    for row in 0..structure.row_count {
        let mut cursor = row as Time * base;
        for &g in &order {
            let group = &solution.groups[g];
            let count = structure.interval_counts[group.period_index];
            if row % count != group.interval.expect("checked") {
                continue;
            }
            occurrences.push(Occurrence {
                group: g,
                period_index: group.period_index,
                group_id: group.group_id,
                occurrence: seen[g],
                row,
                start: cursor,
                end: cursor + sizes[g],
            });
            seen[g] += 1;
            cursor += sizes[g];
        }
    }
    Ok(ScheduleTimeline {
        occurrences,
        row_count: structure.row_count,
        base_period: base,
    })
}

/// Cross-checks the row walk of [`expand_start_times`] against the modular
/// load formula of `evaluate`, and checks overlap freedom and strict
/// periodicity of every group.
pub fn timeline_consistency(instance: &Instance, solution: &Solution) -> bool {
    if !check_solution(instance, solution).ok {
        return false;
    }
    let Ok(structure) = derive_period_structure(instance) else {
        return false;
    };
    let Ok(timeline) = expand_start_times(instance, solution) else {
        return false;
    };
    let eval = evaluate_checked(instance, &structure, solution);
    let base = structure.base_period();

    let mut by_row: Vec<Vec<&super::Occurrence>> = vec![Vec::new(); structure.row_count];
    for o in &timeline.occurrences {
        if o.row >= structure.row_count {
            return false;
        }
        by_row[o.row].push(o);
    }
    for (row, occ) in by_row.iter_mut().enumerate() {
        let origin = row as Time * base;
        occ.sort_by_key(|o| o.start);
        let busy_end = occ.last().map_or(origin, |o| o.end);
        if busy_end - origin != eval.row_totals[row] {
            return false;
        }
        if occ
            .iter()
            .any(|o| o.start < origin || o.end > origin + eval.row_totals[row])
        {
            return false;
        }
        if occ.windows(2).any(|w| w[0].end > w[1].start) {
            return false;
        }
    }
    if eval.row_totals.iter().copied().max().unwrap_or(0) != eval.cmax {
        return false;
    }

    let mut per_group: BTreeMap<usize, Vec<&super::Occurrence>> = BTreeMap::new();
    for o in &timeline.occurrences {
        per_group.entry(o.group).or_default().push(o);
    }
    let expected_groups = solution.nonempty_groups().count();
    if per_group.len() != expected_groups {
        return false;
    }
    for (g, occ) in per_group {
        let group = &solution.groups[g];
        let period = instance.periods[group.period_index];
        if occ.len() != structure.occurrences(group.period_index) {
            return false;
        }
        let first = occ[0].start;
        // Row, not start / T_0: overloaded rows extend past T_0.
        if Some(occ[0].row) != group.interval {
            return false;
        }
        for (m, o) in occ.iter().enumerate() {
            if o.occurrence != m || o.start != first + m as Time * period {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::tests::{instance_a, solution_s_star};
    use crate::schedule::Group;

    #[test]
    fn s_star_start_times() {
        let tl = expand_start_times(&instance_a(), &solution_s_star()).unwrap();
        let starts = |g: usize| -> Vec<Time> {
            tl.occurrences
                .iter()
                .filter(|o| o.group == g)
                .map(|o| o.start)
                .collect()
        };
        assert_eq!(starts(0), vec![0, 4]);
        assert_eq!(starts(1), vec![3]);
        assert_eq!(starts(2), vec![7]);
        assert!(timeline_consistency(&instance_a(), &solution_s_star()));
    }

    #[test]
    fn single_group_single_period() {
        let inst = Instance::new(vec![10], 1, 10).with_task("a", 10, 3);
        let sol = Solution::new(vec![Group::new(0, 1, vec![0], 0)]);
        let tl = expand_start_times(&inst, &sol).unwrap();
        assert_eq!(tl.occurrences.len(), 1);
        assert_eq!((tl.occurrences[0].start, tl.occurrences[0].end), (0, 4));
    }

    #[test]
    fn tie_break_by_group_id() {
        let inst = Instance::new(vec![5, 10], 0, 10)
            .with_task("a", 10, 1)
            .with_task("b", 10, 2);
        // Listed in reverse id order on purpose.
        let sol = Solution::new(vec![
            Group::new(1, 2, vec![1], 1),
            Group::new(1, 1, vec![0], 1),
        ]);
        let tl = expand_start_times(&inst, &sol).unwrap();
        let row1: Vec<_> = tl.row(1).collect();
        assert_eq!(row1.len(), 2);
        assert_eq!(sol.groups[row1[0].group].group_id, 1);
        assert!(row1[0].end <= row1[1].start);
        assert!(timeline_consistency(&inst, &sol));
    }

    #[test]
    fn overloaded_rows_are_consistent() {
        // Row 0 carries 6 + 4 > T_0 = 5; the second group starts past T_0.
        let inst = Instance::new(vec![5, 10], 1, 10)
            .with_task("a", 5, 5)
            .with_task("b", 10, 3);
        let sol = Solution::new(vec![
            Group::new(0, 1, vec![0], 0),
            Group::new(1, 1, vec![1], 0),
        ]);
        let tl = expand_start_times(&inst, &sol).unwrap();
        let b: Vec<_> = tl.occurrences.iter().filter(|o| o.group == 1).collect();
        assert_eq!((b[0].row, b[0].start), (0, 6));
        assert!(timeline_consistency(&inst, &sol));
        let late = Solution::new(vec![
            Group::new(0, 1, vec![0], 0),
            Group::new(1, 1, vec![1], 1),
        ]);
        let tl = expand_start_times(&inst, &late).unwrap();
        assert_eq!(tl.row(1).last().unwrap().start, 11);
        assert!(timeline_consistency(&inst, &late));
    }

    #[test]
    fn empty_instance_is_consistent() {
        let inst = Instance::new(vec![4, 8], 1, 4);
        assert!(timeline_consistency(&inst, &Solution::default()));
        assert!(expand_start_times(&inst, &Solution::default())
            .unwrap()
            .occurrences
            .is_empty());
    }

    #[test]
    fn invalid_solution_is_inconsistent() {
        let mut sol = solution_s_star();
        sol.groups.pop();
        assert!(!timeline_consistency(&instance_a(), &sol));
    }
}
