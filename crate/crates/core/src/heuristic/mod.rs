//! Constructive heuristic and steepest-descent local search for instances
//! beyond the reach of the exact engine.

use std::cmp::Reverse;

use crate::error::Result;
use crate::instance::{Instance, Time};
use crate::model::{to_solution, Grouping, Model, WorkGroup};
use crate::schedule::Solution;

mod local;

pub(crate) use local::improve;
pub use local::{local_search, LocalSearchConfig};

/// First-fit-decreasing grouping per period, then largest-first interval
/// assignment to the interval with the smallest projected row peak.
pub fn construct_greedy(instance: &Instance) -> Result<Solution> {
    let model = Model::new(instance, Grouping::Full)?;
    Ok(to_solution(
        &greedy_groups(&model, Grouping::Full),
        instance.periods.len(),
    ))
}

pub(crate) fn greedy_groups(model: &Model, grouping: Grouping) -> Vec<WorkGroup> {
    let mut groups = Vec::new();
    for (u, class) in model.classes.iter().enumerate() {
        let mut tasks = class.clone();
        tasks.sort_by_key(|&i| (Reverse(model.proc[i]), i));
        let first = groups.len();
        for i in tasks {
            let p = model.proc[i];
            let slot = match grouping {
                Grouping::Singleton => None,
                _ => groups[first..]
                    .iter()
                    .position(|g: &WorkGroup| g.size.saturating_add(p) <= model.capacity),
            };
            match slot {
                Some(s) => {
                    let g = &mut groups[first + s];
                    g.size += p;
                    g.members.push(i);
                }
                None => groups.push(WorkGroup {
                    period: u,
                    interval: 0,
                    size: model.hs + p,
                    members: vec![i],
                }),
            }
        }
    }
    assign_intervals(model, &mut groups);
    groups
}

/// Places groups largest first; ties by period then creation order.
fn assign_intervals(model: &Model, groups: &mut [WorkGroup]) {
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&g| (Reverse(groups[g].size), groups[g].period, g));
    let mut rows = vec![0 as Time; model.row_count];
    for g in order {
        let (u, size) = (groups[g].period, groups[g].size);
        let best = (0..model.interval_counts[u])
            .min_by_key(|&k| {
                let peak = model.peak_with(&rows, u, k, size);
                let mass: Time = model.rows(u, k).map(|r| rows[r]).sum();
                (peak, mass, k)
            })
            .expect("at least one interval");
        groups[g].interval = best;
        model.add(&mut rows, u, best, size);
    }
}
