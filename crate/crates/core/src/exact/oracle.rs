//! Exhaustive enumeration of every grouping and every interval assignment.
//!
//! Shares nothing with the branch-and-bound search apart from the instance
//! types: no pruning, no symmetry breaking, no heuristic incumbent.

use std::time::Instant;

use super::SolveResult;
use crate::error::{Error, Result};
use crate::instance::{derive_period_structure, validate, Instance, Time};
use crate::schedule::{Group, Solution};

/// Guard on `prod_u Bell(|T_u|) * |B_u|^|T_u|`.
pub const ORACLE_SPACE_LIMIT: f64 = 1e7;

fn bell(n: usize) -> f64 {
    // Bell triangle.
    let mut row = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for v in &row {
            next.push(next.last().unwrap() + v);
        }
        row = next;
    }
    row[0]
}

/// Upper estimate of the number of solutions the oracle enumerates.
pub fn oracle_search_space(instance: &Instance) -> f64 {
    let Ok(structure) = derive_period_structure(instance) else {
        return f64::INFINITY;
    };
    instance
        .tasks_by_period()
        .iter()
        .zip(&structure.interval_counts)
        .map(|(class, &count)| bell(class.len()) * (count as f64).powi(class.len() as i32))
        .product()
}

/// All partitions of `tasks` into blocks whose size `hs + sum(proc)` stays
/// within `smax`.
fn partitions(tasks: &[usize], procs: &[Time], hs: Time, smax: Time) -> Vec<Vec<Vec<usize>>> {
    fn rec(
        n: usize,
        tasks: &[usize],
        procs: &[Time],
        hs: Time,
        smax: Time,
        blocks: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if n == tasks.len() {
            out.push(blocks.clone());
            return;
        }
        let t = tasks[n];
        for b in 0..blocks.len() {
            let size: Time = hs + blocks[b].iter().map(|&m| procs[m]).sum::<Time>() + procs[t];
            if size <= smax {
                blocks[b].push(t);
                rec(n + 1, tasks, procs, hs, smax, blocks, out);
                blocks[b].pop();
            }
        }
        if hs + procs[t] <= smax {
            blocks.push(vec![t]);
            rec(n + 1, tasks, procs, hs, smax, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, tasks, procs, hs, smax, &mut Vec::new(), &mut out);
    out
}

struct Enumeration {
    hs: Time,
    procs: Vec<Time>,
    counts: Vec<usize>,
    row_count: usize,
    options: Vec<Vec<Vec<Vec<usize>>>>,
    periods: Vec<usize>,
    rows: Vec<Time>,
    /// (period, partition index, interval per block) for the current leaf.
    stack: Vec<Choice>,
    best: Option<(Time, Vec<Choice>)>,
}

/// Period, partition index and the interval of each block.
type Choice = (usize, usize, Vec<usize>);

impl Enumeration {
    fn periods_from(&mut self, idx: usize) {
        if idx == self.periods.len() {
            let cmax = self.rows.iter().copied().max().unwrap_or(0);
            if self.best.as_ref().is_none_or(|(b, _)| cmax < *b) {
                self.best = Some((cmax, self.stack.clone()));
            }
            return;
        }
        let u = self.periods[idx];
        for part in 0..self.options[u].len() {
            let blocks = self.options[u][part].len();
            self.stack.push((u, part, vec![0; blocks]));
            self.blocks_from(idx, 0);
            self.stack.pop();
        }
    }

    fn blocks_from(&mut self, idx: usize, block: usize) {
        let (u, part) = {
            let top = self.stack.last().expect("period frame");
            (top.0, top.1)
        };
        if block == self.options[u][part].len() {
            self.periods_from(idx + 1);
            return;
        }
        let size = self.hs
            + self.options[u][part][block]
                .iter()
                .map(|&m| self.procs[m])
                .sum::<Time>();
        let count = self.counts[u];
        for k in 0..count {
            for r in (k..self.row_count).step_by(count) {
                self.rows[r] += size;
            }
            self.stack.last_mut().unwrap().2[block] = k;
            self.blocks_from(idx, block + 1);
            for r in (k..self.row_count).step_by(count) {
                self.rows[r] -= size;
            }
        }
    }
}

pub fn brute_force_oracle(instance: &Instance) -> Result<SolveResult> {
    let started = Instant::now();
    let report = validate(instance);
    if !report.ok {
        return Err(Error::InvalidInstance(report));
    }
    let space = oracle_search_space(instance);
    if space > ORACLE_SPACE_LIMIT {
        return Err(Error::SpaceTooLarge(space));
    }
    let structure = derive_period_structure(instance)?;
    let procs: Vec<Time> = instance.tasks.iter().map(|t| t.proc).collect();
    let classes = instance.tasks_by_period();
    let options: Vec<_> = classes
        .iter()
        .map(|c| partitions(c, &procs, instance.header_size, instance.max_group_size))
        .collect();
    let periods: Vec<usize> = (0..classes.len())
        .filter(|&u| !classes[u].is_empty())
        .collect();

    let mut e = Enumeration {
        hs: instance.header_size,
        procs,
        counts: structure.interval_counts.clone(),
        row_count: structure.row_count,
        options,
        periods,
        rows: vec![0; structure.row_count],
        stack: Vec::new(),
        best: None,
    };
    e.periods_from(0);
    let (cmax, choice) = e.best.expect("a valid instance has at least one solution");

    let mut groups = Vec::new();
    for (u, part, intervals) in choice {
        for (b, block) in e.options[u][part].iter().enumerate() {
            groups.push(Group::new(u, b as u32 + 1, block.clone(), intervals[b]));
        }
    }
    Ok(SolveResult {
        solution: Solution::new(groups).normalized(),
        cmax,
        optimal: true,
        nodes: 0,
        wall_time: started.elapsed(),
    })
}
