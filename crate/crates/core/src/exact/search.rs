//! Depth-first branch and bound over task placements.
//!
//! Tasks are visited period by period (heaviest period first) and, within a
//! period, by decreasing processing time. A task either joins an open group
//! of its period or opens the next group on some interval. New groups only
//! ever take the next free label, so every partition is generated once
//! (restricted-growth labelling). Shifting all rows cyclically by one maps
//! solutions onto solutions of equal Cmax, so the very first group is pinned
//! to interval 0.

use std::cmp::Reverse;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use super::SolveLimits;
use crate::instance::Time;
use crate::model::{row_loads, Grouping, Model, WorkGroup};
use crate::par::{map_collect, worker_count};

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub groups: Vec<WorkGroup>,
    pub cmax: Time,
    pub optimal: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    Join(usize),
    Open(usize),
}

/// Static data shared by all workers.
struct Plan<'a> {
    model: &'a Model,
    grouping: Grouping,
    order: Vec<usize>,
    /// Payload mass still to place from step `s` on.
    suffix_mass: Vec<Time>,
    /// One header per period not yet started at step `s`.
    suffix_headers: Vec<Time>,
    lower_bound: Time,
    limits: &'a SolveLimits,
    started: Instant,
    best: AtomicU64,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Plan<'_> {
    fn out_of_budget(&self, nodes: u64) -> bool {
        if let Some(limit) = self.limits.node_limit {
            if nodes >= limit {
                return true;
            }
        }
        if let Some(limit) = self.limits.time_limit {
            if self.started.elapsed() >= limit {
                return true;
            }
        }
        false
    }

    fn done(&self, best: Time) -> bool {
        best <= self.lower_bound || self.limits.target.is_some_and(|t| best <= t)
    }
}

struct Worker<'p, 'a> {
    plan: &'p Plan<'a>,
    rows: Vec<Time>,
    mass: Time,
    groups: Vec<WorkGroup>,
    best: Time,
    best_groups: Option<Vec<WorkGroup>>,
    nodes: u64,
    flushed: u64,
    stopped: bool,
}

const FLUSH_EVERY: u64 = 256;

impl<'p, 'a> Worker<'p, 'a> {
    fn new(plan: &'p Plan<'a>) -> Self {
        Self {
            plan,
            rows: vec![0; plan.model.row_count],
            mass: 0,
            groups: Vec::new(),
            best: plan.best.load(Ordering::Relaxed),
            best_groups: None,
            nodes: 0,
            flushed: 0,
            stopped: false,
        }
    }

    fn incumbent(&self) -> Time {
        self.best.min(self.plan.best.load(Ordering::Relaxed))
    }

    /// Counts a node; returns `false` when the search must stop.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        let sequential = !self.plan.limits.execution.is_parallel();
        if sequential {
            if self.plan.out_of_budget(self.nodes) {
                self.stopped = true;
            }
        } else if self.nodes - self.flushed >= FLUSH_EVERY {
            let total = self
                .plan
                .nodes
                .fetch_add(self.nodes - self.flushed, Ordering::Relaxed)
                + (self.nodes - self.flushed);
            self.flushed = self.nodes;
            if self.plan.out_of_budget(total) {
                self.plan.stop.store(true, Ordering::Relaxed);
            }
        }
        if self.plan.stop.load(Ordering::Relaxed) {
            self.stopped = true;
        }
        !self.stopped
    }

    fn choices(&self, step: usize) -> Vec<(Choice, usize, Time)> {
        let model = self.plan.model;
        let task = self.plan.order[step];
        let u = model.task_period[task];
        let p = model.proc[task];
        let mut out = Vec::new();
        if self.plan.grouping != Grouping::Singleton {
            for (g, group) in self.groups.iter().enumerate() {
                if group.period == u && group.size.saturating_add(p) <= model.capacity {
                    out.push((Choice::Join(g), group.interval, p));
                }
            }
        }
        if self.mass == 0 {
            out.push((Choice::Open(0), 0, model.hs + p));
            return out;
        }
        for k in 0..model.interval_counts[u] {
            let taken = self.plan.grouping == Grouping::Merged
                && self.groups.iter().any(|g| g.period == u && g.interval == k);
            if !taken {
                out.push((Choice::Open(k), k, model.hs + p));
            }
        }
        out
    }

    fn apply(&mut self, step: usize, choice: Choice) {
        let model = self.plan.model;
        let task = self.plan.order[step];
        let u = model.task_period[task];
        let p = model.proc[task];
        match choice {
            Choice::Join(g) => {
                let group = &mut self.groups[g];
                group.size += p;
                group.members.push(task);
                model.add(&mut self.rows, u, group.interval, p);
                self.mass += p * model.occurrences(u) as Time;
            }
            Choice::Open(k) => {
                let size = model.hs + p;
                self.groups.push(WorkGroup {
                    period: u,
                    interval: k,
                    size,
                    members: vec![task],
                });
                model.add(&mut self.rows, u, k, size);
                self.mass += size * model.occurrences(u) as Time;
            }
        }
    }

    fn undo(&mut self, step: usize, choice: Choice) {
        let model = self.plan.model;
        let task = self.plan.order[step];
        let u = model.task_period[task];
        let p = model.proc[task];
        match choice {
            Choice::Join(g) => {
                let group = &mut self.groups[g];
                group.size -= p;
                group.members.pop();
                model.sub(&mut self.rows, u, group.interval, p);
                self.mass -= p * model.occurrences(u) as Time;
            }
            Choice::Open(k) => {
                let group = self.groups.pop().expect("opened group");
                model.sub(&mut self.rows, u, k, group.size);
                self.mass -= group.size * model.occurrences(u) as Time;
            }
        }
    }

    /// Children that can still beat the incumbent, most promising first.
    fn ranked_children(&self, step: usize, cur_max: Time) -> Vec<(Choice, Time)> {
        let plan = self.plan;
        let model = plan.model;
        let u = model.task_period[plan.order[step]];
        let occ = model.occurrences(u) as Time;
        let rest = plan.suffix_mass[step + 1] + plan.suffix_headers[step + 1];
        let rows = model.row_count as Time;
        let incumbent = self.incumbent();
        let mut kids: Vec<(Time, Time, usize, Choice)> = self
            .choices(step)
            .into_iter()
            .enumerate()
            .filter_map(|(n, (choice, k, amount))| {
                let peak = cur_max.max(model.peak_with(&self.rows, u, k, amount));
                let total = self.mass + amount * occ + rest;
                let bound = peak.max(total.div_ceil(rows)).max(plan.lower_bound);
                (bound < incumbent).then_some((bound, peak, n, choice))
            })
            .collect();
        kids.sort_unstable_by_key(|&(bound, peak, n, _)| (bound, peak, n));
        kids.into_iter().map(|(_, peak, _, c)| (c, peak)).collect()
    }

    fn dfs(&mut self, step: usize, cur_max: Time) {
        if self.stopped {
            return;
        }
        if step == self.plan.order.len() {
            if cur_max < self.incumbent() {
                self.best = cur_max;
                self.best_groups = Some(self.groups.clone());
                self.plan.best.fetch_min(cur_max, Ordering::Relaxed);
                if self.plan.done(cur_max) {
                    self.plan.stop.store(true, Ordering::Relaxed);
                    self.stopped = true;
                }
            }
            return;
        }
        if !self.tick() {
            return;
        }
        for (choice, peak) in self.ranked_children(step, cur_max) {
            if peak >= self.incumbent() {
                continue;
            }
            self.apply(step, choice);
            self.dfs(step + 1, peak);
            self.undo(step, choice);
            if self.stopped {
                return;
            }
        }
    }

    /// Enumerates surviving decision prefixes of length `depth`.
    fn collect(
        &mut self,
        step: usize,
        cur_max: Time,
        depth: usize,
        path: &mut Vec<Choice>,
        out: &mut Vec<Vec<Choice>>,
    ) {
        if step == depth {
            out.push(path.clone());
            return;
        }
        for (choice, peak) in self.ranked_children(step, cur_max) {
            self.apply(step, choice);
            path.push(choice);
            self.collect(step + 1, peak, depth, path, out);
            path.pop();
            self.undo(step, choice);
        }
    }
}

fn build_plan<'a>(
    model: &'a Model,
    grouping: Grouping,
    lower_bound: Time,
    incumbent: Time,
    limits: &'a SolveLimits,
) -> Plan<'a> {
    let pressure = |u: usize| -> Time {
        let payload: Time = model.classes[u].iter().map(|&i| model.proc[i]).sum();
        (payload + model.hs) * model.occurrences(u) as Time
    };
    let mut periods: Vec<usize> = (0..model.classes.len())
        .filter(|&u| !model.classes[u].is_empty())
        .collect();
    periods.sort_by_key(|&u| (Reverse(pressure(u)), u));

    let mut order = Vec::with_capacity(model.task_count());
    let mut first_step = Vec::new();
    for &u in &periods {
        first_step.push((order.len(), u));
        let mut tasks = model.classes[u].clone();
        tasks.sort_by_key(|&i| (Reverse(model.proc[i]), i));
        order.extend(tasks);
    }
    let n = order.len();
    let mut suffix_mass = vec![0; n + 1];
    for s in (0..n).rev() {
        let i = order[s];
        suffix_mass[s] =
            suffix_mass[s + 1] + model.proc[i] * model.occurrences(model.task_period[i]) as Time;
    }
    let suffix_headers = (0..=n)
        .map(|s| {
            first_step
                .iter()
                .filter(|&&(f, _)| f >= s)
                .map(|&(_, u)| model.hs * model.occurrences(u) as Time)
                .sum()
        })
        .collect();

    Plan {
        model,
        grouping,
        order,
        suffix_mass,
        suffix_headers,
        lower_bound,
        limits,
        started: Instant::now(),
        best: AtomicU64::new(incumbent),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    }
}

/// Searches for a solution strictly better than `incumbent`.
pub(crate) fn branch_and_bound(
    model: &Model,
    grouping: Grouping,
    incumbent: Vec<WorkGroup>,
    lower_bound: Time,
    limits: &SolveLimits,
) -> Outcome {
    let incumbent_cmax = row_loads(model, &incumbent).into_iter().max().unwrap_or(0);
    let plan = build_plan(model, grouping, lower_bound, incumbent_cmax, limits);
    if plan.order.is_empty() || plan.done(incumbent_cmax) {
        return Outcome {
            groups: incumbent,
            cmax: incumbent_cmax,
            optimal: incumbent_cmax <= lower_bound || plan.order.is_empty(),
            nodes: 0,
        };
    }

    let parallel = limits.execution.is_parallel() && plan.order.len() > 3;
    let mut results: Vec<(Time, Option<Vec<WorkGroup>>, u64, bool)> = Vec::new();
    if parallel {
        let target = 4 * worker_count();
        let mut frontier = Vec::new();
        let mut depth = 1;
        while depth < plan.order.len() {
            frontier.clear();
            Worker::new(&plan).collect(0, 0, depth, &mut Vec::new(), &mut frontier);
            if frontier.len() >= target {
                break;
            }
            depth += 1;
        }
        results = map_collect(limits.execution, &frontier, |prefix| {
            let mut w = Worker::new(&plan);
            let mut cur_max = 0;
            for (step, &choice) in prefix.iter().enumerate() {
                w.apply(step, choice);
            }
            if let Some(&m) = w.rows.iter().max() {
                cur_max = m;
            }
            w.dfs(prefix.len(), cur_max);
            (w.best, w.best_groups, w.nodes, w.stopped)
        });
    } else {
        let mut w = Worker::new(&plan);
        w.dfs(0, 0);
        results.push((w.best, w.best_groups, w.nodes, w.stopped));
    }

    let nodes = results.iter().map(|r| r.2).sum();
    let exhausted = !results.iter().any(|r| r.3);
    let mut best = (incumbent_cmax, incumbent);
    for (cmax, groups, _, _) in results {
        if let Some(groups) = groups {
            if cmax < best.0 {
                best = (cmax, groups);
            }
        }
    }
    Outcome {
        optimal: exhausted || best.0 <= lower_bound,
        cmax: best.0,
        groups: best.1,
        nodes,
    }
}
