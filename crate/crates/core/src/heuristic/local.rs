//! Steepest-descent local search on `(Cmax, sum of squared row loads)`.
//!
//! Every move changes the load of at most three interval classes of a single
//! period, so a candidate is scored by touching only the rows of those
//! classes plus a walk down the rows sorted by load to find the largest
//! untouched row.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::model::{from_solution, row_loads, to_solution, Grouping, Model, WorkGroup};
use crate::par::{map_range, Execution};
use crate::schedule::{check_solution, Solution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSearchConfig {
    /// Maximum number of accepted moves.
    pub iterations: usize,
    /// Move a task into another existing group.
    pub task_move: bool,
    /// Exchange two tasks of different groups.
    pub task_swap: bool,
    /// Move a whole group to another interval.
    pub group_move: bool,
    /// Merge two groups of one period.
    pub merge: bool,
    /// Move a task out into a new group on any interval.
    pub split: bool,
    /// 0 keeps enumeration order among equally good moves; any other value
    /// breaks ties pseudo-randomly, reproducibly for that seed.
    pub seed: u64,
    pub execution: Execution,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            iterations: 2000,
            task_move: true,
            task_swap: true,
            group_move: true,
            merge: true,
            split: true,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl LocalSearchConfig {
    pub(crate) fn for_grouping(mut self, grouping: Grouping) -> Self {
        if grouping == Grouping::Singleton {
            self.task_move = false;
            self.merge = false;
            self.split = false;
        }
        self
    }
}

/// Improves `start`. The result is valid and never has a larger Cmax.
pub fn local_search(
    instance: &Instance,
    start: &Solution,
    config: &LocalSearchConfig,
) -> Result<Solution> {
    let model = Model::new(instance, Grouping::Full)?;
    check_solution(instance, start).into_result(Error::InvalidSolution)?;
    if config.iterations == 0 {
        return Ok(start.clone());
    }
    let groups = improve(&model, from_solution(&model, start), config);
    Ok(to_solution(&groups, instance.periods.len()))
}

type Objective = (Time, u128);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Relocate { group: usize, to: usize },
    TaskToGroup { task: usize, to: usize },
    TaskToNew { task: usize, interval: usize },
    Swap { a: usize, b: usize },
    Merge { a: usize, b: usize, interval: usize },
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    objective: Objective,
    key: u64,
    mv: Move,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        (self.objective, self.key) < (other.objective, other.key)
    }
}

#[derive(Debug, Clone, Copy)]
enum Unit {
    Group(usize),
    Task(usize),
    Period(usize),
}

type Deltas = Vec<(usize, i64)>;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

struct Search<'a> {
    model: &'a Model,
    cfg: &'a LocalSearchConfig,
    groups: Vec<WorkGroup>,
    task_group: Vec<usize>,
    rows: Vec<Time>,
    sumsq: u128,
}

/// Per-iteration read-only view used while scoring candidates.
struct Snapshot {
    by_load: Vec<usize>,
    period_groups: Vec<Vec<usize>>,
}

pub(crate) fn improve(
    model: &Model,
    groups: Vec<WorkGroup>,
    cfg: &LocalSearchConfig,
) -> Vec<WorkGroup> {
    let mut task_group = vec![usize::MAX; model.task_count()];
    for (g, group) in groups.iter().enumerate() {
        for &m in &group.members {
            task_group[m] = g;
        }
    }
    let rows = row_loads(model, &groups);
    let mut search = Search {
        model,
        cfg,
        groups,
        task_group,
        sumsq: 0,
        rows,
    };
    search.sumsq = search.rows.iter().map(|&r| (r as u128) * (r as u128)).sum();
    search.run();
    search.groups
}

impl Search<'_> {
    fn objective(&self) -> Objective {
        (self.rows.iter().copied().max().unwrap_or(0), self.sumsq)
    }

    fn run(&mut self) {
        for _ in 0..self.cfg.iterations {
            let current = self.objective();
            match self.best_candidate() {
                Some(c) if c.objective < current => {
                    self.apply(c.mv);
                    debug_assert_eq!(self.objective(), c.objective);
                }
                _ => break,
            }
        }
    }

    fn snapshot(&self) -> Snapshot {
        let mut by_load: Vec<usize> = (0..self.rows.len()).collect();
        by_load.sort_by_key(|&r| (std::cmp::Reverse(self.rows[r]), r));
        let mut period_groups = vec![Vec::new(); self.model.interval_counts.len()];
        for (g, group) in self.groups.iter().enumerate() {
            if !group.members.is_empty() {
                period_groups[group.period].push(g);
            }
        }
        Snapshot {
            by_load,
            period_groups,
        }
    }

    fn best_candidate(&self) -> Option<Candidate> {
        let snap = self.snapshot();
        let mut units = Vec::new();
        if self.cfg.group_move {
            units.extend(
                (0..self.groups.len())
                    .filter(|&g| !self.groups[g].members.is_empty())
                    .map(Unit::Group),
            );
        }
        if self.cfg.task_move || self.cfg.split {
            units.extend((0..self.task_group.len()).map(Unit::Task));
        }
        if self.cfg.task_swap || self.cfg.merge {
            units.extend((0..snap.period_groups.len()).map(Unit::Period));
        }
        let results = map_range(self.cfg.execution, units.len(), |n| {
            self.best_in_unit(&snap, units[n], n as u64)
        });
        results
            .into_iter()
            .flatten()
            .reduce(|a, b| if b.better_than(&a) { b } else { a })
    }

    /// Scores a move described by per-interval load changes of period `u`.
    fn score(&self, snap: &Snapshot, u: usize, deltas: &[(usize, i64)]) -> Option<Objective> {
        let classes = self.model.interval_counts[u];
        let mut peak: i64 = 0;
        let mut dsq: i128 = 0;
        for &(k, d) in deltas {
            for r in self.model.rows(u, k) {
                let old = self.rows[r] as i64;
                let new = old + d;
                debug_assert!(new >= 0);
                peak = peak.max(new);
                dsq += (new as i128) * (new as i128) - (old as i128) * (old as i128);
            }
        }
        let rest = if deltas.len() == classes {
            0
        } else {
            snap.by_load
                .iter()
                .find(|&&r| deltas.iter().all(|&(k, _)| r % classes != k))
                .map_or(0, |&r| self.rows[r])
        };
        let cmax = (peak as Time).max(rest);
        Some((cmax, (self.sumsq as i128 + dsq) as u128))
    }

    fn best_in_unit(&self, snap: &Snapshot, unit: Unit, unit_index: u64) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        let mut ordinal = 0u64;
        let mut offer = |objective: Option<Objective>, mv: Move| {
            let raw = (unit_index << 32) | ordinal;
            ordinal += 1;
            let Some(objective) = objective else { return };
            let key = if self.cfg.seed == 0 {
                raw
            } else {
                splitmix(self.cfg.seed ^ splitmix(raw))
            };
            let cand = Candidate { objective, key, mv };
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        };
        let model = self.model;
        let hs = model.hs;

        match unit {
            Unit::Group(g) => {
                let group = &self.groups[g];
                let s = group.size as i64;
                for to in 0..model.interval_counts[group.period] {
                    if to != group.interval {
                        let deltas = combine(&[(group.interval, -s), (to, s)]);
                        offer(
                            self.score(snap, group.period, &deltas),
                            Move::Relocate { group: g, to },
                        );
                    }
                }
            }
            Unit::Task(task) => {
                let g = self.task_group[task];
                let src = &self.groups[g];
                let u = src.period;
                let p = model.proc[task] as i64;
                let alone = src.members.len() == 1;
                let removal = -p - if alone { hs as i64 } else { 0 };
                if self.cfg.task_move {
                    // Best-fit target per interval; all targets in one
                    // interval change the rows identically.
                    let mut per_interval: BTreeMap<usize, (Time, usize)> = BTreeMap::new();
                    for &h in &snap.period_groups[u] {
                        let target = &self.groups[h];
                        if h == g || target.size.saturating_add(p as Time) > model.capacity {
                            continue;
                        }
                        let slack = model.capacity - target.size - p as Time;
                        let entry = per_interval.entry(target.interval).or_insert((slack, h));
                        if (slack, h) < *entry {
                            *entry = (slack, h);
                        }
                    }
                    for (k, (_, h)) in per_interval {
                        let deltas = combine(&[(src.interval, removal), (k, p)]);
                        offer(
                            self.score(snap, u, &deltas),
                            Move::TaskToGroup { task, to: h },
                        );
                    }
                }
                if self.cfg.split && hs + (p as Time) <= model.capacity {
                    for k in 0..model.interval_counts[u] {
                        if alone && k == src.interval {
                            continue;
                        }
                        let deltas = combine(&[(src.interval, removal), (k, p + hs as i64)]);
                        offer(
                            self.score(snap, u, &deltas),
                            Move::TaskToNew { task, interval: k },
                        );
                    }
                }
            }
            Unit::Period(u) => {
                let groups = &snap.period_groups[u];
                let mut seen: HashSet<Deltas> = HashSet::new();
                if self.cfg.task_swap {
                    for (x, &ga) in groups.iter().enumerate() {
                        for &gb in &groups[x + 1..] {
                            let (a_grp, b_grp) = (&self.groups[ga], &self.groups[gb]);
                            if a_grp.interval == b_grp.interval {
                                continue;
                            }
                            for &a in &a_grp.members {
                                for &b in &b_grp.members {
                                    let (pa, pb) = (model.proc[a], model.proc[b]);
                                    if pa == pb
                                        || a_grp.size - pa + pb > model.capacity
                                        || b_grp.size - pb + pa > model.capacity
                                    {
                                        continue;
                                    }
                                    let d = pb as i64 - pa as i64;
                                    let deltas =
                                        combine(&[(a_grp.interval, d), (b_grp.interval, -d)]);
                                    if seen.insert(deltas.clone()) {
                                        offer(self.score(snap, u, &deltas), Move::Swap { a, b });
                                    }
                                }
                            }
                        }
                    }
                }
                if self.cfg.merge {
                    for (x, &ga) in groups.iter().enumerate() {
                        for &gb in &groups[x + 1..] {
                            let (a_grp, b_grp) = (&self.groups[ga], &self.groups[gb]);
                            let merged = a_grp.size + b_grp.size - hs;
                            if merged > model.capacity {
                                continue;
                            }
                            let mut targets = vec![a_grp.interval];
                            if b_grp.interval != a_grp.interval {
                                targets.push(b_grp.interval);
                            }
                            for interval in targets {
                                let deltas = combine(&[
                                    (a_grp.interval, -(a_grp.size as i64)),
                                    (b_grp.interval, -(b_grp.size as i64)),
                                    (interval, merged as i64),
                                ]);
                                if seen.insert(deltas.clone()) {
                                    offer(
                                        self.score(snap, u, &deltas),
                                        Move::Merge {
                                            a: ga,
                                            b: gb,
                                            interval,
                                        },
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        best
    }

    fn apply(&mut self, mv: Move) {
        let model = self.model;
        match mv {
            Move::Relocate { group, to } => {
                let g = &mut self.groups[group];
                model.sub(&mut self.rows, g.period, g.interval, g.size);
                g.interval = to;
                model.add(&mut self.rows, g.period, to, g.size);
            }
            Move::TaskToGroup { task, to } => {
                self.detach(task);
                let p = model.proc[task];
                let h = &mut self.groups[to];
                h.size += p;
                h.members.push(task);
                model.add(&mut self.rows, h.period, h.interval, p);
                self.task_group[task] = to;
            }
            Move::TaskToNew { task, interval } => {
                let u = self.groups[self.task_group[task]].period;
                self.detach(task);
                let size = model.hs + model.proc[task];
                self.groups.push(WorkGroup {
                    period: u,
                    interval,
                    size,
                    members: vec![task],
                });
                model.add(&mut self.rows, u, interval, size);
                self.task_group[task] = self.groups.len() - 1;
            }
            Move::Swap { a, b } => {
                let (ga, gb) = (self.task_group[a], self.task_group[b]);
                let (pa, pb) = (model.proc[a], model.proc[b]);
                for (g, out, into, p_out, p_in) in [(ga, a, b, pa, pb), (gb, b, a, pb, pa)] {
                    let grp = &mut self.groups[g];
                    model.sub(&mut self.rows, grp.period, grp.interval, p_out);
                    model.add(&mut self.rows, grp.period, grp.interval, p_in);
                    grp.size = grp.size - p_out + p_in;
                    let slot = grp.members.iter().position(|&m| m == out).unwrap();
                    grp.members[slot] = into;
                }
                self.task_group[a] = gb;
                self.task_group[b] = ga;
            }
            Move::Merge { a, b, interval } => {
                let taken = std::mem::take(&mut self.groups[b].members);
                let (bp, bi, bs) = (
                    self.groups[b].period,
                    self.groups[b].interval,
                    self.groups[b].size,
                );
                model.sub(&mut self.rows, bp, bi, bs);
                self.groups[b].size = 0;
                let grp = &mut self.groups[a];
                model.sub(&mut self.rows, grp.period, grp.interval, grp.size);
                grp.size += bs - model.hs;
                grp.interval = interval;
                model.add(&mut self.rows, grp.period, interval, grp.size);
                for &m in &taken {
                    self.task_group[m] = a;
                }
                grp.members.extend(taken);
            }
        }
        self.sumsq = self.rows.iter().map(|&r| (r as u128) * (r as u128)).sum();
    }

    /// Removes a task from its group, updating row loads.
    fn detach(&mut self, task: usize) {
        let model = self.model;
        let g = &mut self.groups[self.task_group[task]];
        let p = model.proc[task];
        g.members.retain(|&m| m != task);
        let freed = if g.members.is_empty() {
            p + model.hs
        } else {
            p
        };
        g.size -= freed;
        model.sub(&mut self.rows, g.period, g.interval, freed);
    }
}

/// Sums deltas per interval and drops zeros, sorted by interval.
fn combine(raw: &[(usize, i64)]) -> Deltas {
    let mut out: Deltas = Vec::with_capacity(raw.len());
    for &(k, d) in raw {
        match out.iter_mut().find(|(kk, _)| *kk == k) {
            Some(e) => e.1 += d,
            None => out.push((k, d)),
        }
    }
    out.retain(|&(_, d)| d != 0);
    out.sort_unstable();
    out
}
