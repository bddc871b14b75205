//! Export of the full grouping-and-scheduling MILP as LP text.
//!
//! Indices: `u` is the period index, `i` the position of a task within its
//! period class (input order), `j` the group slot within the period
//! (`0..|T_u|`, enough for one task per group), `k` the interval or row.
//!
//! | name        | kind    | meaning                                    |
//! |-------------|---------|--------------------------------------------|
//! | `x_u_i_j`   | binary  | task `i` of period `u` is in group `j`     |
//! | `z_u_j`     | binary  | group `j` of period `u` is nonempty        |
//! | `s_u_j`     | integer | size of the group, header included         |
//! | `y_u_j_k`   | binary  | first occurrence of the group in interval k |
//! | `c_u_j_k`   | integer | contribution of the group to interval k    |
//! | `p_u_k`     | integer | load of period `u` in interval `k`         |
//! | `Cmax`      | integer | objective                                  |
//!
//! Constraint rows are named after their family: `assign_u_i`, `zlink_u_j`,
//! `size_u_j`, `smax_u_j`, `gsched_u_j`, `c1_u_j_k`, `c2_u_j_k`, `c3_u_j_k`,
//! `load_u_k` and `row_k`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{derive_period_structure, validate, Instance, PeriodStructure, Time};
use crate::schedule::{check_solution, evaluate, group_size, Solution};

pub mod lp;

pub use lp::{parse_lp, LpModel};
use lp::{Constraint, Relation, Term};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LpOptions {
    /// Use `|T_u|` as the z-link coefficient and `T_0` as the c-link
    /// coefficient. Both can cut off valid solutions.
    pub literal_bigm: bool,
}

/// Variable and constraint counts per family.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamilyCounts {
    pub x: usize,
    pub z: usize,
    pub s: usize,
    pub y: usize,
    pub c: usize,
    pub p: usize,
    pub cmax: usize,
    pub assign: usize,
    pub zlink: usize,
    pub size: usize,
    pub smax: usize,
    pub gsched: usize,
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
    pub load: usize,
    pub row: usize,
}

impl FamilyCounts {
    pub fn variables(&self) -> usize {
        self.x + self.z + self.s + self.y + self.c + self.p + self.cmax
    }

    pub fn constraints(&self) -> usize {
        self.assign
            + self.zlink
            + self.size
            + self.smax
            + self.gsched
            + self.c1
            + self.c2
            + self.c3
            + self.load
            + self.row
    }

    /// Recount from a parsed model; families are recognized by name prefix.
    pub fn recount(model: &LpModel) -> Self {
        let vars = model.variable_families();
        let rows = model.constraint_families();
        let v = |f: &str| vars.get(f).copied().unwrap_or(0);
        let r = |f: &str| rows.get(f).copied().unwrap_or(0);
        Self {
            x: v("x"),
            z: v("z"),
            s: v("s"),
            y: v("y"),
            c: v("c"),
            p: v("p"),
            cmax: v("Cmax"),
            assign: r("assign"),
            zlink: r("zlink"),
            size: r("size"),
            smax: r("smax"),
            gsched: r("gsched"),
            c1: r("c1"),
            c2: r("c2"),
            c3: r("c3"),
            load: r("load"),
            row: r("row"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStats {
    pub counts: FamilyCounts,
    /// Per period: coefficient of `z_u_j` in the z-link rows.
    pub z_big_m: Vec<Time>,
    /// Per period: coefficient of `y_u_j_k` in the c-link rows.
    pub c_big_m: Vec<Time>,
}

struct Layout {
    structure: PeriodStructure,
    classes: Vec<Vec<usize>>,
    z_big_m: Vec<Time>,
    c_big_m: Vec<Time>,
}

fn layout(instance: &Instance, options: &LpOptions) -> Result<Layout> {
    let report = validate(instance);
    if !report.ok {
        return Err(Error::InvalidInstance(report));
    }
    let structure = derive_period_structure(instance)?;
    let classes = instance.tasks_by_period();
    let base = structure.base_period();
    let payload: Vec<Time> = classes
        .iter()
        .map(|c| c.iter().map(|&i| instance.tasks[i].proc).sum())
        .collect();
    let (z_big_m, c_big_m) = if options.literal_bigm {
        (
            classes.iter().map(|c| c.len() as Time).collect(),
            vec![base; classes.len()],
        )
    } else {
        (
            payload.clone(),
            // Must cover the largest possible group size.
            payload
                .iter()
                .map(|&p| base.max(instance.max_group_size.min(instance.header_size + p)))
                .collect(),
        )
    };
    Ok(Layout {
        structure,
        classes,
        z_big_m,
        c_big_m,
    })
}

/// Closed-form counts; no model is built.
pub fn model_statistics(instance: &Instance, options: &LpOptions) -> Result<ModelStats> {
    let l = layout(instance, options)?;
    let n: Vec<usize> = l.classes.iter().map(Vec::len).collect();
    let b = &l.structure.interval_counts;
    let groups: usize = n.iter().sum();
    let pairs: usize = n.iter().zip(b).map(|(n, b)| n * b).sum();
    let counts = FamilyCounts {
        x: n.iter().map(|n| n * n).sum(),
        z: groups,
        s: groups,
        y: pairs,
        c: pairs,
        p: b.iter().sum(),
        cmax: 1,
        assign: groups,
        zlink: groups,
        size: groups,
        smax: groups,
        gsched: groups,
        c1: pairs,
        c2: pairs,
        c3: pairs,
        load: b.iter().sum(),
        row: l.structure.row_count,
    };
    Ok(ModelStats {
        counts,
        z_big_m: l.z_big_m,
        c_big_m: l.c_big_m,
    })
}

/// Conditions under which the exported model does not match the problem
/// exactly or needs enlarged coefficients.
pub fn export_warnings(instance: &Instance, options: &LpOptions) -> Vec<String> {
    let mut out = Vec::new();
    let base = instance.base_period();
    if instance.max_group_size > base {
        out.push(if options.literal_bigm {
            format!(
                "smax {} exceeds the shortest period {base}: the c-link rows with coefficient {base} cut off groups larger than {base}",
                instance.max_group_size
            )
        } else {
            format!(
                "smax {} exceeds the shortest period {base}: c-link coefficients enlarged to the largest possible group size",
                instance.max_group_size
            )
        });
    }
    if options.literal_bigm {
        for (u, class) in instance.tasks_by_period().iter().enumerate() {
            let payload: Time = class.iter().map(|&i| instance.tasks[i].proc).sum();
            if payload > class.len() as Time {
                out.push(format!(
                    "period {}: z-link coefficient {} is below the class payload {payload}",
                    instance.periods[u],
                    class.len()
                ));
            }
        }
    }
    out
}

fn coef(t: Time) -> i64 {
    i64::try_from(t).unwrap_or(i64::MAX)
}

fn x(u: usize, i: usize, j: usize) -> String {
    format!("x_{u}_{i}_{j}")
}
fn z(u: usize, j: usize) -> String {
    format!("z_{u}_{j}")
}
fn s(u: usize, j: usize) -> String {
    format!("s_{u}_{j}")
}
fn y(u: usize, j: usize, k: usize) -> String {
    format!("y_{u}_{j}_{k}")
}
fn c(u: usize, j: usize, k: usize) -> String {
    format!("c_{u}_{j}_{k}")
}
fn p(u: usize, k: usize) -> String {
    format!("p_{u}_{k}")
}
const CMAX: &str = "Cmax";

fn row(name: String, terms: Vec<Term>, relation: Relation, rhs: i64) -> Constraint {
    Constraint {
        name,
        terms,
        relation,
        rhs,
    }
}

pub fn build_model(instance: &Instance, options: &LpOptions) -> Result<LpModel> {
    let l = layout(instance, options)?;
    let hs = coef(instance.header_size);
    let mut m = LpModel {
        comments: vec![
            format!(
                "periods {:?} hs {} smax {} tasks {}",
                instance.periods,
                instance.header_size,
                instance.max_group_size,
                instance.tasks.len()
            ),
            if options.literal_bigm {
                "big-M: literal"
            } else {
                "big-M: widened"
            }
            .to_string(),
        ],
        objective: vec![Term::new(1, CMAX)],
        ..Default::default()
    };

    for (u, class) in l.classes.iter().enumerate() {
        let n = class.len();
        let procs: Vec<i64> = class
            .iter()
            .map(|&t| coef(instance.tasks[t].proc))
            .collect();
        let intervals = l.structure.interval_counts[u];
        for i in 0..n {
            m.constraints.push(row(
                format!("assign_{u}_{i}"),
                (0..n).map(|j| Term::new(1, x(u, i, j))).collect(),
                Relation::Eq,
                1,
            ));
        }
        for j in 0..n {
            let payload = || (0..n).map(move |i| (i, j));
            let mut zlink: Vec<Term> = payload()
                .map(|(i, j)| Term::new(procs[i], x(u, i, j)))
                .collect();
            zlink.push(Term::new(-coef(l.z_big_m[u]), z(u, j)));
            m.constraints
                .push(row(format!("zlink_{u}_{j}"), zlink, Relation::Le, 0));

            let mut size = vec![Term::new(1, s(u, j)), Term::new(-hs, z(u, j))];
            size.extend(payload().map(|(i, j)| Term::new(-procs[i], x(u, i, j))));
            m.constraints
                .push(row(format!("size_{u}_{j}"), size, Relation::Eq, 0));

            m.constraints.push(row(
                format!("smax_{u}_{j}"),
                vec![Term::new(1, s(u, j))],
                Relation::Le,
                coef(instance.max_group_size),
            ));
            m.constraints.push(row(
                format!("gsched_{u}_{j}"),
                (0..intervals).map(|k| Term::new(1, y(u, j, k))).collect(),
                Relation::Eq,
                1,
            ));
            let big = coef(l.c_big_m[u]);
            for k in 0..intervals {
                m.constraints.push(row(
                    format!("c1_{u}_{j}_{k}"),
                    vec![Term::new(1, c(u, j, k)), Term::new(-1, s(u, j))],
                    Relation::Le,
                    0,
                ));
                m.constraints.push(row(
                    format!("c2_{u}_{j}_{k}"),
                    vec![Term::new(1, c(u, j, k)), Term::new(-big, y(u, j, k))],
                    Relation::Le,
                    0,
                ));
                // c >= s - M (1 - y)
                m.constraints.push(row(
                    format!("c3_{u}_{j}_{k}"),
                    vec![
                        Term::new(1, c(u, j, k)),
                        Term::new(-1, s(u, j)),
                        Term::new(-big, y(u, j, k)),
                    ],
                    Relation::Ge,
                    -big,
                ));
            }
        }
        for k in 0..intervals {
            let mut load = vec![Term::new(1, p(u, k))];
            load.extend((0..n).map(|j| Term::new(-1, c(u, j, k))));
            m.constraints
                .push(row(format!("load_{u}_{k}"), load, Relation::Eq, 0));
        }
    }
    for k in 0..l.structure.row_count {
        let mut terms: Vec<Term> = l
            .structure
            .interval_counts
            .iter()
            .enumerate()
            .map(|(u, &b)| Term::new(1, p(u, k % b)))
            .collect();
        terms.push(Term::new(-1, CMAX));
        m.constraints
            .push(row(format!("row_{k}"), terms, Relation::Le, 0));
    }

    for (u, class) in l.classes.iter().enumerate() {
        let n = class.len();
        let intervals = l.structure.interval_counts[u];
        for i in 0..n {
            m.binaries.extend((0..n).map(|j| x(u, i, j)));
        }
        for j in 0..n {
            m.binaries.push(z(u, j));
            m.binaries.extend((0..intervals).map(|k| y(u, j, k)));
            m.generals.push(s(u, j));
            m.generals.extend((0..intervals).map(|k| c(u, j, k)));
        }
        m.generals.extend((0..intervals).map(|k| p(u, k)));
    }
    m.generals.push(CMAX.to_string());
    Ok(m)
}

pub fn export_lp(instance: &Instance, options: &LpOptions) -> Result<String> {
    Ok(build_model(instance, options)?.to_lp_string())
}

/// Variable values encoding a valid solution. Nonempty groups of a period
/// take slots `0..` in group-id order; the remaining slots hold empty groups
/// placed in interval 0.
pub fn solution_values(instance: &Instance, solution: &Solution) -> Result<BTreeMap<String, i64>> {
    let report = check_solution(instance, solution);
    if !report.ok {
        return Err(Error::InvalidSolution(report));
    }
    let structure = derive_period_structure(instance)?;
    let classes = instance.tasks_by_period();
    let eval = evaluate(instance, solution)?;
    let mut values = BTreeMap::new();

    for (u, class) in classes.iter().enumerate() {
        let n = class.len();
        let local: BTreeMap<usize, usize> =
            class.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut groups: Vec<_> = solution
            .nonempty_groups()
            .filter(|g| g.period_index == u)
            .collect();
        groups.sort_by_key(|g| g.group_id);
        for j in 0..n {
            let (size, interval) = match groups.get(j) {
                Some(g) => {
                    for t in &g.members {
                        values.insert(x(u, local[t], j), 1);
                    }
                    (
                        coef(group_size(&g.members, instance)?),
                        g.interval.unwrap_or(0),
                    )
                }
                None => (0, 0),
            };
            values.insert(z(u, j), i64::from(size > 0));
            values.insert(s(u, j), size);
            for k in 0..structure.interval_counts[u] {
                let on = k == interval;
                values.insert(y(u, j, k), i64::from(on));
                values.insert(c(u, j, k), if on { size } else { 0 });
            }
        }
        for (k, &load) in eval.period_loads[u].iter().enumerate() {
            values.insert(p(u, k), coef(load));
        }
    }
    values.insert(CMAX.to_string(), coef(eval.cmax));
    Ok(values)
}
