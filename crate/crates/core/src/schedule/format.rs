//! Solution text format.
//!
//! ```text
//! cmax 5
//! group 0 1 interval 0 tasks t1
//! group 1 1 interval 0 tasks t2
//! group 1 2 interval 1 tasks t3
//! ```
//!
//! The `cmax` line is advisory and not checked against the groups.

use std::fmt::Write;

use super::{Group, Solution};
use crate::error::{Error, ParseErrorKind, Result};
use crate::instance::format::{content, parse_int};
use crate::instance::{Instance, Time};

/// Parses a solution against `instance`, resolving task ids to indices.
/// Returns the solution and the advisory `cmax`, if present.
pub fn parse_solution(text: &str, instance: &Instance) -> Result<(Solution, Option<Time>)> {
    let mut cmax = None;
    let mut groups = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "cmax" => {
                let [_, v] = tokens[..] else {
                    return Err(Error::parse(
                        ParseErrorKind::Syntax,
                        line,
                        "`cmax` takes one value",
                    ));
                };
                if cmax.replace(parse_int(v, line, "cmax")?).is_some() {
                    return Err(Error::parse(
                        ParseErrorKind::DuplicateField,
                        line,
                        "`cmax` given more than once",
                    ));
                }
            }
            "group" => {
                if tokens.len() < 6 || tokens[3] != "interval" || tokens[5] != "tasks" {
                    return Err(Error::parse(
                        ParseErrorKind::Syntax,
                        line,
                        "expected `group <period_index> <group_id> interval <k> tasks <id>...`",
                    ));
                }
                let period_index = parse_int(tokens[1], line, "period index")? as usize;
                let group_id =
                    u32::try_from(parse_int(tokens[2], line, "group id")?).map_err(|_| {
                        Error::parse(ParseErrorKind::BadValue, line, "group id out of range")
                    })?;
                let interval = parse_int(tokens[4], line, "interval")? as usize;
                let members = tokens[6..]
                    .iter()
                    .map(|id| {
                        instance.task_index(id).ok_or_else(|| {
                            Error::parse(
                                ParseErrorKind::UnknownTask,
                                line,
                                format!("unknown task {id:?}"),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                groups.push(Group {
                    period_index,
                    group_id,
                    members,
                    interval: Some(interval),
                });
            }
            other => {
                return Err(Error::parse(
                    ParseErrorKind::UnknownKeyword,
                    line,
                    format!("unknown keyword {other:?}"),
                ))
            }
        }
    }
    Ok((Solution { groups }, cmax))
}

/// Writes nonempty groups in canonical order, members in the order stored.
pub fn serialize_solution(instance: &Instance, solution: &Solution, cmax: Option<Time>) -> String {
    let mut out = String::new();
    if let Some(c) = cmax {
        writeln!(out, "cmax {c}").unwrap();
    }
    let mut groups: Vec<&Group> = solution.nonempty_groups().collect();
    groups.sort_by_key(|g| (g.period_index, g.group_id));
    for g in groups {
        write!(
            out,
            "group {} {} interval {} tasks",
            g.period_index,
            g.group_id,
            g.interval.unwrap_or(0)
        )
        .unwrap();
        for &m in &g.members {
            write!(out, " {}", instance.tasks[m].id).unwrap();
        }
        out.push('\n');
    }
    out
}
