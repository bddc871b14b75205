//! Line-oriented instance text format.
//!
//! ```text
//! # comment
//! hs 1
//! smax 4
//! periods 4 8
//! task t1 4 2
//! task t2 8 1
//! ```

use std::fmt::Write;

use super::{Instance, TaskSpec, Time};
use crate::error::{Error, ParseErrorKind, Result};

pub(crate) fn parse_int(token: &str, line: usize, what: &str) -> Result<Time> {
    if token.starts_with('-') {
        return Err(Error::parse(
            ParseErrorKind::BadValue,
            line,
            format!("{what} must be nonnegative, got {token}"),
        ));
    }
    token.parse::<Time>().map_err(|_| {
        Error::parse(
            ParseErrorKind::BadValue,
            line,
            format!("{what} is not an integer: {token:?}"),
        )
    })
}

fn parse_positive(token: &str, line: usize, what: &str) -> Result<Time> {
    let v = parse_int(token, line, what)?;
    if v == 0 {
        return Err(Error::parse(
            ParseErrorKind::BadValue,
            line,
            format!("{what} must be positive"),
        ));
    }
    Ok(v)
}

/// Strips a trailing `#` comment and surrounding whitespace.
pub(crate) fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn single_value<'a>(tokens: &[&'a str], line: usize, keyword: &str) -> Result<&'a str> {
    match tokens {
        [_, v] => Ok(v),
        _ => Err(Error::parse(
            ParseErrorKind::Syntax,
            line,
            format!("`{keyword}` takes exactly one value"),
        )),
    }
}

fn set_once(slot: &mut Option<Time>, value: Time, line: usize, keyword: &str) -> Result<()> {
    if slot.replace(value).is_some() {
        return Err(Error::parse(
            ParseErrorKind::DuplicateField,
            line,
            format!("`{keyword}` given more than once"),
        ));
    }
    Ok(())
}

/// Parses an instance. Does not run [`super::validate`].
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut hs = None;
    let mut smax = None;
    let mut periods: Option<Vec<Time>> = None;
    let mut tasks = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens[0] {
            "hs" => {
                let v = parse_int(single_value(&tokens, line, "hs")?, line, "hs")?;
                set_once(&mut hs, v, line, "hs")?;
            }
            "smax" => {
                let v = parse_positive(single_value(&tokens, line, "smax")?, line, "smax")?;
                set_once(&mut smax, v, line, "smax")?;
            }
            "periods" => {
                if periods.is_some() {
                    return Err(Error::parse(
                        ParseErrorKind::DuplicateField,
                        line,
                        "`periods` given more than once",
                    ));
                }
                let values = tokens[1..]
                    .iter()
                    .map(|t| parse_positive(t, line, "period"))
                    .collect::<Result<Vec<_>>>()?;
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::parse(
                        ParseErrorKind::BadValue,
                        line,
                        "periods must be strictly ascending",
                    ));
                }
                periods = Some(values);
            }
            "task" => {
                let [_, id, period, proc] = tokens[..] else {
                    return Err(Error::parse(
                        ParseErrorKind::Syntax,
                        line,
                        "expected `task <id> <period> <proc>`",
                    ));
                };
                tasks.push(TaskSpec {
                    id: id.to_string(),
                    period: parse_positive(period, line, "task period")?,
                    proc: parse_positive(proc, line, "task proc")?,
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

    let missing = |name: &str| {
        Error::parse(
            ParseErrorKind::MissingField,
            0,
            format!("missing `{name}` line"),
        )
    };
    Ok(Instance {
        header_size: hs.ok_or_else(|| missing("hs"))?,
        max_group_size: smax.ok_or_else(|| missing("smax"))?,
        periods: periods.ok_or_else(|| missing("periods"))?,
        tasks,
    })
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "hs {}", instance.header_size).unwrap();
    writeln!(out, "smax {}", instance.max_group_size).unwrap();
    out.push_str("periods");
    for p in &instance.periods {
        write!(out, " {p}").unwrap();
    }
    out.push('\n');
    for t in &instance.tasks {
        writeln!(out, "task {} {} {}", t.id, t.period, t.proc).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, GeneratorParams};

    const THREE: &str = "# instance A\nhs 1\nsmax 4\nperiods 4 8\n\ntask t1 4 2\ntask t2 8 1  # trailing\ntask t3 8 1\n";

    #[test]
    fn parses_three_tasks() {
        let inst = parse_instance(THREE).unwrap();
        assert_eq!(inst.tasks.len(), 3);
        assert_eq!(inst.periods, vec![4, 8]);
        assert_eq!(inst.header_size, 1);
        assert_eq!(inst.max_group_size, 4);
        assert_eq!(inst.tasks[1], TaskSpec::new("t2", 8, 1));
    }

    #[test]
    fn missing_smax() {
        let err = parse_instance("hs 1\nperiods 4\n").unwrap_err();
        assert_eq!(err.parse_kind(), Some(ParseErrorKind::MissingField));
    }

    #[test]
    fn negative_proc_reports_line() {
        let err = parse_instance("hs 1\nsmax 4\nperiods 4\ntask a 4 -2\n").unwrap_err();
        match err {
            Error::Parse { kind, line, .. } => {
                assert_eq!(kind, ParseErrorKind::BadValue);
                assert_eq!(line, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn other_errors() {
        let kind = |s: &str| parse_instance(s).unwrap_err().parse_kind().unwrap();
        assert_eq!(
            kind("hs 1\nsmax 4\nperiods 4\nfoo 3\n"),
            ParseErrorKind::UnknownKeyword
        );
        assert_eq!(kind("hs x\nsmax 4\nperiods 4\n"), ParseErrorKind::BadValue);
        assert_eq!(kind("hs 1 2\nsmax 4\nperiods 4\n"), ParseErrorKind::Syntax);
        assert_eq!(
            kind("hs 1\nhs 2\nsmax 4\nperiods 4\n"),
            ParseErrorKind::DuplicateField
        );
        assert_eq!(
            kind("hs 1\nsmax 4\nperiods 8 4\n"),
            ParseErrorKind::BadValue
        );
        assert_eq!(
            kind("hs 1\nsmax 4\nperiods 4\ntask a 4\n"),
            ParseErrorKind::Syntax
        );
    }

    #[test]
    fn empty_task_list_serializes_header_only() {
        let inst = Instance::new(vec![4, 8], 2, 9);
        let text = serialize_instance(&inst);
        assert_eq!(text, "hs 2\nsmax 9\nperiods 4 8\n");
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn task_lines_in_input_order() {
        let inst = parse_instance(THREE).unwrap();
        let text = serialize_instance(&inst);
        let ids: Vec<_> = text
            .lines()
            .filter(|l| l.starts_with("task "))
            .map(|l| l.split_whitespace().nth(1).unwrap())
            .collect();
        assert_eq!(ids, ["t1", "t2", "t3"]);
    }

    #[test]
    fn round_trip_600_tasks() {
        let params = GeneratorParams {
            tasks: 600,
            period_count: 6,
            ..GeneratorParams::default()
        };
        let inst = generate_instance(&params, 42).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }
}
