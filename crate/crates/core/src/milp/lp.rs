//! Integer linear programs in the fixed-keyword LP text dialect
//! (`Minimize` / `Subject To` / `Bounds` / `Generals` / `Binaries` / `End`).
//!
//! The reader accepts what the writer emits: whitespace-separated tokens,
//! named constraints, integer coefficients. It exists to recount and to check
//! emitted models, not to ingest arbitrary third-party files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::error::{Error, ParseErrorKind, Result};

const LINE_WIDTH: usize = 78;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coef: i64,
    pub var: String,
}

impl Term {
    pub fn new(coef: i64, var: impl Into<String>) -> Self {
        Self {
            coef,
            var: var.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<Term>,
    pub relation: Relation,
    pub rhs: i64,
}

/// A minimization problem over nonnegative integer variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LpModel {
    pub comments: Vec<String>,
    pub objective: Vec<Term>,
    pub constraints: Vec<Constraint>,
    pub generals: Vec<String>,
    pub binaries: Vec<String>,
}

/// The part of a name before the first underscore.
pub fn family(name: &str) -> &str {
    name.split('_').next().unwrap_or(name)
}

impl LpModel {
    /// Every variable mentioned anywhere in the model.
    pub fn variables(&self) -> BTreeSet<&str> {
        self.objective
            .iter()
            .chain(self.constraints.iter().flat_map(|c| &c.terms))
            .map(|t| t.var.as_str())
            .chain(self.generals.iter().map(String::as_str))
            .chain(self.binaries.iter().map(String::as_str))
            .collect()
    }

    pub fn variable_families(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for v in self.variables() {
            *out.entry(family(v).to_string()).or_insert(0) += 1;
        }
        out
    }

    pub fn constraint_families(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.constraints {
            *out.entry(family(&c.name).to_string()).or_insert(0) += 1;
        }
        out
    }

    /// Missing variables read as 0.
    pub fn objective_value(&self, values: &BTreeMap<String, i64>) -> i64 {
        linear(&self.objective, values)
    }

    /// Names of the violated constraints, followed by `bound:<var>` for
    /// negative values and `binary:<var>` for binaries outside {0, 1}.
    pub fn violations(&self, values: &BTreeMap<String, i64>) -> Vec<String> {
        let mut out: Vec<String> = self
            .constraints
            .iter()
            .filter(|c| !c.relation.holds(linear(&c.terms, values), c.rhs))
            .map(|c| c.name.clone())
            .collect();
        for v in self.variables() {
            let value = values.get(v).copied().unwrap_or(0);
            if value < 0 {
                out.push(format!("bound:{v}"));
            }
        }
        for b in &self.binaries {
            if !matches!(values.get(b).copied().unwrap_or(0), 0 | 1) {
                out.push(format!("binary:{b}"));
            }
        }
        out
    }

    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "\\ {c}");
        }
        out.push_str("Minimize\n");
        let mut line = String::from(" obj:");
        push_terms(&mut out, &mut line, &self.objective);
        out.push_str(&line);
        out.push('\n');

        out.push_str("Subject To\n");
        for c in &self.constraints {
            let mut line = format!(" {}:", c.name);
            push_terms(&mut out, &mut line, &c.terms);
            push_token(&mut out, &mut line, c.relation.as_str());
            push_token(&mut out, &mut line, &c.rhs.to_string());
            out.push_str(&line);
            out.push('\n');
        }
        // Default bounds (0 to +inf) apply to every variable.
        out.push_str("Bounds\n");
        for (keyword, names) in [("Generals", &self.generals), ("Binaries", &self.binaries)] {
            if names.is_empty() {
                continue;
            }
            out.push_str(keyword);
            out.push('\n');
            let mut line = String::new();
            for n in names {
                push_token(&mut out, &mut line, n);
            }
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("End\n");
        out
    }
}

fn linear(terms: &[Term], values: &BTreeMap<String, i64>) -> i64 {
    terms
        .iter()
        .map(|t| t.coef * values.get(&t.var).copied().unwrap_or(0))
        .sum()
}

/// Appends ` token`, flushing `line` to `out` first if it would get too long.
fn push_token(out: &mut String, line: &mut String, token: &str) {
    if !line.trim().is_empty() && line.len() + 1 + token.len() > LINE_WIDTH {
        out.push_str(line);
        out.push('\n');
        line.clear();
        line.push_str("   ");
    }
    line.push(' ');
    line.push_str(token);
}

fn push_terms(out: &mut String, line: &mut String, terms: &[Term]) {
    if terms.is_empty() {
        push_token(out, line, "0");
        return;
    }
    for (n, t) in terms.iter().enumerate() {
        let sign = if t.coef < 0 { "-" } else { "+" };
        let magnitude = t.coef.unsigned_abs();
        let body = if magnitude == 1 {
            t.var.clone()
        } else {
            format!("{magnitude} {}", t.var)
        };
        let token = match (n, t.coef < 0) {
            (0, false) => body,
            _ => format!("{sign} {body}"),
        };
        push_token(out, line, &token);
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Generals,
    Binaries,
    End,
}

fn section_keyword(line: &str) -> Option<Section> {
    match line.to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" => Some(Section::Bounds),
        "generals" | "general" => Some(Section::Generals),
        "binaries" | "binary" => Some(Section::Binaries),
        "end" => Some(Section::End),
        _ => None,
    }
}

pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut model = LpModel::default();
    let mut section = Section::Preamble;
    // (first line number, tokens) per section
    let mut objective: Vec<(usize, String)> = Vec::new();
    let mut constraints: Vec<(usize, String)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('\\') {
            model.comments.push(comment.trim().to_string());
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if let Some(next) = section_keyword(line) {
            section = next;
            continue;
        }
        let tokens = line.split_whitespace().map(|t| (line_no, t.to_string()));
        match section {
            Section::Preamble => {
                return Err(Error::parse(
                    ParseErrorKind::Syntax,
                    line_no,
                    "content before Minimize",
                ));
            }
            Section::Objective => objective.extend(tokens),
            Section::Constraints => constraints.extend(tokens),
            Section::Bounds => {
                return Err(Error::parse(
                    ParseErrorKind::UnknownKeyword,
                    line_no,
                    "explicit bounds are not supported",
                ));
            }
            Section::Generals => model.generals.extend(tokens.map(|(_, t)| t)),
            Section::Binaries => model.binaries.extend(tokens.map(|(_, t)| t)),
            Section::End => {
                return Err(Error::parse(
                    ParseErrorKind::Syntax,
                    line_no,
                    "content after End",
                ));
            }
        }
    }
    if section != Section::End {
        return Err(Error::parse(
            ParseErrorKind::MissingField,
            text.lines().count(),
            "missing End",
        ));
    }

    let mut objective = objective.into_iter().peekable();
    if objective.peek().is_some_and(|(_, t)| t.ends_with(':')) {
        objective.next();
    }
    let (terms, rest) = parse_terms(&mut objective)?;
    if let Some((line, token)) = rest {
        return Err(Error::parse(
            ParseErrorKind::Syntax,
            line,
            format!("unexpected `{token}` in objective"),
        ));
    }
    model.objective = terms;

    let mut tokens = constraints.into_iter().peekable();
    while let Some((line, head)) = tokens.next() {
        let Some(name) = head.strip_suffix(':') else {
            return Err(Error::parse(
                ParseErrorKind::Syntax,
                line,
                format!("expected constraint name, got `{head}`"),
            ));
        };
        let (terms, relation) = parse_terms(&mut tokens)?;
        let relation = match relation.as_ref().map(|(_, t)| t.as_str()) {
            Some("<=" | "=<") => Relation::Le,
            Some(">=" | "=>") => Relation::Ge,
            Some("=") => Relation::Eq,
            _ => {
                return Err(Error::parse(
                    ParseErrorKind::Syntax,
                    line,
                    format!("constraint `{name}` has no relation"),
                ))
            }
        };
        let rhs = match tokens.next() {
            Some((l, t)) => t.parse::<i64>().map_err(|_| {
                Error::parse(
                    ParseErrorKind::BadValue,
                    l,
                    format!("bad right-hand side `{t}`"),
                )
            })?,
            None => {
                return Err(Error::parse(
                    ParseErrorKind::Syntax,
                    line,
                    format!("constraint `{name}` has no right-hand side"),
                ))
            }
        };
        model.constraints.push(Constraint {
            name: name.to_string(),
            terms,
            relation,
            rhs,
        });
    }
    Ok(model)
}

/// A token with its line number.
type Token = (usize, String);

/// Reads `[+|-] [coef] var` terms up to a relation token, which is returned
/// along with the terms. A lone `0` stands for the empty expression.
fn parse_terms(
    tokens: &mut std::iter::Peekable<impl Iterator<Item = (usize, String)>>,
) -> Result<(Vec<Term>, Option<Token>)> {
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut coef: Option<i64> = None;
    for (line, token) in tokens.by_ref() {
        match token.as_str() {
            "<=" | "=<" | ">=" | "=>" | "=" => return Ok((terms, Some((line, token)))),
            "+" => sign = 1,
            "-" => sign = -1,
            t if t.chars().next().is_some_and(|c| c.is_ascii_digit()) => {
                let value = t.parse::<i64>().map_err(|_| {
                    Error::parse(
                        ParseErrorKind::BadValue,
                        line,
                        format!("bad coefficient `{t}`"),
                    )
                })?;
                coef = Some(value);
            }
            t => {
                terms.push(Term::new(sign * coef.take().unwrap_or(1), t));
                sign = 1;
            }
        }
    }
    if coef.is_some_and(|c| c != 0) {
        return Err(Error::parse(
            ParseErrorKind::Syntax,
            0,
            "dangling coefficient",
        ));
    }
    Ok((terms, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LpModel {
        LpModel {
            comments: vec!["sample".into()],
            objective: vec![Term::new(1, "Cmax")],
            constraints: vec![
                Constraint {
                    name: "a_0".into(),
                    terms: vec![Term::new(1, "x_0"), Term::new(-3, "y_0")],
                    relation: Relation::Le,
                    rhs: 0,
                },
                Constraint {
                    name: "b_0".into(),
                    terms: vec![Term::new(-1, "x_0"), Term::new(2, "Cmax")],
                    relation: Relation::Ge,
                    rhs: -4,
                },
            ],
            generals: vec!["x_0".into(), "Cmax".into()],
            binaries: vec!["y_0".into()],
        }
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let text = m.to_lp_string();
        assert!(text.contains(" a_0: x_0 - 3 y_0 <= 0\n"), "{text}");
        assert!(text.contains(" b_0: - x_0 + 2 Cmax >= -4\n"), "{text}");
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn long_rows_wrap_and_parse_back() {
        let terms: Vec<Term> = (0..60)
            .map(|i| Term::new(i + 1, format!("v_{i}")))
            .collect();
        let m = LpModel {
            constraints: vec![Constraint {
                name: "long".into(),
                terms,
                relation: Relation::Eq,
                rhs: 7,
            }],
            ..Default::default()
        };
        let text = m.to_lp_string();
        assert!(text.lines().all(|l| l.len() <= LINE_WIDTH), "{text}");
        assert_eq!(parse_lp(&text).unwrap(), m);
    }

    #[test]
    fn empty_model_is_valid_text() {
        let text = LpModel::default().to_lp_string();
        assert_eq!(text, "Minimize\n obj: 0\nSubject To\nBounds\nEnd\n");
        assert_eq!(parse_lp(&text).unwrap(), LpModel::default());
    }

    #[test]
    fn checker() {
        let m = sample();
        let mut v: BTreeMap<String, i64> = [("x_0", 3), ("y_0", 1), ("Cmax", 0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert!(m.violations(&v).is_empty());
        v.insert("x_0".into(), 5);
        assert_eq!(m.violations(&v), vec!["a_0", "b_0"]);
        v.insert("y_0".into(), 2);
        v.insert("Cmax".into(), -1);
        let found = m.violations(&v);
        assert!(found.contains(&"binary:y_0".to_string()));
        assert!(found.contains(&"bound:Cmax".to_string()));
        assert_eq!(m.objective_value(&v), -1);
    }

    #[test]
    fn families() {
        let m = sample();
        assert_eq!(m.variable_families().get("x"), Some(&1));
        assert_eq!(m.variable_families().get("Cmax"), Some(&1));
        assert_eq!(m.constraint_families().get("a"), Some(&1));
    }

    #[test]
    fn reader_errors() {
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c1: x 3\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\n").is_err());
        assert!(parse_lp("x\nMinimize\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c1: x <= z\nEnd\n").is_err());
    }
}
