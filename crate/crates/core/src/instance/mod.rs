//! Problem instances: periodic tasks with harmonic periods, a per-message
//! header cost and a maximum message size.
//!
//! All times are integers. Task order is the input order and is preserved by
//! every transformation; solvers refer to tasks by their index in
//! [`Instance::tasks`].

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub(crate) mod format;
mod generate;

pub use format::{parse_instance, serialize_instance};
pub use generate::{generate_instance, micro_instance, GeneratorParams, MicroParams};

/// Integer time unit.
pub type Time = u64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaskSpec {
    pub id: String,
    pub period: Time,
    pub proc: Time,
}

impl TaskSpec {
    pub fn new(id: impl Into<String>, period: Time, proc: Time) -> Self {
        Self {
            id: id.into(),
            period,
            proc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub tasks: Vec<TaskSpec>,
    /// Strictly ascending.
    pub periods: Vec<Time>,
    pub header_size: Time,
    pub max_group_size: Time,
}

impl Instance {
    pub fn new(periods: Vec<Time>, header_size: Time, max_group_size: Time) -> Self {
        Self {
            tasks: Vec::new(),
            periods,
            header_size,
            max_group_size,
        }
    }

    /// Builder-style helper that appends a task.
    pub fn with_task(mut self, id: impl Into<String>, period: Time, proc: Time) -> Self {
        self.tasks.push(TaskSpec::new(id, period, proc));
        self
    }

    /// Index of `period` in the period list.
    pub fn period_index_of(&self, period: Time) -> Option<usize> {
        self.periods.binary_search(&period).ok()
    }

    /// Index of the period of task `task`. Panics on a task whose period is
    /// not listed; call [`validate`] first.
    pub fn task_period_index(&self, task: usize) -> usize {
        self.period_index_of(self.tasks[task].period)
            .expect("task period must be listed in the instance periods")
    }

    /// Task indices of each period class, in input order.
    pub fn tasks_by_period(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.periods.len()];
        for (i, task) in self.tasks.iter().enumerate() {
            if let Some(u) = self.period_index_of(task.period) {
                classes[u].push(i);
            }
        }
        classes
    }

    pub fn task_index(&self, id: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.id == id)
    }

    /// Shortest period `T_0`, or 0 for an instance without periods.
    pub fn base_period(&self) -> Time {
        self.periods.first().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

/// Machine-readable violation code shared by instance and solution checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    NonHarmonic,
    TaskTooLarge,
    BadPeriodRef,
    DuplicateId,
    EmptyPeriodClass,
    NotPartition,
    IntervalOutOfRange,
    GroupTooLarge,
    MixedPeriodGroup,
    UnassignedNonemptyGroup,
    DuplicateGroup,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::NonHarmonic => "NON_HARMONIC",
            ViolationCode::TaskTooLarge => "TASK_TOO_LARGE",
            ViolationCode::BadPeriodRef => "BAD_PERIOD_REF",
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::EmptyPeriodClass => "EMPTY_PERIOD_CLASS",
            ViolationCode::NotPartition => "NOT_PARTITION",
            ViolationCode::IntervalOutOfRange => "INTERVAL_OUT_OF_RANGE",
            ViolationCode::GroupTooLarge => "GROUP_TOO_LARGE",
            ViolationCode::MixedPeriodGroup => "MIXED_PERIOD_GROUP",
            ViolationCode::UnassignedNonemptyGroup => "UNASSIGNED_NONEMPTY_GROUP",
            ViolationCode::DuplicateGroup => "DUPLICATE_GROUP",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            ViolationCode::EmptyPeriodClass => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub(crate) fn from_violations(violations: Vec<Violation>) -> Self {
        let ok = violations
            .iter()
            .all(|v| v.code.severity() != Severity::Error);
        Self { ok, violations }
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.code.severity() == Severity::Error)
    }

    /// Turns an error-carrying report into `Err`.
    pub(crate) fn into_result(self, wrap: fn(ValidationReport) -> Error) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(wrap(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

pub fn validate(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |code, message: String| violations.push(Violation { code, message });

    for (u, pair) in instance.periods.windows(2).enumerate() {
        if pair[0] == 0 || pair[1] % pair[0] != 0 || pair[1] <= pair[0] {
            push(
                ViolationCode::NonHarmonic,
                format!(
                    "period {} (index {}) is not a proper multiple of {}",
                    pair[1],
                    u + 1,
                    pair[0]
                ),
            );
        }
    }
    if instance.periods.first() == Some(&0) {
        push(ViolationCode::NonHarmonic, "period 0 is not allowed".into());
    }

    let mut seen = HashSet::new();
    for task in &instance.tasks {
        if !seen.insert(task.id.as_str()) {
            push(
                ViolationCode::DuplicateId,
                format!("task id {:?} appears more than once", task.id),
            );
        }
        if instance.period_index_of(task.period).is_none() {
            push(
                ViolationCode::BadPeriodRef,
                format!("task {:?} has unlisted period {}", task.id, task.period),
            );
        }
        if instance.header_size + task.proc > instance.max_group_size {
            push(
                ViolationCode::TaskTooLarge,
                format!(
                    "task {:?}: header {} + proc {} exceeds max group size {}",
                    task.id, instance.header_size, task.proc, instance.max_group_size
                ),
            );
        }
    }

    for (u, class) in instance.tasks_by_period().iter().enumerate() {
        if class.is_empty() {
            push(
                ViolationCode::EmptyPeriodClass,
                format!("period {} has no tasks", instance.periods[u]),
            );
        }
    }

    ValidationReport::from_violations(violations)
}

/// Interval structure of the stacked view of the hyperperiod.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodStructure {
    pub periods: Vec<Time>,
    /// `periods[u] / periods[u-1]` for `u >= 1`.
    pub multipliers: Vec<Time>,
    /// Number of admissible first-occurrence intervals per period, `T_u / T_0`.
    pub interval_counts: Vec<usize>,
    /// Number of observation intervals (rows), `T_{r-1} / T_0`.
    pub row_count: usize,
    pub hyperperiod: Time,
}

impl PeriodStructure {
    pub fn base_period(&self) -> Time {
        self.periods.first().copied().unwrap_or(0)
    }

    /// How many times a group of period `u` occurs over the hyperperiod.
    pub fn occurrences(&self, u: usize) -> usize {
        self.row_count / self.interval_counts[u]
    }

    /// Rows in which a group of period `u` whose first occurrence is in
    /// interval `k` appears.
    pub fn rows_of(&self, u: usize, k: usize) -> impl Iterator<Item = usize> {
        (k..self.row_count).step_by(self.interval_counts[u].max(1))
    }
}

pub fn derive_period_structure(instance: &Instance) -> Result<PeriodStructure> {
    let periods = instance.periods.clone();
    let Some(&base) = periods.first() else {
        return Ok(PeriodStructure {
            periods,
            multipliers: Vec::new(),
            interval_counts: Vec::new(),
            row_count: 0,
            hyperperiod: 0,
        });
    };
    if base == 0 {
        return Err(Error::NonHarmonic("period 0 is not allowed".into()));
    }
    let mut multipliers = Vec::with_capacity(periods.len().saturating_sub(1));
    for pair in periods.windows(2) {
        if pair[1] <= pair[0] || pair[1] % pair[0] != 0 {
            return Err(Error::NonHarmonic(format!(
                "{} is not a proper multiple of {}",
                pair[1], pair[0]
            )));
        }
        multipliers.push(pair[1] / pair[0]);
    }
    let interval_counts: Vec<usize> = periods.iter().map(|&t| (t / base) as usize).collect();
    let hyperperiod = *periods.last().unwrap();
    Ok(PeriodStructure {
        row_count: *interval_counts.last().unwrap(),
        periods,
        multipliers,
        interval_counts,
        hyperperiod,
    })
}
