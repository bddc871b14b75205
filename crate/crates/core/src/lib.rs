//! Grouping of periodic signals into messages and their scheduling on a
//! single resource with harmonic periods, minimizing the peak load over the
//! observation intervals (Cmax).

pub mod bench;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod heuristic;
pub mod instance;
pub mod milp;
mod model;
pub mod par;
pub mod render;
pub mod schedule;

pub use error::{Error, Result};
pub use instance::{Instance, TaskSpec, Time};
pub use par::Execution;
pub use schedule::{Evaluation, Group, Solution};
