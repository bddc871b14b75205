//! Seeded random instance generation.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, TaskSpec, Time};
use crate::error::{Error, Result};
use crate::exact::{oracle_search_space, ORACLE_SPACE_LIMIT};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub tasks: usize,
    pub period_count: usize,
    pub base_period: Time,
    /// Each adjacent period ratio is drawn from this set; entries in {2, 3, 4}.
    pub multiplier_choices: Vec<Time>,
    pub proc_min: Time,
    pub proc_max: Time,
    pub header_size: Time,
    pub max_group_size: Time,
    /// Relative weight of each period when assigning tasks. Uniform when `None`.
    pub period_weights: Option<Vec<f64>>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            tasks: 50,
            period_count: 4,
            base_period: 4000,
            multiplier_choices: vec![2],
            proc_min: 10,
            proc_max: 200,
            header_size: 90,
            max_group_size: 600,
            period_weights: None,
        }
    }
}

impl GeneratorParams {
    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Generator(msg));
        if !(1..=10_000).contains(&self.tasks) {
            return bad(format!("task count {} outside [1, 10000]", self.tasks));
        }
        if !(1..=6).contains(&self.period_count) {
            return bad(format!("period count {} outside [1, 6]", self.period_count));
        }
        if self.base_period == 0 {
            return bad("base period must be positive".into());
        }
        if self.multiplier_choices.is_empty()
            || self.multiplier_choices.iter().any(|m| !(2..=4).contains(m))
        {
            return bad("multiplier choices must be a nonempty subset of {2, 3, 4}".into());
        }
        if self.proc_min == 0 || self.proc_min > self.proc_max {
            return bad(format!(
                "bad processing time range [{}, {}]",
                self.proc_min, self.proc_max
            ));
        }
        if self.proc_min + self.header_size > self.max_group_size {
            return bad(format!(
                "proc_min {} + hs {} exceeds smax {}",
                self.proc_min, self.header_size, self.max_group_size
            ));
        }
        if let Some(w) = &self.period_weights {
            if w.len() != self.period_count {
                return bad(format!(
                    "{} period weights given for {} periods",
                    w.len(),
                    self.period_count
                ));
            }
        }
        Ok(())
    }
}

/// Generates an instance that passes validation. Identical params and seed
/// always yield the identical instance.
pub fn generate_instance(params: &GeneratorParams, seed: u64) -> Result<Instance> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut periods = Vec::with_capacity(params.period_count);
    periods.push(params.base_period);
    for _ in 1..params.period_count {
        let m = *params.multiplier_choices.choose(&mut rng).unwrap();
        periods.push(periods.last().unwrap() * m);
    }

    let weights = params
        .period_weights
        .clone()
        .unwrap_or_else(|| vec![1.0; params.period_count]);
    let period_dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::Generator(format!("period weights: {e}")))?;

    // Sampling from the clipped range is rejection sampling of oversized
    // tasks done in closed form.
    let proc_hi = params
        .proc_max
        .min(params.max_group_size - params.header_size);
    let tasks = (1..=params.tasks)
        .map(|n| {
            let period = periods[period_dist.sample(&mut rng)];
            let proc = rng.random_range(params.proc_min..=proc_hi);
            TaskSpec::new(format!("t{n}"), period, proc)
        })
        .collect();

    Ok(Instance {
        tasks,
        periods,
        header_size: params.header_size,
        max_group_size: params.max_group_size,
    })
}

/// Parameters of the small instances used to cross-check exact engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MicroParams {
    pub max_tasks: usize,
    pub max_periods: usize,
    pub max_proc: Time,
    pub max_header: Time,
    /// `true` for a group capacity large enough to never bind.
    pub huge_smax: bool,
}

impl Default for MicroParams {
    fn default() -> Self {
        Self {
            max_tasks: 8,
            max_periods: 2,
            max_proc: 10,
            max_header: 3,
            huge_smax: false,
        }
    }
}

/// A small random instance whose exhaustive search space stays within the
/// oracle guard.
pub fn micro_instance(params: &MicroParams, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d69_6372_6f00_0000);
    loop {
        let header_size = rng.random_range(0..=params.max_header);
        let max_group_size = if params.huge_smax {
            1000
        } else {
            header_size + params.max_proc + rng.random_range(0..=params.max_proc / 2)
        };
        let gen = GeneratorParams {
            tasks: rng.random_range(1..=params.max_tasks),
            period_count: rng.random_range(1..=params.max_periods),
            base_period: 20,
            multiplier_choices: vec![2, 3],
            proc_min: 1,
            proc_max: params.max_proc,
            header_size,
            max_group_size,
            period_weights: None,
        };
        let inst = generate_instance(&gen, rng.random()).expect("micro parameters are satisfiable");
        if oracle_search_space(&inst) <= ORACLE_SPACE_LIMIT {
            return inst;
        }
    }
}
