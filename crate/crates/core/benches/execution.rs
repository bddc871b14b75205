//! Sequential against parallel execution for the three data-parallel paths.
//! Without the `parallel` feature both variants run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tt_grouper::bench::{run_suite, Method, SuiteConfig, SuiteEntry};
use tt_grouper::exact::{solve_exact, SolveLimits};
use tt_grouper::heuristic::{construct_greedy, local_search, LocalSearchConfig};
use tt_grouper::instance::{generate_instance, GeneratorParams};
use tt_grouper::{Execution, Instance};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn instance(tasks: usize, periods: usize, seed: u64) -> Instance {
    let params = GeneratorParams {
        tasks,
        period_count: periods,
        base_period: 1000,
        multiplier_choices: vec![2, 3, 4],
        proc_min: 5,
        proc_max: 120,
        header_size: 30,
        max_group_size: 400,
        period_weights: None,
    };
    generate_instance(&params, seed).unwrap()
}

fn local(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_search");
    let inst = instance(400, 4, 1);
    let start = construct_greedy(&inst).unwrap();
    for (name, execution) in MODES {
        let config = LocalSearchConfig {
            iterations: 50,
            execution,
            ..LocalSearchConfig::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| local_search(black_box(&inst), &start, &config).unwrap())
        });
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    let inst = instance(24, 2, 5);
    for (name, execution) in MODES {
        let limits = SolveLimits::nodes(20_000).with_execution(execution);
        group.bench_function(name, |b| {
            b.iter(|| solve_exact(black_box(&inst), &limits).unwrap())
        });
    }
    group.finish();
}

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    let entries: Vec<SuiteEntry> = (0..16)
        .map(|seed| SuiteEntry {
            id: format!("i{seed}"),
            instance: instance(60, 3, seed),
            seed,
        })
        .collect();
    for (name, execution) in MODES {
        let config = SuiteConfig {
            methods: vec![Method::Greedy, Method::Local],
            limits: SolveLimits::nodes(10_000),
            execution,
            workers: None,
        };
        group.bench_with_input(BenchmarkId::new(name, entries.len()), &entries, |b, e| {
            b.iter(|| run_suite(e, &config))
        });
    }
    group.finish();
}

criterion_group!(benches, local, exact, suite);
criterion_main!(benches);
