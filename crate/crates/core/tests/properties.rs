use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tt_grouper::exact::{solve_exact, SolveLimits};
use tt_grouper::heuristic::{local_search, LocalSearchConfig};
use tt_grouper::instance::{
    derive_period_structure, generate_instance, parse_instance, serialize_instance, GeneratorParams,
};
use tt_grouper::schedule::{
    check_solution, evaluate, expand_start_times, group_size, parse_solution, serialize_solution,
    timeline_consistency,
};
use tt_grouper::{Group, Instance, Solution, Time};

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

/// A uniformly shuffled first-fit grouping with random intervals.
fn random_solution(inst: &Instance, seed: u64) -> Solution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let structure = derive_period_structure(inst).unwrap();
    let mut groups = Vec::new();
    for (u, class) in inst.tasks_by_period().into_iter().enumerate() {
        let mut order = class;
        order.shuffle(&mut rng);
        let mut bins: Vec<(Vec<usize>, Time)> = Vec::new();
        for t in order {
            let p = inst.tasks[t].proc;
            let fits: Vec<usize> = (0..bins.len())
                .filter(|&b| bins[b].1 + p <= inst.max_group_size)
                .collect();
            if fits.is_empty() || rng.random_bool(0.3) {
                bins.push((vec![t], inst.header_size + p));
            } else {
                let b = fits[rng.random_range(0..fits.len())];
                bins[b].0.push(t);
                bins[b].1 += p;
            }
        }
        for (j, (members, _)) in bins.into_iter().enumerate() {
            let k = rng.random_range(0..structure.interval_counts[u]);
            groups.push(Group::new(u, j as u32 + 1, members, k));
        }
    }
    Solution::new(groups)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_solutions_are_valid_and_consistent(tasks in 1usize..150, periods in 1usize..=5, seed: u64) {
        let inst = instance(tasks, periods, seed);
        let sol = random_solution(&inst, seed);
        prop_assert!(check_solution(&inst, &sol).ok);
        prop_assert!(timeline_consistency(&inst, &sol));
    }

    #[test]
    fn strict_periodicity(tasks in 1usize..80, periods in 1usize..=5, seed: u64) {
        let inst = instance(tasks, periods, seed);
        let sol = random_solution(&inst, seed);
        let timeline = expand_start_times(&inst, &sol).unwrap();
        for (g, group) in sol.groups.iter().enumerate() {
            let starts: Vec<Time> = timeline.occurrences.iter().filter(|o| o.group == g).map(|o| o.start).collect();
            let period = inst.periods[group.period_index];
            for (m, s) in starts.iter().enumerate() {
                prop_assert_eq!(*s, starts[0] + m as Time * period);
            }
        }
    }

    #[test]
    fn mass_conservation(tasks in 1usize..120, periods in 1usize..=5, seed: u64) {
        let inst = instance(tasks, periods, seed);
        let sol = random_solution(&inst, seed);
        let structure = derive_period_structure(&inst).unwrap();
        let eval = evaluate(&inst, &sol).unwrap();
        let rows: Time = eval.row_totals.iter().sum();
        let groups: Time = sol
            .groups
            .iter()
            .map(|g| group_size(&g.members, &inst).unwrap() * structure.occurrences(g.period_index) as Time)
            .sum();
        prop_assert_eq!(rows, groups);
        prop_assert_eq!(eval.cmax, eval.row_totals.iter().copied().max().unwrap_or(0));
    }

    #[test]
    fn empty_groups_change_nothing(tasks in 1usize..60, periods in 1usize..=4, seed: u64) {
        let inst = instance(tasks, periods, seed);
        let sol = random_solution(&inst, seed);
        let before = evaluate(&inst, &sol).unwrap();
        let mut padded = sol.clone();
        for u in 0..inst.periods.len() {
            padded.groups.push(Group { period_index: u, group_id: 10_000 + u as u32, members: vec![], interval: None });
        }
        prop_assert!(check_solution(&inst, &padded).ok);
        prop_assert_eq!(evaluate(&inst, &padded).unwrap(), before);
    }

    #[test]
    fn local_search_from_random_starts(tasks in 1usize..60, periods in 1usize..=4, seed: u64) {
        let inst = instance(tasks, periods, seed);
        let start = random_solution(&inst, seed);
        let config = LocalSearchConfig { iterations: 200, seed, ..LocalSearchConfig::default() };
        let result = local_search(&inst, &start, &config).unwrap();
        prop_assert!(check_solution(&inst, &result).ok);
        prop_assert!(evaluate(&inst, &result).unwrap().cmax <= evaluate(&inst, &start).unwrap().cmax);
    }

    #[test]
    fn text_formats_round_trip(tasks in 0usize..100, periods in 1usize..=6, seed: u64) {
        let inst = if tasks == 0 { Instance::new(vec![1000, 2000], 30, 400) } else { instance(tasks, periods, seed) };
        let back = parse_instance(&serialize_instance(&inst)).unwrap();
        prop_assert_eq!(&back, &inst);
        let sol = random_solution(&inst, seed).normalized();
        let cmax = evaluate(&inst, &sol).unwrap().cmax;
        let (parsed, advisory) = parse_solution(&serialize_solution(&inst, &sol, Some(cmax)), &inst).unwrap();
        prop_assert_eq!(parsed.normalized(), sol);
        prop_assert_eq!(advisory, Some(cmax));
    }
}

#[test]
fn exact_never_worse_than_a_random_solution() {
    for seed in 0..20 {
        let inst = instance(6, 2, seed);
        let best = solve_exact(&inst, &SolveLimits::unlimited()).unwrap();
        for s in 0..20 {
            let cmax = evaluate(&inst, &random_solution(&inst, s)).unwrap().cmax;
            assert!(best.cmax <= cmax, "seed {seed}");
        }
    }
}
