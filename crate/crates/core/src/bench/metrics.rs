use std::collections::BTreeMap;

use super::RunRecord;
use crate::instance::Time;

/// Percent excess of each successful method's Cmax over the best Cmax of the
/// instance. Failed runs are absent; an all-failed instance gives an empty
/// map. With a best Cmax of 0 the gap is 0 for other zeros and infinite
/// otherwise.
pub fn best_gap(records: &[&RunRecord]) -> BTreeMap<String, f64> {
    let Some(best) = records.iter().filter_map(|r| r.cmax).min() else {
        return BTreeMap::new();
    };
    records
        .iter()
        .filter_map(|r| r.cmax.map(|c| (r.method.clone(), gap(c, best))))
        .collect()
}

fn gap(cmax: Time, best: Time) -> f64 {
    if best == 0 {
        return if cmax == 0 { 0.0 } else { f64::INFINITY };
    }
    100.0 * (cmax - best) as f64 / best as f64
}

/// Ranks by ascending Cmax with tied methods sharing the average of their
/// positions. Failures tie for the last positions, so ranks always sum to
/// `k (k + 1) / 2` over `k` methods.
pub fn rank(records: &[&RunRecord]) -> BTreeMap<String, f64> {
    let mut sorted: Vec<(Option<Time>, &str)> = records
        .iter()
        .map(|r| (r.cmax, r.method.as_str()))
        .collect();
    // None sorts after every value.
    sorted.sort_by_key(|&(c, _)| (c.is_none(), c));
    let mut out = BTreeMap::new();
    let mut start = 0;
    while start < sorted.len() {
        let end = start
            + sorted[start..]
                .iter()
                .take_while(|(c, _)| *c == sorted[start].0)
                .count();
        // Positions start+1 ..= end.
        let shared = (start + 1 + end) as f64 / 2.0;
        for &(_, m) in &sorted[start..end] {
            out.insert(m.to_string(), shared);
        }
        start = end;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub method: String,
    pub instances: usize,
    pub successes: usize,
    /// `None` when the method never succeeded.
    pub mean_bg: Option<f64>,
    pub median_bg: Option<f64>,
    pub mean_rank: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonTable {
    /// In order of first appearance in the records.
    pub rows: Vec<TableRow>,
    /// Instances on which every method failed; excluded from all columns.
    pub skipped: Vec<String>,
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

pub fn comparison_table(records: &[RunRecord]) -> ComparisonTable {
    let mut methods: Vec<&str> = Vec::new();
    let mut instances: Vec<&str> = Vec::new();
    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
        if !by_instance.contains_key(r.instance.as_str()) {
            instances.push(&r.instance);
        }
        by_instance.entry(&r.instance).or_default().push(r);
    }

    let mut gaps: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut ranks: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut skipped = Vec::new();
    for id in instances {
        let runs = &by_instance[id];
        if runs.iter().all(|r| r.cmax.is_none()) {
            skipped.push(id.to_string());
            continue;
        }
        for r in runs {
            *seen.entry(&r.method).or_default() += 1;
        }
        for (m, g) in best_gap(runs) {
            let key = methods.iter().find(|x| **x == m).expect("known method");
            gaps.entry(key).or_default().push(g);
        }
        for (m, k) in rank(runs) {
            let key = methods.iter().find(|x| **x == m).expect("known method");
            ranks.entry(key).or_default().push(k);
        }
    }

    let rows = methods
        .iter()
        .map(|&m| {
            let mut g = gaps.remove(m).unwrap_or_default();
            let k = ranks.remove(m).unwrap_or_default();
            let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            TableRow {
                method: m.to_string(),
                instances: seen.get(m).copied().unwrap_or(0),
                successes: g.len(),
                mean_bg: mean(&g),
                median_bg: median(&mut g),
                mean_rank: mean(&k),
            }
        })
        .collect();
    ComparisonTable { rows, skipped }
}
