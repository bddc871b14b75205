//! Manifests and CSV outputs. Column order is fixed; percentages and ranks
//! are printed with two decimals.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::{ComparisonTable, RunRecord, SuiteEntry, SweepCell};
use crate::error::{Error, ParseErrorKind, Result};
use crate::instance::format::{content, parse_int};
use crate::instance::parse_instance;

/// One `<path> <seed>` pair per line; `#` starts a comment.
pub fn parse_manifest(text: &str) -> Result<Vec<(PathBuf, u64)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let Some((path, seed)) = line.rsplit_once(char::is_whitespace) else {
            return Err(Error::parse(
                ParseErrorKind::MissingField,
                n + 1,
                "expected `<path> <seed>`",
            ));
        };
        out.push((PathBuf::from(path.trim()), parse_int(seed, n + 1, "seed")?));
    }
    Ok(out)
}

/// Loads every instance of a manifest. Relative paths are resolved against
/// the manifest's directory; entry ids are the paths as written.
pub fn load_manifest(path: &Path) -> Result<Vec<SuiteEntry>> {
    let text = std::fs::read_to_string(path)?;
    let dir = path.parent().unwrap_or(Path::new(""));
    parse_manifest(&text)?
        .into_iter()
        .map(|(p, seed)| {
            let instance = parse_instance(&std::fs::read_to_string(dir.join(&p))?)?;
            Ok(SuiteEntry {
                id: p.display().to_string(),
                instance,
                seed,
            })
        })
        .collect()
}

pub fn write_runs_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_timings_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "method", "wall_time_ms"])?;
    for r in records {
        let ms = format!("{:.3}", r.wall_time.as_secs_f64() * 1e3);
        w.write_record([r.instance.as_str(), r.method.as_str(), ms.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn two_decimals(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

pub fn write_table_csv<W: Write>(out: W, table: &ComparisonTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "instances",
        "successes",
        "mean_bg",
        "median_bg",
        "mean_rank",
    ])?;
    for row in &table.rows {
        w.write_record([
            row.method.clone(),
            row.instances.to_string(),
            row.successes.to_string(),
            two_decimals(row.mean_bg),
            two_decimals(row.median_bg),
            two_decimals(row.mean_rank),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(out: W, cells: &[SweepCell]) -> Result<()> {
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "hs",
        "smax",
        "cmax",
        "optimal",
        "upper",
        "upper_optimal",
        "lower",
        "lower_optimal",
        "error",
    ])?;
    for c in cells {
        w.write_record([
            c.header_size.to_string(),
            c.max_group_size.to_string(),
            opt(c.cmax),
            c.optimal.to_string(),
            opt(c.upper),
            c.upper_optimal.to_string(),
            opt(c.lower),
            c.lower_optimal.to_string(),
            c.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{comparison_table, TableRow};
    use std::time::Duration;

    #[test]
    fn manifest() {
        let m = parse_manifest("# suite\na.txt 1\n\ndir/b c.txt 22 # trailing\n").unwrap();
        assert_eq!(
            m,
            vec![
                (PathBuf::from("a.txt"), 1),
                (PathBuf::from("dir/b c.txt"), 22)
            ]
        );
        assert!(parse_manifest("a.txt\n").is_err());
        assert!(parse_manifest("a.txt -3\n").is_err());
    }

    #[test]
    fn load_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("a.txt"),
            "hs 1\nsmax 4\nperiods 4 8\ntask t1 4 2\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("suite.txt"), "a.txt 9\n").unwrap();
        let entries = load_manifest(&dir.path().join("suite.txt")).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!((entries[0].id.as_str(), entries[0].seed), ("a.txt", 9));
        assert_eq!(entries[0].instance.tasks.len(), 1);
    }

    #[test]
    fn runs_round_trip_without_timing() {
        let records = vec![
            RunRecord {
                instance: "a".into(),
                method: "exact".into(),
                cmax: Some(5),
                optimal: true,
                seed: 3,
                error: None,
                wall_time: Duration::from_millis(12),
            },
            RunRecord {
                instance: "a".into(),
                method: "oracle".into(),
                cmax: None,
                optimal: false,
                seed: 4,
                error: Some("too, large".into()),
                wall_time: Duration::ZERO,
            },
        ];
        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "instance,method,cmax,optimal,seed,error\na,exact,5,true,3,\na,oracle,,false,4,\"too, large\"\n"
        );
        let back = read_runs_csv(buf.as_slice()).unwrap();
        assert_eq!(
            back[0],
            RunRecord {
                wall_time: Duration::ZERO,
                ..records[0].clone()
            }
        );
        assert_eq!(back[1], records[1]);

        let mut t = Vec::new();
        write_timings_csv(&mut t, &records).unwrap();
        assert!(String::from_utf8(t).unwrap().contains("a,exact,12.000\n"));
    }

    #[test]
    fn table_has_two_decimals_and_blank_missing_values() {
        let table = ComparisonTable {
            rows: vec![
                TableRow {
                    method: "x".into(),
                    instances: 3,
                    successes: 3,
                    mean_bg: Some(1.0 / 3.0),
                    median_bg: Some(0.0),
                    mean_rank: Some(1.5),
                },
                TableRow {
                    method: "y".into(),
                    instances: 3,
                    successes: 0,
                    mean_bg: None,
                    median_bg: None,
                    mean_rank: Some(2.0),
                },
            ],
            skipped: vec![],
        };
        let mut buf = Vec::new();
        write_table_csv(&mut buf, &table).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "method,instances,successes,mean_bg,median_bg,mean_rank\nx,3,3,0.33,0.00,1.50\ny,3,0,,,2.00\n"
        );
        assert!(comparison_table(&[]).rows.is_empty());
    }
}
