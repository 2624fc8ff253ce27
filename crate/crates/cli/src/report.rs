//! Check records and their JSON, CSV and terminal renderings.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;

use fbreg_core::snapshot::{fmt17, write_json};
use fbreg_core::Point;

/// One `(x, r)` evaluation of a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub check: String,
    pub hard: bool,
    pub x: Option<Point>,
    pub r: Option<f64>,
    /// Distinguishes records at the same `(x, r)`, such as a variant name.
    pub label: Option<String>,
    /// `None` for report-only quantities.
    pub pass: Option<bool>,
    pub values: BTreeMap<String, Option<f64>>,
}

impl Record {
    pub fn new(check: &str, hard: bool, x: Option<Point>, r: Option<f64>) -> Self {
        Self {
            check: check.to_string(),
            hard,
            x,
            r,
            label: None,
            pass: None,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), Some(v));
        self
    }

    pub fn with_opt(mut self, key: &str, v: Option<f64>) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }

    pub fn failed(&self) -> bool {
        self.hard && self.pass == Some(false)
    }
}

/// Orders by `x` then `r`, absent values first.
pub fn sort_records(records: &mut [Record]) {
    let key = |r: &Record| {
        (
            r.x.map(|p| (p[0], p[1])).unwrap_or((f64::NEG_INFINITY, f64::NEG_INFINITY)),
            r.r.unwrap_or(f64::NEG_INFINITY),
        )
    };
    records.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0 .0
            .total_cmp(&kb.0 .0)
            .then(ka.0 .1.total_cmp(&kb.0 .1))
            .then(ka.1.total_cmp(&kb.1))
    });
}

/// Records of one configured check, in report order.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub hard: bool,
    pub records: Vec<Record>,
}

impl CheckReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

/// Flat CSV: `x,y,r,label,pass` then every value key of the check, sorted.
pub fn write_check_csv(path: &Path, records: &[Record]) -> Result<()> {
    let keys: BTreeSet<&String> = records.iter().flat_map(|r| r.values.keys()).collect();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["x", "y", "r", "label", "pass"];
    header.extend(keys.iter().map(|k| k.as_str()));
    w.write_record(&header)?;
    for rec in records {
        let mut row = vec![
            opt(rec.x.map(|p| p[0])),
            opt(rec.x.map(|p| p[1])),
            opt(rec.r),
            rec.label.clone().unwrap_or_default(),
            rec.pass.map(|p| p.to_string()).unwrap_or_default(),
        ];
        row.extend(keys.iter().map(|k| opt(rec.values.get(*k).copied().flatten())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json` with every record and one `report_<check>.csv` per check.
pub fn write_reports(dir: &Path, reports: &[CheckReport]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let all: Vec<&Record> = reports.iter().flat_map(|r| &r.records).collect();
    let json = dir.join("report.json");
    write_json(File::create(&json)?, &all)?;
    let mut written = vec![json];
    let mut used = BTreeSet::new();
    for (k, rep) in reports.iter().enumerate() {
        let mut stem = format!("report_{}", rep.name);
        if !used.insert(stem.clone()) {
            stem = format!("{stem}_{k}");
        }
        let path = dir.join(format!("{stem}.csv"));
        write_check_csv(&path, &rep.records)?;
        written.push(path);
    }
    Ok(written)
}

pub fn summary_table(reports: &[CheckReport]) -> String {
    let mut out = format!("{:<20} {:<5} {:>8} {:>7}  status\n", "check", "hard", "records", "failed");
    for rep in reports {
        let failed = rep.failures();
        let status = match (rep.hard, failed) {
            (false, _) => "report",
            (true, 0) => "pass",
            (true, _) => "FAIL",
        };
        out.push_str(&format!(
            "{:<20} {:<5} {:>8} {:>7}  {status}\n",
            rep.name,
            if rep.hard { "yes" } else { "no" },
            rep.records.len(),
            if rep.hard { failed.to_string() } else { "-".into() },
        ));
    }
    out
}
