use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::experiment::{RepRecord, ResultTable, SchemeSummary};
use crate::error::Result;

/// Column order of the per-replication CSV.
pub const RECORD_COLUMNS: [&str; 11] = [
    "scheme", "policy", "estimator", "K", "T", "rep", "budget_used", "root_est", "residual", "ci_len", "covered",
];

/// Writes `<stem>.csv` (one row per replication and checkpoint) and
/// `<stem>.json` (aggregates) into `dir`, creating it if needed.
pub fn write_records(table: &ResultTable, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    let mut w = csv::Writer::from_path(&csv_path)?;
    if table.records.is_empty() {
        w.write_record(RECORD_COLUMNS)?;
    }
    for r in &table.records {
        w.serialize(r)?;
    }
    w.flush()?;
    serde_json::to_writer_pretty(BufWriter::new(File::create(&json_path)?), &table.summary)?;
    Ok((csv_path, json_path))
}

pub fn read_records(path: &Path) -> Result<Vec<RepRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn read_summary(path: &Path) -> Result<Vec<SchemeSummary>> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}
