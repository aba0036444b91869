//! Run a grid from JSON and write per-replication CSV plus a JSON summary.

use gpba::harness::output::{read_records, read_summary};
use gpba::harness::{run_experiment, write_records, ExperimentConfig};

const CONFIG: &str = r#"{
    "problem": { "kind": "synthetic", "func": "h3" },
    "policies": ["syst-q", "rand-q"],
    "estimators": ["bar", "mean", "clt"],
    "batch_sizes": [100, 500],
    "budget": 5000,
    "reps": 10,
    "seed": 2024
}"#;

fn main() -> gpba::Result<()> {
    let cfg = ExperimentConfig::from_json_str(CONFIG)?;
    let table = run_experiment(&cfg)?;
    let dir = std::env::temp_dir().join("gpba-example");
    let (csv, json) = write_records(&table, &dir, "h3-grid")?;
    println!("{} rows -> {}", read_records(&csv)?.len(), csv.display());
    println!("{} summaries -> {}", read_summary(&json)?.len(), json.display());
    Ok(())
}
