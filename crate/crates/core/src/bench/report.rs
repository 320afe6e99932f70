//! CSV, chart and metadata output of a sweep.
//!
//! The aggregate CSV holds only solution-quality metrics so that repeated
//! sweeps with the same seed produce identical bytes; timings go to
//! `runtime.csv` and the long-form `runs.csv`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{AggregateRow, BenchResult, Metric, MetricsRow};
use crate::error::BenchError;
use crate::solve::Algorithm;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `agents,solver,metric,mean,std,n` rows.
pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], writer: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["agents", "solver", "metric", "mean", "std", "n"])?;
    for r in rows {
        w.write_record([
            r.agents.to_string(),
            r.solver.name().to_string(),
            r.metric.name().to_string(),
            opt(r.mean),
            opt(r.std),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Same layout as the aggregate CSV, wall-clock only.
pub fn write_runtime_csv<W: Write>(result: &BenchResult, writer: W) -> Result<(), BenchError> {
    write_aggregate_csv(&result.aggregate(&[Metric::WallClockMs]), writer)
}

/// One row per run, with an `error` column for failed runs.
pub fn write_runs_csv<W: Write>(result: &BenchResult, writer: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = MetricsRow::CSV_HEADER.split(',').collect();
    header.push("error");
    w.write_record(&header)?;
    for run in &result.runs {
        let record: Vec<String> = match &run.result {
            Ok(m) => {
                let mut fields: Vec<String> = m.csv_line().split(',').map(str::to_string).collect();
                fields.push(String::new());
                fields
            }
            Err(e) => {
                let mut fields = vec![String::new(); header.len()];
                fields[0] = run.solver.name().to_string();
                fields[1] = run.seed.to_string();
                fields[2] = run.agents.to_string();
                fields[3] = result.params.task_count.to_string();
                fields[header.len() - 1] = e.clone();
                fields
            }
        };
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Host description recorded next to raw timings.
pub fn machine_summary() -> String {
    let cpu = fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| s.lines().find(|l| l.starts_with("model name")).map(|l| l.split(':').nth(1).unwrap_or("").trim().to_string()))
        .unwrap_or_else(|| "unknown".to_string());
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!("os={} arch={} cpu=\"{}\" available_parallelism={}", std::env::consts::OS, std::env::consts::ARCH, cpu, cores)
}

fn speedup_lines(result: &BenchResult) -> Vec<String> {
    let Some(&largest) = result.params.agent_counts.iter().max() else { return Vec::new() };
    [Algorithm::Cfla2, Algorithm::Cfla]
        .iter()
        .filter(|slow| result.solvers.contains(slow) && result.solvers.contains(&Algorithm::Ccf))
        .filter_map(|&slow| {
            result
                .speedup(largest, Algorithm::Ccf, slow)
                .map(|s| format!("ccf_speedup_vs_{}_at_{}_agents={:.1}", slow.name(), largest, s))
        })
        .collect()
}

/// Writes `aggregate.csv`, `runtime.csv`, `runs.csv`, one SVG per quality
/// metric and `metadata.txt` into `dir`. Returns the written paths.
pub fn write_outputs(result: &BenchResult, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut file = |name: &str| -> Result<fs::File, BenchError> {
        let path = dir.join(name);
        let f = fs::File::create(&path)?;
        written.push(path);
        Ok(f)
    };
    write_aggregate_csv(&result.aggregate(&Metric::QUALITY), file("aggregate.csv")?)?;
    write_runtime_csv(result, file("runtime.csv")?)?;
    write_runs_csv(result, file("runs.csv")?)?;
    for metric in Metric::QUALITY {
        let svg = super::render_chart(result, metric);
        file(&format!("{}.svg", metric.name()))?.write_all(svg.as_bytes())?;
    }
    let p = &result.params;
    let mut meta = vec![
        machine_summary(),
        format!("threads={}", result.threads),
        format!(
            "grid_size={} task_count={} agent_counts={:?} deadline_range={:?} workload_range={:?} k_range={:?} instances_per_config={} seed={}",
            p.grid_size, p.task_count, p.agent_counts, p.deadline_range, p.workload_range, p.k_range, p.instances_per_config, p.seed
        ),
        format!("solvers={}", result.solvers.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")),
        format!("runs={} failures={}", result.runs.len(), result.failures()),
        format!("total_wall_clock_ms={:.1}", result.elapsed_ms),
    ];
    meta.extend(speedup_lines(result));
    let mut f = file("metadata.txt")?;
    for line in meta {
        writeln!(f, "{line}")?;
    }
    Ok(written)
}
