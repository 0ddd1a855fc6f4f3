//! Benchmark harness: runs the batch baseline against the incremental
//! engine over identical snapshots, emits the three metric tables and the
//! raw per-snapshot metrics, and generates deterministic synthetic corpora.

pub mod synthetic;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};

use istfidf::{
    chunk_by_day, read_records_file, Engine, PipelineConfig, SnapshotMetrics, Stoplist,
    StreamDriver, StreamMode, Weighting,
};

/// Benchmark run settings.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Line-delimited input corpus.
    pub input_path: PathBuf,
    pub mode: StreamMode,
    /// Distinct leading calendar days folded into the first snapshot.
    pub warmup_days: u32,
    pub weighting: Weighting,
    /// Stoplist file; the bundled English list when absent.
    pub stoplist_path: Option<PathBuf>,
    /// Directory receiving the metric tables.
    pub output_dir: PathBuf,
    /// Timing repetitions; elapsed columns report the per-snapshot median.
    pub repetitions: u32,
}

/// Run the incremental engine and the batch baseline over identical
/// snapshots, write the three tables plus `raw_metrics.csv` into the
/// output directory, and return the per-snapshot metrics.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<SnapshotMetrics>> {
    ensure!(config.repetitions >= 1, "repetitions must be at least 1");
    ensure!(config.warmup_days >= 1, "warmup days must be at least 1");

    let records = read_records_file(&config.input_path)
        .with_context(|| format!("reading corpus {}", config.input_path.display()))?;
    let snapshots = chunk_by_day(records, config.warmup_days)?;

    let pipeline = match &config.stoplist_path {
        Some(path) => PipelineConfig {
            stoplist: Stoplist::from_path(path)
                .with_context(|| format!("reading stoplist {}", path.display()))?,
            ..PipelineConfig::default()
        },
        None => PipelineConfig::default(),
    };
    let driver = StreamDriver::new(pipeline, config.weighting);

    let mut runs = Vec::with_capacity(config.repetitions as usize);
    for _ in 0..config.repetitions {
        let mut engine = Engine::new(config.weighting);
        runs.push(driver.run(config.mode, &snapshots, &mut engine)?);
    }
    let metrics = median_of_runs(&runs)?;

    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    emit_tables(&metrics, &config.output_dir)?;
    write_raw_metrics(&metrics, &config.output_dir.join("raw_metrics.csv"))?;
    Ok(metrics)
}

/// Collapse repeated runs into one metrics row per snapshot: elapsed
/// columns take the per-snapshot median, cumulative columns are rebuilt as
/// running sums of those medians, and the work counts (identical across
/// runs by determinism) are carried over.
fn median_of_runs(runs: &[Vec<SnapshotMetrics>]) -> Result<Vec<SnapshotMetrics>> {
    let first = runs.first().context("no benchmark runs")?;
    for run in runs {
        ensure!(
            run.len() == first.len()
                && run.iter().zip(first).all(|(a, b)| {
                    a.index == b.index
                        && a.recomputed_pairs == b.recomputed_pairs
                        && a.batch_pairs == b.batch_pairs
                }),
            "benchmark repetitions disagree on work counts; replay is not deterministic"
        );
    }

    let mut merged = Vec::with_capacity(first.len());
    let mut cumulative_incremental = 0.0;
    let mut cumulative_batch = 0.0;
    for row in 0..first.len() {
        let elapsed_incremental = median(
            runs.iter()
                .map(|run| run[row].elapsed_incremental_seconds)
                .collect(),
        );
        let elapsed_batch = median(
            runs.iter()
                .map(|run| run[row].elapsed_batch_seconds)
                .collect(),
        );
        cumulative_incremental += elapsed_incremental;
        cumulative_batch += elapsed_batch;
        merged.push(SnapshotMetrics {
            elapsed_incremental_seconds: elapsed_incremental,
            elapsed_batch_seconds: elapsed_batch,
            cumulative_incremental_seconds: cumulative_incremental,
            cumulative_batch_seconds: cumulative_batch,
            speedup: if cumulative_incremental > 0.0 {
                cumulative_batch / cumulative_incremental
            } else {
                0.0
            },
            ..first[row].clone()
        });
    }
    Ok(merged)
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Write the three semicolon-separated tables: `elapsed_time.txt` and
/// `cum_time.txt` with header `snapshot;batch;istfidf_ics`, and
/// `speedup.txt` with header `snapshot;speedup`. Values carry six decimal
/// places; the speedup column is derived from the cumulative values as
/// printed, so re-deriving it from `cum_time.txt` reproduces the file.
pub fn emit_tables(metrics: &[SnapshotMetrics], output_dir: &Path) -> Result<()> {
    ensure!(!metrics.is_empty(), "no metrics to emit");

    let mut elapsed = String::from("snapshot;batch;istfidf_ics\n");
    let mut cumulative = String::from("snapshot;batch;istfidf_ics\n");
    let mut speedup = String::from("snapshot;speedup\n");
    for m in metrics {
        elapsed.push_str(&format!(
            "{};{:.6};{:.6}\n",
            m.index, m.elapsed_batch_seconds, m.elapsed_incremental_seconds
        ));
        cumulative.push_str(&format!(
            "{};{:.6};{:.6}\n",
            m.index, m.cumulative_batch_seconds, m.cumulative_incremental_seconds
        ));
        let printed_batch: f64 = format!("{:.6}", m.cumulative_batch_seconds).parse()?;
        let printed_incremental: f64 = format!("{:.6}", m.cumulative_incremental_seconds).parse()?;
        let ratio = if printed_incremental > 0.0 {
            printed_batch / printed_incremental
        } else {
            0.0
        };
        speedup.push_str(&format!("{};{:.6}\n", m.index, ratio));
    }

    for (name, content) in [
        ("elapsed_time.txt", elapsed),
        ("cum_time.txt", cumulative),
        ("speedup.txt", speedup),
    ] {
        let path = output_dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Write every metrics field (plus the per-increment speedup) as
/// comma-separated rows, one per snapshot, at full float precision.
pub fn write_raw_metrics(metrics: &[SnapshotMetrics], path: &Path) -> Result<()> {
    let mut out = String::from(
        "snapshot,mode,elapsed_incremental_seconds,elapsed_batch_seconds,\
         cumulative_incremental_seconds,cumulative_batch_seconds,speedup,\
         increment_speedup,recomputed_pairs,batch_pairs\n",
    );
    for m in metrics {
        let increment_speedup = if m.elapsed_incremental_seconds > 0.0 {
            m.elapsed_batch_seconds / m.elapsed_incremental_seconds
        } else {
            0.0
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            m.index,
            m.mode,
            m.elapsed_incremental_seconds,
            m.elapsed_batch_seconds,
            m.cumulative_incremental_seconds,
            m.cumulative_batch_seconds,
            m.speedup,
            increment_speedup,
            m.recomputed_pairs,
            m.batch_pairs
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
