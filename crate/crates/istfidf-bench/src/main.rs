use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use istfidf::{StreamMode, Weighting};
use istfidf_bench::synthetic::{generate_synthetic, SyntheticSpec};
use istfidf_bench::{run_benchmark, BenchConfig};

/// Batch vs incremental TF-IDF and cosine-similarity benchmark over a
/// line-delimited news-style corpus.
#[derive(Debug, Parser)]
#[command(name = "istfidf-bench", version, about)]
struct Cli {
    /// Input corpus: one JSON record per line with fields `id`, `content`,
    /// `published`.
    #[arg(long)]
    input: PathBuf,

    /// Streaming mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Sds)]
    mode: ModeArg,

    /// Distinct leading calendar days folded into the first snapshot.
    #[arg(long, default_value_t = 1)]
    warmup_days: u32,

    /// Stoplist file (one term per line, `#` comments); bundled English
    /// list when omitted.
    #[arg(long)]
    stoplist: Option<PathBuf>,

    /// Output directory for the metric tables.
    #[arg(long)]
    out: PathBuf,

    /// Timing repetitions; elapsed columns report the median.
    #[arg(long, default_value_t = 1)]
    reps: u32,

    /// Generate the input corpus from this synthetic-spec JSON file before
    /// running.
    #[arg(long)]
    synthetic: Option<PathBuf>,

    /// Override the synthetic generator seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Ods,
    Sds,
}

impl From<ModeArg> for StreamMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Ods => StreamMode::Ods,
            ModeArg::Sds => StreamMode::Sds,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(spec_path) = &cli.synthetic {
        let mut spec = SyntheticSpec::from_file(spec_path)?;
        if let Some(seed) = cli.seed {
            spec.seed = seed;
        }
        generate_synthetic(&spec, &cli.input)?;
        println!(
            "generated {} records ({} snapshots x {} docs, seed {}) at {}",
            spec.n_snapshots * spec.docs_per_snapshot,
            spec.n_snapshots,
            spec.docs_per_snapshot,
            spec.seed,
            cli.input.display()
        );
    }

    let config = BenchConfig {
        input_path: cli.input,
        mode: cli.mode.into(),
        warmup_days: cli.warmup_days,
        weighting: Weighting::default(),
        stoplist_path: cli.stoplist,
        output_dir: cli.out.clone(),
        repetitions: cli.reps,
    };
    let metrics = run_benchmark(&config)?;

    println!("snapshot  mode  elapsed_batch  elapsed_incr  speedup  recomputed  batch_pairs");
    for m in &metrics {
        println!(
            "{:>8}  {:>4}  {:>13.6}  {:>12.6}  {:>7.3}  {:>10}  {:>11}",
            m.index,
            m.mode,
            m.elapsed_batch_seconds,
            m.elapsed_incremental_seconds,
            m.speedup,
            m.recomputed_pairs,
            m.batch_pairs
        );
    }
    if let Some(last) = metrics.last() {
        println!(
            "final cumulative: batch {:.6}s, incremental {:.6}s, speedup {:.3}",
            last.cumulative_batch_seconds, last.cumulative_incremental_seconds, last.speedup
        );
    }
    println!("tables written to {}", cli.out.display());
    Ok(())
}
