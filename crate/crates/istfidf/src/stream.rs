//! Stream driving: day-based snapshot chunking, ODS/SDS replay with
//! per-snapshot metrics, engine checkpointing, and the line-delimited
//! record format.
//!
//! Each snapshot is processed in two sequential timed sections: the
//! incremental section (preprocess the new records, apply the chunk,
//! update affected similarities) and the batch section (preprocess the
//! full accumulated raw text, then batch TF-IDF plus all-pairs cosine).
//! The two sections never interleave, so neither contaminates the other's
//! timer.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::batch::batch_all_pairs;
use crate::corpus::Weighting;
use crate::engine::Engine;
use crate::text::{preprocess, term_counts, PipelineConfig, TermCounts};
use crate::{DocId, Error};

/// One timestamped input record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamRecord {
    /// Document identifier.
    #[serde(rename = "id")]
    pub doc_id: String,
    /// Raw text.
    #[serde(rename = "content")]
    pub text: String,
    /// Publication instant (UTC).
    #[serde(rename = "published")]
    pub timestamp: DateTime<Utc>,
}

/// One stream increment: the records of one calendar day (or of the warmup
/// span for the first snapshot).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    /// 1-based snapshot number.
    pub index: usize,
    pub records: Vec<StreamRecord>,
}

/// How snapshots map onto engine documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamMode {
    /// One Document Streaming: each snapshot becomes one new document.
    Ods,
    /// Several Documents Streaming: records keep their own ids and repeated
    /// ids receive additive merges.
    Sds,
}

impl fmt::Display for StreamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ods => "ods",
            Self::Sds => "sds",
        })
    }
}

impl FromStr for StreamMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ods" => Ok(Self::Ods),
            "sds" => Ok(Self::Sds),
            other => Err(format!("unknown stream mode {other:?} (expected ods or sds)")),
        }
    }
}

/// Timings and work counts of one processed snapshot. Cumulative columns
/// are running sums of the elapsed columns; the speedup is the ratio of the
/// cumulative batch time to the cumulative incremental time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetrics {
    pub index: usize,
    pub mode: StreamMode,
    pub elapsed_incremental_seconds: f64,
    pub elapsed_batch_seconds: f64,
    pub cumulative_incremental_seconds: f64,
    pub cumulative_batch_seconds: f64,
    pub speedup: f64,
    /// Pairs recomputed by the incremental update.
    pub recomputed_pairs: u64,
    /// Intersecting pairs of the accumulated corpus (the batch work set).
    pub batch_pairs: u64,
}

/// Group sorted records into snapshots by UTC calendar day: the first
/// snapshot spans the first `warmup_days` distinct days present in the
/// data, every later day becomes one snapshot, and days without records
/// produce nothing. Unsorted input is sorted by timestamp first (stable,
/// so same-instant records keep their arrival order).
pub fn chunk_by_day(
    mut records: Vec<StreamRecord>,
    warmup_days: u32,
) -> Result<Vec<Snapshot>, Error> {
    if records.is_empty() {
        return Err(Error::EmptyStream);
    }
    records.sort_by_key(|r| r.timestamp);

    let mut day_groups: Vec<(NaiveDate, Vec<StreamRecord>)> = Vec::new();
    for record in records {
        let day = record.timestamp.date_naive();
        match day_groups.last_mut() {
            Some((current, group)) if *current == day => group.push(record),
            _ => day_groups.push((day, vec![record])),
        }
    }

    let warmup = (warmup_days.max(1) as usize).min(day_groups.len());
    let mut groups = day_groups.into_iter().map(|(_, group)| group);
    let first: Vec<StreamRecord> = groups.by_ref().take(warmup).flatten().collect();

    let mut snapshots = vec![Snapshot {
        index: 1,
        records: first,
    }];
    for group in groups {
        snapshots.push(Snapshot {
            index: snapshots.len() + 1,
            records: group,
        });
    }
    Ok(snapshots)
}

/// Replays snapshots into an engine under ODS or SDS semantics and records
/// per-snapshot metrics against the batch baseline.
#[derive(Debug, Clone)]
pub struct StreamDriver {
    pipeline: PipelineConfig,
    weighting: Weighting,
}

impl StreamDriver {
    pub fn new(pipeline: PipelineConfig, weighting: Weighting) -> Self {
        Self {
            pipeline,
            weighting,
        }
    }

    pub fn run(
        &self,
        mode: StreamMode,
        snapshots: &[Snapshot],
        engine: &mut Engine,
    ) -> Result<Vec<SnapshotMetrics>, Error> {
        match mode {
            StreamMode::Ods => self.run_ods(snapshots, engine),
            StreamMode::Sds => self.run_sds(snapshots, engine),
        }
    }

    /// One Document Streaming: each snapshot's record texts are joined (in
    /// record order, single spaces) into one new document named
    /// `snapshot-<index>`. Snapshots that tokenize to nothing are skipped
    /// with a warning and produce no metrics row.
    pub fn run_ods(
        &self,
        snapshots: &[Snapshot],
        engine: &mut Engine,
    ) -> Result<Vec<SnapshotMetrics>, Error> {
        let mut metrics = Vec::new();
        let mut totals = RunningTotals::default();
        // raw accumulated corpus, reprocessed from scratch by the batch side
        let mut accumulated: Vec<(DocId, String)> = Vec::new();

        for snapshot in snapshots {
            let joined = snapshot
                .records
                .iter()
                .map(|r| r.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let doc_id = DocId::new(format!("snapshot-{}", snapshot.index));

            let started = Instant::now();
            let tokens = preprocess(&joined, &self.pipeline);
            let recomputed = if tokens.is_empty() {
                None
            } else {
                let counts = term_counts(&tokens);
                let (_, report) = engine.ingest(vec![(doc_id.clone(), counts)])?;
                Some(report.recomputed_pairs)
            };
            let elapsed_incremental = started.elapsed().as_secs_f64();

            let Some(recomputed_pairs) = recomputed else {
                log::warn!(
                    "snapshot {} yields no tokens after preprocessing; skipped",
                    snapshot.index
                );
                continue;
            };
            accumulated.push((doc_id, joined));

            let started = Instant::now();
            let batch_pairs = self.batch_pass(accumulated.iter().map(|(id, text)| (id, text)))?;
            let elapsed_batch = started.elapsed().as_secs_f64();

            metrics.push(totals.row(
                snapshot.index,
                StreamMode::Ods,
                elapsed_incremental,
                elapsed_batch,
                recomputed_pairs,
                batch_pairs,
            ));
        }
        Ok(metrics)
    }

    /// Several Documents Streaming: records keep their own ids; a snapshot
    /// forms one chunk, duplicate ids within it are merged before apply,
    /// and an id seen in an earlier snapshot receives an additive merge.
    /// Documents that tokenize to nothing are dropped with a warning; a
    /// snapshot whose every document is dropped produces no metrics row.
    pub fn run_sds(
        &self,
        snapshots: &[Snapshot],
        engine: &mut Engine,
    ) -> Result<Vec<SnapshotMetrics>, Error> {
        let mut metrics = Vec::new();
        let mut totals = RunningTotals::default();
        let mut accumulated: BTreeMap<DocId, String> = BTreeMap::new();

        for snapshot in snapshots {
            let started = Instant::now();
            let mut chunk: BTreeMap<DocId, TermCounts> = BTreeMap::new();
            let mut dropped: Vec<&str> = Vec::new();
            for record in &snapshot.records {
                let tokens = preprocess(&record.text, &self.pipeline);
                if tokens.is_empty() {
                    dropped.push(&record.doc_id);
                    continue;
                }
                let counts = term_counts(&tokens);
                match chunk.entry(DocId::new(record.doc_id.clone())) {
                    std::collections::btree_map::Entry::Occupied(mut entry) => {
                        entry.get_mut().merge(&counts)
                    }
                    std::collections::btree_map::Entry::Vacant(entry) => {
                        entry.insert(counts);
                    }
                }
            }
            let recomputed = if chunk.is_empty() {
                None
            } else {
                let (_, report) = engine.ingest(chunk.into_iter().collect())?;
                Some(report.recomputed_pairs)
            };
            let elapsed_incremental = started.elapsed().as_secs_f64();

            for doc_id in dropped {
                log::warn!(
                    "document {doc_id:?} in snapshot {} is empty after preprocessing; dropped",
                    snapshot.index
                );
            }
            let Some(recomputed_pairs) = recomputed else {
                log::warn!(
                    "snapshot {} yields no tokens after preprocessing; skipped",
                    snapshot.index
                );
                continue;
            };

            for record in &snapshot.records {
                accumulated
                    .entry(DocId::new(record.doc_id.clone()))
                    .and_modify(|text| {
                        text.push(' ');
                        text.push_str(&record.text);
                    })
                    .or_insert_with(|| record.text.clone());
            }

            let started = Instant::now();
            let batch_pairs = self.batch_pass(accumulated.iter())?;
            let elapsed_batch = started.elapsed().as_secs_f64();

            metrics.push(totals.row(
                snapshot.index,
                StreamMode::Sds,
                elapsed_incremental,
                elapsed_batch,
                recomputed_pairs,
                batch_pairs,
            ));
        }
        Ok(metrics)
    }

    /// Full batch baseline over the accumulated raw text: preprocess every
    /// document from scratch, then batch TF-IDF and all-pairs cosine.
    /// Returns the intersecting-pair count.
    fn batch_pass<'a, I>(&self, accumulated: I) -> Result<u64, Error>
    where
        I: Iterator<Item = (&'a DocId, &'a String)>,
    {
        let corpus: Vec<(DocId, TermCounts)> = accumulated
            .filter_map(|(id, text)| {
                let tokens = preprocess(text, &self.pipeline);
                if tokens.is_empty() {
                    None
                } else {
                    Some((id.clone(), term_counts(&tokens)))
                }
            })
            .collect();
        let result = batch_all_pairs(&corpus, self.weighting)?;
        Ok(result.similarities.len() as u64)
    }
}

#[derive(Default)]
struct RunningTotals {
    incremental: f64,
    batch: f64,
}

impl RunningTotals {
    fn row(
        &mut self,
        index: usize,
        mode: StreamMode,
        elapsed_incremental: f64,
        elapsed_batch: f64,
        recomputed_pairs: u64,
        batch_pairs: u64,
    ) -> SnapshotMetrics {
        self.incremental += elapsed_incremental;
        self.batch += elapsed_batch;
        SnapshotMetrics {
            index,
            mode,
            elapsed_incremental_seconds: elapsed_incremental,
            elapsed_batch_seconds: elapsed_batch,
            cumulative_incremental_seconds: self.incremental,
            cumulative_batch_seconds: self.batch,
            speedup: if self.incremental > 0.0 {
                self.batch / self.incremental
            } else {
                0.0
            },
            recomputed_pairs,
            batch_pairs,
        }
    }
}

const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct CheckpointRef<'a> {
    format_version: u32,
    engine: &'a Engine,
}

#[derive(Deserialize)]
struct CheckpointHeader {
    format_version: u32,
}

#[derive(Deserialize)]
struct CheckpointFile {
    engine: Engine,
}

/// Write the engine's observable state to a self-describing checkpoint
/// file. The engine must be quiescent (no chunk application in progress).
pub fn checkpoint(engine: &Engine, path: &Path) -> Result<(), Error> {
    let mut writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer(
        &mut writer,
        &CheckpointRef {
            format_version: CHECKPOINT_FORMAT_VERSION,
            engine,
        },
    )
    .map_err(|e| Error::CheckpointFormat(e.to_string()))?;
    writer.flush()?;
    Ok(())
}

/// Restore an engine from a file written by [`checkpoint`] of the same
/// format version.
pub fn restore(path: &Path) -> Result<Engine, Error> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let header: CheckpointHeader =
        serde_json::from_str(&text).map_err(|e| Error::CheckpointFormat(e.to_string()))?;
    if header.format_version != CHECKPOINT_FORMAT_VERSION {
        return Err(Error::CheckpointVersion {
            expected: CHECKPOINT_FORMAT_VERSION,
            found: header.format_version,
        });
    }
    let file: CheckpointFile =
        serde_json::from_str(&text).map_err(|e| Error::CheckpointFormat(e.to_string()))?;
    Ok(file.engine)
}

/// Read line-delimited records: one JSON object per line with fields `id`
/// (string), `content` (string), and `published` (ISO-8601 timestamp).
/// Blank lines are skipped; a record with an empty id is rejected.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<StreamRecord>, Error> {
    let mut records = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: StreamRecord =
            serde_json::from_str(&line).map_err(|e| Error::InvalidRecord {
                line: number + 1,
                reason: e.to_string(),
            })?;
        if record.doc_id.is_empty() {
            return Err(Error::InvalidRecord {
                line: number + 1,
                reason: "empty document id".to_owned(),
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// [`read_records`] over a file path.
pub fn read_records_file(path: &Path) -> Result<Vec<StreamRecord>, Error> {
    read_records(BufReader::new(File::open(path)?))
}
