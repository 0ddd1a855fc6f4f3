//! End-to-end run through the public API: raw records in, per-snapshot
//! metrics out, with the engine agreeing with the batch oracle at every
//! step in both streaming modes.

use chrono::{TimeZone, Utc};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use istfidf::{
    batch_all_pairs, chunk_by_day, preprocess, term_counts, DocId, Engine, PipelineConfig,
    StreamDriver, StreamMode, StreamRecord, TermCounts, Weighting,
};

fn news_records() -> Vec<StreamRecord> {
    let mut rng = StdRng::seed_from_u64(2015);
    let themes = [
        "market regulators probe trading desks over futures contracts",
        "storm damages coastal towns as rescue crews deploy",
        "championship finals draw record crowds and broadcast ratings",
        "chipmaker unveils processor with lower power draw",
        "central bank signals steady rates amid inflation data",
    ];
    let mut records = Vec::new();
    for day in 1..=12u32 {
        for slot in 0..4 {
            let theme = themes[rng.random_range(0..themes.len())];
            let extra = themes[rng.random_range(0..themes.len())];
            let text = format!(
                "{theme} {}",
                extra.split_whitespace().take(3).collect::<Vec<_>>().join(" ")
            );
            records.push(StreamRecord {
                doc_id: format!("story-{day:02}-{slot}"),
                text,
                timestamp: Utc.with_ymd_and_hms(2015, 9, day, 6 + slot, 30, 0).unwrap(),
            });
        }
    }
    records
}

#[test]
fn ods_run_tracks_the_batch_oracle_snapshot_by_snapshot() {
    let snapshots = chunk_by_day(news_records(), 3).unwrap();
    assert_eq!(snapshots.len(), 10);
    assert_eq!(snapshots[0].records.len(), 12);

    let driver = StreamDriver::new(PipelineConfig::default(), Weighting::default());
    let mut engine = Engine::new(Weighting::default());
    let metrics = driver.run_ods(&snapshots, &mut engine).unwrap();
    assert_eq!(metrics.len(), 10);
    assert_eq!(engine.corpus().n_docs(), 10);

    for m in &metrics {
        assert!(m.mode == StreamMode::Ods);
        assert!(m.recomputed_pairs <= m.batch_pairs);
    }

    // after a full refresh the store matches the batch oracle built from
    // independently re-preprocessed accumulated text
    engine.refresh_all();
    let config = PipelineConfig::default();
    let corpus: Vec<(DocId, TermCounts)> = snapshots
        .iter()
        .map(|s| {
            let joined = s
                .records
                .iter()
                .map(|r| r.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            (
                DocId::new(format!("snapshot-{}", s.index)),
                term_counts(&preprocess(&joined, &config)),
            )
        })
        .collect();
    let oracle = batch_all_pairs(&corpus, Weighting::default()).unwrap();
    assert!(engine.staleness_audit(&oracle).unwrap() <= 1e-9);
}

#[test]
fn sds_run_tracks_the_batch_oracle_after_refresh() {
    let snapshots = chunk_by_day(news_records(), 1).unwrap();
    let driver = StreamDriver::new(PipelineConfig::default(), Weighting::default());
    let mut engine = Engine::new(Weighting::default());
    let metrics = driver.run_sds(&snapshots, &mut engine).unwrap();
    assert_eq!(metrics.len(), 12);
    assert_eq!(engine.corpus().n_docs(), 48);

    engine.refresh_all();
    let config = PipelineConfig::default();
    let corpus: Vec<(DocId, TermCounts)> = news_records()
        .iter()
        .map(|r| {
            (
                DocId::new(r.doc_id.clone()),
                term_counts(&preprocess(&r.text, &config)),
            )
        })
        .collect();
    let oracle = batch_all_pairs(&corpus, Weighting::default()).unwrap();
    assert!(engine.staleness_audit(&oracle).unwrap() <= 1e-9);
}

#[test]
fn similarity_reads_are_safe_from_multiple_threads() {
    let snapshots = chunk_by_day(news_records(), 1).unwrap();
    let driver = StreamDriver::new(PipelineConfig::default(), Weighting::default());
    let mut engine = Engine::new(Weighting::default());
    driver.run_sds(&snapshots, &mut engine).unwrap();

    let ids: Vec<DocId> = engine.corpus().doc_ids().cloned().collect();
    let engine = &engine;
    std::thread::scope(|scope| {
        let workers: Vec<_> = (0..4)
            .map(|w| {
                let ids = &ids;
                scope.spawn(move || {
                    let mut sum = 0.0;
                    for (i, a) in ids.iter().enumerate() {
                        for b in &ids[i + 1..] {
                            if (i + w) % 4 == 0 {
                                sum += engine.similarity(a, b).unwrap().0;
                            }
                        }
                    }
                    sum
                })
            })
            .collect();
        for worker in workers {
            assert!(worker.join().unwrap().is_finite());
        }
    });
}
