//! Deterministic synthetic corpus generation.
//!
//! Term choice follows a Zipf distribution over a synthetic vocabulary,
//! document lengths are Poisson-distributed around the configured mean,
//! and timestamps advance one day per snapshot. Generation is a pure
//! function of the spec: the same spec always produces byte-identical
//! output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{ensure, Context, Result};
use chrono::{Duration, TimeZone, Utc};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, Zipf};
use serde::{Deserialize, Serialize};

use istfidf::StreamRecord;

/// Settings for one synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_snapshots: u32,
    pub docs_per_snapshot: u32,
    pub vocab_size: u32,
    pub doc_length_mean: f64,
    pub zipf_exponent: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.n_snapshots >= 1, "n_snapshots must be positive");
        ensure!(self.docs_per_snapshot >= 1, "docs_per_snapshot must be positive");
        ensure!(self.vocab_size >= 1, "vocab_size must be positive");
        ensure!(
            self.vocab_size <= 26u32.pow(4),
            "vocab_size exceeds the synthetic vocabulary limit"
        );
        ensure!(self.doc_length_mean > 0.0, "doc_length_mean must be positive");
        ensure!(self.zipf_exponent > 0.0, "zipf_exponent must be positive");
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading synthetic spec {}", path.display()))?;
        let spec: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing synthetic spec {}", path.display()))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// The synthetic term for a vocabulary index: a fixed `xq` prefix (no
/// English stopword starts with it) followed by a base-26 suffix wide
/// enough for the vocabulary, so every term survives preprocessing.
fn vocab_term(index: u32, vocab_size: u32) -> String {
    let mut width = 2;
    while 26u32.pow(width) < vocab_size {
        width += 1;
    }
    let mut suffix = vec![b'a'; width as usize];
    let mut rest = index;
    for slot in suffix.iter_mut().rev() {
        *slot = b'a' + (rest % 26) as u8;
        rest /= 26;
    }
    format!("xq{}", String::from_utf8(suffix).expect("ascii suffix"))
}

/// Generate the corpus records in stream order.
pub fn generate_records(spec: &SyntheticSpec) -> Result<Vec<StreamRecord>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let zipf = Zipf::new(spec.vocab_size as f64, spec.zipf_exponent)
        .map_err(|e| anyhow::anyhow!("zipf distribution: {e}"))?;
    let lengths = Poisson::new(spec.doc_length_mean)
        .map_err(|e| anyhow::anyhow!("poisson distribution: {e}"))?;
    let base = Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap();

    let mut records = Vec::with_capacity((spec.n_snapshots * spec.docs_per_snapshot) as usize);
    for snapshot in 1..=spec.n_snapshots {
        let day = base + Duration::days(snapshot as i64 - 1);
        for doc in 0..spec.docs_per_snapshot {
            let length = (lengths.sample(&mut rng).round() as usize).max(1);
            let words: Vec<String> = (0..length)
                .map(|_| {
                    let rank = zipf.sample(&mut rng) as u32;
                    vocab_term(rank - 1, spec.vocab_size)
                })
                .collect();
            records.push(StreamRecord {
                doc_id: format!("doc-{snapshot:03}-{doc:02}"),
                text: words.join(" "),
                timestamp: day + Duration::seconds(doc as i64),
            });
        }
    }
    Ok(records)
}

/// Write a line-delimited corpus for `spec`; identical specs produce
/// byte-identical files.
pub fn generate_synthetic(spec: &SyntheticSpec, out_path: &Path) -> Result<()> {
    let records = generate_records(spec)?;
    let file = File::create(out_path)
        .with_context(|| format!("creating {}", out_path.display()))?;
    let mut writer = BufWriter::new(file);
    for record in &records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}
