//! Digest the hint fixture libraries and print the report.

use std::path::PathBuf;

use proofmine::corpus::{ingest, Corpus};
use proofmine::digest::{run_digest, DigestConfig};
use proofmine::report::render_text;

fn main() -> proofmine::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/hint");
    let tags = [
        "matrix",
        "summation",
        "homology",
        "seq_decoys",
        "bool_decoys",
        "nat_decoys",
    ];
    let paths: Vec<PathBuf> = tags.iter().map(|t| dir.join(format!("{t}.v"))).collect();
    let corpus = ingest(&paths, &tags, Corpus::default())?;
    let cfg = DigestConfig {
        granularity: 4,
        seed: 1,
        ..Default::default()
    };
    print!(
        "{}",
        render_text(&run_digest(&corpus.feature_database(), &cfg)?)
    );
    Ok(())
}
