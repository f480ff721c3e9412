//! Ask for a hint on an unfinished proof.

use std::path::PathBuf;

use proofmine::corpus::{ingest, Corpus};
use proofmine::digest::DigestConfig;
use proofmine::hint::hint_source;

const QUERY: &str = "\
Lemma nilpotent_sum : forall (M : 'M_n) (m : nat), M ^+ m = 0 ->
  (1 - M) *m (\\sum_(0 <= i < m) M ^+ i) = 1.
Proof.
move => M m nilpotent.
rewrite big_distrr mulmxBr mul1mx.
case : n.
by rewrite !thinmx0.
";

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
    for seed in 1..=3 {
        let cfg = DigestConfig {
            granularity: 4,
            seed,
            ..Default::default()
        };
        println!("seed {seed}:");
        print!("{}", hint_source(&corpus, QUERY, &cfg)?.render_text());
    }
    Ok(())
}
