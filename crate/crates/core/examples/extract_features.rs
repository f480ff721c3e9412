//! Encode a small library and show raw and scaled vectors block by block.

use proofmine::corpus::Corpus;
use proofmine::features::SLOTS_PER_STEP;
use proofmine::parser::parse_library;

const SRC: &str = "\
Lemma has_map a s : has a (map f s) = has (preim f a) s.
Proof. by elim: s => //= x s ->. Qed.
Lemma addnCA : left_commutative addn.
Proof. by move=> m n p; elim: m => //= m; rewrite addnS. Qed.
Lemma andbb : idempotent andb.
Proof. by case. Qed.
";

fn main() -> proofmine::Result<()> {
    let lemmas = parse_library(SRC, "demo").map_err(proofmine::Error::Syntax)?;
    let corpus = Corpus::default().add_lemmas("demo", lemmas)?;
    println!("tactic codes: {:?}", corpus.table.tactic_codes);
    let db = corpus.feature_database();
    for r in &db.records {
        println!("{}", r.name);
        for (raw, scaled) in r
            .raw
            .chunks(SLOTS_PER_STEP)
            .zip(r.scaled.chunks(SLOTS_PER_STEP))
        {
            println!("  raw    {raw:?}");
            println!("  scaled {scaled:.3?}");
        }
    }
    Ok(())
}
