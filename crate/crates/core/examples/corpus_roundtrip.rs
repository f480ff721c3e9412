//! Save a corpus, load it back, and show what a damaged file produces.

use proofmine::corpus::{load, save, Corpus};
use proofmine::parser::parse_library;

const SRC: &str = "\
Lemma addn0 : right_id 0 addn. Proof. by move=> n; apply/eqP. Qed.
Lemma add0n : left_id 0 addn. Proof. by []. Qed.
";

fn main() -> proofmine::Result<()> {
    let corpus = Corpus::default().add_lemmas(
        "ssrnat",
        parse_library(SRC, "ssrnat").map_err(proofmine::Error::Syntax)?,
    )?;
    let path =
        std::env::temp_dir().join(format!("proofmine-example-{}.corpus", std::process::id()));
    save(&corpus, &path)?;
    println!(
        "saved {} lemmas to {}",
        corpus.lemma_count(),
        path.display()
    );
    assert_eq!(load(&path)?, corpus);
    println!("reloaded: identical");

    let text = std::fs::read_to_string(&path).map_err(|e| proofmine::Error::io(&path, e))?;
    std::fs::write(&path, text.replace("addn0", "addn1"))
        .map_err(|e| proofmine::Error::io(&path, e))?;
    match load(&path) {
        Err(e) => println!("tampered file: {e} (exit code {})", e.exit_code()),
        Ok(_) => println!("tampered file accepted"),
    }
    std::fs::remove_file(&path).map_err(|e| proofmine::Error::io(&path, e))?;
    Ok(())
}
