//! Parse a script and print every step with its tactics and argument kinds.
//!
//! `cargo run --example parse_script [-- path/to/file.v]`

use std::path::PathBuf;

use proofmine::parser::parse_library;

fn main() -> proofmine::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("fixtures/listings/induction_lists_nats.v")
        });
    let text = std::fs::read_to_string(&path).map_err(|e| proofmine::Error::io(&path, e))?;
    let lemmas = parse_library(&text, "example")
        .map_err(|source| proofmine::Error::Parse { path, source })?;
    for l in &lemmas {
        println!("{} : {}", l.name, l.statement);
        for s in &l.steps {
            let tactics: Vec<String> = s
                .tactics
                .iter()
                .map(|t| {
                    let args: Vec<String> = t
                        .arguments
                        .iter()
                        .map(|a| format!("{}:{:?}", a.text, a.kind))
                        .collect();
                    format!("{}[{}]", t.name, args.join(" "))
                })
                .collect();
            println!("  {}. {}", s.index, tactics.join(" ; "));
        }
    }
    Ok(())
}
