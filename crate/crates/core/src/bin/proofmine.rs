use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use proofmine::cluster::ClusterAlgorithm;
use proofmine::corpus::{self, parse_lib_arg, Corpus};
use proofmine::digest::{run_digest, Digest, DigestConfig};
use proofmine::error::{Error, Result};
use proofmine::features::DEFAULT_PATCH_LEN;
use proofmine::hint::hint_source;
use proofmine::report::{render, render_text, ReportFormat};

#[derive(Parser)]
#[command(
    name = "proofmine",
    version,
    about = "Find recurring proof patterns in Coq/SSReflect libraries"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master seed; run i uses seed + i
    #[arg(long, global = true, env = "PROOFMINE_SEED", default_value_t = 0)]
    seed: u64,
    /// kmeans, em or farthest-first
    #[arg(long, global = true, default_value = "kmeans")]
    algorithm: ClusterAlgorithm,
    /// 1 (few large clusters) to 5 (many small ones)
    #[arg(long, global = true, default_value_t = 3)]
    granularity: u8,
    #[arg(long, global = true, default_value_t = 200)]
    runs: usize,
    /// Minimum fraction of runs that must co-cluster two lemmas
    #[arg(long = "freq-threshold", global = true, default_value_t = 0.6)]
    freq_threshold: f64,
}

impl GlobalArgs {
    fn digest_config(&self) -> DigestConfig {
        DigestConfig {
            algorithm: self.algorithm,
            granularity: self.granularity,
            runs: self.runs,
            frequency_threshold: self.freq_threshold,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse libraries and write a corpus file
    Extract {
        /// TAG:PATH of a .v script or a .jsonl trace; repeatable
        #[arg(long = "lib", required = true)]
        libs: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "patch-len", default_value_t = DEFAULT_PATCH_LEN)]
        patch_len: usize,
        /// Also write the feature database as JSON Lines
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Run the consensus digest over a corpus
    Cluster {
        #[arg(long)]
        corpus: PathBuf,
        /// Digest output file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the most reliable cluster for an unfinished proof
    Hint {
        #[arg(long)]
        corpus: PathBuf,
        /// File with one lemma statement and at least one proof step
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Render a digest file
    Report {
        #[arg(long)]
        digest: PathBuf,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract {
            libs,
            out,
            patch_len,
            features,
        } => {
            if patch_len == 0 {
                return Err(Error::InvalidConfig("--patch-len must be positive".into()));
            }
            let (tags, paths): (Vec<String>, Vec<PathBuf>) = libs
                .iter()
                .map(|a| parse_lib_arg(a))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            let c = corpus::ingest(&paths, &tags, Corpus::new(patch_len))?;
            corpus::save(&c, &out)?;
            if let Some(path) = features {
                let mut buf = Vec::new();
                c.feature_database().write_jsonl(&mut buf)?;
                fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
            }
            for (tag, lemmas) in &c.libraries {
                println!("{tag}: {} lemmas", lemmas.len());
            }
        }
        Command::Cluster { corpus, out } => {
            let c = corpus::load(&corpus)?;
            let digest = run_digest(&c.feature_database(), &cli.global.digest_config())?;
            if let Some(out) = out {
                write(&out, &(digest.to_json()? + "\n"))?;
            }
            print!("{}", render_text(&digest));
        }
        Command::Hint {
            corpus,
            query,
            json,
        } => {
            let c = corpus::load(&corpus)?;
            let source = read(&query)?;
            let outcome =
                hint_source(&c, &source, &cli.global.digest_config()).map_err(|e| match e {
                    Error::Syntax(source) => Error::Parse {
                        path: query.clone(),
                        source,
                    },
                    e => e,
                })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&outcome)?);
            } else {
                print!("{}", outcome.render_text());
            }
        }
        Command::Report { digest, format } => {
            let d = Digest::from_json(&read(&digest)?)?;
            print!("{}", render(&d, format)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
