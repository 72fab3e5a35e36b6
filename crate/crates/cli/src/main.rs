use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relpat::ingest::KnowledgeBaseClient;
use relpat::pipeline::{self, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(
    name = "relpat",
    version,
    about = "Pattern-based relation extraction pipeline"
)]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, default_value = "relpat.toml")]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch items and pages; write sentences and statements.
    Ingest {
        /// Read only from the cache.
        #[arg(long)]
        offline: bool,
    },
    /// Label sentences with the statements they express.
    Annotate,
    /// Extract patterns and split them into train/dev/test.
    BuildDataset,
    /// Build the syntactic and semantic indices from the training split.
    BuildIndices,
    /// Apply the syntactic index to a CoNLL-U file.
    Extract {
        /// Defaults to the configured parses.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify extracted candidates.
    Classify {
        /// Defaults to the configured semantic threshold.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Threshold sweep and error breakdown on dev and test.
    Evaluate,
    /// Dataset and index summary tables.
    Stats,
    /// Every stage after ingestion.
    Run,
}

fn client(cfg: &PipelineConfig, offline: bool) -> Result<KnowledgeBaseClient, PipelineError> {
    let config = cfg.client_config();
    if offline {
        return Ok(KnowledgeBaseClient::offline(config));
    }
    #[cfg(feature = "http")]
    {
        let agent = concat!("relpat/", env!("CARGO_PKG_VERSION"));
        let transport = relpat::ingest::HttpTransport::new(agent)
            .map_err(|e| PipelineError::Config(e.message))?;
        Ok(KnowledgeBaseClient::new(config, Box::new(transport)))
    }
    #[cfg(not(feature = "http"))]
    Err(PipelineError::Config(
        "built without network support; use --offline".into(),
    ))
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = PipelineConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Ingest { offline } => {
            let s = pipeline::ingest(&cfg, &client(&cfg, offline)?)?;
            println!(
                "{} items, {} pages, {} sentences, {} statements",
                s.items, s.pages, s.sentences, s.statements
            );
        }
        Command::Annotate => {
            let s = pipeline::annotate(&cfg)?;
            println!(
                "{} sentences: {} labeled, {} Other",
                s.sentences, s.labeled, s.other
            );
        }
        Command::BuildDataset => {
            let s = pipeline::build_dataset(&cfg)?;
            println!("{} of {} instances kept", s.emitted, s.attempted);
            for (variant, [train, dev, test]) in &s.split_sizes {
                println!("{variant}: train {train}, dev {dev}, test {test}");
            }
        }
        Command::BuildIndices => {
            for s in pipeline::build_indices(&cfg)? {
                println!(
                    "{}: {} anchors, {} patterns ({} ambiguous), {} words",
                    s.variant,
                    s.stats.unique_anchors,
                    s.stats.unique_patterns,
                    s.stats.ambiguous_patterns,
                    s.words
                );
            }
        }
        Command::Extract { input, output } => {
            let n = pipeline::extract(&cfg, input.as_deref(), output.as_deref())?;
            println!("{n} candidates");
        }
        Command::Classify {
            threshold,
            input,
            output,
        } => {
            let n = pipeline::classify(&cfg, threshold, input.as_deref(), output.as_deref())?;
            println!("{n} relations");
        }
        Command::Evaluate => {
            let s = pipeline::evaluate(&cfg)?;
            for (column, row) in &s.rows {
                if row.threshold == cfg.semantic_threshold {
                    let m = row.metrics;
                    println!(
                        "{column} @{:.1} ({}): P {:.3} R {:.3} F1 {:.3}",
                        row.threshold, m.averaging, m.precision, m.recall, m.f1
                    );
                }
            }
        }
        Command::Stats => {
            for path in pipeline::stats(&cfg)? {
                println!("{}", path.display());
            }
        }
        Command::Run => pipeline::run_offline_stages(&cfg)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
