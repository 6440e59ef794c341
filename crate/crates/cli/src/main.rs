mod chat;
mod commands;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "shelftalk", version, about = "In-store shopping assistant tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the intent forest on a labeled query file and report held-out accuracy.
    TrainIntent {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = shelftalk_core::intent::DEFAULT_TREES)]
        trees: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a saved intent model on the held-out part of a labeled query file.
    EvalIntent {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Split seed; must match the one used for training.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluate on every line instead of the held-out third.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
    /// Top-1/2/3 accuracy of the specification ranker on a question file.
    EvalQa {
        #[arg(long, default_value = "data/catalog.jsonl")]
        catalog: PathBuf,
        #[arg(long, default_value = "data/qa_eval.tsv")]
        questions: PathBuf,
        #[arg(long, default_value = "data/lexicon.tsv")]
        lexicon: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP API.
    Serve {
        #[command(flatten)]
        source: DataSource,
        #[arg(long)]
        host: Option<std::net::IpAddr>,
        #[arg(long)]
        port: Option<u16>,
        /// Idle time in seconds after which sessions are dropped.
        #[arg(long)]
        max_idle: Option<u64>,
    },
    /// Talk to the assistant from the terminal.
    Chat {
        /// Base URL of a running server.
        #[arg(long, conflicts_with = "local", required_unless_present = "local")]
        server: Option<String>,
        /// Run the assistant in-process instead.
        #[arg(long)]
        local: bool,
        #[command(flatten)]
        source: DataSource,
    },
    /// Write a synthetic labeled intent corpus.
    GenData {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 125)]
        per_intent: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
struct DataSource {
    /// TOML server config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory holding the standard data files.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

pub fn data_err(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::TrainIntent { data, trees, seed, out } => commands::train_intent(&data, trees, seed, &out),
        Command::EvalIntent {
            model,
            data,
            seed,
            all,
            json,
        } => commands::eval_intent(&model, &data, seed, all, json),
        Command::EvalQa {
            catalog,
            questions,
            lexicon,
            json,
        } => commands::eval_qa(&catalog, &questions, &lexicon, json),
        Command::Serve {
            source,
            host,
            port,
            max_idle,
        } => {
            let mut config = source.config()?;
            if let Some(h) = host {
                config.host = h;
            }
            if let Some(p) = port {
                config.port = p;
            }
            if let Some(s) = max_idle {
                config.max_idle_secs = s;
            }
            commands::serve(config)
        }
        Command::Chat { server, local, source } => {
            let stdin = std::io::stdin().lock();
            let stdout = std::io::stdout().lock();
            if local {
                chat::run_local(&source.config()?.data, stdin, stdout)
            } else {
                chat::run_remote(server.as_deref().expect("clap requires --server"), stdin, stdout)
            }
        }
        Command::GenData { out, per_intent, seed } => commands::gen_data(&out, per_intent, seed),
    }
}

impl DataSource {
    fn config(&self) -> Result<shelftalk_server::ServerConfig, Failure> {
        let mut config = match &self.config {
            Some(path) => shelftalk_server::ServerConfig::load(path).map_err(data_err)?,
            None => shelftalk_server::ServerConfig::default(),
        };
        if let Some(dir) = &self.data_dir {
            config.data = shelftalk_core::orchestrator::DataPaths::in_dir(dir);
        }
        Ok(config)
    }
}
