use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use cast_core::dataset::{default_tasks, parse_tasks_csv, scramble_correlation, scramble_metrics, WordTask};
use cast_core::evaluation::{leave_one_out, rated, render_csv, render_table, resubstitution, FoldMode, Trainer};
use cast_core::ga::{run_ga, GaSettings};
use cast_core::record::{parse_jsonl, to_jsonl};
use cast_core::simulate::{simulate_participants, AbilityModel};
use cast_core::{FisConfig, GameplayRecord, IwdModel};
use cast_session::store::{export_csv, read_log, replay, LOG_FILE};
use cast_session::{LogStore, SessionService, SystemClock, DATA_DIR_ENV};
use clap::{Args, Parser, Subcommand};

/// Individualized word difficulty for a word-scramble game.
#[derive(Debug, Parser)]
#[command(name = "cast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-word degree of scramble and Hamming distance, plus their Pearson r.
    Metrics {
        /// `default` or a task CSV file.
        #[arg(long, default_value = "default")]
        words: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a seeded synthetic gameplay dataset as JSONL.
    Simulate {
        #[arg(long, default_value_t = 48)]
        participants: usize,
        #[arg(long)]
        seed: u64,
        /// `default` or a task CSV file.
        #[arg(long, default_value = "default")]
        words: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tunes membership-function parameters with the genetic algorithm.
    Tune {
        /// Gameplay JSONL; records without a rating are ignored.
        #[arg(long)]
        data: PathBuf,
        /// `heuristic` or a FIS config JSON file.
        #[arg(long, default_value = "heuristic")]
        template: String,
        /// Train on this participant's records only.
        #[arg(long)]
        participant: Option<String>,
        #[command(flatten)]
        ga: GaArgs,
        /// Tuned config output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-generation best/mean fitness as CSV.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Resubstitution and leave-one-out precision, recall and F measure.
    Eval {
        /// `heuristic` or a FIS config JSON file.
        #[arg(long, default_value = "heuristic")]
        model: String,
        #[arg(long)]
        data: PathBuf,
        /// Held-out unit: participant, word or record.
        #[arg(long, default_value = "participant")]
        mode: FoldMode,
        /// Re-tune the model with the GA inside every fold instead of
        /// scoring the held-out unit with the given model.
        #[arg(long)]
        retune: bool,
        #[command(flatten)]
        ga: OptionalGaArgs,
        /// Emit CSV instead of the text table.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the session HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// `heuristic` or a FIS config JSON file.
        #[arg(long, default_value = "heuristic")]
        config: String,
        /// `default` or a task CSV file.
        #[arg(long, default_value = "default")]
        words: String,
        /// Log directory; defaults to $CAST_DATA_DIR, then ./cast-data.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Converts the session log to CSV.
    ExportCsv {
        /// Log file; defaults to the data directory's log.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-scores a session log offline and reports entries that differ
    /// from their live scores.
    Replay {
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// The config the server ran with.
        #[arg(long, default_value = "heuristic")]
        config: String,
    },
}

#[derive(Debug, Args)]
struct GaArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    population: usize,
    #[arg(long, default_value_t = 100)]
    generations: usize,
    /// Stop after this many generations without improvement.
    #[arg(long, default_value_t = 20)]
    stall: usize,
}

#[derive(Debug, Args)]
struct OptionalGaArgs {
    /// GA seed, required with --retune.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    population: usize,
    #[arg(long, default_value_t = 100)]
    generations: usize,
    #[arg(long, default_value_t = 20)]
    stall: usize,
}

fn ga_settings(seed: u64, population: usize, generations: usize, stall: usize) -> GaSettings {
    GaSettings {
        population_size: population,
        max_generations: generations,
        stall_generations: stall,
        seed,
        ..GaSettings::default()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn load_tasks(words: &str) -> Result<Vec<WordTask>> {
    if words == "default" {
        return Ok(default_tasks());
    }
    let path = Path::new(words);
    parse_tasks_csv(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_config(source: &str) -> Result<FisConfig> {
    if source == "heuristic" {
        return Ok(FisConfig::heuristic());
    }
    let path = Path::new(source);
    FisConfig::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_records(path: &Path) -> Result<Vec<GameplayRecord>> {
    parse_jsonl(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn data_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cast-data"))
}

fn log_path(log: Option<PathBuf>, dir: Option<PathBuf>) -> PathBuf {
    log.unwrap_or_else(|| data_dir(dir).join(LOG_FILE))
}

fn metrics(words: &str, out: Option<&Path>) -> Result<()> {
    let tasks = load_tasks(words)?;
    let rows = scramble_metrics(&tasks);
    let mut text = String::from("position,task_id,word,scramble,degree_of_scramble,normalized_hamming\n");
    for (t, m) in tasks.iter().zip(&rows) {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.position, t.task_id, m.word, m.scramble, m.degree_of_scramble, m.normalized_hamming
        ));
    }
    let r = scramble_correlation(&rows).context("correlation")?;
    text.push_str(&format!("# pearson_r,{r}\n"));
    emit(out, &text)
}

fn tune(
    data: &Path,
    template: &str,
    participant: Option<&str>,
    ga: &GaArgs,
    out: Option<&Path>,
    history: Option<&Path>,
) -> Result<()> {
    let template = load_config(template)?;
    let mut records = rated(&load_records(data)?);
    if let Some(p) = participant {
        records.retain(|r| r.participant_id == p);
        if records.is_empty() {
            bail!("no rated records for participant `{p}`");
        }
    }
    let settings = ga_settings(ga.seed, ga.population, ga.generations, ga.stall);
    let outcome = run_ga(&settings, &template, &records)?;
    if let Some(path) = history {
        let mut csv = String::from("generation,best,mean,step\n");
        for h in &outcome.history {
            csv.push_str(&format!("{},{},{},{}\n", h.generation, h.best, h.mean, h.step));
        }
        emit(Some(path), &csv)?;
    }
    eprintln!(
        "best SSE {} after {} generations ({:?})",
        outcome.best_fitness,
        outcome.history.len(),
        outcome.stop_reason
    );
    emit(out, &outcome.best.to_json())
}

fn eval(
    model: &str,
    data: &Path,
    mode: FoldMode,
    retune: bool,
    ga: &OptionalGaArgs,
    csv: bool,
    out: Option<&Path>,
) -> Result<()> {
    let config = load_config(model)?;
    let records = load_records(data)?;
    let resub = resubstitution(&IwdModel::new(config.clone()), &records)?;
    let trainer = if retune {
        let Some(seed) = ga.seed else {
            bail!("--retune needs --seed");
        };
        Trainer::Ga {
            template: config,
            settings: ga_settings(seed, ga.population, ga.generations, ga.stall),
        }
    } else {
        Trainer::Fixed(config)
    };
    let loo = leave_one_out(&trainer, &records, mode)?;
    let text = if csv { render_csv(&resub, &loo) } else { render_table(&resub, &loo) };
    emit(out, &text)
}

fn serve(port: u16, host: &str, config: &str, words: &str, dir: Option<PathBuf>) -> Result<()> {
    let model = IwdModel::new(load_config(config)?);
    let tasks = load_tasks(words)?;
    let dir = data_dir(dir);
    let store = LogStore::open(&dir)?;
    eprintln!("logging to {}", store.path().display());
    let service = Arc::new(SessionService::new(model, tasks, store, Arc::new(SystemClock::new())));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .with_context(|| format!("binding {host}:{port}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        cast_session::api::serve(listener, service).await?;
        Ok(())
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Metrics { words, out } => metrics(&words, out.as_deref()),
        Command::Simulate {
            participants,
            seed,
            words,
            out,
        } => {
            if participants == 0 {
                bail!("--participants must be at least 1");
            }
            let records = simulate_participants(participants, seed, &AbilityModel::default(), &load_tasks(&words)?);
            emit(out.as_deref(), &to_jsonl(&records))
        }
        Command::Tune {
            data,
            template,
            participant,
            ga,
            out,
            history,
        } => tune(&data, &template, participant.as_deref(), &ga, out.as_deref(), history.as_deref()),
        Command::Eval {
            model,
            data,
            mode,
            retune,
            ga,
            csv,
            out,
        } => eval(&model, &data, mode, retune, &ga, csv, out.as_deref()),
        Command::Serve {
            port,
            host,
            config,
            words,
            data_dir,
        } => serve(port, &host, &config, &words, data_dir),
        Command::ExportCsv { log, data_dir, out } => {
            let entries = read_log(log_path(log, data_dir))?;
            let mut buf = Vec::new();
            export_csv(&entries, &mut buf)?;
            emit(out.as_deref(), &String::from_utf8(buf)?)
        }
        Command::Replay { log, data_dir, config } => {
            let path = log_path(log, data_dir);
            let entries = read_log(&path)?;
            let mismatches = replay(&entries, &IwdModel::new(load_config(&config)?));
            for m in &mismatches {
                println!(
                    "line {}: logged {} ({}), replayed {} ({})",
                    m.line, m.logged, m.logged_crisp, m.replayed, m.replayed_crisp
                );
            }
            println!("{} entries, {} mismatches", entries.len(), mismatches.len());
            if !mismatches.is_empty() {
                bail!("replay differs from the live scores");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
