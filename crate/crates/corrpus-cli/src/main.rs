//! Command-line driver: run the bAbI and Re3 harnesses against a configured
//! backend, generate synthetic datasets, inspect oracle answers, and dump
//! rendered prompts or parsed ASTs.

mod config;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use corrpus::babi::{
    generate_dataset, oracle_solve, parse_babi_file, run_babi, ActionLexicon, OracleBackend,
    RunConfig, SynthConfig,
};
use corrpus::dsl::{dump_ast, parse_program};
use corrpus::gateway::{
    CacheBackend, Completer, EntailmentScore, EntailmentScorer, HttpScorer, LiveBackend,
    LiveConfig, RecordingBackend, ScorerCache, TableScorer,
};
use corrpus::prompt::{exemplar, render, PromptStyle};
use corrpus::re3::{load_tuples, prompt_for_text, run_re3, synthetic_tuples, Re3RunConfig};
use corrpus::world::{PresetId, SchemaPreset};

use config::Settings;
use manifest::{assets_describe, new_run_id, unix_now, write_manifest, BackendManifest, RunManifest};

#[derive(Parser)]
#[command(name = "corrpus", version, about = "Story understanding via code prompts and a symbolic world model")]
struct Cli {
    /// Key-value config file (TOML): model, api_key, base_url, scorer_url, jobs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// bAbI Task 2 question answering.
    Babi {
        #[command(subcommand)]
        command: BabiCommand,
    },
    /// Re3 story inconsistency detection.
    Re3 {
        #[command(subcommand)]
        command: Re3Command,
    },
    /// Symbolic oracle utilities.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Prompt rendering and AST inspection.
    Prompt {
        #[command(subcommand)]
        command: PromptCommand,
    },
}

#[derive(Subcommand)]
enum BabiCommand {
    /// Run the accuracy harness over a dataset file.
    Run(BabiRunArgs),
    /// Generate a synthetic dataset file in the upstream line format.
    Synth(BabiSynthArgs),
}

#[derive(Args)]
struct BabiRunArgs {
    /// comment | specific | abstract | natural
    #[arg(long)]
    style: String,
    /// oracle | cache | live
    #[arg(long)]
    backend: String,
    #[arg(long)]
    data: PathBuf,
    /// Report directory (manifest.json, report.json, report.txt).
    #[arg(long)]
    out: PathBuf,
    /// Cassette file: replay source for `cache`, recording sink otherwise.
    #[arg(long)]
    cassette: Option<PathBuf>,
    /// Evaluate at most N samples.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    model: Option<String>,
    /// Parallel in-flight requests.
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the built-in one-shot exemplar with a file.
    #[arg(long)]
    exemplar: Option<PathBuf>,
}

#[derive(Args)]
struct BabiSynthArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    questions: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    characters: usize,
    #[arg(long, default_value_t = 3)]
    objects: usize,
}

#[derive(Subcommand)]
enum Re3Command {
    /// Run the detection harness over a tuple dataset.
    Run(Re3RunArgs),
    /// Generate a synthetic tuple dataset with injected contradictions.
    Synth(Re3SynthArgs),
}

#[derive(Args)]
struct Re3RunArgs {
    /// comment | specific | abstract
    #[arg(long)]
    style: String,
    /// cache | live
    #[arg(long)]
    backend: String,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    cassette: Option<PathBuf>,
    /// `mock`, `cache`, or the scorer service URL. Falls back to
    /// CORRPUS_SCORER_URL / the config file when omitted.
    #[arg(long)]
    scorer: Option<String>,
    /// Scorer record file: replay source for `--scorer cache`, recording
    /// sink otherwise.
    #[arg(long)]
    scorer_cache: Option<PathBuf>,
    /// Evaluate at most N tuples.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    exemplar: Option<PathBuf>,
}

#[derive(Args)]
struct Re3SynthArgs {
    #[arg(long, default_value_t = 5)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    tuples: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Solve a dataset symbolically and check against the gold answers.
    Solve {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
        /// Print one line per sample instead of just the summary.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Subcommand)]
enum PromptCommand {
    /// Print the exact request text for a story.
    Dump(PromptDumpArgs),
}

#[derive(Args)]
struct PromptDumpArgs {
    /// babi | re3
    #[arg(long)]
    task: String,
    #[arg(long)]
    style: String,
    /// bAbI dataset file to take the story from.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Sample index within --data.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Raw story text file (re3).
    #[arg(long)]
    story: Option<PathBuf>,
    #[arg(long)]
    exemplar: Option<PathBuf>,
    /// Print only the target prefix, without the one-shot exemplar.
    #[arg(long)]
    target_only: bool,
    /// Parse this program file and print its AST instead of a prompt.
    #[arg(long)]
    dump_ast: Option<PathBuf>,
}

/// Exit codes: 0 run complete, 1 unexpected failure, 2 configuration error,
/// 3 dataset error.
enum CliError {
    Config(anyhow::Error),
    Dataset(anyhow::Error),
    Other(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Dataset(_) => 3,
            CliError::Other(_) => 1,
        }
    }

    fn message(&self) -> &anyhow::Error {
        match self {
            CliError::Config(e) | CliError::Dataset(e) | CliError::Other(e) => e,
        }
    }
}

fn config_err<T>(err: anyhow::Error) -> Result<T, CliError> {
    Err(CliError::Config(err))
}

/// Scorer choice as written to the manifest: URLs lose their query string
/// and userinfo so credentials never land on disk.
fn redact_scorer(choice: &str) -> String {
    if !choice.starts_with("http") {
        return choice.to_string();
    }
    let no_query = choice.split('?').next().unwrap_or(choice);
    match no_query.split_once("://") {
        Some((scheme, rest)) => {
            let rest = rest.rsplit('@').next().unwrap_or(rest);
            format!("{scheme}://{rest}")
        }
        None => no_query.to_string(),
    }
}

fn parse_style(text: &str) -> Result<PromptStyle, CliError> {
    PromptStyle::parse(text).ok_or_else(|| {
        CliError::Config(anyhow!(
            "unknown style `{text}` (comment | specific | abstract | natural)"
        ))
    })
}

fn load_exemplar(
    preset: PresetId,
    style: PromptStyle,
    path: Option<&Path>,
) -> Result<String, CliError> {
    match path {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("cannot read exemplar {}", path.display()))
            .map_err(CliError::Config),
        None => exemplar::builtin_text(preset, style)
            .map(str::to_string)
            .ok_or_else(|| {
                CliError::Config(anyhow!(
                    "no built-in exemplar for {}/{style}; pass --exemplar",
                    preset.as_str()
                ))
            }),
    }
}

fn build_babi_backend(
    args: &BabiRunArgs,
    settings: &Settings,
    samples: &[corrpus::babi::BabiSample],
    style: PromptStyle,
    exemplar_text: &str,
    lexicon: &ActionLexicon,
) -> Result<Box<dyn Completer>, CliError> {
    let backend: Box<dyn Completer> = match args.backend.as_str() {
        "oracle" => Box::new(OracleBackend::new(samples, style, exemplar_text, lexicon)),
        "cache" => {
            let Some(cassette) = &args.cassette else {
                return config_err(anyhow!("--backend cache needs --cassette"));
            };
            Box::new(
                CacheBackend::open(cassette)
                    .map_err(|e| CliError::Dataset(anyhow!("cassette: {e}")))?,
            )
        }
        "live" => {
            let live = LiveBackend::new(LiveConfig {
                base_url: settings.base_url.clone(),
                api_key: settings.api_key.clone(),
                ..LiveConfig::default()
            })
            .map_err(|e| CliError::Config(anyhow!("{e} (set CORRPUS_API_KEY)")))?;
            Box::new(live)
        }
        other => {
            return config_err(anyhow!(
                "unknown backend `{other}` (oracle | cache | live)"
            ))
        }
    };
    // Record through to the cassette for non-cache backends.
    if args.backend != "cache" {
        if let Some(cassette) = &args.cassette {
            return RecordingBackend::create(backend, cassette)
                .map(|b| Box::new(b) as Box<dyn Completer>)
                .map_err(|e| CliError::Other(anyhow!("cassette: {e}")));
        }
    }
    Ok(backend)
}

fn write_reports<R: serde::Serialize>(
    out: &Path,
    manifest: &RunManifest,
    report: &R,
    table: &str,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(CliError::Other)?;
    write_manifest(out, manifest).map_err(CliError::Other)?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(out.join("report.json"), json).map_err(|e| CliError::Other(e.into()))?;
    std::fs::write(out.join("report.txt"), table).map_err(|e| CliError::Other(e.into()))?;
    Ok(())
}

fn cmd_babi_run(args: BabiRunArgs, settings: Settings) -> Result<(), CliError> {
    let style = parse_style(&args.style)?;
    let started_at = unix_now();
    let samples = parse_babi_file(&args.data).map_err(|e| CliError::Dataset(anyhow!("{e}")))?;
    let lexicon = ActionLexicon::default();
    let exemplar_text = load_exemplar(PresetId::BabiTask2, style, args.exemplar.as_deref())?;
    let backend =
        build_babi_backend(&args, &settings, &samples, style, &exemplar_text, &lexicon)?;

    let run_config = RunConfig {
        style,
        model: settings.model.clone(),
        sample_limit: args.limit,
        jobs: settings.jobs,
    };
    let report = run_babi(
        &samples,
        backend.as_ref(),
        &exemplar_text,
        &lexicon,
        &run_config,
    );

    let manifest = RunManifest {
        run_id: new_run_id("babi"),
        task: "babi".to_string(),
        style: style.as_str().to_string(),
        backend: BackendManifest {
            kind: args.backend.clone(),
            model: settings.model,
            temperature: 0.0,
            top_p: 0.95,
            sample_count: 1,
        },
        dataset_path: args.data.display().to_string(),
        cassette_path: args.cassette.as_ref().map(|p| p.display().to_string()),
        scorer: None,
        assets_describe: assets_describe(),
        started_at,
        finished_at: unix_now(),
    };
    write_reports(&args.out, &manifest, &report, &report.table())?;
    print!("{}", report.table());
    println!("reports written to {}", args.out.display());
    Ok(())
}

fn cmd_babi_synth(args: BabiSynthArgs) -> Result<(), CliError> {
    let config = SynthConfig {
        characters: args.characters,
        objects: args.objects,
    };
    let text = generate_dataset(args.seed, args.questions, config);
    std::fs::write(&args.out, text).map_err(|e| CliError::Other(e.into()))?;
    println!(
        "wrote {} questions (seed {}) to {}",
        args.questions,
        args.seed,
        args.out.display()
    );
    Ok(())
}

fn build_scorer(
    args: &Re3RunArgs,
    settings: &Settings,
) -> Result<(String, Box<dyn EntailmentScorer>), CliError> {
    let choice = match (&args.scorer, &settings.scorer_url) {
        (Some(flag), _) => flag.clone(),
        (None, Some(url)) => url.clone(),
        (None, None) => {
            return config_err(anyhow!(
                "no scorer configured; pass --scorer or set CORRPUS_SCORER_URL"
            ))
        }
    };
    let base: Option<Box<dyn EntailmentScorer>> = match choice.as_str() {
        "mock" => Some(Box::new(TableScorer::constant(EntailmentScore {
            entailment: 0.5,
            neutral: 0.3,
            contradiction: 0.2,
        }))),
        "cache" => None,
        url if url.starts_with("http") => Some(Box::new(HttpScorer::new(
            url.to_string(),
            settings.api_key.clone(),
        ))),
        other => {
            return config_err(anyhow!(
                "unknown scorer `{other}` (mock | cache | a service URL)"
            ))
        }
    };
    let scorer = match (base, &args.scorer_cache) {
        (Some(inner), Some(path)) => ScorerCache::recording(inner, path)
            .map(|s| Box::new(s) as Box<dyn EntailmentScorer>)
            .map_err(|e| CliError::Other(anyhow!("scorer cache: {e}")))?,
        (Some(inner), None) => inner,
        (None, Some(path)) => ScorerCache::replay(path)
            .map(|s| Box::new(s) as Box<dyn EntailmentScorer>)
            .map_err(|e| CliError::Dataset(anyhow!("scorer cache: {e}")))?,
        (None, None) => return config_err(anyhow!("--scorer cache needs --scorer-cache PATH")),
    };
    Ok((choice, scorer))
}

fn cmd_re3_run(args: Re3RunArgs, settings: Settings) -> Result<(), CliError> {
    let style = parse_style(&args.style)?;
    if style == PromptStyle::NaturalLanguage {
        return config_err(anyhow!(
            "the natural style has no attribute extraction; use comment | specific | abstract"
        ));
    }
    let started_at = unix_now();
    let tuples = load_tuples(&args.data).map_err(|e| CliError::Dataset(anyhow!("{e}")))?;
    let exemplar_text = load_exemplar(PresetId::Re3Character, style, args.exemplar.as_deref())?;

    let backend: Box<dyn Completer> = match args.backend.as_str() {
        "cache" => {
            let Some(cassette) = &args.cassette else {
                return config_err(anyhow!("--backend cache needs --cassette"));
            };
            Box::new(
                CacheBackend::open(cassette)
                    .map_err(|e| CliError::Dataset(anyhow!("cassette: {e}")))?,
            )
        }
        "live" => {
            let live = LiveBackend::new(LiveConfig {
                base_url: settings.base_url.clone(),
                api_key: settings.api_key.clone(),
                ..LiveConfig::default()
            })
            .map_err(|e| CliError::Config(anyhow!("{e} (set CORRPUS_API_KEY)")))?;
            match &args.cassette {
                Some(path) => Box::new(
                    RecordingBackend::create(Box::new(live), path)
                        .map_err(|e| CliError::Other(anyhow!("cassette: {e}")))?,
                ),
                None => Box::new(live),
            }
        }
        other => return config_err(anyhow!("unknown backend `{other}` (cache | live)")),
    };
    let (scorer_choice, scorer) = build_scorer(&args, &settings)?;

    let run_config = Re3RunConfig {
        style,
        model: settings.model.clone(),
        tuple_limit: args.limit,
        jobs: settings.jobs,
    };
    let report = run_re3(
        &tuples,
        backend.as_ref(),
        scorer.as_ref(),
        &exemplar_text,
        &run_config,
    );

    let manifest = RunManifest {
        run_id: new_run_id("re3"),
        task: "re3".to_string(),
        style: style.as_str().to_string(),
        backend: BackendManifest {
            kind: args.backend.clone(),
            model: settings.model,
            temperature: 0.7,
            top_p: 0.95,
            sample_count: 3,
        },
        dataset_path: args.data.display().to_string(),
        cassette_path: args.cassette.as_ref().map(|p| p.display().to_string()),
        scorer: Some(scorer_choice),
        assets_describe: assets_describe(),
        started_at,
        finished_at: unix_now(),
    };
    write_reports(&args.out, &manifest, &report, &report.table())?;
    print!("{}", report.table());
    println!("reports written to {}", args.out.display());
    Ok(())
}

fn cmd_re3_synth(args: Re3SynthArgs) -> Result<(), CliError> {
    let tuples = synthetic_tuples(args.tuples, args.seed);
    let json = serde_json::to_string_pretty(&tuples).expect("tuples serialize");
    std::fs::write(&args.out, json).map_err(|e| CliError::Other(e.into()))?;
    println!("wrote {} tuples to {}", tuples.len(), args.out.display());
    Ok(())
}

fn cmd_oracle_solve(data: PathBuf, limit: Option<usize>, verbose: bool) -> Result<(), CliError> {
    let samples = parse_babi_file(&data).map_err(|e| CliError::Dataset(anyhow!("{e}")))?;
    let limit = limit.unwrap_or(samples.len()).min(samples.len());
    let lexicon = ActionLexicon::default();
    let mut agree = 0usize;
    let mut failures = 0usize;
    for (index, sample) in samples[..limit].iter().enumerate() {
        match oracle_solve(sample, &lexicon) {
            Ok(solution) => {
                let matches = solution.answer.eq_ignore_ascii_case(sample.answer.trim());
                if matches {
                    agree += 1;
                }
                if verbose {
                    println!(
                        "{index}\t{}\t{}\t{}",
                        solution.answer,
                        sample.answer,
                        if matches { "ok" } else { "MISMATCH" }
                    );
                }
            }
            Err(err) => {
                failures += 1;
                eprintln!("{index}: {err}");
            }
        }
    }
    println!("oracle agreement: {agree}/{limit} ({failures} failures)");
    Ok(())
}

fn cmd_prompt_dump(args: PromptDumpArgs) -> Result<(), CliError> {
    let style = parse_style(&args.style)?;
    let preset_id = match args.task.as_str() {
        "babi" => PresetId::BabiTask2,
        "re3" => PresetId::Re3Character,
        other => return config_err(anyhow!("unknown task `{other}` (babi | re3)")),
    };

    if let Some(program_path) = &args.dump_ast {
        let source = std::fs::read_to_string(program_path)
            .with_context(|| format!("cannot read {}", program_path.display()))
            .map_err(CliError::Dataset)?;
        let preset = SchemaPreset::by_id(preset_id);
        return match parse_program(&source, style, &preset) {
            Ok(program) => {
                print!("{}", dump_ast(&program));
                Ok(())
            }
            Err(err) => Err(CliError::Dataset(anyhow!("{err}"))),
        };
    }

    let exemplar_text = load_exemplar(preset_id, style, args.exemplar.as_deref())?;
    let bundle = match preset_id {
        PresetId::BabiTask2 => {
            let Some(data) = &args.data else {
                return config_err(anyhow!("babi prompts need --data (and --index)"));
            };
            let samples = parse_babi_file(data).map_err(|e| CliError::Dataset(anyhow!("{e}")))?;
            let sample = samples
                .get(args.index)
                .ok_or_else(|| CliError::Dataset(anyhow!("index {} out of range", args.index)))?;
            let lexicon = ActionLexicon::default();
            let case = corrpus::prompt::StoryCase {
                sentences: sample.sentences(),
                entities: corrpus::babi::derive_entities(sample, &lexicon),
                query: Some(sample.question.clone()),
                gold_answer: Some(sample.answer.clone()),
            };
            render(&case, style, &SchemaPreset::babi_task2(), &exemplar_text)
                .map_err(|e| CliError::Dataset(anyhow!("{e}")))?
        }
        PresetId::Re3Character => {
            let Some(story) = &args.story else {
                return config_err(anyhow!("re3 prompts need --story FILE"));
            };
            let text = std::fs::read_to_string(story)
                .with_context(|| format!("cannot read {}", story.display()))
                .map_err(CliError::Dataset)?;
            let (_, bundle) = prompt_for_text(&text, style, &exemplar_text)
                .map_err(|e| CliError::Dataset(anyhow!("{e}")))?;
            bundle
        }
    };
    if args.target_only {
        print!("{}", bundle.target_prefix);
    } else {
        print!("{}", bundle.request_text());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Babi { command } => match command {
            BabiCommand::Run(args) => {
                let settings =
                    config::resolve(cli.config.as_deref(), args.model.clone(), args.jobs)
                        .map_err(CliError::Config)?;
                cmd_babi_run(args, settings)
            }
            BabiCommand::Synth(args) => cmd_babi_synth(args),
        },
        Command::Re3 { command } => match command {
            Re3Command::Run(args) => {
                let settings =
                    config::resolve(cli.config.as_deref(), args.model.clone(), args.jobs)
                        .map_err(CliError::Config)?;
                cmd_re3_run(args, settings)
            }
            Re3Command::Synth(args) => cmd_re3_synth(args),
        },
        Command::Oracle { command } => match command {
            OracleCommand::Solve {
                data,
                limit,
                verbose,
            } => cmd_oracle_solve(data, limit, verbose),
        },
        Command::Prompt { command } => match command {
            PromptCommand::Dump(args) => cmd_prompt_dump(args),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err.message());
            ExitCode::from(err.code())
        }
    }
}
