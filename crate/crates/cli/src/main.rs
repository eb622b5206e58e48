//! `tiltlab`: per-stage subcommands plus a one-shot `run`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use tiltlab_core::choice::{Agent, TriggerState};
use tiltlab_core::hand_history::{AliasMap, HandRecord, LogFormat};
use tiltlab_core::io::{read_json, read_jsonl, write_json, write_jsonl};
use tiltlab_core::outcome::{build_choice_records, fit_outcome_models, ChoiceRecord, OutcomeModels, WinModelKind};
use tiltlab_core::pipeline::{
    analyze, extract, group_fit_config, group_observations, ingest, run_pipeline, write_analysis, GroupFit,
    RunConfig,
};
use tiltlab_core::analysis::FitSource;
use tiltlab_core::rum::fit_rum;
use tiltlab_core::synthetic::{simulate_records, AgentProfile, GambleGenConfig};
use tiltlab_core::{Error, ErrorKind};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tiltlab", version, about = "Estimate risk attitude and precision from poker hand histories")]
struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON run configuration; every field is optional.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for outputs. Stage commands write their default file name
    /// here when `--out` is not given.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse hand logs into canonical JSONL.
    Ingest(IngestArgs),
    /// Extract pre-flop decisions with trigger states.
    Extract(ExtractArgs),
    /// Train the win-probability model and payoff regressions.
    FitOutcomes(FitOutcomesArgs),
    /// Turn decisions into gambles using fitted outcome models.
    BuildGambles(BuildGamblesArgs),
    /// Fit (ω, λ) for one agent and trigger state.
    FitRum(FitRumArgs),
    /// Simulate choice records from known parameters.
    Simulate(SimulateArgs),
    /// Produce the report tables from choice records and fits.
    Analyze(AnalyzeArgs),
    /// Run every stage end to end.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Input log files.
    #[arg(long = "in", value_name = "FILE", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "canonical")]
    format: String,
    #[arg(long, value_name = "FILE")]
    alias_map: Option<PathBuf>,
    /// Game ids to leave out (repeatable).
    #[arg(long = "exclude-game", value_name = "ID")]
    exclude: Vec<String>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Where to write parse and validation diagnostics.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitOutcomesArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// `logistic` or `mlp`.
    #[arg(long)]
    model: Option<WinModelKind>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildGamblesArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    models: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitRumArgs {
    /// Choice records (gambles with choices).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    agent: Agent,
    #[arg(long)]
    state: TriggerState,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    valid_sample: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// JSON object with `neutral`, `post_loss` and `post_win` parameters,
    /// each `{"omega": .., "lambda": ..}`.
    #[arg(long, value_name = "FILE")]
    profile: PathBuf,
    /// Decisions per trigger state.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value = "pluribus")]
    agent: Agent,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Choice records (gambles with choices).
    #[arg(long, value_name = "FILE")]
    decisions: PathBuf,
    /// Directory of per-group fit files.
    #[arg(long, value_name = "DIR")]
    fits: PathBuf,
    /// Bootstrap replicates per comparison.
    #[arg(long)]
    bootstrap: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Input logs (added to those in the config).
    #[arg(value_name = "FILE")]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, value_name = "FILE")]
    alias_map: Option<PathBuf>,
    #[arg(long = "exclude-game", value_name = "ID")]
    exclude: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Run(e)) => {
            // Display already chains the stage and file context.
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            })
        }
    }
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

impl Cli {
    /// The config file (or defaults) with `--seed` applied.
    fn config(&self) -> std::result::Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    fn output(&self, explicit: &Option<PathBuf>, default_name: &str) -> std::result::Result<PathBuf, Failure> {
        match (explicit, &self.out_dir) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(dir)) => Ok(dir.join(default_name)),
            (None, None) => Err(Failure::Usage(format!(
                "no output location: pass --out FILE or --out-dir DIR (would write {default_name})"
            ))),
        }
    }
}

fn load_alias_map(path: &Path) -> tiltlab_core::Result<AliasMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    AliasMap::from_json(&text)
}

fn dispatch(cli: &Cli) -> Outcome {
    let cfg = cli.config()?;
    let seeded = cfg.seeded();
    match &cli.command {
        Command::Ingest(a) => {
            let mut format: LogFormat = a.format.parse()?;
            if let LogFormat::PluribusRaw(t) = &mut format {
                *t = cfg.raw_table.clone();
            }
            let aliases = a.alias_map.as_deref().map(load_alias_map).transpose()?;
            let exclude: BTreeSet<String> = a.exclude.iter().cloned().collect();
            let (hands, report) = ingest(&a.inputs, &format, aliases.as_ref(), &exclude)?;
            let out = cli.output(&a.out, "hands.jsonl")?;
            write_jsonl(&out, &hands)?;
            if let Some(path) = &a.report {
                write_json(path, &report)?;
            }
            info!(
                "{} hands kept ({} parsed, {} excluded, {} dropped)",
                report.kept, report.parsed, report.excluded, report.dropped
            );
        }
        Command::Extract(a) => {
            let hands: Vec<HandRecord> = read_jsonl(&a.input)?;
            let decisions = extract(&hands);
            write_jsonl(&cli.output(&a.out, "decisions.jsonl")?, &decisions)?;
            info!("{} decisions from {} hands", decisions.len(), hands.len());
        }
        Command::FitOutcomes(a) => {
            let decisions = read_jsonl(&a.input)?;
            let mut outcome = seeded.outcome.clone();
            if let Some(kind) = a.model {
                outcome.win_model.kind = kind;
            }
            let models = fit_outcome_models(&decisions, &outcome)?;
            write_json(&cli.output(&a.out, "models.json")?, &models)?;
            if let Some(acc) = models.win.heldout_accuracy {
                info!("win model held-out accuracy {acc:.3}");
            }
        }
        Command::BuildGambles(a) => {
            let decisions = read_jsonl(&a.input)?;
            let models: OutcomeModels = read_json(&a.models)?;
            models.check()?;
            let (records, clamped) = build_choice_records(&models, &decisions)?;
            write_jsonl(&cli.output(&a.out, "gambles.jsonl")?, &records)?;
            info!("{} choice records, {clamped} clamped payoffs", records.len());
        }
        Command::FitRum(a) => {
            let records: Vec<ChoiceRecord> = read_jsonl(&a.input)?;
            let mut fit_cfg = group_fit_config(&seeded.fit, a.agent, Some(a.state));
            if let Some(s) = a.starts {
                fit_cfg.starts = s;
            }
            if let Some(k) = a.valid_sample {
                fit_cfg.valid_sample = k;
            }
            let obs = group_observations(&records, a.agent, Some(a.state));
            let fit = fit_rum(&obs, &fit_cfg)?;
            info!(
                "{}/{}: ω = {:.4} ± {:.4}, λ = {:.4} ± {:.4} ({} valid of {})",
                a.agent,
                a.state,
                fit.omega_mean,
                fit.omega_sd,
                fit.lambda_mean,
                fit.lambda_sd,
                fit.n_valid,
                fit.starts.len()
            );
            let group = GroupFit {
                agent: a.agent,
                state: a.state,
                source: FitSource::State,
                failure: None,
                fit,
            };
            let default_name = group.file_name();
            write_json(&cli.output(&a.out, &default_name)?, &group)?;
        }
        Command::Simulate(a) => {
            let profile: AgentProfile = read_json(&a.profile)?;
            let gen = GambleGenConfig::default();
            let records = simulate_records(a.agent, &profile, a.n, &gen, cfg.seed)?;
            write_jsonl(&cli.output(&a.out, "decisions.jsonl")?, &records)?;
        }
        Command::Analyze(a) => {
            let records: Vec<ChoiceRecord> = read_jsonl(&a.decisions)?;
            let fits = read_fit_dir(&a.fits)?;
            let mut analysis_cfg = seeded.analysis();
            if let Some(b) = a.bootstrap {
                analysis_cfg.bootstrap.replicates = b;
            }
            let dir = cli
                .out_dir
                .clone()
                .ok_or_else(|| Failure::Usage("analyze needs --out-dir DIR".into()))?;
            let analysis = analyze(&records, &fits, &analysis_cfg)?;
            for path in write_analysis(&dir, &analysis)? {
                info!("wrote {}", path.display());
            }
        }
        Command::Run(a) => {
            let mut cfg = cfg;
            cfg.inputs.extend(a.inputs.iter().cloned());
            if let Some(f) = &a.format {
                cfg.format = f.clone();
            }
            if a.alias_map.is_some() {
                cfg.alias_map = a.alias_map.clone();
            }
            cfg.exclude_games.extend(a.exclude.iter().cloned());
            let dir = cli
                .out_dir
                .clone()
                .ok_or_else(|| Failure::Usage("run needs --out-dir DIR".into()))?;
            let manifest = run_pipeline(&cfg, &dir)?;
            println!("{} artifacts written to {}", manifest.artifacts.len() + 1, dir.display());
        }
    }
    Ok(())
}

/// Every `*.json` file in `dir` that holds a group fit, in file-name order.
fn read_fit_dir(dir: &Path) -> tiltlab_core::Result<Vec<GroupFit>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut fits = Vec::new();
    for p in paths {
        match read_json::<GroupFit>(&p) {
            Ok(f) => fits.push(f),
            Err(e @ Error::Parse { .. }) => log::debug!("skipping {}: {e}", p.display()),
            Err(e) => return Err(e),
        }
    }
    if fits.is_empty() {
        return Err(Error::InvalidInput(format!("no fit files in {}", dir.display())));
    }
    Ok(fits)
}
