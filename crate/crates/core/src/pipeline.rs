//! End-to-end orchestration: ingest → extract → outcome models → gambles →
//! per-group RUM fits → analysis → reports, with a hashed manifest.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    annotate, compare_parameters, eu_diff_table, fold_rate_report, rationality_table, utility_gap_histogram,
    write_reports, Annotated, BootstrapConfig, ComparisonResult, EuDiffCell, FitSource, FitSummary, FitTable,
    FoldRateCell, HistogramBin, HistogramSpec, RationalityCell, ReportInputs,
};
use crate::choice::{extract_preflop_decisions, label_trigger_states, pool_humans, Agent, PreflopDecision, TriggerState};
use crate::error::{Error, Result};
use crate::hand_history::{
    exclude_games, normalize_aliases, parse_files, validate_hands, AliasMap, HandDiagnostic, HandRecord, LogFormat,
    ParseDiagnostic, RawTableConfig,
};
use crate::io::{read_json, write_json, write_jsonl};
use crate::outcome::{build_choice_records, fit_outcome_models, ChoiceRecord, OutcomeConfig, OutcomeModels};
use crate::rng::derive_seed;
use crate::rum::{fit_rum, in_allowable_domain, LikelihoodData, Observation, OmegaGrid, RumFit, RumParams};
use crate::rum::FitConfig;

/// Everything a full run depends on. Serialized verbatim into the output
/// directory and the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every stage seed is derived from it.
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    /// `canonical` or `pluribus-raw`.
    pub format: String,
    pub raw_table: RawTableConfig,
    pub alias_map: Option<PathBuf>,
    pub exclude_games: Vec<String>,
    pub outcome: OutcomeConfig,
    pub fit: FitConfig,
    pub bootstrap: BootstrapConfig,
    pub grid: OmegaGrid,
    pub histogram: HistogramSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            inputs: Vec::new(),
            format: "canonical".into(),
            raw_table: RawTableConfig::default(),
            alias_map: None,
            exclude_games: Vec::new(),
            outcome: OutcomeConfig::default(),
            fit: FitConfig::default(),
            bootstrap: BootstrapConfig::default(),
            grid: OmegaGrid::default(),
            histogram: HistogramSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn log_format(&self) -> Result<LogFormat> {
        match self.format.parse()? {
            LogFormat::PluribusRaw(_) => Ok(LogFormat::PluribusRaw(self.raw_table.clone())),
            f => Ok(f),
        }
    }

    /// Copy with every stage seed replaced by one derived from `seed`.
    pub fn seeded(&self) -> RunConfig {
        let mut cfg = self.clone();
        cfg.outcome.win_model.seed = derive_seed(self.seed, "win-model");
        cfg.fit.seed = derive_seed(self.seed, "rum");
        cfg.bootstrap.seed = derive_seed(self.seed, "bootstrap");
        cfg.bootstrap.fit = cfg.fit.clone();
        cfg
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            bootstrap: self.bootstrap.clone(),
            grid: self.grid,
            histogram: self.histogram,
        }
    }
}

// ---------------------------------------------------------------- ingest

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub parsed: usize,
    pub excluded: usize,
    /// Hands removed because validation flagged them.
    pub dropped: usize,
    pub kept: usize,
    pub parse_diagnostics: Vec<ParseDiagnostic>,
    pub hand_diagnostics: Vec<HandDiagnostic>,
}

/// Parses, renames, filters and validates hand logs. Hands with any
/// validation finding are dropped and reported rather than aborting the run.
pub fn ingest(
    inputs: &[PathBuf],
    format: &LogFormat,
    aliases: Option<&AliasMap>,
    exclude: &BTreeSet<String>,
) -> Result<(Vec<HandRecord>, IngestReport)> {
    if inputs.is_empty() {
        return Err(Error::InvalidInput("no input logs given".into()));
    }
    if matches!(format, LogFormat::PluribusRaw(_)) && aliases.is_none() {
        return Err(Error::InvalidInput(
            "the pluribus-raw format needs an alias map (pass --alias-map FILE or set `alias_map` in the config)"
                .into(),
        ));
    }
    let parsed = parse_files(inputs, format)?;
    let n_parsed = parsed.hands.len();
    let hands = match aliases {
        Some(map) => normalize_aliases(&parsed.hands, map)?,
        None => parsed.hands,
    };
    let hands = exclude_games(hands, exclude);
    let excluded = n_parsed - hands.len();

    let hand_diagnostics = validate_hands(&hands);
    let bad: BTreeSet<(&str, u32)> = hand_diagnostics
        .iter()
        .map(|d| (d.game_id.as_str(), d.hand_index))
        .collect();
    let kept: Vec<HandRecord> = hands
        .iter()
        .filter(|h| !bad.contains(&(h.game_id.as_str(), h.hand_index)))
        .cloned()
        .collect();
    if !hand_diagnostics.is_empty() {
        log::warn!("dropping {} hands that failed validation", hands.len() - kept.len());
    }
    let report = IngestReport {
        parsed: n_parsed,
        excluded,
        dropped: hands.len() - kept.len(),
        kept: kept.len(),
        parse_diagnostics: parsed.diagnostics,
        hand_diagnostics,
    };
    Ok((kept, report))
}

/// Pre-flop decisions with trigger states, humans pooled.
pub fn extract(hands: &[HandRecord]) -> Vec<PreflopDecision> {
    pool_humans(label_trigger_states(extract_preflop_decisions(hands)))
}

// ---------------------------------------------------------------- fits

/// One agent × state fit as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFit {
    pub agent: Agent,
    pub state: TriggerState,
    pub source: FitSource,
    /// Why the group's own fit was replaced by the pooled one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub fit: RumFit,
}

impl GroupFit {
    pub fn summary(&self) -> FitSummary {
        FitSummary::from_fit(self.agent, self.state, &self.fit, self.source)
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}.json", self.agent, self.state)
    }
}

pub fn group_observations(records: &[ChoiceRecord], agent: Agent, state: Option<TriggerState>) -> Vec<Observation> {
    records
        .iter()
        .filter(|r| r.agent == agent && state.map_or(true, |s| r.trigger == s))
        .map(|r| Observation::new(r.gamble.clone(), r.choice))
        .collect()
}

/// The fit settings used for one group: `cfg` with a seed derived from the
/// group name, so a group refit on its own reproduces the pipeline's fit.
pub fn group_fit_config(cfg: &FitConfig, agent: Agent, state: Option<TriggerState>) -> FitConfig {
    let group = match state {
        Some(s) => format!("{agent}/{s}"),
        None => format!("{agent}/pooled"),
    };
    FitConfig {
        seed: derive_seed(cfg.seed, &group),
        ..cfg.clone()
    }
}

/// Fits every agent × state group present in `records`. A group whose own
/// fit fails (no decisions, or no valid convergence) falls back to the
/// agent's all-state fit; if that fails too, the error propagates.
pub fn fit_groups(records: &[ChoiceRecord], cfg: &FitConfig) -> Result<Vec<GroupFit>> {
    let mut out = Vec::new();
    for agent in Agent::ALL {
        if !records.iter().any(|r| r.agent == agent) {
            continue;
        }
        let mut pooled: Option<RumFit> = None;
        for state in TriggerState::ALL {
            let obs = group_observations(records, agent, Some(state));
            match fit_rum(&obs, &group_fit_config(cfg, agent, Some(state))) {
                Ok(fit) => out.push(GroupFit {
                    agent,
                    state,
                    source: FitSource::State,
                    failure: None,
                    fit,
                }),
                Err(e @ (Error::NoValidConvergence { .. } | Error::Empty(_))) => {
                    log::warn!("fit for {agent}/{state} failed ({e}); using the {agent} pooled fit");
                    if pooled.is_none() {
                        let pooled_cfg = group_fit_config(cfg, agent, None);
                        pooled = Some(fit_rum(&group_observations(records, agent, None), &pooled_cfg)?);
                    }
                    out.push(GroupFit {
                        agent,
                        state,
                        source: FitSource::Pooled,
                        failure: Some(e.to_string()),
                        fit: pooled.clone().expect("set above"),
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- analysis

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub bootstrap: BootstrapConfig,
    pub grid: OmegaGrid,
    pub histogram: HistogramSpec,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        RunConfig::default().analysis()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityRow {
    pub agent: Agent,
    pub state: TriggerState,
    pub n: usize,
    pub outside: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDiagnostics {
    /// Choice situations whose group's expected ω lies outside their
    /// allowable monotone domain.
    pub omega_validity: Vec<ValidityRow>,
    pub outside_fraction: f64,
    pub skipped_comparisons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub fits: FitTable,
    pub annotated: Vec<Annotated>,
    pub rationality: Vec<RationalityCell>,
    pub eu_diff: Vec<EuDiffCell>,
    pub comparisons: Vec<ComparisonResult>,
    pub fold_rates: Vec<FoldRateCell>,
    pub histogram: Vec<HistogramBin>,
    pub diagnostics: AnalysisDiagnostics,
}

impl Analysis {
    pub fn report_inputs(&self) -> ReportInputs<'_> {
        ReportInputs {
            rationality: &self.rationality,
            eu_diff: &self.eu_diff,
            fits: &self.fits,
            comparisons: &self.comparisons,
            fold_rates: &self.fold_rates,
            histogram: &self.histogram,
        }
    }
}

/// The comparisons reported: each state across agents, then each agent's
/// post-loss and post-win against its own neutral state.
pub fn comparison_pairs() -> Vec<((Agent, TriggerState), (Agent, TriggerState))> {
    let mut pairs: Vec<_> = TriggerState::ALL
        .iter()
        .map(|&s| ((Agent::Pluribus, s), (Agent::Human, s)))
        .collect();
    for agent in Agent::ALL {
        for state in [TriggerState::PostLoss, TriggerState::PostWin] {
            pairs.push(((agent, state), (agent, TriggerState::Neutral)));
        }
    }
    pairs
}

fn validity(records: &[ChoiceRecord], fits: &FitTable, grid: &OmegaGrid) -> Result<AnalysisDiagnostics> {
    let mut rows = Vec::new();
    for agent in Agent::ALL {
        for state in TriggerState::ALL {
            let Some(fit) = fits.get(agent, state) else { continue };
            let group: Vec<&ChoiceRecord> = records
                .iter()
                .filter(|r| r.agent == agent && r.trigger == state)
                .collect();
            let flags: Vec<bool> = group
                .par_iter()
                .map(|r| in_allowable_domain(&r.gamble, fit.omega_mean, fit.lambda_mean, grid))
                .collect::<Result<_>>()?;
            let outside = flags.iter().filter(|&&ok| !ok).count();
            rows.push(ValidityRow {
                agent,
                state,
                n: group.len(),
                outside,
                fraction: if group.is_empty() { 0.0 } else { outside as f64 / group.len() as f64 },
            });
        }
    }
    let n: usize = rows.iter().map(|r| r.n).sum();
    let outside: usize = rows.iter().map(|r| r.outside).sum();
    Ok(AnalysisDiagnostics {
        outside_fraction: if n == 0 { 0.0 } else { outside as f64 / n as f64 },
        omega_validity: rows,
        skipped_comparisons: Vec::new(),
    })
}

/// Tables, comparisons and diagnostics from choice records and group fits.
/// A comparison is skipped (and noted) when either side uses a pooled
/// stand-in fit, has no decisions, or its bootstrap fails.
pub fn analyze(records: &[ChoiceRecord], fits: &[GroupFit], cfg: &AnalysisConfig) -> Result<Analysis> {
    let mut summaries: Vec<FitSummary> = fits.iter().map(GroupFit::summary).collect();
    summaries.sort_by_key(|f| (f.agent, f.state));
    if let Some(w) = summaries.windows(2).find(|w| (w[0].agent, w[0].state) == (w[1].agent, w[1].state)) {
        return Err(Error::InvalidInput(format!("two fits for {}/{}", w[0].agent, w[0].state)));
    }
    let table = FitTable { fits: summaries };
    let annotated = annotate(records, &table, &cfg.grid)?;
    let mut diagnostics = validity(records, &table, &cfg.grid)?;

    let mut comparisons = Vec::new();
    for ((aa, sa), (ab, sb)) in comparison_pairs() {
        let label_a = format!("{aa}/{sa}");
        let label_b = format!("{ab}/{sb}");
        let name = format!("{label_a} vs {label_b}");
        let (Some(fa), Some(fb)) = (table.get(aa, sa), table.get(ab, sb)) else {
            diagnostics.skipped_comparisons.push(format!("{name}: missing fit"));
            continue;
        };
        if fa.source == FitSource::Pooled || fb.source == FitSource::Pooled {
            diagnostics
                .skipped_comparisons
                .push(format!("{name}: a group uses the pooled stand-in fit"));
            continue;
        }
        let obs_a = group_observations(records, aa, Some(sa));
        let obs_b = group_observations(records, ab, Some(sb));
        if obs_a.is_empty() || obs_b.is_empty() {
            diagnostics.skipped_comparisons.push(format!("{name}: no decisions"));
            continue;
        }
        let data_a = LikelihoodData::new(&obs_a)?;
        let data_b = LikelihoodData::new(&obs_b)?;
        let boot = BootstrapConfig {
            seed: derive_seed(cfg.bootstrap.seed, &name),
            ..cfg.bootstrap.clone()
        };
        let pa = RumParams::new(fa.omega_mean, fa.lambda_mean);
        let pb = RumParams::new(fb.omega_mean, fb.lambda_mean);
        match compare_parameters((&label_a, &data_a, pa), (&label_b, &data_b, pb), &boot) {
            Ok(pair) => comparisons.extend(pair),
            Err(e @ Error::BootstrapFailure { .. }) => {
                log::warn!("{name}: {e}");
                diagnostics.skipped_comparisons.push(format!("{name}: {e}"));
            }
            Err(e) => return Err(e),
        }
    }

    Ok(Analysis {
        rationality: rationality_table(&annotated),
        eu_diff: eu_diff_table(&annotated),
        fold_rates: fold_rate_report(&annotated),
        histogram: utility_gap_histogram(&annotated, &cfg.histogram)?,
        fits: table,
        annotated,
        comparisons,
        diagnostics,
    })
}

/// Writes the report CSVs plus `diagnostics.json` into `dir`.
pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<Vec<PathBuf>> {
    let mut paths = write_reports(dir, &analysis.report_inputs())?;
    let diag = dir.join("diagnostics.json");
    write_json(&diag, &analysis.diagnostics)?;
    paths.push(diag);
    Ok(paths)
}

// ---------------------------------------------------------------- run

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub hands: usize,
    pub dropped_hands: usize,
    pub decisions: usize,
    pub choice_records: usize,
    pub clamped_payoffs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config: RunConfig,
    pub counts: RunCounts,
    pub artifacts: Vec<Artifact>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FAILED_DIR: &str = "failed";

/// Tracks every file a run writes so they can be hashed or, on failure,
/// moved aside.
struct Outputs {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn path(&mut self, rel: &str) -> PathBuf {
        let p = self.root.join(rel);
        self.written.push(p.clone());
        p
    }

    fn record(&mut self, paths: Vec<PathBuf>) {
        self.written.extend(paths);
    }

    fn relative(&self, p: &Path) -> String {
        let rel = p.strip_prefix(&self.root).unwrap_or(p);
        rel.components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/")
    }

    fn artifacts(&self) -> Result<Vec<Artifact>> {
        let mut paths: Vec<&PathBuf> = self.written.iter().collect();
        paths.sort();
        paths.dedup();
        paths
            .into_iter()
            .map(|p| {
                let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
                Ok(Artifact {
                    path: self.relative(p),
                    bytes: bytes.len() as u64,
                    sha256: hex::encode(Sha256::digest(&bytes)),
                })
            })
            .collect()
    }

    /// Moves everything written so far under `failed/` and records the error.
    fn quarantine(&self, stage: &str, err: &Error) {
        let failed = self.root.join(FAILED_DIR);
        for p in &self.written {
            if !p.exists() {
                continue;
            }
            let target = failed.join(self.relative(p));
            if let Some(parent) = target.parent() {
                let _ = fs::create_dir_all(parent);
            }
            if let Err(e) = fs::rename(p, &target) {
                log::warn!("could not move {} aside: {e}", p.display());
            }
        }
        let _ = fs::create_dir_all(&failed);
        let _ = fs::write(failed.join("error.txt"), format!("stage: {stage}\nerror: {err}\n"));
    }
}

fn stage<T>(name: &'static str, out: &Outputs, r: Result<T>) -> Result<T> {
    r.map_err(|e| {
        out.quarantine(name, &e);
        Error::Stage {
            stage: name,
            source: Box::new(e),
        }
    })
}

/// Runs every stage and writes all artifacts under `out_dir`:
///
/// ```text
/// config.json  hands.jsonl  ingest.json  decisions.jsonl  models.json
/// gambles.jsonl  fits/<agent>_<state>.json  reports/*.csv
/// reports/diagnostics.json  manifest.json
/// ```
///
/// On failure the files written so far move to `out_dir/failed/` next to an
/// `error.txt`, and the error names the stage.
pub fn run_pipeline(config: &RunConfig, out_dir: &Path) -> Result<Manifest> {
    let mut out = Outputs {
        root: out_dir.to_path_buf(),
        written: Vec::new(),
    };
    stage("setup", &out, fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e)))?;
    let cfg = config.seeded();
    let p = out.path("config.json");
    stage("setup", &out, write_json(&p, config))?;

    let (hands, ingest_report) = stage(
        "ingest",
        &out,
        (|| {
            let format = cfg.log_format()?;
            let aliases = match &cfg.alias_map {
                Some(path) => Some(AliasMap::from_json(
                    &fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
                )?),
                None => None,
            };
            let exclude: BTreeSet<String> = cfg.exclude_games.iter().cloned().collect();
            ingest(&cfg.inputs, &format, aliases.as_ref(), &exclude)
        })(),
    )?;
    let p = out.path("hands.jsonl");
    stage("ingest", &out, write_jsonl(&p, &hands))?;
    let p = out.path("ingest.json");
    stage("ingest", &out, write_json(&p, &ingest_report))?;

    let decisions = extract(&hands);
    let p = out.path("decisions.jsonl");
    stage("extract", &out, write_jsonl(&p, &decisions))?;

    let models: OutcomeModels = stage("fit-outcomes", &out, fit_outcome_models(&decisions, &cfg.outcome))?;
    let p = out.path("models.json");
    stage("fit-outcomes", &out, write_json(&p, &models))?;

    let (records, clamped) = stage("build-gambles", &out, build_choice_records(&models, &decisions))?;
    let p = out.path("gambles.jsonl");
    stage("build-gambles", &out, write_jsonl(&p, &records))?;

    let fits = stage("fit-rum", &out, fit_groups(&records, &cfg.fit))?;
    for f in &fits {
        let p = out.path(&format!("fits/{}", f.file_name()));
        stage("fit-rum", &out, write_json(&p, f))?;
    }

    let analysis = stage("analyze", &out, analyze(&records, &fits, &cfg.analysis()))?;
    let written = stage("analyze", &out, write_analysis(&out_dir.join("reports"), &analysis))?;
    out.record(written);

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        counts: RunCounts {
            hands: hands.len(),
            dropped_hands: ingest_report.dropped,
            decisions: decisions.len(),
            choice_records: records.len(),
            clamped_payoffs: clamped,
        },
        artifacts: stage("manifest", &out, out.artifacts())?,
    };
    stage("manifest", &out, write_json(&out_dir.join(MANIFEST_FILE), &manifest))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand_history::emit_canonical;
    use crate::synthetic::{generate_hand_log, HandSimConfig};

    fn small_config(dir: &Path) -> RunConfig {
        let hands = generate_hand_log(&HandSimConfig {
            games: 1,
            hands_per_game: 60,
            ..Default::default()
        })
        .unwrap();
        let log = dir.join("log.jsonl");
        fs::write(&log, emit_canonical(&hands).unwrap()).unwrap();
        let mut cfg = RunConfig {
            inputs: vec![log],
            ..Default::default()
        };
        cfg.fit.starts = 20;
        cfg.fit.valid_sample = 5;
        cfg.bootstrap.replicates = 20;
        cfg.outcome.win_model.epochs = 5;
        cfg
    }

    #[test]
    fn raw_format_without_alias_map_is_rejected() {
        let err = ingest(
            &[PathBuf::from("x.txt")],
            &LogFormat::PluribusRaw(RawTableConfig::default()),
            None,
            &BTreeSet::new(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("alias map"), "{err}");
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig {
            seed: 9,
            exclude_games: vec!["b1".into()],
            ..Default::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        assert_eq!(serde_json::from_str::<RunConfig>("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn small_run_lists_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        let out = dir.path().join("out");
        let manifest = run_pipeline(&cfg, &out).unwrap();
        let listed: BTreeSet<String> = manifest.artifacts.iter().map(|a| a.path.clone()).collect();
        let mut on_disk = BTreeSet::new();
        let mut stack = vec![out.clone()];
        while let Some(d) = stack.pop() {
            for e in fs::read_dir(d).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    let rel = p.strip_prefix(&out).unwrap().to_string_lossy().replace('\\', "/");
                    on_disk.insert(rel);
                }
            }
        }
        on_disk.remove(MANIFEST_FILE);
        assert_eq!(listed, on_disk);
        assert!(listed.contains("reports/table1.csv"));
    }

    #[test]
    fn failure_moves_outputs_aside() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_config(dir.path());
        cfg.inputs.push(dir.path().join("missing.jsonl"));
        let out = dir.path().join("out");
        let err = run_pipeline(&cfg, &out).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "ingest", .. }), "{err}");
        assert!(out.join("failed/config.json").exists());
        assert!(out.join("failed/error.txt").exists());
        assert!(!out.join("config.json").exists());
    }
}
