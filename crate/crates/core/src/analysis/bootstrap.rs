use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::rum::{fit_prepared, FitConfig, LikelihoodData, RumParams};

/// Identifier recorded with every comparison.
pub const BOOTSTRAP_METHOD: &str = "decision-bootstrap-centered";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Omega,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub replicates: usize,
    /// Random starts per refit, in addition to a warm start at the
    /// full-sample estimate.
    pub random_starts: usize,
    /// Largest tolerated share of refits without a valid convergence.
    pub max_failure_rate: f64,
    pub seed: u64,
    pub fit: FitConfig,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 500,
            random_starts: 0,
            max_failure_rate: 0.2,
            seed: 0,
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub parameter: Parameter,
    pub group_a: String,
    pub group_b: String,
    pub estimate_a: f64,
    pub estimate_b: f64,
    /// `a − b` (for λ, of the logarithms).
    pub delta: f64,
    pub ratio: f64,
    pub p_value: f64,
    pub method: String,
    pub replicates: usize,
    pub failed: usize,
}

fn refit(data: &LikelihoodData, warm: RumParams, cfg: &BootstrapConfig, seed: u64) -> Option<RumParams> {
    let fit_cfg = FitConfig {
        starts: cfg.random_starts,
        seed,
        ..cfg.fit.clone()
    };
    fit_prepared(data, &fit_cfg, &[warm]).ok().map(|f| f.params())
}

fn resample(data: &LikelihoodData, rng: &mut impl Rng) -> LikelihoodData {
    let n = data.len();
    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    data.resample(&idx)
}

fn scale(p: Parameter, params: RumParams) -> f64 {
    match p {
        Parameter::Omega => params.omega,
        Parameter::Lambda => params.lambda.ln(),
    }
}

/// Tests `θ_a = θ_b` for ω and λ by resampling decisions within each group
/// and refitting. The two-sided p-value counts replicate deltas at least as
/// far from the observed delta as the observed delta is from zero:
/// `(1 + #{|Δ* − Δ̂| ≥ |Δ̂|}) / (B + 1)`, over successful replicates.
pub fn compare_parameters(
    (label_a, data_a, fit_a): (&str, &LikelihoodData, RumParams),
    (label_b, data_b, fit_b): (&str, &LikelihoodData, RumParams),
    cfg: &BootstrapConfig,
) -> Result<[ComparisonResult; 2]> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidInput("bootstrap needs at least one replicate".into()));
    }
    let seed = derive_seed(cfg.seed, "bootstrap");
    let draws: Vec<Option<(RumParams, RumParams)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let a = resample(data_a, &mut rng);
            let b = resample(data_b, &mut rng);
            let fit_seed = rng.random();
            Some((refit(&a, fit_a, cfg, fit_seed)?, refit(&b, fit_b, cfg, fit_seed)?))
        })
        .collect();
    let ok: Vec<(RumParams, RumParams)> = draws.iter().flatten().copied().collect();
    let failed = cfg.replicates - ok.len();
    if failed as f64 > cfg.max_failure_rate * cfg.replicates as f64 {
        return Err(Error::BootstrapFailure {
            failed,
            replicates: cfg.replicates,
        });
    }
    let result = |p: Parameter| {
        let observed = scale(p, fit_a) - scale(p, fit_b);
        let extreme = ok
            .iter()
            .filter(|(a, b)| (scale(p, *a) - scale(p, *b) - observed).abs() >= observed.abs())
            .count();
        let (ea, eb) = match p {
            Parameter::Omega => (fit_a.omega, fit_b.omega),
            Parameter::Lambda => (fit_a.lambda, fit_b.lambda),
        };
        ComparisonResult {
            parameter: p,
            group_a: label_a.to_string(),
            group_b: label_b.to_string(),
            estimate_a: ea,
            estimate_b: eb,
            delta: observed,
            ratio: ea / eb,
            p_value: (1 + extreme) as f64 / (ok.len() + 1) as f64,
            method: BOOTSTRAP_METHOD.to_string(),
            replicates: cfg.replicates,
            failed,
        }
    };
    Ok([result(Parameter::Omega), result(Parameter::Lambda)])
}
