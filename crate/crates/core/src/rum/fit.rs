//! Multi-start maximum-likelihood estimation of `(ω, λ)`.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gamble::RumParams;
use super::likelihood::{LikelihoodData, Observation};
use super::optimize::{minimize_bounded, ConvergenceStatus, Minimum, OptimizerOptions};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Number of random starting points.
    pub starts: usize,
    /// Valid convergences drawn to form the reported mean and sd.
    pub valid_sample: usize,
    pub seed: u64,
    pub omega_bounds: (f64, f64),
    pub lambda_bounds: (f64, f64),
    pub gradient_tol: f64,
    pub max_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            starts: 200,
            valid_sample: 35,
            seed: 0,
            omega_bounds: (-5.0, 5.0),
            lambda_bounds: (0.01, 1000.0),
            gradient_tol: 1e-6,
            max_iterations: 500,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        let (olo, ohi) = self.omega_bounds;
        let (llo, lhi) = self.lambda_bounds;
        if !(olo < ohi) || !(llo > 0.0 && llo < lhi) || !lhi.is_finite() || !olo.is_finite() || !ohi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bad fit bounds: omega {:?}, lambda {:?}",
                self.omega_bounds, self.lambda_bounds
            )));
        }
        if self.valid_sample == 0 {
            return Err(Error::InvalidInput("valid_sample must be positive".into()));
        }
        Ok(())
    }

    fn lower(&self) -> [f64; 2] {
        [self.omega_bounds.0, self.lambda_bounds.0.ln()]
    }

    fn upper(&self) -> [f64; 2] {
        [self.omega_bounds.1, self.lambda_bounds.1.ln()]
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartResult {
    pub index: usize,
    pub start: RumParams,
    pub estimate: RumParams,
    /// Total log-likelihood at the estimate; `None` if it was not finite.
    pub log_likelihood: Option<f64>,
    pub gradient_norm: Option<f64>,
    pub iterations: usize,
    pub status: ConvergenceStatus,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RumFit {
    pub n_observations: usize,
    pub starts: Vec<StartResult>,
    pub n_valid: usize,
    /// Indices into `starts` of the valid runs that were averaged.
    pub sampled: Vec<usize>,
    pub omega_mean: f64,
    pub omega_sd: f64,
    pub lambda_mean: f64,
    pub lambda_sd: f64,
    pub log_likelihood_at_mean: f64,
}

impl RumFit {
    pub fn params(&self) -> RumParams {
        RumParams::new(self.omega_mean, self.lambda_mean)
    }

    /// Estimate of the best-scoring valid start.
    pub fn best(&self) -> Option<&StartResult> {
        self.starts
            .iter()
            .filter(|s| s.valid)
            .max_by(|a, b| a.log_likelihood.partial_cmp(&b.log_likelihood).unwrap())
    }
}

fn interior(x: f64, lo: f64, hi: f64) -> bool {
    let margin = 1e-6 * (hi - lo);
    x > lo + margin && x < hi - margin
}

fn run_start(data: &LikelihoodData, cfg: &FitConfig, index: usize, start: RumParams) -> StartResult {
    let n = data.len() as f64;
    let lo = cfg.lower();
    let hi = cfg.upper();
    // minimize the mean negative log-likelihood in (ω, ln λ)
    let objective = |x: &[f64]| {
        let (v, g) = data.value_and_gradient(x[0], x[1]);
        (-v / n, vec![-g[0] / n, -g[1] / n])
    };
    let x0 = [start.omega, start.lambda.ln()];
    let m = minimize_bounded(
        objective,
        &x0,
        &lo,
        &hi,
        OptimizerOptions {
            gradient_tol: cfg.gradient_tol,
            max_iterations: cfg.max_iterations,
        },
    );
    let m = if m.status == ConvergenceStatus::Converged && is_flat(&objective, &m.x) {
        escape_flat(&objective, m, &lo, &hi)
    } else {
        m
    };
    let ll = -m.value * n;
    let gnorm = m.gradient_norm();
    let finite = ll.is_finite() && gnorm.is_finite();
    let valid = finite
        && m.status == ConvergenceStatus::Converged
        && gnorm <= cfg.gradient_tol
        && interior(m.x[0], lo[0], hi[0])
        && interior(m.x[1], lo[1], hi[1]);
    StartResult {
        index,
        start,
        estimate: RumParams::new(m.x[0], m.x[1].exp()),
        log_likelihood: ll.is_finite().then_some(ll),
        gradient_norm: gnorm.is_finite().then_some(gnorm),
        iterations: m.iterations,
        status: m.status,
        valid,
    }
}

/// Smallest curvature accepted at an interior stationary point of the mean
/// negative log-likelihood.
const MIN_CURVATURE: f64 = 1e-10;

/// True when the Hessian (central differences of the gradient) has no
/// meaningful positive curvature, as happens when the gradient has
/// underflowed on a plateau rather than at an optimum.
fn is_flat<F: Fn(&[f64]) -> (f64, Vec<f64>)>(f: &F, x: &[f64]) -> bool {
    let h = 1e-5;
    let mut hess = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut up = x.to_vec();
        let mut down = x.to_vec();
        up[j] += h;
        down[j] -= h;
        let (gu, gd) = (f(&up).1, f(&down).1);
        for i in 0..2 {
            hess[i][j] = (gu[i] - gd[i]) / (2.0 * h);
        }
    }
    let off = 0.5 * (hess[0][1] + hess[1][0]);
    let (a, d) = (hess[0][0], hess[1][1]);
    let min_eig = 0.5 * (a + d) - (0.25 * (a - d).powi(2) + off * off).sqrt();
    !(min_eig > MIN_CURVATURE)
}

/// Follows the descent ray from a plateau with geometrically growing steps
/// for as long as the objective does not increase.
fn escape_flat<F: Fn(&[f64]) -> (f64, Vec<f64>)>(f: &F, mut m: Minimum, lo: &[f64; 2], hi: &[f64; 2]) -> Minimum {
    let gnorm = m.gradient_norm();
    let dir: Vec<f64> = m.gradient.iter().map(|g| -g / gnorm).collect();
    let mut t = 0.1;
    for _ in 0..if gnorm > 0.0 { 200 } else { 0 } {
        let trial: Vec<f64> = (0..2).map(|i| (m.x[i] + t * dir[i]).clamp(lo[i], hi[i])).collect();
        if trial == m.x {
            break;
        }
        let (v, g) = f(&trial);
        if !(v <= m.value) {
            break;
        }
        m.x = trial;
        m.value = v;
        m.gradient = g;
        t *= 2.0;
    }
    let on_bound = (0..2).any(|i| m.x[i] <= lo[i] || m.x[i] >= hi[i]);
    m.status = if on_bound {
        ConvergenceStatus::Boundary
    } else {
        ConvergenceStatus::Flat
    };
    m
}

/// Runs the warm starts followed by `cfg.starts` random starts drawn
/// uniformly inside the bounds. Never fails; each run reports its status.
pub fn fit_multistart(data: &LikelihoodData, cfg: &FitConfig, warm: &[RumParams]) -> Vec<StartResult> {
    let (lo, hi) = (cfg.lower(), cfg.upper());
    let mut starts: Vec<RumParams> = warm
        .iter()
        .map(|p| RumParams::new(p.omega.clamp(lo[0], hi[0]), p.lambda.ln().clamp(lo[1], hi[1]).exp()))
        .collect();
    let seed = derive_seed(cfg.seed, "rum-starts");
    starts.extend((0..cfg.starts).map(|i| {
        let mut rng = stream_rng(seed, i as u64);
        RumParams::new(rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1]).exp())
    }));
    starts
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| run_start(data, cfg, i, s))
        .collect()
}

/// Summarizes multistart results: draws `valid_sample` valid convergences
/// (all of them if fewer) and reports their mean and sample sd.
pub fn summarize_starts(data: &LikelihoodData, cfg: &FitConfig, starts: Vec<StartResult>) -> Result<RumFit> {
    let valid: Vec<usize> = starts.iter().filter(|s| s.valid).map(|s| s.index).collect();
    if valid.is_empty() {
        let mut counts = std::collections::BTreeMap::new();
        for s in &starts {
            *counts.entry(format!("{:?}", s.status)).or_insert(0usize) += 1;
        }
        let summary = counts
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::NoValidConvergence {
            starts: starts.len(),
            summary,
        });
    }
    let k = cfg.valid_sample.min(valid.len());
    let mut rng = stream_rng(derive_seed(cfg.seed, "rum-valid-sample"), 0);
    let mut sampled: Vec<usize> = sample(&mut rng, valid.len(), k).into_iter().map(|i| valid[i]).collect();
    sampled.sort_unstable();

    let omegas: Vec<f64> = sampled.iter().map(|&i| starts[i].estimate.omega).collect();
    let lambdas: Vec<f64> = sampled.iter().map(|&i| starts[i].estimate.lambda).collect();
    let (omega_mean, omega_sd) = mean_sd(&omegas);
    let (lambda_mean, lambda_sd) = mean_sd(&lambdas);
    Ok(RumFit {
        n_observations: data.len(),
        n_valid: valid.len(),
        log_likelihood_at_mean: data.log_likelihood(RumParams::new(omega_mean, lambda_mean)),
        starts,
        sampled,
        omega_mean,
        omega_sd,
        lambda_mean,
        lambda_sd,
    })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fits `(ω, λ)` to prepared data, with optional warm starts.
pub fn fit_prepared(data: &LikelihoodData, cfg: &FitConfig, warm: &[RumParams]) -> Result<RumFit> {
    cfg.validate()?;
    if cfg.starts + warm.len() == 0 {
        return Err(Error::InvalidInput("at least one start is required".into()));
    }
    let starts = fit_multistart(data, cfg, warm);
    summarize_starts(data, cfg, starts)
}

/// Fits `(ω, λ)` by multi-start maximum likelihood.
pub fn fit_rum(observations: &[Observation], cfg: &FitConfig) -> Result<RumFit> {
    let data = LikelihoodData::new(observations)?;
    fit_prepared(&data, cfg, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::Choice;
    use crate::rum::{choice_probability, Gamble};

    fn simulated(truth: RumParams, n: usize, seed: u64) -> Vec<Observation> {
        let mut rng = stream_rng(seed, 0);
        (0..n)
            .map(|_| {
                let g = Gamble::win_lose(
                    rng.random_range(0.1..0.9),
                    rng.random_range(1.0..6.0),
                    rng.random_range(1.0..3.0),
                    rng.random_range(1.0..4.0),
                )
                .unwrap();
                let p = choice_probability(&g, truth).unwrap();
                let choice = if rng.random::<f64>() < p { Choice::Play } else { Choice::Fold };
                Observation::new(g, choice)
            })
            .collect()
    }

    fn small_cfg() -> FitConfig {
        FitConfig {
            starts: 20,
            valid_sample: 10,
            seed: 3,
            ..FitConfig::default()
        }
    }

    #[test]
    fn recovers_parameters_from_simulated_choices() {
        let truth = RumParams::new(0.5, 4.0);
        let obs = simulated(truth, 4000, 1);
        let fit = fit_rum(&obs, &small_cfg()).unwrap();
        assert!(fit.n_valid > 0);
        assert!((fit.omega_mean - truth.omega).abs() < 0.3, "{fit:?}");
        assert!((fit.lambda_mean / truth.lambda - 1.0).abs() < 0.35, "{}", fit.lambda_mean);
    }

    #[test]
    fn valid_starts_agree_and_have_small_gradient() {
        let obs = simulated(RumParams::new(-0.5, 2.0), 1500, 2);
        let fit = fit_rum(&obs, &small_cfg()).unwrap();
        for s in fit.starts.iter().filter(|s| s.valid) {
            assert!(s.gradient_norm.unwrap() <= 1e-6);
            assert!((s.estimate.omega - fit.omega_mean).abs() < 1e-3);
        }
        assert!(fit.omega_sd < 1e-3);
        assert_eq!(fit.sampled.len(), fit.n_valid.min(10));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let obs = simulated(RumParams::new(0.2, 3.0), 500, 4);
        let a = fit_rum(&obs, &small_cfg()).unwrap();
        let b = fit_rum(&obs, &small_cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn all_folds_on_safe_gambles_end_on_a_bound() {
        // folding is always better here, so the likelihood keeps improving
        // as λ grows and no interior optimum exists
        let g = Gamble::win_lose(0.4, 2.0, 1.0, 2.0).unwrap();
        let obs: Vec<_> = (0..50).map(|_| Observation::new(g.clone(), Choice::Fold)).collect();
        let err = fit_rum(&obs, &small_cfg()).unwrap_err();
        assert!(matches!(err, Error::NoValidConvergence { starts: 20, .. }), "{err}");
        let data = LikelihoodData::new(&obs).unwrap();
        let runs = fit_multistart(&data, &small_cfg(), &[]);
        let on_bound = runs.iter().filter(|s| s.status == ConvergenceStatus::Boundary).count();
        assert!(on_bound >= 15, "{runs:#?}");
    }

    #[test]
    fn no_valid_convergence_is_reported_with_summary() {
        let obs = simulated(RumParams::new(0.0, 2.0), 200, 6);
        let cfg = FitConfig { max_iterations: 1, ..small_cfg() };
        match fit_rum(&obs, &cfg) {
            Err(Error::NoValidConvergence { starts, summary }) => {
                assert_eq!(starts, 20);
                assert!(summary.contains("MaxIterations"), "{summary}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn warm_start_comes_first() {
        let obs = simulated(RumParams::new(0.0, 2.0), 300, 5);
        let data = LikelihoodData::new(&obs).unwrap();
        let cfg = FitConfig { starts: 0, ..small_cfg() };
        let res = fit_multistart(&data, &cfg, &[RumParams::new(0.1, 2.0)]);
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].start, RumParams::new(0.1, 2.0));
    }
}
