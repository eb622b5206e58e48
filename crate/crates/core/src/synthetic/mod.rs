//! Ground-truth generators: abstract gambles, simulated choices, recovery
//! experiments, and whole synthetic hand logs for end-to-end fixtures.

mod hands;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use hands::{generate_hand_log, HandSimConfig};

use crate::choice::{Agent, Choice, TriggerState};
use crate::error::{Error, Result};
use crate::outcome::{ChoiceRecord, RawPayoffs};
use crate::rng::{derive_seed, stream_rng};
use crate::rum::{choice_probability, classify_gamble, fit_rum, FitConfig, Gamble, GambleClass, Observation, OmegaGrid, RumParams};

/// Requested share of each gamble class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMix {
    pub mixed: f64,
    pub risk_dominant: f64,
    pub safe_dominant: f64,
}

impl ClassMix {
    pub const fn new(mixed: f64, risk_dominant: f64, safe_dominant: f64) -> Self {
        ClassMix {
            mixed,
            risk_dominant,
            safe_dominant,
        }
    }

    /// Row shares observed for the bot in the reference data.
    pub const REFERENCE: ClassMix = ClassMix::new(0.21, 0.23, 0.56);

    pub fn share(&self, class: GambleClass) -> f64 {
        match class {
            GambleClass::Mixed => self.mixed,
            GambleClass::RiskDominant => self.risk_dominant,
            GambleClass::SafeDominant => self.safe_dominant,
        }
    }

    /// Splits `n` into per-class counts by largest remainder.
    fn counts(&self, n: usize) -> Result<[usize; 3]> {
        let shares = GambleClass::ALL.map(|c| self.share(c));
        if shares.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InfeasibleMix(format!("negative or non-finite share in {self:?}")));
        }
        let total: f64 = shares.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InfeasibleMix(format!("shares sum to {total}, not 1")));
        }
        let exact = shares.map(|s| s * n as f64);
        let mut counts = exact.map(|e| e.floor() as usize);
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
        let mut left = n - counts.iter().sum::<usize>();
        for &i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            counts[i] += 1;
            left -= 1;
        }
        Ok(counts)
    }
}

impl Default for ClassMix {
    fn default() -> Self {
        ClassMix::REFERENCE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GambleGenConfig {
    pub count: usize,
    /// Range of the win probability.
    pub p_range: (f64, f64),
    /// Range of the (already normalized) payoffs; must stay ≥ 1. The default
    /// roughly spans normalized real payoffs; much narrower ranges leave ω and
    /// λ weakly identified.
    pub v_range: (f64, f64),
    pub mix: ClassMix,
    pub grid: OmegaGrid,
    /// Rejection-sampling budget per requested gamble.
    pub max_attempts: usize,
    pub seed: u64,
}

impl Default for GambleGenConfig {
    fn default() -> Self {
        GambleGenConfig {
            count: 1000,
            p_range: (0.05, 0.95),
            v_range: (1.0, 12.0),
            mix: ClassMix::REFERENCE,
            grid: OmegaGrid::default(),
            max_attempts: 10_000,
            seed: 0,
        }
    }
}

fn draw_gamble(rng: &mut impl Rng, cfg: &GambleGenConfig, class: GambleClass) -> Result<Gamble> {
    let (plo, phi) = cfg.p_range;
    let (vlo, vhi) = cfg.v_range;
    let p = rng.random_range(plo..=phi);
    let mut v = [0.0; 3];
    for x in &mut v {
        *x = rng.random_range(vlo..=vhi);
    }
    v.sort_by(f64::total_cmp);
    // Order the draws so the candidate can land in the requested class:
    // play straddles fold for mixed, sits above it for risk-dominant and
    // below it for safe-dominant. Classification still decides.
    let (vw, vl, vf) = match class {
        GambleClass::Mixed => (v[2], v[0], v[1]),
        GambleClass::RiskDominant => {
            if rng.random::<bool>() {
                (v[2], v[1], v[0])
            } else {
                (v[2], v[0], v[1])
            }
        }
        GambleClass::SafeDominant => {
            if rng.random::<bool>() {
                (v[1], v[0], v[2])
            } else {
                (v[2], v[0], v[1])
            }
        }
    };
    Gamble::win_lose(p, vw, vl, vf)
}

/// Draws gambles by rejection sampling until each class holds its share of
/// `count` (largest-remainder rounding), then shuffles them.
pub fn generate_gambles(cfg: &GambleGenConfig) -> Result<Vec<Gamble>> {
    let (plo, phi) = cfg.p_range;
    let (vlo, vhi) = cfg.v_range;
    if !(0.0 <= plo && plo <= phi && phi <= 1.0) {
        return Err(Error::InvalidInput(format!("bad probability range {:?}", cfg.p_range)));
    }
    if !(vlo > 0.0 && vlo <= vhi && vhi.is_finite()) {
        return Err(Error::InvalidInput(format!("payoff range {:?} must be positive", cfg.v_range)));
    }
    let counts = cfg.mix.counts(cfg.count)?;
    let mut out = Vec::with_capacity(cfg.count);
    for (class, want) in GambleClass::ALL.into_iter().zip(counts) {
        let mut rng = stream_rng(derive_seed(cfg.seed, "gambles"), class as u64);
        let budget = cfg.max_attempts.saturating_mul(want.max(1));
        let mut got = 0;
        let mut attempts = 0;
        while got < want {
            if attempts == budget {
                return Err(Error::InfeasibleMix(format!(
                    "found only {got} of {want} {} gambles in {attempts} draws from p {:?}, v {:?}",
                    class.as_str(),
                    cfg.p_range,
                    cfg.v_range
                )));
            }
            attempts += 1;
            let g = draw_gamble(&mut rng, cfg, class)?;
            if classify_gamble(&g, &cfg.grid)? == class {
                out.push(g);
                got += 1;
            }
        }
    }
    out.shuffle(&mut stream_rng(derive_seed(cfg.seed, "gamble-order"), 0));
    Ok(out)
}

/// Per-state ground-truth parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    pub neutral: RumParams,
    pub post_loss: RumParams,
    pub post_win: RumParams,
}

impl AgentProfile {
    pub fn uniform(params: RumParams) -> Self {
        AgentProfile {
            neutral: params,
            post_loss: params,
            post_win: params,
        }
    }

    pub fn params(&self, state: TriggerState) -> RumParams {
        match state {
            TriggerState::Neutral => self.neutral,
            TriggerState::PostLoss => self.post_loss,
            TriggerState::PostWin => self.post_win,
        }
    }

    pub fn check(&self) -> Result<()> {
        for s in TriggerState::ALL {
            let p = self.params(s);
            if !(p.lambda >= 0.0) || !p.lambda.is_finite() || !p.omega.is_finite() {
                return Err(Error::InvalidInput(format!("invalid {s} parameters {p:?}")));
            }
        }
        Ok(())
    }
}

/// Draws each choice from the model: play with probability
/// `choice_probability(g, profile[state])`.
pub fn simulate_agent(
    gambles: &[Gamble],
    profile: &AgentProfile,
    states: &[TriggerState],
    seed: u64,
) -> Result<Vec<Choice>> {
    if gambles.len() != states.len() {
        return Err(Error::DimensionMismatch {
            expected: gambles.len(),
            actual: states.len(),
        });
    }
    profile.check()?;
    let mut rng = stream_rng(derive_seed(seed, "simulate"), 0);
    gambles
        .iter()
        .zip(states)
        .map(|(g, &s)| {
            let p = choice_probability(g, profile.params(s))?;
            Ok(if rng.random::<f64>() < p {
                Choice::Play
            } else {
                Choice::Fold
            })
        })
        .collect()
}

/// Synthetic choice records: `n_per_state` gambles per trigger state, each
/// with a simulated choice. Payoffs are already on the normalized scale, so
/// the raw payoffs echo them.
pub fn simulate_records(
    agent: Agent,
    profile: &AgentProfile,
    n_per_state: usize,
    gen: &GambleGenConfig,
    seed: u64,
) -> Result<Vec<ChoiceRecord>> {
    let mut out = Vec::with_capacity(3 * n_per_state);
    for state in TriggerState::ALL {
        let cfg = GambleGenConfig {
            count: n_per_state,
            seed: derive_seed(seed, state.as_str()),
            ..gen.clone()
        };
        let gambles = generate_gambles(&cfg)?;
        let states = vec![state; gambles.len()];
        let choices = simulate_agent(&gambles, profile, &states, derive_seed(seed, state.as_str()))?;
        for (g, c) in gambles.into_iter().zip(choices) {
            let hand_index = out.len() as u32;
            let (play, fold) = (g.play(), g.fold());
            out.push(ChoiceRecord {
                agent,
                player: format!("sim-{}", agent.as_str()),
                game_id: "synthetic".into(),
                hand_index,
                seat: 1,
                sklansky: 1,
                trigger: state,
                choice: c,
                p_win: play[0].p,
                raw: RawPayoffs {
                    win: play[0].v,
                    lose: play[1].v,
                    fold: fold[0].v,
                },
                gamble: g,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRow {
    pub state: TriggerState,
    pub truth: RumParams,
    pub estimate: RumParams,
    pub omega_error: f64,
    pub lambda_relative_error: f64,
    pub n_valid: usize,
}

/// Generates, simulates and refits each state of `truth`.
pub fn recovery_experiment(
    truth: &AgentProfile,
    n_per_state: usize,
    gen: &GambleGenConfig,
    fit: &FitConfig,
    seed: u64,
) -> Result<Vec<RecoveryRow>> {
    if n_per_state < 1000 {
        return Err(Error::InvalidInput(format!(
            "recovery needs at least 1000 decisions per state, got {n_per_state}"
        )));
    }
    let records = simulate_records(Agent::Pluribus, truth, n_per_state, gen, seed)?;
    TriggerState::ALL
        .into_iter()
        .map(|state| {
            let obs: Vec<Observation> = records
                .iter()
                .filter(|r| r.trigger == state)
                .map(|r| Observation::new(r.gamble.clone(), r.choice))
                .collect();
            let cfg = FitConfig {
                seed: derive_seed(seed, state.as_str()),
                ..fit.clone()
            };
            let f = fit_rum(&obs, &cfg)?;
            let t = truth.params(state);
            Ok(RecoveryRow {
                state,
                truth: t,
                estimate: f.params(),
                omega_error: f.omega_mean - t.omega,
                lambda_relative_error: f.lambda_mean / t.lambda - 1.0,
                n_valid: f.n_valid,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn realized_mix(gs: &[Gamble]) -> [f64; 3] {
        let grid = OmegaGrid::default();
        let mut c = [0.0; 3];
        for g in gs {
            c[classify_gamble(g, &grid).unwrap() as usize] += 1.0;
        }
        c.map(|x| x / gs.len() as f64)
    }

    #[test]
    fn all_safe_request() {
        let cfg = GambleGenConfig {
            count: 200,
            mix: ClassMix::new(0.0, 0.0, 1.0),
            ..Default::default()
        };
        let gs = generate_gambles(&cfg).unwrap();
        assert_eq!(gs.len(), 200);
        assert_eq!(realized_mix(&gs)[GambleClass::SafeDominant as usize], 1.0);
    }

    #[test]
    fn reference_mix_is_met() {
        let gs = generate_gambles(&GambleGenConfig { count: 1000, ..Default::default() }).unwrap();
        let mix = realized_mix(&gs);
        for class in GambleClass::ALL {
            assert!((mix[class as usize] - ClassMix::REFERENCE.share(class)).abs() <= 0.05);
        }
    }

    #[test]
    fn same_seed_same_gambles() {
        let cfg = GambleGenConfig { count: 100, seed: 9, ..Default::default() };
        assert_eq!(generate_gambles(&cfg).unwrap(), generate_gambles(&cfg).unwrap());
    }

    #[test]
    fn infeasible_mix() {
        // identical payoffs everywhere can only produce ties
        let cfg = GambleGenConfig {
            count: 10,
            v_range: (2.0, 2.0),
            max_attempts: 50,
            ..Default::default()
        };
        assert!(matches!(generate_gambles(&cfg), Err(Error::InfeasibleMix(_))));
        let bad = GambleGenConfig {
            mix: ClassMix::new(0.5, 0.5, 0.5),
            ..Default::default()
        };
        assert!(matches!(generate_gambles(&bad), Err(Error::InfeasibleMix(_))));
    }

    #[test]
    fn coin_flip_agent() {
        let g = Gamble::win_lose(0.5, 3.0, 1.0, 2.0).unwrap();
        let gs = vec![g; 10_000];
        let states = vec![TriggerState::Neutral; gs.len()];
        let choices = simulate_agent(&gs, &AgentProfile::uniform(RumParams::new(0.3, 0.0)), &states, 1).unwrap();
        let rate = choices.iter().filter(|c| **c == Choice::Play).count() as f64 / 1e4;
        assert!((rate - 0.5).abs() <= 0.02, "{rate}");
    }

    #[test]
    fn sharp_agent_folds_safe_gambles() {
        let cfg = GambleGenConfig {
            count: 10_000,
            mix: ClassMix::new(0.0, 0.0, 1.0),
            ..Default::default()
        };
        let gs = generate_gambles(&cfg).unwrap();
        let states = vec![TriggerState::PostLoss; gs.len()];
        let choices = simulate_agent(&gs, &AgentProfile::uniform(RumParams::new(0.5, 1000.0)), &states, 2).unwrap();
        let rate = choices.iter().filter(|c| **c == Choice::Play).count() as f64 / gs.len() as f64;
        assert!(rate < 0.01, "{rate}");
    }

    #[test]
    fn per_gamble_frequency_matches_probability() {
        let profile = AgentProfile::uniform(RumParams::new(0.4, 3.0));
        for (i, g) in [
            Gamble::win_lose(0.3, 4.0, 1.0, 2.0).unwrap(),
            Gamble::win_lose(0.7, 2.5, 1.2, 1.8).unwrap(),
        ]
        .into_iter()
        .enumerate()
        {
            let p = choice_probability(&g, profile.neutral).unwrap();
            let n = 10_000.0;
            let gs = vec![g; n as usize];
            let states = vec![TriggerState::Neutral; gs.len()];
            let choices = simulate_agent(&gs, &profile, &states, 10 + i as u64).unwrap();
            let rate = choices.iter().filter(|c| **c == Choice::Play).count() as f64 / n;
            let half_width = 2.576 * (p * (1.0 - p) / n).sqrt();
            assert!((rate - p).abs() <= half_width, "rate {rate} vs p {p}");
        }
    }
}
