//! Models for what a player stands to gain pre-flop: the probability of
//! winning the hand, the chip amounts at stake, and the mapping of those
//! amounts onto a positive utility scale.

mod features;
mod normalize;
mod payoff;
mod win_model;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use features::{FeatureEncoder, FeatureVector, N_SEATS, N_SKLANSKY};
pub use normalize::NormalizationSpec;
pub use payoff::{fit_payoff_models, PayoffModels, Regression};
pub use win_model::{fit_win_model, train, Network, TrainingSet, WinModel, WinModelConfig, WinModelKind};

use crate::choice::{Agent, Choice, PreflopDecision, TriggerState};
use crate::error::{Error, Result};
use crate::rum::{Gamble, Outcome};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Normalized payoffs below this floor are raised to it.
pub const PAYOFF_FLOOR: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutcomeConfig {
    pub win_model: WinModelConfig,
}

/// Everything needed to turn a decision into a gamble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeModels {
    pub version: u32,
    pub win: WinModel,
    pub payoff: PayoffModels,
    pub norm: NormalizationSpec,
}

/// Chip payoffs before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawPayoffs {
    pub win: f64,
    pub lose: f64,
    pub fold: f64,
}

pub fn raw_payoffs(d: &PreflopDecision, payoff: &PayoffModels) -> Result<RawPayoffs> {
    Ok(RawPayoffs {
        win: payoff.predict_win_amount(d)?,
        lose: -payoff.predict_loss_amount(d)?,
        fold: -(d.own_contribution as f64),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltGamble {
    pub gamble: Gamble,
    pub p_win: f64,
    pub raw: RawPayoffs,
    /// How many of the three payoffs were raised to [`PAYOFF_FLOOR`].
    pub clamped: usize,
}

/// Play is `{(p, v_win), (1 − p, v_lose)}`; fold is `{(1, v_fold)}` with the
/// fold payoff being the chips already committed, lost for sure.
pub fn build_gamble(
    d: &PreflopDecision,
    win: &WinModel,
    payoff: &PayoffModels,
    norm: &NormalizationSpec,
) -> Result<BuiltGamble> {
    let p_win = win.predict_decision(d)?;
    let raw = raw_payoffs(d, payoff)?;
    let mut clamped = 0;
    let mut scale = |v: f64| -> Result<f64> {
        let n = norm.apply(v);
        if !n.is_finite() {
            return Err(Error::NonFinite("normalized payoff"));
        }
        if n < 1.0 {
            clamped += 1;
            Ok(PAYOFF_FLOOR)
        } else {
            Ok(n)
        }
    };
    let (vw, vl, vf) = (scale(raw.win)?, scale(raw.lose)?, scale(raw.fold)?);
    let gamble = Gamble::new(
        [Outcome::new(p_win, vw), Outcome::new(1.0 - p_win, vl)],
        Outcome::new(1.0, vf),
    )?;
    Ok(BuiltGamble {
        gamble,
        p_win,
        raw,
        clamped,
    })
}

impl OutcomeModels {
    pub fn check(&self) -> Result<()> {
        if self.version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "model format version {} (expected {MODEL_FORMAT_VERSION})",
                self.version
            )));
        }
        self.win.check()
    }

    pub fn build_gamble(&self, d: &PreflopDecision) -> Result<BuiltGamble> {
        build_gamble(d, &self.win, &self.payoff, &self.norm)
    }
}

/// Fits the win model and the payoff regressions (concurrently), then the
/// normalization on the pooled raw payoffs of every fittable decision.
pub fn fit_outcome_models(decisions: &[PreflopDecision], cfg: &OutcomeConfig) -> Result<OutcomeModels> {
    let (win, payoff) = rayon::join(
        || fit_win_model(decisions, &cfg.win_model),
        || fit_payoff_models(decisions),
    );
    let (win, payoff) = (win?, payoff?);
    let mut pooled = Vec::new();
    for d in decisions.iter().filter(|d| d.is_fittable()) {
        let r = raw_payoffs(d, &payoff)?;
        pooled.extend([r.win, r.lose, r.fold]);
    }
    let norm = NormalizationSpec::fit(&pooled)?;
    Ok(OutcomeModels {
        version: MODEL_FORMAT_VERSION,
        win,
        payoff,
        norm,
    })
}

/// A fittable decision with the gamble it was made over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub agent: Agent,
    pub player: String,
    pub game_id: String,
    pub hand_index: u32,
    pub seat: u8,
    pub sklansky: u8,
    pub trigger: TriggerState,
    pub choice: Choice,
    pub p_win: f64,
    pub raw: RawPayoffs,
    pub gamble: Gamble,
}

/// Builds a gamble for every fittable decision, in input order. Returns the
/// records and the total number of clamped payoffs.
pub fn build_choice_records(
    models: &OutcomeModels,
    decisions: &[PreflopDecision],
) -> Result<(Vec<ChoiceRecord>, usize)> {
    let built: Vec<(ChoiceRecord, usize)> = decisions
        .par_iter()
        .filter(|d| d.is_fittable())
        .map(|d| {
            let b = models.build_gamble(d)?;
            Ok((
                ChoiceRecord {
                    agent: d.agent,
                    player: d.player.clone(),
                    game_id: d.game_id.clone(),
                    hand_index: d.hand_index,
                    seat: d.seat,
                    sklansky: d.sklansky.expect("fittable decisions carry a strength group"),
                    trigger: d.trigger,
                    choice: d.choice,
                    p_win: b.p_win,
                    raw: b.raw,
                    gamble: b.gamble,
                },
                b.clamped,
            ))
        })
        .collect::<Result<_>>()?;
    let clamps = built.iter().map(|(_, c)| c).sum();
    if clamps > 0 {
        log::warn!("{clamps} normalized payoffs below 1 were clamped to {PAYOFF_FLOOR}");
    }
    Ok((built.into_iter().map(|(r, _)| r).collect(), clamps))
}
