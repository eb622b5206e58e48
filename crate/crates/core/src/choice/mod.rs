//! Pre-flop play/fold decisions extracted from hand records.

mod extract;
mod sklansky;
mod trigger;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hand_history::{Chips, PLURIBUS_ID};

pub use extract::extract_preflop_decisions;
pub use sklansky::{sklansky_rank, WEAKEST_GROUP};
pub use trigger::{label_trigger_states, pool_humans};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agent {
    Pluribus,
    Human,
}

impl Agent {
    pub const ALL: [Agent; 2] = [Agent::Pluribus, Agent::Human];

    pub fn of_player(player: &str) -> Agent {
        if player == PLURIBUS_ID {
            Agent::Pluribus
        } else {
            Agent::Human
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Agent::Pluribus => "pluribus",
            Agent::Human => "human",
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Agent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pluribus" => Ok(Agent::Pluribus),
            "human" => Ok(Agent::Human),
            _ => Err(Error::InvalidInput(format!("unknown agent `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerState {
    Neutral,
    PostLoss,
    PostWin,
}

impl TriggerState {
    pub const ALL: [TriggerState; 3] = [
        TriggerState::Neutral,
        TriggerState::PostLoss,
        TriggerState::PostWin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TriggerState::Neutral => "neutral",
            TriggerState::PostLoss => "post_loss",
            TriggerState::PostWin => "post_win",
        }
    }
}

impl fmt::Display for TriggerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TriggerState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "neutral" | "post_neutral" => Ok(TriggerState::Neutral),
            "post_loss" => Ok(TriggerState::PostLoss),
            "post_win" => Ok(TriggerState::PostWin),
            _ => Err(Error::InvalidInput(format!("unknown trigger state `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Play,
    Fold,
}

impl Choice {
    pub fn as_str(self) -> &'static str {
        match self {
            Choice::Play => "play",
            Choice::Fold => "fold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedOutcome {
    pub won: bool,
    /// Signed chips won or lost over the hand.
    pub amount: Chips,
}

/// One player's play/fold situation before the flop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreflopDecision {
    pub agent: Agent,
    pub player: String,
    pub game_id: String,
    pub hand_index: u32,
    pub seat: u8,
    /// Absent when the log has no hole cards for this player.
    pub sklansky: Option<u8>,
    pub choice: Choice,
    pub trigger: TriggerState,
    /// The player never acted pre-flop (everyone folded to the big blind).
    pub forced: bool,
    /// Chips in the pot when the player made their final pre-flop action.
    pub preflop_pot: Chips,
    /// Chips the player had committed at that point.
    pub own_contribution: Chips,
    /// Players not yet folded at that point, the decision maker included.
    pub n_active: u32,
    pub small_blind: Chips,
    pub big_blind: Chips,
    /// Final pot of the hand.
    pub hand_pot: Chips,
    pub outcome: RealizedOutcome,
}

impl PreflopDecision {
    /// Usable for model fitting: has a rank and was a voluntary choice.
    pub fn is_fittable(&self) -> bool {
        self.sklansky.is_some() && !self.forced
    }
}
