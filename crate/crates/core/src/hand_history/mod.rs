//! Hand records, log parsing and alias reconciliation.

mod alias;
mod canonical;
mod pluribus;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cards::Card;
use crate::error::{Error, Result};

pub use alias::{exclude_games, normalize_aliases, AliasMap};
pub use canonical::{emit_canonical, emit_canonical_line};
pub use pluribus::RawTableConfig;
pub use validate::{validate_hands, DiagnosticKind, HandDiagnostic};

/// Chip amounts. All logs in scope use integral chips.
pub type Chips = i64;

/// The canonical player id of the AI agent.
pub const PLURIBUS_ID: &str = "Pluribus";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Fold,
    Check,
    Call,
    Bet,
    Raise,
    AllIn,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Fold => "fold",
            ActionKind::Check => "check",
            ActionKind::Call => "call",
            ActionKind::Bet => "bet",
            ActionKind::Raise => "raise",
            ActionKind::AllIn => "all-in",
        }
    }

    /// Fold and check never move chips.
    pub fn is_passive(self) -> bool {
        matches!(self, ActionKind::Fold | ActionKind::Check)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One betting action. `amount` is the number of chips this action adds to
/// the pot (not the "raise to" total).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(String, ActionKind, Chips)", into = "(String, ActionKind, Chips)")]
pub struct Action {
    pub player: String,
    pub kind: ActionKind,
    pub amount: Chips,
}

impl Action {
    pub fn new(player: impl Into<String>, kind: ActionKind, amount: Chips) -> Self {
        Action {
            player: player.into(),
            kind,
            amount,
        }
    }
}

impl From<(String, ActionKind, Chips)> for Action {
    fn from((player, kind, amount): (String, ActionKind, Chips)) -> Self {
        Action {
            player,
            kind,
            amount,
        }
    }
}

impl From<Action> for (String, ActionKind, Chips) {
    fn from(a: Action) -> Self {
        (a.player, a.kind, a.amount)
    }
}

/// One complete hand.
///
/// Seat 1 posts the small blind and seat 2 the big blind before any recorded
/// action; blinds are therefore not listed in `actions`. `actions[0]` is the
/// pre-flop round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandRecord {
    pub game_id: String,
    pub hand_index: u32,
    pub small_blind: Chips,
    pub big_blind: Chips,
    pub seats: BTreeMap<String, u8>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hole_cards: BTreeMap<String, [Card; 2]>,
    pub actions: Vec<Vec<Action>>,
    pub net_result: BTreeMap<String, Chips>,
    /// Parsed when present; stacks reset every hand so nothing downstream reads them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stacks: Option<BTreeMap<String, Chips>>,
}

impl HandRecord {
    /// Players ordered by seat.
    pub fn players(&self) -> Vec<&str> {
        let mut v: Vec<(&u8, &str)> = self.seats.iter().map(|(p, s)| (s, p.as_str())).collect();
        v.sort();
        v.into_iter().map(|(_, p)| p).collect()
    }

    pub fn player_in_seat(&self, seat: u8) -> Option<&str> {
        self.seats
            .iter()
            .find(|(_, &s)| s == seat)
            .map(|(p, _)| p.as_str())
    }

    /// Forced blind posted by `player` (0 outside seats 1 and 2).
    pub fn blind_for(&self, player: &str) -> Chips {
        match self.seats.get(player) {
            Some(1) => self.small_blind,
            Some(2) => self.big_blind,
            _ => 0,
        }
    }

    /// Total chips each player put in the pot over the whole hand.
    pub fn contributions(&self) -> BTreeMap<&str, Chips> {
        let mut out: BTreeMap<&str, Chips> = self
            .seats
            .keys()
            .map(|p| (p.as_str(), self.blind_for(p)))
            .collect();
        for action in self.actions.iter().flatten() {
            *out.entry(action.player.as_str()).or_insert(0) += action.amount;
        }
        out
    }

    /// Sum of all positive contributions, blinds included.
    pub fn pot_total(&self) -> Chips {
        self.contributions().values().filter(|&&c| c > 0).sum()
    }

    pub fn preflop_actions(&self) -> &[Action] {
        self.actions.first().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Rewrites every player id through `f`.
    pub fn map_players(&self, mut f: impl FnMut(&str) -> String) -> HandRecord {
        let rekey = |m: &BTreeMap<String, Chips>, f: &mut dyn FnMut(&str) -> String| {
            m.iter().map(|(k, v)| (f(k), *v)).collect::<BTreeMap<_, _>>()
        };
        HandRecord {
            game_id: self.game_id.clone(),
            hand_index: self.hand_index,
            small_blind: self.small_blind,
            big_blind: self.big_blind,
            seats: self.seats.iter().map(|(k, v)| (f(k), *v)).collect(),
            hole_cards: self.hole_cards.iter().map(|(k, v)| (f(k), *v)).collect(),
            actions: self
                .actions
                .iter()
                .map(|round| {
                    round
                        .iter()
                        .map(|a| Action::new(f(&a.player), a.kind, a.amount))
                        .collect()
                })
                .collect(),
            net_result: rekey(&self.net_result, &mut f),
            stacks: self.stacks.as_ref().map(|s| rekey(s, &mut f)),
        }
    }

    /// Every name mentioned anywhere in the record.
    pub fn observed_names(&self) -> impl Iterator<Item = &str> {
        self.seats
            .keys()
            .chain(self.hole_cards.keys())
            .chain(self.net_result.keys())
            .map(String::as_str)
            .chain(self.actions.iter().flatten().map(|a| a.player.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogFormat {
    Canonical,
    PluribusRaw(RawTableConfig),
}

impl FromStr for LogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(LogFormat::Canonical),
            "pluribus-raw" => Ok(LogFormat::PluribusRaw(RawTableConfig::default())),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// A non-fatal problem found while reading a log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub source: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedLog {
    pub hands: Vec<HandRecord>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

/// Parses one log. `source` names the input in diagnostics and supplies the
/// game id for raw logs, which do not carry one.
pub fn parse_hand_log(text: &[u8], format: &LogFormat, source: &str) -> Result<ParsedLog> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Parse {
        line: line_of_offset(text, e.valid_up_to()),
        token: String::from_utf8_lossy(&text[e.valid_up_to()..(e.valid_up_to() + 4).min(text.len())])
            .into_owned(),
        message: "input is not valid UTF-8".into(),
    })?;
    match format {
        LogFormat::Canonical => canonical::parse(text, source),
        LogFormat::PluribusRaw(cfg) => pluribus::parse(text, cfg, source),
    }
}

fn line_of_offset(bytes: &[u8], offset: usize) -> usize {
    1 + bytes[..offset].iter().filter(|&&b| b == b'\n').count()
}

/// Parses several files, one worker per file, and merges the hands in
/// (path, hand index) order.
pub fn parse_files<P: AsRef<Path> + Sync>(paths: &[P], format: &LogFormat) -> Result<ParsedLog> {
    let mut sorted: Vec<&P> = paths.iter().collect();
    sorted.sort_by(|a, b| a.as_ref().cmp(b.as_ref()));
    let parsed: Vec<ParsedLog> = sorted
        .par_iter()
        .map(|path| {
            let path = path.as_ref();
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let mut log = parse_hand_log(&bytes, format, &stem)?;
            log.hands.sort_by_key(|h| h.hand_index);
            Ok(log)
        })
        .collect::<Result<_>>()?;
    let mut out = ParsedLog::default();
    for log in parsed {
        out.hands.extend(log.hands);
        out.diagnostics.extend(log.diagnostics);
    }
    Ok(out)
}
