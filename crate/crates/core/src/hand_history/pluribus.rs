//! Best-effort adapter for the ACPC-style `STATE:` lines of the public
//! Pluribus logs:
//!
//! ```text
//! STATE:<hand>:<betting>:<hole cards>/<board>:<payoffs>:<players>
//! ```
//!
//! Betting rounds are separated by `/`; `f` folds, `c` checks or calls and
//! `rN` raises to a total hand commitment of `N`. Players are listed in seat
//! order starting with the small blind. Hands that cannot be replayed are
//! skipped with a diagnostic rather than failing the file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Action, ActionKind, Chips, HandRecord, ParseDiagnostic, ParsedLog};
use crate::cards::Card;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTableConfig {
    pub small_blind: Chips,
    pub big_blind: Chips,
    pub stack: Chips,
}

impl Default for RawTableConfig {
    fn default() -> Self {
        RawTableConfig {
            small_blind: 50,
            big_blind: 100,
            stack: 10_000,
        }
    }
}

pub(super) fn parse(text: &str, cfg: &RawTableConfig, source: &str) -> Result<ParsedLog> {
    let mut out = ParsedLog::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let diag = |message: String| ParseDiagnostic {
            source: source.to_string(),
            line: i + 1,
            message,
        };
        if !line.starts_with("STATE:") {
            out.diagnostics.push(diag("skipped non-STATE line".into()));
            continue;
        }
        match parse_state(line, cfg, source) {
            Ok(hand) => out.hands.push(hand),
            Err(msg) => out.diagnostics.push(diag(format!("skipped hand: {msg}"))),
        }
    }
    Ok(out)
}

fn parse_state(line: &str, cfg: &RawTableConfig, game_id: &str) -> std::result::Result<HandRecord, String> {
    let parts: Vec<&str> = line.split(':').collect();
    if parts.len() != 6 {
        return Err(format!("expected 6 fields, found {}", parts.len()));
    }
    let hand_index: u32 = parts[1]
        .parse()
        .map_err(|_| format!("bad hand number `{}`", parts[1]))?;
    let players: Vec<String> = parts[5].split('|').map(str::to_string).collect();
    let n = players.len();
    if !(2..=6).contains(&n) || players.iter().any(String::is_empty) {
        return Err(format!("bad player list `{}`", parts[5]));
    }

    let hole_field = parts[3].split('/').next().unwrap_or("");
    let holes: Vec<&str> = hole_field.split('|').collect();
    if holes.len() != n {
        return Err(format!("expected {n} hole-card groups, found {}", holes.len()));
    }
    let mut hole_cards = BTreeMap::new();
    for (player, cards) in players.iter().zip(&holes) {
        if cards.is_empty() {
            continue;
        }
        if cards.len() != 4 || !cards.is_ascii() {
            return Err(format!("bad hole cards `{cards}`"));
        }
        let a: Card = cards[..2].parse().map_err(|e: crate::error::Error| e.to_string())?;
        let b: Card = cards[2..].parse().map_err(|e: crate::error::Error| e.to_string())?;
        hole_cards.insert(player.clone(), [a, b]);
    }

    let payoffs: Vec<Chips> = parts[4]
        .split('|')
        .map(|s| {
            let v: f64 = s.parse().map_err(|_| format!("bad payoff `{s}`"))?;
            if v.fract() != 0.0 {
                return Err(format!("fractional payoff `{s}`"));
            }
            Ok(v as Chips)
        })
        .collect::<std::result::Result<_, _>>()?;
    if payoffs.len() != n {
        return Err(format!("expected {n} payoffs, found {}", payoffs.len()));
    }

    let actions = replay_betting(parts[2], &players, cfg)?;

    Ok(HandRecord {
        game_id: game_id.to_string(),
        hand_index,
        small_blind: cfg.small_blind,
        big_blind: cfg.big_blind,
        seats: players
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u8 + 1))
            .collect(),
        hole_cards,
        actions,
        net_result: players.iter().cloned().zip(payoffs).collect(),
        stacks: Some(players.iter().map(|p| (p.clone(), cfg.stack)).collect()),
    })
}

fn replay_betting(
    betting: &str,
    players: &[String],
    cfg: &RawTableConfig,
) -> std::result::Result<Vec<Vec<Action>>, String> {
    let n = players.len();
    let mut contrib = vec![0; n];
    contrib[0] = cfg.small_blind;
    contrib[1] = cfg.big_blind;
    let mut folded = vec![false; n];
    let mut all_in = vec![false; n];
    let mut rounds = Vec::new();

    for (round_idx, round) in betting.split('/').enumerate() {
        let mut current_max = *contrib.iter().max().unwrap_or(&0);
        let mut bet_open = round_idx == 0;
        let mut pos = match (round_idx, n) {
            (0, 2) => 0,
            (0, _) => 2,
            (_, 2) => 1,
            _ => 0,
        };
        let mut actions = Vec::new();
        let bytes = round.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let actor = (0..n)
                .map(|k| (pos + k) % n)
                .find(|&p| !folded[p] && !all_in[p])
                .ok_or("action with no eligible player")?;
            let player = players[actor].clone();
            match bytes[i] {
                b'f' => {
                    folded[actor] = true;
                    actions.push(Action::new(player, ActionKind::Fold, 0));
                    i += 1;
                }
                b'c' => {
                    let to_call = (current_max - contrib[actor]).min(cfg.stack - contrib[actor]);
                    if to_call <= 0 {
                        actions.push(Action::new(player, ActionKind::Check, 0));
                    } else {
                        contrib[actor] += to_call;
                        let kind = if contrib[actor] >= cfg.stack {
                            all_in[actor] = true;
                            ActionKind::AllIn
                        } else {
                            ActionKind::Call
                        };
                        actions.push(Action::new(player, kind, to_call));
                    }
                    i += 1;
                }
                b'r' => {
                    let start = i + 1;
                    let mut end = start;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                    let total: Chips = round[start..end]
                        .parse()
                        .map_err(|_| format!("bad raise in `{round}`"))?;
                    let amount = total - contrib[actor];
                    if amount <= 0 || total > cfg.stack {
                        return Err(format!("raise to {total} is not a raise for {player}"));
                    }
                    contrib[actor] = total;
                    current_max = current_max.max(total);
                    let kind = if total == cfg.stack {
                        all_in[actor] = true;
                        ActionKind::AllIn
                    } else if bet_open {
                        ActionKind::Raise
                    } else {
                        ActionKind::Bet
                    };
                    bet_open = true;
                    actions.push(Action::new(player, kind, amount));
                    i = end;
                }
                other => return Err(format!("unknown betting token `{}`", other as char)),
            }
            pos = actor + 1;
        }
        rounds.push(actions);
    }
    Ok(rounds)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_hand_log, validate_hands, LogFormat};
    use super::*;

    fn parse_raw(text: &str) -> ParsedLog {
        parse_hand_log(
            text.as_bytes(),
            &LogFormat::PluribusRaw(RawTableConfig::default()),
            "sample",
        )
        .unwrap()
    }

    #[test]
    fn replays_a_full_hand() {
        let line = "STATE:11:r200ffcfc/cr250cc/ccc/r650ff:6d5c|8d4d|2sJd|8c3h|Jh2c|As8h/Kc4h5h/Qh/7c:\
                    -50|550|-250|0|0|-250:MrBlue|Pluribus|MrWhite|Gogo|Bill|Eddie";
        let log = parse_raw(line);
        assert!(log.diagnostics.is_empty(), "{:?}", log.diagnostics);
        let hand = &log.hands[0];
        assert_eq!(hand.game_id, "sample");
        assert_eq!(hand.hand_index, 11);
        assert_eq!(hand.seats["MrBlue"], 1);
        let pre = &hand.actions[0];
        assert_eq!(pre[0], Action::new("MrWhite", ActionKind::Raise, 200));
        assert_eq!(pre[3], Action::new("Eddie", ActionKind::Call, 200));
        assert_eq!(pre[4], Action::new("MrBlue", ActionKind::Fold, 0));
        assert_eq!(pre[5], Action::new("Pluribus", ActionKind::Call, 100));
        // flop: MrBlue folded, so Pluribus acts first
        assert_eq!(hand.actions[1][0], Action::new("Pluribus", ActionKind::Check, 0));
        assert_eq!(hand.actions[1][1], Action::new("MrWhite", ActionKind::Bet, 50));
        assert_eq!(hand.actions[1][3], Action::new("Pluribus", ActionKind::Call, 50));
        assert_eq!(hand.actions[3][0], Action::new("Pluribus", ActionKind::Bet, 400));
        assert_eq!(hand.pot_total(), 1200);
        assert!(validate_hands(&log.hands).is_empty());
    }

    #[test]
    fn malformed_hands_are_skipped_with_diagnostics() {
        let text = "STATE:1:fffff:AsKs|2c2d|3c3d|4c4d|5c5d|6c6d:-50|50|0|0|0|0:a|b|c|d|e|f\n\
                    STATE:2:zz:AsKs|2c2d|3c3d|4c4d|5c5d|6c6d:-50|50|0|0|0|0:a|b|c|d|e|f\n\
                    # trailer\n";
        let log = parse_raw(text);
        assert_eq!(log.hands.len(), 1);
        assert_eq!(log.diagnostics.len(), 2);
        assert_eq!(log.diagnostics[0].line, 2);
        assert!(validate_hands(&log.hands).is_empty());
    }
}
