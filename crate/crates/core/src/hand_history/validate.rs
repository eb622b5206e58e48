use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::HandRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    ZeroSum,
    SeatBijection,
    NegativeAmount,
    PassiveAmount,
    UnknownPlayer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandDiagnostic {
    pub game_id: String,
    pub hand_index: u32,
    pub kind: DiagnosticKind,
    pub detail: String,
}

/// Structural checks on parsed hands. Never fails; problems come back as
/// diagnostics.
pub fn validate_hands(records: &[HandRecord]) -> Vec<HandDiagnostic> {
    let mut out = Vec::new();
    for hand in records {
        let mut push = |kind, detail: String| {
            out.push(HandDiagnostic {
                game_id: hand.game_id.clone(),
                hand_index: hand.hand_index,
                kind,
                detail,
            })
        };

        let sum: i64 = hand.net_result.values().sum();
        if sum != 0 {
            push(DiagnosticKind::ZeroSum, format!("net results sum to {sum:+}"));
        }

        let n = hand.seats.len();
        let taken: BTreeSet<u8> = hand.seats.values().copied().collect();
        let expected: BTreeSet<u8> = (1..=n as u8).collect();
        if !(2..=6).contains(&n) || taken != expected {
            let mut seats: Vec<u8> = hand.seats.values().copied().collect();
            seats.sort_unstable();
            push(
                DiagnosticKind::SeatBijection,
                format!("{n} players occupy seats {seats:?}"),
            );
        }

        if hand.small_blind < 0 || hand.big_blind < 0 {
            push(DiagnosticKind::NegativeAmount, "negative blind".into());
        }
        for action in hand.actions.iter().flatten() {
            if action.amount < 0 {
                push(
                    DiagnosticKind::NegativeAmount,
                    format!("{} {} {}", action.player, action.kind, action.amount),
                );
            } else if action.kind.is_passive() && action.amount != 0 {
                push(
                    DiagnosticKind::PassiveAmount,
                    format!("{} {} {}", action.player, action.kind, action.amount),
                );
            }
        }

        let unknown: BTreeSet<&str> = hand
            .observed_names()
            .filter(|p| !hand.seats.contains_key(*p))
            .collect();
        if !unknown.is_empty() {
            push(
                DiagnosticKind::UnknownPlayer,
                format!("not seated: {}", unknown.into_iter().collect::<Vec<_>>().join(", ")),
            );
        }
    }
    out
}
