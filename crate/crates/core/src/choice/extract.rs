use std::collections::{BTreeMap, BTreeSet};

use super::{sklansky_rank, Agent, Choice, PreflopDecision, RealizedOutcome, TriggerState};
use crate::hand_history::{ActionKind, Chips, HandRecord};

#[derive(Clone, Copy)]
struct Snapshot {
    pot: Chips,
    own: Chips,
    n_active: u32,
    kind: Option<ActionKind>,
}

/// One decision per seated player per hand, in hand order then seat order.
///
/// Features describe the table just before the player's final pre-flop
/// action. A player who never acted pre-flop is emitted with `forced = true`.
/// Trigger states are left neutral; see [`super::label_trigger_states`].
pub fn extract_preflop_decisions(records: &[HandRecord]) -> Vec<PreflopDecision> {
    let mut out = Vec::new();
    for hand in records {
        let players = hand.players();
        let mut contrib: BTreeMap<&str, Chips> =
            players.iter().map(|p| (*p, hand.blind_for(p))).collect();
        let mut folded: BTreeSet<&str> = BTreeSet::new();
        let mut last: BTreeMap<&str, Snapshot> = BTreeMap::new();

        for action in hand.preflop_actions() {
            let p = action.player.as_str();
            last.insert(
                p,
                Snapshot {
                    pot: contrib.values().sum(),
                    own: contrib.get(p).copied().unwrap_or(0),
                    n_active: (players.len() - folded.len()) as u32,
                    kind: Some(action.kind),
                },
            );
            *contrib.entry(p).or_insert(0) += action.amount;
            if action.kind == ActionKind::Fold {
                folded.insert(p);
            }
        }
        let end_pot: Chips = contrib.values().sum();
        let end_active = (players.len() - folded.len()) as u32;
        let hand_pot = hand.pot_total();

        for player in players {
            let snap = last.get(player).copied().unwrap_or(Snapshot {
                pot: end_pot,
                own: contrib[player],
                n_active: end_active,
                kind: None,
            });
            let choice = match snap.kind {
                Some(ActionKind::Fold) => Choice::Fold,
                _ => Choice::Play,
            };
            let sklansky = match hand.hole_cards.get(player) {
                Some([a, b]) => match sklansky_rank(*a, *b) {
                    Ok(r) => Some(r),
                    Err(e) => {
                        log::warn!("{} hand {}: {player}: {e}", hand.game_id, hand.hand_index);
                        None
                    }
                },
                None => {
                    log::debug!(
                        "{} hand {}: no hole cards for {player}",
                        hand.game_id,
                        hand.hand_index
                    );
                    None
                }
            };
            let outcome = match choice {
                Choice::Fold => RealizedOutcome {
                    won: false,
                    amount: -snap.own,
                },
                Choice::Play => {
                    let net = hand.net_result.get(player).copied().unwrap_or(0);
                    RealizedOutcome {
                        won: net > 0,
                        amount: net,
                    }
                }
            };
            out.push(PreflopDecision {
                agent: Agent::of_player(player),
                player: player.to_string(),
                game_id: hand.game_id.clone(),
                hand_index: hand.hand_index,
                seat: hand.seats[player],
                sklansky,
                choice,
                trigger: TriggerState::Neutral,
                forced: snap.kind.is_none(),
                preflop_pot: snap.pot,
                own_contribution: snap.own,
                n_active: snap.n_active,
                small_blind: hand.small_blind,
                big_blind: hand.big_blind,
                hand_pot,
                outcome,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand_history::test_support::walk_to_big_blind;
    use crate::hand_history::Action;

    #[test]
    fn walk_has_five_folds_and_a_forced_big_blind() {
        let mut hand = walk_to_big_blind();
        hand.hole_cards.insert("sb".into(), ["7c".parse().unwrap(), "2d".parse().unwrap()]);
        let ds = extract_preflop_decisions(&[hand]);
        assert_eq!(ds.len(), 6);
        let bb = ds.iter().find(|d| d.player == "bb").unwrap();
        assert!(bb.forced);
        assert_eq!(bb.choice, Choice::Play);
        assert_eq!(bb.outcome, RealizedOutcome { won: true, amount: 50 });
        let sb = ds.iter().find(|d| d.player == "sb").unwrap();
        assert_eq!(sb.choice, Choice::Fold);
        assert_eq!(sb.sklansky, Some(9));
        assert_eq!(sb.own_contribution, 50);
        assert_eq!(sb.preflop_pot, 150);
        assert_eq!(sb.n_active, 2);
        assert_eq!(sb.outcome.amount, -50);
        assert!(ds.iter().filter(|d| d.player != "sb").all(|d| d.sklansky.is_none()));
        assert_eq!(ds.iter().filter(|d| d.is_fittable()).count(), 1);
    }

    #[test]
    fn call_then_fold_on_flop_is_play() {
        let mut hand = walk_to_big_blind();
        hand.actions[0][4] = Action::new("sb", ActionKind::Call, 50);
        hand.actions[0].push(Action::new("bb", ActionKind::Check, 0));
        hand.actions.push(vec![
            Action::new("sb", ActionKind::Bet, 100),
            Action::new("bb", ActionKind::Fold, 0),
        ]);
        hand.net_result.insert("sb".into(), 100);
        hand.net_result.insert("bb".into(), -100);
        let ds = extract_preflop_decisions(&[hand]);
        let bb = ds.iter().find(|d| d.player == "bb").unwrap();
        assert_eq!(bb.choice, Choice::Play);
        assert!(!bb.forced);
        assert_eq!(bb.own_contribution, 100);
        assert_eq!(bb.preflop_pot, 200);
        assert_eq!(bb.outcome, RealizedOutcome { won: false, amount: -100 });
    }

    #[test]
    fn final_preflop_action_decides() {
        let mut hand = walk_to_big_blind();
        // p3 limps, p6 raises, p3 folds to the raise
        hand.actions[0] = vec![
            Action::new("p3", ActionKind::Call, 100),
            Action::new("p4", ActionKind::Fold, 0),
            Action::new("p5", ActionKind::Fold, 0),
            Action::new("p6", ActionKind::Raise, 300),
            Action::new("sb", ActionKind::Fold, 0),
            Action::new("bb", ActionKind::Fold, 0),
            Action::new("p3", ActionKind::Fold, 0),
        ];
        hand.net_result = [("sb", -50), ("bb", -100), ("p3", -100), ("p4", 0), ("p5", 0), ("p6", 250)]
            .into_iter()
            .map(|(p, v)| (p.to_string(), v))
            .collect();
        let ds = extract_preflop_decisions(&[hand]);
        let p3 = ds.iter().find(|d| d.player == "p3").unwrap();
        assert_eq!(p3.choice, Choice::Fold);
        assert_eq!(p3.own_contribution, 100);
        assert_eq!(p3.preflop_pot, 550);
        assert_eq!(p3.n_active, 2);
        assert_eq!(p3.outcome.amount, -100);
        assert_eq!(p3.hand_pot, 550);
    }
}
