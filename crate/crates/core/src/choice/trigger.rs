use std::collections::BTreeMap;

use super::{Agent, PreflopDecision, TriggerState};

/// State that a hand's result puts its player in for their next hand.
fn state_after(d: &PreflopDecision) -> TriggerState {
    let net = d.outcome.amount;
    if net > 0 && d.hand_pot > d.small_blind + d.big_blind {
        TriggerState::PostWin
    } else if net < -d.big_blind {
        TriggerState::PostLoss
    } else {
        TriggerState::Neutral
    }
}

/// Sets each decision's trigger from the same player's previous hand in the
/// same game. The first hand a player has in a game is neutral. Input order
/// is preserved.
pub fn label_trigger_states(mut decisions: Vec<PreflopDecision>) -> Vec<PreflopDecision> {
    let mut by_player_game: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, d) in decisions.iter().enumerate() {
        by_player_game
            .entry((d.player.as_str(), d.game_id.as_str()))
            .or_default()
            .push(i);
    }
    let mut labels = vec![TriggerState::Neutral; decisions.len()];
    for mut idx in by_player_game.into_values() {
        idx.sort_by_key(|&i| decisions[i].hand_index);
        for pair in idx.windows(2) {
            labels[pair[1]] = state_after(&decisions[pair[0]]);
        }
    }
    for (d, label) in decisions.iter_mut().zip(labels) {
        d.trigger = label;
    }
    decisions
}

/// Relabels every non-Pluribus player as the pooled human agent. Player ids
/// are kept.
pub fn pool_humans(mut decisions: Vec<PreflopDecision>) -> Vec<PreflopDecision> {
    for d in &mut decisions {
        d.agent = Agent::of_player(&d.player);
    }
    decisions
}
