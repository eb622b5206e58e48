use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cards::Card;
use crate::choice::sklansky_rank;
use crate::error::{Error, Result};
use crate::hand_history::{Action, ActionKind, Chips, HandRecord, PLURIBUS_ID};
use crate::rng::{derive_seed, stream_rng};

/// Settings for a simulated six-handed session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HandSimConfig {
    pub games: usize,
    pub hands_per_game: usize,
    pub humans: Vec<String>,
    pub small_blind: Chips,
    pub big_blind: Chips,
    /// Multiplier on the entry probability in the hand after a loss.
    pub tilt_after_loss: f64,
    pub seed: u64,
}

impl Default for HandSimConfig {
    fn default() -> Self {
        HandSimConfig {
            games: 2,
            hands_per_game: 100,
            humans: ["Ada", "Bo", "Cy", "Di", "Ed"].map(String::from).to_vec(),
            small_blind: 50,
            big_blind: 100,
            tilt_after_loss: 0.8,
            seed: 0,
        }
    }
}

/// Entry probability by hand strength group (1 strongest, 9 weakest).
fn entry_probability(sk: u8, is_bot: bool) -> f64 {
    let base = 1.05 - 0.08 * sk as f64;
    let base = if is_bot { base - 0.03 } else { base };
    base.clamp(0.03, 0.95)
}

/// Simulates hands with a crude strength-driven strategy: enter with a
/// probability falling in the hand's strength group, sometimes raise strong
/// hands, check down after the flop, and award the pot at random weighted
/// toward stronger holdings. Only the pre-flop round carries decisions.
pub fn generate_hand_log(cfg: &HandSimConfig) -> Result<Vec<HandRecord>> {
    if cfg.humans.len() != 5 {
        return Err(Error::InvalidInput(format!("need five human names, got {}", cfg.humans.len())));
    }
    if !(0 < cfg.small_blind && cfg.small_blind <= cfg.big_blind) {
        return Err(Error::InvalidInput("blinds must satisfy 0 < small <= big".into()));
    }
    let mut names = vec![PLURIBUS_ID.to_string()];
    names.extend(cfg.humans.iter().cloned());

    let mut out = Vec::with_capacity(cfg.games * cfg.hands_per_game);
    for game in 0..cfg.games {
        let mut rng = stream_rng(derive_seed(cfg.seed, "hand-sim"), game as u64);
        let mut last_net: BTreeMap<String, Chips> = BTreeMap::new();
        for hand in 0..cfg.hands_per_game {
            let record = simulate_hand(cfg, &names, format!("synth-{game}"), hand as u32, &last_net, &mut rng)?;
            last_net = record.net_result.clone();
            out.push(record);
        }
    }
    Ok(out)
}

fn simulate_hand(
    cfg: &HandSimConfig,
    names: &[String],
    game_id: String,
    hand_index: u32,
    last_net: &BTreeMap<String, Chips>,
    rng: &mut impl Rng,
) -> Result<HandRecord> {
    let n = names.len();
    let seats: BTreeMap<String, u8> = names
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), ((i + hand_index as usize) % n + 1) as u8))
        .collect();
    let by_seat: Vec<&String> = (1..=n as u8)
        .map(|s| seats.iter().find(|(_, &v)| v == s).map(|(p, _)| p).unwrap())
        .collect();

    let mut deck = Card::deck();
    deck.shuffle(rng);
    let mut hole_cards = BTreeMap::new();
    let mut strength = BTreeMap::new();
    for (i, p) in names.iter().enumerate() {
        let cards = [deck[2 * i], deck[2 * i + 1]];
        strength.insert(p.clone(), sklansky_rank(cards[0], cards[1])?);
        hole_cards.insert(p.clone(), cards);
    }

    let mut contrib: BTreeMap<&str, Chips> = names.iter().map(|p| (p.as_str(), 0)).collect();
    *contrib.get_mut(by_seat[0].as_str()).unwrap() = cfg.small_blind;
    *contrib.get_mut(by_seat[1].as_str()).unwrap() = cfg.big_blind;
    let mut current = cfg.big_blind;
    let mut raised = false;
    let mut active: Vec<&str> = by_seat.iter().map(|p| p.as_str()).collect();
    let mut preflop = Vec::new();
    let order: Vec<&str> = (2..n).chain(0..2).map(|i| by_seat[i].as_str()).collect();

    let wants_in = |p: &str, rng: &mut dyn rand::RngCore, bonus: f64| {
        let sk = strength[p];
        let mut prob = entry_probability(sk, p == PLURIBUS_ID) + bonus;
        if last_net.get(p).is_some_and(|&net| net < -cfg.big_blind) {
            prob *= cfg.tilt_after_loss;
        }
        rng.random::<f64>() < prob
    };

    for &p in &order {
        if active.len() == 1 {
            break;
        }
        let owed = current - contrib[p];
        if wants_in(p, rng, 0.0) {
            if !raised && strength[p] <= 4 && rng.random::<f64>() < 0.5 {
                let target = 3 * current;
                preflop.push(Action::new(p, ActionKind::Raise, target - contrib[p]));
                *contrib.get_mut(p).unwrap() = target;
                current = target;
                raised = true;
            } else if owed == 0 {
                preflop.push(Action::new(p, ActionKind::Check, 0));
            } else {
                preflop.push(Action::new(p, ActionKind::Call, owed));
                *contrib.get_mut(p).unwrap() = current;
            }
        } else if owed == 0 {
            preflop.push(Action::new(p, ActionKind::Check, 0));
        } else {
            preflop.push(Action::new(p, ActionKind::Fold, 0));
            active.retain(|&a| a != p);
        }
    }
    // players facing the raise act once more
    if raised {
        for &p in &order {
            if active.len() == 1 {
                break;
            }
            if !active.contains(&p) || contrib[p] == current {
                continue;
            }
            if wants_in(p, rng, 0.2) {
                preflop.push(Action::new(p, ActionKind::Call, current - contrib[p]));
                *contrib.get_mut(p).unwrap() = current;
            } else {
                preflop.push(Action::new(p, ActionKind::Fold, 0));
                active.retain(|&a| a != p);
            }
        }
    }

    let mut actions = vec![preflop];
    let winner = if active.len() == 1 {
        active[0]
    } else {
        actions.push(active.iter().map(|&p| Action::new(p, ActionKind::Check, 0)).collect());
        let weights: Vec<f64> = active.iter().map(|p| (10.0 - strength[*p] as f64).powi(2)).collect();
        let total: f64 = weights.iter().sum();
        let mut draw = rng.random::<f64>() * total;
        let mut pick = active[active.len() - 1];
        for (p, w) in active.iter().zip(&weights) {
            if draw < *w {
                pick = p;
                break;
            }
            draw -= w;
        }
        pick
    };
    let pot: Chips = contrib.values().sum();
    let net_result = contrib
        .iter()
        .map(|(&p, &c)| (p.to_string(), if p == winner { pot - c } else { -c }))
        .collect();

    Ok(HandRecord {
        game_id,
        hand_index,
        small_blind: cfg.small_blind,
        big_blind: cfg.big_blind,
        seats,
        hole_cards,
        actions,
        net_result,
        stacks: None,
    })
}
