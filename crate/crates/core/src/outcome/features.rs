use serde::{Deserialize, Serialize};

use crate::choice::{PreflopDecision, WEAKEST_GROUP};
use crate::error::{Error, Result};

pub const N_SKLANSKY: usize = WEAKEST_GROUP as usize;
pub const N_SEATS: usize = 6;

/// Binary feature vector stored as the sorted indices of its active cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub active: Vec<usize>,
    pub dim: usize,
}

impl FeatureVector {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &i in &self.active {
            v[i] = 1.0;
        }
        v
    }
}

/// One-hot hand strength and seat, plus player×seat and strength×seat
/// interactions. Stack size is left out because stacks reset every hand.
///
/// Layout: `[sklansky(9) | seat(6) | player×seat(6P) | sklansky×seat(54)]`.
/// Players outside the vocabulary get no player×seat cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    players: Vec<String>,
}

impl FeatureEncoder {
    pub fn new(mut players: Vec<String>) -> Self {
        players.sort();
        players.dedup();
        FeatureEncoder { players }
    }

    pub fn from_decisions(decisions: &[PreflopDecision]) -> Self {
        FeatureEncoder::new(decisions.iter().map(|d| d.player.clone()).collect())
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn dim(&self) -> usize {
        N_SKLANSKY + N_SEATS + N_SEATS * self.players.len() + N_SKLANSKY * N_SEATS
    }

    pub fn encode(&self, d: &PreflopDecision) -> Result<FeatureVector> {
        let sk = d.sklansky.ok_or_else(|| Error::MissingSklansky {
            game_id: d.game_id.clone(),
            hand_index: d.hand_index,
            player: d.player.clone(),
        })? as usize;
        if !(1..=N_SKLANSKY).contains(&sk) {
            return Err(Error::InvalidInput(format!("sklansky group {sk} out of range")));
        }
        let seat = d.seat as usize;
        if !(1..=N_SEATS).contains(&seat) {
            return Err(Error::InvalidInput(format!("seat {seat} out of range")));
        }
        let (sk, seat) = (sk - 1, seat - 1);
        let player_block = N_SKLANSKY + N_SEATS;
        let inter_block = player_block + N_SEATS * self.players.len();
        let mut active = vec![sk, N_SKLANSKY + seat];
        if let Ok(p) = self.players.binary_search(&d.player) {
            active.push(player_block + p * N_SEATS + seat);
        }
        active.push(inter_block + sk * N_SEATS + seat);
        Ok(FeatureVector { active, dim: self.dim() })
    }
}
