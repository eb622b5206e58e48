use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{HandRecord, PLURIBUS_ID};
use crate::error::{Error, Result};

/// Observed name → canonical player id.
///
/// Canonical ids resolve to themselves, which keeps normalization
/// idempotent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AliasMap {
    pub entries: BTreeMap<String, String>,
}

impl AliasMap {
    pub fn new(entries: BTreeMap<String, String>) -> Result<Self> {
        let map = AliasMap { entries };
        map.check()?;
        Ok(map)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(serde_json::from_str(text)?)
    }

    /// Maps every name observed in `records` to itself.
    pub fn identity(records: &[HandRecord]) -> Self {
        AliasMap {
            entries: records
                .iter()
                .flat_map(HandRecord::observed_names)
                .map(|n| (n.to_string(), n.to_string()))
                .collect(),
        }
    }

    pub fn resolve(&self, name: &str) -> Option<&str> {
        if let Some(id) = self.entries.get(name) {
            return Some(id);
        }
        self.entries
            .values()
            .find(|id| id.as_str() == name)
            .map(String::as_str)
    }

    fn check(&self) -> Result<()> {
        for (name, id) in &self.entries {
            if id.trim().is_empty() {
                return Err(Error::InvalidAliasMap(format!("empty canonical id for `{name}`")));
            }
            if (name == PLURIBUS_ID) != (id == PLURIBUS_ID) {
                return Err(Error::InvalidAliasMap(format!(
                    "`{name}` -> `{id}` would merge {PLURIBUS_ID} with a human player"
                )));
            }
        }
        Ok(())
    }
}

/// Replaces every player name by its canonical id.
pub fn normalize_aliases(records: &[HandRecord], map: &AliasMap) -> Result<Vec<HandRecord>> {
    map.check()?;
    let unmapped: BTreeSet<&str> = records
        .iter()
        .flat_map(HandRecord::observed_names)
        .filter(|n| map.resolve(n).is_none())
        .collect();
    if !unmapped.is_empty() {
        return Err(Error::UnmappedAliases(
            unmapped.into_iter().map(str::to_string).collect(),
        ));
    }
    records
        .iter()
        .map(|hand| {
            let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
            for name in hand.seats.keys() {
                let id = map.resolve(name).expect("checked above");
                if let Some(other) = seen.insert(id, name) {
                    return Err(Error::InvalidAliasMap(format!(
                        "`{other}` and `{name}` both map to `{id}` in game {} hand {}",
                        hand.game_id, hand.hand_index
                    )));
                }
            }
            Ok(hand.map_players(|n| map.resolve(n).expect("checked above").to_string()))
        })
        .collect()
}

/// Drops hands whose game id is in `excluded`.
pub fn exclude_games(records: Vec<HandRecord>, excluded: &BTreeSet<String>) -> Vec<HandRecord> {
    records
        .into_iter()
        .filter(|h| !excluded.contains(&h.game_id))
        .collect()
}
