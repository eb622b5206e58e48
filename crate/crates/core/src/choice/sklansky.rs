//! Sklansky–Malmuth starting-hand groups. Group 9 collects every hand not
//! listed in groups 1–8.

use crate::cards::{Card, Rank};
use crate::error::{Error, Result};

/// Hands per group in `XY`, `XYs` or `XYo` notation, high card first.
const GROUPS: [&[&str]; 8] = [
    &["AA", "KK", "QQ", "JJ", "AKs"],
    &["TT", "AQs", "AJs", "KQs", "AKo"],
    &["99", "ATs", "KJs", "QJs", "JTs", "AQo"],
    &["88", "KTs", "QTs", "J9s", "T9s", "98s", "AJo", "KQo"],
    &[
        "77", "A9s", "A8s", "A7s", "A6s", "A5s", "A4s", "A3s", "A2s", "Q9s", "T8s", "97s", "87s",
        "76s", "KJo", "QJo", "JTo",
    ],
    &["66", "55", "K9s", "J8s", "86s", "75s", "54s", "ATo", "KTo", "QTo"],
    &[
        "44", "33", "22", "K8s", "K7s", "K6s", "K5s", "K4s", "K3s", "K2s", "Q8s", "T7s", "64s",
        "53s", "43s", "J9o", "T9o", "98o",
    ],
    &[
        "J7s", "96s", "85s", "74s", "42s", "32s", "A9o", "K9o", "Q9o", "J8o", "T8o", "87o", "76o",
        "65o", "54o",
    ],
];

pub const WEAKEST_GROUP: u8 = 9;

/// Group of a starting hand, 1 (strongest) to 9 (weakest).
pub fn sklansky_rank(a: Card, b: Card) -> Result<u8> {
    if a == b {
        return Err(Error::DuplicateCard(a.to_string()));
    }
    let (hi, lo) = if a.rank >= b.rank { (a.rank, b.rank) } else { (b.rank, a.rank) };
    Ok(group_of(hi, lo, a.suit == b.suit))
}

fn group_of(hi: Rank, lo: Rank, suited: bool) -> u8 {
    let mut key = String::with_capacity(3);
    key.push(hi.to_char());
    key.push(lo.to_char());
    if hi != lo {
        key.push(if suited { 's' } else { 'o' });
    }
    GROUPS
        .iter()
        .position(|g| g.contains(&key.as_str()))
        .map_or(WEAKEST_GROUP, |i| i as u8 + 1)
}
