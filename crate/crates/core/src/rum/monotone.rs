//! Where the play probability moves the "right" way in ω.
//!
//! Under the logit CRRA model the probability of taking the risky option is
//! monotone in ω for dominant gambles but not for mixed ones: it falls as ω
//! passes the indifference point and then drifts back toward one half. On
//! such gambles ω is only identified on the stretch where the probability is
//! non-increasing.

use serde::{Deserialize, Serialize};

use super::fit::RumFit;
use super::gamble::{Gamble, OmegaGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

/// A maximal run of grid points over which P(play) moves one way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSegment {
    pub lo: f64,
    pub hi: f64,
    pub direction: Direction,
}

impl MonotoneSegment {
    pub fn contains(&self, omega: f64) -> bool {
        self.lo <= omega && omega <= self.hi
    }
}

/// Splits the grid into maximal monotone runs of P(play).
///
/// Directions come from grid differences of the log-odds `λ·gap(ω)`, which
/// moves with P(play) but does not saturate at 0 or 1. Differences at
/// rounding level count as flat and extend the current run. Consecutive
/// segments share their boundary point. A constant curve (λ = 0) is one
/// non-increasing segment.
pub fn monotone_segments(g: &Gamble, lambda: f64, grid: &OmegaGrid) -> Result<Vec<MonotoneSegment>> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    let mut segments = Vec::new();
    let mut start = grid.point(0);
    let mut current: Option<Direction> = None;
    let mut prev = lambda * g.utility_gap(start);
    for i in 1..n {
        let w = grid.point(i);
        let next = lambda * g.utility_gap(w);
        let tol = 1e-13 + 1e-12 * prev.abs().max(next.abs());
        let step = next - prev;
        let dir = if step > tol {
            Some(Direction::NonDecreasing)
        } else if step < -tol {
            Some(Direction::NonIncreasing)
        } else {
            None
        };
        match (current, dir) {
            (_, None) => {}
            (None, Some(d)) => current = Some(d),
            (Some(c), Some(d)) if c == d => {}
            (Some(c), Some(d)) => {
                let turn = grid.point(i - 1);
                segments.push(MonotoneSegment {
                    lo: start,
                    hi: turn,
                    direction: c,
                });
                start = turn;
                current = Some(d);
            }
        }
        prev = next;
    }
    segments.push(MonotoneSegment {
        lo: start,
        hi: grid.point(n - 1),
        direction: current.unwrap_or(Direction::NonIncreasing),
    });
    Ok(segments)
}

/// ω-intervals on which P(play) is non-increasing.
pub fn monotonic_domain(g: &Gamble, lambda: f64, grid: &OmegaGrid) -> Result<Vec<(f64, f64)>> {
    Ok(monotone_segments(g, lambda, grid)?
        .into_iter()
        .filter(|s| s.direction == Direction::NonIncreasing)
        .map(|s| (s.lo, s.hi))
        .collect())
}

/// The ω values at which the model is identified for this gamble.
///
/// A curve that is monotone over the whole grid (every dominant gamble) is
/// identified everywhere. Otherwise only the non-increasing runs qualify.
pub fn allowable_domain(g: &Gamble, lambda: f64, grid: &OmegaGrid) -> Result<Vec<(f64, f64)>> {
    let segments = monotone_segments(g, lambda, grid)?;
    if segments.len() == 1 {
        return Ok(vec![(segments[0].lo, segments[0].hi)]);
    }
    Ok(segments
        .into_iter()
        .filter(|s| s.direction == Direction::NonIncreasing)
        .map(|s| (s.lo, s.hi))
        .collect())
}

pub fn in_allowable_domain(g: &Gamble, omega: f64, lambda: f64, grid: &OmegaGrid) -> Result<bool> {
    Ok(allowable_domain(g, lambda, grid)?
        .iter()
        .any(|&(lo, hi)| lo <= omega && omega <= hi))
}

/// Fraction of gambles whose fitted expected ω falls outside their
/// allowable domain.
pub fn diagnose_omega_validity(fit: &RumFit, gambles: &[Gamble], grid: &OmegaGrid) -> Result<f64> {
    if fit.n_valid == 0 {
        return Err(Error::NoValidConvergence {
            starts: fit.starts.len(),
            summary: "cannot diagnose a fit without valid convergences".into(),
        });
    }
    if gambles.is_empty() {
        return Ok(0.0);
    }
    let mut outside = 0usize;
    for g in gambles {
        if !in_allowable_domain(g, fit.omega_mean, fit.lambda_mean, grid)? {
            outside += 1;
        }
    }
    Ok(outside as f64 / gambles.len() as f64)
}
