use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::crra::shifted_utility;
use crate::error::{Error, Result};

/// Tolerance on the sum of an option's outcome probabilities.
pub const PROBABILITY_SUM_TOL: f64 = 1e-9;

/// A (probability, payoff) pair; serialized as `[p, v]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Outcome {
    pub p: f64,
    pub v: f64,
}

impl Outcome {
    pub const fn new(p: f64, v: f64) -> Self {
        Outcome { p, v }
    }
}

impl From<(f64, f64)> for Outcome {
    fn from((p, v): (f64, f64)) -> Self {
        Outcome { p, v }
    }
}

impl From<Outcome> for (f64, f64) {
    fn from(o: Outcome) -> Self {
        (o.p, o.v)
    }
}

/// The play/fold choice situation: play is a two-outcome lottery, fold is a
/// sure payoff. Payoffs are normalized and strictly positive.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "RawGamble")]
pub struct Gamble {
    play: [Outcome; 2],
    fold: Outcome,
}

#[derive(Deserialize)]
struct RawGamble {
    play: Vec<Outcome>,
    fold: Vec<Outcome>,
}

impl TryFrom<RawGamble> for Gamble {
    type Error = Error;

    fn try_from(raw: RawGamble) -> Result<Self> {
        let play: [Outcome; 2] = raw.play.try_into().map_err(|v: Vec<Outcome>| {
            Error::InvalidInput(format!("play option needs 2 outcomes, got {}", v.len()))
        })?;
        let [fold]: [Outcome; 1] = raw.fold.try_into().map_err(|v: Vec<Outcome>| {
            Error::InvalidInput(format!("fold option needs 1 outcome, got {}", v.len()))
        })?;
        Gamble::new(play, fold)
    }
}

impl Serialize for Gamble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Gamble", 2)?;
        st.serialize_field("play", &self.play)?;
        st.serialize_field("fold", &[self.fold])?;
        st.end()
    }
}

impl Gamble {
    pub fn new(play: [Outcome; 2], fold: Outcome) -> Result<Self> {
        let all = play.iter().chain(std::iter::once(&fold));
        for o in all {
            if !(0.0..=1.0).contains(&o.p) {
                return Err(Error::InvalidInput(format!("probability {} outside [0, 1]", o.p)));
            }
            if !(o.v > 0.0) || !o.v.is_finite() {
                return Err(Error::NonPositivePayoff(o.v));
            }
        }
        let play_sum = play[0].p + play[1].p;
        if (play_sum - 1.0).abs() > PROBABILITY_SUM_TOL || (fold.p - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "option probabilities must sum to 1 (play {play_sum}, fold {})",
                fold.p
            )));
        }
        Ok(Gamble { play, fold })
    }

    /// Win with probability `p_win`, otherwise lose; fold pays `v_fold` surely.
    pub fn win_lose(p_win: f64, v_win: f64, v_lose: f64, v_fold: f64) -> Result<Self> {
        Gamble::new(
            [Outcome::new(p_win, v_win), Outcome::new(1.0 - p_win, v_lose)],
            Outcome::new(1.0, v_fold),
        )
    }

    pub fn play(&self) -> &[Outcome] {
        &self.play
    }

    pub fn fold(&self) -> &[Outcome] {
        std::slice::from_ref(&self.fold)
    }

    /// `u_play(ω) - u_fold(ω)`.
    pub fn utility_gap(&self, omega: f64) -> f64 {
        self.gap_and_slope(omega).0
    }

    /// Utility gap and its derivative in ω.
    pub(crate) fn gap_and_slope(&self, omega: f64) -> (f64, f64) {
        let mut gap = 0.0;
        let mut slope = 0.0;
        for o in &self.play {
            let (u, du) = shifted_utility(o.v.ln(), omega);
            gap += o.p * u;
            slope += o.p * du;
        }
        let (u, du) = shifted_utility(self.fold.v.ln(), omega);
        (gap - self.fold.p * u, slope - self.fold.p * du)
    }
}

/// Risk aversion ω and precision λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RumParams {
    pub omega: f64,
    pub lambda: f64,
}

impl RumParams {
    pub const fn new(omega: f64, lambda: f64) -> Self {
        RumParams { omega, lambda }
    }
}

/// Logistic function, evaluated without overflow.
#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(x)`, evaluated without overflow.
#[inline]
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Probability of choosing play under the logit model.
///
/// The two-option softmax reduces to `σ(λ (u_play - u_fold))`, which never
/// exponentiates a utility directly.
pub fn choice_probability(g: &Gamble, params: RumParams) -> Result<f64> {
    if !(params.lambda >= 0.0) || !params.lambda.is_finite() {
        return Err(Error::InvalidInput(format!("precision {} must be finite and >= 0", params.lambda)));
    }
    let gap = g.utility_gap(params.omega);
    if !gap.is_finite() {
        return Err(Error::NonFinite("option utilities"));
    }
    if params.lambda == 0.0 {
        return Ok(0.5);
    }
    Ok(sigmoid(params.lambda * gap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GambleClass {
    Mixed,
    RiskDominant,
    SafeDominant,
}

impl GambleClass {
    pub const ALL: [GambleClass; 3] = [
        GambleClass::Mixed,
        GambleClass::RiskDominant,
        GambleClass::SafeDominant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GambleClass::Mixed => "mixed",
            GambleClass::RiskDominant => "risk_dominant",
            GambleClass::SafeDominant => "safe_dominant",
        }
    }
}

impl fmt::Display for GambleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GambleClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "mixed" => Ok(GambleClass::Mixed),
            "risk_dominant" => Ok(GambleClass::RiskDominant),
            "safe_dominant" => Ok(GambleClass::SafeDominant),
            _ => Err(Error::InvalidInput(format!("unknown gamble class `{s}`"))),
        }
    }
}

/// Evenly spaced ω values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for OmegaGrid {
    fn default() -> Self {
        OmegaGrid {
            lo: -10.0,
            hi: 10.0,
            step: 0.01,
        }
    }
}

impl OmegaGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        OmegaGrid { lo, hi, step }
    }

    pub fn len(&self) -> usize {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step > 0.0 && self.lo <= self.hi) {
            return 0;
        }
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> f64 {
        (self.lo + i as f64 * self.step).min(self.hi)
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok((0..n).map(|i| self.point(i)).collect())
    }

    /// Same range at half the step.
    pub fn refined(&self) -> OmegaGrid {
        OmegaGrid {
            step: self.step / 2.0,
            ..*self
        }
    }
}

/// Gaps within this distance of zero favour neither option.
pub const TIE_TOL: f64 = 1e-9;

/// Classifies a gamble by the sign of the utility gap over the grid.
///
/// Near-ties are ignored; a gamble with no strict preference anywhere is
/// reported as mixed.
pub fn classify_gamble(g: &Gamble, grid: &OmegaGrid) -> Result<GambleClass> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    let (mut play_better, mut fold_better) = (false, false);
    for i in 0..n {
        let gap = g.utility_gap(grid.point(i));
        if gap > TIE_TOL {
            play_better = true;
        } else if gap < -TIE_TOL {
            fold_better = true;
        }
        if play_better && fold_better {
            return Ok(GambleClass::Mixed);
        }
    }
    Ok(match (play_better, fold_better) {
        (true, false) => GambleClass::RiskDominant,
        (false, true) => GambleClass::SafeDominant,
        _ => GambleClass::Mixed,
    })
}
