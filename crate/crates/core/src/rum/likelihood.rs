use serde::{Deserialize, Serialize};

use super::gamble::{log_sigmoid, Gamble, RumParams};
use super::crra::shifted_utility;
use crate::choice::Choice;
use crate::error::{Error, Result};

/// A gamble together with the choice actually made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub gamble: Gamble,
    pub choice: Choice,
}

impl Observation {
    pub fn new(gamble: Gamble, choice: Choice) -> Self {
        Observation { gamble, choice }
    }
}

/// Observation with log-payoffs precomputed for repeated evaluation.
#[derive(Debug, Clone, Copy)]
struct Row {
    sign: f64,
    play: [(f64, f64); 2],
    fold: (f64, f64),
}

impl Row {
    fn new(o: &Observation) -> Self {
        let play = o.gamble.play();
        let fold = o.gamble.fold()[0];
        Row {
            sign: match o.choice {
                Choice::Play => 1.0,
                Choice::Fold => -1.0,
            },
            play: [(play[0].p, play[0].v.ln()), (play[1].p, play[1].v.ln())],
            fold: (fold.p, fold.v.ln()),
        }
    }

    #[inline]
    fn gap_and_slope(&self, omega: f64) -> (f64, f64) {
        let (u0, d0) = shifted_utility(self.play[0].1, omega);
        let (u1, d1) = shifted_utility(self.play[1].1, omega);
        let (uf, df) = shifted_utility(self.fold.1, omega);
        (
            self.play[0].0 * u0 + self.play[1].0 * u1 - self.fold.0 * uf,
            self.play[0].0 * d0 + self.play[1].0 * d1 - self.fold.0 * df,
        )
    }
}

/// Prepared data for the choice log-likelihood.
#[derive(Debug, Clone)]
pub struct LikelihoodData {
    rows: Vec<Row>,
}

impl LikelihoodData {
    pub fn new(observations: &[Observation]) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::Empty("no observations to fit"));
        }
        Ok(LikelihoodData {
            rows: observations.iter().map(Row::new).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The rows at `indices`, repeats allowed.
    pub fn resample(&self, indices: &[usize]) -> LikelihoodData {
        LikelihoodData {
            rows: indices.iter().map(|&i| self.rows[i]).collect(),
        }
    }

    pub fn log_likelihood(&self, params: RumParams) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let (gap, _) = r.gap_and_slope(params.omega);
                log_sigmoid(r.sign * params.lambda * gap)
            })
            .sum()
    }

    /// Total log-likelihood and its gradient in `(ω, ln λ)`.
    pub fn value_and_gradient(&self, omega: f64, log_lambda: f64) -> (f64, [f64; 2]) {
        let lambda = log_lambda.exp();
        let mut value = 0.0;
        let mut grad = [0.0; 2];
        for r in &self.rows {
            let (gap, slope) = r.gap_and_slope(omega);
            let x = lambda * gap;
            let sx = r.sign * x;
            // ln σ(sx) and σ(-sx) share e^{-|sx|}
            let e = (-sx.abs()).exp();
            value += sx.min(0.0) - e.ln_1p();
            let tail = if sx >= 0.0 { e / (1.0 + e) } else { 1.0 / (1.0 + e) };
            let dx = r.sign * tail;
            grad[0] += dx * lambda * slope;
            grad[1] += dx * x;
        }
        (value, grad)
    }
}

/// `Σ ln P(y_n | g_n)` over the observations.
pub fn log_likelihood(params: RumParams, observations: &[Observation]) -> Result<f64> {
    if !(params.lambda >= 0.0) {
        return Err(Error::InvalidInput(format!("precision {} must be >= 0", params.lambda)));
    }
    let value = LikelihoodData::new(observations)?.log_likelihood(params);
    if value.is_nan() {
        return Err(Error::NonFinite("log-likelihood"));
    }
    Ok(value)
}
