use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureEncoder, FeatureVector};
use crate::choice::{Choice, PreflopDecision};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};

const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WinModelKind {
    Logistic,
    Mlp,
}

impl std::str::FromStr for WinModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(WinModelKind::Logistic),
            "mlp" | "mlp-1-hidden" => Ok(WinModelKind::Mlp),
            _ => Err(Error::InvalidInput(format!("unknown win model `{s}`"))),
        }
    }
}

/// Which decisions the win model learns from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainingSet {
    /// Only hands the player entered; a fold has no showdown to learn from.
    Played,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WinModelConfig {
    pub kind: WinModelKind,
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub test_fraction: f64,
    pub training_set: TrainingSet,
    pub seed: u64,
}

impl Default for WinModelConfig {
    fn default() -> Self {
        WinModelConfig {
            kind: WinModelKind::Mlp,
            hidden: 16,
            epochs: 40,
            batch_size: 64,
            learning_rate: 0.01,
            l2: 1e-4,
            test_fraction: 0.2,
            training_set: TrainingSet::Played,
            seed: 0,
        }
    }
}

/// Network weights. Inputs are binary, so the first layer is a sum of the
/// weight columns of the active cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Network {
    Logistic {
        weights: Vec<f64>,
        bias: f64,
    },
    /// One tanh hidden layer; `w1` is row-major `hidden × dim`.
    Mlp {
        dim: usize,
        hidden: usize,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: f64,
    },
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl Network {
    pub fn zeros_logistic(dim: usize) -> Network {
        Network::Logistic {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    fn init(kind: WinModelKind, dim: usize, hidden: usize, rng: &mut impl Rng) -> Network {
        match kind {
            WinModelKind::Logistic => Network::zeros_logistic(dim),
            WinModelKind::Mlp => {
                let scale = 0.5;
                let mut draw = |n: usize| (0..n).map(|_| rng.random_range(-scale..scale)).collect::<Vec<f64>>();
                Network::Mlp {
                    dim,
                    hidden,
                    w1: draw(hidden * dim),
                    b1: vec![0.0; hidden],
                    w2: draw(hidden),
                    b2: 0.0,
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Network::Logistic { weights, .. } => weights.len(),
            Network::Mlp { dim, .. } => *dim,
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            Network::Logistic { weights, .. } => weights.len() + 1,
            Network::Mlp { w1, b1, w2, .. } => w1.len() + b1.len() + w2.len() + 1,
        }
    }

    /// All parameters flattened in a fixed order.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Network::Logistic { weights, bias } => {
                let mut p = weights.clone();
                p.push(*bias);
                p
            }
            Network::Mlp { w1, b1, w2, b2, .. } => {
                let mut p = Vec::with_capacity(self.n_params());
                p.extend_from_slice(w1);
                p.extend_from_slice(b1);
                p.extend_from_slice(w2);
                p.push(*b2);
                p
            }
        }
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params());
        match self {
            Network::Logistic { weights, bias } => {
                let n = weights.len();
                weights.copy_from_slice(&p[..n]);
                *bias = p[n];
            }
            Network::Mlp { w1, b1, w2, b2, .. } => {
                let (a, rest) = p.split_at(w1.len());
                let (b, rest) = rest.split_at(b1.len());
                let (c, rest) = rest.split_at(w2.len());
                w1.copy_from_slice(a);
                b1.copy_from_slice(b);
                w2.copy_from_slice(c);
                *b2 = rest[0];
            }
        }
    }

    fn check_dim(&self, x: &FeatureVector) -> Result<()> {
        if x.dim != self.dim() || x.active.iter().any(|&i| i >= x.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim,
            });
        }
        Ok(())
    }

    fn hidden_layer(w1: &[f64], b1: &[f64], dim: usize, x: &FeatureVector) -> Vec<f64> {
        b1.iter()
            .enumerate()
            .map(|(j, b)| (b + x.active.iter().map(|&i| w1[j * dim + i]).sum::<f64>()).tanh())
            .collect()
    }

    /// Pre-sigmoid score.
    pub fn logit(&self, x: &FeatureVector) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match self {
            Network::Logistic { weights, bias } => bias + x.active.iter().map(|&i| weights[i]).sum::<f64>(),
            Network::Mlp { dim, w1, b1, w2, b2, .. } => {
                let h = Self::hidden_layer(w1, b1, *dim, x);
                b2 + h.iter().zip(w2).map(|(a, b)| a * b).sum::<f64>()
            }
        })
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        Ok(sigmoid(self.logit(x)?).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR))
    }

    /// Mean binary cross-entropy plus `l2/2·‖w‖²`, and its gradient with
    /// respect to [`Network::params`]. Biases are not penalized.
    pub fn loss_and_gradient(&self, xs: &[&FeatureVector], ys: &[bool], l2: f64) -> (f64, Vec<f64>) {
        let n = xs.len().max(1) as f64;
        let mut grad = vec![0.0; self.n_params()];
        let mut loss = 0.0;
        match self {
            Network::Logistic { weights, bias } => {
                let nw = weights.len();
                for (x, &y) in xs.iter().zip(ys) {
                    let z = bias + x.active.iter().map(|&i| weights[i]).sum::<f64>();
                    loss += softplus(z) - if y { z } else { 0.0 };
                    let dz = (sigmoid(z) - y as u8 as f64) / n;
                    for &i in &x.active {
                        grad[i] += dz;
                    }
                    grad[nw] += dz;
                }
                loss /= n;
                for i in 0..nw {
                    loss += 0.5 * l2 * weights[i] * weights[i];
                    grad[i] += l2 * weights[i];
                }
            }
            Network::Mlp {
                dim,
                hidden,
                w1,
                b1,
                w2,
                b2,
            } => {
                let (dim, hidden) = (*dim, *hidden);
                let (o_b1, o_w2, o_b2) = (w1.len(), w1.len() + hidden, w1.len() + 2 * hidden);
                for (x, &y) in xs.iter().zip(ys) {
                    let h = Self::hidden_layer(w1, b1, dim, x);
                    let z = b2 + h.iter().zip(w2).map(|(a, b)| a * b).sum::<f64>();
                    loss += softplus(z) - if y { z } else { 0.0 };
                    let dz = (sigmoid(z) - y as u8 as f64) / n;
                    grad[o_b2] += dz;
                    for j in 0..hidden {
                        grad[o_w2 + j] += dz * h[j];
                        let da = dz * w2[j] * (1.0 - h[j] * h[j]);
                        grad[o_b1 + j] += da;
                        for &i in &x.active {
                            grad[j * dim + i] += da;
                        }
                    }
                }
                loss /= n;
                for (i, w) in w1.iter().enumerate() {
                    loss += 0.5 * l2 * w * w;
                    grad[i] += l2 * w;
                }
                for (j, w) in w2.iter().enumerate() {
                    loss += 0.5 * l2 * w * w;
                    grad[o_w2 + j] += l2 * w;
                }
            }
        }
        (loss, grad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinModel {
    pub kind: WinModelKind,
    pub encoder: FeatureEncoder,
    pub network: Network,
    pub epochs: usize,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    /// Share of held-out hands whose outcome the model calls correctly;
    /// `None` when nothing was held out.
    pub heldout_accuracy: Option<f64>,
    /// Majority-class share of the held-out set.
    pub heldout_majority: Option<f64>,
}

impl WinModel {
    pub fn predict(&self, x: &FeatureVector) -> Result<f64> {
        self.network.predict(x)
    }

    pub fn predict_decision(&self, d: &PreflopDecision) -> Result<f64> {
        self.predict(&self.encoder.encode(d)?)
    }

    /// Checks that a deserialized model is internally consistent.
    pub fn check(&self) -> Result<()> {
        if self.network.dim() != self.encoder.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.encoder.dim(),
                actual: self.network.dim(),
            });
        }
        if let Network::Mlp { dim, hidden, w1, b1, w2, .. } = &self.network {
            if w1.len() != dim * hidden || b1.len() != *hidden || w2.len() != *hidden {
                return Err(Error::InvalidInput("inconsistent hidden-layer shapes".into()));
            }
        }
        if self.network.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("win model weights"));
        }
        Ok(())
    }
}

/// Trains on the decisions selected by `cfg.training_set`, labelled by
/// whether the player won the hand.
pub fn fit_win_model(decisions: &[PreflopDecision], cfg: &WinModelConfig) -> Result<WinModel> {
    let selected: Vec<&PreflopDecision> = decisions
        .iter()
        .filter(|d| d.is_fittable())
        .filter(|d| cfg.training_set == TrainingSet::All || d.choice == Choice::Play)
        .collect();
    if selected.is_empty() {
        return Err(Error::Empty("no decisions to train the win model on"));
    }
    let encoder = FeatureEncoder::new(selected.iter().map(|d| d.player.clone()).collect());
    let xs = selected.iter().map(|d| encoder.encode(d)).collect::<Result<Vec<_>>>()?;
    let ys: Vec<bool> = selected.iter().map(|d| d.outcome.won).collect();
    train(encoder, &xs, &ys, cfg)
}

/// Trains on pre-encoded features.
pub fn train(encoder: FeatureEncoder, xs: &[FeatureVector], ys: &[bool], cfg: &WinModelConfig) -> Result<WinModel> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if !(0.0..1.0).contains(&cfg.test_fraction) {
        return Err(Error::InvalidInput(format!("test fraction {} outside [0, 1)", cfg.test_fraction)));
    }
    let dim = encoder.dim();
    if let Some(x) = xs.iter().find(|x| x.dim != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: x.dim,
        });
    }

    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.shuffle(&mut stream_rng(derive_seed(cfg.seed, "win-split"), 0));
    let n_test = (cfg.test_fraction * xs.len() as f64).round() as usize;
    let (test_idx, train_idx) = order.split_at(n_test);
    let n_pos = train_idx.iter().filter(|&&i| ys[i]).count();
    if n_pos == 0 || n_pos == train_idx.len() {
        return Err(Error::SingleClass);
    }

    let mut rng = stream_rng(derive_seed(cfg.seed, "win-train"), 0);
    let mut net = Network::init(cfg.kind, dim, cfg.hidden.max(1), &mut rng);
    let mut params = net.params();
    let (mut m, mut v) = (vec![0.0; params.len()], vec![0.0; params.len()]);
    let (beta1, beta2, eps) = (0.9f64, 0.999f64, 1e-8);
    let mut step = 0i32;
    let mut batch_order = train_idx.to_vec();
    let batch_size = cfg.batch_size.max(1);
    for _ in 0..cfg.epochs {
        batch_order.shuffle(&mut rng);
        for batch in batch_order.chunks(batch_size) {
            let bx: Vec<&FeatureVector> = batch.iter().map(|&i| &xs[i]).collect();
            let by: Vec<bool> = batch.iter().map(|&i| ys[i]).collect();
            let (_, g) = net.loss_and_gradient(&bx, &by, cfg.l2);
            step += 1;
            let (c1, c2) = (1.0 - beta1.powi(step), 1.0 - beta2.powi(step));
            for k in 0..params.len() {
                m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                params[k] -= cfg.learning_rate * (m[k] / c1) / ((v[k] / c2).sqrt() + eps);
            }
            net.set_params(&params);
        }
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("win model weights"));
    }

    let (heldout_accuracy, heldout_majority) = if test_idx.is_empty() {
        (None, None)
    } else {
        let mut correct = 0usize;
        for &i in test_idx {
            if (net.predict(&xs[i])? >= 0.5) == ys[i] {
                correct += 1;
            }
        }
        let pos = test_idx.iter().filter(|&&i| ys[i]).count() as f64;
        let n = test_idx.len() as f64;
        (Some(correct as f64 / n), Some(pos.max(n - pos) / n))
    };
    log::info!(
        "win model ({:?}): {} train, {} held out, accuracy {:?}",
        cfg.kind,
        train_idx.len(),
        test_idx.len(),
        heldout_accuracy
    );
    Ok(WinModel {
        kind: cfg.kind,
        encoder,
        network: net,
        epochs: cfg.epochs,
        seed: cfg.seed,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        heldout_accuracy,
        heldout_majority,
    })
}
