use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::Annotated;
use crate::choice::{Agent, Choice, TriggerState};
use crate::rum::GambleClass;

const ALPHA: f64 = 0.05;

/// Fold rate of one agent × state × class cell (`class = "all"` pools
/// classes), compared against the same agent and class in the neutral state
/// with a two-proportion z-test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRateCell {
    pub agent: Agent,
    pub state: TriggerState,
    pub class: String,
    pub n: usize,
    pub folds: usize,
    pub rate: Option<f64>,
    pub neutral_rate: Option<f64>,
    pub difference: Option<f64>,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
    pub significant: bool,
}

/// `(z, two-sided p)` for H0: equal proportions, using the pooled estimate.
pub(crate) fn two_proportion_test(x1: usize, n1: usize, x2: usize, n2: usize) -> Option<(f64, f64)> {
    if n1 == 0 || n2 == 0 {
        return None;
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1f + n2f);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f)).sqrt();
    if !(se > 0.0) {
        return None;
    }
    let z = (x1 as f64 / n1f - x2 as f64 / n2f) / se;
    let normal = Normal::standard();
    Some((z, 2.0 * normal.sf(z.abs())))
}

pub fn fold_rate_report(annotated: &[Annotated]) -> Vec<FoldRateCell> {
    // key class: None = all classes
    let mut counts: BTreeMap<(Agent, TriggerState, Option<GambleClass>), (usize, usize)> = BTreeMap::new();
    for a in annotated {
        let fold = (a.choice == Choice::Fold) as usize;
        for key in [(a.agent, a.trigger, Some(a.class)), (a.agent, a.trigger, None)] {
            let c = counts.entry(key).or_default();
            c.0 += 1;
            c.1 += fold;
        }
    }
    let classes: Vec<Option<GambleClass>> = std::iter::once(None).chain(GambleClass::ALL.map(Some)).collect();
    let mut out = Vec::new();
    for agent in Agent::ALL {
        for &class in &classes {
            let (nn, nf) = counts.get(&(agent, TriggerState::Neutral, class)).copied().unwrap_or((0, 0));
            let neutral_rate = (nn > 0).then(|| nf as f64 / nn as f64);
            for state in TriggerState::ALL {
                let (n, folds) = counts.get(&(agent, state, class)).copied().unwrap_or((0, 0));
                let rate = (n > 0).then(|| folds as f64 / n as f64);
                let test = if state == TriggerState::Neutral {
                    None
                } else {
                    two_proportion_test(folds, n, nf, nn)
                };
                out.push(FoldRateCell {
                    agent,
                    state,
                    class: class.map_or("all", |c| c.as_str()).to_string(),
                    n,
                    folds,
                    rate,
                    neutral_rate,
                    difference: match (state, rate, neutral_rate) {
                        (TriggerState::Neutral, ..) => None,
                        (_, Some(r), Some(b)) => Some(r - b),
                        _ => None,
                    },
                    z: test.map(|t| t.0),
                    p_value: test.map(|t| t.1),
                    significant: test.is_some_and(|t| t.1 < ALPHA),
                });
            }
        }
    }
    out
}
