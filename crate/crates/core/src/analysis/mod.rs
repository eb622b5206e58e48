//! Observed-rationality tables, utility-gap summaries, fold rates and
//! between-group parameter comparisons.

mod bootstrap;
mod fold_rates;
mod report;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bootstrap::{compare_parameters, BootstrapConfig, ComparisonResult, Parameter, BOOTSTRAP_METHOD};
pub use fold_rates::{fold_rate_report, FoldRateCell};
pub use report::{write_reports, ReportInputs, REPORT_FILES};

use crate::choice::{Agent, Choice, TriggerState};
use crate::error::{Error, Result};
use crate::outcome::ChoiceRecord;
use crate::rum::{classify_gamble, Gamble, GambleClass, OmegaGrid, RumFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationality {
    Rational,
    Irrational,
}

/// A choice is rational when it picks the option with the (weakly) larger
/// expected CRRA utility at `omega`; exact ties make either choice rational.
pub fn rational_label(gamble: &Gamble, choice: Choice, omega: f64) -> Rationality {
    label_from_gap(gamble.utility_gap(omega), choice)
}

fn label_from_gap(gap: f64, choice: Choice) -> Rationality {
    let ok = match choice {
        Choice::Play => gap >= 0.0,
        Choice::Fold => gap <= 0.0,
    };
    if ok {
        Rationality::Rational
    } else {
        Rationality::Irrational
    }
}

/// Where a group's parameters came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitSource {
    /// Fitted on the group's own decisions.
    State,
    /// The group's fit failed; the agent's all-state fit stands in.
    Pooled,
}

/// Expected parameters of one agent × state fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub agent: Agent,
    pub state: TriggerState,
    pub omega_mean: f64,
    pub omega_sd: f64,
    pub lambda_mean: f64,
    pub lambda_sd: f64,
    pub n_valid: usize,
    pub n_observations: usize,
    pub source: FitSource,
}

impl FitSummary {
    pub fn from_fit(agent: Agent, state: TriggerState, fit: &RumFit, source: FitSource) -> Self {
        FitSummary {
            agent,
            state,
            omega_mean: fit.omega_mean,
            omega_sd: fit.omega_sd,
            lambda_mean: fit.lambda_mean,
            lambda_sd: fit.lambda_sd,
            n_valid: fit.n_valid,
            n_observations: fit.n_observations,
            source,
        }
    }
}

/// Fits keyed by agent and state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FitTable {
    pub fits: Vec<FitSummary>,
}

impl FitTable {
    pub fn get(&self, agent: Agent, state: TriggerState) -> Option<&FitSummary> {
        self.fits.iter().find(|f| f.agent == agent && f.state == state)
    }

    pub fn omega(&self, agent: Agent, state: TriggerState) -> Result<f64> {
        self.get(agent, state)
            .map(|f| f.omega_mean)
            .ok_or_else(|| Error::InvalidInput(format!("no fit for {agent} in state {state}")))
    }
}

/// A choice record with its class, utility gap at the group's expected ω,
/// and rationality label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotated {
    pub agent: Agent,
    pub trigger: TriggerState,
    pub choice: Choice,
    pub class: GambleClass,
    pub gap: f64,
    pub rationality: Rationality,
}

pub fn annotate(records: &[ChoiceRecord], fits: &FitTable, grid: &OmegaGrid) -> Result<Vec<Annotated>> {
    records
        .par_iter()
        .map(|r| {
            let omega = fits.omega(r.agent, r.trigger)?;
            let gap = r.gamble.utility_gap(omega);
            Ok(Annotated {
                agent: r.agent,
                trigger: r.trigger,
                choice: r.choice,
                class: classify_gamble(&r.gamble, grid)?,
                gap,
                rationality: label_from_gap(gap, r.choice),
            })
        })
        .collect()
}

/// One class × choice cell for one agent, pooled over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalityCell {
    pub agent: Agent,
    pub class: GambleClass,
    pub choice: Choice,
    pub n: usize,
    pub rational: usize,
    pub irrational: usize,
    /// Share of the agent's decisions in this cell; `None` if the agent has
    /// no decisions.
    pub proportion: Option<f64>,
}

/// Per agent, the share of decisions in each class × choice cell
/// with rational/irrational counts. All twelve cells are always present.
pub fn rationality_table(annotated: &[Annotated]) -> Vec<RationalityCell> {
    let mut counts: BTreeMap<(Agent, GambleClass, Choice), (usize, usize)> = BTreeMap::new();
    let mut totals: BTreeMap<Agent, usize> = BTreeMap::new();
    for a in annotated {
        let c = counts.entry((a.agent, a.class, a.choice)).or_default();
        match a.rationality {
            Rationality::Rational => c.0 += 1,
            Rationality::Irrational => c.1 += 1,
        }
        *totals.entry(a.agent).or_default() += 1;
    }
    let mut out = Vec::with_capacity(12);
    for agent in Agent::ALL {
        let total = totals.get(&agent).copied().unwrap_or(0);
        for class in GambleClass::ALL {
            for choice in [Choice::Fold, Choice::Play] {
                let (rational, irrational) = counts.get(&(agent, class, choice)).copied().unwrap_or((0, 0));
                let n = rational + irrational;
                out.push(RationalityCell {
                    agent,
                    class,
                    choice,
                    n,
                    rational,
                    irrational,
                    proportion: (total > 0).then(|| n as f64 / total as f64),
                });
            }
        }
    }
    out
}

/// Mean utility gap of one agent × state × class cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuDiffCell {
    pub agent: Agent,
    pub state: TriggerState,
    pub class: GambleClass,
    pub n: usize,
    pub mean_gap: Option<f64>,
}

pub fn eu_diff_table(annotated: &[Annotated]) -> Vec<EuDiffCell> {
    let mut acc: BTreeMap<(Agent, TriggerState, GambleClass), (usize, f64)> = BTreeMap::new();
    for a in annotated {
        let e = acc.entry((a.agent, a.trigger, a.class)).or_default();
        e.0 += 1;
        e.1 += a.gap;
    }
    let mut out = Vec::with_capacity(18);
    for agent in Agent::ALL {
        for state in TriggerState::ALL {
            for class in GambleClass::ALL {
                let (n, sum) = acc.get(&(agent, state, class)).copied().unwrap_or((0, 0.0));
                out.push(EuDiffCell {
                    agent,
                    state,
                    class,
                    n,
                    mean_gap: (n > 0).then(|| sum / n as f64),
                });
            }
        }
    }
    out
}

/// Interior bins evenly cover `[-limit, limit]`; gaps beyond collapse onto
/// point masses at `±limit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    /// Odd, so that zero sits in the middle of a bin.
    pub interior_bins: usize,
    pub limit: f64,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        HistogramSpec {
            interior_bins: 21,
            limit: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinKind {
    LowerMass,
    Interior,
    UpperMass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub agent: Agent,
    pub kind: BinKind,
    pub lo: f64,
    pub hi: f64,
    pub rational: usize,
    pub irrational: usize,
}

impl HistogramSpec {
    fn check(&self) -> Result<()> {
        if self.interior_bins == 0 || self.interior_bins % 2 == 0 || !(self.limit > 0.0) {
            return Err(Error::InvalidInput(format!(
                "histogram needs an odd number of bins and a positive limit, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Slot index: 0 is the lower mass, `interior_bins + 1` the upper mass.
    fn slot(&self, gap: f64) -> usize {
        if gap < -self.limit {
            0
        } else if gap > self.limit {
            self.interior_bins + 1
        } else {
            let width = 2.0 * self.limit / self.interior_bins as f64;
            let i = ((gap + self.limit) / width).floor() as usize;
            1 + i.min(self.interior_bins - 1)
        }
    }
}

/// Counts of `u_play − u_fold` by rationality, per agent.
pub fn utility_gap_histogram(annotated: &[Annotated], spec: &HistogramSpec) -> Result<Vec<HistogramBin>> {
    spec.check()?;
    let slots = spec.interior_bins + 2;
    let width = 2.0 * spec.limit / spec.interior_bins as f64;
    let mut out = Vec::with_capacity(2 * slots);
    for agent in Agent::ALL {
        let mut counts = vec![(0usize, 0usize); slots];
        for a in annotated.iter().filter(|a| a.agent == agent) {
            let c = &mut counts[spec.slot(a.gap)];
            match a.rationality {
                Rationality::Rational => c.0 += 1,
                Rationality::Irrational => c.1 += 1,
            }
        }
        for (i, (rational, irrational)) in counts.into_iter().enumerate() {
            let (kind, lo, hi) = if i == 0 {
                (BinKind::LowerMass, -spec.limit, -spec.limit)
            } else if i == slots - 1 {
                (BinKind::UpperMass, spec.limit, spec.limit)
            } else {
                let lo = -spec.limit + (i - 1) as f64 * width;
                (BinKind::Interior, lo, lo + width)
            };
            out.push(HistogramBin {
                agent,
                kind,
                lo,
                hi,
                rational,
                irrational,
            });
        }
    }
    Ok(out)
}
