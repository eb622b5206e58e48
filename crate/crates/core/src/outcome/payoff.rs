use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::choice::{Choice, PreflopDecision};
use crate::error::{Error, Result};

const MIN_OBSERVATIONS: usize = 3;

/// Ordinary least squares fit with its in-sample R².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    /// Regressor names; the first is always `intercept`.
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub n: usize,
}

impl Regression {
    /// Fits `y ≈ X β` where each row of `x` excludes the intercept column.
    pub fn fit(terms: &[&str], x: &[Vec<f64>], y: &[f64]) -> Result<Regression> {
        let k = terms.len() + 1;
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        if y.len() < MIN_OBSERVATIONS.max(k) {
            return Err(Error::InvalidInput(format!(
                "regression needs at least {} observations, got {}",
                MIN_OBSERVATIONS.max(k),
                y.len()
            )));
        }
        if let Some(row) = x.iter().find(|r| r.len() != k - 1) {
            return Err(Error::DimensionMismatch {
                expected: k - 1,
                actual: row.len(),
            });
        }
        let n = y.len();
        let design = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
        let rhs = DVector::from_column_slice(y);

        // Scale columns so the rank test is independent of units.
        let scales: Vec<f64> = (0..k)
            .map(|j| design.column(j).norm().max(f64::MIN_POSITIVE))
            .collect();
        let mut scaled = design.clone();
        for (j, s) in scales.iter().enumerate() {
            scaled.column_mut(j).unscale_mut(*s);
        }
        let qr = scaled.qr();
        let r = qr.r();
        let diag_max = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
        if (0..k).any(|i| r[(i, i)].abs() <= 1e-10 * diag_max.max(1.0)) {
            return Err(Error::RankDeficient(format!("design over {:?} is (nearly) collinear", terms)));
        }
        let qty = qr.q().transpose() * &rhs;
        let beta_scaled = r
            .solve_upper_triangular(&qty)
            .ok_or_else(|| Error::RankDeficient("triangular solve failed".into()))?;
        let coefficients: Vec<f64> = (0..k).map(|j| beta_scaled[j] / scales[j]).collect();

        let fitted = &design * DVector::from_column_slice(&coefficients);
        let mean = y.iter().sum::<f64>() / n as f64;
        let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let ss_res: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
        let r_squared = if ss_tot > 0.0 {
            1.0 - ss_res / ss_tot
        } else {
            1.0
        };
        let mut names = vec!["intercept".to_string()];
        names.extend(terms.iter().map(|t| t.to_string()));
        Ok(Regression {
            terms: names,
            coefficients,
            r_squared,
            n,
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() + 1 != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len() - 1,
                actual: x.len(),
            });
        }
        Ok(self.coefficients[0] + x.iter().zip(&self.coefficients[1..]).map(|(a, b)| a * b).sum::<f64>())
    }
}

/// Amount won given a win, and amount lost given a loss, for hands the
/// player entered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffModels {
    /// `amount won ~ 1 + preflop_pot + n_active`
    pub win: Regression,
    /// `amount lost ~ 1 + own_contribution`
    pub loss: Regression,
}

fn win_regressors(d: &PreflopDecision) -> Vec<f64> {
    vec![d.preflop_pot as f64, d.n_active as f64]
}

fn loss_regressors(d: &PreflopDecision) -> Vec<f64> {
    vec![d.own_contribution as f64]
}

impl PayoffModels {
    pub fn predict_win_amount(&self, d: &PreflopDecision) -> Result<f64> {
        self.win.predict(&win_regressors(d))
    }

    pub fn predict_loss_amount(&self, d: &PreflopDecision) -> Result<f64> {
        self.loss.predict(&loss_regressors(d))
    }
}

pub fn fit_payoff_models(decisions: &[PreflopDecision]) -> Result<PayoffModels> {
    let played: Vec<&PreflopDecision> = decisions
        .iter()
        .filter(|d| d.is_fittable() && d.choice == Choice::Play)
        .collect();
    let (won, lost): (Vec<&PreflopDecision>, Vec<&PreflopDecision>) = played.iter().partition(|d| d.outcome.won);

    let win = Regression::fit(
        &["preflop_pot", "n_active"],
        &won.iter().map(|d| win_regressors(d)).collect::<Vec<_>>(),
        &won.iter().map(|d| d.outcome.amount as f64).collect::<Vec<_>>(),
    )?;
    let loss = Regression::fit(
        &["own_contribution"],
        &lost.iter().map(|d| loss_regressors(d)).collect::<Vec<_>>(),
        &lost.iter().map(|d| -(d.outcome.amount as f64)).collect::<Vec<_>>(),
    )?;
    log::info!("payoff regressions: win R² {:.3}, loss R² {:.3}", win.r_squared, loss.r_squared);
    Ok(PayoffModels { win, loss })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    /// Solves the normal equations `XᵀX β = Xᵀy` by Gauss–Jordan elimination.
    fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let k = x[0].len() + 1;
        let row = |i: usize| {
            let mut r = vec![1.0];
            r.extend_from_slice(&x[i]);
            r
        };
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..y.len() {
            let r = row(i);
            for p in 0..k {
                for q in 0..k {
                    a[p][q] += r[p] * r[q];
                }
                a[p][k] += r[p] * y[i];
            }
        }
        for c in 0..k {
            let piv = (c..k).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
            a.swap(c, piv);
            for r in 0..k {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for q in c..=k {
                        a[r][q] -= f * a[c][q];
                    }
                }
            }
        }
        (0..k).map(|i| a[i][k] / a[i][i]).collect()
    }

    #[test]
    fn exact_linear_relation_is_recovered() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![150.0 + 37.0 * i as f64, (2 + i % 5) as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] + 100.0).collect();
        let reg = Regression::fit(&["pot", "active"], &x, &y).unwrap();
        let expected = [100.0, 2.0, 0.0];
        for (c, e) in reg.coefficients.iter().zip(expected) {
            assert!((c - e).abs() < 1e-8, "{:?}", reg.coefficients);
        }
        assert!((reg.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..10 {
            let n = rng.random_range(5..30);
            let k = rng.random_range(1..4);
            let x: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.random_range(-50.0..500.0)).collect()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..1000.0)).collect();
            let names = vec!["x"; k];
            let reg = Regression::fit(&names, &x, &y).unwrap();
            let oracle = normal_equations(&x, &y);
            for (a, b) in reg.coefficients.iter().zip(&oracle) {
                assert!((a - b).abs() <= 1e-7 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn collinear_design_is_rank_deficient() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 6.0]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(Regression::fit(&["a", "b"], &x, &y), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn too_few_observations() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(Regression::fit(&["a"], &x, &[1.0, 2.0]), Err(Error::InvalidInput(_))));
    }
}
