//! Box-constrained BFGS with a projected backtracking line search.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    /// Gradient below tolerance with no bound active.
    Converged,
    /// Stopped against a bound that the objective keeps pushing toward.
    Boundary,
    /// Gradient vanished where the objective has no curvature and no
    /// descent ray reaches a bound.
    Flat,
    MaxIterations,
    LineSearchFailed,
    NonFinite,
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerOptions {
    pub gradient_tol: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub status: ConvergenceStatus,
}

impl Minimum {
    pub fn gradient_norm(&self) -> f64 {
        norm(&self.gradient)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` over the box `[lo, hi]` starting from `x0`.
///
/// `f` returns the value and gradient. Coordinates sitting on a bound with
/// the gradient pointing outward are held fixed; when the remaining
/// (projected) gradient falls below tolerance the run stops, as `Converged`
/// if no bound is held and as `Boundary` otherwise.
pub fn minimize_bounded<F>(mut f: F, x0: &[f64], lo: &[f64], hi: &[f64], opts: OptimizerOptions) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let project = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    let mut x = x0.to_vec();
    project(&mut x);
    let (mut fx, mut g) = f(&x);
    let identity = |scale: f64| {
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = scale;
        }
        h
    };
    let mut h = identity(1.0);
    let mut scaled = false;

    let finish = |x: Vec<f64>, value, gradient, iterations, status| Minimum {
        x,
        value,
        gradient,
        iterations,
        status,
    };

    for iter in 0..opts.max_iterations {
        if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return finish(x, fx, g, iter, ConvergenceStatus::NonFinite);
        }
        let active: Vec<bool> = (0..n)
            .map(|i| (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0))
            .collect();
        let projected: Vec<f64> = (0..n).map(|i| if active[i] { 0.0 } else { g[i] }).collect();
        let any_active = active.iter().any(|&a| a);
        if norm(&projected) <= opts.gradient_tol {
            let status = if any_active {
                ConvergenceStatus::Boundary
            } else {
                ConvergenceStatus::Converged
            };
            return finish(x, fx, g, iter, status);
        }

        let mut d: Vec<f64> = (0..n)
            .map(|i| {
                if active[i] {
                    return 0.0;
                }
                -(0..n)
                    .filter(|&j| !active[j])
                    .map(|j| h[i * n + j] * g[j])
                    .sum::<f64>()
            })
            .collect();
        if dot(&d, &g) >= 0.0 {
            h = identity(1.0);
            scaled = false;
            d = projected.iter().map(|v| -v).collect();
        }

        // projected backtracking (Armijo), expanding while a full step
        // keeps paying off so flat regions are crossed quickly
        let try_step = |f: &mut F, alpha: f64| {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            project(&mut trial);
            let step: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &step);
            if decrease >= 0.0 {
                return None;
            }
            let (ft, gt) = f(&trial);
            (ft.is_finite() && ft <= fx + 1e-4 * decrease).then_some((trial, ft, gt, step))
        };
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            if let Some(hit) = try_step(&mut f, alpha) {
                accepted = Some(hit);
                break;
            }
            alpha *= 0.5;
        }
        if alpha == 1.0 {
            for _ in 0..40 {
                let better = match (&accepted, try_step(&mut f, 2.0 * alpha)) {
                    (Some(cur), Some(next)) if next.1 < cur.1 && next.3 != cur.3 => next,
                    _ => break,
                };
                accepted = Some(better);
                alpha *= 2.0;
            }
        }
        let Some((x_new, f_new, g_new, s)) = accepted else {
            let status = if any_active {
                ConvergenceStatus::Boundary
            } else {
                ConvergenceStatus::LineSearchFailed
            };
            return finish(x, fx, g, iter, status);
        };

        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let hits_bound = (0..n).any(|i| (x_new[i] <= lo[i] || x_new[i] >= hi[i]) && !(x[i] <= lo[i] || x[i] >= hi[i]));
        if hits_bound {
            h = identity(1.0);
            scaled = false;
        } else if sy > 1e-12 * norm(&s) * norm(&y) {
            if !scaled {
                h = identity(sy / dot(&y, &y));
                scaled = true;
            }
            // H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    finish(x, fx, g, opts.max_iterations, ConvergenceStatus::MaxIterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTS: OptimizerOptions = OptimizerOptions {
        gradient_tol: 1e-8,
        max_iterations: 500,
    };

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        (f, g)
    }

    #[test]
    fn finds_interior_minimum() {
        let m = minimize_bounded(rosenbrock, &[-1.2, 1.0], &[-5.0, -5.0], &[5.0, 5.0], OPTS);
        assert_eq!(m.status, ConvergenceStatus::Converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn stops_on_active_bound() {
        // minimum of (x-3)^2 + (y+1)^2 over [0,2]x[0,2] is (2, 0)
        let f = |x: &[f64]| {
            let v = (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2);
            (v, vec![2.0 * (x[0] - 3.0), 2.0 * (x[1] + 1.0)])
        };
        let m = minimize_bounded(f, &[1.0, 1.0], &[0.0, 0.0], &[2.0, 2.0], OPTS);
        assert_eq!(m.status, ConvergenceStatus::Boundary);
        assert_eq!(m.x, vec![2.0, 0.0]);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let m = minimize_bounded(
            rosenbrock,
            &[-1.2, 1.0],
            &[-5.0, -5.0],
            &[5.0, 5.0],
            OptimizerOptions {
                gradient_tol: 1e-12,
                max_iterations: 3,
            },
        );
        assert_eq!(m.status, ConvergenceStatus::MaxIterations);
        assert_eq!(m.iterations, 3);
    }
}
