//! Soft-margin SVM dual solved by sequential minimal optimisation.
//!
//! ```text
//! min_a  1/2 a' Q a - sum(a)    Q_ij = y_i y_j K_ij
//! s.t.   y' a = 0,  0 <= a_i <= C
//! ```
//!
//! Working pairs are picked with second-order information (maximal gain
//! for the pair), as in libsvm. When `K_ii + K_jj - 2 K_ij <= 0`, which
//! happens on indefinite kernels, the curvature is replaced by a small
//! positive constant so each step still stays inside the box.

use crate::matrix::Matrix;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct SmoOptions {
    /// KKT violation tolerance (maximal violating pair gap).
    pub tol: f64,
    /// Pair updates allowed; `None` means `max(100 * n, 100_000)`.
    pub max_iter: Option<usize>,
    pub record_objective: bool,
}

impl Default for SmoOptions {
    fn default() -> Self {
        SmoOptions {
            tol: 1e-3,
            max_iter: None,
            record_objective: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SmoSolution {
    /// Dual variables, each in `[0, C]`.
    pub alpha: Vec<f64>,
    /// Decision function is `sum_j alpha_j y_j K(x, x_j) + intercept`.
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Dual objective `sum(a) - 1/2 a' Q a` (to be maximised) after each
    /// pair update, starting at 0 for `a = 0`.
    pub objective_trace: Vec<f64>,
}

impl SmoSolution {
    pub fn dual_objective(&self, k: &Matrix, y: &[f64]) -> f64 {
        dual_objective(k, y, &self.alpha)
    }
}

/// `sum(a) - 1/2 a' Q a`.
pub fn dual_objective(k: &Matrix, y: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        let row = k.row(i);
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * row[j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Solves the dual for a square kernel `k`, labels `y` in {-1, +1} and box
/// bound `c > 0`.
pub fn smo_solve(k: &Matrix, y: &[f64], c: f64, opts: SmoOptions) -> SmoSolution {
    let n = y.len();
    let max_iter = opts.max_iter.unwrap_or_else(|| (100 * n).max(100_000));
    let mut alpha = vec![0.0; n];
    // gradient of the minimisation objective: Q a - 1
    let mut grad = vec![-1.0; n];
    let mut trace = Vec::new();
    if opts.record_objective {
        trace.push(0.0);
    }
    let q = |i: usize, j: usize| y[i] * y[j] * k.get(i, j);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // i: maximal violator from the "up" set.
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(y[t], alpha[t], c) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = None;
        let mut best_gain = f64::INFINITY;
        if let Some(i) = i_sel {
            for t in 0..n {
                if !in_low(y[t], alpha[t], c) {
                    continue;
                }
                let v = -y[t] * grad[t];
                gmin = gmin.min(v);
                let b = gmax - v;
                if b > 0.0 {
                    let mut a = k.get(i, i) + k.get(t, t) - 2.0 * k.get(i, t);
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let gain = -(b * b) / a;
                    if gain <= best_gain {
                        best_gain = gain;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            converged = true;
            break;
        };
        if gmax - gmin < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let mut quad = k.get(i, i) + k.get(j, j) - 2.0 * k.get(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * dai + q(t, j) * daj;
        }
        if opts.record_objective {
            // -(1/2 a'Qa - sum a) = -1/2 sum a_t (grad_t - 1)
            let obj: f64 = -0.5
                * alpha
                    .iter()
                    .zip(&grad)
                    .map(|(a, g)| a * (g - 1.0))
                    .sum::<f64>();
            trace.push(obj);
        }
    }

    SmoSolution {
        intercept: -rho(&alpha, &grad, y, c),
        alpha,
        iterations,
        converged,
        objective_trace: trace,
    }
}

/// Offset from the free support vectors, or the middle of the feasible
/// interval when every variable sits at a bound.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decision(k_row: &[f64], sol: &SmoSolution, y: &[f64]) -> f64 {
        k_row
            .iter()
            .zip(&sol.alpha)
            .zip(y)
            .map(|((k, a), yy)| k * a * yy)
            .sum::<f64>()
            + sol.intercept
    }

    #[test]
    fn two_point_identity_kernel() {
        let k = Matrix::identity(2);
        let y = [1.0, -1.0];
        let sol = smo_solve(&k, &y, 1e3, SmoOptions::default());
        assert!(sol.converged);
        assert!(
            (sol.alpha[0] - 1.0).abs() < 1e-9 && (sol.alpha[1] - 1.0).abs() < 1e-9,
            "{:?}",
            sol.alpha
        );
        assert!((decision(k.row(0), &sol, &y) - 1.0).abs() < 1e-9);
        assert!((decision(k.row(1), &sol, &y) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_duplicates_hit_the_box() {
        let k = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let y = [1.0, -1.0];
        let sol = smo_solve(&k, &y, 0.5, SmoOptions::default());
        assert_eq!(sol.alpha, vec![0.5, 0.5]);
    }

    #[test]
    fn box_feasible_on_indefinite_kernel() {
        let k = Matrix::from_rows(&[vec![1., 0.9, 0.1], vec![0.9, 1., 0.9], vec![0.1, 0.9, 1.]])
            .unwrap();
        let y = [1.0, -1.0, 1.0];
        let sol = smo_solve(&k, &y, 2.0, SmoOptions::default());
        assert!(sol.alpha.iter().all(|a| (0.0..=2.0).contains(a)));
        let bal: f64 = sol.alpha.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!(bal.abs() < 1e-9);
    }

    #[test]
    fn dual_objective_trace_is_monotone() {
        // Gaussian kernel on 1-d points with mixed labels.
        let pts: [f64; 7] = [0.0, 0.4, 1.1, 1.3, 2.0, 2.2, 3.5];
        let y = [1.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0];
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| (-(a - b) * (a - b)).exp()).collect())
            .collect();
        let k = Matrix::from_rows(&rows).unwrap();
        let sol = smo_solve(
            &k,
            &y,
            10.0,
            SmoOptions {
                record_objective: true,
                ..Default::default()
            },
        );
        assert!(sol.objective_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let last = *sol.objective_trace.last().unwrap();
        assert!((last - sol.dual_objective(&k, &y)).abs() < 1e-9);
    }
}
