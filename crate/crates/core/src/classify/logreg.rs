//! L2-regularised logistic regression on kernel columns.
//!
//! Objective over coefficients `beta` and an unpenalised intercept `b`:
//!
//! ```text
//! f(beta, b) = 1/n * sum_i log(1 + exp(-y_i * (x_i . beta + b))) + penalty/2 * |beta|^2
//! ```
//!
//! with `y_i` in {-1, +1}. Minimised by limited-memory BFGS with a
//! backtracking Armijo line search, so the objective never increases.

use std::collections::VecDeque;

use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy)]
pub struct LogregOptions {
    /// Stop once the gradient's infinity norm is at most this.
    pub tol: f64,
    pub max_iter: usize,
    pub memory: usize,
    pub record_objective: bool,
}

impl Default for LogregOptions {
    fn default() -> Self {
        LogregOptions {
            tol: 1e-4,
            max_iter: 10_000,
            memory: 10,
            record_objective: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LogregFit {
    pub coef: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_inf_norm: f64,
    /// Objective after each accepted step, starting with the initial point.
    pub objective_trace: Vec<f64>,
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Problem<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    penalty: f64,
}

impl Problem<'_> {
    /// Objective and gradient at `w = [beta.., b]`.
    fn eval(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let n = self.x.rows();
        let p = self.x.cols();
        let (beta, b) = (&w[..p], w[p]);
        let mut grad = vec![0.0; p + 1];
        let mut loss = 0.0;
        for i in 0..n {
            let row = self.x.row(i);
            let z = dot(row, beta) + b;
            let m = -self.y[i] * z;
            loss += softplus(m);
            let r = -self.y[i] * sigmoid(m) / n as f64;
            for (g, &xij) in grad[..p].iter_mut().zip(row) {
                *g += r * xij;
            }
            grad[p] += r;
        }
        let mut f = loss / n as f64;
        if self.penalty > 0.0 {
            f += 0.5 * self.penalty * dot(beta, beta);
            for (g, &bj) in grad[..p].iter_mut().zip(beta) {
                *g += self.penalty * bj;
            }
        }
        (f, grad)
    }
}

/// Objective and gradient of the penalised logistic loss; `w` holds the
/// coefficients followed by the intercept.
pub fn logistic_objective(x: &Matrix, y: &[f64], penalty: f64, w: &[f64]) -> (f64, Vec<f64>) {
    Problem { x, y, penalty }.eval(w)
}

pub fn fit_logistic(x: &Matrix, y: &[f64], penalty: f64, opts: LogregOptions) -> LogregFit {
    let prob = Problem { x, y, penalty };
    let dim = x.cols() + 1;
    let mut w = vec![0.0; dim];
    let (mut f, mut g) = prob.eval(&w);
    let mut trace = Vec::new();
    if opts.record_objective {
        trace.push(f);
    }
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut converged = inf_norm(&g) <= opts.tol;

    while !converged && iterations < opts.max_iter {
        iterations += 1;

        // Two-loop recursion.
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, yv, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(yv) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, yv, _)) = history.back() {
            let gamma = dot(s, yv) / dot(yv, yv);
            d.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, yv, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(yv, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }

        let mut slope = dot(&g, &d);
        if slope.is_nan() || slope >= 0.0 {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let mut step = if history.is_empty() {
            (1.0 / inf_norm(&g)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&d).map(|(wi, di)| wi + step * di).collect();
            let (ft, gt) = prob.eval(&trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((w_new, f_new, g_new)) = accepted else {
            // No decrease representable in floating point.
            break;
        };

        let s: Vec<f64> = w_new.iter().zip(&w).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&yv, &yv).sqrt() && sy > 0.0 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, yv, 1.0 / sy));
        }
        w = w_new;
        f = f_new;
        g = g_new;
        if opts.record_objective {
            trace.push(f);
        }
        converged = inf_norm(&g) <= opts.tol;
    }

    let p = x.cols();
    LogregFit {
        intercept: w[p],
        coef: w[..p].to_vec(),
        iterations,
        converged,
        grad_inf_norm: inf_norm(&g),
        objective_trace: trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_identity_kernel() {
        let x = Matrix::identity(2);
        let fit = fit_logistic(&x, &[1.0, -1.0], 0.0, LogregOptions::default());
        assert!(fit.converged, "{fit:?}");
        let z0 = fit.coef[0] + fit.intercept;
        let z1 = fit.coef[1] + fit.intercept;
        assert!(z0 > 0.0 && z1 < 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let x = Matrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 1.0], vec![0.5, 0.6]]).unwrap();
        let y = [1.0, -1.0, 1.0];
        let w = [0.2, -0.4, 0.1];
        let (_, g) = logistic_objective(&x, &y, 0.7, &w);
        for k in 0..3 {
            let h = 1e-6;
            let mut up = w;
            let mut dn = w;
            up[k] += h;
            dn[k] -= h;
            let fd = (logistic_objective(&x, &y, 0.7, &up).0
                - logistic_objective(&x, &y, 0.7, &dn).0)
                / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-7, "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn objective_never_increases() {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.8, 0.1, 0.2],
            vec![0.8, 1.0, 0.3, 0.1],
            vec![0.1, 0.3, 1.0, 0.7],
            vec![0.2, 0.1, 0.7, 1.0],
        ])
        .unwrap();
        let opts = LogregOptions {
            record_objective: true,
            ..Default::default()
        };
        let fit = fit_logistic(&x, &[1.0, 1.0, -1.0, 1.0], 0.01, opts);
        assert!(fit.converged);
        assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn heavy_penalty_shrinks_to_majority() {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.2, 0.1],
            vec![0.2, 1.0, 0.4],
            vec![0.1, 0.4, 1.0],
        ])
        .unwrap();
        let fit = fit_logistic(&x, &[1.0, 1.0, -1.0], 1e6, LogregOptions::default());
        assert!(fit.coef.iter().all(|c| c.abs() < 1e-5));
        assert!(fit.intercept > 0.0);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        assert!((softplus(-800.0)).abs() < 1e-300);
        assert_eq!(softplus(800.0), 800.0);
    }
}
