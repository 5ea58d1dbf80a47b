//! Limited-memory BFGS with the two-loop recursion and Armijo backtracking.

use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::{dot, sup_norm, SmoothProblem, SolveReport, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iter: usize,
    /// Stop once `||grad||_inf <= tol`.
    pub tol: f64,
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            c1: 1e-4,
            shrink: 0.5,
            max_backtracks: 50,
        }
    }
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// `-H grad` where `H` is the L-BFGS inverse-Hessian approximation.
fn two_loop(grad: &[f64], history: &VecDeque<Pair>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for pair in history.iter().rev() {
        let a = pair.rho * dot(&pair.s, &q);
        for (qi, yi) in q.iter_mut().zip(&pair.y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some(last) = history.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (pair, a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = pair.rho * dot(&pair.y, &q);
        for (qi, si) in q.iter_mut().zip(&pair.s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

pub fn lbfgs_minimize<P: SmoothProblem + ?Sized>(p: &P, x0: &[f64], opts: LbfgsOptions) -> Result<SolveReport> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut grad = vec![0.0; n];
    let mut f = p.value_and_gradient(&x, &mut grad);
    if !f.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let mut history: VecDeque<Pair> = VecDeque::with_capacity(opts.memory);
    let mut report = SolveReport {
        solution: Vec::new(),
        objective: f,
        iterations: 0,
        converged: false,
        objective_history: vec![f],
        residual_history: vec![sup_norm(&grad)],
    };

    let mut x_new = vec![0.0; n];
    let mut grad_new = vec![0.0; n];
    for k in 1..=opts.max_iter {
        if sup_norm(&grad) <= opts.tol {
            report.converged = true;
            break;
        }
        let mut dir = two_loop(&grad, &history);
        let mut slope = dot(&grad, &dir);
        if slope.is_nan() || slope >= 0.0 {
            history.clear();
            dir = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
        }

        let mut alpha = 1.0;
        let mut backtracks = 0;
        let f_new = loop {
            for ((xn, xi), di) in x_new.iter_mut().zip(&x).zip(&dir) {
                *xn = xi + alpha * di;
            }
            let f_try = p.value(&x_new);
            if f_try.is_finite() && f_try <= f + opts.c1 * alpha * slope {
                break f_try;
            }
            backtracks += 1;
            if backtracks >= opts.max_backtracks {
                return Err(Error::LineSearchStall { iteration: k });
            }
            alpha *= opts.shrink;
        };
        p.value_and_gradient(&x_new, &mut grad_new);

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back(Pair { s, y, rho: 1.0 / sy });
        }

        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut grad, &mut grad_new);
        f = f_new;
        report.iterations = k;
        report.objective_history.push(f);
        report.residual_history.push(sup_norm(&grad));
    }
    if !report.converged && sup_norm(&grad) <= opts.tol {
        report.converged = true;
    }
    report.objective = f;
    report.solution = x;
    Ok(report)
}
