//! Accelerated proximal gradient (FISTA) for `f(x) + lambda * ||x||_1` with a
//! constant step `1/L`.
//!
//! Momentum is reset whenever a step would increase the composite objective;
//! the rejected step is replaced by a plain proximal-gradient step from the
//! current iterate, so the objective history never increases.

use crate::error::{Error, Result};
use crate::losses::l1_norm;

use super::prox::soft_threshold_in_place;
use super::{sup_norm, SmoothProblem, SolveReport, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FistaOptions {
    pub max_iter: usize,
    /// Stop once `||x_{k+1} - x_k||_inf <= tol`.
    pub tol: f64,
    /// Nesterov momentum; `false` gives plain proximal gradient.
    pub accelerate: bool,
}

impl Default for FistaOptions {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            accelerate: true,
        }
    }
}

pub fn fista_minimize<P: SmoothProblem + ?Sized>(
    p: &P,
    lambda: f64,
    x0: &[f64],
    opts: FistaOptions,
) -> Result<SolveReport> {
    fista_core(
        |x, grad| {
            Ok(match grad {
                Some(g) => p.value_and_gradient(x, g),
                None => p.value(x),
            })
        },
        p.lipschitz(),
        lambda,
        x0,
        opts,
    )
}

/// Unaccelerated proximal gradient (ISTA) with the same stopping rule.
pub fn proximal_gradient_minimize<P: SmoothProblem + ?Sized>(
    p: &P,
    lambda: f64,
    x0: &[f64],
    opts: FistaOptions,
) -> Result<SolveReport> {
    fista_minimize(
        p,
        lambda,
        x0,
        FistaOptions {
            accelerate: false,
            ..opts
        },
    )
}

/// Solver loop shared by the centralized and distributed front ends.
/// `eval(x, grad)` returns the smooth value at `x` and, when asked, writes
/// the gradient.
pub(crate) fn fista_core<F>(
    mut eval: F,
    lipschitz: f64,
    lambda: f64,
    x0: &[f64],
    opts: FistaOptions,
) -> Result<SolveReport>
where
    F: FnMut(&[f64], Option<&mut [f64]>) -> Result<f64>,
{
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(Error::config(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::config(format!("lambda must be >= 0, got {lambda}")));
    }
    let n = x0.len();
    let step = 1.0 / lipschitz;
    let kappa = lambda * step;

    let composite = |x: &[f64], iteration: usize, eval: &mut F| -> Result<f64> {
        let v = eval(x, None)? + lambda * l1_norm(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Divergence { iteration })
        }
    };
    let prox_step = |from: &[f64], grad: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend(from.iter().zip(grad).map(|(a, g)| a - step * g));
        soft_threshold_in_place(out, kappa);
    };

    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut x_new = Vec::with_capacity(n);
    let mut grad = vec![0.0; n];
    let mut t = 1.0_f64;
    let mut f_x = composite(&x, 0, &mut eval)?;

    let mut report = SolveReport {
        solution: Vec::new(),
        objective: f_x,
        iterations: 0,
        converged: false,
        objective_history: vec![f_x],
        residual_history: Vec::new(),
    };

    for k in 1..=opts.max_iter {
        let f_y = eval(&y, Some(&mut grad))?;
        if !f_y.is_finite() {
            return Err(Error::Divergence { iteration: k });
        }
        prox_step(&y, &grad, &mut x_new);
        let mut f_new = composite(&x_new, k, &mut eval)?;

        if f_new > f_x {
            t = 1.0;
            eval(&x, Some(&mut grad))?;
            prox_step(&x, &grad, &mut x_new);
            f_new = composite(&x_new, k, &mut eval)?;
            if f_new > f_x {
                // Only rounding can make a 1/L step from x ascend.
                x_new.clone_from(&x);
                f_new = f_x;
            }
        }

        let mut change = 0.0_f64;
        for (a, b) in x_new.iter().zip(&x) {
            change = change.max((a - b).abs());
        }

        if opts.accelerate {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            for ((yj, &xn), &xo) in y.iter_mut().zip(&x_new).zip(&x) {
                *yj = xn + beta * (xn - xo);
            }
            t = t_next;
        } else {
            y.clone_from(&x_new);
        }
        std::mem::swap(&mut x, &mut x_new);
        f_x = f_new;

        report.iterations = k;
        report.objective_history.push(f_x);
        report.residual_history.push(change);
        if change <= opts.tol {
            report.converged = true;
            break;
        }
    }

    debug_assert!(sup_norm(&x).is_finite());
    report.objective = f_x;
    report.solution = x;
    Ok(report)
}
