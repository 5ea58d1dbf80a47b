use cilearn::losses::{ClassWeights, CostPair};
use cilearn::optim::{
    fista_minimize, lbfgs_minimize, proximal_gradient_minimize, rcd_minimize, FistaOptions, HingeObjective,
    LbfgsOptions, QuadraticProblem, RcdOptions, SmoothProblem,
};
use cilearn::synthetic::{separable_stream, SeparableSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(1/2m)||Mx - y||^2` as `0.5 x'Ax - b'x` plus the raw design.
fn least_squares(m: usize, n: usize, seed: u64) -> (QuadraticProblem, Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let design: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let truth: Vec<f64> = (0..n)
        .map(|j| if j % 3 == 0 { rng.gen_range(-2.0..2.0) } else { 0.0 })
        .collect();
    let y: Vec<f64> = design
        .iter()
        .map(|row| row.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>() + 0.1 * rng.gen_range(-1.0..1.0))
        .collect();
    let mf = m as f64;
    let a = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| design.iter().map(|r| r[i] * r[j]).sum::<f64>() / mf)
                .collect()
        })
        .collect();
    let b = (0..n)
        .map(|j| design.iter().zip(&y).map(|(r, yi)| r[j] * yi).sum::<f64>() / mf)
        .collect();
    (QuadraticProblem::new(a, b), design, y)
}

/// Cyclic coordinate descent with exact coordinate minimization on the
/// residual form of the lasso.
fn lasso_coordinate_descent(design: &[Vec<f64>], y: &[f64], lambda: f64) -> Vec<f64> {
    let (m, n) = (design.len(), design[0].len());
    let mf = m as f64;
    let mut x = vec![0.0; n];
    let mut resid = y.to_vec();
    let col_sq: Vec<f64> = (0..n)
        .map(|j| design.iter().map(|r| r[j] * r[j]).sum::<f64>() / mf)
        .collect();
    for _ in 0..100_000 {
        let mut biggest: f64 = 0.0;
        for j in 0..n {
            let rho: f64 = design.iter().zip(&resid).map(|(r, e)| r[j] * e).sum::<f64>() / mf + col_sq[j] * x[j];
            let new = rho.signum() * (rho.abs() - lambda).max(0.0) / col_sq[j];
            let delta = new - x[j];
            if delta != 0.0 {
                for (e, r) in resid.iter_mut().zip(design) {
                    *e -= delta * r[j];
                }
                x[j] = new;
            }
            biggest = biggest.max(delta.abs());
        }
        if biggest < 1e-14 {
            break;
        }
    }
    x
}

#[test]
fn fista_matches_coordinate_descent_on_lasso() {
    for seed in 0..5 {
        let (p, design, y) = least_squares(30, 10, seed);
        let lambda = 0.05;
        let oracle = lasso_coordinate_descent(&design, &y, lambda);
        let opts = FistaOptions {
            tol: 1e-12,
            max_iter: 100_000,
            accelerate: true,
        };
        let r = fista_minimize(&p, lambda, &[0.0; 10], opts).unwrap();
        assert!(r.converged);
        for (a, b) in r.solution.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn fista_never_needs_more_iterations_than_ista() {
    for seed in 10..15 {
        let (p, _, _) = least_squares(30, 10, seed);
        let opts = FistaOptions {
            tol: 1e-9,
            max_iter: 200_000,
            accelerate: true,
        };
        let fast = fista_minimize(&p, 0.01, &[0.0; 10], opts).unwrap();
        let slow = proximal_gradient_minimize(&p, 0.01, &[0.0; 10], opts).unwrap();
        assert!(fast.converged && slow.converged);
        assert!(
            fast.iterations <= slow.iterations,
            "{} > {}",
            fast.iterations,
            slow.iterations
        );
        assert!(fast.objective_history.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn lbfgs_and_rcd_agree_on_local_subproblem() {
    let rows = separable_stream(&SeparableSpec {
        samples: 120,
        features: 15,
        margin: 0.05,
        seed: 3,
        ..Default::default()
    });
    let costs: ClassWeights = CostPair::default().into();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let anchor: Vec<f64> = (0..15).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let p = HingeObjective::partial(&rows[..60], costs, 15, 1).with_proximal_term(1.0, anchor);

    let lb = lbfgs_minimize(
        &p,
        &[0.0; 15],
        LbfgsOptions {
            tol: 1e-9,
            ..Default::default()
        },
    )
    .unwrap();
    let rc = rcd_minimize(
        &p,
        &[0.0; 15],
        RcdOptions {
            tol: 1e-10,
            max_epochs: 100_000,
            seed: 1,
        },
    )
    .unwrap();
    assert!(lb.converged && rc.converged);
    for (a, b) in lb.solution.iter().zip(&rc.solution) {
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
    assert!((lb.objective - rc.objective).abs() <= 1e-8 * lb.objective.abs().max(1.0));

    let mut grad = vec![0.0; 15];
    p.value_and_gradient(&lb.solution, &mut grad);
    assert!(grad.iter().all(|g| g.abs() <= 1e-9));
}

#[test]
fn rcd_is_deterministic_per_seed() {
    let (p, _, _) = least_squares(30, 10, 7);
    let opts = RcdOptions {
        tol: 1e-10,
        max_epochs: 10_000,
        seed: 42,
    };
    let a = rcd_minimize(&p, &[0.0; 10], opts).unwrap();
    let b = rcd_minimize(&p, &[0.0; 10], opts).unwrap();
    assert_eq!(a, b);
}
