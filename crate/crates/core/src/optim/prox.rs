//! Proximal operator of `kappa * ||.||_1`.

#[inline]
pub fn soft_threshold_scalar(v: f64, kappa: f64) -> f64 {
    if v > kappa {
        v - kappa
    } else if v < -kappa {
        v + kappa
    } else {
        0.0
    }
}

/// Elementwise `sign(v) * max(|v| - kappa, 0)`.
pub fn soft_threshold(v: &[f64], kappa: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    soft_threshold_in_place(&mut out, kappa);
    out
}

pub fn soft_threshold_in_place(v: &mut [f64], kappa: f64) {
    if kappa == 0.0 {
        return;
    }
    for x in v.iter_mut() {
        *x = soft_threshold_scalar(*x, kappa);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(soft_threshold_scalar(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold_scalar(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold_scalar(-0.5, 1.0), 0.0);
        let v = [1.5, -2.0, 0.0, 7.25];
        assert_eq!(soft_threshold(&v, 0.0), v.to_vec());
    }

    proptest! {
        #[test]
        fn never_grows_support(v in proptest::collection::vec(-3.0f64..3.0, 0..20), k in 0.0f64..2.0) {
            let u = soft_threshold(&v, k);
            let nnz = |x: &[f64]| x.iter().filter(|&&a| a != 0.0).count();
            prop_assert!(nnz(&u) <= nnz(&v));
            for (a, b) in u.iter().zip(&v) {
                prop_assert!(a.abs() <= b.abs());
            }
        }
    }
}
