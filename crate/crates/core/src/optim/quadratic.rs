use super::{CoordinateProblem, SmoothProblem};

/// `f(x) = 0.5 x'Ax - b'x` with a dense symmetric positive semi-definite `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl QuadraticProblem {
    /// Panics when `a` is not square or does not match `b`.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        assert!(a.iter().all(|row| row.len() == b.len()) && a.len() == b.len());
        Self { a, b }
    }

    /// `0.5 ||x - c||^2` up to a constant.
    pub fn isotropic(c: Vec<f64>) -> Self {
        let n = c.len();
        let a = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(a, c)
    }

    fn ax(&self, x: &[f64]) -> Vec<f64> {
        self.a.iter().map(|row| super::dot(row, x)).collect()
    }
}

impl SmoothProblem for QuadraticProblem {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * super::dot(&self.ax(x), x) - super::dot(&self.b, x)
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let ax = self.ax(x);
        for ((g, a), b) in grad.iter_mut().zip(&ax).zip(&self.b) {
            *g = a - b;
        }
        0.5 * super::dot(&ax, x) - super::dot(&self.b, x)
    }

    /// Gershgorin bound on the largest eigenvalue.
    fn lipschitz(&self) -> f64 {
        self.a
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl CoordinateProblem for QuadraticProblem {
    /// `A x`.
    type Cache = Vec<f64>;

    fn cache(&self, x: &[f64]) -> Vec<f64> {
        self.ax(x)
    }

    fn coordinate_lipschitz(&self, j: usize) -> f64 {
        self.a[j][j]
    }

    fn partial(&self, _x: &[f64], ax: &Vec<f64>, j: usize) -> f64 {
        ax[j] - self.b[j]
    }

    fn coordinate_moved(&self, ax: &mut Vec<f64>, j: usize, delta: f64) {
        for (i, v) in ax.iter_mut().enumerate() {
            *v += delta * self.a[i][j];
        }
    }
}
