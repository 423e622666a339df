/// A symmetric linear map on `R^dim`, shareable across threads.
///
/// Also used for approximate inverses (preconditioners and solvers),
/// where `apply` computes `y ~ M^{-1} x`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
}

/// The identity map, handy as a trivial preconditioner.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

/// `alpha * op`.
pub struct Scaled<T> {
    pub op: T,
    pub alpha: f64,
}

impl<T: LinearOperator> LinearOperator for Scaled<T> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y);
        for v in y.iter_mut() {
            *v *= self.alpha;
        }
    }
}

/// Diagonal operator.
#[derive(Debug, Clone)]
pub struct Diagonal(pub Vec<f64>);

impl LinearOperator for Diagonal {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.0) {
            *yi = d * xi;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Convenience wrapper returning a fresh vector.
pub fn apply_new(op: &(impl LinearOperator + ?Sized), x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; op.dim()];
    op.apply(x, &mut y);
    y
}
