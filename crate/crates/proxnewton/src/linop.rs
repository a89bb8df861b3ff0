//! Matrix-free linear operators.
//!
//! Solvers and models talk to `A` only through [`LinearOperator`], so a dense
//! matrix and a convolution stencil are interchangeable. Adjoint consistency
//! is a contract, not an assumption: [`validate_operator_adjoint`] measures it on
//! random probes and the test suite holds every shipped operator to 1e-10.

use crate::la::dot;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Work threshold (output elements × inner length) above which the parallel
/// kernels engage. Below it thread fan-out costs more than it saves.
#[cfg(feature = "parallel")]
pub(crate) const PAR_WORK_MIN: usize = 1 << 15;

pub trait LinearOperator: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// y = A x.
    fn apply(&self, x: &[f64]) -> Vec<f64>;

    /// y = Aᵀ x.
    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64>;

    /// Dense copy, when the operator stores one.
    fn to_dense(&self) -> Option<DMatrix<f64>> {
        None
    }

    /// ‖A‖₁, the maximum absolute column sum. Default probes column by
    /// column; implementations override with something cheaper.
    fn norm1(&self) -> f64 {
        let mut e = vec![0.0; self.cols()];
        let mut best: f64 = 0.0;
        for j in 0..self.cols() {
            e[j] = 1.0;
            let col = self.apply(&e);
            best = best.max(col.iter().map(|v| v.abs()).sum());
            e[j] = 0.0;
        }
        best
    }

    /// ‖A‖_∞, the maximum absolute row sum.
    fn norminf(&self) -> f64 {
        let mut e = vec![0.0; self.rows()];
        let mut best: f64 = 0.0;
        for i in 0..self.rows() {
            e[i] = 1.0;
            let row = self.apply_adjoint(&e);
            best = best.max(row.iter().map(|v| v.abs()).sum());
            e[i] = 0.0;
        }
        best
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(m: usize, n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), m * n, "dense matrix data length mismatch");
        DenseMatrix { m, n, data }
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { m, n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sequential matvec. Always available; the reference semantics.
    pub fn apply_seq(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.m).map(|i| dot(self.row(i), x)).collect()
    }

    /// Row-parallel matvec. Each output element is the same left-to-right
    /// dot product as in [`Self::apply_seq`], so the two agree bitwise.
    #[cfg(feature = "parallel")]
    pub fn apply_par(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.m)
            .into_par_iter()
            .map(|i| dot(self.row(i), x))
            .collect()
    }

    pub fn adjoint_seq(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.m);
        (0..self.n)
            .map(|j| (0..self.m).map(|i| self.get(i, j) * y[i]).sum())
            .collect()
    }

    #[cfg(feature = "parallel")]
    pub fn adjoint_par(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.m);
        (0..self.n)
            .into_par_iter()
            .map(|j| (0..self.m).map(|i| self.get(i, j) * y[i]).sum())
            .collect()
    }
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        self.m
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        if self.m * self.n >= PAR_WORK_MIN {
            return self.apply_par(x);
        }
        self.apply_seq(x)
    }

    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        if self.m * self.n >= PAR_WORK_MIN {
            return self.adjoint_par(y);
        }
        self.adjoint_seq(y)
    }

    fn to_dense(&self) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_fn(self.m, self.n, |i, j| self.get(i, j)))
    }

    fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.m).map(|i| self.get(i, j).abs()).sum())
            .fold(0.0, f64::max)
    }

    fn norminf(&self) -> f64 {
        (0..self.m)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }
}

/// Dense copy of any operator, column probe by column probe. Meant for tests
/// and for small systems; cost is `cols` full applies.
pub fn materialize(op: &dyn LinearOperator) -> DMatrix<f64> {
    let (m, n) = (op.rows(), op.cols());
    let mut out = DMatrix::zeros(m, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op.apply(&e);
        for i in 0..m {
            out[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    out
}

/// Result of the adjoint consistency check.
#[derive(Debug, Clone)]
pub struct AdjointReport {
    pub probes: usize,
    pub max_rel_defect: f64,
}

impl AdjointReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_defect <= tol
    }
}

/// Measures max over random unit probes (u, w) of the relative defect
/// |⟨Au, w⟩ − ⟨u, Aᵀw⟩|. A correct adjoint pair keeps this at roundoff.
pub fn validate_operator_adjoint(op: &dyn LinearOperator, probes: usize, seed: u64) -> AdjointReport {
    assert!(probes >= 1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let unit = |len: usize, rng: &mut ChaCha20Rng| {
        let v: Vec<f64> = (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let norm = crate::la::nrm2(&v).max(f64::MIN_POSITIVE);
        v.into_iter().map(|x| x / norm).collect::<Vec<f64>>()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let u = unit(op.cols(), &mut rng);
        let w = unit(op.rows(), &mut rng);
        let lhs = dot(&op.apply(&u), &w);
        let rhs = dot(&u, &op.apply_adjoint(&w));
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    AdjointReport { probes, max_rel_defect: worst }
}

/// Largest eigenvalue of AᵀA by power iteration on the matrix-free operator.
///
/// Rayleigh-quotient iteration from a fixed pseudo-random start; stops when
/// the eigenvalue estimate moves by less than `tol` relatively, `None` if
/// `max_iter` is exhausted first. A zero operator reports `Some(0.0)`.
pub fn power_iteration_ata(op: &dyn LinearOperator, tol: f64, max_iter: usize) -> Option<f64> {
    let n = op.cols();
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let norm = crate::la::nrm2(&v);
    v.iter_mut().for_each(|x| *x /= norm);

    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let u = op.apply_adjoint(&op.apply(&v));
        let lambda_next = dot(&v, &u);
        let unorm = crate::la::nrm2(&u);
        if unorm == 0.0 {
            return Some(0.0);
        }
        if (lambda_next - lambda).abs() <= tol * lambda_next.abs().max(1.0) {
            return Some(lambda_next);
        }
        lambda = lambda_next;
        v = u.into_iter().map(|x| x / unorm).collect();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_matvec_and_adjoint() {
        // A = [[1, 2, 3], [4, 5, 6]]
        let a = DenseMatrix::from_row_major(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(a.apply(&[1.0, 0.0, -1.0]), vec![-2.0, -2.0]);
        assert_eq!(a.apply_adjoint(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
        assert_eq!(a.norm1(), 9.0);
        assert_eq!(a.norminf(), 15.0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_kernels_match_sequential_bitwise() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (m, n) = (67, 41);
        let a = DenseMatrix::from_fn(m, n, |_, _| rng.random::<f64>() - 0.5);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        assert_eq!(a.apply_seq(&x), a.apply_par(&x));
        assert_eq!(a.adjoint_seq(&y), a.adjoint_par(&y));
    }

    #[test]
    fn identity_adjoint_defect_zero() {
        let id = DenseMatrix::identity(7);
        let rep = validate_operator_adjoint(&id, 20, 1);
        assert_eq!(rep.max_rel_defect, 0.0);
    }

    #[test]
    fn gaussian_adjoint_defect_small() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let a = DenseMatrix::from_fn(20, 100, |_, _| {
            rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
        });
        let rep = validate_operator_adjoint(&a, 50, 2);
        assert!(rep.passes(1e-12), "defect {}", rep.max_rel_defect);
    }

    #[test]
    fn power_iteration_identity() {
        let id = DenseMatrix::identity(4);
        let l = power_iteration_ata(&id, 1e-8, 5000).unwrap();
        assert!((l - 1.0).abs() < 1e-8);
    }

    #[test]
    fn power_iteration_rank_one() {
        // A = [1 1]: AᵀA = [[1,1],[1,1]] with eigenvalues {0, 2}.
        let a = DenseMatrix::from_row_major(1, 2, vec![1.0, 1.0]);
        let l = power_iteration_ata(&a, 1e-10, 5000).unwrap();
        assert!((l - 2.0).abs() < 1e-8, "got {l}");
    }

    #[test]
    fn power_iteration_zero_matrix() {
        let a = DenseMatrix::from_row_major(2, 2, vec![0.0; 4]);
        assert_eq!(power_iteration_ata(&a, 1e-8, 100), Some(0.0));
    }

    #[test]
    fn materialize_agrees_with_apply() {
        let a = DenseMatrix::from_row_major(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let d = materialize(&a);
        assert_eq!(d, a.to_dense().unwrap());
    }
}
