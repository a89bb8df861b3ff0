//! Generalized Newton direction solvers.
//!
//! Two formulations of the same system. The support-reduced path exploits
//! hard-thresholding structure: the direction vanishes where x̂ does, and on
//! the support J it solves H_JJ d_J = −v̂_J with H = ∇²f(x̂). The full-space
//! path works for any regularizer exposing a prox Bouligand-Jacobian element
//! A and solves (I − A + λA∇²f(x̂))d = −λAv̂. With the 0/1 diagonal A of the
//! hard threshold, block elimination shows the two systems are identical;
//! the tests assert that numerically.

use crate::la::{cg_solve, nrm2};
use crate::problem::CompositeProblem;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Dense-vs-CG crossover for the support-reduced solve. Image problems have
/// supports in the thousands where factorization is wasteful; small systems
/// are cheaper (and sturdier for indefinite Hessians) dense.
const DENSE_SUPPORT_MAX: usize = 512;

/// Default relative tolerance on the linear-system residual.
pub const DEFAULT_LINSOLVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionStatus {
    /// System solved to tolerance and descent-aligned; `d` is a genuine
    /// Newton direction.
    Solved,
    /// No usable direction: the system has no solution, the iterative solve
    /// stalled, or the solution points into negative curvature. `d` is zero
    /// and the step degrades to a plain prox-gradient step.
    FallbackZero,
}

#[derive(Debug, Clone)]
pub struct NewtonDirectionOutcome {
    pub d: Vec<f64>,
    pub status: DirectionStatus,
    /// Euclidean residual of the linear system actually solved.
    pub residual: f64,
    /// Support J the system was reduced to (all indices for the full-space
    /// path with a dense Jacobian).
    pub support: Vec<usize>,
    /// The dense factorization found the system rank deficient, so `d` is
    /// the basic solution of an underdetermined system: exact, but pinned
    /// down by pivot order rather than by the model. Globalized drivers
    /// treat such directions as a last resort (see `solve_glpg`).
    pub rank_deficient: bool,
}

impl NewtonDirectionOutcome {
    fn zero(n: usize, status: DirectionStatus, support: Vec<usize>) -> Self {
        NewtonDirectionOutcome {
            d: vec![0.0; n],
            status,
            residual: 0.0,
            support,
            rank_deficient: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum DirectionError {
    #[error("direction strategy unsupported: regularizer provides no prox Jacobian element")]
    Unsupported,
}

/// Support-reduced generalized Newton direction for hard-thresholding
/// regularizers.
///
/// Off-support coordinates take d_i = 0. That is also the choice made for
/// the degenerate coordinates where x̂_i = 0 and the residual component
/// vanishes, where the second-order structure admits either branch; zero
/// keeps the iterate sparse and the system square.
///
/// `hess_action` must evaluate w ↦ ∇²f(x̂)·w at the prox point x̂ itself.
/// Supports up to 512 indices are factorized densely with full pivoting;
/// a rank-deficient block with a consistent right-hand side then yields the
/// basic solution (free variables zero), so degenerate Hessians produce a
/// deterministic direction supported on the pivot coordinates rather than
/// roundoff-scaled null-space noise. Larger supports go through conjugate
/// gradient capped at 10·|J| iterations with absolute tolerance
/// `linsolve_tol`·‖v̂_J‖. Inconsistent or unconverged systems, and solutions
/// along which the Hessian block has negative curvature, fall back to d = 0.
pub fn l0_newton_direction<H>(
    xhat: &[f64],
    vhat: &[f64],
    hess_action: H,
    linsolve_tol: f64,
) -> NewtonDirectionOutcome
where
    H: Fn(&[f64]) -> Vec<f64>,
{
    assert_eq!(xhat.len(), vhat.len());
    let n = xhat.len();
    let support: Vec<usize> = (0..n).filter(|&i| xhat[i] != 0.0).collect();
    let j = support.len();
    if j == 0 {
        return NewtonDirectionOutcome::zero(n, DirectionStatus::Solved, support);
    }

    let rhs: Vec<f64> = support.iter().map(|&i| -vhat[i]).collect();
    let rhs_norm = nrm2(&rhs);
    if rhs_norm == 0.0 {
        return NewtonDirectionOutcome::zero(n, DirectionStatus::Solved, support);
    }

    // masked action: pad support coordinates into full space, apply, restrict
    let masked = |w: &[f64]| -> Vec<f64> {
        let mut full = vec![0.0; n];
        for (slot, &i) in support.iter().enumerate() {
            full[i] = w[slot];
        }
        let hw = hess_action(&full);
        support.iter().map(|&i| hw[i]).collect()
    };

    let tol_solved = linsolve_tol * (1.0 + nrm2(vhat));

    let (dj, residual, ok, rank_deficient) = if j <= DENSE_SUPPORT_MAX {
        let mut h = DMatrix::zeros(j, j);
        let mut e = vec![0.0; j];
        for col in 0..j {
            e[col] = 1.0;
            let hcol = masked(&e);
            for row in 0..j {
                h[(row, col)] = hcol[row];
            }
            e[col] = 0.0;
        }
        let rhs_v = DVector::from_column_slice(&rhs);
        let (d, rank) = basic_solve(&h, &rhs_v);
        let res = (&rhs_v - &h * &d).norm();
        (d.iter().copied().collect::<Vec<f64>>(), res, res <= tol_solved, rank < j)
    } else {
        let out = cg_solve(masked, &rhs, linsolve_tol * rhs_norm, 10 * j);
        let ok = out.converged;
        (out.x, out.residual, ok, false)
    };

    if !ok {
        return NewtonDirectionOutcome::zero(n, DirectionStatus::FallbackZero, support);
    }

    // descent alignment: ⟨d, v̂⟩ = −⟨d, Hd⟩, so a positive value means negative
    // curvature along d. The line search cannot screen those out (a tiny step
    // along an ascent direction still clears a test made against the previous
    // iterate, whose prox step already paid for it), and accepting them drifts
    // the iterates instead of letting the prox fallback make plain progress.
    let align: f64 = support.iter().enumerate().map(|(slot, &i)| dj[slot] * vhat[i]).sum();
    if align > 0.0 {
        return NewtonDirectionOutcome::zero(n, DirectionStatus::FallbackZero, support);
    }

    let mut d = vec![0.0; n];
    for (slot, &i) in support.iter().enumerate() {
        d[i] = dj[slot];
    }
    NewtonDirectionOutcome { d, status: DirectionStatus::Solved, residual, support, rank_deficient }
}

/// Basic solution of H d = rhs through a rank-revealing factorization.
/// Returns the solution and the numerical rank.
///
/// A nonsingular H gives the unique solution. When H is rank deficient the
/// free variables (the columns full pivoting rejects) are set to zero: a
/// consistent system then still yields an exact solution instead of the
/// null-space garbage a plain partial-pivot solve produces from its last
/// near-zero pivot, and an inconsistent one leaves a large residual that the
/// caller's tolerance check turns into a zero-direction fallback.
fn basic_solve(h: &DMatrix<f64>, rhs: &DVector<f64>) -> (DVector<f64>, usize) {
    let j = h.nrows();
    let (p, l, u, q) = h.clone().full_piv_lu().unpack();
    let mut c = rhs.clone();
    p.permute_rows(&mut c);
    // unit diagonal by construction, so the forward solve cannot fail
    let c = l.solve_lower_triangular(&c).unwrap_or_else(|| DVector::zeros(j));
    // pivots come out in decreasing magnitude; cut the rank where they decay
    // below roundoff relative to the largest
    let rank_tol = f64::EPSILON * (j as f64) * u[(0, 0)].abs();
    let rank = (0..j).take_while(|&i| u[(i, i)].abs() > rank_tol).count();
    let mut y = DVector::zeros(j);
    for i in (0..rank).rev() {
        let mut s = c[i];
        for k in (i + 1)..rank {
            s -= u[(i, k)] * y[k];
        }
        y[i] = s / u[(i, i)];
    }
    q.inv_permute_rows(&mut y);
    (y, rank)
}

/// Full-space generalized Newton direction through a prox Bouligand-Jacobian
/// element A: solves (I − A + λA∇²f(x̂))d = −λAv̂.
///
/// The Hessian is materialized densely (from the model, or by column probes
/// of the action), so this path is for small and medium dimensions; the
/// support-reduced path covers the large sparse case.
pub fn generic_newton_direction(
    xhat: &[f64],
    vhat: &[f64],
    problem: &CompositeProblem,
    lambda: f64,
    linsolve_tol: f64,
) -> Result<NewtonDirectionOutcome, DirectionError> {
    let n = xhat.len();
    let grad_hat = problem.f.gradient(xhat);
    // z = x̂ + λ(v̂ − ∇f(x̂)), which is exactly the pre-prox point x − λ∇f(x)
    let z: Vec<f64> = (0..n)
        .map(|i| xhat[i] + lambda * (vhat[i] - grad_hat[i]))
        .collect();
    let diag = problem
        .g
        .prox_jacobian_diag(&z, lambda)
        .ok_or(DirectionError::Unsupported)?;

    let h = problem.f.dense_hessian(xhat).unwrap_or_else(|| {
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for col in 0..n {
            e[col] = 1.0;
            let hcol = problem.f.hess_action(xhat, &e);
            for row in 0..n {
                m[(row, col)] = hcol[row];
            }
            e[col] = 0.0;
        }
        m
    });

    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for jj in 0..n {
            let mut v = lambda * diag[i] * h[(i, jj)];
            if i == jj {
                v += 1.0 - diag[i];
            }
            m[(i, jj)] = v;
        }
    }
    let rhs = DVector::from_iterator(n, (0..n).map(|i| -lambda * diag[i] * vhat[i]));

    let support: Vec<usize> = (0..n).filter(|&i| diag[i] != 0.0).collect();
    let tol_solved = linsolve_tol * (1.0 + nrm2(vhat));

    let (d, rank) = basic_solve(&m, &rhs);
    let residual = (&rhs - &m * &d).norm();
    let align: f64 = d.iter().zip(vhat).map(|(di, vi)| di * vi).sum();
    if residual <= tol_solved && align <= 0.0 {
        Ok(NewtonDirectionOutcome {
            d: d.iter().copied().collect(),
            status: DirectionStatus::Solved,
            residual,
            support,
            rank_deficient: rank < n,
        })
    } else {
        Ok(NewtonDirectionOutcome::zero(n, DirectionStatus::FallbackZero, support))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::DenseMatrix;
    use crate::problem::{CompositeProblem, SmoothModel};
    use crate::reg::{L0Norm, ZeroReg};
    use crate::smooth::LeastSquaresRidge;

    #[test]
    fn one_by_one_reduced_solve() {
        // H = diag(2,3): only the first coordinate is on the support
        let hess = |w: &[f64]| vec![2.0 * w[0], 3.0 * w[1]];
        let out = l0_newton_direction(&[1.0, 0.0], &[0.5, 0.2], hess, 1e-10);
        assert_eq!(out.status, DirectionStatus::Solved);
        assert_eq!(out.d, vec![-0.25, 0.0]);
        assert_eq!(out.support, vec![0]);
        assert!(out.residual <= 1e-15);
    }

    #[test]
    fn zero_rhs_and_empty_support() {
        let hess = |w: &[f64]| w.to_vec();
        let out = l0_newton_direction(&[1.0, 1.0], &[0.0, 0.0], hess, 1e-10);
        assert_eq!(out.status, DirectionStatus::Solved);
        assert_eq!(out.d, vec![0.0, 0.0]);

        let out = l0_newton_direction(&[0.0, 0.0], &[0.7, -0.3], |w: &[f64]| w.to_vec(), 1e-10);
        assert_eq!(out.status, DirectionStatus::Solved);
        assert_eq!(out.d, vec![0.0, 0.0]);
        assert!(out.support.is_empty());
    }

    #[test]
    fn singular_support_block_falls_back() {
        // A = [1 1], mu2 = 0: Hessian [[1,1],[1,1]] is singular on J = {0,1}
        // and v̂ = (0.3, -0.1) is not in its range: no solution exists
        let f = LeastSquaresRidge::new(
            Box::new(DenseMatrix::from_row_major(1, 2, vec![1.0, 1.0])),
            vec![0.0],
            0.0,
        );
        let hess = |w: &[f64]| f.hess_action(&[0.0, 0.0], w);
        let out = l0_newton_direction(&[1.0, 1.0], &[0.3, -0.1], hess, 1e-10);
        assert_eq!(out.status, DirectionStatus::FallbackZero);
        assert_eq!(out.d, vec![0.0, 0.0]);
    }

    #[test]
    fn consistent_singular_block_takes_basic_solution() {
        // same singular Hessian but v̂ in its range: the system is solvable
        // and the basic solution puts the whole step on the pivot coordinate
        let f = LeastSquaresRidge::new(
            Box::new(DenseMatrix::from_row_major(1, 2, vec![1.0, 1.0])),
            vec![0.0],
            0.0,
        );
        let hess = |w: &[f64]| f.hess_action(&[0.0, 0.0], w);
        let out = l0_newton_direction(&[1.0, 1.0], &[-0.3, -0.3], hess, 1e-10);
        assert_eq!(out.status, DirectionStatus::Solved);
        assert!(out.rank_deficient);
        assert!((out.d[0] - 0.3).abs() < 1e-14);
        assert_eq!(out.d[1], 0.0);
        assert!(out.residual <= 1e-14);
    }

    #[test]
    fn negative_curvature_direction_falls_back() {
        // H = -2 on a single-point support: the solve succeeds but d points
        // uphill (⟨d, v̂⟩ > 0), which the alignment check rejects
        let hess = |w: &[f64]| vec![-2.0 * w[0]];
        let out = l0_newton_direction(&[1.0], &[0.5], hess, 1e-10);
        assert_eq!(out.status, DirectionStatus::FallbackZero);
        assert_eq!(out.d, vec![0.0]);
    }

    #[test]
    fn cg_path_matches_dense_on_large_support() {
        // 600 > DENSE_SUPPORT_MAX forces CG; diagonal SPD system checks out
        let n = 600;
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64).collect();
        let d2 = diag.clone();
        let hess = move |w: &[f64]| w.iter().zip(&d2).map(|(wi, di)| wi * di).collect::<Vec<_>>();
        let xhat = vec![1.0; n];
        let vhat: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 / 11.0 - 0.4).collect();
        let out = l0_newton_direction(&xhat, &vhat, hess, 1e-10);
        assert_eq!(out.status, DirectionStatus::Solved);
        for i in 0..n {
            assert!((out.d[i] + vhat[i] / diag[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn generic_with_identity_jacobian_is_classical_newton() {
        // g = 0 gives A = I and the system collapses to H d = -vhat
        let f = LeastSquaresRidge::new(
            Box::new(DenseMatrix::from_row_major(
                2,
                2,
                vec![2f64.sqrt(), 0.0, 0.0, 3f64.sqrt()],
            )),
            vec![0.0, 0.0],
            0.0,
        );
        let p = CompositeProblem::new(Box::new(f), Box::new(ZeroReg));
        let out = generic_newton_direction(&[1.0, 1.0], &[0.5, 0.3], &p, 0.2, 1e-10).unwrap();
        assert_eq!(out.status, DirectionStatus::Solved);
        assert!((out.d[0] + 0.25).abs() < 1e-12);
        assert!((out.d[1] + 0.1).abs() < 1e-12);
    }

    #[test]
    fn generic_matches_support_reduced_for_hard_threshold() {
        let f = LeastSquaresRidge::new(
            Box::new(DenseMatrix::from_row_major(
                3,
                3,
                vec![1.0, 0.2, 0.0, -0.3, 1.5, 0.1, 0.0, 0.4, 0.9],
            )),
            vec![0.1, -0.2, 0.3],
            0.01,
        );
        let p = CompositeProblem::new(Box::new(f), Box::new(L0Norm::new(0.01)));
        let lambda = 0.5 / p.lipschitz();
        let x = [0.8, -0.6, 0.9];
        let step = crate::envelope::prox_grad_step(&x, &p, lambda);
        let gen = generic_newton_direction(&step.xhat, &step.vhat, &p, lambda, 1e-10).unwrap();
        let red = l0_newton_direction(
            &step.xhat,
            &step.vhat,
            |w| p.f.hess_action(&step.xhat, w),
            1e-10,
        );
        assert_eq!(gen.status, DirectionStatus::Solved);
        assert_eq!(red.status, DirectionStatus::Solved);
        for (a, b) in gen.d.iter().zip(&red.d) {
            assert!((a - b).abs() < 1e-10, "generic {a} vs reduced {b}");
        }
    }

    #[test]
    fn missing_jacobian_reports_unsupported() {
        struct NoJac;
        impl crate::problem::Regularizer for NoJac {
            fn value(&self, _: &[f64]) -> f64 {
                0.0
            }
            fn coord_value(&self, _: f64) -> f64 {
                0.0
            }
            fn prox(&self, z: &[f64], _: f64) -> Vec<f64> {
                z.to_vec()
            }
            fn subdiff_member(&self, _: &[f64], v: &[f64]) -> bool {
                v.iter().all(|&x| x == 0.0)
            }
        }
        let f = LeastSquaresRidge::new(Box::new(DenseMatrix::identity(2)), vec![0.0; 2], 0.0);
        let p = CompositeProblem::new(Box::new(f), Box::new(NoJac));
        assert!(matches!(
            generic_newton_direction(&[0.1, 0.1], &[0.0, 0.0], &p, 0.5, 1e-10),
            Err(DirectionError::Unsupported)
        ));
    }
}
