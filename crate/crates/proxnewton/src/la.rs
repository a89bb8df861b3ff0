//! Small dense-vector helpers shared across the crate.
//!
//! Everything here is deliberately scalar and sequential: callers that want
//! parallelism split work at a higher level (per output element), which keeps
//! floating-point summation order fixed no matter how many threads run.

/// Dot product. Plain left-to-right summation; the fixed order is what makes
/// parallel callers reproducible.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn nrm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance between two vectors of equal length.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `a + s*b` elementwise.
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// True when every entry is finite (no NaN, no infinities).
pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Outcome of [`cg_solve`].
pub struct CgResult {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Conjugate gradient for `M x = rhs` with `M` given as a matrix-free action.
///
/// Stops when the residual norm drops to `tol` (absolute) or after `max_iter`
/// steps. `converged` is false on iteration exhaustion and also when a
/// non-positive curvature `p·Mp <= 0` is met, which means `M` is not positive
/// definite and CG cannot continue.
pub fn cg_solve<F>(apply: F, rhs: &[f64], tol: f64, max_iter: usize) -> CgResult
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);

    if rs.sqrt() <= tol {
        return CgResult { x, residual: rs.sqrt(), iterations: 0, converged: true };
    }

    for k in 0..max_iter {
        let mp = apply(&p);
        let curv = dot(&p, &mp);
        if curv <= 0.0 || !curv.is_finite() {
            return CgResult { x, residual: rs.sqrt(), iterations: k, converged: false };
        }
        let alpha = rs / curv;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * mp[i];
        }
        let rs_next = dot(&r, &r);
        if rs_next.sqrt() <= tol {
            return CgResult { x, residual: rs_next.sqrt(), iterations: k + 1, converged: true };
        }
        let beta = rs_next / rs;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_next;
    }

    CgResult { x, residual: rs.sqrt(), iterations: max_iter, converged: false }
}
