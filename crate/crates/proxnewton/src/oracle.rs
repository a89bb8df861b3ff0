//! Independent brute-force verifiers.
//!
//! Nothing in here is used by the solvers. These routines exist so the tests
//! can check the closed-form prox, the analytic gradients, and the envelope
//! gradient against implementations that share no code with them: exhaustive
//! grid minimization for proxes and central differences for derivatives.

use crate::problem::Regularizer;

/// Per-coordinate search grid for [`prox_oracle`].
///
/// Coordinate i is searched over `points` uniform samples spanning
/// [−|zᵢ|−pad, |zᵢ|+pad], plus the candidates 0 and zᵢ themselves. For the
/// hard-thresholding prox the true minimizer is always one of {0, zᵢ}, so
/// the grid is a safety net around the closed form rather than the decision
/// mechanism.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub pad: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { pad: 1.0, points: 2001 }
    }
}

/// Exhaustive per-coordinate minimization of g(y) + ‖y−z‖²/(2λ) for
/// separable g. Ties resolve toward the candidate listed first, and 0 is
/// listed first, mirroring the shipped tie policy.
pub fn prox_oracle(z: &[f64], reg: &dyn Regularizer, lambda: f64, grid: GridSpec) -> Vec<f64> {
    assert!(lambda > 0.0);
    assert!(grid.points >= 2 && grid.pad > 0.0, "grid must cover the candidate set");
    z.iter()
        .map(|&zi| {
            let lo = -zi.abs() - grid.pad;
            let hi = zi.abs() + grid.pad;
            let step = (hi - lo) / (grid.points - 1) as f64;
            let obj = |y: f64| reg.coord_value(y) + (y - zi) * (y - zi) / (2.0 * lambda);
            let mut best = 0.0;
            let mut best_val = obj(0.0);
            let mut consider = |y: f64| {
                let v = obj(y);
                if v < best_val {
                    best_val = v;
                    best = y;
                }
            };
            consider(zi);
            for k in 0..grid.points {
                consider(lo + step * k as f64);
            }
            best
        })
        .collect()
}

/// Central finite-difference gradient with per-coordinate step
/// hᵢ = step·(1+|xᵢ|).
pub fn fd_gradient<F>(f: F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = step * (1.0 + x[i].abs());
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Central finite-difference directional derivative of a gradient field:
/// approximates ∇²f(x)·w by differencing `grad` along w.
pub fn fd_hessian_action<G>(grad: G, x: &[f64], w: &[f64], step: f64) -> Vec<f64>
where
    G: Fn(&[f64]) -> Vec<f64>,
{
    let wn = crate::la::nrm2(w);
    if wn == 0.0 {
        return vec![0.0; x.len()];
    }
    let h = step * (1.0 + crate::la::nrm2(x)) / wn;
    let xp: Vec<f64> = x.iter().zip(w).map(|(xi, wi)| xi + h * wi).collect();
    let xm: Vec<f64> = x.iter().zip(w).map(|(xi, wi)| xi - h * wi).collect();
    let gp = grad(&xp);
    let gm = grad(&xm);
    gp.iter().zip(&gm).map(|(p, m)| (p - m) / (2.0 * h)).collect()
}

/// Where a 2-vector sits relative to the stationary structure of the scalar
/// problem log(1+(x₁+x₂−1)²) + 0.1‖x‖₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stationary2d {
    /// On the hyperplane x₁+x₂ = 1 of M-stationary points.
    OnLine,
    /// On a coordinate axis but off the hyperplane. The support logic of the
    /// counting norm admits further stationary configurations here, so these
    /// are reported apart rather than folded into the main test.
    OnAxis,
    /// Neither.
    No,
}

pub fn classify_stationary_2d(x: &[f64]) -> Stationary2d {
    assert_eq!(x.len(), 2);
    if (x[0] + x[1] - 1.0).abs() <= 1e-6 {
        Stationary2d::OnLine
    } else if x[0] == 0.0 || x[1] == 0.0 {
        Stationary2d::OnAxis
    } else {
        Stationary2d::No
    }
}

/// True exactly when [`classify_stationary_2d`] lands on the hyperplane.
pub fn stationary_set_check_2d(x: &[f64]) -> bool {
    classify_stationary_2d(x) == Stationary2d::OnLine
}
