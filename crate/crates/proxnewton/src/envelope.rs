//! Envelope machinery shared by all solvers: the prox-gradient step, the
//! Moreau envelope, and the forward-backward envelope (FBE) with its
//! gradient.
//!
//! The FBE φ_λ is the merit function for line search. It is evaluated here
//! through φ_λ(x) = f(x) + ⟨∇f(x), x̂−x⟩ + g(x̂) + ‖x̂−x‖²/(2λ) because that
//! form reuses the prox point x̂ the step computation already produced; the
//! equivalent Moreau-envelope form f(x) − (λ/2)‖∇f(x)‖² + e_{λg}(x−λ∇f(x))
//! costs a second prox and serves as the cross-check path in the tests.

use crate::la::{dist2, dot, nrm2};
use crate::problem::{CompositeProblem, Regularizer};
use thiserror::Error;

/// One prox-gradient evaluation at x.
#[derive(Debug, Clone)]
pub struct ProxGradResult {
    /// x̂ = Prox_{λg}(x − λ∇f(x)).
    pub xhat: Vec<f64>,
    /// v̂ = ∇f(x̂) − ∇f(x) + (x − x̂)/λ. The pair (x̂, v̂ − ∇f(x̂)) always lies
    /// in the graph of ∂g, which is what makes v̂ a usable residual for the
    /// generalized Newton systems.
    pub vhat: Vec<f64>,
    /// η = ‖x − x̂‖, the stopping quantity.
    pub eta: f64,
    /// φ_λ(x).
    pub fbe: f64,
}

/// Prox-gradient step with the normal-map residual and the FBE value at x.
///
/// Debug builds assert the two per-step envelope inequalities:
/// (1/λ−L_f)η ≤ ‖v̂‖ ≤ (1/λ+L_f)η and φ_λ(x) ≥ φ(x̂) + (1−λL_f)/(2λ)η².
pub fn prox_grad_step(x: &[f64], problem: &CompositeProblem, lambda: f64) -> ProxGradResult {
    let grad_x = problem.f.gradient(x);
    let z: Vec<f64> = x.iter().zip(&grad_x).map(|(xi, gi)| xi - lambda * gi).collect();
    let xhat = problem.g.prox(&z, lambda);
    let grad_xhat = problem.f.gradient(&xhat);
    let vhat: Vec<f64> = (0..x.len())
        .map(|i| grad_xhat[i] - grad_x[i] + (x[i] - xhat[i]) / lambda)
        .collect();
    let eta = dist2(x, &xhat);

    let inner: f64 = grad_x.iter().zip(&xhat).zip(x).map(|((g, h), xi)| g * (h - xi)).sum();
    let fbe = problem.f.value(x) + inner + problem.g.value(&xhat) + eta * eta / (2.0 * lambda);

    #[cfg(debug_assertions)]
    {
        let lf = problem.lipschitz();
        let vn = nrm2(&vhat);
        debug_assert!(
            (1.0 / lambda - lf) * eta <= vn + 1e-9 && vn <= (1.0 / lambda + lf) * eta + 1e-9,
            "normal-map sandwich violated: eta={eta}, |v|={vn}, lambda={lambda}, lf={lf}"
        );
        let phi_hat = problem.objective(&xhat);
        debug_assert!(
            fbe + 1e-9 >= phi_hat + (1.0 - lambda * lf) / (2.0 * lambda) * eta * eta,
            "FBE majorization violated: fbe={fbe}, phi(xhat)={phi_hat}"
        );
    }

    ProxGradResult { xhat, vhat, eta, fbe }
}

/// φ_λ(x) given a precomputed x̂ = Prox_{λg}(x − λ∇f(x)).
pub fn fbe_value(x: &[f64], xhat: &[f64], problem: &CompositeProblem, lambda: f64) -> f64 {
    let grad_x = problem.f.gradient(x);
    let inner: f64 = grad_x.iter().zip(xhat).zip(x).map(|((g, h), xi)| g * (h - xi)).sum();
    let eta = dist2(x, xhat);
    problem.f.value(x) + inner + problem.g.value(xhat) + eta * eta / (2.0 * lambda)
}

/// φ_λ(x) through the Moreau envelope of g. Agrees with [`fbe_value`] to
/// roundoff; kept as an independent evaluation path for the tests.
pub fn fbe_value_envelope_form(x: &[f64], problem: &CompositeProblem, lambda: f64) -> f64 {
    let grad_x = problem.f.gradient(x);
    let z: Vec<f64> = x.iter().zip(&grad_x).map(|(xi, gi)| xi - lambda * gi).collect();
    problem.f.value(x) - lambda / 2.0 * dot(&grad_x, &grad_x)
        + moreau_envelope(&z, problem.g.as_ref(), lambda)
}

/// e_{λg}(z) = g(x̂) + ‖x̂−z‖²/(2λ) at x̂ = Prox_{λg}(z).
pub fn moreau_envelope(z: &[f64], reg: &dyn Regularizer, lambda: f64) -> f64 {
    let xhat = reg.prox(z, lambda);
    let d = dist2(&xhat, z);
    reg.value(&xhat) + d * d / (2.0 * lambda)
}

#[derive(Debug, Error)]
#[error("prox tie at coordinate {index}: the FBE is not differentiable there")]
pub struct TieError {
    pub index: usize,
}

/// ∇φ_λ(x) = λ⁻¹(I − λ∇²f(x))(x − x̂).
///
/// Valid wherever the prox is single-valued at x − λ∇f(x); coordinates
/// sitting on a prox tie make the FBE nonsmooth, so those are reported as an
/// error instead of silently returning garbage.
pub fn fbe_gradient(
    x: &[f64],
    problem: &CompositeProblem,
    lambda: f64,
) -> Result<Vec<f64>, TieError> {
    let grad_x = problem.f.gradient(x);
    let z: Vec<f64> = x.iter().zip(&grad_x).map(|(xi, gi)| xi - lambda * gi).collect();
    if let Some(index) = problem.g.prox_tie(&z, lambda) {
        return Err(TieError { index });
    }
    let xhat = problem.g.prox(&z, lambda);
    let diff: Vec<f64> = x.iter().zip(&xhat).map(|(xi, hi)| xi - hi).collect();
    let hdiff = problem.f.hess_action(x, &diff);
    Ok(diff
        .iter()
        .zip(&hdiff)
        .map(|(d, hd)| d / lambda - hd)
        .collect())
}
