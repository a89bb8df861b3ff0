//! Solver configuration and parameter-range validation.
//!
//! The line-search methods are only guaranteed to descend for
//! λ ∈ (0, min{1/L_f, λ_g}) and σ ∈ (0, λ(1−λL_f)/(2(1+λL_f)²)), so those
//! boxes are enforced here, at construction, against the problem the config
//! will run on. A config that constructs is safe to hand to any solver.

use crate::problem::CompositeProblem;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Prox step size λ.
    pub lambda: f64,
    /// Sufficient-decrease weight σ in the line-search test
    /// φ_λ(x⁺) ≤ φ_λ(x) − σ‖v̂‖².
    pub sigma: f64,
    /// Backtracking factor β; trial steps walk the grid {1, β, β², …}.
    pub beta: f64,
    /// Stop once η = ‖x − x̂‖ falls to this.
    pub tol: f64,
    pub max_iter: usize,
    /// Line-search cap; on exhaustion the iterate falls back to x̂ itself,
    /// which satisfies the decrease test whenever σ is in range.
    pub max_backtracks: usize,
    /// Record x, x̂, v̂, d per iteration. Scalar diagnostics are always
    /// recorded; switch this off for long runs in high dimension.
    pub trace_vectors: bool,
}

/// Optional replacements for individual [`SolverConfig`] fields. Anything
/// left `None` takes the derived default.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConfigOverrides {
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    pub beta: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub max_backtracks: Option<usize>,
    pub trace_vectors: Option<bool>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("L_f = {0} is not a usable Lipschitz bound; need finite L_f > 0")]
    BadLipschitz(f64),
    #[error("lambda = {lambda} outside (0, min(1/L_f, lambda_g)) = (0, {cap}); lambda >= 1/L_f (or >= lambda_g) breaks the descent guarantee")]
    LambdaOutOfRange { lambda: f64, cap: f64 },
    #[error("sigma = {sigma} outside (0, lambda(1-lambda L_f)/(2(1+lambda L_f)^2)) = (0, {bound})")]
    SigmaOutOfRange { sigma: f64, bound: f64 },
    #[error("beta = {0} outside (0, 1)")]
    BetaOutOfRange(f64),
    #[error("tol = {0} must be positive")]
    TolNonPositive(f64),
    #[error("max_iter must be at least 1")]
    ZeroMaxIter,
    #[error("max_backtracks must be at least 1")]
    ZeroMaxBacktracks,
}

/// Upper end of the admissible σ interval for a given step size.
pub fn sigma_upper_bound(lambda: f64, lf: f64) -> f64 {
    let t = lambda * lf;
    lambda * (1.0 - t) / (2.0 * (1.0 + t) * (1.0 + t))
}

/// Build a validated config for `problem`.
///
/// Defaults: λ = 0.99·min(1/L_f, λ_g) (the theory allows anything below the
/// cap and larger steps converge faster here), σ = half its admissible upper
/// bound (any interior value works; half leaves slack against roundoff in
/// the bound itself), β = 0.5, tol = 1e-6.
pub fn make_config(
    problem: &CompositeProblem,
    overrides: &ConfigOverrides,
) -> Result<SolverConfig, ConfigError> {
    let lf = problem.lipschitz();
    if !(lf.is_finite() && lf > 0.0) {
        return Err(ConfigError::BadLipschitz(lf));
    }
    let cap = (1.0 / lf).min(problem.g.prox_threshold());

    let lambda = overrides.lambda.unwrap_or(0.99 * cap);
    if !(lambda > 0.0 && lambda < cap && lambda.is_finite()) {
        return Err(ConfigError::LambdaOutOfRange { lambda, cap });
    }

    let bound = sigma_upper_bound(lambda, lf);
    let sigma = overrides.sigma.unwrap_or(0.5 * bound);
    if !(sigma > 0.0 && sigma < bound) {
        return Err(ConfigError::SigmaOutOfRange { sigma, bound });
    }

    let beta = overrides.beta.unwrap_or(0.5);
    if !(beta > 0.0 && beta < 1.0) {
        return Err(ConfigError::BetaOutOfRange(beta));
    }

    let tol = overrides.tol.unwrap_or(1e-6);
    if !(tol > 0.0) {
        return Err(ConfigError::TolNonPositive(tol));
    }

    let max_iter = overrides.max_iter.unwrap_or(10_000);
    if max_iter == 0 {
        return Err(ConfigError::ZeroMaxIter);
    }
    let max_backtracks = overrides.max_backtracks.unwrap_or(50);
    if max_backtracks == 0 {
        return Err(ConfigError::ZeroMaxBacktracks);
    }

    Ok(SolverConfig {
        lambda,
        sigma,
        beta,
        tol,
        max_iter,
        max_backtracks,
        trace_vectors: overrides.trace_vectors.unwrap_or(true),
    })
}
