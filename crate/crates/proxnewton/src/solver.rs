//! Solver drivers.
//!
//! All four methods share the same skeleton: evaluate the prox-gradient step
//! at the current iterate, stop when the fixed-point gap η = ‖x − x̂‖ falls
//! below tolerance, otherwise move. They differ only in how they move.
//!
//! * `solve_pgm`: x⁺ = x̂. The classical baseline.
//! * `solve_pure_newton`: x⁺ = x̂ + d with the generalized Newton direction,
//!   no safeguards. Fast near a solution, happily diverges elsewhere.
//! * `solve_glpg`: x⁺ = x̂ + τd with τ backtracked until the forward-backward
//!   envelope decreases by at least σ‖v̂‖². Any direction source, including
//!   d = 0 which reproduces `solve_pgm` iterate by iterate.
//! * `solve_gcnm`: `solve_glpg` with the Newton direction the regularizer
//!   advertises through its `newton_path`.

use crate::config::SolverConfig;
use crate::direction::{
    generic_newton_direction, l0_newton_direction, DirectionStatus, NewtonDirectionOutcome,
    DEFAULT_LINSOLVE_TOL,
};
use crate::envelope::{prox_grad_step, ProxGradResult};
use crate::la::nrm2;
use crate::problem::{CompositeProblem, NewtonPath};
use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// η = ‖x − x̂‖ fell below the tolerance; `final_x` is the prox point.
    Converged,
    MaxIterations,
    /// Unrecoverable state, message says what broke.
    Failed(String),
}

/// One completed update x_k → x_{k+1}. Scalar fields are always filled;
/// the vector snapshots obey `SolverConfig::trace_vectors` and stay empty
/// when it is off (large instances would otherwise hold every iterate).
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub xhat: Vec<f64>,
    pub vhat: Vec<f64>,
    pub d: Vec<f64>,
    /// Accepted step size; 0 marks the backtracking fallback x⁺ = x̂.
    pub tau: f64,
    pub fbe: f64,
    pub eta: f64,
    pub vhat_norm: f64,
    pub backtracks: usize,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SolveTotals {
    pub iterations: usize,
    pub elapsed_s: f64,
    pub final_fbe: f64,
    pub final_eta: f64,
    pub final_vhat_norm: f64,
    pub final_objective: f64,
    pub nnz: usize,
}

#[derive(Debug)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub final_x: Vec<f64>,
    pub totals: SolveTotals,
}

pub type CustomDirection =
    Box<dyn Fn(&[f64], &ProxGradResult, &CompositeProblem, f64) -> NewtonDirectionOutcome>;

pub enum DirectionStrategy {
    /// d = 0; the globalized loop degenerates to the prox-gradient method.
    Zero,
    /// Support-reduced solve for hard-thresholding regularizers.
    L0Newton,
    /// Full-space solve through the prox Jacobian element.
    GenericNewton,
    Custom(CustomDirection),
}

impl fmt::Debug for DirectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionStrategy::Zero => write!(f, "Zero"),
            DirectionStrategy::L0Newton => write!(f, "L0Newton"),
            DirectionStrategy::GenericNewton => write!(f, "GenericNewton"),
            DirectionStrategy::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Strategy the regularizer itself recommends, used by `solve_gcnm`.
pub fn strategy_for(problem: &CompositeProblem) -> Result<DirectionStrategy, String> {
    match problem.g.newton_path() {
        NewtonPath::SupportReduced => Ok(DirectionStrategy::L0Newton),
        NewtonPath::ProxJacobian => Ok(DirectionStrategy::GenericNewton),
        NewtonPath::Unsupported => {
            Err("regularizer offers no generalized Newton direction".to_string())
        }
    }
}

fn direction_for(
    strategy: &DirectionStrategy,
    x: &[f64],
    step: &ProxGradResult,
    problem: &CompositeProblem,
    lambda: f64,
) -> Result<NewtonDirectionOutcome, String> {
    match strategy {
        DirectionStrategy::Zero => Ok(NewtonDirectionOutcome {
            d: vec![0.0; x.len()],
            status: DirectionStatus::Solved,
            residual: 0.0,
            support: Vec::new(),
            rank_deficient: false,
        }),
        DirectionStrategy::L0Newton => Ok(l0_newton_direction(
            &step.xhat,
            &step.vhat,
            |w| problem.f.hess_action(&step.xhat, w),
            DEFAULT_LINSOLVE_TOL,
        )),
        DirectionStrategy::GenericNewton => {
            generic_newton_direction(&step.xhat, &step.vhat, problem, lambda, DEFAULT_LINSOLVE_TOL)
                .map_err(|e| e.to_string())
        }
        DirectionStrategy::Custom(f) => Ok(f(x, step, problem, lambda)),
    }
}

fn nnz(x: &[f64]) -> usize {
    x.iter().filter(|&&v| v != 0.0).count()
}

struct TraceBuilder {
    start: Instant,
    records: Vec<IterationRecord>,
    trace_vectors: bool,
}

impl TraceBuilder {
    fn new(trace_vectors: bool) -> Self {
        TraceBuilder { start: Instant::now(), records: Vec::new(), trace_vectors }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        k: usize,
        x: &[f64],
        step: &ProxGradResult,
        d: &[f64],
        tau: f64,
        vhat_norm: f64,
        backtracks: usize,
    ) {
        let (xv, xh, vh, dv) = if self.trace_vectors {
            (x.to_vec(), step.xhat.clone(), step.vhat.clone(), d.to_vec())
        } else {
            (Vec::new(), Vec::new(), Vec::new(), Vec::new())
        };
        self.records.push(IterationRecord {
            k,
            x: xv,
            xhat: xh,
            vhat: vh,
            d: dv,
            tau,
            fbe: step.fbe,
            eta: step.eta,
            vhat_norm,
            backtracks,
            elapsed_s: self.start.elapsed().as_secs_f64(),
        });
    }

    fn finish(
        self,
        termination: Termination,
        final_x: Vec<f64>,
        step: &ProxGradResult,
        vhat_norm: f64,
        problem: &CompositeProblem,
    ) -> SolveTrace {
        let totals = SolveTotals {
            iterations: self.records.len(),
            elapsed_s: self.start.elapsed().as_secs_f64(),
            final_fbe: step.fbe,
            final_eta: step.eta,
            final_vhat_norm: vhat_norm,
            final_objective: problem.objective(&final_x),
            nnz: nnz(&final_x),
        };
        SolveTrace { records: self.records, termination, final_x, totals }
    }
}

/// Globalized line-search prox-gradient method with a pluggable direction.
///
/// Directions flagged `rank_deficient` count as available only while the
/// first-order residual η has stopped halving between iterations; otherwise
/// the step degrades to d = 0 and the prox point carries the progress.
pub fn solve_glpg(
    problem: &CompositeProblem,
    config: &SolverConfig,
    x0: &[f64],
    strategy: &DirectionStrategy,
) -> SolveTrace {
    let lambda = config.lambda;
    let mut tb = TraceBuilder::new(config.trace_vectors);
    let mut x = x0.to_vec();
    let mut pending: Option<ProxGradResult> = None;
    let mut prev_eta: Option<f64> = None;

    for k in 0..config.max_iter {
        let step = pending
            .take()
            .unwrap_or_else(|| prox_grad_step(&x, problem, lambda));
        let vnorm = nrm2(&step.vhat);
        if !step.fbe.is_finite() || !vnorm.is_finite() {
            let msg = "non-finite envelope or residual encountered".to_string();
            return tb.finish(Termination::Failed(msg), step.xhat.clone(), &step, vnorm, problem);
        }
        if step.eta <= config.tol {
            return tb.finish(Termination::Converged, step.xhat.clone(), &step, vnorm, problem);
        }

        let mut dir = match direction_for(strategy, &x, &step, problem, lambda) {
            Ok(d) => d,
            Err(msg) => {
                return tb.finish(Termination::Failed(msg), step.xhat.clone(), &step, vnorm, problem)
            }
        };
        // A rank-deficient system pins the direction down only on the range
        // of the Hessian block; the basic solution fills the rest by pivot
        // order, not by the model. Trust that freedom only once first-order
        // progress has stalled (η no longer halving per iteration), where
        // committing to some support is what unsticks the method. While the
        // prox step is still contracting on its own, drop the direction.
        let stalled = prev_eta.is_some_and(|pe| step.eta >= 0.5 * pe);
        if dir.rank_deficient && !stalled {
            for di in dir.d.iter_mut() {
                *di = 0.0;
            }
            dir.status = DirectionStatus::FallbackZero;
        }
        prev_eta = Some(step.eta);

        // Backtrack until the envelope drops by the σ‖v̂‖² margin. The prox
        // point itself clears that margin with room to spare (the envelope
        // majorizes the objective at x̂ by a strictly larger multiple of η²,
        // which is how σ's upper bound is chosen), so the fallback is safe.
        let target = step.fbe - config.sigma * vnorm * vnorm;
        let mut tau = 1.0;
        let mut backtracks = 0usize;
        let (next_x, next_step, tau_used) = loop {
            let cand: Vec<f64> = step
                .xhat
                .iter()
                .zip(&dir.d)
                .map(|(xh, di)| xh + tau * di)
                .collect();
            let cstep = prox_grad_step(&cand, problem, lambda);
            if cstep.fbe <= target {
                break (cand, cstep, tau);
            }
            backtracks += 1;
            if backtracks > config.max_backtracks {
                let cand = step.xhat.clone();
                let cstep = prox_grad_step(&cand, problem, lambda);
                break (cand, cstep, 0.0);
            }
            tau *= config.beta;
        };

        tb.push(k, &x, &step, &dir.d, tau_used, vnorm, backtracks);
        x = next_x;
        pending = Some(next_step);
    }

    let step = pending.unwrap_or_else(|| prox_grad_step(&x, problem, lambda));
    let vnorm = nrm2(&step.vhat);
    tb.finish(Termination::MaxIterations, step.xhat.clone(), &step, vnorm, problem)
}

/// Globalized coderivative Newton method: GLPG steered by the direction the
/// regularizer exposes.
pub fn solve_gcnm(problem: &CompositeProblem, config: &SolverConfig, x0: &[f64]) -> SolveTrace {
    match strategy_for(problem) {
        Ok(strategy) => solve_glpg(problem, config, x0, &strategy),
        Err(msg) => {
            let step = prox_grad_step(x0, problem, config.lambda);
            let vnorm = nrm2(&step.vhat);
            TraceBuilder::new(config.trace_vectors).finish(
                Termination::Failed(msg),
                step.xhat.clone(),
                &step,
                vnorm,
                problem,
            )
        }
    }
}

/// Plain prox-gradient iteration x⁺ = x̂.
pub fn solve_pgm(problem: &CompositeProblem, config: &SolverConfig, x0: &[f64]) -> SolveTrace {
    let lambda = config.lambda;
    let mut tb = TraceBuilder::new(config.trace_vectors);
    let mut x = x0.to_vec();

    for k in 0..config.max_iter {
        let step = prox_grad_step(&x, problem, lambda);
        let vnorm = nrm2(&step.vhat);
        if !step.fbe.is_finite() || !vnorm.is_finite() {
            let msg = "non-finite envelope or residual encountered".to_string();
            return tb.finish(Termination::Failed(msg), step.xhat.clone(), &step, vnorm, problem);
        }
        if step.eta <= config.tol {
            return tb.finish(Termination::Converged, step.xhat.clone(), &step, vnorm, problem);
        }
        let zeros = vec![0.0; x.len()];
        tb.push(k, &x, &step, &zeros, 1.0, vnorm, 0);
        x = step.xhat;
    }

    let step = prox_grad_step(&x, problem, lambda);
    let vnorm = nrm2(&step.vhat);
    tb.finish(Termination::MaxIterations, step.xhat.clone(), &step, vnorm, problem)
}

/// Ungloba­lized Newton iteration x⁺ = x̂ + d. Fails loudly when the direction
/// solve falls back while the residual is still above tolerance; without a
/// direction this method has nothing to offer over `solve_pgm`.
pub fn solve_pure_newton(
    problem: &CompositeProblem,
    config: &SolverConfig,
    x0: &[f64],
) -> SolveTrace {
    let lambda = config.lambda;
    let strategy = match strategy_for(problem) {
        Ok(s) => s,
        Err(msg) => {
            let step = prox_grad_step(x0, problem, lambda);
            let vnorm = nrm2(&step.vhat);
            return TraceBuilder::new(config.trace_vectors).finish(
                Termination::Failed(msg),
                step.xhat.clone(),
                &step,
                vnorm,
                problem,
            );
        }
    };
    let mut tb = TraceBuilder::new(config.trace_vectors);
    let mut x = x0.to_vec();

    for k in 0..config.max_iter {
        let step = prox_grad_step(&x, problem, lambda);
        let vnorm = nrm2(&step.vhat);
        if !step.fbe.is_finite() || !vnorm.is_finite() {
            let msg = "non-finite envelope or residual encountered".to_string();
            return tb.finish(Termination::Failed(msg), step.xhat.clone(), &step, vnorm, problem);
        }
        if step.eta <= config.tol {
            return tb.finish(Termination::Converged, step.xhat.clone(), &step, vnorm, problem);
        }
        let dir = match direction_for(&strategy, &x, &step, problem, lambda) {
            Ok(d) => d,
            Err(msg) => {
                return tb.finish(Termination::Failed(msg), step.xhat.clone(), &step, vnorm, problem)
            }
        };
        if dir.status == DirectionStatus::FallbackZero {
            let msg = "Newton step unavailable: direction solve fell back to zero away from a solution"
                .to_string();
            return tb.finish(Termination::Failed(msg), step.xhat.clone(), &step, vnorm, problem);
        }
        tb.push(k, &x, &step, &dir.d, 1.0, vnorm, 0);
        x = step.xhat.iter().zip(&dir.d).map(|(a, b)| a + b).collect();
    }

    let step = prox_grad_step(&x, problem, lambda);
    let vnorm = nrm2(&step.vhat);
    tb.finish(Termination::MaxIterations, step.xhat.clone(), &step, vnorm, problem)
}

/// Point diagnostic used by tests and the CLI `solve` command.
#[derive(Debug, Clone)]
pub struct CriticalityReport {
    /// Fixed-point gap ‖x − x̂‖.
    pub eta: f64,
    pub vhat_norm: f64,
    /// ‖∇f(x̂) + (z − x̂)/λ‖ with z = x − λ∇f(x), evaluated through the
    /// normal-map formula rather than v̂'s incremental form; the two agree
    /// identically in exact arithmetic.
    pub normal_map_norm: f64,
    pub fbe: f64,
    pub objective: f64,
    pub nnz: usize,
    /// (x̂, v̂ − ∇f(x̂)) lies in the graph of ∂g.
    pub residual_in_subdiff: bool,
    /// (1/λ − L_f)η ≤ ‖v̂‖ ≤ (1/λ + L_f)η up to 1e-9 relative slack.
    pub sandwich_ok: bool,
}

pub fn criticality_report(x: &[f64], problem: &CompositeProblem, lambda: f64) -> CriticalityReport {
    let step = prox_grad_step(x, problem, lambda);
    let vnorm = nrm2(&step.vhat);
    let lf = problem.lipschitz();
    let grad_hat = problem.f.gradient(&step.xhat);
    let sub: Vec<f64> = step.vhat.iter().zip(&grad_hat).map(|(v, g)| v - g).collect();

    let grad = problem.f.gradient(x);
    let z: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - lambda * gi).collect();
    let xh = problem.g.prox(&z, lambda);
    let gh = problem.f.gradient(&xh);
    let nm: Vec<f64> = (0..x.len())
        .map(|i| gh[i] + (z[i] - xh[i]) / lambda)
        .collect();

    let lower = (1.0 / lambda - lf) * step.eta;
    let upper = (1.0 / lambda + lf) * step.eta;
    let slack = 1e-9 * (1.0 + upper.abs());
    CriticalityReport {
        eta: step.eta,
        vhat_norm: vnorm,
        normal_map_norm: nrm2(&nm),
        fbe: step.fbe,
        objective: problem.objective(x),
        nnz: nnz(&step.xhat),
        residual_in_subdiff: problem.g.subdiff_member(&step.xhat, &sub),
        sandwich_ok: vnorm >= lower - slack && vnorm <= upper + slack,
    }
}
