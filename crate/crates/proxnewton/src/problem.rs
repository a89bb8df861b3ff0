//! Problem contracts: the smooth part `f`, the nonsmooth part `g`, and their
//! pairing into a composite objective `f + g`.
//!
//! Solvers only ever see these traits. `f` must be C²-smooth with an
//! L-Lipschitz gradient (the bound is part of the contract because every
//! admissible step size is derived from it); `g` must be proper, lower
//! semicontinuous and prox-bounded, with a prox that can be evaluated exactly.

use nalgebra::DMatrix;

/// Smooth part of the objective: value, gradient, Hessian action, and a valid
/// Lipschitz modulus of the gradient.
pub trait SmoothModel: Send + Sync {
    /// Dimension of the variable.
    fn dim(&self) -> usize;

    /// f(x).
    fn value(&self, x: &[f64]) -> f64;

    /// ∇f(x).
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// w ↦ ∇²f(x)·w. For the shipped models this is exact, not a difference
    /// approximation.
    fn hess_action(&self, x: &[f64], w: &[f64]) -> Vec<f64>;

    /// Dense Hessian at `x`, when the model can materialize it cheaply.
    /// Callers fall back to column-by-column `hess_action` probes.
    fn dense_hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Upper bound L on the Lipschitz modulus of ∇f over all of ℝⁿ.
    /// Must be finite and positive for solver configuration to succeed.
    fn lipschitz(&self) -> f64;

    /// ‖Ax−b‖ for data-fitting models that have one; feeds the δ column of
    /// benchmark reports.
    fn residual_norm(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

/// Which generalized Newton system the regularizer supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonPath {
    /// Support-reduced system: directions vanish off the support of x̂ and
    /// solve the Hessian block on the support. The hard-thresholding prox
    /// has exactly this structure.
    SupportReduced,
    /// Full-space system built from an element of the prox Bouligand
    /// Jacobian.
    ProxJacobian,
    /// No Newton machinery available; Newton-type solvers refuse to run.
    Unsupported,
}

/// Nonsmooth part of the objective.
///
/// All shipped regularizers are separable (coordinatewise sums), nonnegative,
/// and prox-bounded with threshold ∞. The separable structure is what the
/// brute-force prox oracle relies on.
pub trait Regularizer: Send + Sync {
    /// g(x), extended-real in general; the shipped ones are finite everywhere.
    fn value(&self, x: &[f64]) -> f64;

    /// Per-coordinate value for separable g, i.e. g(x) = Σᵢ coord_value(xᵢ).
    fn coord_value(&self, t: f64) -> f64;

    /// Prox_{λg}(z), the (a) minimizer of y ↦ g(y) + ‖y−z‖²/(2λ). Where the
    /// minimizer is not unique the implementation commits to one choice and
    /// documents it, so traces are reproducible.
    fn prox(&self, z: &[f64], lambda: f64) -> Vec<f64>;

    /// Membership test v ∈ ∂g(x) for the limiting subdifferential.
    fn subdiff_member(&self, x: &[f64], v: &[f64]) -> bool;

    /// Prox-boundedness threshold λ_g. Step sizes must stay below it.
    fn prox_threshold(&self) -> f64 {
        f64::INFINITY
    }

    /// Diagonal of an element of the Bouligand Jacobian of Prox_{λg} at `z`,
    /// for regularizers whose prox is coordinatewise. `None` when no Jacobian
    /// element is available; generalized Newton directions then cannot be
    /// formed through the full-space system.
    fn prox_jacobian_diag(&self, _z: &[f64], _lambda: f64) -> Option<Vec<f64>> {
        None
    }

    /// Index of a coordinate of `z` lying on (within fp slack of) a prox tie,
    /// where the prox is set-valued and envelope gradients are unreliable.
    fn prox_tie(&self, _z: &[f64], _lambda: f64) -> Option<usize> {
        None
    }

    /// Preferred generalized-Newton formulation.
    fn newton_path(&self) -> NewtonPath {
        NewtonPath::Unsupported
    }
}

/// The composite objective minimize f(x) + g(x).
pub struct CompositeProblem {
    pub f: Box<dyn SmoothModel>,
    pub g: Box<dyn Regularizer>,
    lf: f64,
}

impl CompositeProblem {
    /// Pair a smooth model with a regularizer. The Lipschitz bound is read
    /// off the model once here; everything downstream uses this cached value
    /// so a config validated against the problem stays valid.
    pub fn new(f: Box<dyn SmoothModel>, g: Box<dyn Regularizer>) -> Self {
        let lf = f.lipschitz();
        CompositeProblem { f, g, lf }
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Cached Lipschitz bound L_f of ∇f.
    pub fn lipschitz(&self) -> f64 {
        self.lf
    }

    /// Full objective φ(x) = f(x) + g(x).
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.f.value(x) + self.g.value(x)
    }
}
