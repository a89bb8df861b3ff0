//! Solvers for structured nonconvex problems minimize f(x) + g(x), where f
//! is C²-smooth with Lipschitz gradient and g is a proper, lower
//! semicontinuous, prox-friendly regularizer such as the ℓ0 counting norm.
//!
//! The building blocks are the prox-gradient step, the forward-backward
//! envelope (a smooth merit function that shares stationary points with the
//! objective), and a generalized Newton direction obtained from the
//! second-order structure of g's subgradient graph. On top of those sit four
//! drivers: plain prox-gradient iteration, its line-search globalization
//! with pluggable directions, the Newton-globalized variant, and the bare
//! (local) Newton iteration.
//!
//! Shipped applications: ℓ0-ℓ2 sparse least squares, heavy-tail (Student-t)
//! regression with ℓ0 penalty, and ℓ0-ℓ2 image deblurring with a Gaussian
//! blur operator, plus reproducible instance generators and a PGM image
//! codec for the benchmark CLI.
//!
//! The `parallel` feature (on by default) parallelizes operator kernels with
//! rayon. Each output element is an independent left-to-right dot product,
//! so parallel and sequential builds produce bitwise-identical results.
//!
//! ```
//! use proxnewton::{
//!     make_config, solve_gcnm, CompositeProblem, ConfigOverrides, DenseMatrix,
//!     L0Norm, LeastSquaresRidge, Termination,
//! };
//!
//! // minimize ½‖Ax−b‖² + 0.1‖x‖² + 0.05‖x‖₀ with A = I
//! let f = LeastSquaresRidge::new(Box::new(DenseMatrix::identity(3)), vec![2.0, 0.0, 0.0], 0.1);
//! let problem = CompositeProblem::new(Box::new(f), Box::new(L0Norm::new(0.05)));
//! let config = make_config(&problem, &ConfigOverrides::default()).unwrap();
//! let trace = solve_gcnm(&problem, &config, &[1.0, 0.5, -0.5]);
//! assert_eq!(trace.termination, Termination::Converged);
//! assert_eq!(trace.totals.nnz, 1);
//! ```

pub mod blur;
pub mod config;
pub mod direction;
pub mod envelope;
pub mod instance;
pub mod la;
pub mod linop;
pub mod oracle;
pub mod pgm;
pub mod problem;
pub mod reg;
pub mod report;
pub mod smooth;
pub mod solver;

pub use blur::{blur_operator, gaussian_kernel, BlurOperator};
pub use config::{make_config, sigma_upper_bound, ConfigError, ConfigOverrides, SolverConfig};
pub use direction::{
    generic_newton_direction, l0_newton_direction, DirectionError, DirectionStatus,
    NewtonDirectionOutcome, DEFAULT_LINSOLVE_TOL,
};
pub use envelope::{
    fbe_gradient, fbe_value, fbe_value_envelope_form, moreau_envelope, prox_grad_step,
    ProxGradResult, TieError,
};
pub use instance::{
    gen_deblur, gen_l0l2, gen_studentt, read_instance, studentt_2d_example, synthetic_image,
    write_instance, Family, GeneratedInstance, InstanceError, InstanceSpec,
};
pub use linop::{
    materialize, power_iteration_ata, validate_operator_adjoint, AdjointReport, DenseMatrix,
    LinearOperator,
};
pub use oracle::{
    classify_stationary_2d, fd_gradient, fd_hessian_action, prox_oracle,
    stationary_set_check_2d, GridSpec, Stationary2d,
};
pub use pgm::{read_pgm, write_pgm, GrayImage, PgmError};
pub use problem::{CompositeProblem, NewtonPath, Regularizer, SmoothModel};
pub use reg::{
    l0_prox, l0_prox_jacobian, l0_subdiff_member, l0_value, L0Norm, TiePolicy, ZeroReg,
};
pub use report::{
    error_report, read_reports_csv, report_from_trace, termination_status, write_reports_csv,
    write_trace_csv, RunReport,
};
pub use smooth::{
    ls_grad_hess, ls_lipschitz, studentt_grad, studentt_hess_action, studentt_lipschitz,
    BlurModel, LeastSquaresRidge, StudentT,
};
pub use solver::{
    criticality_report, solve_gcnm, solve_glpg, solve_pgm, solve_pure_newton, strategy_for,
    CriticalityReport, DirectionStrategy, IterationRecord, SolveTotals, SolveTrace, Termination,
};
