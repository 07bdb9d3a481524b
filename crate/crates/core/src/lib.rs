//! Frank-Wolfe type solvers for the LASSO.
//!
//! The crate solves
//!
//! ```text
//! minimize_x  ½‖y − Ax‖²₂ + λ‖x‖₁
//! ```
//!
//! with four algorithms sharing one instrumented contract:
//!
//! - [`solvers::pfw_solve`]: polyatomic Frank-Wolfe. Each iteration activates every
//!   coordinate whose dual certificate is within `δγ_k` of the maximum, then
//!   re-optimizes over the active set with a warm-started, early-stopped ISTA whose
//!   accuracy tightens as `ε₀γ_k`.
//! - [`solvers::vfw_solve`]: vanilla Frank-Wolfe on the epigraphical lift of the
//!   penalty, with exact line search.
//! - [`solvers::fcfw_solve`]: fully-corrective Frank-Wolfe.
//! - [`solvers::fista_solve`]: accelerated proximal gradient baseline.
//!
//! The [`harness`] module generates compressed-sensing instances, races the solvers
//! under a wall-clock budget, aggregates objective-vs-time curves and renders them.

pub mod error;
pub mod harness;
pub mod model;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{Certificate, DesignMatrix, LassoProblem, SparseIterate};
pub use solvers::{SolverConfig, SolverKind, TerminalReason, Trajectory};
