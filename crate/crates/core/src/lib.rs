//! Reduced rough paths `(X, 𝕊)` with a symmetric second level, paths controlled by them,
//! rough integrals via compensated Riemann sums and a Picard solver for
//! `dY = F(Y) d𝕏`, for Hölder exponents `α ∈ (1/3, 1/2]`.
//!
//! ```
//! use rrpath::drivers::gen_fbm;
//! use rrpath::smooth::Profile;
//! use rrpath::{solve_global, Grid, ReducedRoughPath, SmoothFunction, SolverConfig, Vector};
//! use std::sync::Arc;
//!
//! # fn main() -> rrpath::Result<()> {
//! let grid = Arc::new(Grid::uniform(512, 1.0)?);
//! let x = gen_fbm(0.45, 2, 7, grid)?;
//! let r = Arc::new(ReducedRoughPath::geometric_lift(x, 0.45)?);
//! let f = SmoothFunction::diagonal_field(Profile::Sin, 2);
//! let report = solve_global(&Vector::new(vec![1.0, 0.0])?, &f, &r, &SolverConfig::default())?;
//! assert!(report.residual_norm < 1e-10);
//! # Ok(())
//! # }
//! ```

pub mod check;
pub mod config;
pub mod controlled;
pub mod convergence;
pub mod drivers;
pub mod error;
pub mod grid;
pub mod rough_path;
pub mod sewing;
pub mod smooth;
pub mod solver;
pub mod tensor;

pub use controlled::{ControlledIntegrand, ControlledPath, ControlledVector, NormBound};
pub use error::{Error, Result};
pub use grid::{Grid, GridPath, PairBudget};
pub use rough_path::ReducedRoughPath;
pub use smooth::SmoothFunction;
pub use solver::{solve_global, SolveReport, SolverConfig};
pub use tensor::{BilinMap, LinMap, SymTensor2, Tensorial, Vector};
