//! Ridge-regularized convex programs solved in adaptive random subspaces.
//!
//! A program `min_x f(Ax) + (λ/2)‖x‖²` is restricted to the range of a
//! sketch `S = AᵀS̃`, solved in `m` dimensions and mapped back to `ℝ^d`
//! through its dual certificate. See [`solver`] for the single-shot path,
//! [`refine`] for the iterative variant, [`kernel`] for kernel programs and
//! [`bounds`] for the accompanying error estimates.

pub mod bounds;
pub mod error;
pub mod kernel;
pub mod matrices;
pub mod objectives;
mod random;
pub mod refine;
pub mod sketch;
pub mod solver;

pub use error::{Error, ParseLocation, Result};
pub use matrices::DenseMatrix;
