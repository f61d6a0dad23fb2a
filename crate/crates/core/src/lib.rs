#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Numerical laboratory for minimal surfaces.
//!
//! The crate covers the two-ring catenoid problem and its Jacobi spectrum,
//! the perturbation operator of the static catenoid viewed as a membrane in
//! Minkowski space, separable level-set minimal hypersurfaces, rotating
//! epicycloid shapes, minimal tori in S³, Stiefel cones and determinantal
//! varieties, and axially symmetric relativistic membrane dynamics.
//!
//! Everything is plain `f64` code; the shared kernels live in [`numerics`].

#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]

pub mod algebraic_min;
pub mod catenoid;
pub mod error;
pub mod membrane;
pub mod numerics;
pub mod rotating;
pub mod s3_tori;
pub mod separable;
pub mod soliton_spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{DenseMatrix, EigenResult, GridFunction, SLProblem};
