//! Simulation and analysis toolkit for the Dolzhansky-Kirchhoff (D-K)
//! equations, the six-variable reduction of ideal/resistive compressible
//! MHD to linear fields on an ellipsoid.
//!
//! The crate provides:
//!
//! - [`taylor`]: truncated Taylor coefficient hierarchies of polynomial
//!   vector fields and the exact evolution equations of their coefficient
//!   tensors under the Lie bracket, with conservation diagnostics.
//! - [`geometry`]: ellipsoid semi-axes, moments, shape ratios, the
//!   Dolzhansky basis fields and numeric verification of their Lie algebra.
//! - [`dynamics`]: the six-variable state, ideal and resistive right-hand
//!   sides, parameter ramp schedules, and the invariants
//!   (Hamiltonian, cross-helicity, Casimir, Clebsch integrals).
//! - [`integrator`]: adaptive embedded Runge-Kutta 5(4) integration with
//!   dense-output sampling and zero-crossing event location, plus a
//!   fixed-step RK4 mode for bitwise-reproducible regression runs.
//! - [`stability`]: closed-form linear stability of the aligned and
//!   orthogonal equilibria and the quartic effective-potential analysis.
//! - [`scenario`]: scenario configuration, preset experiments, and the
//!   run driver; [`output`]: CSV and plot-file emission.
//! - [`verify`]: self-check suites (oracle equivalence, conservation,
//!   structure constants, reduction identity) driven by the CLI.

// index-based loops mirror the tensor suffix notation of the evolution
// equations; `!(x > 0)` validation intentionally rejects NaN
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod linalg;
pub mod output;
pub mod poly;
pub mod scenario;
pub mod stability;
pub mod taylor;
pub mod verify;

pub use error::{Error, Result};
