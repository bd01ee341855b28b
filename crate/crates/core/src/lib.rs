//! Steady-state photon statistics of a coherently driven two-level emitter in a
//! damped, incoherently pumped microcavity.
//!
//! * [`algebra`] normally ordered operator polynomials in `R_z`, `a†`, `a`
//! * [`eom`] the moment hierarchy of the dressed master equation
//! * [`steady`] solves the hierarchy and forms `<a†a>`, `g2(0)`, `g3(0)`
//! * [`closedform`] closed-form mean photon number and correlation functions
//! * [`lindblad`] brute-force density-matrix oracle on a truncated Fock space

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod closedform;
pub mod eom;
pub mod error;
pub mod lindblad;
pub mod steady;

pub use algebra::{Monomial, OperatorPoly};
pub use eom::{
    assemble_system, moment_eom, ModelParams, MomentIndex, MomentSystem, PhysicalParams,
};
pub use error::{Error, Result, Warning};
pub use steady::{observables, solve_steady, MomentVector, SteadySolution, SteadyStateResult};
