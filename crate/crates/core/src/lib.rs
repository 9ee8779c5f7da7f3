//! Spin-1/2 dynamics in a rotating rf field.
//!
//! The Hamiltonian is
//! `H(t) = 2π [ω0 σz/2 + ω1 (σx cos 2πω′t + σy sin 2πω′t)/2]`
//! with all user-facing frequencies in Hz. The crate provides the exact
//! rotating-frame solution, two numerical propagators (midpoint stepping and
//! a discrete pulse sequence), the traditional, Tong and Wu adiabaticity
//! measures, and deterministic parallel sweeps over the `(K, R)` plane.

pub mod criteria;
pub mod error;
pub mod integrators;
pub mod matrix;
pub mod quadrature;
pub mod spin;
pub mod sweep;
pub mod validation;

pub use error::{CoreError, Result};
pub use matrix::{Matrix2H, Unitary2};
pub use spin::{
    eigensystem, exact_state, f_min_closed, fidelity, fidelity_trace_closed, hamiltonian_matrix, initial_state, t_min,
    EigenSystem, FidelityTrace, FieldParams, Method, Spinor,
};

/// Two pi, the single Hz → rad/s conversion factor.
pub const TWO_PI: f64 = std::f64::consts::TAU;
