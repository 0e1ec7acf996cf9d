//! Analysis toolkit for bit-flip (NOT) gate realizations constrained by an
//! additive spin-Z conservation law on the joint register of one
//! computational qubit plus an N-qubit control ancilla.
//!
//! The crate provides:
//!
//! * [`hilbert`] — dense complex state vectors on the joint space, tensor
//!   products, the ancilla partial trace, and the Hamming-weight sector
//!   decomposition of the ancilla.
//! * [`conservation`] — block unitaries that commute with total Z, Haar
//!   sampling of them, the four-component decomposition of a gate action,
//!   and the bounds computable from an ancilla state alone.
//! * [`channels`] — the gate channel of an implementation, the ideal NOT,
//!   trace-distance/fidelity measures, and the worst-case input search.
//! * [`spectral`] — Chebyshev polynomials of the second kind, the
//!   tridiagonal half-band matrix spectrum, the constrained maximization of
//!   the sector-coefficient overlap sum, and all closed-form bounds.
//! * [`constructions`] — the optimal classically complete chain
//!   implementation, the uniform-ancilla example, and purification of
//!   mixed-ancilla implementations.

pub mod channels;
pub mod conservation;
pub mod constructions;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod policy;
pub mod spectral;

pub use error::{Error, Result};
pub use policy::Tolerances;
