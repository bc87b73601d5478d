//! Bell-CHSH and Bell-CH functionals for continuous-variable two-mode states.
//!
//! The crate evaluates and optimizes Bell combinations for two-mode squeezed
//! states and entangled coherent states under several families of dichotomic
//! observables: pseudospin operators, Gisin-Peres block observables, displaced
//! parity (through the Wigner function), qubit projectors, displaced vacuum
//! projectors (through the Husimi Q function) and rotated parity projectors.
//!
//! Every closed-form expression has a truncated Fock-space counterpart in
//! [`fock`] and [`observables`] that serves as its numerical oracle.

pub mod bell;
pub mod error;
pub mod figures;
pub mod fock;
pub mod laguerre;
pub mod observables;
pub mod optimize;
pub mod phase_space;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
