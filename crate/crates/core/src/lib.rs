//! Simulation of deterministic single-photon qudit gates encoded in the time
//! and frequency bins of one photon.
//!
//! The crate is split along the same lines as the physics:
//!
//! * [`state`] holds the dense state and matrix types. Two-qudit indices are
//!   frequency-major: `|m⟩_f|n⟩_t` lives at `m * d_t + n`.
//! * [`gates`] builds the ideal generalized Pauli, Weyl and two-qudit gates.
//! * [`photonic`] is a component-level linear-optics simulator over
//!   (path, frequency bin, time bin) modes, with builders for the X, CINC and
//!   SUM circuits.
//! * [`channel`] implements the Weyl-basis process matrix and the depolarizing
//!   model used to turn a fringe visibility into a process fidelity.
//! * [`stats`] covers photon-count sampling, accidental subtraction, Bayesian
//!   mean estimation and visibility extraction.
//! * [`experiment`] wires everything into reproducible, config-driven runs.

pub mod channel;
pub mod csvio;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod photonic;
pub mod rng;
pub mod state;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
