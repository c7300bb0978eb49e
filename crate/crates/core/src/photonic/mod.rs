//! Component-level linear optics over (path, frequency bin, time bin) modes.
//!
//! A [`FieldState`] is a sparse amplitude map over [`ModeKey`]s. Each
//! [`Component`] is a linear map that never increases the norm, and a
//! [`Circuit`] applies them in order. The builders in [`builders`] lay out
//! the X, CINC and SUM gates from intensity/phase modulators, a 1x2 MZM
//! switch, fiber delays, a 2x2 coupler, DWDM filters and a chirped fiber
//! Bragg grating.

pub mod builders;
mod circuit;
mod component;
mod field;
mod grid;

pub use builders::{
    analyzer_delays, build_cinc_circuit, build_fringe_circuit, build_sum_circuit,
    build_x_gate_circuit, fringe_input, prepare_basis_input, CircuitParams,
};
pub use circuit::{
    amplitude_matrix, output_distribution, run_circuit, run_circuit_jittered, transfer_matrix,
    Circuit,
};
pub use component::{
    apply_component, leak_amplitude, Component, CouplerConvention, DwdmDirection, DwdmPort,
};
pub use field::{FieldState, ModeKey};
pub use grid::{pulse_spread_ns, PhysicalGrid};
