//! Circuit layouts for the X, CINC and SUM gates and the fringe measurement.
//!
//! Every builder reads the gate out on one coupler port, so ideal circuits
//! transmit half the light. Ideal relative phases between the two coupler
//! inputs are zeroed by a phase shifter on the delayed arm.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::component::{apply_component, Component, CouplerConvention, DwdmDirection, DwdmPort};
use super::field::{FieldState, ModeKey};
use super::grid::PhysicalGrid;
use crate::{Error, Result};

/// Dispersion of the chirped fiber Bragg grating in the SUM gate.
pub const SUM_DISPERSION_NS_PER_NM: f64 = -2.0;

/// Extinction ratios of the routing elements. `f64::INFINITY` is ideal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub mzm_extinction_db: f64,
    pub dwdm_extinction_db: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self::ideal()
    }
}

impl CircuitParams {
    pub fn ideal() -> Self {
        Self {
            mzm_extinction_db: f64::INFINITY,
            dwdm_extinction_db: f64::INFINITY,
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("gate dimension must be ≥ 2, got {d}")));
    }
    Ok(())
}

/// The time-bin shift `|n⟩ → |n+1 mod d⟩` on `input`, read out on `input`
/// with the frame shifted by `d − 1` bins.
///
/// Bins `0..d−1` are switched to `spare`, delayed by `d` bins and phase
/// corrected; bin `d − 1` stays on `input`. The coupler merges both onto
/// `input`.
fn x_stage(input: usize, spare: usize, d: usize, params: &CircuitParams) -> Vec<Component> {
    let mut port = vec![1u8; d - 1];
    port.push(0);
    vec![
        Component::MzmSwitch {
            input,
            outputs: [input, spare],
            port,
            extinction_db: params.mzm_extinction_db,
        },
        Component::FiberDelay { path: spare, bins: d as i64 },
        Component::PhaseShifter { path: spare, phase: -FRAC_PI_2 },
        Component::Coupler2x2 {
            inputs: [input, spare],
            outputs: [input, spare],
            convention: CouplerConvention::Symmetric,
        },
    ]
}

/// Single time-bin qudit X gate (one frequency bin).
pub fn build_x_gate_circuit(grid: &PhysicalGrid, d: usize, params: &CircuitParams) -> Result<Circuit> {
    check_dim(d)?;
    let c = Circuit {
        name: format!("x{d}"),
        freq_bins: 1,
        time_bins: d,
        paths: 2,
        input_path: 0,
        output_path: 0,
        readout_offset: d - 1,
        time_window: 2 * d,
        grid: grid.clone(),
        components: x_stage(0, 1, d, params),
    };
    c.validate()?;
    Ok(c)
}

/// Controlled increment on `d × d` modes: frequency bin `d − 1` gets the X
/// gate, every other frequency bin passes through a matched delay.
///
/// Paths: 0 input, 1 pass-through, 2/3 X-gate arms, 4 output.
pub fn build_cinc_circuit(grid: &PhysicalGrid, d: usize, params: &CircuitParams) -> Result<Circuit> {
    check_dim(d)?;
    let ports = vec![
        DwdmPort { path: 1, bins: (0..d - 1).collect() },
        DwdmPort { path: 2, bins: vec![d - 1] },
    ];
    let mut components = vec![Component::Dwdm {
        common: 0,
        direction: DwdmDirection::Demux,
        ports: ports.clone(),
        extinction_db: params.dwdm_extinction_db,
    }];
    components.extend(x_stage(2, 3, d, params));
    components.push(Component::FiberDelay { path: 1, bins: d as i64 - 1 });
    components.push(Component::Dwdm {
        common: 4,
        direction: DwdmDirection::Mux,
        ports,
        extinction_db: params.dwdm_extinction_db,
    });
    let c = Circuit {
        name: format!("cinc{d}"),
        freq_bins: d,
        time_bins: d,
        paths: 5,
        input_path: 0,
        output_path: 4,
        readout_offset: d - 1,
        time_window: 2 * d,
        grid: grid.clone(),
        components,
    };
    c.validate()?;
    Ok(c)
}

/// `|m⟩_f|n⟩_t → |m⟩_f|n+m mod d⟩_t`.
///
/// The grating delays frequency bin `m` by `m` bins. The switch then sends
/// bins still inside the frame (`t < d`) through a `d`-bin delay and leaves
/// the overflow bins (`t ≥ d`) undelayed, which folds them back modulo `d`.
pub fn build_sum_circuit(grid: &PhysicalGrid, d: usize, params: &CircuitParams) -> Result<Circuit> {
    check_dim(d)?;
    let mut port = vec![0u8; d];
    port.extend(std::iter::repeat_n(1u8, d - 1));
    let c = Circuit {
        name: format!("sum{d}"),
        freq_bins: d,
        time_bins: d,
        paths: 2,
        input_path: 0,
        output_path: 0,
        readout_offset: d,
        time_window: 3 * d,
        grid: grid.clone(),
        components: vec![
            Component::Cfbg {
                path: 0,
                dispersion_ns_per_nm: SUM_DISPERSION_NS_PER_NM,
                tolerance: 0.1,
            },
            Component::MzmSwitch {
                input: 0,
                outputs: [0, 1],
                port,
                extinction_db: params.mzm_extinction_db,
            },
            Component::FiberDelay { path: 0, bins: d as i64 },
            Component::PhaseShifter { path: 1, phase: -FRAC_PI_2 },
            Component::Coupler2x2 {
                inputs: [0, 1],
                outputs: [0, 1],
                convention: CouplerConvention::Symmetric,
            },
        ],
    };
    c.validate()?;
    // Fails early if the grid does not map the grating onto whole bins.
    for f in 0..d {
        grid.dispersion_delay_bins(f, SUM_DISPERSION_NS_PER_NM, 0.1)?;
    }
    Ok(c)
}

/// Delays of the analysis cascade: 1, 2, 4, ... until they span `d − 1` bins.
pub fn analyzer_delays(d: usize) -> Vec<usize> {
    let mut delays = Vec::new();
    let mut span = 0;
    while span < d - 1 {
        let k = span + 1;
        delays.push(k);
        span += k;
    }
    delays
}

/// Phase ramp `0, φ, 2φ, ...` over the time bins, the X gate, then the
/// cascade of unbalanced interferometers. Feed it [`fringe_input`]; the
/// fringe is the detection probability in computational bin `d − 1`.
pub fn build_fringe_circuit(grid: &PhysicalGrid, d: usize, phi: f64, params: &CircuitParams) -> Result<Circuit> {
    let mut c = build_x_gate_circuit(grid, d, params)?;
    c.name = format!("fringe{d}");
    let delays = analyzer_delays(d);
    c.time_window += delays.iter().sum::<usize>();
    c.components.insert(
        0,
        Component::PhaseModulator {
            path: 0,
            phases: (0..d).map(|n| n as f64 * phi).collect(),
        },
    );
    for k in delays {
        c.components.push(Component::DelayInterferometer { path: 0, delay_bins: k, phase: 0.0 });
    }
    c.validate()?;
    Ok(c)
}

/// Equal superposition of all `d` time bins in one frequency bin.
pub fn fringe_input(d: usize) -> FieldState {
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    (0..d).map(|t| (ModeKey::new(0, 0, t), a)).collect()
}

/// Basis state `(f, t)` carved from a flat source by a pulse shaper and an
/// intensity modulator with finite extinction, renormalized. The other
/// modes keep a small leaked amplitude.
pub fn prepare_basis_input(
    f: usize,
    t: usize,
    freq_bins: usize,
    time_bins: usize,
    im_extinction_db: f64,
    shaper_extinction_db: f64,
) -> Result<FieldState> {
    if f >= freq_bins || t >= time_bins {
        return Err(Error::IndexOutOfRange {
            what: "basis input",
            index: f * time_bins + t,
            limit: freq_bins * time_bins,
        });
    }
    let source: FieldState = (0..freq_bins)
        .flat_map(|m| (0..time_bins).map(move |n| (ModeKey::new(0, m, n), Complex64::new(1.0, 0.0))))
        .collect();
    let mut mask = vec![Complex64::new(0.0, 0.0); freq_bins];
    mask[f] = Complex64::new(1.0, 0.0);
    let mut transmit = vec![false; time_bins];
    transmit[t] = true;
    let grid = PhysicalGrid::microring();
    let shaped = apply_component(
        &Component::PulseShaper { path: 0, mask, extinction_db: shaper_extinction_db },
        &source,
        &grid,
    )?;
    let carved = apply_component(
        &Component::IntensityModulator { path: 0, transmit, extinction_db: im_extinction_db },
        &shaped,
        &grid,
    )?;
    Ok(carved.normalized())
}
