use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{FieldState, ModeKey};
use super::grid::PhysicalGrid;
use crate::{Error, Result};

/// Field amplitude left in a blocked mode: `10^(−dB/20)`.
pub fn leak_amplitude(extinction_db: f64) -> f64 {
    if extinction_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-extinction_db / 20.0)
    }
}

fn default_tolerance() -> f64 {
    0.1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplerConvention {
    /// `(1/√2)[[1, i], [i, 1]]`.
    #[default]
    Symmetric,
    /// `(1/√2)[[1, 1], [1, −1]]`.
    Hadamard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwdmDirection {
    /// Common path in, one path per frequency band out.
    Demux,
    /// One path per band in, common path out.
    Mux,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DwdmPort {
    pub path: usize,
    pub bins: Vec<usize>,
}

/// A passive or electro-optic element acting on a [`FieldState`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    /// Carves time bins: listed bins marked `true` pass, everything else is
    /// suppressed by the extinction ratio.
    IntensityModulator {
        path: usize,
        transmit: Vec<bool>,
        extinction_db: f64,
    },
    /// Per-time-bin phase; bins past the list get no phase.
    PhaseModulator { path: usize, phases: Vec<f64> },
    /// Per-frequency-bin complex mask (`|m| ≤ 1`). Zero or missing entries
    /// are blocked down to the extinction ratio.
    PulseShaper {
        path: usize,
        mask: Vec<Complex64>,
        extinction_db: f64,
    },
    /// 1x2 switch: time bin `t` leaves on `outputs[port[t]]` (port 0 past the
    /// end of the list). Finite extinction leaks into the other output.
    MzmSwitch {
        input: usize,
        outputs: [usize; 2],
        port: Vec<u8>,
        extinction_db: f64,
    },
    /// 50/50 fiber coupler on two paths.
    Coupler2x2 {
        inputs: [usize; 2],
        outputs: [usize; 2],
        #[serde(default)]
        convention: CouplerConvention,
    },
    /// Shifts every time bin on `path` by `bins`.
    FiberDelay { path: usize, bins: i64 },
    /// Wavelength (de)multiplexer with disjoint frequency bands per port.
    Dwdm {
        common: usize,
        direction: DwdmDirection,
        ports: Vec<DwdmPort>,
        extinction_db: f64,
    },
    /// Chirped fiber Bragg grating: frequency bin `m` is delayed by the
    /// nearest whole number of time bins to `|D| λ² m Δf / c`.
    Cfbg {
        path: usize,
        dispersion_ns_per_nm: f64,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    PhaseShifter { path: usize, phase: f64 },
    /// Unbalanced interferometer read out on one port: each pass keeps
    /// `(a(t) + e^{iφ} a(t − k)) / 2`.
    DelayInterferometer {
        path: usize,
        delay_bins: usize,
        phase: f64,
    },
}

impl Component {
    /// Every path index the component touches.
    pub fn paths(&self) -> Vec<usize> {
        match self {
            Component::IntensityModulator { path, .. }
            | Component::PhaseModulator { path, .. }
            | Component::PulseShaper { path, .. }
            | Component::FiberDelay { path, .. }
            | Component::Cfbg { path, .. }
            | Component::PhaseShifter { path, .. }
            | Component::DelayInterferometer { path, .. } => vec![*path],
            Component::MzmSwitch { input, outputs, .. } => vec![*input, outputs[0], outputs[1]],
            Component::Coupler2x2 { inputs, outputs, .. } => {
                vec![inputs[0], inputs[1], outputs[0], outputs[1]]
            }
            Component::Dwdm { common, ports, .. } => {
                std::iter::once(*common).chain(ports.iter().map(|p| p.path)).collect()
            }
        }
    }

    /// Checks parameters that do not depend on the field.
    pub fn validate(&self) -> Result<()> {
        let check_ext = |db: f64| {
            if db.is_nan() || db < 0.0 {
                Err(Error::InvalidParameter(format!(
                    "extinction ratio must be a non-negative dB value, got {db}"
                )))
            } else {
                Ok(())
            }
        };
        let check_finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
            }
        };
        match self {
            Component::IntensityModulator { extinction_db, .. } => check_ext(*extinction_db),
            Component::PhaseModulator { phases, .. } => {
                phases.iter().try_for_each(|p| check_finite("phase", *p))
            }
            Component::PulseShaper { mask, extinction_db, .. } => {
                check_ext(*extinction_db)?;
                for m in mask {
                    if !(m.re.is_finite() && m.im.is_finite()) || m.norm() > 1.0 + 1e-12 {
                        return Err(Error::InvalidParameter(format!(
                            "pulse-shaper mask entries must have modulus ≤ 1, got {m}"
                        )));
                    }
                }
                Ok(())
            }
            Component::MzmSwitch { outputs, port, extinction_db, .. } => {
                check_ext(*extinction_db)?;
                if outputs[0] == outputs[1] {
                    return Err(Error::InvalidParameter("MZM outputs must differ".into()));
                }
                if port.iter().any(|&p| p > 1) {
                    return Err(Error::InvalidParameter("MZM port choices must be 0 or 1".into()));
                }
                Ok(())
            }
            Component::Coupler2x2 { inputs, outputs, .. } => {
                if inputs[0] == inputs[1] || outputs[0] == outputs[1] {
                    return Err(Error::InvalidParameter(
                        "coupler needs two distinct input and output paths".into(),
                    ));
                }
                Ok(())
            }
            Component::FiberDelay { .. } => Ok(()),
            Component::Dwdm { common, ports, extinction_db, .. } => {
                check_ext(*extinction_db)?;
                if ports.is_empty() {
                    return Err(Error::InvalidParameter("DWDM needs at least one port".into()));
                }
                let mut seen_paths = vec![*common];
                let mut seen_bins = Vec::new();
                for p in ports {
                    if seen_paths.contains(&p.path) {
                        return Err(Error::InvalidParameter(format!(
                            "DWDM path {} used twice",
                            p.path
                        )));
                    }
                    seen_paths.push(p.path);
                    for b in &p.bins {
                        if seen_bins.contains(b) {
                            return Err(Error::InvalidParameter(format!(
                                "DWDM frequency bin {b} assigned to two ports"
                            )));
                        }
                        seen_bins.push(*b);
                    }
                }
                let leak = leak_amplitude(*extinction_db);
                if ports.len() as f64 * leak * leak > 1.0 {
                    return Err(Error::InvalidParameter(
                        "DWDM extinction too low for the number of ports".into(),
                    ));
                }
                Ok(())
            }
            Component::Cfbg { dispersion_ns_per_nm, tolerance, .. } => {
                check_finite("dispersion", *dispersion_ns_per_nm)?;
                if !(0.0..0.5).contains(tolerance) {
                    return Err(Error::InvalidParameter(format!(
                        "CFBG tolerance must lie in [0, 0.5), got {tolerance}"
                    )));
                }
                Ok(())
            }
            Component::PhaseShifter { phase, .. } => check_finite("phase", *phase),
            Component::DelayInterferometer { phase, .. } => check_finite("phase", *phase),
        }
    }

    /// Same component with every interferometric phase offset by draws from
    /// `jitter`.
    pub(crate) fn with_phase_jitter(&self, mut jitter: impl FnMut() -> f64) -> Component {
        match self {
            Component::PhaseShifter { path, phase } => Component::PhaseShifter {
                path: *path,
                phase: phase + jitter(),
            },
            Component::DelayInterferometer { path, delay_bins, phase } => {
                Component::DelayInterferometer {
                    path: *path,
                    delay_bins: *delay_bins,
                    phase: phase + jitter(),
                }
            }
            other => other.clone(),
        }
    }
}

fn shifted(k: ModeKey, bins: i64) -> Result<ModeKey> {
    let t = k.t as i64 + bins;
    if t < 0 {
        return Err(Error::NegativeTime { path: k.path, time: t });
    }
    Ok(ModeKey { t: t as usize, ..k })
}

/// Applies one component. `grid` supplies the dispersion-to-bin mapping.
pub fn apply_component(c: &Component, s: &FieldState, grid: &PhysicalGrid) -> Result<FieldState> {
    c.validate()?;
    let mut out = s.clone();
    match c {
        Component::IntensityModulator { path, transmit, extinction_db } => {
            let leak = leak_amplitude(*extinction_db);
            out.map_path(*path, |k, a| {
                if transmit.get(k.t).copied().unwrap_or(false) {
                    a
                } else {
                    a * leak
                }
            });
            Ok(prune(out))
        }
        Component::PhaseModulator { path, phases } => {
            out.map_path(*path, |k, a| {
                let phi = phases.get(k.t).copied().unwrap_or(0.0);
                a * Complex64::from_polar(1.0, phi)
            });
            Ok(out)
        }
        Component::PulseShaper { path, mask, extinction_db } => {
            let leak = leak_amplitude(*extinction_db);
            out.map_path(*path, |k, a| match mask.get(k.f) {
                Some(m) if m.norm() > 0.0 => a * m,
                _ => a * leak,
            });
            Ok(prune(out))
        }
        Component::MzmSwitch { input, outputs, port, extinction_db } => {
            let leak = leak_amplitude(*extinction_db);
            let through = (1.0 - leak * leak).sqrt();
            ensure_dark(&out, outputs.iter().filter(|&p| p != input))?;
            for (k, a) in out.take_path(*input) {
                let chosen = port.get(k.t).copied().unwrap_or(0) as usize;
                out.add_amplitude(ModeKey { path: outputs[chosen], ..k }, a * through);
                out.add_amplitude(ModeKey { path: outputs[1 - chosen], ..k }, a * leak);
            }
            Ok(out)
        }
        Component::Coupler2x2 { inputs, outputs, convention } => {
            let h = FRAC_1_SQRT_2;
            let m: [[Complex64; 2]; 2] = match convention {
                CouplerConvention::Symmetric => [
                    [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
                    [Complex64::new(0.0, h), Complex64::new(h, 0.0)],
                ],
                CouplerConvention::Hadamard => [
                    [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                    [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
                ],
            };
            ensure_dark(&out, outputs.iter().filter(|p| !inputs.contains(p)))?;
            // Both inputs are taken before writing so outputs may reuse them.
            let a = out.take_path(inputs[0]);
            let b = out.take_path(inputs[1]);
            for (row, &dst) in outputs.iter().enumerate() {
                for (k, amp) in &a {
                    out.add_amplitude(ModeKey { path: dst, ..*k }, m[row][0] * amp);
                }
                for (k, amp) in &b {
                    out.add_amplitude(ModeKey { path: dst, ..*k }, m[row][1] * amp);
                }
            }
            Ok(out)
        }
        Component::FiberDelay { path, bins } => {
            for (k, a) in out.take_path(*path) {
                out.add_amplitude(shifted(k, *bins)?, a);
            }
            Ok(out)
        }
        Component::Dwdm { common, direction, ports, extinction_db } => {
            let leak = leak_amplitude(*extinction_db);
            let through = (1.0 - (ports.len() as f64 - 1.0) * leak * leak).sqrt();
            let band_of = |f: usize| ports.iter().position(|p| p.bins.contains(&f));
            match direction {
                DwdmDirection::Demux => {
                    ensure_dark(&out, ports.iter().map(|p| &p.path))?;
                    for (k, a) in out.take_path(*common) {
                        let band = band_of(k.f);
                        for (i, p) in ports.iter().enumerate() {
                            let gain = if Some(i) == band { through } else { leak };
                            out.add_amplitude(ModeKey { path: p.path, ..k }, a * gain);
                        }
                    }
                }
                DwdmDirection::Mux => {
                    ensure_dark(&out, std::iter::once(common))?;
                    for (i, p) in ports.iter().enumerate() {
                        for (k, a) in out.take_path(p.path) {
                            let gain = if band_of(k.f) == Some(i) { through } else { leak };
                            out.add_amplitude(ModeKey { path: *common, ..k }, a * gain);
                        }
                    }
                }
            }
            Ok(prune(out))
        }
        Component::Cfbg { path, dispersion_ns_per_nm, tolerance } => {
            for (k, a) in out.take_path(*path) {
                let bins = grid.dispersion_delay_bins(k.f, *dispersion_ns_per_nm, *tolerance)?;
                out.add_amplitude(shifted(k, bins as i64)?, a);
            }
            Ok(out)
        }
        Component::PhaseShifter { path, phase } => {
            let p = Complex64::from_polar(1.0, *phase);
            out.map_path(*path, |_, a| a * p);
            Ok(out)
        }
        Component::DelayInterferometer { path, delay_bins, phase } => {
            let p = Complex64::from_polar(0.5, *phase);
            for (k, a) in out.take_path(*path) {
                out.add_amplitude(k, a * 0.5);
                out.add_amplitude(ModeKey { t: k.t + delay_bins, ..k }, a * p);
            }
            Ok(out)
        }
    }
}

/// Output ports that are not also inputs must start empty, otherwise the
/// element would add light to a mode it does not control.
fn ensure_dark<'a>(s: &FieldState, mut paths: impl Iterator<Item = &'a usize>) -> Result<()> {
    match paths.find(|&&p| s.paths().any(|q| q == p)) {
        Some(p) => Err(Error::InvalidParameter(format!(
            "output path {p} already carries light"
        ))),
        None => Ok(()),
    }
}

/// Drops modes whose amplitude became exactly zero.
fn prune(s: FieldState) -> FieldState {
    s.iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> PhysicalGrid {
        PhysicalGrid::microring()
    }

    fn one(path: usize, f: usize, t: usize) -> FieldState {
        FieldState::single(ModeKey::new(path, f, t))
    }

    #[test]
    fn fiber_delay_moves_time_bin() {
        let out = apply_component(&Component::FiberDelay { path: 0, bins: 3 }, &one(0, 0, 0), &grid()).unwrap();
        assert_eq!(out.get(ModeKey::new(0, 0, 3)), Complex64::new(1.0, 0.0));
        assert_eq!(out.len(), 1);
        let err = apply_component(&Component::FiberDelay { path: 0, bins: -1 }, &one(0, 0, 0), &grid());
        assert!(matches!(err, Err(Error::NegativeTime { path: 0, time: -1 })));
        // Other paths untouched.
        let out = apply_component(&Component::FiberDelay { path: 1, bins: 3 }, &one(0, 0, 0), &grid()).unwrap();
        assert_eq!(out, one(0, 0, 0));
    }

    #[test]
    fn intensity_modulator_extinction() {
        let im = Component::IntensityModulator {
            path: 0,
            transmit: vec![true, false, true],
            extinction_db: 25.0,
        };
        let s: FieldState = (0..3).map(|t| (ModeKey::new(0, 0, t), Complex64::new(1.0, 0.0))).collect();
        let out = apply_component(&im, &s, &grid()).unwrap();
        assert_eq!(out.get(ModeKey::new(0, 0, 0)).re, 1.0);
        let blocked = out.get(ModeKey::new(0, 0, 1)).re;
        assert!((blocked - 10f64.powf(-1.25)).abs() < 1e-15);
        assert!((blocked - 0.0562).abs() < 1e-4);
    }

    #[test]
    fn coupler_splits_evenly() {
        let c = Component::Coupler2x2 {
            inputs: [0, 1],
            outputs: [0, 1],
            convention: CouplerConvention::Symmetric,
        };
        let a = Complex64::new(0.6, -0.3);
        let s = &one(0, 1, 2) * a;
        let out = apply_component(&c, &s, &grid()).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((out.get(ModeKey::new(0, 1, 2)) - a * h).norm() < 1e-15);
        assert!((out.get(ModeKey::new(1, 1, 2)) - a * Complex64::new(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn mzm_routes_and_leaks() {
        let mzm = Component::MzmSwitch {
            input: 0,
            outputs: [0, 1],
            port: vec![1, 1, 0],
            extinction_db: f64::INFINITY,
        };
        let out = apply_component(&mzm, &one(0, 0, 1), &grid()).unwrap();
        assert_eq!(out, one(1, 0, 1));
        let out = apply_component(&mzm, &one(0, 0, 2), &grid()).unwrap();
        assert_eq!(out, one(0, 0, 2));

        let leaky = Component::MzmSwitch {
            input: 0,
            outputs: [0, 1],
            port: vec![1],
            extinction_db: 20.0,
        };
        let out = apply_component(&leaky, &one(0, 0, 0), &grid()).unwrap();
        assert!((out.get(ModeKey::new(0, 0, 0)).re - 0.1).abs() < 1e-12);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dwdm_demux_and_mux() {
        let ports = vec![
            DwdmPort { path: 1, bins: vec![0, 1] },
            DwdmPort { path: 2, bins: vec![2] },
        ];
        let demux = Component::Dwdm {
            common: 0,
            direction: DwdmDirection::Demux,
            ports: ports.clone(),
            extinction_db: f64::INFINITY,
        };
        let mux = Component::Dwdm {
            common: 3,
            direction: DwdmDirection::Mux,
            ports,
            extinction_db: f64::INFINITY,
        };
        let out = apply_component(&demux, &one(0, 2, 1), &grid()).unwrap();
        assert_eq!(out, one(2, 2, 1));
        let out = apply_component(&demux, &one(0, 1, 1), &grid()).unwrap();
        assert_eq!(out, one(1, 1, 1));
        let back = apply_component(&mux, &out, &grid()).unwrap();
        assert_eq!(back, one(3, 1, 1));
        // Out-of-band light at a mux port is blocked.
        let blocked = apply_component(&mux, &one(2, 0, 0), &grid()).unwrap();
        assert!(blocked.is_empty());
    }

    #[test]
    fn lit_output_ports_are_rejected() {
        let s = &one(0, 0, 0) + &one(2, 0, 0);
        let mzm = Component::MzmSwitch { input: 0, outputs: [0, 2], port: vec![], extinction_db: 0.0 };
        assert!(apply_component(&mzm, &s, &grid()).is_err());
        let coupler = Component::Coupler2x2 { inputs: [0, 1], outputs: [0, 2], convention: CouplerConvention::Symmetric };
        assert!(apply_component(&coupler, &s, &grid()).is_err());
        let in_place = Component::Coupler2x2 { inputs: [0, 2], outputs: [2, 0], convention: CouplerConvention::Hadamard };
        assert!(apply_component(&in_place, &s, &grid()).is_ok());
    }

    #[test]
    fn dwdm_rejects_overlapping_bands() {
        let c = Component::Dwdm {
            common: 0,
            direction: DwdmDirection::Demux,
            ports: vec![DwdmPort { path: 1, bins: vec![0] }, DwdmPort { path: 2, bins: vec![0] }],
            extinction_db: 30.0,
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn cfbg_delays_by_frequency() {
        let c = Component::Cfbg {
            path: 0,
            dispersion_ns_per_nm: -2.0,
            tolerance: 0.1,
        };
        let out = apply_component(&c, &one(0, 2, 2), &grid()).unwrap();
        assert_eq!(out, one(0, 2, 4));
        let out = apply_component(&c, &one(0, 0, 2), &grid()).unwrap();
        assert_eq!(out, one(0, 0, 2));
    }

    #[test]
    fn delay_interferometer_halves_and_delays() {
        let di = Component::DelayInterferometer {
            path: 0,
            delay_bins: 2,
            phase: std::f64::consts::FRAC_PI_2,
        };
        let out = apply_component(&di, &one(0, 0, 1), &grid()).unwrap();
        assert!((out.get(ModeKey::new(0, 0, 1)) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((out.get(ModeKey::new(0, 0, 3)) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn pulse_shaper_mask_and_block() {
        let ps = Component::PulseShaper {
            path: 0,
            mask: vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            extinction_db: 40.0,
        };
        let s = &one(0, 0, 0) + &one(0, 1, 0);
        let out = apply_component(&ps, &s, &grid()).unwrap();
        assert_eq!(out.get(ModeKey::new(0, 0, 0)), Complex64::new(0.0, 1.0));
        assert!((out.get(ModeKey::new(0, 1, 0)).re - 0.01).abs() < 1e-15);
        let bad = Component::PulseShaper {
            path: 0,
            mask: vec![Complex64::new(2.0, 0.0)],
            extinction_db: 40.0,
        };
        assert!(bad.validate().is_err());
    }

    fn arb_state() -> impl Strategy<Value = FieldState> {
        proptest::collection::vec(((0usize..3), (0usize..4), (0usize..5), -1.0f64..1.0, -1.0f64..1.0), 1..12)
            .prop_map(|entries| {
                entries
                    .into_iter()
                    .map(|(p, f, t, re, im)| (ModeKey::new(p, f, t), Complex64::new(re, im)))
                    .collect::<FieldState>()
                    .normalized()
            })
    }

    fn arb_component() -> impl Strategy<Value = Component> {
        let ext = prop_oneof![Just(f64::INFINITY), 0.0f64..60.0];
        prop_oneof![
            (proptest::collection::vec(any::<bool>(), 0..6), ext.clone())
                .prop_map(|(transmit, extinction_db)| Component::IntensityModulator { path: 0, transmit, extinction_db }),
            proptest::collection::vec(-7.0f64..7.0, 0..6).prop_map(|phases| Component::PhaseModulator { path: 1, phases }),
            (proptest::collection::vec(0u8..2, 0..8), ext.clone())
                .prop_map(|(port, extinction_db)| Component::MzmSwitch { input: 0, outputs: [0, 2], port, extinction_db }),
            Just(Component::Coupler2x2 { inputs: [0, 1], outputs: [0, 1], convention: CouplerConvention::Symmetric }),
            Just(Component::Coupler2x2 { inputs: [1, 2], outputs: [1, 2], convention: CouplerConvention::Hadamard }),
            (0i64..4).prop_map(|bins| Component::FiberDelay { path: 2, bins }),
            (ext.clone()).prop_map(|extinction_db| Component::Dwdm {
                common: 0,
                direction: DwdmDirection::Demux,
                ports: vec![DwdmPort { path: 3, bins: vec![0, 1] }, DwdmPort { path: 4, bins: vec![2] }],
                extinction_db: extinction_db.max(3.0),
            }),
            (ext).prop_map(|extinction_db| Component::Dwdm {
                common: 5,
                direction: DwdmDirection::Mux,
                ports: vec![DwdmPort { path: 1, bins: vec![0] }, DwdmPort { path: 2, bins: vec![1, 3] }],
                extinction_db: extinction_db.max(3.0),
            }),
            Just(Component::Cfbg { path: 1, dispersion_ns_per_nm: -2.0, tolerance: 0.1 }),
            (-7.0f64..7.0).prop_map(|phase| Component::PhaseShifter { path: 2, phase }),
            (1usize..4, -7.0f64..7.0).prop_map(|(delay_bins, phase)| Component::DelayInterferometer { path: 0, delay_bins, phase }),
        ]
    }

    proptest! {
        #[test]
        fn components_never_amplify(s in arb_state(), c in arb_component()) {
            if let Ok(out) = apply_component(&c, &s, &grid()) {
                prop_assert!(out.norm_sqr() <= s.norm_sqr() + 1e-12);
            }
        }

        #[test]
        fn lossless_components_preserve_norm(s in arb_state(), port in proptest::collection::vec(0u8..2, 0..8)) {
            for c in [
                Component::MzmSwitch { input: 0, outputs: [0, 2], port: port.clone(), extinction_db: f64::INFINITY },
                Component::MzmSwitch { input: 1, outputs: [3, 4], port: port.clone(), extinction_db: 17.0 },
                Component::Coupler2x2 { inputs: [0, 1], outputs: [0, 1], convention: CouplerConvention::Symmetric },
            ] {
                if let Ok(out) = apply_component(&c, &s, &grid()) {
                    prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
                }
            }
        }
    }
}
