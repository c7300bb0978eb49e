use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::component::{apply_component, Component};
use super::field::{FieldState, ModeKey};
use super::grid::PhysicalGrid;
use crate::{Error, Result};

/// An ordered list of components plus the detector frame.
///
/// Computational time bin `n` is read at absolute bin `readout_offset + n`
/// on `output_path`. Light may sit at later bins while the circuit runs, but
/// never at or beyond `time_window`.
///
/// Circuit files are TOML with the scalar keys first, then a `[grid]` table
/// and one `[[components]]` table per element, each tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub freq_bins: usize,
    pub time_bins: usize,
    pub paths: usize,
    pub input_path: usize,
    pub output_path: usize,
    pub readout_offset: usize,
    pub time_window: usize,
    pub grid: PhysicalGrid,
    #[serde(default)]
    pub components: Vec<Component>,
}

impl Circuit {
    /// A circuit with no components: the identity, read out at offset 0.
    pub fn empty(freq_bins: usize, time_bins: usize, grid: PhysicalGrid) -> Self {
        Self {
            name: "empty".into(),
            freq_bins,
            time_bins,
            paths: 1,
            input_path: 0,
            output_path: 0,
            readout_offset: 0,
            time_window: 2 * time_bins,
            grid,
            components: Vec::new(),
        }
    }

    pub fn with_components(mut self, components: Vec<Component>) -> Self {
        self.components = components;
        self
    }

    /// Number of computational modes `freq_bins * time_bins`.
    pub fn modes(&self) -> usize {
        self.freq_bins * self.time_bins
    }

    pub fn validate(&self) -> Result<()> {
        if self.freq_bins == 0 || self.time_bins == 0 {
            return Err(Error::InvalidDimension(format!(
                "circuit needs at least one frequency and time bin, got {}x{}",
                self.freq_bins, self.time_bins
            )));
        }
        for (component, path) in [("input_path", self.input_path), ("output_path", self.output_path)] {
            if path >= self.paths {
                return Err(Error::UnknownPath { component: component.into(), path });
            }
        }
        if self.readout_offset + self.time_bins > self.time_window {
            return Err(Error::InvalidParameter(format!(
                "readout frame {}..{} does not fit in the time window {}",
                self.readout_offset,
                self.readout_offset + self.time_bins,
                self.time_window
            )));
        }
        self.grid.validate()?;
        for (i, c) in self.components.iter().enumerate() {
            c.validate()?;
            if let Some(&path) = c.paths().iter().find(|&&p| p >= self.paths) {
                return Err(Error::UnknownPath { component: format!("component {i}"), path });
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: Circuit = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?).map_err(|e| Error::io(path, e))
    }

    /// Single photon in computational mode `(f, t)` on the input path.
    pub fn basis_input(&self, f: usize, t: usize) -> Result<FieldState> {
        if f >= self.freq_bins {
            return Err(Error::IndexOutOfRange { what: "frequency bin", index: f, limit: self.freq_bins });
        }
        if t >= self.time_bins {
            return Err(Error::IndexOutOfRange { what: "time bin", index: t, limit: self.time_bins });
        }
        Ok(FieldState::single(ModeKey::new(self.input_path, f, t)))
    }

    fn check_window(&self, s: &FieldState) -> Result<()> {
        match s.max_time() {
            Some(t) if t >= self.time_window => Err(Error::TimeOverflow { time: t, limit: self.time_window }),
            _ => Ok(()),
        }
    }

    fn run_components<'a>(&self, components: impl Iterator<Item = &'a Component>, s: &FieldState) -> Result<FieldState> {
        self.check_window(s)?;
        let mut state = s.clone();
        for c in components {
            state = apply_component(c, &state, &self.grid)?;
            self.check_window(&state)?;
        }
        Ok(state)
    }
}

/// Applies every component in order. Light on other paths is kept.
pub fn run_circuit(c: &Circuit, s: &FieldState) -> Result<FieldState> {
    c.run_components(c.components.iter(), s)
}

/// Like [`run_circuit`] with every phase shifter and interferometer phase
/// offset by an independent `N(0, sigma²)` draw.
pub fn run_circuit_jittered<R: Rng + ?Sized>(c: &Circuit, s: &FieldState, sigma: f64, rng: &mut R) -> Result<FieldState> {
    if sigma == 0.0 {
        return run_circuit(c, s);
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|_| Error::InvalidParameter(format!("phase jitter must be finite and ≥ 0, got {sigma}")))?;
    let jittered: Vec<Component> = c
        .components
        .iter()
        .map(|comp| comp.with_phase_jitter(|| normal.sample(rng)))
        .collect();
    c.run_components(jittered.iter(), s)
}

/// Detection probability of every computational mode `(m, n)` (index
/// `m * time_bins + n`) on the output path, without renormalization.
pub fn output_distribution(c: &Circuit, s: &FieldState) -> Result<Vec<f64>> {
    let out = run_circuit(c, s)?;
    Ok(detect(c, &out))
}

pub(crate) fn detect(c: &Circuit, out: &FieldState) -> Vec<f64> {
    let mut probs = vec![0.0; c.modes()];
    for m in 0..c.freq_bins {
        for n in 0..c.time_bins {
            probs[m * c.time_bins + n] = out.probability(ModeKey::new(c.output_path, m, c.readout_offset + n));
        }
    }
    probs
}

/// Column `j` is the post-selected output distribution for basis input `j`,
/// renormalized to sum to one.
pub fn transfer_matrix(c: &Circuit) -> Result<DMatrix<f64>> {
    c.validate()?;
    let n = c.modes();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let input = c.basis_input(j / c.time_bins, j % c.time_bins)?;
        let probs = output_distribution(c, &input)?;
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::AllLightLost { input: j });
        }
        for (i, p) in probs.iter().enumerate() {
            m[(i, j)] = p / total;
        }
    }
    Ok(m)
}

/// Amplitude-level response of the circuit on the computational modes,
/// `U[(i, j)] = ⟨out_i| C |in_j⟩`.
pub fn amplitude_matrix(c: &Circuit) -> Result<DMatrix<Complex64>> {
    c.validate()?;
    let n = c.modes();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let out = run_circuit(c, &c.basis_input(j / c.time_bins, j % c.time_bins)?)?;
        for i in 0..n {
            let key = ModeKey::new(c.output_path, i / c.time_bins, c.readout_offset + i % c.time_bins);
            m[(i, j)] = out.get(key);
        }
    }
    Ok(m)
}
