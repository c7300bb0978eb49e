use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;

/// One optical mode: spatial path, frequency bin and time bin.
///
/// Time bins may run past the computational range while a circuit delays
/// light; the circuit's detector frame maps them back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeKey {
    pub path: usize,
    pub f: usize,
    pub t: usize,
}

impl ModeKey {
    pub fn new(path: usize, f: usize, t: usize) -> Self {
        Self { path, f, t }
    }
}

/// Sparse single-photon amplitudes. The norm may drop below one (loss) but
/// passive components never raise it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FieldState {
    amplitudes: BTreeMap<ModeKey, Complex64>,
}

impl FieldState {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single photon in one mode.
    pub fn single(mode: ModeKey) -> Self {
        let mut s = Self::new();
        s.add_amplitude(mode, Complex64::new(1.0, 0.0));
        s
    }

    /// Adds `amp` to a mode. Exact zeros are not stored.
    pub fn add_amplitude(&mut self, mode: ModeKey, amp: Complex64) {
        if amp == Complex64::new(0.0, 0.0) {
            return;
        }
        *self.amplitudes.entry(mode).or_default() += amp;
    }

    pub fn get(&self, mode: ModeKey) -> Complex64 {
        self.amplitudes.get(&mode).copied().unwrap_or_default()
    }

    pub fn probability(&self, mode: ModeKey) -> f64 {
        self.get(mode).norm_sqr()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeKey, Complex64)> + '_ {
        self.amplitudes.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `Σ |a|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm; an empty state stays empty.
    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in self.amplitudes.values_mut() {
                *a /= n;
            }
        }
        self
    }

    /// Removes and returns every amplitude on `path`.
    pub(crate) fn take_path(&mut self, path: usize) -> Vec<(ModeKey, Complex64)> {
        let keys: Vec<ModeKey> = self
            .amplitudes
            .keys()
            .filter(|k| k.path == path)
            .copied()
            .collect();
        keys.into_iter()
            .map(|k| (k, self.amplitudes.remove(&k).expect("key listed above")))
            .collect()
    }

    pub(crate) fn map_path(&mut self, path: usize, mut f: impl FnMut(ModeKey, Complex64) -> Complex64) {
        for (k, a) in self.amplitudes.iter_mut() {
            if k.path == path {
                *a = f(*k, *a);
            }
        }
    }

    pub fn paths(&self) -> impl Iterator<Item = usize> + '_ {
        self.amplitudes.keys().map(|k| k.path)
    }

    pub fn max_time(&self) -> Option<usize> {
        self.amplitudes.keys().map(|k| k.t).max()
    }

    /// Largest modulus of the difference between two states.
    pub fn max_abs_diff(&self, other: &FieldState) -> f64 {
        let mut keys: Vec<ModeKey> = self.amplitudes.keys().copied().collect();
        keys.extend(other.amplitudes.keys().copied());
        keys.into_iter()
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl FromIterator<(ModeKey, Complex64)> for FieldState {
    fn from_iter<I: IntoIterator<Item = (ModeKey, Complex64)>>(iter: I) -> Self {
        let mut s = FieldState::new();
        for (k, a) in iter {
            s.add_amplitude(k, a);
        }
        s
    }
}

impl Add for &FieldState {
    type Output = FieldState;

    fn add(self, rhs: &FieldState) -> FieldState {
        let mut out = self.clone();
        for (k, a) in rhs.iter() {
            out.add_amplitude(k, a);
        }
        out
    }
}

impl Mul<Complex64> for &FieldState {
    type Output = FieldState;

    fn mul(self, rhs: Complex64) -> FieldState {
        self.iter().map(|(k, a)| (k, a * rhs)).collect()
    }
}
