//! Dense state and matrix types for a frequency (control) qudit and a time
//! (target) qudit carried by the same photon.
//!
//! Every two-qudit index is frequency-major: `|m⟩_f|n⟩_t` sits at
//! `m * d_t + n`. All other modules rely on this ordering.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for algebraic identities on matrices of dimension up to 256.
pub const TOLERANCE: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Dimensions of the frequency and time qudits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuditDims {
    d_f: usize,
    d_t: usize,
}

impl QuditDims {
    pub fn new(d_f: usize, d_t: usize) -> Result<Self> {
        if d_f < 2 || d_t < 2 {
            return Err(Error::InvalidDimension(format!(
                "qudit dimensions must be at least 2, got d_f={d_f}, d_t={d_t}"
            )));
        }
        Ok(Self { d_f, d_t })
    }

    /// Equal frequency and time dimensions.
    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    pub fn d_f(&self) -> usize {
        self.d_f
    }

    pub fn d_t(&self) -> usize {
        self.d_t
    }

    /// Total Hilbert-space dimension `d_f * d_t`.
    pub fn total(&self) -> usize {
        self.d_f * self.d_t
    }

    pub fn index(&self, m: usize, n: usize) -> Result<usize> {
        if m >= self.d_f {
            return Err(Error::IndexOutOfRange {
                what: "frequency index",
                index: m,
                limit: self.d_f,
            });
        }
        if n >= self.d_t {
            return Err(Error::IndexOutOfRange {
                what: "time index",
                index: n,
                limit: self.d_t,
            });
        }
        Ok(m * self.d_t + n)
    }

    /// Splits a flat index into `(frequency, time)`.
    pub fn decode(&self, i: usize) -> (usize, usize) {
        (i / self.d_t, i % self.d_t)
    }
}

/// Dense complex square matrix with a cached unitarity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    entries: CMatrix,
    unitary: bool,
}

impl GateMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidDimension(format!(
                "gate matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidDimension("empty gate matrix".into()));
        }
        let unitary = unitarity_defect(&entries) < TOLERANCE;
        Ok(Self { entries, unitary })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
            unitary: true,
        }
    }

    /// Permutation matrix sending basis column `j` to row `image(j)`.
    pub fn permutation(dim: usize, image: impl Fn(usize) -> usize) -> Self {
        let mut entries = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            entries[(image(j), j)] = Complex64::new(1.0, 0.0);
        }
        let unitary = unitarity_defect(&entries) < TOLERANCE;
        Self { entries, unitary }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.entries)
    }

    pub fn mul(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        check_dim(self.dim(), rhs.dim())?;
        GateMatrix::new(&self.entries * &rhs.entries)
    }

    pub fn adjoint(&self) -> GateMatrix {
        GateMatrix {
            entries: self.entries.adjoint(),
            unitary: self.unitary,
        }
    }

    pub fn pow(&self, k: usize) -> GateMatrix {
        let mut out = GateMatrix::identity(self.dim());
        for _ in 0..k {
            out.entries = &out.entries * &self.entries;
        }
        out.unitary = unitarity_defect(&out.entries) < TOLERANCE;
        out
    }

    pub fn scale(&self, factor: Complex64) -> GateMatrix {
        let entries = &self.entries * factor;
        let unitary = unitarity_defect(&entries) < TOLERANCE;
        GateMatrix { entries, unitary }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &GateMatrix) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    /// Entrywise `|U_ij|²`: the transition probabilities for basis inputs.
    pub fn probabilities(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.norm_sqr())
    }

    /// Kronecker product `self ⊗ rhs`; `self` acts on the more significant
    /// (frequency) index.
    pub fn tensor(&self, rhs: &GateMatrix) -> GateMatrix {
        tensor(self, rhs)
    }
}

/// `U_f ⊗ U_t` consistent with the frequency-major index convention.
pub fn tensor(u_f: &GateMatrix, u_t: &GateMatrix) -> GateMatrix {
    let entries = u_f.entries.kronecker(&u_t.entries);
    GateMatrix {
        unitary: u_f.unitary && u_t.unitary,
        entries,
    }
}

pub(crate) fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let product = m.adjoint() * m;
    max_abs_diff(&product, &CMatrix::identity(n, n))
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Unit-norm amplitude vector over the two-qudit computational space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: QuditDims,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(dims: QuditDims, amplitudes: CVector) -> Result<Self> {
        check_dim(dims.total(), amplitudes.len())?;
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "state is not normalized: sum |a|^2 = {norm_sqr}"
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(dims: QuditDims, amplitudes: CVector) -> Result<Self> {
        check_dim(dims.total(), amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Ok(Self {
            dims,
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    pub fn dims(&self) -> QuditDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `|m⟩_f|n⟩_t`.
pub fn basis_state(m: usize, n: usize, dims: QuditDims) -> Result<PureState> {
    let i = dims.index(m, n)?;
    let mut amplitudes = CVector::zeros(dims.total());
    amplitudes[i] = Complex64::new(1.0, 0.0);
    Ok(PureState { dims, amplitudes })
}

/// Matrix-vector product. No renormalization: a unitary `u` preserves the
/// norm, a lossy one does not.
pub fn apply(u: &GateMatrix, s: &PureState) -> Result<PureState> {
    check_dim(s.dims.total(), u.dim())?;
    Ok(PureState {
        dims: s.dims,
        amplitudes: &u.entries * &s.amplitudes,
    })
}

/// `|⟨a|b⟩|²`.
pub fn overlap_probability(a: &PureState, b: &PureState) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch {
            expected: a.dims.total(),
            actual: b.dims.total(),
        });
    }
    Ok(a.amplitudes.dotc(&b.amplitudes).norm_sqr())
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix("not square".into()));
        }
        let herm = max_abs_diff(&entries, &entries.adjoint());
        if herm > TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TOLERANCE || trace.im.abs() > TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}")));
        }
        let min_eig = entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector, normalized.
    pub fn from_vector(psi: &CVector) -> Result<Self> {
        let norm_sqr = psi.norm_squared();
        if norm_sqr == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let entries = psi * psi.adjoint() / Complex64::new(norm_sqr, 0.0);
        Ok(Self { entries })
    }

    pub fn from_pure(s: &PureState) -> Self {
        let a = &s.amplitudes;
        Self {
            entries: a * a.adjoint(),
        }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized `psi`.
    pub fn expectation(&self, psi: &CVector) -> Result<f64> {
        check_dim(self.dim(), psi.len())?;
        Ok(psi.dotc(&(&self.entries * psi)).re)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }
}
