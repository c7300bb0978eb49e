//! Process matrices over the Weyl operator basis and the depolarizing model
//! that links an interference visibility to a process fidelity.
//!
//! A channel acts as `ρ ↦ Σ_{mn} χ_mn U_m ρ U_n†`, with `U_k` the Weyl
//! operators in flat order (see [`crate::gates::WeylIndex`]). The ideal
//! three-bin X gate has a single non-zero element, `χ[1][1] = 1`.
//!
//! The visibility relations are exact for `d = 3`, which is where the fringe
//! protocol is defined; the `_d` variants extend the same algebra to any `d`
//! and are not backed by measurement.

use num_complex::Complex64;

use crate::gates::{generalized_x, weyl_basis};
use crate::state::{max_abs_diff, CMatrix, DensityMatrix, GateMatrix, TOLERANCE};
use crate::{Error, Result};

/// Hermitian `d² × d²` process matrix in the Weyl basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix {
    d: usize,
    chi: CMatrix,
}

impl ProcessMatrix {
    pub fn new(d: usize, chi: CMatrix) -> Result<Self> {
        let n = d * d;
        if d < 2 || chi.nrows() != n || chi.ncols() != n {
            return Err(Error::InvalidDimension(format!(
                "process matrix for d={d} must be {n}x{n}, got {}x{}",
                chi.nrows(),
                chi.ncols()
            )));
        }
        let herm = max_abs_diff(&chi, &chi.adjoint());
        if herm > TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "process matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        Ok(Self { d, chi })
    }

    /// Process matrix of the unitary channel `ρ ↦ UρU†`.
    ///
    /// Expands `U = Σ_k c_k U_k` with `c_k = Tr(U_k† U) / d`, so `χ = c c†`.
    pub fn from_unitary(u: &GateMatrix) -> Result<Self> {
        let d = u.dim();
        let basis = weyl_basis(d)?;
        let coeffs: Vec<Complex64> = basis
            .iter()
            .map(|uk| (uk.entries().adjoint() * u.entries()).trace() / d as f64)
            .collect();
        let n = d * d;
        let chi = CMatrix::from_fn(n, n, |m, k| coeffs[m] * coeffs[k].conj());
        Ok(Self { d, chi })
    }

    /// The ideal qudit X gate: only the `(1, 1)` element is non-zero.
    pub fn ideal_x(d: usize) -> Result<Self> {
        Self::from_unitary(&generalized_x(d)?)
    }

    /// `I_{d²} / d²`, the fully depolarizing channel.
    pub fn fully_depolarizing(d: usize) -> Self {
        let n = d * d;
        Self {
            d,
            chi: CMatrix::identity(n, n) / Complex64::new(n as f64, 0.0),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn chi(&self) -> &CMatrix {
        &self.chi
    }

    pub fn max_abs_diff(&self, other: &ProcessMatrix) -> f64 {
        max_abs_diff(&self.chi, &other.chi)
    }
}

/// `ρ_out = Σ_{mn} χ_mn U_m ρ U_n†`.
pub fn apply_process(p: &ProcessMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != p.d {
        return Err(Error::DimensionMismatch {
            expected: p.d,
            actual: rho.dim(),
        });
    }
    let basis = weyl_basis(p.d)?;
    let left: Vec<CMatrix> = basis.iter().map(|u| u.entries() * rho.entries()).collect();
    let right: Vec<CMatrix> = basis.iter().map(|u| u.entries().adjoint()).collect();
    let mut out = CMatrix::zeros(p.d, p.d);
    for (m, lm) in left.iter().enumerate() {
        for (n, rn) in right.iter().enumerate() {
            let coeff = p.chi[(m, n)];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            out += lm * rn * coeff;
        }
    }
    Ok(DensityMatrix::from_entries_unchecked(out))
}

/// `(1/d) Σ_k U_k ρ U_k†`, which equals `Tr(ρ) I`.
pub fn weyl_twirl(rho: &DensityMatrix) -> Result<CMatrix> {
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for u in weyl_basis(d)? {
        out += u.entries() * rho.entries() * u.entries().adjoint();
    }
    Ok(out / Complex64::new(d as f64, 0.0))
}

/// Ideal unitary mixed with white noise: weight `lambda` on `UρU†`.
#[derive(Clone, Debug, PartialEq)]
pub struct DepolarizingModel {
    lambda: f64,
    base_unitary: GateMatrix,
}

impl DepolarizingModel {
    pub fn new(lambda: f64, base_unitary: GateMatrix) -> Result<Self> {
        check_unit_interval("lambda", lambda)?;
        if !base_unitary.is_unitary() {
            return Err(Error::InvalidParameter(
                "depolarizing model needs a unitary base gate".into(),
            ));
        }
        Ok(Self {
            lambda,
            base_unitary,
        })
    }

    /// Qudit X gate plus white noise.
    pub fn x_gate(lambda: f64, d: usize) -> Result<Self> {
        Self::new(lambda, generalized_x(d)?)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn base_unitary(&self) -> &GateMatrix {
        &self.base_unitary
    }
}

/// `ρ_out = λ UρU† + (1 − λ) I/d`.
pub fn depolarize(model: &DepolarizingModel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let u = model.base_unitary.entries();
    let d = u.nrows();
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: rho.dim(),
        });
    }
    let rotated = u * rho.entries() * u.adjoint();
    let mixed = CMatrix::identity(d, d) * Complex64::new((1.0 - model.lambda) / d as f64, 0.0);
    Ok(DensityMatrix::from_entries_unchecked(
        rotated * Complex64::new(model.lambda, 0.0) + mixed,
    ))
}

/// `χ_N = λ χ_U + (1 − λ)/d² I` for an arbitrary ideal process `χ_U`.
pub fn depolarized_process(ideal: &ProcessMatrix, lambda: f64) -> Result<ProcessMatrix> {
    check_unit_interval("lambda", lambda)?;
    let noise = ProcessMatrix::fully_depolarizing(ideal.d);
    Ok(ProcessMatrix {
        d: ideal.d,
        chi: &ideal.chi * Complex64::new(lambda, 0.0) + noise.chi * Complex64::new(1.0 - lambda, 0.0),
    })
}

/// Depolarized qudit X gate, `λ χ_X + (1 − λ)/d² I`.
pub fn chi_depolarizing(lambda: f64, d: usize) -> Result<ProcessMatrix> {
    depolarized_process(&ProcessMatrix::ideal_x(d)?, lambda)
}

/// `Re Tr(χ_ideal χ_actual)`.
pub fn process_fidelity(ideal: &ProcessMatrix, actual: &ProcessMatrix) -> Result<f64> {
    if ideal.d != actual.d {
        return Err(Error::DimensionMismatch {
            expected: ideal.d,
            actual: actual.d,
        });
    }
    Ok((&ideal.chi * &actual.chi).trace().re)
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

/// Depolarizing weight from the phase-ramp fringe visibility, `2V / (3 − V)`.
pub fn lambda_from_visibility(v: f64) -> Result<f64> {
    lambda_from_visibility_d(v, 3)
}

/// General-`d` form `2V / (d − V(d − 2))`.
pub fn lambda_from_visibility_d(v: f64, d: usize) -> Result<f64> {
    check_unit_interval("visibility", v)?;
    let d = d as f64;
    Ok(2.0 * v / (d - v * (d - 2.0)))
}

/// Fringe visibility produced by a depolarized X gate, `3λ / (λ + 2)`.
pub fn visibility_from_lambda(lambda: f64) -> Result<f64> {
    check_unit_interval("lambda", lambda)?;
    Ok(3.0 * lambda / (lambda + 2.0))
}

/// `F_P = (1 + 8λ)/9 = (1 + 5V)/(9 − 3V)`.
pub fn process_fidelity_from_visibility(v: f64) -> Result<f64> {
    process_fidelity_from_visibility_d(v, 3)
}

/// General-`d` form `(1 + (d² − 1)λ)/d²`.
pub fn process_fidelity_from_visibility_d(v: f64, d: usize) -> Result<f64> {
    let lambda = lambda_from_visibility_d(v, d)?;
    let n = (d * d) as f64;
    Ok((1.0 + (n - 1.0) * lambda) / n)
}

/// `dF_P/dV` for `d = 3`, used to propagate a visibility error bar.
pub fn process_fidelity_slope(v: f64) -> f64 {
    48.0 / ((9.0 - 3.0 * v) * (9.0 - 3.0 * v))
}
