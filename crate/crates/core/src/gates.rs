//! Ideal gate matrices: generalized Pauli X and Z, the d² Weyl operators,
//! and the two-qudit CINC, SUM, XOR and SWAP permutations.
//!
//! Two-qudit gates treat the frequency qudit as the control and the time
//! qudit as the target.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::state::{CMatrix, GateMatrix, QuditDims};
use crate::{Error, Result};

/// `ω^k` with `ω = exp(2πi/d)`, reduced modulo `d` before evaluation.
pub fn root_of_unity(k: usize, d: usize) -> Complex64 {
    let k = k % d;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

fn check_qudit_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "qudit dimension must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// Cyclic shift `X|n⟩ = |n ⊕ 1⟩`.
pub fn generalized_x(d: usize) -> Result<GateMatrix> {
    check_qudit_dim(d)?;
    Ok(GateMatrix::permutation(d, |n| (n + 1) % d))
}

/// Phase gate `Z|n⟩ = ω^n |n⟩`.
pub fn generalized_z(d: usize) -> Result<GateMatrix> {
    check_qudit_dim(d)?;
    let mut entries = CMatrix::zeros(d, d);
    for n in 0..d {
        entries[(n, n)] = root_of_unity(n, d);
    }
    GateMatrix::new(entries)
}

/// Position of `Z^a X^b` in the Weyl operator basis.
///
/// The flat index `a * d + b` enumerates `U_0 = I`, `U_1 = X`, `U_2 = X²`,
/// `U_3 = Z`, ... for `d = 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylIndex {
    pub a: usize,
    pub b: usize,
}

impl WeylIndex {
    pub fn new(a: usize, b: usize, d: usize) -> Result<Self> {
        if a >= d {
            return Err(Error::IndexOutOfRange {
                what: "Z power",
                index: a,
                limit: d,
            });
        }
        if b >= d {
            return Err(Error::IndexOutOfRange {
                what: "X power",
                index: b,
                limit: d,
            });
        }
        Ok(Self { a, b })
    }

    pub fn from_flat(k: usize, d: usize) -> Result<Self> {
        if k >= d * d {
            return Err(Error::IndexOutOfRange {
                what: "Weyl flat index",
                index: k,
                limit: d * d,
            });
        }
        Ok(Self { a: k / d, b: k % d })
    }

    pub fn flat(&self, d: usize) -> usize {
        self.a * d + self.b
    }
}

/// `Z^a X^b`.
pub fn weyl(a: usize, b: usize, d: usize) -> Result<GateMatrix> {
    check_qudit_dim(d)?;
    WeylIndex::new(a, b, d)?;
    // (Z^a X^b)|n⟩ = ω^{a(n+b)} |n+b⟩, so row r = n+b carries ω^{a r}.
    let mut entries = CMatrix::zeros(d, d);
    for n in 0..d {
        let r = (n + b) % d;
        entries[(r, n)] = root_of_unity(a * r, d);
    }
    GateMatrix::new(entries)
}

/// All d² Weyl operators ordered by flat index.
pub fn weyl_basis(d: usize) -> Result<Vec<GateMatrix>> {
    check_qudit_dim(d)?;
    (0..d * d)
        .map(|k| weyl(k / d, k % d, d))
        .collect()
}

/// Controlled increment: X on the time qudit only when the frequency qudit
/// equals `control_value`.
pub fn cinc(dims: QuditDims, control_value: usize) -> Result<GateMatrix> {
    if control_value >= dims.d_f() {
        return Err(Error::IndexOutOfRange {
            what: "control value",
            index: control_value,
            limit: dims.d_f(),
        });
    }
    let d_t = dims.d_t();
    Ok(GateMatrix::permutation(dims.total(), |i| {
        let (m, n) = dims.decode(i);
        if m == control_value {
            m * d_t + (n + 1) % d_t
        } else {
            i
        }
    }))
}

/// CINC with the control on the highest frequency bin, `d_f − 1`.
pub fn cinc_default(dims: QuditDims) -> Result<GateMatrix> {
    cinc(dims, dims.d_f() - 1)
}

fn check_square(dims: QuditDims) -> Result<usize> {
    if dims.d_f() != dims.d_t() {
        return Err(Error::InvalidDimension(format!(
            "gate needs d_f = d_t, got {} and {}",
            dims.d_f(),
            dims.d_t()
        )));
    }
    Ok(dims.d_t())
}

/// `|m⟩_f|n⟩_t → |m⟩_f|n ⊕ m⟩_t`.
pub fn sum_gate(dims: QuditDims) -> Result<GateMatrix> {
    let d = check_square(dims)?;
    Ok(GateMatrix::permutation(dims.total(), |i| {
        let (m, n) = dims.decode(i);
        m * d + (n + m) % d
    }))
}

/// `|m⟩_f|n⟩_t → |m⟩_f|n ⊖ m⟩_t`, the inverse of [`sum_gate`].
pub fn xor_gate(dims: QuditDims) -> Result<GateMatrix> {
    let d = check_square(dims)?;
    Ok(GateMatrix::permutation(dims.total(), |i| {
        let (m, n) = dims.decode(i);
        m * d + (n + d - m) % d
    }))
}

/// `|m⟩_f|n⟩_t → |n⟩_f|m⟩_t`.
pub fn swap_gate(dims: QuditDims) -> Result<GateMatrix> {
    let d = check_square(dims)?;
    Ok(GateMatrix::permutation(dims.total(), |i| {
        let (m, n) = dims.decode(i);
        n * d + m
    }))
}

/// For a permutation gate, the basis output each basis input maps to.
/// Returns `None` when some column is not a single unit-modulus entry.
pub fn outcome_map(u: &GateMatrix) -> Option<Vec<usize>> {
    let probs = u.probabilities();
    (0..u.dim())
        .map(|j| {
            let col = probs.column(j);
            let hits: Vec<usize> = (0..col.len()).filter(|&i| col[i] > 0.5).collect();
            match hits.as_slice() {
                [i] if (col[*i] - 1.0).abs() < 1e-9 => Some(*i),
                _ => None,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{apply, basis_state, tensor};

    const TIGHT: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dims(d: usize) -> QuditDims {
        QuditDims::square(d).unwrap()
    }

    fn maps(u: &GateMatrix, d: QuditDims, from: (usize, usize), to: (usize, usize)) -> bool {
        let input = basis_state(from.0, from.1, d).unwrap();
        let expected = basis_state(to.0, to.1, d).unwrap();
        let out = apply(u, &input).unwrap();
        (out.amplitudes() - expected.amplitudes()).norm() < TIGHT
    }

    #[test]
    fn x_matches_cyclic_shift() {
        let x3 = generalized_x(3).unwrap();
        let expected = CMatrix::from_row_slice(
            3,
            3,
            &[c(0., 0.), c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)],
        );
        assert_eq!(x3.entries(), &expected);
        let x2 = generalized_x(2).unwrap();
        assert_eq!(
            x2.entries(),
            &CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
        );
        assert!(x3.pow(3).max_abs_diff(&GateMatrix::identity(3)) < TIGHT);
    }

    #[test]
    fn z_matches_phase_gate() {
        let z3 = generalized_z(3).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((z3.entries()[(0, 0)] - c(1., 0.)).norm() < TIGHT);
        assert!((z3.entries()[(1, 1)] - w).norm() < TIGHT);
        assert!((z3.entries()[(2, 2)] - w.conj()).norm() < TIGHT);
        let z2 = generalized_z(2).unwrap();
        assert!((z2.entries()[(1, 1)] - c(-1., 0.)).norm() < TIGHT);
        assert!(z3.pow(3).max_abs_diff(&GateMatrix::identity(3)) < TIGHT);
    }

    #[test]
    fn weyl_identity_and_zx() {
        assert_eq!(weyl(0, 0, 5).unwrap(), GateMatrix::identity(5));
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let zero = c(0., 0.);
        let expected = CMatrix::from_row_slice(3, 3, &[zero, zero, c(1., 0.), w, zero, zero, zero, w * w, zero]);
        let zx = weyl(1, 1, 3).unwrap();
        assert!((zx.entries() - expected).iter().all(|z| z.norm() < TIGHT));
    }

    #[test]
    fn weyl_is_z_power_times_x_power() {
        for d in [2, 3, 4, 5] {
            let x = generalized_x(d).unwrap();
            let z = generalized_z(d).unwrap();
            for a in 0..d {
                for b in 0..d {
                    let product = z.pow(a).mul(&x.pow(b)).unwrap();
                    assert!(weyl(a, b, d).unwrap().max_abs_diff(&product) < TIGHT);
                }
            }
        }
    }

    #[test]
    fn weyl_out_of_range() {
        assert!(weyl(3, 0, 3).is_err());
        assert!(weyl(0, 3, 3).is_err());
        assert!(WeylIndex::from_flat(9, 3).is_err());
        assert_eq!(WeylIndex::from_flat(5, 3).unwrap(), WeylIndex { a: 1, b: 2 });
        assert_eq!(WeylIndex { a: 2, b: 1 }.flat(3), 7);
    }

    #[test]
    fn weyl_commutation() {
        for d in [2, 3, 5, 16] {
            let x = generalized_x(d).unwrap();
            let z = generalized_z(d).unwrap();
            let zx = z.mul(&x).unwrap();
            let xz = x.mul(&z).unwrap().scale(root_of_unity(1, d));
            assert!(zx.max_abs_diff(&xz) < TIGHT, "d={d}");
        }
    }

    #[test]
    fn all_constructors_unitary() {
        let d3 = dims(3);
        let gates = [
            generalized_x(7).unwrap(),
            generalized_z(7).unwrap(),
            weyl(2, 3, 5).unwrap(),
            cinc(d3, 2).unwrap(),
            sum_gate(dims(16)).unwrap(),
            xor_gate(dims(4)).unwrap(),
            swap_gate(d3).unwrap(),
        ];
        for g in gates {
            assert!(g.unitarity_defect() < TIGHT);
        }
    }

    #[test]
    fn cinc_examples() {
        let d = dims(3);
        let g = cinc(d, 2).unwrap();
        assert!(maps(&g, d, (2, 1), (2, 2)));
        assert!(maps(&g, d, (0, 1), (0, 1)));
        let relocated = cinc(d, 0).unwrap();
        assert!(maps(&relocated, d, (0, 2), (0, 0)));
        assert!(cinc(d, 3).is_err());
        assert_eq!(cinc_default(d).unwrap(), g);
    }

    #[test]
    fn cinc_is_block_diagonal() {
        let g = cinc(dims(3), 2).unwrap();
        let x = generalized_x(3).unwrap();
        let id = GateMatrix::identity(3);
        for m in 0..3 {
            let block = g.entries().view((3 * m, 3 * m), (3, 3)).into_owned();
            let expected = if m == 2 { &x } else { &id };
            assert_eq!(&block, expected.entries());
        }
        // Off-diagonal blocks vanish.
        assert!(g.entries().view((0, 3), (3, 3)).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn sum_examples() {
        let d3 = dims(3);
        let s = sum_gate(d3).unwrap();
        assert!(maps(&s, d3, (1, 2), (1, 0)));
        for n in 0..3 {
            assert!(maps(&s, d3, (0, n), (0, n)));
        }
        let d16 = dims(16);
        assert!(maps(&sum_gate(d16).unwrap(), d16, (5, 14), (5, 3)));
        assert!(sum_gate(QuditDims::new(3, 4).unwrap()).is_err());
    }

    #[test]
    fn sum_blocks_are_x_powers() {
        for d in [3, 16] {
            let s = sum_gate(dims(d)).unwrap();
            let x = generalized_x(d).unwrap();
            for m in 0..d {
                let block = s.entries().view((d * m, d * m), (d, d)).into_owned();
                assert_eq!(&block, x.pow(m).entries());
            }
        }
    }

    #[test]
    fn xor_examples() {
        let d3 = dims(3);
        let xor = xor_gate(d3).unwrap();
        assert!(maps(&xor, d3, (2, 0), (2, 1)));
        let product = xor.mul(&sum_gate(d3).unwrap()).unwrap();
        assert!(product.max_abs_diff(&GateMatrix::identity(9)) < TIGHT);
    }

    #[test]
    fn xor_from_relabeled_sum() {
        // Swapping frequency labels 0 and 2 turns the SUM shift m into 2 − m;
        // one further cyclic shift of the time frame gives −m.
        let d3 = dims(3);
        let relabel = tensor(
            &GateMatrix::permutation(3, |m| 2 - m),
            &GateMatrix::identity(3),
        );
        let relabeled_sum = relabel
            .mul(&sum_gate(d3).unwrap())
            .unwrap()
            .mul(&relabel)
            .unwrap();
        let frame_shift = tensor(&GateMatrix::identity(3), &generalized_x(3).unwrap());
        let xor = frame_shift.mul(&relabeled_sum).unwrap();
        assert!(xor.max_abs_diff(&xor_gate(d3).unwrap()) < TIGHT);
    }

    #[test]
    fn swap_examples() {
        let d3 = dims(3);
        let s = swap_gate(d3).unwrap();
        assert!(maps(&s, d3, (1, 2), (2, 1)));
        assert!(s.pow(2).max_abs_diff(&GateMatrix::identity(9)) < TIGHT);
        let s2 = swap_gate(dims(2)).unwrap();
        let one = c(1., 0.);
        let zero = c(0., 0.);
        #[rustfmt::skip]
        let expected = CMatrix::from_row_slice(4, 4, &[
            one, zero, zero, zero,
            zero, zero, one, zero,
            zero, one, zero, zero,
            zero, zero, zero, one,
        ]);
        assert_eq!(s2.entries(), &expected);
    }

    #[test]
    fn outcome_map_of_permutations() {
        let map = outcome_map(&sum_gate(dims(3)).unwrap()).unwrap();
        assert_eq!(map, vec![0, 1, 2, 4, 5, 3, 8, 6, 7]);
        let h = GateMatrix::new(CMatrix::from_element(2, 2, c(std::f64::consts::FRAC_1_SQRT_2, 0.))).unwrap();
        assert!(outcome_map(&h).is_none());
    }
}
