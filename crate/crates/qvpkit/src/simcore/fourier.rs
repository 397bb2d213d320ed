// Copyright 2026 The qvpkit Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Quantum Fourier transform and phase estimation.
//!
//! Registers are little-endian slices: `reg[0]` carries bit weight 1. The
//! transform implemented by [`qft`] sends |x> to 2^{-l/2} sum_y
//! exp(2 pi i x y / 2^l) |y>, and [`phase_estimate`] reads an l-bit
//! approximation y with phase guess y / 2^l.

use crate::linalg::{self, CMat, CVec, C64};
use crate::simcore::{apply_gate, GateOp, StateVector};
use crate::{Error, Result};

/// Access to exact integer powers of a fixed unitary on a small register.
/// Powers may be negative; implementations must satisfy
/// `apply_power(a); apply_power(b) == apply_power(a + b)`.
pub trait PowerOracle {
    fn num_qubits(&self) -> usize;
    /// Applies U^k to a gathered register vector of dimension 2^num_qubits.
    fn apply_power(&self, k: i64, vec: &mut CVec);
}

/// Powers of an explicit unitary, computed through its spectral
/// decomposition so that U^k is exact for every integer k rather than a
/// k-fold product.
#[derive(Debug, Clone)]
pub struct MatrixPowerOracle {
    num_qubits: usize,
    /// Eigenphases as fractions of a turn, paired column-wise with `basis`.
    phases: Vec<f64>,
    basis: CMat,
}

impl MatrixPowerOracle {
    pub fn new(u: &CMat) -> Result<MatrixPowerOracle> {
        let dim = u.nrows();
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "unitary dimension {dim} is not a power of two"
            )));
        }
        let (phases, basis) = linalg::unitary_eigenphases(u)?;
        Ok(MatrixPowerOracle {
            num_qubits: dim.trailing_zeros() as usize,
            phases,
            basis,
        })
    }

    /// Eigenphases in turns, ascending.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// The eigenvector paired with `phases()[i]`.
    pub fn basis_column(&self, i: usize) -> CVec {
        self.basis.column(i).into_owned()
    }
}

impl PowerOracle for MatrixPowerOracle {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn apply_power(&self, k: i64, vec: &mut CVec) {
        let mut coords = self.basis.adjoint() * &*vec;
        for (j, phi) in self.phases.iter().enumerate() {
            let angle = std::f64::consts::TAU * phi * k as f64;
            coords[j] *= C64::from_polar(1.0, angle);
        }
        *vec = &self.basis * coords;
    }
}

fn swap_matrix() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = linalg::ONE;
    m[(1, 2)] = linalg::ONE;
    m[(2, 1)] = linalg::ONE;
    m[(3, 3)] = linalg::ONE;
    m
}

fn phase_matrix(angle: f64) -> CMat {
    let mut m = CMat::identity(2, 2);
    m[(1, 1)] = C64::from_polar(1.0, angle);
    m
}

/// Gate sequence for the exact Fourier transform on a little-endian
/// register, including the final bit-reversal swaps.
pub fn qft(register: &[usize]) -> Result<Vec<GateOp>> {
    let l = register.len();
    let mut ops = Vec::new();
    for k in (0..l).rev() {
        ops.push(GateOp::hadamard(register[k]));
        for j in (0..k).rev() {
            let angle = std::f64::consts::TAU / (1u64 << (k - j + 1)) as f64;
            ops.push(GateOp::controlled(
                vec![(register[j], true)],
                vec![register[k]],
                phase_matrix(angle),
            )?);
        }
    }
    for i in 0..l / 2 {
        ops.push(GateOp::unitary(
            vec![register[i], register[l - 1 - i]],
            swap_matrix(),
        )?);
    }
    Ok(ops)
}

/// Applies U^power to `targets`, gated on `control` when given. The oracle
/// sees each target block as a little-endian register vector.
pub fn apply_controlled_power(
    state: &mut StateVector,
    oracle: &dyn PowerOracle,
    control: Option<usize>,
    power: i64,
    targets: &[usize],
) -> Result<()> {
    let n = state.num_qubits();
    if targets.len() != oracle.num_qubits() {
        return Err(Error::Dimension(format!(
            "oracle acts on {} qubits, got {} targets",
            oracle.num_qubits(),
            targets.len()
        )));
    }
    let mut touched: Vec<usize> = targets.to_vec();
    if let Some(c) = control {
        touched.push(c);
    }
    let mut mask = 0usize;
    for &q in &touched {
        if q >= n {
            return Err(Error::QubitRange(format!(
                "oracle touches qubit {q}, state has {n}"
            )));
        }
        if mask & (1 << q) != 0 {
            return Err(Error::QubitRange(format!("duplicate oracle qubit {q}")));
        }
        mask |= 1 << q;
    }
    let t = targets.len();
    let block = 1usize << t;
    let mut target_mask = 0usize;
    for &q in targets {
        target_mask |= 1 << q;
    }
    let free: Vec<usize> = (0..n).filter(|q| target_mask & (1 << q) == 0).collect();
    let spread: Vec<usize> = (0..block)
        .map(|j| {
            let mut idx = 0usize;
            for (bit, &q) in targets.iter().enumerate() {
                if j & (1 << bit) != 0 {
                    idx |= 1 << q;
                }
            }
            idx
        })
        .collect();
    let amps = state.amps_mut();
    let mut gathered = CVec::zeros(block);
    for outer in 0..1usize << free.len() {
        let mut base = 0usize;
        for (bit, &q) in free.iter().enumerate() {
            if outer & (1 << bit) != 0 {
                base |= 1 << q;
            }
        }
        if let Some(c) = control {
            if base & (1 << c) == 0 {
                continue;
            }
        }
        for j in 0..block {
            gathered[j] = amps[base | spread[j]];
        }
        oracle.apply_power(power, &mut gathered);
        for j in 0..block {
            amps[base | spread[j]] = gathered[j];
        }
    }
    Ok(())
}

/// Runs phase estimation in place: Hadamards on the estimate register,
/// controlled powers U^{2^j} gated on estimate bit j, then the inverse
/// Fourier transform. The estimate register must start zeroed.
pub fn phase_estimate(
    state: &mut StateVector,
    oracle: &dyn PowerOracle,
    estimate: &[usize],
    targets: &[usize],
) -> Result<()> {
    if estimate.is_empty() || estimate.len() >= 63 {
        return Err(Error::Parameter(format!(
            "estimate register of {} bits is unsupported",
            estimate.len()
        )));
    }
    let leak = state.mass_outside_zero(estimate);
    if leak > crate::tol::EQUALITY {
        return Err(Error::State(format!(
            "estimate register carries mass {leak:.3e} before estimation"
        )));
    }
    for &q in estimate {
        apply_gate(state, &GateOp::hadamard(q))?;
    }
    for (j, &q) in estimate.iter().enumerate() {
        apply_controlled_power(state, oracle, Some(q), 1i64 << j, targets)?;
    }
    for op in qft(estimate)?.iter().rev() {
        apply_gate(state, &op.adjoint())?;
    }
    Ok(())
}

/// Exact readout distribution of phase estimation on an eigenstate with
/// phase `phi` (in turns): entry y is the probability of reading y out of
/// an l-bit register.
pub fn phase_estimate_distribution(phi: f64, bits: usize) -> Vec<f64> {
    let size = 1usize << bits;
    let scale = size as f64;
    (0..size)
        .map(|y| {
            let delta = phi - y as f64 / scale;
            let wrapped = delta - delta.round();
            if wrapped.abs() < 1e-15 {
                1.0
            } else {
                let num = (scale * std::f64::consts::PI * wrapped).sin();
                let den = scale * (std::f64::consts::PI * wrapped).sin();
                (num / den).powi(2)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The gate decomposition must reproduce the dense transform
    /// 2^{-l/2} exp(2 pi i x y / 2^l) entry for entry.
    #[test]
    fn qft_matches_dense_transform() {
        let l = 3;
        let dim = 1usize << l;
        let ops = qft(&[0, 1, 2]).unwrap();
        for x in 0..dim {
            let mut state = StateVector::basis_state(l, x);
            for op in &ops {
                apply_gate(&mut state, op).unwrap();
            }
            for y in 0..dim {
                let angle = std::f64::consts::TAU * (x * y) as f64 / dim as f64;
                let expected = C64::from_polar(1.0 / (dim as f64).sqrt(), angle);
                assert!(
                    (state.amp(y) - expected).norm() < 1e-12,
                    "entry ({x}, {y}) off"
                );
            }
        }
    }

    #[test]
    fn exact_dyadic_phase_reads_out_deterministically() {
        let u = phase_matrix(std::f64::consts::TAU * 3.0 / 8.0);
        let oracle = MatrixPowerOracle::new(&u).unwrap();
        // Qubit 0 holds the eigenstate |1>, qubits 1..4 the estimate.
        let mut state = StateVector::basis_state(4, 1);
        phase_estimate(&mut state, &oracle, &[1, 2, 3], &[0]).unwrap();
        // y = 3 on the estimate register, eigenstate untouched.
        assert!((state.amp(0b0111).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn circuit_distribution_matches_closed_form() {
        let phi = 0.3;
        let bits = 4;
        let u = phase_matrix(std::f64::consts::TAU * phi);
        let oracle = MatrixPowerOracle::new(&u).unwrap();
        let mut state = StateVector::basis_state(bits + 1, 1);
        phase_estimate(&mut state, &oracle, &[1, 2, 3, 4], &[0]).unwrap();
        let expected = phase_estimate_distribution(phi, bits);
        for y in 0..1usize << bits {
            let amp = state.amp(1 | (y << 1));
            assert!(
                (amp.norm_sqr() - expected[y]).abs() < 1e-9,
                "outcome {y}: circuit {} vs formula {}",
                amp.norm_sqr(),
                expected[y]
            );
        }
        let total: f64 = expected.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_powers_compose_and_invert() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = crate::linalg::haar_unitary(4, &mut rng);
        let oracle = MatrixPowerOracle::new(&u).unwrap();
        let mut v = CVec::from_fn(4, |i, _| C64::new(0.5, -0.1 * i as f64));
        let v0 = v.clone();
        oracle.apply_power(5, &mut v);
        oracle.apply_power(-2, &mut v);
        oracle.apply_power(-3, &mut v);
        assert!((v - v0).norm() < 1e-11);
    }
}
