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

use crate::linalg::{self, CMat, CVec, C64};
use crate::{tol, Error, Result};

/// Pure state on `num_qubits` qubits as a dense amplitude vector.
///
/// Invariant: the norm stays within [`tol::CONSTRUCTION`] of one; gates
/// preserve it because they are validated as unitary on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// The all-zeros basis state |0...0>.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis_state(num_qubits, 0)
    }

    /// Computational basis state with the given little-endian index.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        assert!(index < 1 << num_qubits, "basis index out of range");
        let mut amps = vec![linalg::ZERO; 1 << num_qubits];
        amps[index] = linalg::ONE;
        StateVector { num_qubits, amps }
    }

    /// Builds a state from raw amplitudes; fails unless the norm is one
    /// within [`tol::CONSTRUCTION`].
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << num_qubits {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes for {} qubits, got {}",
                1usize << num_qubits,
                num_qubits,
                amps.len()
            )));
        }
        let state = StateVector { num_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > tol::CONSTRUCTION {
            return Err(Error::State(format!("norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Builds a state from raw amplitudes after rescaling to unit norm.
    pub fn from_amplitudes_normalized(num_qubits: usize, mut amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << num_qubits {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes, got {}",
                1usize << num_qubits,
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::State("cannot normalize the zero vector".into()));
        }
        for z in &mut amps {
            *z /= norm;
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn from_column(num_qubits: usize, col: &CVec) -> Result<Self> {
        Self::from_amplitudes(num_qubits, col.iter().copied().collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Dimension("inner product on unequal registers".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Appends `other` as a new register on higher-order qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let n = self.num_qubits + other.num_qubits;
        let mut amps = vec![linalg::ZERO; 1 << n];
        for (hi, b) in other.amps.iter().enumerate() {
            if b.norm_sqr() == 0.0 {
                continue;
            }
            let base = hi << self.num_qubits;
            for (lo, a) in self.amps.iter().enumerate() {
                amps[base | lo] = a * b;
            }
        }
        StateVector { num_qubits: n, amps }
    }

    /// Embeds the state into a larger register, padding the new high-order
    /// qubits with |0>.
    pub fn embed(&self, total_qubits: usize) -> Result<StateVector> {
        if total_qubits < self.num_qubits {
            return Err(Error::Dimension(
                "embedding target smaller than the state".into(),
            ));
        }
        let mut amps = vec![linalg::ZERO; 1 << total_qubits];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Ok(StateVector {
            num_qubits: total_qubits,
            amps,
        })
    }

    /// Probability that measuring `qubit` yields `value`.
    pub fn probability_of_bit(&self, qubit: usize, value: bool) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitRange(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        let mask = 1usize << qubit;
        let want = if value { mask } else { 0 };
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    /// Total probability mass on basis states where any qubit of `register`
    /// is nonzero.
    pub fn mass_outside_zero(&self, register: &[usize]) -> f64 {
        let mut mask = 0usize;
        for &q in register {
            mask |= 1 << q;
        }
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    pub fn to_column(&self) -> CVec {
        CVec::from_iterator(self.amps.len(), self.amps.iter().copied())
    }

    /// Applies the global phase making the first significant amplitude real
    /// positive; used to stabilize reported eigenbases.
    pub fn canonicalize_phase(&mut self) {
        let mut col = self.to_column();
        linalg::canonical_phase(&mut col);
        for (i, z) in col.iter().enumerate() {
            self.amps[i] = *z;
        }
    }
}

/// Mixed state as a dense density matrix.
///
/// Invariants checked on construction: Hermitian and unit trace within
/// [`tol::CONSTRUCTION`], eigenvalues above `-`[`tol::EQUALITY`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    num_qubits: usize,
    mat: CMat,
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Self {
        let col = state.to_column();
        DensityMatrix {
            num_qubits: state.num_qubits(),
            mat: &col * col.adjoint(),
        }
    }

    /// Convex mixture of pure states; weights must sum to one within
    /// [`tol::CONSTRUCTION`].
    pub fn from_mixture(parts: &[(f64, StateVector)]) -> Result<Self> {
        let n = parts
            .first()
            .ok_or_else(|| Error::Density("empty mixture".into()))?
            .1
            .num_qubits();
        let mut mat = CMat::zeros(1 << n, 1 << n);
        let mut total = 0.0;
        for (w, state) in parts {
            if state.num_qubits() != n {
                return Err(Error::Density("mixture over unequal registers".into()));
            }
            if *w < -tol::CONSTRUCTION {
                return Err(Error::Density(format!("negative weight {w}")));
            }
            total += w;
            let col = state.to_column();
            mat += (&col * col.adjoint()).map(|z| z * *w);
        }
        if (total - 1.0).abs() > tol::CONSTRUCTION {
            return Err(Error::Density(format!("weights sum to {total}, not 1")));
        }
        Ok(DensityMatrix { num_qubits: n, mat })
    }

    pub fn from_matrix(num_qubits: usize, mat: CMat) -> Result<Self> {
        if mat.nrows() != 1 << num_qubits || mat.ncols() != 1 << num_qubits {
            return Err(Error::Density("matrix shape does not match qubits".into()));
        }
        let herm = linalg::hermitian_deviation(&mat);
        if herm > tol::CONSTRUCTION {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let trace: C64 = (0..mat.nrows()).map(|i| mat[(i, i)]).sum();
        if (trace.re - 1.0).abs() > tol::CONSTRUCTION || trace.im.abs() > tol::CONSTRUCTION {
            return Err(Error::Density(format!("trace {trace} is not 1")));
        }
        let rho = DensityMatrix { num_qubits, mat };
        if let Some((w, _)) = rho.eigendecomposition()?.first() {
            if *w < -tol::EQUALITY {
                return Err(Error::Density(format!("negative eigenvalue {w}")));
            }
        }
        Ok(rho)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Eigenpairs with weights ascending; weights below 1e-12 are clamped
    /// to zero but still reported.
    pub fn eigendecomposition(&self) -> Result<Vec<(f64, StateVector)>> {
        let (vals, vecs) = linalg::eigh(&self.mat)?;
        let mut out = Vec::with_capacity(vals.len());
        for (j, w) in vals.iter().enumerate() {
            let col = vecs.column(j).into_owned();
            let state = StateVector::from_column(self.num_qubits, &col)?;
            let w = if w.abs() < 1e-12 { 0.0 } else { *w };
            out.push((w, state));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    #[test]
    fn tensor_places_second_register_high() {
        let low = StateVector::basis_state(1, 1);
        let high = StateVector::basis_state(2, 2);
        let joint = low.tensor(&high);
        // index = 1 + (2 << 1) = 5
        assert_eq!(joint.num_qubits(), 3);
        assert!((joint.amp(5) - ONE).norm() < 1e-15);
    }

    #[test]
    fn embed_pads_high_qubits_with_zero() {
        let s = StateVector::basis_state(2, 3);
        let e = s.embed(4).unwrap();
        assert!((e.amp(3) - ONE).norm() < 1e-15);
        assert_eq!(e.mass_outside_zero(&[2, 3]), 0.0);
    }

    #[test]
    fn from_amplitudes_rejects_bad_norm() {
        let err = StateVector::from_amplitudes(1, vec![ONE, ONE]);
        assert!(err.is_err());
    }

    #[test]
    fn probability_of_bit_counts_mass() {
        let s = StateVector::from_amplitudes_normalized(
            2,
            vec![ONE, ONE, ZERO, ONE],
        )
        .unwrap();
        let p = s.probability_of_bit(0, true).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        let p1 = s.probability_of_bit(1, true).unwrap();
        assert!((p1 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_validates_weights() {
        let a = StateVector::basis_state(1, 0);
        let b = StateVector::basis_state(1, 1);
        assert!(DensityMatrix::from_mixture(&[(0.5, a.clone()), (0.5, b.clone())]).is_ok());
        assert!(DensityMatrix::from_mixture(&[(0.9, a), (0.5, b)]).is_err());
    }

    #[test]
    fn density_eigendecomposition_recovers_mixture() {
        let a = StateVector::basis_state(1, 0);
        let b = StateVector::basis_state(1, 1);
        let rho = DensityMatrix::from_mixture(&[(0.25, a), (0.75, b)]).unwrap();
        let eig = rho.eigendecomposition().unwrap();
        assert!((eig[0].0 - 0.25).abs() < 1e-12);
        assert!((eig[1].0 - 0.75).abs() < 1e-12);
    }
}
