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

use crate::linalg::{self, CMat, CVec};
use crate::simcore::{GateOp, StateVector};
use crate::{tol, Error, Result};

/// A complete projective measurement: pairwise-orthogonal projectors on the
/// lowest `num_qubits` qubits that sum to the identity.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    num_qubits: usize,
    parts: Vec<CMat>,
}

/// One branch of a projective measurement. `post_state` is the normalized
/// projected state, absent when the branch carries no mass.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub outcome: usize,
    pub probability: f64,
    pub post_state: Option<StateVector>,
}

impl ProjectorSet {
    pub fn new(parts: Vec<CMat>) -> Result<ProjectorSet> {
        if parts.is_empty() {
            return Err(Error::Dimension("empty projector set".into()));
        }
        let dim = parts[0].nrows();
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "projector dimension {dim} is not a power of two"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        let mut sum = CMat::zeros(dim, dim);
        for p in &parts {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(Error::Dimension("mismatched projector dimensions".into()));
            }
            let dev = linalg::projector_deviation(p);
            if dev > tol::CROSSCHECK {
                return Err(Error::NotProjector { deviation: dev });
            }
            sum += p;
        }
        let completeness = linalg::frobenius_distance(&sum, &CMat::identity(dim, dim));
        if completeness > tol::CROSSCHECK {
            return Err(Error::NotProjector {
                deviation: completeness,
            });
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let cross = (&parts[i] * &parts[j]).norm();
                if cross > tol::CROSSCHECK {
                    return Err(Error::NotProjector { deviation: cross });
                }
            }
        }
        Ok(ProjectorSet { num_qubits, parts })
    }

    /// Two-outcome measurement of `p`: outcome 0 is the complement, outcome
    /// 1 is `p` itself.
    pub fn binary(p: CMat) -> Result<ProjectorSet> {
        let dim = p.nrows();
        let complement = CMat::identity(dim, dim) - &p;
        ProjectorSet::new(vec![complement, p])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, outcome: usize) -> &CMat {
        &self.parts[outcome]
    }
}

/// Measures `set` on the lowest qubits of `state` without committing to an
/// outcome: returns every branch with its probability and post state.
pub fn qnd_measure(state: &StateVector, set: &ProjectorSet) -> Result<Vec<MeasurementRecord>> {
    let m = set.num_qubits();
    let n = state.num_qubits();
    if m > n {
        return Err(Error::Dimension(format!(
            "projector set acts on {m} qubits, state has {n}"
        )));
    }
    let block = 1usize << m;
    let blocks = 1usize << (n - m);
    let mut records = Vec::with_capacity(set.len());
    for (outcome, p) in set.parts.iter().enumerate() {
        let mut projected = vec![linalg::ZERO; 1 << n];
        for b in 0..blocks {
            let base = b << m;
            let v = CVec::from_fn(block, |i, _| state.amp(base | i));
            let w = p * v;
            for i in 0..block {
                projected[base | i] = w[i];
            }
        }
        let probability: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
        let post_state = if probability > 1e-12 {
            Some(StateVector::from_amplitudes_normalized(n, projected)?)
        } else {
            None
        };
        records.push(MeasurementRecord {
            outcome,
            probability,
            post_state,
        });
    }
    Ok(records)
}

/// Coherently records the measurement outcome of `set` into `record_bits`
/// (little-endian), which must lie above the measured register and start
/// out zeroed. The state stays pure; repeating the measurement later reads
/// the same outcome, which is what makes the recording non-demolition.
pub fn qnd_record(state: &mut StateVector, set: &ProjectorSet, record_bits: &[usize]) -> Result<()> {
    let m = set.num_qubits();
    let n = state.num_qubits();
    if m > n {
        return Err(Error::Dimension(format!(
            "projector set acts on {m} qubits, state has {n}"
        )));
    }
    if 1usize << record_bits.len() < set.len() {
        return Err(Error::Dimension(format!(
            "{} record bits cannot hold {} outcomes",
            record_bits.len(),
            set.len()
        )));
    }
    for &q in record_bits {
        if q < m || q >= n {
            return Err(Error::QubitRange(format!(
                "record bit {q} outside the free range [{m}, {n})"
            )));
        }
    }
    let leak = state.mass_outside_zero(record_bits);
    if leak > tol::EQUALITY {
        return Err(Error::State(format!(
            "record register carries mass {leak:.3e} before recording"
        )));
    }
    let block = 1usize << m;
    let spread: Vec<usize> = (0..set.len())
        .map(|outcome| {
            let mut idx = 0usize;
            for (bit, &q) in record_bits.iter().enumerate() {
                if outcome & (1 << bit) != 0 {
                    idx |= 1 << q;
                }
            }
            idx
        })
        .collect();
    let mut record_mask = 0usize;
    for &q in record_bits {
        record_mask |= 1 << q;
    }
    let mut new_amps = vec![linalg::ZERO; 1 << n];
    for b in 0..1usize << (n - m) {
        let base = b << m;
        if base & record_mask != 0 {
            continue;
        }
        let v = CVec::from_fn(block, |i, _| state.amp(base | i));
        if v.norm() < 1e-15 {
            continue;
        }
        for (outcome, p) in set.parts.iter().enumerate() {
            let w = p * &v;
            let shifted = base | spread[outcome];
            for i in 0..block {
                new_amps[shifted | i] += w[i];
            }
        }
    }
    *state = StateVector::from_amplitudes(n, new_amps)?;
    Ok(())
}

/// Gate sequence for the swap test: Hadamard on the control, controlled
/// swaps pairing the registers, Hadamard again. Reading the control as 1
/// afterwards has probability (1 - Re<a|b| swap |a|b>)/2, so symmetric
/// joint states never set it and antisymmetric ones always do.
pub fn swap_test(swap_qubit: usize, reg_a: &[usize], reg_b: &[usize]) -> Result<Vec<GateOp>> {
    if reg_a.len() != reg_b.len() {
        return Err(Error::Dimension(format!(
            "register lengths {} and {} differ",
            reg_a.len(),
            reg_b.len()
        )));
    }
    let mut ops = vec![GateOp::hadamard(swap_qubit)];
    for (&a, &b) in reg_a.iter().zip(reg_b) {
        ops.push(GateOp::controlled_swap(swap_qubit, a, b)?);
    }
    ops.push(GateOp::hadamard(swap_qubit));
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ONE, ZERO};
    use crate::simcore::apply_gate;

    fn one_projector() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE])
    }

    #[test]
    fn binary_set_splits_plus_state_evenly() {
        let set = ProjectorSet::binary(one_projector()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let state =
            StateVector::from_amplitudes(1, vec![C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let records = qnd_measure(&state, &set).unwrap();
        assert_eq!(records.len(), 2);
        assert!((records[0].probability - 0.5).abs() < 1e-12);
        assert!((records[1].probability - 0.5).abs() < 1e-12);
        let post = records[1].post_state.as_ref().unwrap();
        assert!((post.amp(1).norm() - 1.0).abs() < 1e-12);
    }

    /// Recording |1><1| on qubit 0 into qubit 1 is exactly a CNOT.
    #[test]
    fn recording_a_bit_projector_matches_cnot() {
        let set = ProjectorSet::binary(one_projector()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut state = StateVector::from_amplitudes(
            2,
            vec![C64::new(h, 0.0), C64::new(0.0, h), ZERO, ZERO],
        )
        .unwrap();
        qnd_record(&mut state, &set, &[1]).unwrap();
        assert!((state.amp(0) - C64::new(h, 0.0)).norm() < 1e-12);
        assert!((state.amp(3) - C64::new(0.0, h)).norm() < 1e-12);
    }

    #[test]
    fn recording_requires_zeroed_register() {
        let set = ProjectorSet::binary(one_projector()).unwrap();
        let mut state = StateVector::basis_state(2, 2);
        assert!(qnd_record(&mut state, &set, &[1]).is_err());
    }

    #[test]
    fn projector_set_rejects_overlapping_parts() {
        let p = one_projector();
        let filler = CMat::identity(2, 2) - &p * C64::new(2.0, 0.0);
        assert!(ProjectorSet::new(vec![p.clone(), p, filler]).is_err());
    }

    #[test]
    fn swap_test_separates_identical_from_orthogonal() {
        // Layout: qubit 0 = control, qubit 1 = register a, qubit 2 = register b.
        let ops = swap_test(0, &[1], &[2]).unwrap();
        let mut same = StateVector::basis_state(3, 0b110);
        let mut diff = StateVector::basis_state(3, 0b010);
        for op in &ops {
            apply_gate(&mut same, op).unwrap();
            apply_gate(&mut diff, op).unwrap();
        }
        assert!(same.probability_of_bit(0, true).unwrap() < 1e-12);
        assert!((diff.probability_of_bit(0, true).unwrap() - 0.5).abs() < 1e-12);
    }
}
