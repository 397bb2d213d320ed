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

use crate::linalg::{self, CMat, C64};
use crate::simcore::StateVector;
use crate::{tol, Error, Result};

/// One circuit element.
///
/// Dense unitaries act on an explicit target list; control qubits gate the
/// action on their required values and are never modified. `PredicateFlip`
/// flips a single target on every basis state whose control pattern
/// satisfies a truth table; it is the permutation unitary used to read a
/// classical accept decision out of recorded measurement outcomes.
#[derive(Debug, Clone)]
pub enum GateKind {
    Unitary {
        targets: Vec<usize>,
        matrix: CMat,
    },
    Controlled {
        controls: Vec<(usize, bool)>,
        targets: Vec<usize>,
        matrix: CMat,
    },
    Hadamard {
        target: usize,
    },
    /// Rotation about Y: |0> goes to cos(theta/2)|0> + sin(theta/2)|1>.
    RotationY {
        target: usize,
        theta: f64,
    },
    ControlledSwap {
        control: usize,
        a: usize,
        b: usize,
    },
    PredicateFlip {
        controls: Vec<usize>,
        target: usize,
        table: Vec<bool>,
    },
}

/// Validated circuit element; construct through the associated functions.
#[derive(Debug, Clone)]
pub struct GateOp {
    kind: GateKind,
}

fn check_distinct(qubits: &[usize], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for &q in qubits {
        if !seen.insert(q) {
            return Err(Error::QubitRange(format!("duplicate {what} qubit {q}")));
        }
    }
    Ok(())
}

impl GateOp {
    /// Dense unitary on the listed targets; `matrix` is `2^t x 2^t` with
    /// target 0 addressing the lowest-order bit of the block index.
    pub fn unitary(targets: Vec<usize>, matrix: CMat) -> Result<GateOp> {
        check_distinct(&targets, "target")?;
        let dim = 1usize << targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = linalg::unitary_deviation(&matrix);
        if dev > tol::CONSTRUCTION {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(GateOp {
            kind: GateKind::Unitary { targets, matrix },
        })
    }

    /// Dense unitary applied only where every `(qubit, value)` control
    /// matches. Controls must be disjoint from targets.
    pub fn controlled(
        controls: Vec<(usize, bool)>,
        targets: Vec<usize>,
        matrix: CMat,
    ) -> Result<GateOp> {
        let all: Vec<usize> = controls
            .iter()
            .map(|(q, _)| *q)
            .chain(targets.iter().copied())
            .collect();
        check_distinct(&all, "control/target")?;
        let inner = GateOp::unitary(targets, matrix)?;
        match inner.kind {
            GateKind::Unitary { targets, matrix } => Ok(GateOp {
                kind: GateKind::Controlled {
                    controls,
                    targets,
                    matrix,
                },
            }),
            _ => unreachable!(),
        }
    }

    pub fn hadamard(target: usize) -> GateOp {
        GateOp {
            kind: GateKind::Hadamard { target },
        }
    }

    pub fn rotation_y(target: usize, theta: f64) -> GateOp {
        GateOp {
            kind: GateKind::RotationY { target, theta },
        }
    }

    pub fn controlled_swap(control: usize, a: usize, b: usize) -> Result<GateOp> {
        check_distinct(&[control, a, b], "swap")?;
        Ok(GateOp {
            kind: GateKind::ControlledSwap { control, a, b },
        })
    }

    /// Flips `target` on basis states whose control bits, read as a
    /// little-endian pattern, index a true entry of `table`.
    pub fn predicate_flip(controls: Vec<usize>, target: usize, table: Vec<bool>) -> Result<GateOp> {
        let all: Vec<usize> = controls.iter().copied().chain([target]).collect();
        check_distinct(&all, "predicate")?;
        if table.len() != 1 << controls.len() {
            return Err(Error::Dimension(format!(
                "table length {} does not match {} controls",
                table.len(),
                controls.len()
            )));
        }
        Ok(GateOp {
            kind: GateKind::PredicateFlip {
                controls,
                target,
                table,
            },
        })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    /// Every qubit the gate reads or writes.
    pub fn qubits(&self) -> Vec<usize> {
        match &self.kind {
            GateKind::Unitary { targets, .. } => targets.clone(),
            GateKind::Controlled {
                controls, targets, ..
            } => controls
                .iter()
                .map(|(q, _)| *q)
                .chain(targets.iter().copied())
                .collect(),
            GateKind::Hadamard { target } | GateKind::RotationY { target, .. } => vec![*target],
            GateKind::ControlledSwap { control, a, b } => vec![*control, *a, *b],
            GateKind::PredicateFlip {
                controls, target, ..
            } => controls.iter().copied().chain([*target]).collect(),
        }
    }

    /// The inverse gate.
    pub fn adjoint(&self) -> GateOp {
        match &self.kind {
            GateKind::Unitary { targets, matrix } => GateOp {
                kind: GateKind::Unitary {
                    targets: targets.clone(),
                    matrix: matrix.adjoint(),
                },
            },
            GateKind::Controlled {
                controls,
                targets,
                matrix,
            } => GateOp {
                kind: GateKind::Controlled {
                    controls: controls.clone(),
                    targets: targets.clone(),
                    matrix: matrix.adjoint(),
                },
            },
            GateKind::Hadamard { .. } | GateKind::ControlledSwap { .. } => self.clone(),
            GateKind::RotationY { target, theta } => GateOp::rotation_y(*target, -theta),
            GateKind::PredicateFlip { .. } => self.clone(),
        }
    }
}

fn hadamard_matrix() -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
        ],
    )
}

fn rotation_y_matrix(theta: f64) -> CMat {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(c, 0.0),
        ],
    )
}

/// Applies a gate in place. Cost is linear in the state dimension times the
/// dense block size.
pub fn apply_gate(state: &mut StateVector, gate: &GateOp) -> Result<()> {
    let n = state.num_qubits();
    for q in gate.qubits() {
        if q >= n {
            return Err(Error::QubitRange(format!(
                "gate touches qubit {q}, state has {n}"
            )));
        }
    }
    match gate.kind() {
        GateKind::Unitary { targets, matrix } => {
            apply_block_unitary(state, &[], targets, matrix);
        }
        GateKind::Controlled {
            controls,
            targets,
            matrix,
        } => {
            apply_block_unitary(state, controls, targets, matrix);
        }
        GateKind::Hadamard { target } => {
            apply_block_unitary(state, &[], &[*target], &hadamard_matrix());
        }
        GateKind::RotationY { target, theta } => {
            apply_block_unitary(state, &[], &[*target], &rotation_y_matrix(*theta));
        }
        GateKind::ControlledSwap { control, a, b } => {
            let (cm, am, bm) = (1usize << control, 1usize << a, 1usize << b);
            let amps = state.amps_mut();
            for i in 0..amps.len() {
                if i & cm != 0 && i & am != 0 && i & bm == 0 {
                    amps.swap(i, i ^ am ^ bm);
                }
            }
        }
        GateKind::PredicateFlip {
            controls,
            target,
            table,
        } => {
            let tm = 1usize << target;
            let amps = state.amps_mut();
            for i in 0..amps.len() {
                if i & tm != 0 {
                    continue;
                }
                let mut pattern = 0usize;
                for (bit, &c) in controls.iter().enumerate() {
                    if i & (1 << c) != 0 {
                        pattern |= 1 << bit;
                    }
                }
                if table[pattern] {
                    amps.swap(i, i | tm);
                }
            }
        }
    }
    Ok(())
}

/// Core dense-block application: gathers each amplitude block addressed by
/// the target bits, multiplies by `matrix`, scatters back. Skips blocks
/// whose control bits do not match.
fn apply_block_unitary(
    state: &mut StateVector,
    controls: &[(usize, bool)],
    targets: &[usize],
    matrix: &CMat,
) {
    let n = state.num_qubits();
    let t = targets.len();
    let block = 1usize << t;
    let mut target_mask = 0usize;
    for &q in targets {
        target_mask |= 1 << q;
    }
    let mut control_mask = 0usize;
    let mut control_want = 0usize;
    for &(q, v) in controls {
        control_mask |= 1 << q;
        if v {
            control_want |= 1 << q;
        }
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
    let mut gathered = vec![linalg::ZERO; block];
    let amps = state.amps_mut();
    for outer in 0..1usize << free.len() {
        let mut base = 0usize;
        for (bit, &q) in free.iter().enumerate() {
            if outer & (1 << bit) != 0 {
                base |= 1 << q;
            }
        }
        if base & control_mask != control_want {
            continue;
        }
        for j in 0..block {
            gathered[j] = amps[base | spread[j]];
        }
        for (row, slot) in spread.iter().enumerate() {
            let mut acc = linalg::ZERO;
            for col in 0..block {
                acc += matrix[(row, col)] * gathered[col];
            }
            amps[base | slot] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    /// Controlled swap on (control 0, a 1, b 2): exchanging bits 1 and 2
    /// when bit 0 is set permutes exactly indices 3 and 5.
    #[test]
    fn controlled_swap_matches_hand_expanded_permutation() {
        let mut expected = [[ZERO; 8]; 8];
        for i in 0..8 {
            let j = match i {
                3 => 5,
                5 => 3,
                other => other,
            };
            expected[j][i] = ONE;
        }
        let gate = GateOp::controlled_swap(0, 1, 2).unwrap();
        for input in 0..8 {
            let mut state = StateVector::basis_state(3, input);
            apply_gate(&mut state, &gate).unwrap();
            for row in 0..8 {
                assert!((state.amp(row) - expected[row][input]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn unitary_rejects_non_unitary_matrix() {
        let m = CMat::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            GateOp::unitary(vec![0], m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn controlled_gate_only_fires_on_matching_values() {
        let x = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let gate = GateOp::controlled(vec![(0, false)], vec![1], x).unwrap();
        // |00>: control (qubit 0) is 0, so qubit 1 flips.
        let mut s = StateVector::basis_state(2, 0);
        apply_gate(&mut s, &gate).unwrap();
        assert!((s.amp(2) - ONE).norm() < 1e-15);
        // |01>: control is 1, nothing happens.
        let mut s = StateVector::basis_state(2, 1);
        apply_gate(&mut s, &gate).unwrap();
        assert!((s.amp(1) - ONE).norm() < 1e-15);
    }

    #[test]
    fn predicate_flip_follows_truth_table() {
        // Flip qubit 2 exactly when qubits (0, 1) read (1, 0).
        let table = vec![false, true, false, false];
        let gate = GateOp::predicate_flip(vec![0, 1], 2, table).unwrap();
        let mut s = StateVector::basis_state(3, 1);
        apply_gate(&mut s, &gate).unwrap();
        assert!((s.amp(5) - ONE).norm() < 1e-15);
        let mut s = StateVector::basis_state(3, 3);
        apply_gate(&mut s, &gate).unwrap();
        assert!((s.amp(3) - ONE).norm() < 1e-15);
    }

    #[test]
    fn adjoint_reverses_rotation() {
        let g = GateOp::rotation_y(0, 0.7);
        let mut s = StateVector::zero(1);
        apply_gate(&mut s, &g).unwrap();
        apply_gate(&mut s, &g.adjoint()).unwrap();
        assert!((s.amp(0) - ONE).norm() < 1e-12);
    }

    #[test]
    fn gates_preserve_norm_on_random_targets() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let u = crate::linalg::haar_unitary(4, &mut rng);
        let gate = GateOp::unitary(vec![3, 1], u).unwrap();
        let mut s = StateVector::from_amplitudes_normalized(
            4,
            (0..16).map(|i| C64::new(1.0 + i as f64, -(i as f64))).collect(),
        )
        .unwrap();
        apply_gate(&mut s, &gate).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}
