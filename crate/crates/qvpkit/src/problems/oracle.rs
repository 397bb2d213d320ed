// Copyright 2026 The qvpkit Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Black-box oracle problems: marked-state search and hidden-unitary
//! eigenphase comparison.
//!
//! Oracles count their own invocations, so query budgets can be audited
//! after a run. Analysis-only accessors expose the hidden data (the marked
//! state, the eigenphases); circuits touch it exclusively through the query
//! gates.

use std::cell::Cell;
use std::rc::Rc;

use rand::Rng;

use crate::linalg::{self, CMat, CVec, C64, ONE, ZERO};
use crate::qvp::{QueryGate, VerificationProcedure};
use crate::simcore::{
    apply_gate, phase_estimate_distribution, qft, GateOp, MatrixPowerOracle, PowerOracle,
    StateVector,
};
use crate::{tol, Error, Result};

/// Circle distance between two points of a `size`-point cycle.
pub fn circle_distance(a: usize, b: usize, size: usize) -> usize {
    let d = a.abs_diff(b) % size;
    d.min(size - d)
}

/// Circle distance between two phases in turns.
pub fn circle_distance_turns(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn x_matrix() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

fn spread_map(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|j| {
            let mut idx = 0usize;
            for (bit, &q) in qubits.iter().enumerate() {
                if j & (1 << bit) != 0 {
                    idx |= 1 << q;
                }
            }
            idx
        })
        .collect()
}

fn free_assignments(n: usize, used: &[usize]) -> Vec<usize> {
    let mut used_mask = 0usize;
    for &q in used {
        used_mask |= 1 << q;
    }
    let free: Vec<usize> = (0..n).filter(|q| used_mask & (1 << q) == 0).collect();
    spread_map(&free)
}

fn ensure_distinct_in_range(qubits: &[usize], n: usize) -> Result<()> {
    let mut mask = 0usize;
    for &q in qubits {
        if q >= n {
            return Err(Error::QubitRange(format!(
                "query touches qubit {q}, state has {n}"
            )));
        }
        if mask & (1 << q) != 0 {
            return Err(Error::QubitRange(format!("duplicate query qubit {q}")));
        }
        mask |= 1 << q;
    }
    Ok(())
}

/// Oracle hiding a normalized state psi on `num_qubits` qubits. Its query
/// gate flips a flag qubit on the psi component of the search register.
#[derive(Debug)]
pub struct MarkedStateOracle {
    num_qubits: usize,
    psi: CVec,
    queries: Cell<u64>,
}

impl MarkedStateOracle {
    pub fn new(num_qubits: usize, psi: CVec) -> Result<Rc<Self>> {
        let dim = 1usize << num_qubits;
        if psi.len() != dim {
            return Err(Error::Dimension(format!(
                "marked state has {} amplitudes, register needs {dim}",
                psi.len()
            )));
        }
        if (psi.norm() - 1.0).abs() > tol::EQUALITY {
            return Err(Error::State(format!(
                "marked state has norm {}",
                psi.norm()
            )));
        }
        Ok(Rc::new(Self {
            num_qubits,
            psi,
            queries: Cell::new(0),
        }))
    }

    pub fn haar<R: Rng>(num_qubits: usize, rng: &mut R) -> Result<Rc<Self>> {
        Self::new(num_qubits, linalg::haar_state(1 << num_qubits, rng))
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Rc<Self>> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Parameter(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut psi = CVec::zeros(dim);
        psi[index] = ONE;
        Self::new(num_qubits, psi)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    pub fn reset_queries(&self) {
        self.queries.set(0);
    }

    /// Analysis-only view of the hidden state.
    pub fn hidden_state(&self) -> &CVec {
        &self.psi
    }

    /// Overlap magnitude of the hidden state with the uniform superposition,
    /// the sine of the initial amplitude-amplification angle.
    pub fn uniform_overlap(&self) -> f64 {
        let root = (self.psi.len() as f64).sqrt();
        (self.psi.iter().sum::<C64>() / C64::new(root, 0.0)).norm()
    }

    /// The query gate on explicit register and flag qubits.
    pub fn flip_gate(
        self: &Rc<Self>,
        register: Vec<usize>,
        flag: usize,
    ) -> Result<Rc<dyn QueryGate>> {
        if register.len() != self.num_qubits {
            return Err(Error::Dimension(format!(
                "oracle register is {} qubits, got {}",
                self.num_qubits,
                register.len()
            )));
        }
        let mut all = register.clone();
        all.push(flag);
        ensure_distinct_in_range(&all, usize::MAX)?;
        Ok(Rc::new(MarkedFlipGate {
            oracle: Rc::clone(self),
            register,
            flag,
        }))
    }
}

struct MarkedFlipGate {
    oracle: Rc<MarkedStateOracle>,
    register: Vec<usize>,
    flag: usize,
}

impl QueryGate for MarkedFlipGate {
    fn label(&self) -> String {
        format!("marked-flip[{} qubits]", self.register.len())
    }

    fn qubits(&self) -> Vec<usize> {
        let mut q = self.register.clone();
        q.push(self.flag);
        q
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        let n = state.num_qubits();
        ensure_distinct_in_range(&self.qubits(), n)?;
        let spread = spread_map(&self.register);
        let bases = free_assignments(n, &self.qubits());
        let flag_mask = 1usize << self.flag;
        let psi = self.oracle.psi.clone();
        let amps = state.amps_mut();
        for &base in &bases {
            let mut c0 = ZERO;
            let mut c1 = ZERO;
            for (x, &s) in spread.iter().enumerate() {
                c0 += psi[x].conj() * amps[base | s];
                c1 += psi[x].conj() * amps[base | s | flag_mask];
            }
            for (x, &s) in spread.iter().enumerate() {
                amps[base | s] += (c1 - c0) * psi[x];
                amps[base | s | flag_mask] += (c0 - c1) * psi[x];
            }
        }
        self.oracle.queries.set(self.oracle.queries.get() + 1);
        Ok(())
    }

    fn apply_adjoint(&self, state: &mut StateVector) -> Result<()> {
        // The flip is an involution.
        self.apply(state)
    }
}

/// Marked-state verifier: the witness is the search register, the single
/// ancilla doubles as the accept bit, and one query flips it on the hidden
/// component. The acceptance operator is the rank-1 projector onto psi.
pub fn build_marked_state_procedure(
    oracle: &Rc<MarkedStateOracle>,
) -> Result<VerificationProcedure> {
    let n = oracle.num_qubits();
    let mut proc = VerificationProcedure::new(n, 1, n)?;
    proc.push_query(oracle.flip_gate((0..n).collect(), n)?)?;
    proc.set_input_label(format!("marked-state[n={n}]"));
    Ok(proc)
}

/// Result of one amplitude-amplification run.
#[derive(Debug, Clone)]
pub struct GroverOutcome {
    pub iterations: usize,
    pub queries: u64,
    /// Overlap of the final register with the hidden state, from the
    /// simulated circuit.
    pub success_probability: f64,
    /// Closed-form sin^2((2t+1) theta) for the same iteration count.
    pub predicted_probability: f64,
}

/// Iteration count maximizing amplitude amplification from initial angle
/// `theta`: round(pi / (4 theta) - 1/2).
pub fn grover_iterations(theta: f64) -> usize {
    (std::f64::consts::PI / (4.0 * theta) - 0.5).round().max(0.0) as usize
}

/// Runs amplitude amplification against the oracle: uniform start, flag in
/// the X-basis minus state for phase kickback, reflection about the uniform
/// state between queries.
pub fn grover_search(oracle: &Rc<MarkedStateOracle>) -> Result<GroverOutcome> {
    let n = oracle.num_qubits();
    let dim = 1usize << n;
    let theta = oracle.uniform_overlap().asin();
    if theta <= 0.0 {
        return Err(Error::Parameter(
            "hidden state is orthogonal to the uniform start".into(),
        ));
    }
    let t = grover_iterations(theta);
    oracle.reset_queries();
    let mut state = StateVector::zero(n + 1);
    for q in 0..n {
        apply_gate(&mut state, &GateOp::hadamard(q))?;
    }
    apply_gate(&mut state, &GateOp::unitary(vec![n], x_matrix())?)?;
    apply_gate(&mut state, &GateOp::hadamard(n))?;
    let gate = oracle.flip_gate((0..n).collect(), n)?;
    let scale = C64::new(2.0 / dim as f64, 0.0);
    let mut diffusion = CMat::from_element(dim, dim, scale);
    for i in 0..dim {
        diffusion[(i, i)] -= ONE;
    }
    let diffusion = GateOp::unitary((0..n).collect(), diffusion)?;
    for _ in 0..t {
        gate.apply(&mut state)?;
        apply_gate(&mut state, &diffusion)?;
    }
    apply_gate(&mut state, &GateOp::hadamard(n))?;
    apply_gate(&mut state, &GateOp::unitary(vec![n], x_matrix())?)?;
    // The flag is back at 0; project the register onto the hidden state.
    let mut overlap = ZERO;
    for x in 0..dim {
        overlap += oracle.psi[x].conj() * state.amp(x);
    }
    let angle = (2 * t + 1) as f64 * theta;
    Ok(GroverOutcome {
        iterations: t,
        queries: oracle.queries(),
        success_probability: overlap.norm_sqr(),
        predicted_probability: angle.sin().powi(2),
    })
}

/// Probability that `probes` orthonormal random classical probes find the
/// hidden state: each probe queries the oracle once and measures the flag,
/// succeeding independently with its overlap squared.
pub fn classical_probe_success<R: Rng>(
    oracle: &Rc<MarkedStateOracle>,
    probes: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = oracle.num_qubits();
    let dim = 1usize << n;
    if probes > dim {
        return Err(Error::Parameter(format!(
            "{probes} orthonormal probes cannot exist in dimension {dim}"
        )));
    }
    let frame = linalg::haar_unitary(dim, rng);
    let gate = oracle.flip_gate((0..n).collect(), n)?;
    let mut miss = 1.0;
    for i in 0..probes {
        let mut amps = vec![ZERO; 2 * dim];
        for x in 0..dim {
            amps[x] = frame[(x, i)];
        }
        let mut state = StateVector::from_amplitudes(n + 1, amps)?;
        gate.apply(&mut state)?;
        let hit = state.probability_of_bit(n, true)?;
        miss *= 1.0 - hit;
    }
    Ok(1.0 - miss)
}

/// Oracle hiding a unitary, applied only through exact indexed powers: one
/// query maps |k>|x> to |k> U^k |x> with k read from an index register.
#[derive(Debug)]
pub struct HiddenUnitaryOracle {
    power: MatrixPowerOracle,
    queries: Cell<u64>,
}

impl HiddenUnitaryOracle {
    pub fn new(u: &CMat) -> Result<Rc<Self>> {
        Ok(Rc::new(Self {
            power: MatrixPowerOracle::new(u)?,
            queries: Cell::new(0),
        }))
    }

    /// Hidden unitary with the given eigenphases (in turns) and a Haar
    /// random eigenbasis.
    pub fn from_phases<R: Rng>(phases: &[f64], rng: &mut R) -> Result<Rc<Self>> {
        let dim = phases.len();
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "{dim} eigenphases is not a power-of-two dimension"
            )));
        }
        let w = linalg::haar_unitary(dim, rng);
        let mut diag = CMat::zeros(dim, dim);
        for (i, phi) in phases.iter().enumerate() {
            diag[(i, i)] = C64::from_polar(1.0, std::f64::consts::TAU * phi);
        }
        let u = &w * diag * w.adjoint();
        Self::new(&u)
    }

    pub fn num_qubits(&self) -> usize {
        self.power.num_qubits()
    }

    /// Analysis-only view: eigenphases in turns, ascending.
    pub fn phases(&self) -> &[f64] {
        self.power.phases()
    }

    /// Analysis-only view: the eigenvector paired with `phases()[i]`.
    pub fn eigenvector(&self, i: usize) -> CVec {
        self.power.basis_column(i)
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    pub fn reset_queries(&self) {
        self.queries.set(0);
    }

    /// The query gate applying U^k to `targets` with k read from
    /// `index_register` (little-endian).
    pub fn indexed_powers_gate(
        self: &Rc<Self>,
        index_register: Vec<usize>,
        targets: Vec<usize>,
    ) -> Result<Rc<dyn QueryGate>> {
        if targets.len() != self.num_qubits() {
            return Err(Error::Dimension(format!(
                "oracle acts on {} qubits, got {} targets",
                self.num_qubits(),
                targets.len()
            )));
        }
        if index_register.is_empty() || index_register.len() >= 63 {
            return Err(Error::Parameter(format!(
                "index register of {} bits is unsupported",
                index_register.len()
            )));
        }
        let mut all = index_register.clone();
        all.extend(&targets);
        ensure_distinct_in_range(&all, usize::MAX)?;
        Ok(Rc::new(IndexedPowersGate {
            oracle: Rc::clone(self),
            index_register,
            targets,
        }))
    }
}

struct IndexedPowersGate {
    oracle: Rc<HiddenUnitaryOracle>,
    index_register: Vec<usize>,
    targets: Vec<usize>,
}

impl IndexedPowersGate {
    fn apply_signed(&self, state: &mut StateVector, sign: i64) -> Result<()> {
        let n = state.num_qubits();
        ensure_distinct_in_range(&self.qubits(), n)?;
        let spread_t = spread_map(&self.targets);
        let spread_k = spread_map(&self.index_register);
        let bases = free_assignments(n, &self.qubits());
        let block = spread_t.len();
        let amps = state.amps_mut();
        let mut gathered = CVec::zeros(block);
        for (k, &kbase) in spread_k.iter().enumerate() {
            if k == 0 {
                continue;
            }
            for &outer in &bases {
                let base = outer | kbase;
                for j in 0..block {
                    gathered[j] = amps[base | spread_t[j]];
                }
                self.oracle.power.apply_power(sign * k as i64, &mut gathered);
                for j in 0..block {
                    amps[base | spread_t[j]] = gathered[j];
                }
            }
        }
        self.oracle.queries.set(self.oracle.queries.get() + 1);
        Ok(())
    }
}

impl QueryGate for IndexedPowersGate {
    fn label(&self) -> String {
        format!(
            "indexed-powers[{} index bits, {} targets]",
            self.index_register.len(),
            self.targets.len()
        )
    }

    fn qubits(&self) -> Vec<usize> {
        let mut q = self.index_register.clone();
        q.extend(&self.targets);
        q
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.apply_signed(state, 1)
    }

    fn apply_adjoint(&self, state: &mut StateVector) -> Result<()> {
        self.apply_signed(state, -1)
    }
}

fn push_inverse_qft(proc: &mut VerificationProcedure, register: &[usize]) -> Result<()> {
    for op in qft(register)?.iter().rev() {
        proc.push_gate(op.adjoint())?;
    }
    Ok(())
}

/// Eigenphase-pair verifier.
///
/// Witness: two copies of the hidden unitary's register. A swap test runs
/// first; each register is then phase-estimated with `bits` bits through one
/// indexed-powers query. Acceptance demands the antisymmetric swap outcome
/// and readouts within `close` grid steps on the circle.
pub fn build_phase_pair_procedure(
    oracle: &Rc<HiddenUnitaryOracle>,
    bits: usize,
    close: usize,
) -> Result<VerificationProcedure> {
    let q = oracle.num_qubits();
    let m = 2 * q;
    let sw = m;
    let pe1: Vec<usize> = (m + 1..m + 1 + bits).collect();
    let pe2: Vec<usize> = (m + 1 + bits..m + 1 + 2 * bits).collect();
    let accept = m + 1 + 2 * bits;
    let mut proc = VerificationProcedure::new(m, 2 * bits + 2, accept)?;
    proc.push_gate(GateOp::hadamard(sw))?;
    for i in 0..q {
        proc.push_gate(GateOp::controlled_swap(sw, i, q + i)?)?;
    }
    proc.push_gate(GateOp::hadamard(sw))?;
    for &b in pe1.iter().chain(&pe2) {
        proc.push_gate(GateOp::hadamard(b))?;
    }
    proc.push_query(oracle.indexed_powers_gate(pe1.clone(), (0..q).collect())?)?;
    proc.push_query(oracle.indexed_powers_gate(pe2.clone(), (q..2 * q).collect())?)?;
    push_inverse_qft(&mut proc, &pe1)?;
    push_inverse_qft(&mut proc, &pe2)?;
    let mut controls = vec![sw];
    controls.extend(&pe1);
    controls.extend(&pe2);
    let size = 1usize << bits;
    let table: Vec<bool> = (0..1usize << (1 + 2 * bits))
        .map(|pattern| {
            if pattern & 1 == 0 {
                return false;
            }
            let y1 = (pattern >> 1) & (size - 1);
            let y2 = (pattern >> (1 + bits)) & (size - 1);
            circle_distance(y1, y2, size) <= close
        })
        .collect();
    proc.push_gate(GateOp::predicate_flip(controls, accept, table)?)?;
    proc.set_input_label(format!("phase-pair[q={q}, bits={bits}, close={close}]"));
    Ok(proc)
}

/// Probability that the phase-pair verifier accepts an antisymmetric pair of
/// eigenvectors with phases `phi1`, `phi2`: the swap outcome is certain and
/// the readouts are independent.
pub fn phase_pair_acceptance(phi1: f64, phi2: f64, bits: usize, close: usize) -> f64 {
    let d1 = phase_estimate_distribution(phi1, bits);
    let d2 = phase_estimate_distribution(phi2, bits);
    let size = 1usize << bits;
    let mut total = 0.0;
    for y1 in 0..size {
        for y2 in 0..size {
            if circle_distance(y1, y2, size) <= close {
                total += d1[y1] * d2[y2];
            }
        }
    }
    total
}

/// Three-register eigenphase-equality verifier: each register is
/// phase-estimated with one query, and acceptance demands all pairwise
/// readout circle distances at most `close`.
pub fn build_phase_triple_procedure(
    oracle: &Rc<HiddenUnitaryOracle>,
    bits: usize,
    close: usize,
) -> Result<VerificationProcedure> {
    let q = oracle.num_qubits();
    let m = 3 * q;
    let registers: Vec<Vec<usize>> = (0..3)
        .map(|r| (m + r * bits..m + (r + 1) * bits).collect())
        .collect();
    let accept = m + 3 * bits;
    let mut proc = VerificationProcedure::new(m, 3 * bits + 1, accept)?;
    for pe in &registers {
        for &b in pe {
            proc.push_gate(GateOp::hadamard(b))?;
        }
    }
    for (r, pe) in registers.iter().enumerate() {
        proc.push_query(
            oracle.indexed_powers_gate(pe.clone(), (r * q..(r + 1) * q).collect())?,
        )?;
    }
    for pe in &registers {
        push_inverse_qft(&mut proc, pe)?;
    }
    let mut controls = Vec::new();
    for pe in &registers {
        controls.extend(pe);
    }
    let size = 1usize << bits;
    let table: Vec<bool> = (0..1usize << (3 * bits))
        .map(|pattern| {
            let ys: Vec<usize> = (0..3)
                .map(|r| (pattern >> (r * bits)) & (size - 1))
                .collect();
            circle_distance(ys[0], ys[1], size) <= close
                && circle_distance(ys[0], ys[2], size) <= close
                && circle_distance(ys[1], ys[2], size) <= close
        })
        .collect();
    proc.push_gate(GateOp::predicate_flip(controls, accept, table)?)?;
    proc.set_input_label(format!(
        "phase-triple[q={q}, bits={bits}, close={close}]"
    ));
    Ok(proc)
}

/// Probability that the triple verifier accepts a product of eigenvectors
/// with the given phases.
pub fn phase_triple_acceptance(phis: &[f64; 3], bits: usize, close: usize) -> f64 {
    let dists: Vec<Vec<f64>> = phis
        .iter()
        .map(|&phi| phase_estimate_distribution(phi, bits))
        .collect();
    let size = 1usize << bits;
    let mut total = 0.0;
    for y1 in 0..size {
        for y2 in 0..size {
            if circle_distance(y1, y2, size) > close {
                continue;
            }
            for y3 in 0..size {
                if circle_distance(y1, y3, size) <= close
                    && circle_distance(y2, y3, size) <= close
                {
                    total += dists[0][y1] * dists[1][y2] * dists[2][y3];
                }
            }
        }
    }
    total
}

/// Smallest circle distance among all eigenphase pairs of the oracle. With
/// 2^q phases on the unit circle this never exceeds 2^-q (pigeonhole).
pub fn closest_phase_pair(oracle: &HiddenUnitaryOracle) -> (usize, usize, f64) {
    let phases = oracle.phases();
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..phases.len() {
        for j in i + 1..phases.len() {
            let d = circle_distance_turns(phases[i], phases[j]);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}
