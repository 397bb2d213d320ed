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

//! Black-box group non-membership.
//!
//! A finite group is hidden behind an oracle over opaque fixed-width
//! labels. The verifier receives generator labels for a subgroup H and a
//! target element h, and must accept evidence that h lies outside H. The
//! witness carries a flag qubit: flag 0 presents a classical certificate (a
//! straight-line program over the generators multiplying to h, refuting
//! non-membership), flag 1 presents a quantum state that is tested for
//! H-invariance and then interfered against right-multiplication by h. The
//! uniform superposition over H accepts the interference subtest with
//! probability exactly 1/2 when h lies outside H, and 0 when it does not.
//!
//! Invalid labels act as fixed points of every multiplication gate, so a
//! witness supported on them passes the invariance subtests vacuously and
//! then fails the interference subtest with certainty: the oracle's error
//! signal surfaces as rejection.

use std::cell::Cell;
use std::rc::Rc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, C64, ZERO};
use crate::qvp::{QueryGate, VerificationProcedure};
use crate::simcore::{GateOp, StateVector};
use crate::{Error, Result};

fn ceil_log2(x: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < x {
        bits += 1;
    }
    bits
}

/// A finite group as an explicit multiplication table over element indices
/// 0..order, with the identity at index 0.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    name: String,
    order: usize,
    table: Vec<usize>,
}

impl GroupSpec {
    pub fn new(name: impl Into<String>, order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::Dimension(format!(
                "table of {} entries does not match order {order}",
                table.len()
            )));
        }
        let spec = Self {
            name: name.into(),
            order,
            table,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let n = self.order;
        for (i, &v) in self.table.iter().enumerate() {
            if v >= n {
                return Err(Error::Parameter(format!(
                    "table entry {v} at {i} outside 0..{n}"
                )));
            }
        }
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(Error::Parameter("index 0 is not an identity".into()));
            }
            if !(0..n).any(|x| self.mul(a, x) == 0) {
                return Err(Error::Parameter(format!("element {a} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::Parameter(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The cyclic group Z_m under addition.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("cyclic group of order 0".into()));
        }
        let table = (0..m * m).map(|i| (i / m + i % m) % m).collect();
        Self::new(format!("Z_{m}"), m, table)
    }

    /// The dihedral group of order 2m: element r + m*s acts on Z_m as
    /// x -> (-1)^s x + r.
    pub fn dihedral(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("dihedral group over 0 points".into()));
        }
        let order = 2 * m;
        let mut table = vec![0usize; order * order];
        for a in 0..order {
            let (r1, s1) = (a % m, a / m);
            for b in 0..order {
                let (r2, s2) = (b % m, b / m);
                let r = if s1 == 0 { r1 + r2 } else { r1 + m - r2 % m } % m;
                let s = (s1 + s2) % 2;
                table[a * order + b] = r + m * s;
            }
        }
        Self::new(format!("D_{m}"), order, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order)
            .find(|&x| self.mul(a, x) == 0)
            .expect("validated group has inverses")
    }

    /// The subgroup generated by the given elements, sorted.
    pub fn subgroup(&self, generators: &[usize]) -> Result<Vec<usize>> {
        for &g in generators {
            if g >= self.order {
                return Err(Error::Parameter(format!("generator {g} outside group")));
            }
        }
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for &g in generators {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push(y);
                    }
                }
            }
        }
        Ok((0..self.order).filter(|&x| seen[x]).collect())
    }
}

/// Oracle hiding a group behind an injective random labeling of its
/// elements by `label_bits`-bit strings. All circuit access goes through
/// multiplication query gates; labels of the identity, the generators, and
/// the target are published with the instance.
#[derive(Debug)]
pub struct GroupOracle {
    spec: GroupSpec,
    generators: Vec<usize>,
    target: usize,
    label_bits: usize,
    labels: Vec<usize>,
    element_of: Vec<Option<usize>>,
    queries: Cell<u64>,
}

impl GroupOracle {
    pub fn new<R: Rng>(
        spec: GroupSpec,
        generators: Vec<usize>,
        target: usize,
        label_bits: usize,
        rng: &mut R,
    ) -> Result<Rc<Self>> {
        let order = spec.order();
        if label_bits == 0 || label_bits > 10 {
            return Err(Error::Parameter(format!(
                "label width {label_bits} outside 1..=10"
            )));
        }
        let space = 1usize << label_bits;
        if order > space {
            return Err(Error::Dimension(format!(
                "{order} elements cannot be labeled with {label_bits} bits"
            )));
        }
        if target >= order {
            return Err(Error::Parameter(format!("target {target} outside group")));
        }
        spec.subgroup(&generators)?;
        let labels = rand::seq::index::sample(rng, space, order).into_vec();
        let mut element_of = vec![None; space];
        for (elem, &label) in labels.iter().enumerate() {
            element_of[label] = Some(elem);
        }
        Ok(Rc::new(Self {
            spec,
            generators,
            target,
            label_bits,
            labels,
            element_of,
            queries: Cell::new(0),
        }))
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn label_bits(&self) -> usize {
        self.label_bits
    }

    /// The published label of an element.
    pub fn label(&self, element: usize) -> usize {
        self.labels[element]
    }

    pub fn element_from_label(&self, label: usize) -> Option<usize> {
        self.element_of.get(label).copied().flatten()
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }

    pub fn reset_queries(&self) {
        self.queries.set(0);
    }

    /// Whether the target lies in the generated subgroup.
    pub fn target_is_member(&self) -> bool {
        self.spec
            .subgroup(&self.generators)
            .expect("generators validated")
            .contains(&self.target)
    }

    /// Uniform superposition over the labels of the generated subgroup, on
    /// `label_bits` qubits.
    pub fn subgroup_state(&self) -> Result<StateVector> {
        let members = self.spec.subgroup(&self.generators)?;
        let mut amps = vec![ZERO; 1 << self.label_bits];
        let weight = C64::new(1.0 / (members.len() as f64).sqrt(), 0.0);
        for &m in &members {
            amps[self.labels[m]] = weight;
        }
        StateVector::from_amplitudes(self.label_bits, amps)
    }

    /// Right-multiplication by a fixed element as a label permutation;
    /// invalid labels are fixed points.
    fn permutation(&self, element: usize, invert: bool) -> Vec<usize> {
        let g = if invert {
            self.spec.inv(element)
        } else {
            element
        };
        (0..1usize << self.label_bits)
            .map(|y| match self.element_of[y] {
                Some(e) => self.labels[self.spec.mul(e, g)],
                None => y,
            })
            .collect()
    }

    /// Expectation of right-multiplication by the target on a label-space
    /// state: the interference subtest accepts with (1 - Re<psi|U_h|psi>)/2.
    pub fn interference_acceptance(&self, psi: &StateVector) -> Result<f64> {
        if psi.num_qubits() != self.label_bits {
            return Err(Error::Dimension(format!(
                "state on {} qubits, labels use {}",
                psi.num_qubits(),
                self.label_bits
            )));
        }
        let perm = self.permutation(self.target, false);
        let mut overlap = ZERO;
        for (y, &dest) in perm.iter().enumerate() {
            overlap += psi.amp(dest).conj() * psi.amp(y);
        }
        Ok((1.0 - overlap.re) / 2.0)
    }

    /// Query gate right-multiplying a label register by a fixed element,
    /// optionally under a control pattern. One invocation counts one query:
    /// the oracle supports a {-1, 0, 1} control convention natively.
    pub fn const_mul_gate(
        self: &Rc<Self>,
        element: usize,
        invert: bool,
        register: Vec<usize>,
        controls: Vec<(usize, bool)>,
    ) -> Result<Rc<dyn QueryGate>> {
        if element >= self.spec.order() {
            return Err(Error::Parameter(format!("element {element} outside group")));
        }
        if register.len() != self.label_bits {
            return Err(Error::Dimension(format!(
                "register of {} qubits, labels use {}",
                register.len(),
                self.label_bits
            )));
        }
        Ok(Rc::new(ConstMulGate {
            oracle: Rc::clone(self),
            element,
            invert,
            register,
            controls,
        }))
    }

    /// The raw two-register oracle: |l(x)>|l(y)> -> |l(x)>|l(y x^-1)>.
    /// Components with an invalid label in either register pass through
    /// unchanged, which downstream subtests reject.
    pub fn pair_gate(
        self: &Rc<Self>,
        x_register: Vec<usize>,
        y_register: Vec<usize>,
    ) -> Result<Rc<dyn QueryGate>> {
        if x_register.len() != self.label_bits || y_register.len() != self.label_bits {
            return Err(Error::Dimension(format!(
                "registers of {} and {} qubits, labels use {}",
                x_register.len(),
                y_register.len(),
                self.label_bits
            )));
        }
        Ok(Rc::new(PairMulGate {
            oracle: Rc::clone(self),
            x_register,
            y_register,
        }))
    }
}

fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (bit, &q)| acc | (((index >> q) & 1) << bit))
}

fn scatter_bits(value: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (bit, &q)| acc | (((value >> bit) & 1) << q))
}

fn permute_register(
    state: &mut StateVector,
    register: &[usize],
    controls: &[(usize, bool)],
    perm: &[usize],
) -> Result<()> {
    let n = state.num_qubits();
    for &(q, _) in controls {
        if q >= n {
            return Err(Error::QubitRange(format!("control {q} outside state")));
        }
    }
    for &q in register {
        if q >= n {
            return Err(Error::QubitRange(format!("target {q} outside state")));
        }
    }
    let dim = 1usize << n;
    let amps = state.amps_mut();
    let snapshot = amps.to_vec();
    let reg_mask = register.iter().fold(0usize, |m, &q| m | (1 << q));
    for idx in 0..dim {
        if controls
            .iter()
            .any(|&(q, v)| ((idx >> q) & 1 == 1) != v)
        {
            continue;
        }
        let y = gather_bits(idx, register);
        let dest = (idx & !reg_mask) | scatter_bits(perm[y], register);
        amps[dest] = snapshot[idx];
    }
    Ok(())
}

struct ConstMulGate {
    oracle: Rc<GroupOracle>,
    element: usize,
    invert: bool,
    register: Vec<usize>,
    controls: Vec<(usize, bool)>,
}

impl QueryGate for ConstMulGate {
    fn label(&self) -> String {
        format!(
            "const-mul[element={}{}]",
            self.element,
            if self.invert { ", inverse" } else { "" }
        )
    }

    fn qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self.controls.iter().map(|&(c, _)| c).collect();
        q.extend(&self.register);
        q
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        let perm = self.oracle.permutation(self.element, self.invert);
        permute_register(state, &self.register, &self.controls, &perm)?;
        self.oracle.queries.set(self.oracle.queries.get() + 1);
        Ok(())
    }

    fn apply_adjoint(&self, state: &mut StateVector) -> Result<()> {
        let perm = self.oracle.permutation(self.element, !self.invert);
        permute_register(state, &self.register, &self.controls, &perm)?;
        self.oracle.queries.set(self.oracle.queries.get() + 1);
        Ok(())
    }
}

struct PairMulGate {
    oracle: Rc<GroupOracle>,
    x_register: Vec<usize>,
    y_register: Vec<usize>,
}

impl PairMulGate {
    fn apply_signed(&self, state: &mut StateVector, invert: bool) -> Result<()> {
        let n = state.num_qubits();
        let oracle = &self.oracle;
        let bits = oracle.label_bits;
        let dim = 1usize << n;
        let amps = state.amps_mut();
        let snapshot = amps.to_vec();
        let y_mask = self.y_register.iter().fold(0usize, |m, &q| m | (1 << q));
        for idx in 0..dim {
            let x = gather_bits(idx, &self.x_register);
            let y = gather_bits(idx, &self.y_register);
            let (Some(ex), Some(ey)) = (
                oracle.element_of[x % (1 << bits)],
                oracle.element_of[y % (1 << bits)],
            ) else {
                continue;
            };
            let factor = if invert { ex } else { oracle.spec.inv(ex) };
            let dest_label = oracle.labels[oracle.spec.mul(ey, factor)];
            let dest = (idx & !y_mask) | scatter_bits(dest_label, &self.y_register);
            amps[dest] = snapshot[idx];
        }
        oracle.queries.set(oracle.queries.get() + 1);
        Ok(())
    }
}

impl QueryGate for PairMulGate {
    fn label(&self) -> String {
        "group-mul".into()
    }

    fn qubits(&self) -> Vec<usize> {
        let mut q = self.x_register.clone();
        q.extend(&self.y_register);
        q
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.apply_signed(state, false)
    }

    fn apply_adjoint(&self, state: &mut StateVector) -> Result<()> {
        self.apply_signed(state, true)
    }
}

/// One step of a straight-line program over the published generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertSymbol {
    Skip,
    Gen(usize),
    Inv(usize),
}

/// Shape parameters of the non-membership verifier.
#[derive(Debug, Clone)]
pub struct GnmConfig {
    /// Invariance subtest repetitions.
    pub closure_rounds: usize,
    /// Generator multiplications per random subgroup word.
    pub word_length: usize,
    /// Straight-line program slots in the certificate register.
    pub cert_slots: usize,
    /// Seed for the random subgroup words; rounds are prefix-nested across
    /// increasing `closure_rounds` at a fixed seed.
    pub word_seed: u64,
}

impl GnmConfig {
    pub fn standard(label_bits: usize) -> Self {
        Self {
            closure_rounds: 2 * label_bits,
            word_length: 2 * label_bits,
            cert_slots: 4,
            word_seed: 0,
        }
    }
}

fn symbol_bits(num_generators: usize) -> usize {
    ceil_log2(2 * num_generators + 1).max(1)
}

fn symbol_value(symbol: CertSymbol, num_generators: usize) -> Result<usize> {
    match symbol {
        CertSymbol::Skip => Ok(0),
        CertSymbol::Gen(i) if i < num_generators => Ok(1 + i),
        CertSymbol::Inv(i) if i < num_generators => Ok(1 + num_generators + i),
        _ => Err(Error::Parameter(format!(
            "certificate symbol {symbol:?} with {num_generators} generators"
        ))),
    }
}

/// Qubit layout of the verifier, exposed so callers can address the
/// witness: flag at 0, payload at 1..=payload_qubits.
#[derive(Debug, Clone)]
pub struct GnmLayout {
    pub payload_qubits: usize,
    pub witness_qubits: usize,
    pub total_qubits: usize,
}

pub fn gnm_layout(oracle: &GroupOracle, config: &GnmConfig) -> GnmLayout {
    let k = oracle.generators().len();
    let payload = oracle
        .label_bits()
        .max(config.cert_slots * symbol_bits(k));
    let witness = 1 + payload;
    GnmLayout {
        payload_qubits: payload,
        witness_qubits: witness,
        total_qubits: witness + oracle.label_bits() + config.closure_rounds + 2,
    }
}

/// Builds the non-membership verifier.
///
/// Witness: flag qubit 0 plus a payload register. Flag 0 reads the payload
/// as a straight-line program over the generators, evaluates it into an
/// accumulator prepared at the identity label, and accepts iff the result
/// is the target's label: a valid membership certificate refutes the claim
/// and is the only way to accept in that branch. Flag 1 runs
/// `closure_rounds` invariance subtests (each interferes the payload
/// against right-multiplication by a random word in the generators) and
/// one interference subtest against right-multiplication by the target,
/// accepting iff every invariance control reads 0 and the final control
/// reads 1.
pub fn build_gnm_procedure(
    oracle: &Rc<GroupOracle>,
    config: &GnmConfig,
) -> Result<VerificationProcedure> {
    let k = oracle.generators().len();
    if k == 0 {
        return Err(Error::Parameter("no subgroup generators".into()));
    }
    if config.cert_slots == 0 {
        return Err(Error::Parameter("certificate needs at least one slot".into()));
    }
    let n = oracle.label_bits();
    let sbits = symbol_bits(k);
    let layout = gnm_layout(oracle, config);
    let w = layout.witness_qubits;
    let t = config.closure_rounds;
    let acc: Vec<usize> = (w..w + n).collect();
    let closure: Vec<usize> = (w + n..w + n + t).collect();
    let final_control = w + n + t;
    let accept = w + n + t + 1;
    let mut proc = VerificationProcedure::new(w, n + t + 2, accept)?;

    // Accumulator starts at the identity's label.
    let identity_label = oracle.label(oracle.spec().identity());
    for (bit, &q) in acc.iter().enumerate() {
        if (identity_label >> bit) & 1 == 1 {
            proc.push_gate(GateOp::unitary(
                vec![q],
                linalg::CMat::from_row_slice(2, 2, &[ZERO, linalg::ONE, linalg::ONE, ZERO]),
            )?)?;
        }
    }

    // Flag-0 branch: evaluate the straight-line program into the
    // accumulator. Each slot contributes one controlled multiplication per
    // generator and direction; unmatched slot values act as skips.
    for slot in 0..config.cert_slots {
        let slot_bits: Vec<usize> = (0..sbits).map(|b| 1 + slot * sbits + b).collect();
        for gi in 0..k {
            for invert in [false, true] {
                let value = symbol_value(
                    if invert {
                        CertSymbol::Inv(gi)
                    } else {
                        CertSymbol::Gen(gi)
                    },
                    k,
                )?;
                let mut controls = vec![(0usize, false)];
                for (b, &q) in slot_bits.iter().enumerate() {
                    controls.push((q, (value >> b) & 1 == 1));
                }
                proc.push_query(oracle.const_mul_gate(
                    oracle.generators()[gi],
                    invert,
                    acc.clone(),
                    controls,
                )?)?;
            }
        }
    }

    // Flag-1 branch: invariance subtests with prefix-nested random words.
    let payload: Vec<usize> = (1..=n).collect();
    let mut word_rng = ChaCha8Rng::seed_from_u64(config.word_seed);
    for &c in &closure {
        proc.push_gate(GateOp::hadamard(c))?;
        for _ in 0..config.word_length {
            let gi = word_rng.gen_range(0..k);
            let invert = word_rng.gen_bool(0.5);
            proc.push_query(oracle.const_mul_gate(
                oracle.generators()[gi],
                invert,
                payload.clone(),
                vec![(0, true), (c, true)],
            )?)?;
        }
        proc.push_gate(GateOp::hadamard(c))?;
    }

    // Interference subtest against the target.
    proc.push_gate(GateOp::hadamard(final_control))?;
    proc.push_query(oracle.const_mul_gate(
        oracle.target(),
        false,
        payload.clone(),
        vec![(0, true), (final_control, true)],
    )?)?;
    proc.push_gate(GateOp::hadamard(final_control))?;

    // Accept: flag 0 demands the accumulator equal the target's label;
    // flag 1 demands every invariance control read 0 and the final control
    // read 1. Controls untouched by a branch are deterministic and pinned.
    let mut controls = vec![0usize];
    controls.extend(&acc);
    controls.extend(&closure);
    controls.push(final_control);
    let target_label = oracle.label(oracle.target());
    let table: Vec<bool> = (0..1usize << controls.len())
        .map(|pattern| {
            let flag = pattern & 1 == 1;
            let acc_value = (pattern >> 1) & ((1 << n) - 1);
            let closure_value = (pattern >> (1 + n)) & ((1usize << t) - 1);
            let final_value = (pattern >> (1 + n + t)) & 1 == 1;
            if flag {
                acc_value == identity_label && closure_value == 0 && final_value
            } else {
                acc_value == target_label && closure_value == 0 && !final_value
            }
        })
        .collect();
    proc.push_gate(GateOp::predicate_flip(controls, accept, table)?)?;
    proc.set_input_label(format!(
        "group-non-membership[{}, |H| generators={k}, t={t}]",
        oracle.spec().name()
    ));
    Ok(proc)
}

/// Witness presenting a classical membership certificate: flag 0 and the
/// program encoded into the payload slots.
pub fn certificate_witness(
    oracle: &GroupOracle,
    config: &GnmConfig,
    symbols: &[CertSymbol],
) -> Result<StateVector> {
    let k = oracle.generators().len();
    if symbols.len() > config.cert_slots {
        return Err(Error::Dimension(format!(
            "{} symbols exceed {} slots",
            symbols.len(),
            config.cert_slots
        )));
    }
    let sbits = symbol_bits(k);
    let layout = gnm_layout(oracle, config);
    let mut index = 0usize;
    for (slot, &s) in symbols.iter().enumerate() {
        index |= symbol_value(s, k)? << (1 + slot * sbits);
    }
    Ok(StateVector::basis_state(layout.witness_qubits, index))
}

/// Witness presenting a label-space state under flag 1.
pub fn flag_one_witness(
    oracle: &GroupOracle,
    config: &GnmConfig,
    psi: &StateVector,
) -> Result<StateVector> {
    if psi.num_qubits() != oracle.label_bits() {
        return Err(Error::Dimension(format!(
            "state on {} qubits, labels use {}",
            psi.num_qubits(),
            oracle.label_bits()
        )));
    }
    let layout = gnm_layout(oracle, config);
    let mut amps = vec![ZERO; 1 << layout.witness_qubits];
    for y in 0..psi.dim() {
        amps[1 | (y << 1)] = psi.amp(y);
    }
    StateVector::from_amplitudes(layout.witness_qubits, amps)
}

/// Evaluates a straight-line program over the generators in the hidden
/// group, for oracle-free cross-checks.
pub fn evaluate_certificate(oracle: &GroupOracle, symbols: &[CertSymbol]) -> Result<usize> {
    let spec = oracle.spec();
    let mut x = spec.identity();
    for &s in symbols {
        x = match s {
            CertSymbol::Skip => x,
            CertSymbol::Gen(i) => spec.mul(x, oracle.generators()[i]),
            CertSymbol::Inv(i) => spec.mul(x, spec.inv(oracle.generators()[i])),
        };
    }
    Ok(x)
}

/// Largest acceptance probability over flag-1 witnesses: the top eigenvalue
/// of the acceptance operator restricted to the flag-1 sector, which the
/// flag-controlled circuit leaves invariant.
pub fn flag_one_max_acceptance(
    proc: &VerificationProcedure,
    cap_qubits: usize,
) -> Result<f64> {
    let op = proc.acceptance_operator(cap_qubits)?;
    let half = op.nrows() / 2;
    let mut block = linalg::CMat::zeros(half, half);
    for r in 0..half {
        for c in 0..half {
            block[(r, c)] = op[(2 * r + 1, 2 * c + 1)];
        }
    }
    let (values, _) = linalg::eigh(&block)?;
    Ok(values.last().copied().unwrap_or(0.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z8_oracle(target: usize, seed: u64) -> Rc<GroupOracle> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GroupOracle::new(GroupSpec::cyclic(8).unwrap(), vec![2], target, 4, &mut rng).unwrap()
    }

    #[test]
    fn dihedral_table_is_a_group_with_expected_subgroups() {
        let d4 = GroupSpec::dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        // Reflections are involutions.
        for a in 4..8 {
            assert_eq!(d4.mul(a, a), 0);
        }
        assert_eq!(d4.subgroup(&[1]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(d4.subgroup(&[2, 4]).unwrap(), vec![0, 2, 4, 6]);
        assert_eq!(GroupSpec::cyclic(8).unwrap().subgroup(&[2]).unwrap(), vec![0, 2, 4, 6]);
    }

    #[test]
    fn const_mul_permutes_valid_labels_and_fixes_invalid_ones() {
        let oracle = z8_oracle(4, 3);
        let gate = oracle
            .const_mul_gate(3, false, vec![0, 1, 2, 3], vec![])
            .unwrap();
        for y in 0..16usize {
            let mut state = StateVector::basis_state(4, y);
            gate.apply(&mut state).unwrap();
            let expected = match oracle.element_from_label(y) {
                Some(e) => oracle.label((e + 3) % 8),
                None => y,
            };
            assert!((state.amp(expected).norm() - 1.0).abs() < 1e-12);
            gate.apply_adjoint(&mut state).unwrap();
            assert!((state.amp(y).norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(oracle.queries(), 32);
    }

    #[test]
    fn pair_gate_matches_the_table() {
        let oracle = z8_oracle(1, 9);
        let gate = oracle
            .pair_gate(vec![0, 1, 2, 3], vec![4, 5, 6, 7])
            .unwrap();
        let (x, y) = (3usize, 4usize);
        let idx = oracle.label(x) | (oracle.label(y) << 4);
        let mut state = StateVector::basis_state(8, idx);
        gate.apply(&mut state).unwrap();
        // y x^-1 = 4 - 3 = 1.
        let expected = oracle.label(x) | (oracle.label(1) << 4);
        assert!((state.amp(expected).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn valid_certificate_accepts_with_certainty() {
        let oracle = z8_oracle(4, 17);
        let config = GnmConfig {
            closure_rounds: 2,
            word_length: 3,
            cert_slots: 3,
            word_seed: 1,
        };
        let proc = build_gnm_procedure(&oracle, &config).unwrap();
        let cert = [CertSymbol::Gen(0), CertSymbol::Gen(0), CertSymbol::Skip];
        assert_eq!(evaluate_certificate(&oracle, &cert).unwrap(), 4);
        let witness = certificate_witness(&oracle, &config, &cert).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!((p - 1.0).abs() < 1e-12, "certificate accepts {p}");
        // A program evaluating elsewhere is rejected outright.
        let wrong = certificate_witness(&oracle, &config, &[CertSymbol::Gen(0)]).unwrap();
        let p = proc.acceptance_probability(&wrong).unwrap();
        assert!(p < 1e-12, "wrong certificate accepts {p}");
    }

    #[test]
    fn non_member_subgroup_state_accepts_one_half() {
        let oracle = z8_oracle(1, 29);
        assert!(!oracle.target_is_member());
        let config = GnmConfig {
            closure_rounds: 0,
            word_length: 3,
            cert_slots: 2,
            word_seed: 1,
        };
        let proc = build_gnm_procedure(&oracle, &config).unwrap();
        let psi = oracle.subgroup_state().unwrap();
        let witness = flag_one_witness(&oracle, &config, &psi).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!((p - 0.5).abs() < 1e-9, "subtest accepts {p}");
        assert!((oracle.interference_acceptance(&psi).unwrap() - 0.5).abs() < 1e-12);
        // No certificate exists: every flag-0 basis witness is rejected.
        for sym in [CertSymbol::Skip, CertSymbol::Gen(0), CertSymbol::Inv(0)] {
            let w = certificate_witness(&oracle, &config, &[sym, sym]).unwrap();
            assert!(proc.acceptance_probability(&w).unwrap() < 1e-12);
        }
    }

    #[test]
    fn member_target_fails_the_interference_subtest() {
        let oracle = z8_oracle(4, 31);
        let config = GnmConfig {
            closure_rounds: 0,
            word_length: 3,
            cert_slots: 2,
            word_seed: 1,
        };
        let proc = build_gnm_procedure(&oracle, &config).unwrap();
        let psi = oracle.subgroup_state().unwrap();
        let witness = flag_one_witness(&oracle, &config, &psi).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!(p < 1e-9, "member target accepts {p}");
    }

    #[test]
    fn invalid_label_witness_is_rejected() {
        let oracle = z8_oracle(1, 29);
        let invalid = (0..16usize)
            .find(|&y| oracle.element_from_label(y).is_none())
            .unwrap();
        let config = GnmConfig {
            closure_rounds: 1,
            word_length: 2,
            cert_slots: 2,
            word_seed: 5,
        };
        let proc = build_gnm_procedure(&oracle, &config).unwrap();
        let psi = StateVector::basis_state(4, invalid);
        let witness = flag_one_witness(&oracle, &config, &psi).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!(p < 1e-12, "invalid label accepts {p}");
    }

    #[test]
    fn member_flag_one_ceiling_decays_with_rounds() {
        let oracle = z8_oracle(4, 41);
        let mut last = f64::INFINITY;
        for t in [1usize, 2, 4] {
            let config = GnmConfig {
                closure_rounds: t,
                word_length: 4,
                cert_slots: 2,
                word_seed: 7,
            };
            let proc = build_gnm_procedure(&oracle, &config).unwrap();
            let ceiling = flag_one_max_acceptance(&proc, 20).unwrap();
            assert!(
                ceiling <= last + 1e-9,
                "t={t}: ceiling {ceiling} after {last}"
            );
            last = ceiling;
        }
        assert!(last < 0.5, "ceiling stuck at {last}");
    }
}
