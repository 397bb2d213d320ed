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

//! Verification procedures: a circuit on a witness register plus zeroed
//! ancillas, accepting when a designated ancilla reads a designated value.
//!
//! The witness occupies qubits `[0, m)` and the ancillas `[m, m + k)`, so a
//! procedure can be wrapped by a larger one without renumbering. Acceptance
//! statistics of any witness are captured by one positive-semidefinite
//! operator on the witness space, recoverable through
//! [`VerificationProcedure::acceptance_operator`].

use std::rc::Rc;

use num_rational::Ratio;
use num_traits::{One, Signed};

use crate::linalg::{self, CMat, CVec};
use crate::simcore::{apply_gate, DensityMatrix, GateOp, StateVector};
use crate::{tol, Error, Result};

/// Ceiling on qubit counts for methods that assemble dense operators on the
/// joint witness-plus-ancilla space.
pub const OPERATOR_CAP_QUBITS: usize = 14;

/// A unitary subroutine treated as a black box with its own cost
/// accounting. Implementations count invocations themselves.
pub trait QueryGate {
    fn label(&self) -> String;
    /// Every qubit the query may touch.
    fn qubits(&self) -> Vec<usize>;
    fn apply(&self, state: &mut StateVector) -> Result<()>;
    fn apply_adjoint(&self, state: &mut StateVector) -> Result<()>;
}

/// One step of a procedure's circuit.
#[derive(Clone)]
pub enum CircuitOp {
    Gate(GateOp),
    Query(Rc<dyn QueryGate>),
}

impl std::fmt::Debug for CircuitOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CircuitOp::Gate(g) => write!(f, "Gate({:?})", g.kind()),
            CircuitOp::Query(q) => write!(f, "Query({})", q.label()),
        }
    }
}

impl CircuitOp {
    /// The inverse step.
    pub fn adjoint(&self) -> CircuitOp {
        match self {
            CircuitOp::Gate(g) => CircuitOp::Gate(g.adjoint()),
            CircuitOp::Query(q) => CircuitOp::Query(Rc::new(AdjointQuery(Rc::clone(q)))),
        }
    }
}

/// Wrapper running a query backwards, so inverted circuits keep their
/// query structure (and cost accounting) instead of densifying.
struct AdjointQuery(Rc<dyn QueryGate>);

impl QueryGate for AdjointQuery {
    fn label(&self) -> String {
        format!("adjoint({})", self.0.label())
    }

    fn qubits(&self) -> Vec<usize> {
        self.0.qubits()
    }

    fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.0.apply_adjoint(state)
    }

    fn apply_adjoint(&self, state: &mut StateVector) -> Result<()> {
        self.0.apply(state)
    }
}

/// Circuit on witness and ancilla registers with a designated accept bit.
#[derive(Clone)]
pub struct VerificationProcedure {
    witness_qubits: usize,
    ancilla_qubits: usize,
    ops: Vec<CircuitOp>,
    accept_qubit: usize,
    accept_value: bool,
    input_label: String,
}

impl std::fmt::Debug for VerificationProcedure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VerificationProcedure")
            .field("witness_qubits", &self.witness_qubits)
            .field("ancilla_qubits", &self.ancilla_qubits)
            .field("ops", &self.ops.len())
            .field("accept_qubit", &self.accept_qubit)
            .field("accept_value", &self.accept_value)
            .field("input_label", &self.input_label)
            .finish()
    }
}

impl VerificationProcedure {
    /// Empty circuit; `accept_qubit` must name an ancilla. The accepting
    /// readout value defaults to 1.
    pub fn new(
        witness_qubits: usize,
        ancilla_qubits: usize,
        accept_qubit: usize,
    ) -> Result<VerificationProcedure> {
        if witness_qubits == 0 {
            return Err(Error::Parameter("witness register is empty".into()));
        }
        let total = witness_qubits + ancilla_qubits;
        if accept_qubit < witness_qubits || accept_qubit >= total {
            return Err(Error::QubitRange(format!(
                "accept qubit {accept_qubit} is not an ancilla (witness {witness_qubits}, total {total})"
            )));
        }
        Ok(VerificationProcedure {
            witness_qubits,
            ancilla_qubits,
            ops: Vec::new(),
            accept_qubit,
            accept_value: true,
            input_label: String::new(),
        })
    }

    pub fn witness_qubits(&self) -> usize {
        self.witness_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.witness_qubits + self.ancilla_qubits
    }

    pub fn accept_qubit(&self) -> usize {
        self.accept_qubit
    }

    pub fn accept_value(&self) -> bool {
        self.accept_value
    }

    /// Chooses which readout of the accept bit counts as acceptance.
    pub fn set_accept_value(&mut self, value: bool) {
        self.accept_value = value;
    }

    pub fn input_label(&self) -> &str {
        &self.input_label
    }

    pub fn set_input_label(&mut self, label: impl Into<String>) {
        self.input_label = label.into();
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn push_gate(&mut self, gate: GateOp) -> Result<()> {
        let total = self.total_qubits();
        for q in gate.qubits() {
            if q >= total {
                return Err(Error::QubitRange(format!(
                    "gate touches qubit {q}, procedure has {total}"
                )));
            }
        }
        self.ops.push(CircuitOp::Gate(gate));
        Ok(())
    }

    pub fn extend_gates(&mut self, gates: impl IntoIterator<Item = GateOp>) -> Result<()> {
        for g in gates {
            self.push_gate(g)?;
        }
        Ok(())
    }

    pub fn push_query(&mut self, query: Rc<dyn QueryGate>) -> Result<()> {
        let total = self.total_qubits();
        for q in query.qubits() {
            if q >= total {
                return Err(Error::QubitRange(format!(
                    "query {} touches qubit {q}, procedure has {total}",
                    query.label()
                )));
            }
        }
        self.ops.push(CircuitOp::Query(query));
        Ok(())
    }

    pub fn push_op(&mut self, op: CircuitOp) -> Result<()> {
        match op {
            CircuitOp::Gate(g) => self.push_gate(g),
            CircuitOp::Query(q) => self.push_query(q),
        }
    }

    /// Tensors zeroed ancillas onto a witness state.
    pub fn prepare(&self, witness: &StateVector) -> Result<StateVector> {
        if witness.num_qubits() != self.witness_qubits {
            return Err(Error::Dimension(format!(
                "witness has {} qubits, procedure expects {}",
                witness.num_qubits(),
                self.witness_qubits
            )));
        }
        witness.embed(self.total_qubits())
    }

    /// Applies the circuit in place to a full-width state.
    pub fn apply_ops(&self, state: &mut StateVector) -> Result<()> {
        for op in &self.ops {
            match op {
                CircuitOp::Gate(g) => apply_gate(state, g)?,
                CircuitOp::Query(q) => q.apply(state)?,
            }
        }
        Ok(())
    }

    /// Applies the inverse circuit in place.
    pub fn apply_ops_adjoint(&self, state: &mut StateVector) -> Result<()> {
        for op in self.ops.iter().rev() {
            match op {
                CircuitOp::Gate(g) => apply_gate(state, &g.adjoint())?,
                CircuitOp::Query(q) => q.apply_adjoint(state)?,
            }
        }
        Ok(())
    }

    /// Prepares the witness and runs the circuit.
    pub fn run_on_witness(&self, witness: &StateVector) -> Result<StateVector> {
        let mut state = self.prepare(witness)?;
        self.apply_ops(&mut state)?;
        Ok(state)
    }

    /// Probability that the accept bit reads the accepting value.
    pub fn acceptance_probability(&self, witness: &StateVector) -> Result<f64> {
        let state = self.run_on_witness(witness)?;
        state.probability_of_bit(self.accept_qubit, self.accept_value)
    }

    /// Acceptance probability of a mixed witness, by convexity over any
    /// eigendecomposition.
    pub fn acceptance_probability_mixed(&self, witness: &DensityMatrix) -> Result<f64> {
        if witness.num_qubits() != self.witness_qubits {
            return Err(Error::Dimension(format!(
                "witness has {} qubits, procedure expects {}",
                witness.num_qubits(),
                self.witness_qubits
            )));
        }
        let mut total = 0.0;
        for (weight, pure) in witness.eigendecomposition()? {
            if weight > 0.0 {
                total += weight * self.acceptance_probability(&pure)?;
            }
        }
        Ok(total)
    }

    /// Dense unitary of the assembled circuit on all qubits.
    pub fn assembled_unitary(&self, cap_qubits: usize) -> Result<CMat> {
        let n = self.total_qubits();
        if n > cap_qubits {
            return Err(Error::SizeCap {
                needed: n,
                cap: cap_qubits,
            });
        }
        let dim = 1usize << n;
        let mut u = CMat::zeros(dim, dim);
        for j in 0..dim {
            let mut state = StateVector::basis_state(n, j);
            self.apply_ops(&mut state)?;
            for x in 0..dim {
                u[(x, j)] = state.amp(x);
            }
        }
        Ok(u)
    }

    /// The operator on the witness space whose quadratic form gives every
    /// acceptance probability: positive semidefinite with spectrum in
    /// [0, 1].
    pub fn acceptance_operator(&self, cap_qubits: usize) -> Result<CMat> {
        let n = self.total_qubits();
        if n > cap_qubits {
            return Err(Error::SizeCap {
                needed: n,
                cap: cap_qubits,
            });
        }
        let wdim = 1usize << self.witness_qubits;
        let dim = 1usize << n;
        let mut columns = CMat::zeros(dim, wdim);
        for j in 0..wdim {
            let witness = StateVector::basis_state(self.witness_qubits, j);
            let state = self.run_on_witness(&witness)?;
            for x in 0..dim {
                columns[(x, j)] = state.amp(x);
            }
        }
        self.mask_rejecting_rows(&mut columns);
        Ok(columns.adjoint() * &columns)
    }

    /// The accept projector pulled back through the circuit on the full
    /// register: the inverse circuit applied to the accept-bit projector.
    pub fn conjugated_accept_projector(&self, cap_qubits: usize) -> Result<CMat> {
        let mut columns = self.assembled_unitary(cap_qubits)?;
        self.mask_rejecting_rows(&mut columns);
        Ok(columns.adjoint() * &columns)
    }

    fn mask_rejecting_rows(&self, columns: &mut CMat) {
        let mask = 1usize << self.accept_qubit;
        for x in 0..columns.nrows() {
            let accepts = (x & mask != 0) == self.accept_value;
            if !accepts {
                for j in 0..columns.ncols() {
                    columns[(x, j)] = linalg::ZERO;
                }
            }
        }
    }

    /// Projector onto ancillas-all-zero, diagonal on the full register.
    pub fn zero_ancilla_projector(&self, cap_qubits: usize) -> Result<CMat> {
        let n = self.total_qubits();
        if n > cap_qubits {
            return Err(Error::SizeCap {
                needed: n,
                cap: cap_qubits,
            });
        }
        let dim = 1usize << n;
        let wdim = 1usize << self.witness_qubits;
        let mut p = CMat::zeros(dim, dim);
        for j in 0..wdim {
            p[(j, j)] = linalg::ONE;
        }
        Ok(p)
    }

    /// True when every witness is accepted with probability exactly 0 or 1,
    /// equivalently when the acceptance operator is a projector.
    pub fn check_exact(&self, cap_qubits: usize, tolerance: f64) -> Result<bool> {
        let a = self.acceptance_operator(cap_qubits)?;
        Ok(linalg::projector_deviation(&a) <= tolerance)
    }

    /// Whether some witness is accepted with probability at least
    /// `a - 1e-9`, together with a maximizing eigenvector.
    pub fn check_total(&self, a: f64, cap_qubits: usize) -> Result<(bool, StateVector)> {
        let op = self.acceptance_operator(cap_qubits)?;
        let (values, vectors) = linalg::eigh(&op)?;
        let top = values.len() - 1;
        let witness =
            StateVector::from_column(self.witness_qubits, &vectors.column(top).into_owned())?;
        Ok((values[top] >= a - tol::EQUALITY, witness))
    }

    /// A procedure is gapped for bounds (a, b) when no acceptance
    /// eigenvalue falls strictly between them.
    pub fn check_gapped(
        &self,
        bounds: &BoundsPair,
        cap_qubits: usize,
        tolerance: f64,
    ) -> Result<bool> {
        let a = self.acceptance_operator(cap_qubits)?;
        let (values, _) = linalg::eigh(&a)?;
        let hi = bounds.a_f64();
        let lo = bounds.b_f64();
        Ok(values
            .iter()
            .all(|&p| p >= hi - tolerance || p <= lo + tolerance))
    }

    /// Classifies a witness against the promise bounds.
    pub fn relation_membership(
        &self,
        witness: &StateVector,
        bounds: &BoundsPair,
    ) -> Result<(Membership, f64)> {
        let p = self.acceptance_probability(witness)?;
        let m = if p >= bounds.a_f64() - tol::EQUALITY {
            Membership::Accepted
        } else if p <= bounds.b_f64() + tol::EQUALITY {
            Membership::Rejected
        } else {
            Membership::Inconclusive
        };
        Ok((m, p))
    }

    /// Builds a procedure whose acceptance operator is diagonal with the
    /// given eigenvalues: each witness basis state controls a rotation of
    /// the accept ancilla. Multiplicities must fill the witness space, so
    /// their sum is required to be a power of two.
    pub fn synthesize_with_spectrum(spectrum: &[(f64, usize)]) -> Result<VerificationProcedure> {
        let total: usize = spectrum.iter().map(|(_, mult)| mult).sum();
        if total < 2 || !total.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "multiplicities sum to {total}; need a power of two of at least 2"
            )));
        }
        for &(p, _) in spectrum {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("eigenvalue {p} outside [0, 1]")));
            }
        }
        let m = total.trailing_zeros() as usize;
        let mut proc = VerificationProcedure::new(m, 1, m)?;
        proc.set_input_label("synthetic diagonal spectrum");
        let mut index = 0usize;
        for &(p, mult) in spectrum {
            for _ in 0..mult {
                let theta = 2.0 * p.sqrt().asin();
                if theta != 0.0 {
                    let controls: Vec<(usize, bool)> =
                        (0..m).map(|q| (q, index & (1 << q) != 0)).collect();
                    let matrix = linalg::rotation_y(theta);
                    proc.push_gate(GateOp::controlled(controls, vec![m], matrix)?)?;
                }
                index += 1;
            }
        }
        Ok(proc)
    }
}

/// Promise thresholds held as exact rationals so derived bounds stay exact
/// under composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsPair {
    a: Ratio<i64>,
    b: Ratio<i64>,
}

impl BoundsPair {
    /// Requires 0 <= b < a <= 1.
    pub fn new(a: Ratio<i64>, b: Ratio<i64>) -> Result<BoundsPair> {
        if b.is_negative() || a > Ratio::one() || a <= b {
            return Err(Error::Parameter(format!(
                "bounds ({a}, {b}) must satisfy 0 <= b < a <= 1"
            )));
        }
        Ok(BoundsPair { a, b })
    }

    /// Parses "2/3", "1", or a decimal such as "0.25" into an exact ratio.
    pub fn parse_ratio(text: &str) -> Result<Ratio<i64>> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
            let den: i64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
            if den == 0 {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            return Ok(Ratio::new(num, den));
        }
        if let Some((whole, frac)) = text.split_once('.') {
            let negative = whole.starts_with('-');
            let digits = whole.trim_start_matches(['-', '+']);
            let whole_mag: i64 = if digits.is_empty() {
                0
            } else {
                digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad decimal in {text:?}")))?
            };
            if frac.is_empty() || frac.len() > 15 || frac.chars().any(|c| !c.is_ascii_digit()) {
                return Err(Error::Parse(format!("bad decimal in {text:?}")));
            }
            let scale = 10i64.pow(frac.len() as u32);
            let frac_value: i64 = frac
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {text:?}")))?;
            let magnitude = Ratio::new(whole_mag * scale + frac_value, scale);
            return Ok(if negative { -magnitude } else { magnitude });
        }
        let value: i64 = text
            .parse()
            .map_err(|_| Error::Parse(format!("bad ratio {text:?}")))?;
        Ok(Ratio::from_integer(value))
    }

    pub fn a(&self) -> Ratio<i64> {
        self.a
    }

    pub fn b(&self) -> Ratio<i64> {
        self.b
    }

    pub fn a_f64(&self) -> f64 {
        ratio_to_f64(self.a)
    }

    pub fn b_f64(&self) -> f64 {
        ratio_to_f64(self.b)
    }

    pub fn gap(&self) -> Ratio<i64> {
        self.a - self.b
    }
}

pub(crate) fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Outcome of testing a witness against promise bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Accepted,
    Rejected,
    Inconclusive,
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Membership::Accepted => "accepted",
            Membership::Rejected => "rejected",
            Membership::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// How one subspace sits relative to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Equal,
    SourceInTarget,
    TargetInSource,
    Orthogonal,
    Mixed,
}

/// Relation between the `source`-th and `target`-th subspaces of two
/// families, with the Frobenius defect of the claimed relation.
#[derive(Debug, Clone)]
pub struct SubspaceRelation {
    pub source: usize,
    pub target: usize,
    pub direction: Direction,
    pub defect: f64,
}

/// Classifies every source subspace against every target subspace.
/// Containment of S in T is judged by how far the T-projector moves the
/// S-projector: || P_T P_S - P_S ||.
pub fn subspace_relations(
    sources: &[Vec<CVec>],
    targets: &[Vec<CVec>],
    tolerance: f64,
) -> Vec<SubspaceRelation> {
    let source_projectors: Vec<CMat> = sources.iter().map(|b| linalg::projector_onto(b)).collect();
    let target_projectors: Vec<CMat> = targets.iter().map(|b| linalg::projector_onto(b)).collect();
    let mut relations = Vec::new();
    for (i, ps) in source_projectors.iter().enumerate() {
        for (j, pt) in target_projectors.iter().enumerate() {
            let product = pt * ps;
            let d_st = (&product - ps).norm();
            let d_ts = (ps * pt - pt).norm();
            let overlap = product.norm();
            let (direction, defect) = if d_st <= tolerance && d_ts <= tolerance {
                (Direction::Equal, d_st.max(d_ts))
            } else if d_st <= tolerance {
                (Direction::SourceInTarget, d_st)
            } else if d_ts <= tolerance {
                (Direction::TargetInSource, d_ts)
            } else if overlap <= tolerance {
                (Direction::Orthogonal, overlap)
            } else {
                (Direction::Mixed, d_st.min(d_ts))
            };
            relations.push(SubspaceRelation {
                source: i,
                target: j,
                direction,
                defect,
            });
        }
    }
    relations
}
