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

//! Local Hamiltonian instances and the verification procedures built on them.
//!
//! An instance is a list of Hermitian terms, each acting on a few qubits of an
//! `n`-qubit register. Three verifiers are derived from an instance:
//!
//! * [`build_qsat_procedure`]: accepts a satisfying assignment of a
//!   projector instance, or a degenerate pair presented as an antisymmetric
//!   two-register superposition.
//! * [`build_near_degeneracy_procedure`]: accepts an antisymmetric pair of
//!   eigenstates whose mean energies differ by at most `2^-n`.
//! * [`build_multicopy_procedure`]: accepts three registers that carry the
//!   same joint eigenvalue tuple.
//!
//! For pairwise commuting instances the accepting eigenspaces have closed-form
//! dimensions ([`qsat_accepting_dimension`], [`multicopy_accepting_dimension`])
//! that the spectral routes can be checked against.

use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::Signed;
use rand::Rng;

use crate::linalg::{
    self, commutator_norm, eigh, haar_unitary, kron, projector_deviation, CMat, CVec, C64, ONE,
    ZERO,
};
use crate::qvp::VerificationProcedure;
use crate::simcore::GateOp;
use crate::{tol, Error, Result};

/// One Hermitian term of an instance, acting on `support` qubits.
///
/// Bit `j` of the term matrix corresponds to qubit `support[j]` of the
/// register. Rational eigenvalues, when attached, list the distinct
/// eigenvalues in ascending order and are validated against the numerical
/// eigensystem.
#[derive(Debug, Clone)]
pub struct HamiltonianTerm {
    support: Vec<usize>,
    matrix: CMat,
    rational_values: Option<Vec<Ratio<i64>>>,
}

/// Distinct eigenvalues of a term with their eigenprojectors on the support
/// space, ascending by value.
#[derive(Debug, Clone)]
pub struct TermEigensystem {
    pub values: Vec<f64>,
    pub projectors: Vec<CMat>,
}

impl TermEigensystem {
    /// Number of ancilla bits needed to hold an eigenvalue index.
    pub fn index_bits(&self) -> usize {
        let len = self.values.len().max(1);
        (len.next_power_of_two().trailing_zeros() as usize).max(1)
    }
}

impl HamiltonianTerm {
    pub fn new(support: Vec<usize>, matrix: CMat) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Parameter("term support must be nonempty".into()));
        }
        for (i, q) in support.iter().enumerate() {
            if support[..i].contains(q) {
                return Err(Error::Parameter(format!("duplicate support qubit {q}")));
            }
        }
        let dim = 1usize << support.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension(format!(
                "term matrix is {}x{}, support of {} qubits needs {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols(),
                support.len()
            )));
        }
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > tol::CONSTRUCTION {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self { support, matrix, rational_values: None })
    }

    /// Attaches the distinct eigenvalues as exact rationals, ascending.
    pub fn with_rational_values(mut self, values: Vec<Ratio<i64>>) -> Result<Self> {
        let sys = self.eigensystem()?;
        if values.len() != sys.values.len() {
            return Err(Error::Parameter(format!(
                "{} rational eigenvalues given, term has {} distinct",
                values.len(),
                sys.values.len()
            )));
        }
        for (r, v) in values.iter().zip(&sys.values) {
            let approx = *r.numer() as f64 / *r.denom() as f64;
            if (approx - v).abs() > tol::EQUALITY {
                return Err(Error::Parameter(format!(
                    "rational eigenvalue {r} does not match computed value {v}"
                )));
            }
        }
        self.rational_values = Some(values);
        Ok(self)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn rational_values(&self) -> Option<&[Ratio<i64>]> {
        self.rational_values.as_deref()
    }

    /// Distinct eigenvalues and eigenprojectors, clustered at the equality
    /// tolerance.
    pub fn eigensystem(&self) -> Result<TermEigensystem> {
        let (vals, vecs) = eigh(&self.matrix)?;
        let mut values = Vec::new();
        let mut projectors = Vec::new();
        for (mean, members) in linalg::cluster_values(&vals, tol::EQUALITY) {
            let cols: Vec<CVec> = members.iter().map(|&i| vecs.column(i).into_owned()).collect();
            values.push(mean);
            projectors.push(linalg::projector_onto(&cols));
        }
        Ok(TermEigensystem { values, projectors })
    }

    pub fn is_projector(&self) -> bool {
        projector_deviation(&self.matrix) <= tol::EQUALITY
    }
}

/// A list of terms on an `n`-qubit register.
#[derive(Debug, Clone)]
pub struct HamiltonianInstance {
    n: usize,
    terms: Vec<HamiltonianTerm>,
}

/// A joint eigenspace of a pairwise commuting instance.
///
/// `indices[a]` selects a distinct eigenvalue of term `a`; `energy` is the
/// mean of the selected values and `basis` spans the eigenspace.
#[derive(Debug, Clone)]
pub struct JointCluster {
    pub indices: Vec<usize>,
    pub energy: f64,
    pub basis: Vec<CVec>,
}

impl JointCluster {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

impl HamiltonianInstance {
    pub fn new(n: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("instance needs at least one qubit".into()));
        }
        if terms.is_empty() {
            return Err(Error::Parameter("instance needs at least one term".into()));
        }
        for term in &terms {
            if let Some(&q) = term.support.iter().find(|&&q| q >= n) {
                return Err(Error::QubitRange(format!(
                    "term support qubit {q} outside register of {n}"
                )));
            }
        }
        Ok(Self { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// The term embedded in the full `2^n` register space.
    pub fn expanded_term(&self, index: usize) -> CMat {
        embed_on_support(&self.terms[index].matrix, &self.terms[index].support, self.n)
    }

    /// Mean of the expanded terms. Eigenvalues stay in `[0, 1]` whenever each
    /// term's do.
    pub fn mean_hamiltonian(&self) -> CMat {
        let dim = 1usize << self.n;
        let mut sum = CMat::zeros(dim, dim);
        for a in 0..self.terms.len() {
            sum += self.expanded_term(a);
        }
        &sum * C64::new(1.0 / self.terms.len() as f64, 0.0)
    }

    /// Errors unless all pairs of expanded terms commute.
    pub fn ensure_commuting(&self) -> Result<()> {
        let expanded: Vec<CMat> = (0..self.terms.len()).map(|a| self.expanded_term(a)).collect();
        for i in 0..expanded.len() {
            for j in i + 1..expanded.len() {
                let dev = commutator_norm(&expanded[i], &expanded[j]);
                if dev > tol::EQUALITY {
                    return Err(Error::NotCommuting { deviation: dev });
                }
            }
        }
        Ok(())
    }

    /// Simultaneous eigenspaces of a commuting instance, refined term by term
    /// and ordered lexically by index tuple.
    pub fn joint_clusters(&self) -> Result<Vec<JointCluster>> {
        self.ensure_commuting()?;
        let dim = 1usize << self.n;
        let systems: Vec<TermEigensystem> =
            self.terms.iter().map(|t| t.eigensystem()).collect::<Result<_>>()?;
        let identity: Vec<CVec> = (0..dim)
            .map(|i| {
                let mut v = CVec::zeros(dim);
                v[i] = ONE;
                v
            })
            .collect();
        let mut clusters = vec![JointCluster { indices: Vec::new(), energy: 0.0, basis: identity }];
        for (a, sys) in systems.iter().enumerate() {
            let dense = self.expanded_term(a);
            let mut next = Vec::new();
            for cl in &clusters {
                let b = DMatrix::from_columns(&cl.basis);
                let compressed = b.adjoint() * &dense * &b;
                let (vals, vecs) = eigh(&compressed)?;
                for (mean, members) in linalg::cluster_values(&vals, tol::CLUSTER) {
                    let index = sys
                        .values
                        .iter()
                        .position(|v| (v - mean).abs() <= tol::CROSSCHECK)
                        .ok_or_else(|| {
                            Error::InternalCheck(format!(
                                "joint eigenvalue {mean} matches no distinct value of term {a}"
                            ))
                        })?;
                    let lifted: Vec<CVec> =
                        members.iter().map(|&i| &b * vecs.column(i).into_owned()).collect();
                    let mut indices = cl.indices.clone();
                    indices.push(index);
                    next.push(JointCluster { indices, energy: 0.0, basis: lifted });
                }
            }
            clusters = next;
        }
        for cl in &mut clusters {
            cl.energy = cl
                .indices
                .iter()
                .zip(&systems)
                .map(|(&i, sys)| sys.values[i])
                .sum::<f64>()
                / self.terms.len() as f64;
        }
        clusters.sort_by(|a, b| a.indices.cmp(&b.indices));
        let total: usize = clusters.iter().map(|c| c.dimension()).sum();
        if total != dim {
            return Err(Error::InternalCheck(format!(
                "joint clusters span {total} of {dim} dimensions"
            )));
        }
        Ok(clusters)
    }

    /// Mean energy of an index tuple as an exact rational, when every term
    /// carries rational eigenvalues.
    pub fn exact_energy(&self, indices: &[usize]) -> Option<Ratio<i64>> {
        let mut sum = Ratio::new(0, 1);
        for (term, &i) in self.terms.iter().zip(indices) {
            sum += *term.rational_values.as_ref()?.get(i)?;
        }
        Some(sum / Ratio::new(self.terms.len() as i64, 1))
    }
}

/// Places `matrix` (indexed by `support` bit order) in the full `n`-qubit
/// space.
pub fn embed_on_support(matrix: &CMat, support: &[usize], n: usize) -> CMat {
    let dim = 1usize << n;
    let mut mask = 0usize;
    for &q in support {
        mask |= 1 << q;
    }
    let rest = !mask & (dim - 1);
    let gather = |x: usize| -> usize {
        let mut g = 0;
        for (j, &q) in support.iter().enumerate() {
            g |= ((x >> q) & 1) << j;
        }
        g
    };
    CMat::from_fn(dim, dim, |x, y| {
        if x & rest != y & rest {
            ZERO
        } else {
            matrix[(gather(x), gather(y))]
        }
    })
}

/// How an eigenvalue index is folded into an ancilla block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RecordStyle {
    /// XOR the index into the block. Self-inverse, so applying it for two
    /// registers in turn leaves the difference pattern.
    Xor,
    /// Add the index modulo the block size.
    Add,
    /// Subtract the index modulo the block size.
    Sub,
}

/// Unitary on (support + block) that folds the term's eigenvalue index into
/// the block: sum over i of perm_i (x) P_i with the block on the high bits.
fn index_record_matrix(sys: &TermEigensystem, bits: usize, style: RecordStyle) -> Result<CMat> {
    let bdim = 1usize << bits;
    if sys.values.len() > bdim {
        return Err(Error::Dimension(format!(
            "{} distinct eigenvalues exceed a {bits}-bit block",
            sys.values.len()
        )));
    }
    let sdim = sys.projectors[0].nrows();
    let mut out = CMat::zeros(bdim * sdim, bdim * sdim);
    for (i, p) in sys.projectors.iter().enumerate() {
        let mut perm = CMat::zeros(bdim, bdim);
        for x in 0..bdim {
            let y = match style {
                RecordStyle::Xor => x ^ i,
                RecordStyle::Add => (x + i) % bdim,
                RecordStyle::Sub => (x + bdim - i % bdim) % bdim,
            };
            perm[(y, x)] = ONE;
        }
        out += kron(&perm, p);
    }
    Ok(out)
}

/// Unitary on (support + one bit) that flips the bit on the eigenvalue-1
/// subspace of a projector term.
fn value_flip_matrix(sys: &TermEigensystem) -> Result<CMat> {
    let sdim = sys.projectors[0].nrows();
    let x = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let id = CMat::identity(2, 2);
    let mut out = CMat::zeros(2 * sdim, 2 * sdim);
    for (v, p) in sys.values.iter().zip(&sys.projectors) {
        if (v - 0.0).abs() > tol::EQUALITY && (v - 1.0).abs() > tol::EQUALITY {
            return Err(Error::Parameter(format!(
                "term eigenvalue {v} is not 0 or 1; QSAT terms must be projectors"
            )));
        }
        let flip = if *v > 0.5 { &x } else { &id };
        out += kron(flip, p);
    }
    Ok(out)
}

fn map_support(term: &HamiltonianTerm, offset: usize) -> Vec<usize> {
    term.support.iter().map(|&q| offset + q).collect()
}

/// QSAT verifier for a projector instance.
///
/// Witness: a flag qubit, then two `n`-qubit registers. With the flag clear
/// the first register must sit in the kernel of every term and the second is
/// ignored. With the flag set, each term's violation bit is recorded for both
/// registers into the same ancilla (leaving their XOR), a controlled swap
/// test runs between the registers, and acceptance demands matching
/// violation patterns plus the antisymmetric swap outcome.
pub fn build_qsat_procedure(instance: &HamiltonianInstance) -> Result<VerificationProcedure> {
    let n = instance.n;
    let t = instance.terms.len();
    let m = 2 * n + 1;
    let sw = m + t;
    let accept = m + t + 1;
    let mut proc = VerificationProcedure::new(m, t + 2, accept)?;
    let mut flips = Vec::with_capacity(t);
    for term in &instance.terms {
        flips.push(value_flip_matrix(&term.eigensystem()?)?);
    }
    for (a, term) in instance.terms.iter().enumerate() {
        let mut targets = map_support(term, 1);
        targets.push(m + a);
        proc.push_gate(GateOp::unitary(targets, flips[a].clone())?)?;
    }
    for (a, term) in instance.terms.iter().enumerate() {
        let mut targets = map_support(term, 1 + n);
        targets.push(m + a);
        proc.push_gate(GateOp::controlled(vec![(0, true)], targets, flips[a].clone())?)?;
    }
    proc.push_gate(GateOp::hadamard(sw))?;
    for i in 0..n {
        proc.push_gate(GateOp::controlled(
            vec![(0, true), (sw, true)],
            vec![1 + i, 1 + n + i],
            linalg::swap_block(),
        )?)?;
    }
    proc.push_gate(GateOp::hadamard(sw))?;
    let mut controls = vec![0];
    controls.extend(m..m + t);
    controls.push(sw);
    let table: Vec<bool> = (0..1usize << (t + 2))
        .map(|pattern| {
            let flag = pattern & 1 == 1;
            let anc = (pattern >> 1) & ((1 << t) - 1);
            let swapped = (pattern >> (t + 1)) & 1 == 1;
            anc == 0 && (!flag || swapped)
        })
        .collect();
    proc.push_gate(GateOp::predicate_flip(controls, accept, table)?)?;
    proc.set_input_label(format!("qsat[n={n}, terms={t}]"));
    Ok(proc)
}

/// Dimension of the accept-with-certainty eigenspace of the QSAT verifier on
/// a commuting projector instance: `2^n` per satisfying dimension plus one
/// per antisymmetric pair inside each joint cluster.
pub fn qsat_accepting_dimension(instance: &HamiltonianInstance) -> Result<usize> {
    let systems: Vec<TermEigensystem> =
        instance.terms.iter().map(|t| t.eigensystem()).collect::<Result<_>>()?;
    let clusters = instance.joint_clusters()?;
    let mut total = 0usize;
    for cl in &clusters {
        let d = cl.dimension();
        let satisfied = cl
            .indices
            .iter()
            .zip(&systems)
            .all(|(&i, sys)| sys.values[i] < 0.5);
        if satisfied {
            total += d << instance.n;
        }
        total += d * (d - 1) / 2;
    }
    Ok(total)
}

/// Brute-force projector onto the accept-with-certainty witness subspace of
/// the QSAT verifier, assembled directly from the joint clusters: flag clear
/// with a satisfying first register and arbitrary second register, or flag
/// set with an antisymmetric pair inside one cluster.
pub fn qsat_accepting_projector(instance: &HamiltonianInstance) -> Result<CMat> {
    let n = instance.n;
    let systems: Vec<TermEigensystem> =
        instance.terms.iter().map(|t| t.eigensystem()).collect::<Result<_>>()?;
    let clusters = instance.joint_clusters()?;
    let dim = 1usize << (2 * n + 1);
    let rdim = 1usize << n;
    let mut basis: Vec<CVec> = Vec::new();
    for cl in &clusters {
        let satisfied = cl
            .indices
            .iter()
            .zip(&systems)
            .all(|(&i, sys)| sys.values[i] < 0.5);
        if satisfied {
            for psi in &cl.basis {
                for j in 0..rdim {
                    let mut v = CVec::zeros(dim);
                    for x in 0..rdim {
                        v[(x << 1) | (j << (n + 1))] = psi[x];
                    }
                    basis.push(v);
                }
            }
        }
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for i in 0..cl.basis.len() {
            for j in i + 1..cl.basis.len() {
                let mut v = CVec::zeros(dim);
                for x1 in 0..rdim {
                    for x2 in 0..rdim {
                        let idx = 1 | (x1 << 1) | (x2 << (n + 1));
                        v[idx] = s
                            * (cl.basis[i][x1] * cl.basis[j][x2]
                                - cl.basis[j][x1] * cl.basis[i][x2]);
                    }
                }
                basis.push(v);
            }
        }
    }
    if basis.is_empty() {
        return Ok(CMat::zeros(dim, dim));
    }
    Ok(linalg::projector_onto(&basis))
}

/// Near-degeneracy verifier.
///
/// Witness: two `n`-qubit registers. A swap test runs first; eigenvalue
/// indices of every term are then recorded per register into ancilla blocks.
/// Acceptance demands the antisymmetric swap outcome together with mean
/// energies, compared exactly in rationals, at most `2^-n` apart. Every term
/// must carry rational eigenvalues.
pub fn build_near_degeneracy_procedure(
    instance: &HamiltonianInstance,
) -> Result<VerificationProcedure> {
    instance.ensure_commuting()?;
    let n = instance.n;
    let t = instance.terms.len();
    let systems: Vec<TermEigensystem> =
        instance.terms.iter().map(|term| term.eigensystem()).collect::<Result<_>>()?;
    let rationals: Vec<&[Ratio<i64>]> = instance
        .terms
        .iter()
        .map(|term| {
            term.rational_values().ok_or_else(|| {
                Error::Parameter("near-degeneracy terms need rational eigenvalues".into())
            })
        })
        .collect::<Result<_>>()?;
    let bits: Vec<usize> = systems.iter().map(|s| s.index_bits()).collect();
    let block_total: usize = bits.iter().sum();
    let m = 2 * n;
    let sw = m;
    let accept = m + 1 + 2 * block_total;
    let mut proc = VerificationProcedure::new(m, 2 + 2 * block_total, accept)?;
    proc.push_gate(GateOp::hadamard(sw))?;
    for i in 0..n {
        proc.push_gate(GateOp::controlled_swap(sw, i, n + i)?)?;
    }
    proc.push_gate(GateOp::hadamard(sw))?;
    let mut cursor = m + 1;
    let mut blocks = Vec::new();
    for r in 0..2 {
        for (a, term) in instance.terms.iter().enumerate() {
            let block: Vec<usize> = (cursor..cursor + bits[a]).collect();
            cursor += bits[a];
            let mut targets = map_support(term, r * n);
            targets.extend(&block);
            let matrix = index_record_matrix(&systems[a], bits[a], RecordStyle::Xor)?;
            proc.push_gate(GateOp::unitary(targets, matrix)?)?;
            blocks.push(block);
        }
    }
    let mut controls = vec![sw];
    for block in &blocks {
        controls.extend(block);
    }
    let threshold = Ratio::new(1i64, 1i64 << n);
    let width = 1 + 2 * block_total;
    let table: Vec<bool> = (0..1usize << width)
        .map(|pattern| {
            if pattern & 1 == 0 {
                return false;
            }
            let mut shift = 1;
            let mut energies = Vec::with_capacity(2);
            for _ in 0..2 {
                let mut sum = Ratio::new(0i64, 1);
                for a in 0..t {
                    let idx = (pattern >> shift) & ((1 << bits[a]) - 1);
                    shift += bits[a];
                    match rationals[a].get(idx) {
                        Some(v) => sum += *v,
                        None => return false,
                    }
                }
                energies.push(sum / Ratio::new(t as i64, 1));
            }
            (energies[0] - energies[1]).abs() <= threshold
        })
        .collect();
    proc.push_gate(GateOp::predicate_flip(controls, accept, table)?)?;
    proc.set_input_label(format!("near-degeneracy[n={n}, terms={t}]"));
    Ok(proc)
}

/// Pairs of joint clusters whose exact mean energies differ by at most
/// `2^-n`, including equal-energy pairs of distinct clusters.
pub fn near_degenerate_pairs(instance: &HamiltonianInstance) -> Result<Vec<(usize, usize)>> {
    let clusters = instance.joint_clusters()?;
    let threshold = Ratio::new(1i64, 1i64 << instance.n);
    let mut pairs = Vec::new();
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            let close = match (
                instance.exact_energy(&clusters[i].indices),
                instance.exact_energy(&clusters[j].indices),
            ) {
                (Some(a), Some(b)) => (a - b).abs() <= threshold,
                _ => {
                    (clusters[i].energy - clusters[j].energy).abs()
                        <= *threshold.numer() as f64 / *threshold.denom() as f64 + tol::EQUALITY
                }
            };
            if close {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// Multi-copy equality verifier.
///
/// Witness: three `n`-qubit registers. For both consecutive register pairs
/// each term's eigenvalue index is added from the left register and
/// subtracted from the right one in a shared block, so the block reads zero
/// exactly when the indices agree. Acceptance demands every block clear.
pub fn build_multicopy_procedure(
    instance: &HamiltonianInstance,
) -> Result<VerificationProcedure> {
    let n = instance.n;
    let t = instance.terms.len();
    let systems: Vec<TermEigensystem> =
        instance.terms.iter().map(|term| term.eigensystem()).collect::<Result<_>>()?;
    let bits: Vec<usize> = systems.iter().map(|s| s.index_bits()).collect();
    let block_total: usize = bits.iter().sum();
    let m = 3 * n;
    let accept = m + 2 * block_total;
    let mut proc = VerificationProcedure::new(m, 2 * block_total + 1, accept)?;
    let mut cursor = m;
    let mut block_bits = Vec::new();
    for pair in 0..2 {
        for (a, term) in instance.terms.iter().enumerate() {
            let block: Vec<usize> = (cursor..cursor + bits[a]).collect();
            cursor += bits[a];
            let add = index_record_matrix(&systems[a], bits[a], RecordStyle::Add)?;
            let sub = index_record_matrix(&systems[a], bits[a], RecordStyle::Sub)?;
            let mut left = map_support(term, pair * n);
            left.extend(&block);
            proc.push_gate(GateOp::unitary(left, add)?)?;
            let mut right = map_support(term, (pair + 1) * n);
            right.extend(&block);
            proc.push_gate(GateOp::unitary(right, sub)?)?;
            block_bits.extend(block);
        }
    }
    let table: Vec<bool> = (0..1usize << block_bits.len()).map(|p| p == 0).collect();
    proc.push_gate(GateOp::predicate_flip(block_bits, accept, table)?)?;
    proc.set_input_label(format!("multicopy[n={n}, terms={t}]"));
    Ok(proc)
}

/// Dimension of the accept-with-certainty eigenspace of the multi-copy
/// verifier on a commuting instance: the sum of cubed cluster dimensions.
pub fn multicopy_accepting_dimension(instance: &HamiltonianInstance) -> Result<usize> {
    Ok(instance
        .joint_clusters()?
        .iter()
        .map(|c| c.dimension().pow(3))
        .sum())
}

/// Random pairwise commuting projector instance: every term is diagonal in a
/// shared random product frame, with a random nonempty proper marked set on
/// two random support qubits.
pub fn random_commuting_projectors<R: Rng>(
    n: usize,
    num_terms: usize,
    rng: &mut R,
) -> Result<HamiltonianInstance> {
    if n < 2 {
        return Err(Error::Parameter("need at least two qubits".into()));
    }
    let frames: Vec<CMat> = (0..n).map(|_| haar_unitary(2, rng)).collect();
    let mut terms = Vec::with_capacity(num_terms);
    for _ in 0..num_terms {
        let i = rng.gen_range(0..n);
        let j = loop {
            let j = rng.gen_range(0..n);
            if j != i {
                break j;
            }
        };
        let marked = rng.gen_range(1usize..15);
        let mut diag = CMat::zeros(4, 4);
        for p in 0..4 {
            if (marked >> p) & 1 == 1 {
                diag[(p, p)] = ONE;
            }
        }
        let frame = kron(&frames[j], &frames[i]);
        let matrix = &frame * diag * frame.adjoint();
        terms.push(HamiltonianTerm::new(vec![i, j], matrix)?);
    }
    HamiltonianInstance::new(n, terms)
}

/// Random commuting instance with rational eigenvalues of denominator
/// `2^n + 1`, regenerated until some pair of joint clusters sits within the
/// near-degeneracy threshold `2^-n`.
pub fn random_near_degenerate_instance<R: Rng>(
    n: usize,
    num_terms: usize,
    rng: &mut R,
) -> Result<HamiltonianInstance> {
    if n < 2 {
        return Err(Error::Parameter("need at least two qubits".into()));
    }
    let den = (1i64 << n) + 1;
    for _ in 0..200 {
        let frames: Vec<CMat> = (0..n).map(|_| haar_unitary(2, rng)).collect();
        let mut terms = Vec::with_capacity(num_terms);
        for _ in 0..num_terms {
            let q = rng.gen_range(0..n);
            let mut numers = [0i64; 2];
            for v in numers.iter_mut() {
                *v = rng.gen_range(0..=den);
            }
            numers.sort_unstable();
            if numers[0] == numers[1] {
                continue;
            }
            let mut diag = CMat::zeros(2, 2);
            diag[(0, 0)] = C64::new(numers[0] as f64 / den as f64, 0.0);
            diag[(1, 1)] = C64::new(numers[1] as f64 / den as f64, 0.0);
            let matrix = &frames[q] * diag * frames[q].adjoint();
            let values = vec![Ratio::new(numers[0], den), Ratio::new(numers[1], den)];
            terms.push(HamiltonianTerm::new(vec![q], matrix)?.with_rational_values(values)?);
        }
        if terms.len() != num_terms {
            continue;
        }
        let instance = HamiltonianInstance::new(n, terms)?;
        if !near_degenerate_pairs(&instance)?.is_empty() {
            return Ok(instance);
        }
    }
    Err(Error::InternalCheck(
        "no near-degenerate instance found in 200 attempts".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan;
    use crate::simcore::StateVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_projector() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE])
    }

    fn spectrum_direct_p1_multiplicity(proc: &VerificationProcedure) -> usize {
        let report = jordan::spectrum_direct(proc, jordan::DENSE_CAP_QUBITS).unwrap();
        report
            .clusters
            .iter()
            .find(|c| (c.p - 1.0).abs() <= 1e-7)
            .map(|c| c.multiplicity)
            .unwrap_or(0)
    }

    #[test]
    fn embedding_matches_kronecker_layout() {
        let x = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let on_high = embed_on_support(&x, &[1], 2);
        let expected = kron(&x, &CMat::identity(2, 2));
        assert!(linalg::frobenius_distance(&on_high, &expected) < 1e-12);
        let on_low = embed_on_support(&x, &[0], 2);
        let expected = kron(&CMat::identity(2, 2), &x);
        assert!(linalg::frobenius_distance(&on_low, &expected) < 1e-12);
    }

    #[test]
    fn joint_clusters_of_diagonal_projectors() {
        let t1 = HamiltonianTerm::new(vec![0], one_projector()).unwrap();
        let t2 = HamiltonianTerm::new(vec![1], one_projector()).unwrap();
        let instance = HamiltonianInstance::new(2, vec![t1, t2]).unwrap();
        let clusters = instance.joint_clusters().unwrap();
        assert_eq!(clusters.len(), 4);
        for cl in &clusters {
            assert_eq!(cl.dimension(), 1);
        }
        let energies: Vec<f64> = clusters.iter().map(|c| c.energy).collect();
        assert!((energies[0] - 0.0).abs() < 1e-12);
        assert!((energies[1] - 0.5).abs() < 1e-12);
        assert!((energies[2] - 0.5).abs() < 1e-12);
        assert!((energies[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noncommuting_terms_are_rejected() {
        let plus = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.5, 0.0),
            ],
        );
        let t1 = HamiltonianTerm::new(vec![0], one_projector()).unwrap();
        let t2 = HamiltonianTerm::new(vec![0], plus).unwrap();
        let instance = HamiltonianInstance::new(1, vec![t1, t2]).unwrap();
        assert!(matches!(
            instance.joint_clusters(),
            Err(Error::NotCommuting { .. })
        ));
    }

    #[test]
    fn qsat_unsatisfiable_fixture_has_multiplicity_two() {
        // Term 1 is the identity (always violated), term 2 marks qubit 1.
        // No satisfying state exists; the accepting space is spanned by the
        // two antisymmetric pairs inside the dimension-2 joint clusters.
        let t1 = HamiltonianTerm::new(vec![0], CMat::identity(2, 2)).unwrap();
        let t2 = HamiltonianTerm::new(vec![1], one_projector()).unwrap();
        let instance = HamiltonianInstance::new(2, vec![t1, t2]).unwrap();
        assert_eq!(qsat_accepting_dimension(&instance).unwrap(), 2);
        let proc = build_qsat_procedure(&instance).unwrap();
        assert_eq!(proc.total_qubits(), 9);
        assert!(proc
            .check_exact(crate::qvp::OPERATOR_CAP_QUBITS, tol::EQUALITY)
            .unwrap());
        assert_eq!(spectrum_direct_p1_multiplicity(&proc), 2);
    }

    #[test]
    fn qsat_satisfiable_fixture_has_multiplicity_four() {
        let t1 = HamiltonianTerm::new(vec![0], one_projector()).unwrap();
        let t2 = HamiltonianTerm::new(vec![1], one_projector()).unwrap();
        let instance = HamiltonianInstance::new(2, vec![t1, t2]).unwrap();
        // One satisfying basis state |00>, four singleton clusters.
        assert_eq!(qsat_accepting_dimension(&instance).unwrap(), 4);
        let proc = build_qsat_procedure(&instance).unwrap();
        assert_eq!(spectrum_direct_p1_multiplicity(&proc), 4);
    }

    #[test]
    fn qsat_antisymmetric_collision_accepts_with_certainty() {
        let t1 = HamiltonianTerm::new(vec![0], CMat::identity(2, 2)).unwrap();
        let t2 = HamiltonianTerm::new(vec![1], one_projector()).unwrap();
        let instance = HamiltonianInstance::new(2, vec![t1, t2]).unwrap();
        let proc = build_qsat_procedure(&instance).unwrap();
        // |00> and |10> share the joint cluster (violated, unmarked); the
        // flagged antisymmetric combination must be accepted outright.
        let s = 1.0 / 2.0f64.sqrt();
        // Witness bits: flag = bit 0, register one = bits 1..3, register
        // two = bits 3..5. Register states a = 0, b = 1 share the cluster.
        let mut amps = vec![ZERO; 32];
        amps[1 | (0 << 1) | (1 << 3)] = C64::new(s, 0.0);
        amps[1 | (1 << 1) | (0 << 3)] = C64::new(-s, 0.0);
        let witness = StateVector::from_amplitudes(5, amps).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!((p - 1.0).abs() < 1e-10, "p = {p}");
        // The symmetric combination is swap-invariant, so the swap outcome
        // never fires and it is rejected outright.
        let mut amps = vec![ZERO; 32];
        amps[1 | (0 << 1) | (1 << 3)] = C64::new(s, 0.0);
        amps[1 | (1 << 1) | (0 << 3)] = C64::new(s, 0.0);
        let witness = StateVector::from_amplitudes(5, amps).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!(p < 1e-10, "p = {p}");
        // A product of the two distinct states passes the swap test half the
        // time.
        let mut amps = vec![ZERO; 32];
        amps[1 | (0 << 1) | (1 << 3)] = ONE;
        let witness = StateVector::from_amplitudes(5, amps).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!((p - 0.5).abs() < 1e-10, "p = {p}");
    }

    #[test]
    fn qsat_brute_force_projector_matches_spectral_route() {
        let t1 = HamiltonianTerm::new(vec![0], one_projector()).unwrap();
        let t2 = HamiltonianTerm::new(vec![1], one_projector()).unwrap();
        let instance = HamiltonianInstance::new(2, vec![t1, t2]).unwrap();
        let proc = build_qsat_procedure(&instance).unwrap();
        let report = jordan::spectrum_direct(&proc, jordan::DENSE_CAP_QUBITS).unwrap();
        let cluster = report
            .clusters
            .iter()
            .find(|c| (c.p - 1.0).abs() <= 1e-7)
            .unwrap();
        let spectral = linalg::projector_onto(&cluster.basis);
        let brute = qsat_accepting_projector(&instance).unwrap();
        assert!(linalg::frobenius_distance(&spectral, &brute) < 1e-7);
    }

    #[test]
    fn random_commuting_instance_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let instance = random_commuting_projectors(2, 2, &mut rng).unwrap();
        instance.ensure_commuting().unwrap();
        let expected = qsat_accepting_dimension(&instance).unwrap();
        let proc = build_qsat_procedure(&instance).unwrap();
        assert_eq!(spectrum_direct_p1_multiplicity(&proc), expected);
    }

    #[test]
    fn near_degeneracy_accepts_close_pair_and_rejects_split_spectrum() {
        // Single two-qubit term with eigenvalues {0, 1/4, 1/2, 3/4}: the
        // threshold 1/4 is met exactly by adjacent clusters.
        let diag = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                C64::new(i as f64 / 4.0, 0.0)
            } else {
                ZERO
            }
        });
        let values: Vec<Ratio<i64>> = (0..4).map(|i| Ratio::new(i, 4)).collect();
        let term = HamiltonianTerm::new(vec![0, 1], diag)
            .unwrap()
            .with_rational_values(values)
            .unwrap();
        let instance = HamiltonianInstance::new(2, vec![term]).unwrap();
        assert_eq!(near_degenerate_pairs(&instance).unwrap().len(), 3);
        let proc = build_near_degeneracy_procedure(&instance).unwrap();
        // Antisymmetric pair of |00> and |01> (energies 0 and 1/4).
        let s = 1.0 / 2.0f64.sqrt();
        let mut amps = vec![ZERO; 16];
        amps[0b0100] = C64::new(s, 0.0);
        amps[0b0001] = C64::new(-s, 0.0);
        let witness = StateVector::from_amplitudes(4, amps).unwrap();
        let p = proc.acceptance_probability(&witness).unwrap();
        assert!((p - 1.0).abs() < 1e-10, "p = {p}");

        // Eigenvalues {0, 1/3, 2/3, 1}: every gap exceeds the threshold, so
        // no witness is accepted with probability above one half.
        let diag = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                C64::new(i as f64 / 3.0, 0.0)
            } else {
                ZERO
            }
        });
        let values: Vec<Ratio<i64>> = (0..4).map(|i| Ratio::new(i, 3)).collect();
        let term = HamiltonianTerm::new(vec![0, 1], diag)
            .unwrap()
            .with_rational_values(values)
            .unwrap();
        let instance = HamiltonianInstance::new(2, vec![term]).unwrap();
        assert!(near_degenerate_pairs(&instance).unwrap().is_empty());
        let proc = build_near_degeneracy_procedure(&instance).unwrap();
        let report = jordan::spectrum_direct(&proc, jordan::DENSE_CAP_QUBITS).unwrap();
        let max_p = report.probabilities().last().copied().unwrap();
        assert!(max_p <= 0.5 + 1e-9, "max acceptance {max_p}");
    }

    #[test]
    fn multicopy_multiplicity_matches_cubed_cluster_sum() {
        let term = HamiltonianTerm::new(vec![0], one_projector()).unwrap();
        let instance = HamiltonianInstance::new(2, vec![term]).unwrap();
        // Two clusters of dimension 2 each: 8 + 8.
        assert_eq!(multicopy_accepting_dimension(&instance).unwrap(), 16);
        let proc = build_multicopy_procedure(&instance).unwrap();
        assert_eq!(proc.total_qubits(), 9);
        assert!(proc
            .check_exact(crate::qvp::OPERATOR_CAP_QUBITS, tol::EQUALITY)
            .unwrap());
        assert_eq!(spectrum_direct_p1_multiplicity(&proc), 16);
    }

    #[test]
    fn random_near_degenerate_generator_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let instance = random_near_degenerate_instance(2, 2, &mut rng).unwrap();
        assert!(!near_degenerate_pairs(&instance).unwrap().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let again = random_near_degenerate_instance(2, 2, &mut rng).unwrap();
        for (a, b) in instance.terms().iter().zip(again.terms()) {
            assert!(linalg::frobenius_distance(a.matrix(), b.matrix()) < 1e-15);
        }
    }
}
