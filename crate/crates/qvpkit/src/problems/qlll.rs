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

//! Ground-energy verification through phase estimation.
//!
//! For an instance with mean Hamiltonian H (eigenvalues in [0, 1]) the
//! verifier runs phase estimation of U = exp(i pi H) on the witness register
//! and accepts when the estimate reads zero. A zero-energy eigenstate is
//! accepted with certainty; an eigenstate of energy E is accepted with the
//! closed-form readout probability [`acceptance_for_energy`], which drops
//! below one half as soon as E clears twice the estimator resolution.
//!
//! Frustration-free instances with a counting guarantee come from
//! [`random_sparse_projector_instance`]: rank-1 projectors on qubit pairs
//! leave a nonzero kernel whenever their expanded ranks sum below the full
//! dimension.

use rand::Rng;

use crate::linalg::{self, eigh, CMat, C64};
use crate::problems::hamiltonian::{HamiltonianInstance, HamiltonianTerm};
use crate::qvp::VerificationProcedure;
use crate::simcore::{phase_estimate_distribution, qft, GateOp};
use crate::{tol, Error, Result};

/// Eigenvalues of the mean Hamiltonian, clustered at the equality tolerance,
/// ascending with multiplicities.
pub fn energy_levels(instance: &HamiltonianInstance) -> Result<Vec<(f64, usize)>> {
    let (vals, _) = eigh(&instance.mean_hamiltonian())?;
    Ok(linalg::cluster_values(&vals, tol::CLUSTER)
        .into_iter()
        .map(|(v, members)| (v, members.len()))
        .collect())
}

/// Smallest eigenvalue of the mean Hamiltonian.
pub fn ground_energy(instance: &HamiltonianInstance) -> Result<f64> {
    Ok(energy_levels(instance)?[0].0)
}

/// Probability that phase estimation with `bits` bits reads zero on an
/// eigenstate of energy `energy`, i.e. that the verifier accepts it.
pub fn acceptance_for_energy(energy: f64, bits: usize) -> f64 {
    phase_estimate_distribution(energy / 2.0, bits)[0]
}

/// U^power for U = exp(i pi H), computed spectrally.
fn spectral_power(energies: &[f64], basis: &CMat, power: u64) -> CMat {
    let dim = basis.nrows();
    let mut diag = CMat::zeros(dim, dim);
    for (k, e) in energies.iter().enumerate() {
        diag[(k, k)] = C64::from_polar(1.0, std::f64::consts::PI * e * power as f64);
    }
    basis * diag * basis.adjoint()
}

/// Phase-estimation verifier for the ground energy of an instance.
///
/// Witness: the `n`-qubit register. Ancillas: a `bits`-wide estimate
/// register and the accept qubit. The circuit Hadamards the estimate bits,
/// applies exact controlled powers U^{2^j} of U = exp(i pi H), undoes the
/// Fourier transform and accepts on the all-zero readout. Energies must lie
/// in [0, 1] so that eigenphases stay within half a turn.
pub fn build_phase_estimation_procedure(
    instance: &HamiltonianInstance,
    bits: usize,
) -> Result<VerificationProcedure> {
    if bits == 0 || bits >= 16 {
        return Err(Error::Parameter(format!(
            "estimate register of {bits} bits is unsupported"
        )));
    }
    let n = instance.n();
    let (energies, basis) = eigh(&instance.mean_hamiltonian())?;
    if energies[0] < -tol::EQUALITY || energies[energies.len() - 1] > 1.0 + tol::EQUALITY {
        return Err(Error::Parameter(format!(
            "energies [{}, {}] leave the unit interval; eigenphases would alias",
            energies[0],
            energies[energies.len() - 1]
        )));
    }
    let estimate: Vec<usize> = (n..n + bits).collect();
    let accept = n + bits;
    let mut proc = VerificationProcedure::new(n, bits + 1, accept)?;
    for &q in &estimate {
        proc.push_gate(GateOp::hadamard(q))?;
    }
    let targets: Vec<usize> = (0..n).collect();
    for (j, &q) in estimate.iter().enumerate() {
        let power = spectral_power(&energies, &basis, 1u64 << j);
        proc.push_gate(GateOp::controlled(
            vec![(q, true)],
            targets.clone(),
            power,
        )?)?;
    }
    for op in qft(&estimate)?.iter().rev() {
        proc.push_gate(op.adjoint())?;
    }
    let table: Vec<bool> = (0..1usize << bits).map(|p| p == 0).collect();
    proc.push_gate(GateOp::predicate_flip(estimate, accept, table)?)?;
    proc.set_input_label(format!("phase-estimation[n={n}, bits={bits}]"));
    Ok(proc)
}

/// Random frustration-free instance: `num_terms` rank-1 projectors on random
/// qubit pairs. Each expanded term has rank `2^(n-2)`, so any number below
/// four leaves the kernel nonzero by counting; the ground energy is verified
/// to vanish and the draw is retried otherwise.
pub fn random_sparse_projector_instance<R: Rng>(
    n: usize,
    num_terms: usize,
    rng: &mut R,
) -> Result<HamiltonianInstance> {
    if n < 2 {
        return Err(Error::Parameter("need at least two qubits".into()));
    }
    for _ in 0..200 {
        let mut terms = Vec::with_capacity(num_terms);
        for _ in 0..num_terms {
            let i = rng.gen_range(0..n);
            let j = loop {
                let j = rng.gen_range(0..n);
                if j != i {
                    break j;
                }
            };
            let v = linalg::haar_state(4, rng);
            let p = linalg::projector_onto(&[v]);
            terms.push(HamiltonianTerm::new(vec![i, j], p)?);
        }
        let instance = HamiltonianInstance::new(n, terms)?;
        if ground_energy(&instance)?.abs() <= tol::EQUALITY {
            return Ok(instance);
        }
    }
    Err(Error::InternalCheck(
        "no frustration-free draw in 200 attempts".into(),
    ))
}
