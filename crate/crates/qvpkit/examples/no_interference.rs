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

//! Shows that superpositions of acceptance eigenvectors accept like
//! classical mixtures: Pr[accept on sum alpha_i psi_i] equals
//! sum |alpha_i|^2 p_i with no cross terms, which is what makes the
//! eigenbasis of a procedure behave like a set of non-interfering tracks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qvpkit::jordan;
use qvpkit::qvp::VerificationProcedure;
use qvpkit::simcore::StateVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Four-dimensional witness with acceptance eigenvalues 1/4 and 3/4,
    // each two-fold degenerate.
    let proc = VerificationProcedure::synthesize_with_spectrum(&[(0.25, 2), (0.75, 2)])?;
    let report = jordan::spectrum_direct(&proc, proc.total_qubits())?;

    // An equal superposition of one eigenvector from each cluster must
    // accept at the average (1/4 + 3/4) / 2 = 1/2.
    let lo = &report.clusters[0].basis[0];
    let hi = &report.clusters[1].basis[0];
    let mixed = (lo + hi) / 2f64.sqrt();
    let state = StateVector::from_amplitudes_normalized(
        proc.witness_qubits(),
        mixed.iter().copied().collect(),
    )?;
    let p = proc.acceptance_probability(&state)?;
    println!("equal superposition of p = 1/4 and p = 3/4 eigenvectors:");
    println!("  accepts with probability {p:.12} (mixture rule predicts 0.5)");

    // The defect over many random superpositions stays at numerical noise.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let defect = jordan::interference_defect(&proc, &report, 200, &mut rng)?;
    println!("worst mixture-rule deviation over 200 random superpositions: {defect:.3e}");
    Ok(())
}
