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

//! Computes the acceptance spectrum of a random procedure along both
//! available routes (the two-projector block decomposition and the dense
//! acceptance operator) and crosschecks that values, multiplicities, and
//! eigenspaces agree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qvpkit::jordan;
use qvpkit::linalg;
use qvpkit::qvp::VerificationProcedure;
use qvpkit::simcore::GateOp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // Two witness qubits, two ancillas, accept on the last ancilla.
    let mut proc = VerificationProcedure::new(2, 2, 3)?;
    for _ in 0..6 {
        let q = rng.gen_range(0..4);
        proc.push_gate(GateOp::unitary(vec![q], linalg::haar_unitary(2, &mut rng))?)?;
        let control = rng.gen_range(0..4);
        if control != q {
            proc.push_gate(GateOp::controlled(
                vec![(control, rng.gen_bool(0.5))],
                vec![q],
                linalg::haar_unitary(2, &mut rng),
            )?)?;
        }
    }

    let check = jordan::crosscheck_uniqueness(&proc, proc.total_qubits())?;
    println!("acceptance spectrum via invariant blocks:");
    for cluster in &check.jordan.clusters {
        println!("  p = {:.12}  multiplicity {}", cluster.p, cluster.multiplicity);
    }
    println!("acceptance spectrum via the dense operator:");
    for cluster in &check.direct.clusters {
        println!("  p = {:.12}  multiplicity {}", cluster.p, cluster.multiplicity);
    }
    println!("largest eigenvalue gap between routes: {:.3e}", check.max_value_gap);
    println!("largest eigenspace defect between routes: {:.3e}", check.max_basis_defect);
    println!("routes consistent: {}", check.consistent);
    Ok(())
}
