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

//! Sharpens a procedure by repeated non-demolition runs with a majority
//! vote: within each invariant block the agreement bits are independent
//! coin flips at the block's acceptance p, so voting moves p to the
//! binomial tail Pr[Binomial(rounds, p) >= threshold] while (a, b) bounds
//! spread toward (1, 0) exponentially fast.

use num_rational::Ratio;

use qvpkit::qvp::VerificationProcedure;
use qvpkit::reductions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let proc = VerificationProcedure::synthesize_with_spectrum(&[
        (1.0 / 3.0, 2),
        (2.0 / 3.0, 2),
    ])?;

    let rounds = 5;
    let tau = Ratio::new(1, 2);
    let threshold = reductions::amplification_threshold(rounds, tau)?;
    println!("{rounds} rounds, accept on at least {threshold} agreements:");
    for p in [1.0 / 3.0, 2.0 / 3.0] {
        let tail = reductions::binomial_tail(rounds, threshold, p);
        println!("  p = {p:.6} moves to {tail:.6}");
    }

    let (stronger, map) = reductions::amplify(&proc, rounds, tau)?;
    println!("eigenvalue map: {map}");
    println!(
        "circuit grows from {} to {} qubits",
        proc.total_qubits(),
        stronger.total_qubits()
    );

    let check =
        reductions::verify_strong_reduction(&proc, &stronger, &map, stronger.total_qubits())?;
    println!("map monotone: {}", check.monotone);
    println!("largest eigenvalue defect: {:.3e}", check.max_value_defect);
    println!("reduction verified: {}", check.ok);
    Ok(())
}
