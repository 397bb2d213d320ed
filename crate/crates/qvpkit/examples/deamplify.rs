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

//! Weakens a procedure by rerolling its accept bit: with weight z when the
//! original accepts and z' when it rejects. Every acceptance eigenvalue p
//! moves to (z - z') p + z' on an unchanged eigenbasis, so promise bounds
//! (a, b) shrink to (za + z'(1-a), zb + z'(1-b)) exactly.

use num_rational::Ratio;

use qvpkit::qvp::{BoundsPair, VerificationProcedure};
use qvpkit::reductions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let proc = VerificationProcedure::synthesize_with_spectrum(&[
        (1.0 / 6.0, 1),
        (1.0 / 3.0, 1),
        (2.0 / 3.0, 1),
        (1.0, 1),
    ])?;

    // Solve for the weights that carry bounds (2/3, 1/3) to (3/5, 2/5).
    let source = BoundsPair::new(Ratio::new(2, 3), Ratio::new(1, 3))?;
    let target = BoundsPair::new(Ratio::new(3, 5), Ratio::new(2, 5))?;
    let (z, z_prime) = reductions::solve_deamplification(&source, &target)?;
    println!("weights carrying bounds 2/3,1/3 to 3/5,2/5: z = {z}, z' = {z_prime}");

    let (weaker, map) = reductions::deamplify(&proc, z, z_prime)?;
    println!("eigenvalue map: {map}");
    for p in [1.0 / 6.0, 1.0 / 3.0, 2.0 / 3.0, 1.0] {
        println!("  p = {:.6} moves to {:.6}", p, map.apply(p));
    }

    // The built circuit realizes the map pointwise on the same eigenbasis.
    let check = reductions::verify_strong_reduction(&proc, &weaker, &map, weaker.total_qubits())?;
    println!("map monotone: {}", check.monotone);
    println!("largest eigenvalue defect: {:.3e}", check.max_value_defect);
    println!("largest eigenspace containment defect: {:.3e}", check.max_containment_defect);
    println!("reduction verified: {}", check.ok);
    Ok(())
}
