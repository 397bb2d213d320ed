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

//! Randomized invariants: the voting tail matches exact rational
//! arithmetic and stays monotone, and deamplification moves every
//! acceptance eigenvalue by the advertised affine map.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use qvpkit::jordan::{self, RouteChoice};
use qvpkit::qvp::VerificationProcedure;
use qvpkit::reductions::{binomial_tail, deamplify};
use qvpkit::tol;

/// Pr[Binomial(rounds, p) >= threshold] summed term by term from exact
/// binomial coefficients, independent of the library's recurrence.
fn exact_tail(rounds: usize, threshold: usize, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let mut total = BigRational::zero();
    for k in threshold..=rounds {
        let mut coeff = BigRational::one();
        for i in 0..k {
            coeff *= BigRational::from(BigInt::from(rounds - i));
            coeff /= BigRational::from(BigInt::from(i + 1));
        }
        total += coeff
            * num_traits::pow(p.clone(), k)
            * num_traits::pow(q.clone(), rounds - k);
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binomial_tail_matches_exact_rational_arithmetic(
        rounds in 1usize..=20,
        threshold_num in 0usize..=20,
        num in 0u32..=64,
    ) {
        let threshold = threshold_num % (rounds + 2);
        let p = BigRational::new(BigInt::from(num), BigInt::from(64));
        let expected = exact_tail(rounds, threshold.min(rounds), &p)
            .to_f64()
            .expect("tail fits in f64");
        let expected = if threshold > rounds { 0.0 } else { expected };
        let got = binomial_tail(rounds, threshold, num as f64 / 64.0);
        prop_assert!(
            (got - expected).abs() <= 1e-12,
            "tail({rounds}, {threshold}, {num}/64) = {got}, exact {expected}"
        );
    }

    #[test]
    fn binomial_tail_is_monotone_in_the_success_probability(
        rounds in 1usize..=20,
        threshold in 0usize..=20,
        lo in 0u32..=64,
        delta in 0u32..=64,
    ) {
        let hi = (lo + delta).min(64);
        let at_lo = binomial_tail(rounds, threshold, lo as f64 / 64.0);
        let at_hi = binomial_tail(rounds, threshold, hi as f64 / 64.0);
        prop_assert!(
            at_hi >= at_lo - 1e-15,
            "tail({rounds}, {threshold}, .) decreased: {at_lo} -> {at_hi}"
        );
    }
}

/// Distinct acceptance eigenvalues on the 1/12 grid, smallest first,
/// with multiplicities padded so the witness dimension is exactly 4.
fn spectrum_strategy() -> impl Strategy<Value = Vec<(f64, usize)>> {
    proptest::collection::btree_set(0u32..=12, 1..=3).prop_map(|values| {
        let count = values.len();
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let mult = if i + 1 == count { 5 - count } else { 1 };
                (v as f64 / 12.0, mult)
            })
            .collect()
    })
}

/// Weight pairs 0 <= z' < z <= 1 on the 1/8 grid.
fn weight_strategy() -> impl Strategy<Value = (Ratio<i64>, Ratio<i64>)> {
    (0i64..8, 1i64..=8).prop_map(|(lo, gap)| {
        let z_prime = Ratio::new(lo.min(8 - gap), 8);
        (z_prime + Ratio::new(gap, 8), z_prime)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deamplification_rescales_every_eigenvalue_affinely(
        spectrum in spectrum_strategy(),
        (z, z_prime) in weight_strategy(),
    ) {
        let proc = VerificationProcedure::synthesize_with_spectrum(&spectrum)
            .expect("synthesis");
        let (weaker, map) = deamplify(&proc, z, z_prime).expect("deamplify");
        let cap = weaker.total_qubits();
        let got = jordan::spectrum_via(&weaker, RouteChoice::DirectOperator, cap)
            .expect("spectrum");
        // The affine image can merge grid points, so compare total
        // multiplicity mass near each mapped value instead of clusters
        // one for one.
        for &(p, mult) in &spectrum {
            let image = map.apply(p);
            let mass: usize = got
                .clusters
                .iter()
                .filter(|c| (c.p - image).abs() <= tol::CLUSTER)
                .map(|c| c.multiplicity)
                .sum();
            prop_assert!(
                mass >= mult,
                "value {p} -> {image} carries {mass} < {mult} dimensions"
            );
        }
        let total: usize = got.clusters.iter().map(|c| c.multiplicity).sum();
        let expected: usize = spectrum.iter().map(|&(_, m)| m).sum();
        prop_assert_eq!(total, expected, "witness dimension changed");
    }
}
