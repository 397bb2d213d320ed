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

//! Strong reductions between verification procedures.
//!
//! A strong reduction wraps a procedure in extra circuitry so that every
//! acceptance eigenvalue p moves to f(p) for one fixed monotone map f,
//! while the eigenspaces stay where they are. Two constructions live here:
//! deamplification, which applies an affine f with slope at most one by
//! rotating a fresh ancilla off the accept bit, and amplification, which
//! repeats the accept and ancilla-reset measurements without demolition
//! and takes a majority-style vote, realizing a binomial tail. Composing
//! the two retargets any achievable pair of promise bounds, exactly in
//! rational arithmetic.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::jordan::{spectrum_via, RouteChoice, SpectrumReport};
use crate::linalg::{self, CMat};
use crate::qvp::{ratio_to_f64, BoundsPair, VerificationProcedure};
use crate::simcore::GateOp;
use crate::{tol, Error, Result};

/// Largest number of repetition rounds for which the amplifier circuit is
/// actually assembled; the vote table has one entry per outcome pattern.
pub const AMPLIFIER_ROUNDS_CAP: usize = 16;

/// The eigenvalue map realized by a strong reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotoneMap {
    Identity,
    /// p maps to scale * p + offset.
    Affine {
        scale: Ratio<i64>,
        offset: Ratio<i64>,
    },
    /// p maps to Pr[Binomial(rounds, p) >= threshold].
    BinomialTail { rounds: usize, threshold: usize },
    /// Left-to-right composition.
    Composed(Vec<MonotoneMap>),
}

impl MonotoneMap {
    pub fn apply(&self, p: f64) -> f64 {
        match self {
            MonotoneMap::Identity => p,
            MonotoneMap::Affine { scale, offset } => {
                ratio_to_f64(*scale) * p + ratio_to_f64(*offset)
            }
            MonotoneMap::BinomialTail { rounds, threshold } => {
                binomial_tail(*rounds, *threshold, p)
            }
            MonotoneMap::Composed(parts) => parts.iter().fold(p, |x, part| part.apply(x)),
        }
    }

    /// Exact image of a rational point, when every stage is rational.
    pub fn apply_ratio(&self, p: Ratio<i64>) -> Option<Ratio<i64>> {
        match self {
            MonotoneMap::Identity => Some(p),
            MonotoneMap::Affine { scale, offset } => Some(scale * p + offset),
            MonotoneMap::BinomialTail { .. } => None,
            MonotoneMap::Composed(parts) => {
                parts.iter().try_fold(p, |x, part| part.apply_ratio(x))
            }
        }
    }

    /// Checks the map never decreases on a [0, 1] grid and rises overall.
    pub fn is_monotone(&self, samples: usize) -> bool {
        let mut prev = self.apply(0.0);
        for i in 1..=samples {
            let y = self.apply(i as f64 / samples as f64);
            if y < prev - 1e-12 {
                return false;
            }
            prev = y;
        }
        self.apply(1.0) > self.apply(0.0)
    }
}

impl std::fmt::Display for MonotoneMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonotoneMap::Identity => write!(f, "identity"),
            MonotoneMap::Affine { scale, offset } => {
                write!(f, "affine[scale={scale}, offset={offset}]")
            }
            MonotoneMap::BinomialTail { rounds, threshold } => {
                write!(f, "binomial-tail[rounds={rounds}, threshold={threshold}]")
            }
            MonotoneMap::Composed(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " then ")?;
                    }
                    write!(f, "{part}")?;
                }
                Ok(())
            }
        }
    }
}

/// Pr[Binomial(rounds, p) >= threshold], by the stable probability-mass
/// recurrence upward from q^rounds; every intermediate stays in [0, 1].
pub fn binomial_tail(rounds: usize, threshold: usize, p: f64) -> f64 {
    if threshold == 0 {
        return 1.0;
    }
    if threshold > rounds {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let q = 1.0 - p;
    let ratio = p / q;
    let mut pmf = q.powi(rounds as i32);
    for k in 0..threshold {
        pmf *= (rounds - k) as f64 / (k + 1) as f64 * ratio;
    }
    let mut tail = 0.0;
    let mut term = pmf;
    for k in threshold..=rounds {
        tail += term;
        if k < rounds {
            term *= (rounds - k) as f64 / (k + 1) as f64 * ratio;
        }
    }
    tail.min(1.0)
}

/// The vote threshold ceil(tau * rounds) used by the amplifier.
pub fn amplification_threshold(rounds: usize, tau: Ratio<i64>) -> Result<usize> {
    if rounds == 0 {
        return Err(Error::Parameter("amplifier needs at least one round".into()));
    }
    if tau <= Ratio::zero() || tau > Ratio::one() {
        return Err(Error::Parameter(format!(
            "vote fraction {tau} must lie in (0, 1]"
        )));
    }
    let threshold = (tau * Ratio::from_integer(rounds as i64)).ceil().to_integer();
    Ok(threshold as usize)
}

/// Solves for the rotation weights (z, z') of the deamplifier sending
/// bounds `source` to bounds `target` affinely: the accepting side maps a
/// to a' and the rejecting side b to b'. Errs when the required map leaves
/// [0, 1], which happens exactly when the target gap exceeds the source
/// gap or the offsets fall outside the unit interval.
pub fn solve_deamplification(
    source: &BoundsPair,
    target: &BoundsPair,
) -> Result<(Ratio<i64>, Ratio<i64>)> {
    let gap = source.gap();
    let scale = target.gap() / gap;
    let offset = (source.a() * target.b() - target.a() * source.b()) / gap;
    let z = scale + offset;
    if offset.is_negative() || z > Ratio::one() {
        return Err(Error::Parameter(format!(
            "bounds {}/{} -> {}/{} need weights z = {z}, z' = {offset} outside [0, 1]",
            source.a(),
            source.b(),
            target.a(),
            target.b()
        )));
    }
    Ok((z, offset))
}

/// Weakens a procedure: a fresh ancilla becomes the accept bit, rotated to
/// 1 with weight z when the old bit accepts and weight z' when it rejects.
/// Every acceptance eigenvalue p moves to (z - z') p + z' on an unchanged
/// eigenbasis.
pub fn deamplify(
    proc: &VerificationProcedure,
    z: Ratio<i64>,
    z_prime: Ratio<i64>,
) -> Result<(VerificationProcedure, MonotoneMap)> {
    if z_prime.is_negative() || z > Ratio::one() || z <= z_prime {
        return Err(Error::Parameter(format!(
            "weights need 0 <= z' < z <= 1, got z = {z}, z' = {z_prime}"
        )));
    }
    let m = proc.witness_qubits();
    let k = proc.ancilla_qubits();
    let new_accept = m + k;
    let mut out = VerificationProcedure::new(m, k + 1, new_accept)?;
    out.set_input_label(proc.input_label());
    for op in proc.ops() {
        out.push_op(op.clone())?;
    }
    for (weight, wants) in [(z, proc.accept_value()), (z_prime, !proc.accept_value())] {
        if weight.is_zero() {
            continue;
        }
        let theta = 2.0 * ratio_to_f64(weight).sqrt().asin();
        out.push_gate(GateOp::controlled(
            vec![(proc.accept_qubit(), wants)],
            vec![new_accept],
            linalg::rotation_y(theta),
        )?)?;
    }
    let map = MonotoneMap::Affine {
        scale: z - z_prime,
        offset: z_prime,
    };
    Ok((out, map))
}

/// Sharpens a procedure by `rounds` alternating measurements recorded
/// without demolition: odd rounds run the circuit, copy the accept bit
/// out, and uncompute; even rounds record whether the original ancillas
/// read zero. Within each invariant block the successive agreement bits
/// are independent with success probability p, so accepting when at least
/// ceil(tau * rounds) agreements occur moves p to a binomial tail.
pub fn amplify(
    proc: &VerificationProcedure,
    rounds: usize,
    tau: Ratio<i64>,
) -> Result<(VerificationProcedure, MonotoneMap)> {
    let threshold = amplification_threshold(rounds, tau)?;
    let m = proc.witness_qubits();
    let k = proc.ancilla_qubits();
    let base = m + k;
    if rounds > AMPLIFIER_ROUNDS_CAP {
        return Err(Error::SizeCap {
            needed: base + rounds + 1,
            cap: base + AMPLIFIER_ROUNDS_CAP + 1,
        });
    }
    let mut amp = VerificationProcedure::new(m, k + rounds + 1, base + rounds)?;
    amp.set_input_label(proc.input_label());
    let x = CMat::from_row_slice(2, 2, &[linalg::ZERO, linalg::ONE, linalg::ONE, linalg::ZERO]);
    for round in 1..=rounds {
        let outcome = base + round - 1;
        if round % 2 == 1 {
            for op in proc.ops() {
                amp.push_op(op.clone())?;
            }
            amp.push_gate(GateOp::controlled(
                vec![(proc.accept_qubit(), proc.accept_value())],
                vec![outcome],
                x.clone(),
            )?)?;
            for op in proc.ops().iter().rev() {
                amp.push_op(op.adjoint())?;
            }
        } else {
            let controls: Vec<usize> = (m..base).collect();
            let mut table = vec![false; 1 << k];
            table[0] = true;
            amp.push_gate(GateOp::predicate_flip(controls, outcome, table)?)?;
        }
    }
    // Vote on agreements between consecutive outcomes, seeded by an
    // implicit leading 1.
    let controls: Vec<usize> = (0..rounds).map(|i| base + i).collect();
    let mut table = vec![false; 1 << rounds];
    for (pattern, entry) in table.iter_mut().enumerate() {
        let mut agreements = 0usize;
        let mut prev = 1usize;
        for j in 0..rounds {
            let cur = (pattern >> j) & 1;
            if cur == prev {
                agreements += 1;
            }
            prev = cur;
        }
        *entry = agreements >= threshold;
    }
    amp.push_gate(GateOp::predicate_flip(controls, base + rounds, table)?)?;
    Ok((amp, MonotoneMap::BinomialTail { rounds, threshold }))
}

/// Evidence that `target` strongly reduces from `source` through `map`.
#[derive(Debug, Clone)]
pub struct ReductionCheck {
    pub source_spectrum: SpectrumReport,
    pub target_spectrum: SpectrumReport,
    /// Pairs of (source cluster, matched target cluster).
    pub matches: Vec<(usize, usize)>,
    /// Largest |target p - f(source p)| over matched pairs.
    pub max_value_defect: f64,
    /// Largest containment defect of a source eigenspace in its matched
    /// target eigenspace.
    pub max_containment_defect: f64,
    pub monotone: bool,
    pub ok: bool,
}

/// Verifies a claimed strong reduction: both spectra are computed, each
/// source cluster must land on a target cluster at f(p), and the source
/// eigenspace must sit inside the matched target eigenspace. Distinct
/// source clusters may legally merge in the target when f collides them.
pub fn verify_strong_reduction(
    source: &VerificationProcedure,
    target: &VerificationProcedure,
    map: &MonotoneMap,
    cap_qubits: usize,
) -> Result<ReductionCheck> {
    if source.witness_qubits() != target.witness_qubits() {
        return Err(Error::Dimension(format!(
            "witness registers differ: {} vs {}",
            source.witness_qubits(),
            target.witness_qubits()
        )));
    }
    // The reduction statement lives on the witness register, so the
    // operator route is exact and scales with the witness alone; the
    // block route stays reserved for the uniqueness crosscheck.
    let source_spectrum = spectrum_via(source, RouteChoice::DirectOperator, cap_qubits)?;
    let target_spectrum = spectrum_via(target, RouteChoice::DirectOperator, cap_qubits)?;
    let monotone = map.is_monotone(256);
    let mut matches = Vec::new();
    let mut max_value_defect = 0.0f64;
    let mut max_containment_defect = 0.0f64;
    for (i, sc) in source_spectrum.clusters.iter().enumerate() {
        let expected = map.apply(sc.p);
        let (j, defect) = target_spectrum
            .clusters
            .iter()
            .enumerate()
            .map(|(j, tc)| (j, (tc.p - expected).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("spectra are never empty");
        matches.push((i, j));
        max_value_defect = max_value_defect.max(defect);
        let ps = linalg::projector_onto(&sc.basis);
        let pt = linalg::projector_onto(&target_spectrum.clusters[j].basis);
        let containment = (&pt * &ps - &ps).norm();
        max_containment_defect = max_containment_defect.max(containment);
    }
    let ok = monotone
        && max_value_defect <= tol::CROSSCHECK
        && max_containment_defect <= tol::CROSSCHECK;
    Ok(ReductionCheck {
        source_spectrum,
        target_spectrum,
        matches,
        max_value_defect,
        max_containment_defect,
        monotone,
        ok,
    })
}

/// Amplifier stage of a retargeting plan.
#[derive(Debug, Clone)]
pub struct AmplifierPlan {
    pub rounds: usize,
    pub threshold: usize,
    pub tau: Ratio<i64>,
    /// The amplifier lands beyond (1 - 2^-sharpness, 2^-sharpness).
    pub sharpness: u32,
    pub fixed: BoundsPair,
}

/// Exact recipe carrying promise bounds from `source` to `target`.
#[derive(Debug, Clone)]
pub struct RetargetPlan {
    pub source: BoundsPair,
    pub target: BoundsPair,
    /// Absent when an affine map alone suffices.
    pub amplifier: Option<AmplifierPlan>,
    pub z: Ratio<i64>,
    pub z_prime: Ratio<i64>,
    pub map: MonotoneMap,
}

/// Pr[Binomial(rounds, p) >= threshold] in exact rational arithmetic, by
/// the probability-mass recurrence climbing from q^rounds.
fn exact_binomial_tail(rounds: usize, threshold: usize, p: &BigRational) -> BigRational {
    if threshold == 0 {
        return BigRational::one();
    }
    if threshold > rounds {
        return BigRational::zero();
    }
    let q = BigRational::one() - p;
    let mut pmf: BigRational = num_traits::pow(q.clone(), rounds);
    let ratio = p / &q;
    for k in 0..threshold {
        pmf = pmf * BigRational::from_integer(BigInt::from(rounds - k))
            / BigRational::from_integer(BigInt::from(k + 1))
            * &ratio;
    }
    let mut tail = BigRational::zero();
    for k in threshold..=rounds {
        tail += &pmf;
        if k < rounds {
            pmf = pmf * BigRational::from_integer(BigInt::from(rounds - k))
                / BigRational::from_integer(BigInt::from(k + 1))
                * &ratio;
        }
    }
    tail
}

fn big_ratio(x: Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

fn small_ratio(x: &BigRational) -> Result<Ratio<i64>> {
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Ratio::new(n, d)),
        _ => Err(Error::Parameter(
            "retarget weights need more than 64-bit rationals; coarsen the bounds".into(),
        )),
    }
}

/// Plans a reduction carrying `source` bounds to `target` bounds: direct
/// deamplification when the affine map alone fits in [0, 1], otherwise the
/// smallest amplifier whose exact tails clear the dyadic marks
/// (1 - 2^-sharpness, 2^-sharpness), followed by the affine stage solved
/// against the amplified values. Clearing the marks certifies the affine
/// weights land in [0, 1] whenever the target sits strictly inside the
/// marks, so the composite hits the target bounds exactly.
pub fn plan_retarget(
    source: &BoundsPair,
    target: &BoundsPair,
    sharpness: u32,
    max_rounds: usize,
) -> Result<RetargetPlan> {
    if let Ok((z, z_prime)) = solve_deamplification(source, target) {
        return Ok(RetargetPlan {
            source: source.clone(),
            target: target.clone(),
            amplifier: None,
            z,
            z_prime,
            map: MonotoneMap::Affine {
                scale: z - z_prime,
                offset: z_prime,
            },
        });
    }
    if !(1..=40).contains(&sharpness) {
        return Err(Error::Parameter(format!(
            "sharpness {sharpness} outside the supported range 1..=40"
        )));
    }
    let mark = Ratio::new(1, 1i64 << sharpness);
    if target.a() >= Ratio::one() - mark || target.b() <= mark {
        return Err(Error::Parameter(format!(
            "target bounds {}/{} are not strictly inside (1 - 2^-{sharpness}, 2^-{sharpness})",
            target.a(),
            target.b()
        )));
    }
    let fixed = BoundsPair::new(Ratio::one() - mark, mark)?;
    let a = source.a_f64();
    let b = source.b_f64();
    let hi = fixed.a_f64();
    let lo = fixed.b_f64();
    for rounds in 1..=max_rounds {
        let mut best: Option<(usize, f64)> = None;
        for threshold in 1..=rounds {
            let fa = binomial_tail(rounds, threshold, a);
            let fb = binomial_tail(rounds, threshold, b);
            let margin = (fa - hi).min(lo - fb);
            if margin > 1e-9 && best.map_or(true, |(_, best_margin)| margin > best_margin) {
                best = Some((threshold, margin));
            }
        }
        let Some((threshold, _)) = best else {
            continue;
        };
        // Affine stage against the exact amplified values, so the
        // composite interpolates the target rather than overshooting it.
        let fa = exact_binomial_tail(rounds, threshold, &big_ratio(source.a()));
        let fb = exact_binomial_tail(rounds, threshold, &big_ratio(source.b()));
        let slope = (big_ratio(target.a()) - big_ratio(target.b())) / (&fa - &fb);
        let offset = big_ratio(target.b()) - &fb * &slope;
        let top = &offset + &slope;
        if offset < BigRational::zero() || top > BigRational::one() {
            return Err(Error::InternalCheck(format!(
                "cleared marks still gave weights z = {top}, z' = {offset}"
            )));
        }
        let z = small_ratio(&top)?;
        let z_prime = small_ratio(&offset)?;
        let tau = Ratio::new(threshold as i64, rounds as i64);
        let map = MonotoneMap::Composed(vec![
            MonotoneMap::BinomialTail { rounds, threshold },
            MonotoneMap::Affine {
                scale: z - z_prime,
                offset: z_prime,
            },
        ]);
        return Ok(RetargetPlan {
            source: source.clone(),
            target: target.clone(),
            amplifier: Some(AmplifierPlan {
                rounds,
                threshold,
                tau,
                sharpness,
                fixed,
            }),
            z,
            z_prime,
            map,
        });
    }
    Err(Error::Parameter(format!(
        "no amplifier within {max_rounds} rounds reaches sharpness 2^-{sharpness}"
    )))
}

/// Plans and builds the retargeting reduction on a concrete procedure.
pub fn retarget_bounds(
    proc: &VerificationProcedure,
    source: &BoundsPair,
    target: &BoundsPair,
    sharpness: u32,
    max_rounds: usize,
) -> Result<(VerificationProcedure, RetargetPlan)> {
    let plan = plan_retarget(source, target, sharpness, max_rounds)?;
    let reduced = match &plan.amplifier {
        None => deamplify(proc, plan.z, plan.z_prime)?.0,
        Some(stage) => {
            let (amped, _) = amplify(proc, stage.rounds, stage.tau)?;
            deamplify(&amped, plan.z, plan.z_prime)?.0
        }
    };
    Ok((reduced, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::StateVector;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    /// Independent exact tail: direct summation of binomial terms in
    /// arbitrary-precision rational arithmetic.
    fn exact_tail(rounds: usize, threshold: usize, p: BigRational) -> BigRational {
        let q = BigRational::one() - &p;
        let mut total = BigRational::zero();
        for k in threshold..=rounds {
            let mut choose = BigInt::one();
            for i in 0..k {
                choose = choose * BigInt::from(rounds - i) / BigInt::from(i + 1);
            }
            let term = BigRational::from(choose)
                * pow_big(&p, k)
                * pow_big(&q, rounds - k);
            total += term;
        }
        total
    }

    fn pow_big(x: &BigRational, e: usize) -> BigRational {
        let mut out = BigRational::one();
        for _ in 0..e {
            out *= x;
        }
        out
    }

    fn big_to_f64(x: &BigRational) -> f64 {
        use num_traits::ToPrimitive;
        x.to_f64().unwrap()
    }

    #[test]
    fn tail_matches_hand_counts() {
        // Bin(3, 1/2) >= 2 counts 4 of 8 outcomes; Bin(2, 1/3) >= 1 is
        // 1 - (2/3)^2 = 5/9.
        assert!((binomial_tail(3, 2, 0.5) - 0.5).abs() < 1e-15);
        assert!((binomial_tail(2, 1, 1.0 / 3.0) - 5.0 / 9.0).abs() < 1e-15);
        assert_eq!(binomial_tail(5, 0, 0.2), 1.0);
        assert_eq!(binomial_tail(5, 6, 0.9), 0.0);
        assert_eq!(binomial_tail(5, 3, 0.0), 0.0);
        assert_eq!(binomial_tail(5, 3, 1.0), 1.0);
    }

    #[test]
    fn tail_matches_exact_rational_oracle() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
        for (rounds, threshold) in [(11usize, 6usize), (63, 32)] {
            for (p_exact, p_float) in
                [(third.clone(), 1.0 / 3.0), (two_thirds.clone(), 2.0 / 3.0)]
            {
                let exact = big_to_f64(&exact_tail(rounds, threshold, p_exact));
                let fast = binomial_tail(rounds, threshold, p_float);
                assert!(
                    (exact - fast).abs() < 1e-13,
                    "tail({rounds}, {threshold}): {fast} vs exact {exact}"
                );
            }
        }
    }

    #[test]
    fn deamplification_weights_solve_exactly() {
        let source = BoundsPair::new(Ratio::new(2, 3), Ratio::new(1, 3)).unwrap();
        let target = BoundsPair::new(Ratio::new(3, 5), Ratio::new(2, 5)).unwrap();
        let (z, z_prime) = solve_deamplification(&source, &target).unwrap();
        assert_eq!(z, Ratio::new(4, 5));
        assert_eq!(z_prime, Ratio::new(1, 5));
        // Widening the gap is impossible affinely within [0, 1].
        let wide = BoundsPair::new(Ratio::new(19, 20), Ratio::new(1, 20)).unwrap();
        assert!(solve_deamplification(&source, &wide).is_err());
    }

    #[test]
    fn deamplified_circuit_realizes_the_affine_map() {
        let proc = VerificationProcedure::synthesize_with_spectrum(&[
            (2.0 / 3.0, 1),
            (1.0 / 3.0, 1),
        ])
        .unwrap();
        let (reduced, map) =
            deamplify(&proc, Ratio::new(4, 5), Ratio::new(1, 5)).unwrap();
        let expected = [3.0 / 5.0, 2.0 / 5.0];
        for (index, want) in expected.iter().enumerate() {
            let p = reduced
                .acceptance_probability(&StateVector::basis_state(1, index))
                .unwrap();
            assert!((p - want).abs() < 1e-12, "index {index}: {p}");
        }
        assert_eq!(
            map,
            MonotoneMap::Affine {
                scale: Ratio::new(3, 5),
                offset: Ratio::new(1, 5)
            }
        );
    }

    #[test]
    fn amplifier_circuit_realizes_the_binomial_tail() {
        let proc =
            VerificationProcedure::synthesize_with_spectrum(&[(0.3, 2)]).unwrap();
        let witness = StateVector::basis_state(1, 0);
        // One round with threshold one is the original probability.
        let (once, _) = amplify(&proc, 1, Ratio::new(1, 1)).unwrap();
        let p1 = once.acceptance_probability(&witness).unwrap();
        assert!((p1 - 0.3).abs() < 1e-12);
        // Three rounds, at least two agreements: 3 p^2 q + p^3 = 0.216.
        let (thrice, map) = amplify(&proc, 3, Ratio::new(2, 3)).unwrap();
        let p3 = thrice.acceptance_probability(&witness).unwrap();
        assert!((p3 - 0.216).abs() < 1e-12, "got {p3}");
        assert_eq!(
            map,
            MonotoneMap::BinomialTail {
                rounds: 3,
                threshold: 2
            }
        );
        assert!((map.apply(0.3) - 0.216).abs() < 1e-15);
    }

    #[test]
    fn amplifier_handles_superposed_witnesses_blockwise() {
        let proc = VerificationProcedure::synthesize_with_spectrum(&[(0.2, 1), (0.9, 1)])
            .unwrap();
        let (amped, map) = amplify(&proc, 4, Ratio::new(3, 4)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let witness = StateVector::from_amplitudes(
            1,
            vec![linalg::C64::new(h, 0.0), linalg::C64::new(0.0, -h)],
        )
        .unwrap();
        let got = amped.acceptance_probability(&witness).unwrap();
        let want = 0.5 * map.apply(0.2) + 0.5 * map.apply(0.9);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn amplifier_refuses_unbuildable_round_counts() {
        let proc =
            VerificationProcedure::synthesize_with_spectrum(&[(0.5, 2)]).unwrap();
        assert!(matches!(
            amplify(&proc, 63, Ratio::new(1, 2)),
            Err(Error::SizeCap { .. })
        ));
        // The descriptor math still covers such round counts.
        assert_eq!(amplification_threshold(63, Ratio::new(32, 63)).unwrap(), 32);
    }

    #[test]
    fn reduction_verifier_accepts_truth_and_rejects_identity_claim() {
        let source = VerificationProcedure::synthesize_with_spectrum(&[
            (2.0 / 3.0, 1),
            (1.0 / 3.0, 3),
        ])
        .unwrap();
        let (target, map) =
            deamplify(&source, Ratio::new(4, 5), Ratio::new(1, 5)).unwrap();
        let check = verify_strong_reduction(
            &source,
            &target,
            &map,
            crate::qvp::OPERATOR_CAP_QUBITS,
        )
        .unwrap();
        assert!(check.ok, "value defect {}", check.max_value_defect);
        let lie = verify_strong_reduction(
            &source,
            &target,
            &MonotoneMap::Identity,
            crate::qvp::OPERATOR_CAP_QUBITS,
        )
        .unwrap();
        assert!(!lie.ok);
    }

    #[test]
    fn retarget_narrowing_needs_no_amplifier() {
        let source = BoundsPair::new(Ratio::new(2, 3), Ratio::new(1, 3)).unwrap();
        let target = BoundsPair::new(Ratio::new(3, 5), Ratio::new(2, 5)).unwrap();
        let plan = plan_retarget(&source, &target, 3, 63).unwrap();
        assert!(plan.amplifier.is_none());
        assert_eq!(plan.z, Ratio::new(4, 5));
        assert_eq!(plan.z_prime, Ratio::new(1, 5));
        assert_eq!(
            plan.map.apply_ratio(Ratio::new(2, 3)).unwrap(),
            Ratio::new(3, 5)
        );
    }

    #[test]
    fn retarget_widening_composes_amplifier_and_affine_stage() {
        let source = BoundsPair::new(Ratio::new(2, 3), Ratio::new(1, 3)).unwrap();
        let target = BoundsPair::new(Ratio::new(19, 20), Ratio::new(1, 20)).unwrap();
        let plan = plan_retarget(&source, &target, 5, 63).unwrap();
        let stage = plan.amplifier.as_ref().expect("needs an amplifier");
        assert_eq!(stage.sharpness, 5);
        // The chosen amplifier must beat the dyadic marks exactly; check
        // with the independent arbitrary-precision tail.
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
        let cutoff = BigRational::new(BigInt::from(1), BigInt::from(32));
        let acc = exact_tail(stage.rounds, stage.threshold, two_thirds.clone());
        let rej = exact_tail(stage.rounds, stage.threshold, third.clone());
        assert!(acc >= BigRational::one() - &cutoff);
        assert!(rej <= cutoff);
        // The affine stage interpolates the exact amplified values, so the
        // composite hits the target bounds exactly in rational arithmetic.
        let z = BigRational::new(BigInt::from(*plan.z.numer()), BigInt::from(*plan.z.denom()));
        let z_prime = BigRational::new(
            BigInt::from(*plan.z_prime.numer()),
            BigInt::from(*plan.z_prime.denom()),
        );
        let slope = &z - &z_prime;
        assert_eq!(
            &z_prime + &slope * acc,
            BigRational::new(BigInt::from(19), BigInt::from(20))
        );
        assert_eq!(
            &z_prime + &slope * rej,
            BigRational::new(BigInt::from(1), BigInt::from(20))
        );
        assert!(plan.map.is_monotone(256));
        // Blunter marks cannot bracket this target.
        assert!(plan_retarget(&source, &target, 4, 63).is_err());
    }

    #[test]
    fn retarget_builds_a_working_circuit_when_small() {
        let proc = VerificationProcedure::synthesize_with_spectrum(&[
            (2.0 / 3.0, 1),
            (1.0 / 3.0, 1),
        ])
        .unwrap();
        let source = BoundsPair::new(Ratio::new(2, 3), Ratio::new(1, 3)).unwrap();
        let target = BoundsPair::new(Ratio::new(3, 5), Ratio::new(2, 5)).unwrap();
        let (reduced, plan) = retarget_bounds(&proc, &source, &target, 3, 63).unwrap();
        let p = reduced
            .acceptance_probability(&StateVector::basis_state(1, 0))
            .unwrap();
        assert!((p - 0.6).abs() < 1e-12);
        let check = verify_strong_reduction(
            &proc,
            &reduced,
            &plan.map,
            crate::qvp::OPERATOR_CAP_QUBITS,
        )
        .unwrap();
        assert!(check.ok);
    }

    #[test]
    fn retarget_amplifier_path_lands_on_the_target_exactly() {
        let proc = VerificationProcedure::synthesize_with_spectrum(&[
            (2.0 / 3.0, 1),
            (1.0 / 3.0, 1),
        ])
        .unwrap();
        let source = BoundsPair::new(Ratio::new(2, 3), Ratio::new(1, 3)).unwrap();
        // Widening the acceptance bound rules out a pure affine stage.
        let target = BoundsPair::new(Ratio::new(7, 10), Ratio::new(3, 10)).unwrap();
        let (reduced, plan) =
            retarget_bounds(&proc, &source, &target, 2, AMPLIFIER_ROUNDS_CAP).unwrap();
        let stage = plan.amplifier.as_ref().expect("needs an amplifier");
        assert_eq!((stage.rounds, stage.threshold), (5, 3));
        assert_eq!(plan.z, Ratio::new(397, 470));
        assert_eq!(plan.z_prime, Ratio::new(73, 470));
        let hi = reduced
            .acceptance_probability(&StateVector::basis_state(1, 0))
            .unwrap();
        let lo = reduced
            .acceptance_probability(&StateVector::basis_state(1, 1))
            .unwrap();
        assert!((hi - 0.7).abs() < 1e-9, "widened acceptance {hi}");
        assert!((lo - 0.3).abs() < 1e-9, "widened rejection {lo}");
        let check = verify_strong_reduction(
            &proc,
            &reduced,
            &plan.map,
            crate::qvp::OPERATOR_CAP_QUBITS,
        )
        .unwrap();
        assert!(check.ok);
    }

    #[test]
    fn composed_maps_apply_in_order_and_print_readably() {
        let map = MonotoneMap::Composed(vec![
            MonotoneMap::BinomialTail {
                rounds: 3,
                threshold: 2,
            },
            MonotoneMap::Affine {
                scale: Ratio::new(1, 2),
                offset: Ratio::new(1, 4),
            },
        ]);
        let inner = binomial_tail(3, 2, 0.3);
        assert!((map.apply(0.3) - (0.5 * inner + 0.25)).abs() < 1e-15);
        assert_eq!(
            map.to_string(),
            "binomial-tail[rounds=3, threshold=2] then affine[scale=1/2, offset=1/4]"
        );
        assert_eq!(map.apply_ratio(Ratio::new(1, 2)), None);
    }
}
