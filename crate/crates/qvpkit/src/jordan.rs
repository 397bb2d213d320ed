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

//! Joint block decomposition of two projectors and the acceptance spectra
//! built on it.
//!
//! Any pair of projectors splits the space into one- and two-dimensional
//! invariant blocks. Each two-dimensional block carries a principal angle
//! theta: the first projector keeps a unit vector w, the second keeps v
//! with <w|v> = cos theta, and the product of the two associated
//! reflections rotates the block by 2 theta. Applied to a verification
//! procedure with the zero-ancilla projector and the pulled-back accept
//! projector, the blocks that meet the witness space read off acceptance
//! eigenvalues p = cos^2 theta together with an eigenbasis, entirely
//! without diagonalizing the acceptance operator itself. The direct
//! diagonalization is kept alongside as an independent route so the two
//! can be cross-checked.

use rand::Rng;

use crate::linalg::{self, CMat, CVec, C64};
use crate::qvp::{subspace_relations, Direction, SubspaceRelation, VerificationProcedure};
use crate::simcore::StateVector;
use crate::{tol, Error, Result};

/// Ceiling on total qubits for the dense block route, which diagonalizes
/// an operator on the full witness-plus-ancilla space.
pub const DENSE_CAP_QUBITS: usize = 11;

/// One invariant block of a projector pair.
#[derive(Debug, Clone)]
pub enum JordanBlock {
    /// Principal-angle block: `w` spans the intersection with the first
    /// projector's range, `v` the intersection with the second's, and
    /// `<w|v> = cos(theta)` with `p = cos^2(theta)` strictly inside (0, 1).
    TwoDim {
        theta: f64,
        p: f64,
        w: CVec,
        w_perp: CVec,
        v: CVec,
        v_perp: CVec,
    },
    /// Block on which the two projectors commute: `in_first` and
    /// `in_second` say whether the vector lies in each range.
    OneDim {
        in_first: bool,
        in_second: bool,
        vector: CVec,
    },
}

impl JordanBlock {
    pub fn dimension(&self) -> usize {
        match self {
            JordanBlock::TwoDim { .. } => 2,
            JordanBlock::OneDim { .. } => 1,
        }
    }
}

/// Which computation produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    JordanBlocks,
    DirectOperator,
}

impl std::fmt::Display for SpectrumSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpectrumSource::JordanBlocks => "jordan-blocks",
            SpectrumSource::DirectOperator => "direct-operator",
        };
        f.write_str(s)
    }
}

/// One acceptance eigenvalue cluster with an orthonormal witness-space
/// eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectrumCluster {
    pub p: f64,
    pub multiplicity: usize,
    pub basis: Vec<CVec>,
}

/// Full acceptance spectrum of a procedure, clusters ascending in p.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub source: SpectrumSource,
    pub witness_qubits: usize,
    pub clusters: Vec<SpectrumCluster>,
}

impl SpectrumReport {
    pub fn probabilities(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.p).collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    pub fn bases(&self) -> Vec<Vec<CVec>> {
        self.clusters.iter().map(|c| c.basis.clone()).collect()
    }
}

/// Strategy for computing a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteChoice {
    /// Block route when the full register fits the dense cap, direct
    /// diagonalization otherwise.
    Auto,
    JordanBlocks,
    DirectOperator,
}

fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Decomposes a projector pair into invariant blocks.
///
/// The route runs through the unitary product of the two reflections
/// `2P - I`: its Hermitian part is diagonalized, eigenvalue clusters at
/// cos(2 theta) are split back into blocks by restricting the projectors,
/// and clusters at exactly +1 or -1 yield the one-dimensional commuting
/// blocks. The returned blocks exactly rebuild both inputs; that
/// reconstruction is verified before returning.
pub fn jordan_decompose(p0: &CMat, p1: &CMat) -> Result<Vec<JordanBlock>> {
    let d = p0.nrows();
    if p0.ncols() != d || p1.nrows() != d || p1.ncols() != d {
        return Err(Error::Dimension(format!(
            "projector shapes {}x{} and {}x{} differ",
            p0.nrows(),
            p0.ncols(),
            p1.nrows(),
            p1.ncols()
        )));
    }
    for p in [p0, p1] {
        let dev = linalg::projector_deviation(p);
        if dev > tol::CLUSTER {
            return Err(Error::NotProjector { deviation: dev });
        }
    }
    let two = C64::new(2.0, 0.0);
    let eye = CMat::identity(d, d);
    let f0 = p0 * two - &eye;
    let f1 = p1 * two - &eye;
    let f = &f1 * &f0;
    let c = (&f + f.adjoint()) * C64::new(0.5, 0.0);
    let (lambda, q) = linalg::eigh(&c)?;
    let mut blocks = Vec::new();
    for (value, idxs) in linalg::cluster_values(&lambda, tol::EQUALITY) {
        let cluster_dim = idxs.len();
        let wmat = CMat::from_fn(d, cluster_dim, |r, c| q[(r, idxs[c])]);
        let m0 = wmat.adjoint() * p0 * &wmat;
        let (evals, evecs) = linalg::eigh(&m0)?;
        if value.abs() >= 1.0 - tol::EQUALITY {
            decompose_commuting_cluster(value, &wmat, &evals, &evecs, p1, &mut blocks)?;
        } else {
            decompose_angle_cluster(value, &wmat, &evals, &evecs, p1, &mut blocks)?;
        }
    }
    let dims: usize = blocks.iter().map(JordanBlock::dimension).sum();
    if dims != d {
        return Err(Error::InternalCheck(format!(
            "blocks span {dims} dimensions out of {d}"
        )));
    }
    let mut r0 = CMat::zeros(d, d);
    let mut r1 = CMat::zeros(d, d);
    for block in &blocks {
        match block {
            JordanBlock::TwoDim { w, v, .. } => {
                r0 += outer(w);
                r1 += outer(v);
            }
            JordanBlock::OneDim {
                in_first,
                in_second,
                vector,
            } => {
                if *in_first {
                    r0 += outer(vector);
                }
                if *in_second {
                    r1 += outer(vector);
                }
            }
        }
    }
    let defect0 = linalg::frobenius_distance(&r0, p0);
    let defect1 = linalg::frobenius_distance(&r1, p1);
    if defect0 > tol::CROSSCHECK || defect1 > tol::CROSSCHECK {
        return Err(Error::InternalCheck(format!(
            "block reconstruction misses the projectors by {defect0:.3e} and {defect1:.3e}"
        )));
    }
    Ok(blocks)
}

/// Clusters at +-1: the reflections agree (or anti-agree) there, so both
/// projectors restrict to one commuting projector and every block is
/// one-dimensional.
fn decompose_commuting_cluster(
    value: f64,
    wmat: &CMat,
    evals: &[f64],
    evecs: &CMat,
    p1: &CMat,
    blocks: &mut Vec<JordanBlock>,
) -> Result<()> {
    let positive = value > 0.0;
    for (i, &mu) in evals.iter().enumerate() {
        let in_first = if (mu - 1.0).abs() <= tol::CLUSTER {
            true
        } else if mu.abs() <= tol::CLUSTER {
            false
        } else {
            return Err(Error::InternalCheck(format!(
                "restriction eigenvalue {mu} in a commuting cluster is neither 0 nor 1"
            )));
        };
        let mut vector: CVec = wmat * evecs.column(i).into_owned();
        let n = vector.norm();
        vector /= C64::new(n, 0.0);
        linalg::canonical_phase(&mut vector);
        let in_second = if positive { in_first } else { !in_first };
        let q1 = (vector.adjoint() * p1 * &vector)[(0, 0)].re;
        let want = if in_second { 1.0 } else { 0.0 };
        if (q1 - want).abs() > tol::CLUSTER {
            return Err(Error::InternalCheck(format!(
                "commuting block reads {q1} on the second projector, expected {want}"
            )));
        }
        blocks.push(JordanBlock::OneDim {
            in_first,
            in_second,
            vector,
        });
    }
    Ok(())
}

/// Interior clusters at cos(2 theta): half the cluster lies in the first
/// projector's range; restricting the second projector to that half splits
/// degenerate angles apart and yields one w per block.
fn decompose_angle_cluster(
    value: f64,
    wmat: &CMat,
    evals: &[f64],
    evecs: &CMat,
    p1: &CMat,
    blocks: &mut Vec<JordanBlock>,
) -> Result<()> {
    let cluster_dim = evals.len();
    let mut w_cols = Vec::new();
    for (i, &mu) in evals.iter().enumerate() {
        if (mu - 1.0).abs() <= tol::CLUSTER {
            w_cols.push(i);
        } else if mu.abs() > tol::CLUSTER {
            return Err(Error::InternalCheck(format!(
                "restriction eigenvalue {mu} in an angle cluster is neither 0 nor 1"
            )));
        }
    }
    if 2 * w_cols.len() != cluster_dim {
        return Err(Error::InternalCheck(format!(
            "angle cluster of dimension {cluster_dim} has rank {} against the first projector",
            w_cols.len()
        )));
    }
    let s = w_cols.len();
    let d = wmat.nrows();
    let sub = CMat::from_fn(cluster_dim, s, |r, c| evecs[(r, w_cols[c])]);
    let w1 = wmat * sub;
    let compressed = w1.adjoint() * p1 * &w1;
    let (ps, refine) = linalg::eigh(&compressed)?;
    let refined = &w1 * refine;
    for i in 0..s {
        let mut w: CVec = CVec::from_fn(d, |r, _| refined[(r, i)]);
        let n = w.norm();
        w /= C64::new(n, 0.0);
        linalg::canonical_phase(&mut w);
        let pw = p1 * &w;
        let cos_theta = pw.norm();
        let p = cos_theta * cos_theta;
        if (p - ps[i]).abs() > tol::CROSSCHECK {
            return Err(Error::InternalCheck(format!(
                "block overlap {p} disagrees with the compressed eigenvalue {}",
                ps[i]
            )));
        }
        if ((1.0 + value) / 2.0 - p).abs() > 1e-6 {
            return Err(Error::InternalCheck(format!(
                "block overlap {p} disagrees with the cluster eigenvalue {value}"
            )));
        }
        let sin_theta = (1.0 - p).max(0.0).sqrt();
        if cos_theta < 1e-9 || sin_theta < 1e-9 {
            return Err(Error::InternalCheck(
                "angle cluster touches a projector boundary".into(),
            ));
        }
        let theta = cos_theta.min(1.0).acos();
        let v = pw / C64::new(cos_theta, 0.0);
        let mut w_perp = (&v - &w * C64::new(cos_theta, 0.0)) / C64::new(sin_theta, 0.0);
        let spill = w.dotc(&w_perp);
        w_perp -= &w * spill;
        let n = w_perp.norm();
        w_perp /= C64::new(n, 0.0);
        let mut v_perp = (&w - &v * C64::new(cos_theta, 0.0)) / C64::new(sin_theta, 0.0);
        let spill = v.dotc(&v_perp);
        v_perp -= &v * spill;
        let n = v_perp.norm();
        v_perp /= C64::new(n, 0.0);
        blocks.push(JordanBlock::TwoDim {
            theta,
            p,
            w,
            w_perp,
            v,
            v_perp,
        });
    }
    Ok(())
}

/// Spectrum through the block route. The blocks of the zero-ancilla
/// projector against the pulled-back accept projector are intersected with
/// the witness space: each angle block contributes its w with p =
/// cos^2 theta, each commuting block inside the witness space contributes
/// p = 0 or 1.
pub fn spectrum(proc: &VerificationProcedure, cap_qubits: usize) -> Result<SpectrumReport> {
    let p0 = proc.zero_ancilla_projector(cap_qubits)?;
    let p1 = proc.conjugated_accept_projector(cap_qubits)?;
    let blocks = jordan_decompose(&p0, &p1)?;
    let wdim = 1usize << proc.witness_qubits();
    let mut entries: Vec<(f64, CVec)> = Vec::new();
    for block in &blocks {
        match block {
            JordanBlock::TwoDim { p, w, .. } => {
                entries.push((*p, restrict_to_witness(w, wdim)?));
            }
            JordanBlock::OneDim {
                in_first: true,
                in_second,
                vector,
            } => {
                let p = if *in_second { 1.0 } else { 0.0 };
                entries.push((p, restrict_to_witness(vector, wdim)?));
            }
            JordanBlock::OneDim {
                in_first: false, ..
            } => {}
        }
    }
    if entries.len() != wdim {
        return Err(Error::InternalCheck(format!(
            "{} blocks meet the witness space, expected {wdim}",
            entries.len()
        )));
    }
    assemble_report(
        SpectrumSource::JordanBlocks,
        proc.witness_qubits(),
        entries,
    )
}

/// Spectrum by diagonalizing the acceptance operator directly.
pub fn spectrum_direct(proc: &VerificationProcedure, cap_qubits: usize) -> Result<SpectrumReport> {
    let a = proc.acceptance_operator(cap_qubits)?;
    let (values, vectors) = linalg::eigh(&a)?;
    let mut entries = Vec::with_capacity(values.len());
    for (i, &p) in values.iter().enumerate() {
        if !(-tol::CLUSTER..=1.0 + tol::CLUSTER).contains(&p) {
            return Err(Error::InternalCheck(format!(
                "acceptance eigenvalue {p} escapes [0, 1]"
            )));
        }
        let mut v = vectors.column(i).into_owned();
        linalg::canonical_phase(&mut v);
        entries.push((p.clamp(0.0, 1.0), v));
    }
    assemble_report(
        SpectrumSource::DirectOperator,
        proc.witness_qubits(),
        entries,
    )
}

/// Spectrum by the requested route; `Auto` prefers the block route
/// whenever the full register fits the dense cap.
pub fn spectrum_via(
    proc: &VerificationProcedure,
    route: RouteChoice,
    cap_qubits: usize,
) -> Result<SpectrumReport> {
    match route {
        RouteChoice::JordanBlocks => spectrum(proc, cap_qubits),
        RouteChoice::DirectOperator => spectrum_direct(proc, cap_qubits),
        RouteChoice::Auto => {
            if proc.total_qubits() <= DENSE_CAP_QUBITS.min(cap_qubits) {
                spectrum(proc, cap_qubits)
            } else {
                spectrum_direct(proc, cap_qubits)
            }
        }
    }
}

fn restrict_to_witness(vector: &CVec, wdim: usize) -> Result<CVec> {
    let tail: f64 = (wdim..vector.len()).map(|i| vector[i].norm_sqr()).sum();
    if tail > tol::CLUSTER {
        return Err(Error::InternalCheck(format!(
            "witness-block vector leaks {tail:.3e} outside the zero-ancilla slice"
        )));
    }
    let mut head = CVec::from_fn(wdim, |i, _| vector[i]);
    let n = head.norm();
    head /= C64::new(n, 0.0);
    Ok(head)
}

fn assemble_report(
    source: SpectrumSource,
    witness_qubits: usize,
    entries: Vec<(f64, CVec)>,
) -> Result<SpectrumReport> {
    let values: Vec<f64> = entries.iter().map(|(p, _)| *p).collect();
    let mut clusters = Vec::new();
    for (p, idxs) in linalg::cluster_values(&values, tol::CLUSTER) {
        let members: Vec<CVec> = idxs.iter().map(|&i| entries[i].1.clone()).collect();
        let mut basis = linalg::orthonormalize(&members);
        if basis.len() != members.len() {
            return Err(Error::InternalCheck(format!(
                "eigenvalue cluster at {p} has linearly dependent members"
            )));
        }
        for v in &mut basis {
            linalg::canonical_phase(v);
        }
        clusters.push(SpectrumCluster {
            p: p.clamp(0.0, 1.0),
            multiplicity: idxs.len(),
            basis,
        });
    }
    Ok(SpectrumReport {
        source,
        witness_qubits,
        clusters,
    })
}

/// Agreement of the two spectrum routes on one procedure.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub jordan: SpectrumReport,
    pub direct: SpectrumReport,
    /// Largest eigenvalue difference between matched clusters.
    pub max_value_gap: f64,
    /// Largest projector defect between matched eigenspaces.
    pub max_basis_defect: f64,
    pub relations: Vec<SubspaceRelation>,
    pub consistent: bool,
}

/// Computes the spectrum both ways and checks that eigenvalues,
/// multiplicities, and eigenspaces agree, which is what makes the
/// interference-free basis of a procedure well defined.
pub fn crosscheck_uniqueness(
    proc: &VerificationProcedure,
    cap_qubits: usize,
) -> Result<UniquenessReport> {
    let jordan = spectrum(proc, cap_qubits)?;
    let direct = spectrum_direct(proc, cap_qubits)?;
    if jordan.clusters.len() != direct.clusters.len() {
        return Err(Error::InternalCheck(format!(
            "route cluster counts differ: {} vs {}",
            jordan.clusters.len(),
            direct.clusters.len()
        )));
    }
    let mut max_value_gap = 0.0f64;
    for (j, d) in jordan.clusters.iter().zip(&direct.clusters) {
        if j.multiplicity != d.multiplicity {
            return Err(Error::InternalCheck(format!(
                "multiplicities at p = {} differ: {} vs {}",
                j.p, j.multiplicity, d.multiplicity
            )));
        }
        max_value_gap = max_value_gap.max((j.p - d.p).abs());
    }
    let relations = subspace_relations(&jordan.bases(), &direct.bases(), tol::CROSSCHECK);
    let mut max_basis_defect = 0.0f64;
    let mut aligned = true;
    for rel in &relations {
        if rel.source == rel.target {
            max_basis_defect = max_basis_defect.max(rel.defect);
            if rel.direction != Direction::Equal {
                aligned = false;
            }
        }
    }
    let consistent = aligned && max_value_gap <= tol::CROSSCHECK;
    Ok(UniquenessReport {
        jordan,
        direct,
        max_value_gap,
        max_basis_defect,
        relations,
        consistent,
    })
}

/// Worst deviation from incoherent mixing over random superpositions of
/// eigenvectors: acceptance of sum alpha_i psi_i must equal
/// sum |alpha_i|^2 p_i. Returns the largest absolute deviation seen.
pub fn interference_defect<R: Rng>(
    proc: &VerificationProcedure,
    report: &SpectrumReport,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if report.clusters.is_empty() {
        return Err(Error::Parameter("spectrum report has no clusters".into()));
    }
    let m = report.witness_qubits;
    let wdim = 1usize << m;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let coeffs = linalg::haar_state(report.clusters.len(), rng);
        let mut witness = CVec::zeros(wdim);
        let mut predicted = 0.0;
        for (i, cluster) in report.clusters.iter().enumerate() {
            let mix = linalg::haar_state(cluster.basis.len(), rng);
            let mut member = CVec::zeros(wdim);
            for (j, b) in cluster.basis.iter().enumerate() {
                member += b * mix[j];
            }
            witness += &member * coeffs[i];
            predicted += coeffs[i].norm_sqr() * cluster.p;
        }
        let state =
            StateVector::from_amplitudes_normalized(m, witness.iter().copied().collect())?;
        let actual = proc.acceptance_probability(&state)?;
        worst = worst.max((actual - predicted).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use rand::SeedableRng;

    fn angle_pair(d: usize, placements: &[(usize, usize, f64)]) -> (CMat, CMat) {
        // Each placement (i, j, theta) puts w = e_i and v rotated toward
        // e_j into the pair.
        let mut p0 = CMat::zeros(d, d);
        let mut p1 = CMat::zeros(d, d);
        for &(i, j, theta) in placements {
            let mut w = CVec::zeros(d);
            w[i] = ONE;
            let mut v = CVec::zeros(d);
            v[i] = C64::new(theta.cos(), 0.0);
            v[j] = C64::new(theta.sin(), 0.0);
            p0 += outer(&w);
            p1 += outer(&v);
        }
        (p0, p1)
    }

    #[test]
    fn single_rotation_block_recovers_the_angle() {
        let theta = 0.3;
        let (p0, p1) = angle_pair(2, &[(0, 1, theta)]);
        let blocks = jordan_decompose(&p0, &p1).unwrap();
        assert_eq!(blocks.len(), 1);
        match &blocks[0] {
            JordanBlock::TwoDim { theta: t, p, w, v, .. } => {
                assert!((t - theta).abs() < 1e-10);
                assert!((p - theta.cos().powi(2)).abs() < 1e-10);
                assert!((w[0].norm() - 1.0).abs() < 1e-10);
                assert!((v[0].norm() - theta.cos()).abs() < 1e-10);
            }
            other => panic!("expected an angle block, got {other:?}"),
        }
    }

    #[test]
    fn commuting_projectors_split_into_labeled_lines() {
        // p0 keeps bits {0, 1}, p1 keeps bits {0, 2} of a 4-dim space.
        let diag = |bits: [f64; 4]| {
            CMat::from_fn(4, 4, |r, c| {
                if r == c {
                    C64::new(bits[r], 0.0)
                } else {
                    ZERO
                }
            })
        };
        let p0 = diag([1.0, 1.0, 0.0, 0.0]);
        let p1 = diag([1.0, 0.0, 1.0, 0.0]);
        let blocks = jordan_decompose(&p0, &p1).unwrap();
        assert_eq!(blocks.len(), 4);
        let mut labels = Vec::new();
        for b in &blocks {
            match b {
                JordanBlock::OneDim {
                    in_first,
                    in_second,
                    vector,
                } => {
                    let support = (0..4).find(|&i| vector[i].norm() > 0.9).unwrap();
                    labels.push((support, *in_first, *in_second));
                }
                other => panic!("expected line blocks, got {other:?}"),
            }
        }
        labels.sort();
        assert_eq!(
            labels,
            vec![
                (0, true, true),
                (1, true, false),
                (2, false, true),
                (3, false, false)
            ]
        );
    }

    #[test]
    fn mixed_decomposition_keeps_every_flavor() {
        // One angle block on (e0, e1), a shared line e2, a free line e3.
        let (mut p0, mut p1) = angle_pair(4, &[(0, 1, 0.4)]);
        let mut shared = CVec::zeros(4);
        shared[2] = ONE;
        p0 += outer(&shared);
        p1 += outer(&shared);
        let blocks = jordan_decompose(&p0, &p1).unwrap();
        let mut two = 0;
        let mut shared_seen = false;
        let mut free_seen = false;
        for b in &blocks {
            match b {
                JordanBlock::TwoDim { p, .. } => {
                    two += 1;
                    assert!((p - 0.4f64.cos().powi(2)).abs() < 1e-10);
                }
                JordanBlock::OneDim {
                    in_first: true,
                    in_second: true,
                    vector,
                } => {
                    shared_seen = true;
                    assert!(vector[2].norm() > 0.999);
                }
                JordanBlock::OneDim {
                    in_first: false,
                    in_second: false,
                    vector,
                } => {
                    free_seen = true;
                    assert!(vector[3].norm() > 0.999);
                }
                other => panic!("unexpected block {other:?}"),
            }
        }
        assert_eq!(two, 1);
        assert!(shared_seen && free_seen);
    }

    #[test]
    fn random_projector_pairs_decompose_and_rebuild() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let d = 8;
        let u = linalg::haar_unitary(d, &mut rng);
        let w = linalg::haar_unitary(d, &mut rng);
        let take = |m: &CMat, k: usize| -> CMat {
            let cols: Vec<CVec> = (0..k).map(|i| m.column(i).into_owned()).collect();
            linalg::projector_onto(&cols)
        };
        let p0 = take(&u, 3);
        let p1 = take(&w, 5);
        // The internal reconstruction check makes success itself the test.
        let blocks = jordan_decompose(&p0, &p1).unwrap();
        for b in &blocks {
            if let JordanBlock::TwoDim { p, .. } = b {
                assert!(*p > 0.0 && *p < 1.0);
            }
        }
    }

    #[test]
    fn both_routes_agree_on_a_synthesized_spectrum() {
        let proc =
            VerificationProcedure::synthesize_with_spectrum(&[(0.25, 1), (0.75, 3)]).unwrap();
        let report = spectrum(&proc, DENSE_CAP_QUBITS).unwrap();
        assert_eq!(report.clusters.len(), 2);
        assert!((report.clusters[0].p - 0.25).abs() < 1e-9);
        assert_eq!(report.clusters[0].multiplicity, 1);
        assert!((report.clusters[1].p - 0.75).abs() < 1e-9);
        assert_eq!(report.clusters[1].multiplicity, 3);

        let check = crosscheck_uniqueness(&proc, DENSE_CAP_QUBITS).unwrap();
        assert!(check.consistent, "gap {}", check.max_value_gap);
        assert!(check.max_value_gap < tol::CROSSCHECK);
        assert!(check.max_basis_defect < tol::CROSSCHECK);
    }

    #[test]
    fn degenerate_clusters_compare_as_subspaces() {
        let proc =
            VerificationProcedure::synthesize_with_spectrum(&[(0.2, 2), (0.9, 2)]).unwrap();
        let check = crosscheck_uniqueness(&proc, DENSE_CAP_QUBITS).unwrap();
        assert!(check.consistent);
    }

    #[test]
    fn superpositions_mix_without_interference() {
        let proc = VerificationProcedure::synthesize_with_spectrum(&[
            (0.1, 1),
            (0.5, 2),
            (0.95, 1),
        ])
        .unwrap();
        let report = spectrum(&proc, DENSE_CAP_QUBITS).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let defect = interference_defect(&proc, &report, 25, &mut rng).unwrap();
        assert!(defect < tol::EQUALITY, "defect {defect}");
    }

    #[test]
    fn auto_route_falls_back_past_the_dense_cap() {
        // 2 witness + 10 ancilla qubits: over the dense cap, fine directly.
        let mut proc = VerificationProcedure::new(2, 10, 2).unwrap();
        let theta = 2.0 * (0.36f64).sqrt().asin();
        proc.push_gate(crate::simcore::GateOp::rotation_y(2, theta))
            .unwrap();
        assert!(matches!(
            spectrum(&proc, DENSE_CAP_QUBITS),
            Err(Error::SizeCap { .. })
        ));
        let report =
            spectrum_via(&proc, RouteChoice::Auto, crate::qvp::OPERATOR_CAP_QUBITS).unwrap();
        assert_eq!(report.source, SpectrumSource::DirectOperator);
        assert_eq!(report.clusters.len(), 1);
        assert!((report.clusters[0].p - 0.36).abs() < 1e-12);
        assert_eq!(report.clusters[0].multiplicity, 4);
    }
}
