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

//! Dense complex linear algebra helpers shared by the analysis modules.
//!
//! Hermitian eigendecomposition is delegated to `nalgebra`; the unitary
//! (non-Hermitian) spectral decomposition is built on top of it by jointly
//! diagonalizing the commuting Hermitian and anti-Hermitian parts, which is
//! all a normal matrix needs.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: C64 = Complex64::new(0.0, 0.0);
pub const ONE: C64 = Complex64::new(1.0, 0.0);
pub const I: C64 = Complex64::new(0.0, 1.0);

/// Maximum absolute entry of `m - m†`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Maximum absolute entry of `m† m - I`.
pub fn unitary_deviation(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    let n = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { ONE } else { ZERO };
            worst = worst.max((gram[(i, j)] - expect).norm());
        }
    }
    worst
}

/// Maximum of the Hermitian deviation and the idempotence deviation of `m`.
pub fn projector_deviation(m: &CMat) -> f64 {
    let idem = (m * m - m).iter().map(|z| z.norm()).fold(0.0, f64::max);
    hermitian_deviation(m).max(idem)
}

/// Frobenius distance between two matrices of equal shape.
pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of the commutator `ab - ba`.
pub fn commutator_norm(a: &CMat, b: &CMat) -> f64 {
    let c = a * b - b * a;
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Sum of |v><v| over the given orthonormal columns.
pub fn projector_onto(basis: &[CVec]) -> CMat {
    let dim = basis.first().map_or(0, |v| v.len());
    let mut p = CMat::zeros(dim, dim);
    for v in basis {
        p += v * v.adjoint();
    }
    p
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Returns `(values, vectors)` with orthonormal eigenvector columns in the
/// same order as the values.
pub fn eigh(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    let dev = hermitian_deviation(h);
    if dev > 1e-8 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let sym = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[a].total_cmp(&sym.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &sym.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// Groups sorted positions of `values` into clusters whose members lie
/// within `width` of the running cluster mean. Returns `(mean, indices)`
/// per cluster, ordered by ascending mean.
pub fn cluster_values(values: &[f64], width: f64) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
    for idx in order {
        let v = values[idx];
        match clusters.last_mut() {
            Some((mean, members)) if (v - *mean).abs() <= width => {
                members.push(idx);
                let k = members.len() as f64;
                *mean += (v - *mean) / k;
            }
            _ => clusters.push((v, vec![idx])),
        }
    }
    clusters
}

/// Spectral decomposition of a unitary matrix.
///
/// Returns eigenphases `phi` in `[0, 1)` (eigenvalue `exp(2 pi i phi)`) and
/// the matching orthonormal eigenvector columns, ordered by ascending phase.
/// Works by diagonalizing `(U + U†)/2` and then resolving each eigenspace
/// with `(U - U†)/(2i)`; the two commute exactly when `U` is normal.
pub fn unitary_eigenphases(u: &CMat) -> Result<(Vec<f64>, CMat)> {
    let dev = unitary_deviation(u);
    if dev > 1e-8 {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let n = u.nrows();
    let adj = u.adjoint();
    let cos_part = (u + &adj).map(|z| z * 0.5);
    let sin_part = (u - &adj).map(|z| z * C64::new(0.0, -0.5));
    let (cos_vals, cos_vecs) = eigh(&cos_part)?;
    let mut phases = Vec::with_capacity(n);
    let mut vectors = CMat::zeros(n, n);
    let mut col = 0;
    for (c_mean, members) in cluster_values(&cos_vals, 1e-9) {
        let t = members.len();
        let mut block = CMat::zeros(n, t);
        for (j, &idx) in members.iter().enumerate() {
            block.set_column(j, &cos_vecs.column(idx));
        }
        let restricted = block.adjoint() * &sin_part * &block;
        let (s_vals, s_vecs) = eigh(&restricted)?;
        let rotated = &block * &s_vecs;
        for j in 0..t {
            let phi = s_vals[j].atan2(c_mean) / std::f64::consts::TAU;
            phases.push(phi.rem_euclid(1.0));
            vectors.set_column(col, &rotated.column(j));
            col += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    let sorted_phases: Vec<f64> = order.iter().map(|&i| phases[i]).collect();
    let mut sorted_vectors = CMat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        sorted_vectors.set_column(j, &vectors.column(i));
    }
    Ok((sorted_phases, sorted_vectors))
}

/// Multiplies `v` by a global phase making its first significant component
/// real and positive. Leaves the zero vector untouched.
pub fn canonical_phase(v: &mut CVec) {
    for i in 0..v.len() {
        let z = v[i];
        if z.norm() > 1e-12 {
            let phase = z / z.norm();
            let correction = phase.conj();
            for j in 0..v.len() {
                v[j] *= correction;
            }
            return;
        }
    }
}

/// Orthonormal basis of the span of `vectors` via modified Gram-Schmidt;
/// drops vectors whose residual norm falls below 1e-10.
pub fn orthonormalize(vectors: &[CVec]) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let overlap = b.dotc(&w);
            w -= b * overlap;
        }
        let norm = w.norm();
        if norm > 1e-10 {
            basis.push(w / C64::new(norm, 0.0));
        }
    }
    basis
}

/// 4x4 permutation exchanging the two qubits of a block.
pub fn swap_block() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

/// 2x2 rotation about Y by `theta`; the |0> column is
/// (cos(theta/2), sin(theta/2)).
pub fn rotation_y(theta: f64) -> CMat {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(c, 0.0),
        ],
    )
}

/// Kronecker product, second factor fastest (block `a[i][j] * b`).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let scale = a[(i, j)];
            if scale == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = scale * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Unit vector drawn from the rotation-invariant distribution on the
/// `dim`-dimensional complex sphere.
pub fn haar_state<R: Rng>(dim: usize, rng: &mut R) -> CVec {
    loop {
        let mut v = CVec::from_fn(dim, |_, _| {
            C64::new(gaussian(rng), gaussian(rng))
        });
        let norm = v.norm();
        if norm > 1e-6 {
            v /= C64::new(norm, 0.0);
            return v;
        }
    }
}

/// Unitary drawn from the Haar distribution: complex Gaussian matrix,
/// QR factorization, column phases fixed by the R diagonal.
pub fn haar_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 1e-12 { d / d.norm() } else { ONE };
        let correction = phase.conj();
        for i in 0..dim {
            q[(i, j)] *= correction;
        }
    }
    q
}

/// Standard normal sample via Box-Muller, driven by the supplied generator.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
