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

//! Numerical tolerance hierarchy.
//!
//! Every tolerance used for a correctness decision lives here, ordered from
//! strictest to loosest. Construction checks are strictest because errors
//! compound downstream; Monte Carlo checks are loosest because sampling noise
//! dominates.

/// Construction-time validation: unitarity, Hermiticity, projector
/// idempotence, state norms.
pub const CONSTRUCTION: f64 = 1e-10;

/// Equality of probabilities, amplitudes, and operators produced by exact
/// (non-sampled) computation.
pub const EQUALITY: f64 = 1e-9;

/// Clustering width when grouping nearby eigenvalues into one spectrum entry.
pub const CLUSTER: f64 = 1e-8;

/// Agreement between independently computed subspace projectors
/// (Frobenius distance).
pub const CROSSCHECK: f64 = 1e-7;

/// Monte Carlo estimates against exact values.
pub const MONTE_CARLO: f64 = 1e-6;
