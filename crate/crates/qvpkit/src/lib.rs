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

//! Desk-scale simulator and analysis toolkit for quantum verification
//! procedures.
//!
//! A *verification procedure* is a unitary circuit acting on a witness
//! register plus zero-initialized ancillas, followed by reading a single
//! designated qubit; one outcome means accept. Every such procedure has a
//! unique interference-free eigenbasis: acceptance probabilities of basis
//! vectors combine additively on superpositions. This crate simulates the
//! circuits, extracts the eigenbasis and spectrum by two independent routes,
//! transforms procedures while preserving the eigenbasis, and instantiates a
//! collection of worked problem families on top of those primitives.
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`simcore`] | dense state vectors, gates, coherent measurement, QFT, phase estimation |
//! | [`qvp`] | the procedure type, acceptance analysis, totality and gap checks |
//! | [`jordan`] | two-projector decomposition, spectra, eigenbasis cross-checks |
//! | [`reductions`] | deamplification, round-based amplification, bound retargeting |
//! | [`problems`] | local Hamiltonian, phase-estimation, and oracle problem builders |
//! | [`cli`] | deterministic report generation behind the `qvpkit` binary |
//!
//! Quick start:
//!
//! ```
//! use qvpkit::qvp::VerificationProcedure;
//! use qvpkit::jordan;
//!
//! // A two-qubit procedure with a prescribed acceptance spectrum.
//! let proc = VerificationProcedure::synthesize_with_spectrum(&[
//!     (0.25, 1),
//!     (0.75, 3),
//! ])
//! .unwrap();
//! let report = jordan::spectrum(&proc, jordan::DENSE_CAP_QUBITS).unwrap();
//! assert_eq!(report.clusters.len(), 2);
//! assert_eq!(report.clusters[1].multiplicity, 3);
//! ```
//!
//! See the `examples/` directory for one runnable walkthrough per major
//! capability.

pub mod cli;
pub mod instance;
pub mod jordan;
pub mod linalg;
pub mod problems;
pub mod qvp;
pub mod reductions;
pub mod report;
pub mod simcore;
pub mod tol;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by how the command-line harness maps them to exit
/// codes: input validation problems, resource limits, and internal
/// consistency failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("qubit index error: {0}")]
    QubitRange(String),
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not a projector (deviation {deviation:.3e})")]
    NotProjector { deviation: f64 },
    #[error("operators do not commute (deviation {deviation:.3e})")]
    NotCommuting { deviation: f64 },
    #[error("invalid state: {0}")]
    State(String),
    #[error("invalid density matrix: {0}")]
    Density(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("size cap exceeded: needs {needed} qubits, cap is {cap}")]
    SizeCap { needed: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    InternalCheck(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
