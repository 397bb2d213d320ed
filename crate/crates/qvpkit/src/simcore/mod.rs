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

//! Dense state-vector simulation.
//!
//! States are length `2^n` amplitude vectors with little-endian qubit
//! numbering: qubit `q` is bit `q` of the amplitude index, so appending a
//! register places it on higher-order bits. All measurement here is
//! coherent: outcomes are recorded into ancilla registers instead of
//! collapsing the state, which is what lets acceptance probabilities be read
//! off exactly.

mod fourier;
mod gate;
mod measure;
mod state;

pub use fourier::{
    apply_controlled_power, phase_estimate, phase_estimate_distribution, qft, MatrixPowerOracle,
    PowerOracle,
};
pub use gate::{apply_gate, GateKind, GateOp};
pub use measure::{qnd_measure, qnd_record, swap_test, MeasurementRecord, ProjectorSet};
pub use state::{DensityMatrix, StateVector};
