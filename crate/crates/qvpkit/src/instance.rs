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

//! Instance files.
//!
//! Instances are TOML documents with a `problem` tag selecting the family
//! and one block of family parameters. Numbers that must stay exact
//! (spectrum values, term eigenvalues) are written as ratio strings such
//! as `"2/3"`; matrices are row-major arrays of `[re, im]` pairs.
//!
//! ```toml
//! problem = "qsat"
//! n = 2
//! flavor = "projector"
//!
//! [[terms]]
//! support = [0]
//! matrix = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
//! ```
//!
//! Families and their blocks:
//!
//! | `problem` | parameters |
//! |-----------|------------|
//! | `synthetic` | `[[spectrum]]` entries with `value`, `multiplicity` |
//! | `qsat` | `n`, `flavor = "projector"`, `[[terms]]` |
//! | `near-degenerate` | `n`, `[[terms]]` with `eigenvalues` ratio lists |
//! | `multicopy` | `n`, `[[terms]]` |
//! | `phase-estimation` | `n`, `[[terms]]`, optional `bits` |
//! | `marked-state` | `[oracle]` with `n`, `seed` |
//! | `unitary-powers` | `[oracle]` with `n`, `seed`, optional `bits`, `close`, `copies` |
//! | `group-non-membership` | `[group]` block |

use std::path::Path;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Deserialize;

use crate::linalg::{C64, CMat};
use crate::problems::group::{GnmConfig, GroupOracle, GroupSpec};
use crate::problems::hamiltonian::{HamiltonianInstance, HamiltonianTerm};
use crate::problems::oracle::{HiddenUnitaryOracle, MarkedStateOracle};
use crate::problems::{self};
use crate::qvp::{BoundsPair, VerificationProcedure};
use crate::{Error, Result};

use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    problem: String,
    n: Option<usize>,
    flavor: Option<String>,
    bits: Option<usize>,
    terms: Option<Vec<TermFile>>,
    spectrum: Option<Vec<SpectrumEntryFile>>,
    oracle: Option<OracleFile>,
    group: Option<GroupFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    support: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
    eigenvalues: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumEntryFile {
    value: String,
    multiplicity: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleFile {
    kind: String,
    n: usize,
    seed: u64,
    bits: Option<usize>,
    close: Option<usize>,
    copies: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    kind: String,
    size: usize,
    generators: Vec<usize>,
    target: usize,
    seed: u64,
    label_bits: Option<usize>,
    closure_rounds: Option<usize>,
    word_length: Option<usize>,
    cert_slots: Option<usize>,
}

/// A parsed, validated instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Synthetic {
        spectrum: Vec<(Ratio<i64>, usize)>,
    },
    Qsat {
        instance: HamiltonianInstance,
    },
    NearDegenerate {
        instance: HamiltonianInstance,
    },
    Multicopy {
        instance: HamiltonianInstance,
    },
    PhaseEstimation {
        instance: HamiltonianInstance,
        bits: usize,
    },
    MarkedState {
        n: usize,
        seed: u64,
    },
    UnitaryPowers {
        n: usize,
        seed: u64,
        bits: usize,
        close: usize,
        copies: usize,
    },
    GroupNonMembership {
        kind: String,
        size: usize,
        generators: Vec<usize>,
        target: usize,
        seed: u64,
        label_bits: usize,
        config: GnmConfig,
    },
}

fn ceil_log2(x: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < x {
        bits += 1;
    }
    bits
}

fn parse_matrix(term_index: usize, rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let dim = rows.len();
    let mut m = CMat::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Parse(format!(
                "terms[{term_index}].matrix row {r} has {} entries, expected {dim}",
                row.len()
            )));
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            m[(r, c)] = C64::new(re, im);
        }
    }
    Ok(m)
}

fn parse_terms(file_terms: &[TermFile]) -> Result<Vec<HamiltonianTerm>> {
    let mut terms = Vec::new();
    for (i, t) in file_terms.iter().enumerate() {
        let matrix = parse_matrix(i, &t.matrix)?;
        if matrix.nrows() != 1 << t.support.len() {
            return Err(Error::Parse(format!(
                "terms[{i}].matrix is {}x{} but support has {} qubits",
                matrix.nrows(),
                matrix.ncols(),
                t.support.len()
            )));
        }
        let term = match &t.eigenvalues {
            Some(values) => {
                let mut parsed = Vec::new();
                for (j, v) in values.iter().enumerate() {
                    parsed.push(BoundsPair::parse_ratio(v).map_err(|e| {
                        Error::Parse(format!("terms[{i}].eigenvalues[{j}]: {e}"))
                    })?);
                }
                HamiltonianTerm::new(t.support.clone(), matrix)?.with_rational_values(parsed)?
            }
            None => HamiltonianTerm::new(t.support.clone(), matrix)?,
        };
        terms.push(term);
    }
    Ok(terms)
}

fn require<T>(value: Option<T>, field: &str, problem: &str) -> Result<T> {
    value.ok_or_else(|| Error::Parse(format!("problem {problem:?} requires field {field:?}")))
}

impl Instance {
    /// Parses and validates an instance document.
    pub fn parse(text: &str) -> Result<Instance> {
        let file: InstanceFile =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Instance::from_file(file)
    }

    /// Reads an instance file from disk.
    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Instance::parse(&text)
    }

    fn from_file(file: InstanceFile) -> Result<Instance> {
        let problem = file.problem.as_str();
        match problem {
            "synthetic" => {
                let entries = require(file.spectrum, "spectrum", problem)?;
                if entries.is_empty() {
                    return Err(Error::Parse("spectrum has no entries".into()));
                }
                let mut spectrum = Vec::new();
                for (i, e) in entries.iter().enumerate() {
                    let value = BoundsPair::parse_ratio(&e.value)
                        .map_err(|err| Error::Parse(format!("spectrum[{i}].value: {err}")))?;
                    if value < Ratio::new(0, 1) || value > Ratio::new(1, 1) {
                        return Err(Error::Parse(format!(
                            "spectrum[{i}].value {value} outside [0, 1]"
                        )));
                    }
                    if e.multiplicity == 0 {
                        return Err(Error::Parse(format!(
                            "spectrum[{i}].multiplicity is zero"
                        )));
                    }
                    spectrum.push((value, e.multiplicity));
                }
                Ok(Instance::Synthetic { spectrum })
            }
            "qsat" | "near-degenerate" | "multicopy" | "phase-estimation" => {
                let n = require(file.n, "n", problem)?;
                let terms = parse_terms(&require(file.terms, "terms", problem)?)?;
                if problem == "qsat" {
                    let flavor = file.flavor.as_deref().unwrap_or("projector");
                    if flavor != "projector" {
                        return Err(Error::Parse(format!(
                            "qsat instances require flavor \"projector\", got {flavor:?}"
                        )));
                    }
                }
                let instance = HamiltonianInstance::new(n, terms)?;
                Ok(match problem {
                    "qsat" => Instance::Qsat { instance },
                    "near-degenerate" => Instance::NearDegenerate { instance },
                    "multicopy" => Instance::Multicopy { instance },
                    _ => Instance::PhaseEstimation {
                        instance,
                        bits: file.bits.unwrap_or(4),
                    },
                })
            }
            "marked-state" => {
                let oracle = require(file.oracle, "oracle", problem)?;
                if oracle.kind != "marked-state" {
                    return Err(Error::Parse(format!(
                        "oracle.kind {:?} does not match problem \"marked-state\"",
                        oracle.kind
                    )));
                }
                Ok(Instance::MarkedState {
                    n: oracle.n,
                    seed: oracle.seed,
                })
            }
            "unitary-powers" => {
                let oracle = require(file.oracle, "oracle", problem)?;
                if oracle.kind != "unitary-powers" {
                    return Err(Error::Parse(format!(
                        "oracle.kind {:?} does not match problem \"unitary-powers\"",
                        oracle.kind
                    )));
                }
                let copies = oracle.copies.unwrap_or(2);
                if !(2..=3).contains(&copies) {
                    return Err(Error::Parse(format!(
                        "oracle.copies must be 2 or 3, got {copies}"
                    )));
                }
                let bits = oracle.bits.unwrap_or(oracle.n);
                Ok(Instance::UnitaryPowers {
                    n: oracle.n,
                    seed: oracle.seed,
                    bits,
                    close: oracle.close.unwrap_or(if copies == 2 { 5 } else { 10 }),
                    copies,
                })
            }
            "group-non-membership" => {
                let group = require(file.group, "group", problem)?;
                let order = match group.kind.as_str() {
                    "cyclic" => group.size,
                    "dihedral" => 2 * group.size,
                    other => {
                        return Err(Error::Parse(format!(
                            "group.kind {other:?} is not \"cyclic\" or \"dihedral\""
                        )))
                    }
                };
                if order == 0 {
                    return Err(Error::Parse("group.size is zero".into()));
                }
                let label_bits = group
                    .label_bits
                    .unwrap_or_else(|| (ceil_log2(order) + 1).min(10));
                let config = GnmConfig {
                    closure_rounds: group.closure_rounds.unwrap_or(2),
                    word_length: group.word_length.unwrap_or(4),
                    cert_slots: group.cert_slots.unwrap_or(2),
                    word_seed: group.seed,
                };
                Ok(Instance::GroupNonMembership {
                    kind: group.kind,
                    size: group.size,
                    generators: group.generators,
                    target: group.target,
                    seed: group.seed,
                    label_bits,
                    config,
                })
            }
            other => Err(Error::Parse(format!(
                "unknown problem tag {other:?} (expected synthetic, qsat, near-degenerate, \
                 multicopy, phase-estimation, marked-state, unitary-powers, or \
                 group-non-membership)"
            ))),
        }
    }

    /// Short description for reports.
    pub fn describe(&self) -> String {
        match self {
            Instance::Synthetic { spectrum } => {
                format!("synthetic[{} clusters]", spectrum.len())
            }
            Instance::Qsat { instance } => {
                format!("qsat[n={}, terms={}]", instance.n(), instance.terms().len())
            }
            Instance::NearDegenerate { instance } => format!(
                "near-degenerate[n={}, terms={}]",
                instance.n(),
                instance.terms().len()
            ),
            Instance::Multicopy { instance } => format!(
                "multicopy[n={}, terms={}]",
                instance.n(),
                instance.terms().len()
            ),
            Instance::PhaseEstimation { instance, bits } => format!(
                "phase-estimation[n={}, terms={}, bits={bits}]",
                instance.n(),
                instance.terms().len()
            ),
            Instance::MarkedState { n, seed } => format!("marked-state[n={n}, seed={seed}]"),
            Instance::UnitaryPowers {
                n,
                seed,
                bits,
                close,
                copies,
            } => format!(
                "unitary-powers[q={n}, bits={bits}, close={close}, copies={copies}, seed={seed}]"
            ),
            Instance::GroupNonMembership {
                kind,
                size,
                target,
                seed,
                ..
            } => format!("group-non-membership[{kind} {size}, target={target}, seed={seed}]"),
        }
    }

    /// Replaces the instance's random seed, used when the harness supplies
    /// one explicitly.
    pub fn override_seed(&mut self, new_seed: u64) {
        match self {
            Instance::MarkedState { seed, .. } | Instance::UnitaryPowers { seed, .. } => {
                *seed = new_seed;
            }
            Instance::GroupNonMembership { seed, config, .. } => {
                *seed = new_seed;
                config.word_seed = new_seed;
            }
            _ => {}
        }
    }

    /// Replaces the precision-bit count where the family has one.
    pub fn override_bits(&mut self, new_bits: usize) {
        match self {
            Instance::PhaseEstimation { bits, .. } | Instance::UnitaryPowers { bits, .. } => {
                *bits = new_bits;
            }
            _ => {}
        }
    }

    /// Spectrum values as floats, for the synthetic family.
    pub fn spectrum_f64(&self) -> Option<Vec<(f64, usize)>> {
        match self {
            Instance::Synthetic { spectrum } => Some(
                spectrum
                    .iter()
                    .map(|(v, m)| (v.to_f64().unwrap_or(f64::NAN), *m))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Builds the group oracle for a group instance.
    pub fn group_oracle(&self) -> Result<Rc<GroupOracle>> {
        let Instance::GroupNonMembership {
            kind,
            size,
            generators,
            target,
            seed,
            label_bits,
            ..
        } = self
        else {
            return Err(Error::Parameter(
                "instance is not a group-non-membership problem".into(),
            ));
        };
        let spec = match kind.as_str() {
            "cyclic" => GroupSpec::cyclic(*size)?,
            _ => GroupSpec::dihedral(*size)?,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        GroupOracle::new(spec, generators.clone(), *target, *label_bits, &mut rng)
    }

    /// Builds the marked-state oracle for a marked-state instance.
    pub fn marked_oracle(&self) -> Result<Rc<MarkedStateOracle>> {
        let Instance::MarkedState { n, seed } = self else {
            return Err(Error::Parameter(
                "instance is not a marked-state problem".into(),
            ));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        MarkedStateOracle::haar(*n, &mut rng)
    }

    /// Builds the hidden-unitary oracle for a unitary-powers instance.
    pub fn unitary_oracle(&self) -> Result<Rc<HiddenUnitaryOracle>> {
        let Instance::UnitaryPowers { n, seed, .. } = self else {
            return Err(Error::Parameter(
                "instance is not a unitary-powers problem".into(),
            ));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        let u = crate::linalg::haar_unitary(1 << n, &mut rng);
        HiddenUnitaryOracle::new(&u)
    }

    /// Builds the verification procedure the instance describes.
    pub fn build_procedure(&self) -> Result<VerificationProcedure> {
        match self {
            Instance::Synthetic { .. } => {
                let spectrum = self.spectrum_f64().expect("synthetic");
                VerificationProcedure::synthesize_with_spectrum(&spectrum)
            }
            Instance::Qsat { instance } => problems::hamiltonian::build_qsat_procedure(instance),
            Instance::NearDegenerate { instance } => {
                problems::hamiltonian::build_near_degeneracy_procedure(instance)
            }
            Instance::Multicopy { instance } => {
                problems::hamiltonian::build_multicopy_procedure(instance)
            }
            Instance::PhaseEstimation { instance, bits } => {
                problems::qlll::build_phase_estimation_procedure(instance, *bits)
            }
            Instance::MarkedState { .. } => {
                problems::oracle::build_marked_state_procedure(&self.marked_oracle()?)
            }
            Instance::UnitaryPowers {
                bits,
                close,
                copies,
                ..
            } => {
                let oracle = self.unitary_oracle()?;
                if *copies == 2 {
                    problems::oracle::build_phase_pair_procedure(&oracle, *bits, *close)
                } else {
                    problems::oracle::build_phase_triple_procedure(&oracle, *bits, *close)
                }
            }
            Instance::GroupNonMembership { config, .. } => {
                problems::group::build_gnm_procedure(&self.group_oracle()?, config)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_round_trips_through_a_procedure() {
        let text = r#"
            problem = "synthetic"

            [[spectrum]]
            value = "1/3"
            multiplicity = 1

            [[spectrum]]
            value = "2/3"
            multiplicity = 3
        "#;
        let instance = Instance::parse(text).unwrap();
        let proc = instance.build_procedure().unwrap();
        assert_eq!(proc.witness_qubits(), 2);
    }

    #[test]
    fn qsat_file_parses_terms() {
        let text = r#"
            problem = "qsat"
            n = 2
            flavor = "projector"

            [[terms]]
            support = [0]
            matrix = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]

            [[terms]]
            support = [1]
            matrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
        "#;
        let instance = Instance::parse(text).unwrap();
        let proc = instance.build_procedure().unwrap();
        assert_eq!(proc.witness_qubits(), 5);
    }

    #[test]
    fn errors_name_the_offending_field() {
        let missing = Instance::parse("problem = \"qsat\"\nn = 2\n").unwrap_err();
        assert!(missing.to_string().contains("terms"), "{missing}");
        let unknown = Instance::parse("problem = \"qsat\"\nn = 2\nbogus = 1\n").unwrap_err();
        assert!(unknown.to_string().contains("bogus"), "{unknown}");
        let tag = Instance::parse("problem = \"mystery\"\n").unwrap_err();
        assert!(tag.to_string().contains("mystery"), "{tag}");
        let bad_ratio = Instance::parse(
            "problem = \"synthetic\"\n[[spectrum]]\nvalue = \"x/y\"\nmultiplicity = 1\n",
        )
        .unwrap_err();
        assert!(bad_ratio.to_string().contains("spectrum[0]"), "{bad_ratio}");
    }

    #[test]
    fn oracle_instances_are_seed_deterministic() {
        let text = r#"
            problem = "marked-state"

            [oracle]
            kind = "marked-state"
            n = 3
            seed = 11
        "#;
        let a = Instance::parse(text).unwrap().marked_oracle().unwrap();
        let b = Instance::parse(text).unwrap().marked_oracle().unwrap();
        for x in 0..8 {
            assert_eq!(a.hidden_state()[x], b.hidden_state()[x]);
        }
        let mut c = Instance::parse(text).unwrap();
        c.override_seed(12);
        let c = c.marked_oracle().unwrap();
        assert!((0..8).any(|x| (a.hidden_state()[x] - c.hidden_state()[x]).norm() > 1e-12));
    }

    #[test]
    fn group_instance_builds_a_procedure() {
        let text = r#"
            problem = "group-non-membership"

            [group]
            kind = "cyclic"
            size = 8
            generators = [2]
            target = 1
            seed = 3
            closure_rounds = 1
            word_length = 2
            cert_slots = 2
        "#;
        let instance = Instance::parse(text).unwrap();
        let oracle = instance.group_oracle().unwrap();
        assert!(!oracle.target_is_member());
        let proc = instance.build_procedure().unwrap();
        assert!(proc.total_qubits() <= 14);
    }
}
