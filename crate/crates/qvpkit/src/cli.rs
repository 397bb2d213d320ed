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

//! Command-line harness behind the `qvpkit` binary.
//!
//! Commands read an instance file, run deterministic analyses, and emit a
//! line-delimited report to stdout (and `--out` when given). Identical
//! configuration and seed produce byte-identical reports.
//!
//! Exit codes: 0 success, 2 input error (unparseable file or invalid
//! flags), 3 resource or feasibility limit (size cap, unreachable
//! reduction), 4 internal consistency failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::instance::Instance;
use crate::problems::group::{self, CertSymbol, GnmConfig};
use crate::problems::oracle as oracle_problems;
use crate::problems::{hamiltonian, qlll};
use crate::qvp::{BoundsPair, VerificationProcedure, OPERATOR_CAP_QUBITS};
use crate::report::Report;
use crate::{jordan, linalg, reductions, tol, Error};

/// Environment variable supplying a default size cap.
pub const SIZE_CAP_ENV: &str = "QVPKIT_CAP";

#[derive(Debug, Parser)]
#[command(
    name = "qvpkit",
    version,
    about = "Simulate and analyze quantum verification procedures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the acceptance spectrum by two routes and cross-check them.
    Spectrum(CommonArgs),
    /// Check totality, the promise gap, and family-specific contracts.
    Verify(CommonArgs),
    /// Transform promise bounds: deamplify, amplify, or retarget.
    Reduce(ReduceArgs),
    /// Run amplitude amplification against a marked-state instance.
    Grover(CommonArgs),
    /// Analyze a group non-membership instance.
    Gnm(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Instance file (TOML).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Seed override for oracle-backed instances.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Precision-bit override for phase-estimation families.
    #[arg(long)]
    pub bits: Option<usize>,
    /// Upper promise bound, e.g. "2/3".
    #[arg(long)]
    pub a: Option<String>,
    /// Lower promise bound, e.g. "1/3".
    #[arg(long)]
    pub b: Option<String>,
    /// Also write the report to this path (atomically).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Qubit cap for dense operator work.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Accept-side rotation weight for deamplification, e.g. "4/5".
    #[arg(long)]
    pub z: Option<String>,
    /// Reject-side rotation weight, e.g. "1/5".
    #[arg(long = "z-prime")]
    pub z_prime: Option<String>,
    /// Amplifier round count.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Amplifier agreement fraction, e.g. "1/2".
    #[arg(long)]
    pub tau: Option<String>,
    /// Target upper bound for retargeting.
    #[arg(long = "target-a")]
    pub target_a: Option<String>,
    /// Target lower bound for retargeting.
    #[arg(long = "target-b")]
    pub target_b: Option<String>,
    /// Dyadic mark exponent the retargeting amplifier must clear.
    #[arg(long, default_value_t = 3)]
    pub sharpness: u32,
}

/// A command failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::SizeCap { .. } => 3,
            Error::InternalCheck(_) => 4,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = std::result::Result<Report, Failure>;

/// Runs a parsed command line, printing the report or error, and returns
/// the exit code.
pub fn run(cli: &Cli) -> i32 {
    let (common, result) = dispatch(cli);
    match result {
        Ok(report) => {
            let text = report.render();
            print!("{text}");
            if let Some(path) = common {
                if let Err(e) = write_atomically(&path, &text) {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> (Option<PathBuf>, CmdResult) {
    match &cli.command {
        Command::Spectrum(args) => (args.out.clone(), cmd_spectrum(args)),
        Command::Verify(args) => (args.out.clone(), cmd_verify(args)),
        Command::Reduce(args) => (args.common.out.clone(), cmd_reduce(args)),
        Command::Grover(args) => (args.out.clone(), cmd_grover(args)),
        Command::Gnm(args) => (args.out.clone(), cmd_gnm(args)),
    }
}

fn write_atomically(path: &Path, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

fn resolve_cap(args: &CommonArgs) -> std::result::Result<usize, Failure> {
    if let Some(cap) = args.cap {
        if cap == 0 {
            return Err(Failure::new(2, "--cap must be positive"));
        }
        return Ok(cap);
    }
    match std::env::var(SIZE_CAP_ENV) {
        Ok(text) => text
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| {
                Failure::new(2, format!("{SIZE_CAP_ENV}={text:?} is not a positive integer"))
            }),
        Err(_) => Ok(OPERATOR_CAP_QUBITS),
    }
}

fn load_instance(args: &CommonArgs) -> std::result::Result<Instance, Failure> {
    let path = args
        .instance
        .as_ref()
        .ok_or_else(|| Failure::new(2, "--instance is required"))?;
    let mut instance = Instance::load(path)?;
    if let Some(seed) = args.seed {
        instance.override_seed(seed);
    }
    if let Some(bits) = args.bits {
        instance.override_bits(bits);
    }
    Ok(instance)
}

fn parse_bound(text: Option<&str>, default: &str, flag: &str) -> std::result::Result<Ratio<i64>, Failure> {
    BoundsPair::parse_ratio(text.unwrap_or(default))
        .map_err(|e| Failure::new(2, format!("{flag}: {e}")))
}

fn bounds_from(args: &CommonArgs) -> std::result::Result<BoundsPair, Failure> {
    let a = parse_bound(args.a.as_deref(), "2/3", "--a")?;
    let b = parse_bound(args.b.as_deref(), "1/3", "--b")?;
    BoundsPair::new(a, b).map_err(Failure::from)
}

fn header(report: &mut Report, instance: &Instance, args: &CommonArgs, cap: usize) {
    report.field("instance", instance.describe());
    if let Some(seed) = args.seed {
        report.field("seed", seed);
    }
    report.field("cap_qubits", cap);
}

fn spectrum_fields(report: &mut Report, spec: &jordan::SpectrumReport, prefix: &str) {
    report.field(format!("{prefix}.clusters").as_str(), spec.clusters.len());
    for (i, c) in spec.clusters.iter().enumerate() {
        report.field_f64(format!("{prefix}.{i}.p").as_str(), c.p);
        report.field(
            format!("{prefix}.{i}.multiplicity").as_str(),
            c.multiplicity,
        );
    }
}

fn cmd_spectrum(args: &CommonArgs) -> CmdResult {
    let instance = load_instance(args)?;
    let cap = resolve_cap(args)?;
    let proc = instance.build_procedure()?;
    let dense_cap = cap.min(jordan::DENSE_CAP_QUBITS);
    let check = jordan::crosscheck_uniqueness(&proc, dense_cap)?;
    let mut report = Report::new("spectrum");
    header(&mut report, &instance, args, cap);
    report.field("witness_qubits", proc.witness_qubits());
    report.field("total_qubits", proc.total_qubits());
    spectrum_fields(&mut report, &check.jordan, "cluster");
    report.field_f64("crosscheck.max_value_gap", check.max_value_gap);
    report.field_f64("crosscheck.max_basis_defect", check.max_basis_defect);
    report.field("crosscheck.consistent", check.consistent);
    report.field_f64("tolerance.crosscheck", tol::CROSSCHECK);
    if !check.consistent {
        return Err(Failure::new(
            4,
            format!(
                "spectrum routes disagree: value gap {:.3e}, basis defect {:.3e}",
                check.max_value_gap, check.max_basis_defect
            ),
        ));
    }
    if args.a.is_some() || args.b.is_some() {
        let bounds = bounds_from(args)?;
        let (ge_a, le_b) = relation_dimensions(&check.jordan, &bounds);
        report.field("relation.dim_ge_a", ge_a);
        report.field("relation.dim_le_b", le_b);
    }
    Ok(report)
}

fn relation_dimensions(spec: &jordan::SpectrumReport, bounds: &BoundsPair) -> (usize, usize) {
    let a = bounds.a_f64();
    let b = bounds.b_f64();
    let ge_a = spec
        .clusters
        .iter()
        .filter(|c| c.p >= a - tol::EQUALITY)
        .map(|c| c.multiplicity)
        .sum();
    let le_b = spec
        .clusters
        .iter()
        .filter(|c| c.p <= b + tol::EQUALITY)
        .map(|c| c.multiplicity)
        .sum();
    (ge_a, le_b)
}

fn cmd_verify(args: &CommonArgs) -> CmdResult {
    let instance = load_instance(args)?;
    let cap = resolve_cap(args)?;
    let bounds = bounds_from(args)?;
    let proc = instance.build_procedure()?;
    // The operator route scales with the witness register, not the full
    // circuit; the dual-route crosscheck lives in the spectrum command.
    let spec = jordan::spectrum_via(&proc, jordan::RouteChoice::DirectOperator, cap)?;
    let (total, witness) = proc.check_total(bounds.a_f64(), cap)?;
    let witness_p = proc.acceptance_probability(&witness)?;
    let gapped = proc.check_gapped(&bounds, cap, tol::EQUALITY)?;
    let (ge_a, le_b) = relation_dimensions(&spec, &bounds);
    let mut report = Report::new("verify");
    header(&mut report, &instance, args, cap);
    report.field("bounds.a", bounds.a());
    report.field("bounds.b", bounds.b());
    report.field("total", total);
    report.field_f64("witness.acceptance", witness_p);
    report.field("gapped", gapped);
    report.field("relation.dim_ge_a", ge_a);
    report.field("relation.dim_le_b", le_b);
    spectrum_fields(&mut report, &spec, "cluster");
    family_checks(&instance, &proc, &spec, cap, &mut report)?;
    Ok(report)
}

/// Family-specific contract checks; a violated contract exits 4.
fn family_checks(
    instance: &Instance,
    proc: &VerificationProcedure,
    spec: &jordan::SpectrumReport,
    cap: usize,
    report: &mut Report,
) -> std::result::Result<(), Failure> {
    let top = spec.clusters.last().expect("spectrum is never empty");
    match instance {
        Instance::Synthetic { spectrum } => {
            if spectrum.len() != spec.clusters.len() {
                return Err(Failure::new(
                    4,
                    format!(
                        "declared {} clusters, measured {}",
                        spectrum.len(),
                        spec.clusters.len()
                    ),
                ));
            }
            let mut declared: Vec<(f64, usize)> = spectrum
                .iter()
                .map(|(v, m)| (v.to_f64().unwrap_or(f64::NAN), *m))
                .collect();
            declared.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut worst = 0.0f64;
            for ((dv, dm), c) in declared.iter().zip(&spec.clusters) {
                worst = worst.max((dv - c.p).abs());
                if *dm != c.multiplicity {
                    return Err(Failure::new(
                        4,
                        format!(
                            "multiplicity at p = {dv} is {}, declared {dm}",
                            c.multiplicity
                        ),
                    ));
                }
            }
            report.field_f64("family.synthetic.max_value_defect", worst);
            if worst > tol::EQUALITY {
                return Err(Failure::new(4, "measured spectrum drifts from declaration"));
            }
        }
        Instance::Qsat { instance } => {
            let expected_dim = hamiltonian::qsat_accepting_dimension(instance)?;
            let brute = hamiltonian::qsat_accepting_projector(instance)?;
            let spectral = if top.p >= 1.0 - tol::EQUALITY {
                linalg::projector_onto(&top.basis)
            } else {
                linalg::CMat::zeros(brute.nrows(), brute.ncols())
            };
            let distance = linalg::frobenius_distance(&brute, &spectral);
            let measured_dim = if top.p >= 1.0 - tol::EQUALITY {
                top.multiplicity
            } else {
                0
            };
            report.field("family.qsat.accepting_dimension", expected_dim);
            report.field("family.qsat.measured_dimension", measured_dim);
            report.field_f64("family.qsat.projector_distance", distance);
            if measured_dim != expected_dim || distance > tol::CROSSCHECK {
                return Err(Failure::new(
                    4,
                    format!(
                        "accepting projector drifts from construction: dim {measured_dim} vs \
                         {expected_dim}, distance {distance:.3e}"
                    ),
                ));
            }
        }
        Instance::NearDegenerate { instance } => {
            let pairs = hamiltonian::near_degenerate_pairs(instance)?;
            let has_pair = !pairs.is_empty();
            let accepts = top.p >= 1.0 - tol::EQUALITY;
            report.field("family.near_degenerate.pairs", pairs.len());
            report.field("family.near_degenerate.accepts", accepts);
            if has_pair != accepts {
                return Err(Failure::new(
                    4,
                    format!("{} close pairs but top acceptance {}", pairs.len(), top.p),
                ));
            }
        }
        Instance::Multicopy { instance } => {
            let expected = hamiltonian::multicopy_accepting_dimension(instance)?;
            let measured = if top.p >= 1.0 - tol::EQUALITY {
                top.multiplicity
            } else {
                0
            };
            report.field("family.multicopy.expected_dimension", expected);
            report.field("family.multicopy.measured_dimension", measured);
            if measured != expected {
                return Err(Failure::new(
                    4,
                    format!("collision dimension {measured}, expected {expected}"),
                ));
            }
        }
        Instance::PhaseEstimation { instance, bits } => {
            let levels = qlll::energy_levels(instance)?;
            let ground = levels.first().map(|&(e, _)| e).unwrap_or(f64::NAN);
            let expected = qlll::acceptance_for_energy(ground, *bits);
            report.field_f64("family.phase_estimation.ground_energy", ground);
            report.field_f64("family.phase_estimation.ground_acceptance", expected);
            report.field_f64("family.phase_estimation.top_acceptance", top.p);
            if (top.p - expected).abs() > tol::CROSSCHECK {
                return Err(Failure::new(
                    4,
                    format!(
                        "top acceptance {} does not match readout formula {expected}",
                        top.p
                    ),
                ));
            }
        }
        Instance::MarkedState { n, .. } => {
            let ok = spec.clusters.len() == 2
                && spec.clusters[0].p.abs() <= tol::EQUALITY
                && (spec.clusters[1].p - 1.0).abs() <= tol::EQUALITY
                && spec.clusters[1].multiplicity == 1
                && spec.clusters[0].multiplicity == (1usize << n) - 1;
            report.field("family.marked_state.rank_one", ok);
            if !ok {
                return Err(Failure::new(
                    4,
                    "marked-state spectrum is not a rank-1 projector".to_string(),
                ));
            }
        }
        Instance::UnitaryPowers {
            bits,
            close,
            copies,
            ..
        } => {
            let oracle = instance.unitary_oracle()?;
            let (i, j, d) = oracle_problems::closest_phase_pair(&oracle);
            let q = oracle.num_qubits();
            report.field("family.unitary_powers.pair.i", i);
            report.field("family.unitary_powers.pair.j", j);
            report.field_f64("family.unitary_powers.pair.distance", d);
            let pigeonhole = 1.0 / (1usize << q) as f64;
            report.field("family.unitary_powers.pigeonhole_ok", d <= pigeonhole + 1e-12);
            if d > pigeonhole + 1e-12 {
                return Err(Failure::new(
                    4,
                    format!("closest pair distance {d} beats the pigeonhole bound"),
                ));
            }
            let phases = oracle.phases();
            let acceptance = if *copies == 2 {
                oracle_problems::phase_pair_acceptance(phases[i], phases[j], *bits, *close)
            } else {
                oracle_problems::phase_triple_acceptance(
                    &[phases[i], phases[j], phases[j]],
                    *bits,
                    *close,
                )
            };
            report.field_f64("family.unitary_powers.pair_acceptance", acceptance);
        }
        Instance::GroupNonMembership { .. } => {
            let oracle = instance.group_oracle()?;
            let member = oracle.target_is_member();
            let psi = oracle.subgroup_state()?;
            let subtest = oracle.interference_acceptance(&psi)?;
            let expected = if member { 0.0 } else { 0.5 };
            report.field("family.group.target_is_member", member);
            report.field_f64("family.group.subtest_acceptance", subtest);
            if (subtest - expected).abs() > tol::EQUALITY {
                return Err(Failure::new(
                    4,
                    format!("interference subtest reads {subtest}, expected {expected}"),
                ));
            }
        }
    }
    let _ = (proc, cap);
    Ok(())
}

fn reduction_fields(report: &mut Report, check: &reductions::ReductionCheck) {
    spectrum_fields(report, &check.source_spectrum, "source");
    spectrum_fields(report, &check.target_spectrum, "target");
    report.field_f64("reduction.max_value_defect", check.max_value_defect);
    report.field_f64(
        "reduction.max_containment_defect",
        check.max_containment_defect,
    );
    report.field("reduction.monotone", check.monotone);
    report.field("reduction.ok", check.ok);
}

fn cmd_reduce(args: &ReduceArgs) -> CmdResult {
    let instance = load_instance(&args.common)?;
    let cap = resolve_cap(&args.common)?;
    let proc = instance.build_procedure()?;
    let mut report = Report::new("reduce");
    header(&mut report, &instance, &args.common, cap);

    let deamplify_mode = args.z.is_some() || args.z_prime.is_some();
    let amplify_mode = args.rounds.is_some() || args.tau.is_some();
    let retarget_mode = args.target_a.is_some() || args.target_b.is_some();
    match (deamplify_mode, amplify_mode, retarget_mode) {
        (true, false, false) => {
            let z = parse_bound(args.z.as_deref(), "", "--z")?;
            let z_prime = parse_bound(args.z_prime.as_deref(), "", "--z-prime")?;
            let (out, map) = reductions::deamplify(&proc, z, z_prime)?;
            report.field("mode", "deamplify");
            report.field("z", z);
            report.field("z_prime", z_prime);
            let check = reductions::verify_strong_reduction(&proc, &out, &map, cap)?;
            reduction_fields(&mut report, &check);
            if !check.ok {
                return Err(Failure::new(4, "strong-reduction verification failed"));
            }
        }
        (false, true, false) => {
            let rounds = args
                .rounds
                .ok_or_else(|| Failure::new(2, "--rounds is required with --tau"))?;
            let tau = parse_bound(args.tau.as_deref(), "1/2", "--tau")?;
            let (out, map) = reductions::amplify(&proc, rounds, tau)?;
            report.field("mode", "amplify");
            report.field("rounds", rounds);
            report.field("tau", tau);
            if let reductions::MonotoneMap::BinomialTail { threshold, .. } = map {
                report.field("threshold", threshold);
            }
            let check = reductions::verify_strong_reduction(&proc, &out, &map, cap)?;
            reduction_fields(&mut report, &check);
            if !check.ok {
                return Err(Failure::new(4, "strong-reduction verification failed"));
            }
        }
        (false, false, true) => {
            let source = bounds_from(&args.common)?;
            let ta = parse_bound(args.target_a.as_deref(), "", "--target-a")?;
            let tb = parse_bound(args.target_b.as_deref(), "", "--target-b")?;
            let target = BoundsPair::new(ta, tb)?;
            // A reachable-but-absent reduction is a feasibility failure.
            let (out, plan) = reductions::retarget_bounds(
                &proc,
                &source,
                &target,
                args.sharpness,
                reductions::AMPLIFIER_ROUNDS_CAP,
            )
            .map_err(|e| match e {
                Error::Parameter(msg) => Failure::new(3, msg),
                other => Failure::from(other),
            })?;
            report.field("mode", "retarget");
            report.field("source.a", source.a());
            report.field("source.b", source.b());
            report.field("target.a", target.a());
            report.field("target.b", target.b());
            report.field("z", plan.z);
            report.field("z_prime", plan.z_prime);
            match &plan.amplifier {
                Some(amp) => {
                    report.field("amplifier.rounds", amp.rounds);
                    report.field("amplifier.threshold", amp.threshold);
                    report.field("amplifier.sharpness", amp.sharpness);
                }
                None => {
                    report.field("amplifier.rounds", 0);
                }
            }
            let check = reductions::verify_strong_reduction(&proc, &out, &plan.map, cap)?;
            reduction_fields(&mut report, &check);
            if !check.ok {
                return Err(Failure::new(4, "strong-reduction verification failed"));
            }
        }
        _ => {
            return Err(Failure::new(
                2,
                "choose one mode: --z/--z-prime, --rounds/--tau, or --target-a/--target-b",
            ));
        }
    }
    Ok(report)
}

fn cmd_grover(args: &CommonArgs) -> CmdResult {
    let instance = load_instance(args)?;
    let cap = resolve_cap(args)?;
    let Instance::MarkedState { n, seed } = instance else {
        return Err(Failure::new(2, "grover needs a marked-state instance"));
    };
    if n + 1 > cap {
        return Err(Failure::from(Error::SizeCap {
            needed: n + 1,
            cap,
        }));
    }
    let oracle = instance.marked_oracle()?;
    let outcome = oracle_problems::grover_search(&oracle)?;
    let budget = (std::f64::consts::FRAC_PI_4 * 2f64.powf(n as f64 / 2.0)).ceil() as u64 + 1;
    let probes = (1usize << n) / 10;
    let mut probe_rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let classical = if probes > 0 {
        oracle_problems::classical_probe_success(&oracle, probes, &mut probe_rng)?
    } else {
        0.0
    };
    let mut report = Report::new("grover");
    header(&mut report, &instance, args, cap);
    report.field("n", n);
    report.field("iterations", outcome.iterations);
    report.field("queries", outcome.queries);
    report.field("query_budget", budget);
    report.field_f64("success_probability", outcome.success_probability);
    report.field_f64("predicted_probability", outcome.predicted_probability);
    report.field("classical.probes", probes);
    report.field_f64("classical.success_probability", classical);
    let quantum_ok = outcome.queries <= budget && outcome.success_probability >= 2.0 / 3.0;
    report.field("separation.quantum_succeeds", quantum_ok);
    if probes > 0 {
        report.field("separation.classical_fails", classical < 0.1);
    }
    if (outcome.success_probability - outcome.predicted_probability).abs() > tol::MONTE_CARLO {
        return Err(Failure::new(
            4,
            format!(
                "simulated success {} drifts from closed form {}",
                outcome.success_probability, outcome.predicted_probability
            ),
        ));
    }
    if !quantum_ok {
        return Err(Failure::new(
            4,
            format!(
                "amplification used {} queries for success {}",
                outcome.queries, outcome.success_probability
            ),
        ));
    }
    Ok(report)
}

/// Shortest straight-line program over the generators reaching the target,
/// if one exists within the certificate slots.
fn find_certificate(
    oracle: &group::GroupOracle,
    max_len: usize,
) -> Option<Vec<CertSymbol>> {
    let spec = oracle.spec();
    let k = oracle.generators().len();
    let mut paths: Vec<Option<Vec<CertSymbol>>> = vec![None; spec.order()];
    paths[spec.identity()] = Some(Vec::new());
    let mut frontier = vec![spec.identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &x in &frontier {
            let base = paths[x].clone().expect("frontier paths exist");
            for gi in 0..k {
                for (sym, y) in [
                    (CertSymbol::Gen(gi), spec.mul(x, oracle.generators()[gi])),
                    (
                        CertSymbol::Inv(gi),
                        spec.mul(x, spec.inv(oracle.generators()[gi])),
                    ),
                ] {
                    if paths[y].is_none() {
                        let mut path = base.clone();
                        path.push(sym);
                        paths[y] = Some(path);
                        next.push(y);
                    }
                }
            }
        }
        if let Some(path) = &paths[oracle.target()] {
            return Some(path.clone());
        }
        frontier = next;
    }
    paths[oracle.target()].clone()
}

fn cmd_gnm(args: &CommonArgs) -> CmdResult {
    let instance = load_instance(args)?;
    let cap = resolve_cap(args)?;
    let Instance::GroupNonMembership { ref config, .. } = instance else {
        return Err(Failure::new(2, "gnm needs a group-non-membership instance"));
    };
    let oracle = instance.group_oracle()?;
    let layout = group::gnm_layout(&oracle, config);
    if layout.total_qubits > cap + 6 {
        return Err(Failure::from(Error::SizeCap {
            needed: layout.total_qubits,
            cap: cap + 6,
        }));
    }
    let proc = group::build_gnm_procedure(&oracle, config)?;
    let member = oracle.target_is_member();
    let subgroup = oracle.spec().subgroup(oracle.generators())?;
    let mut report = Report::new("gnm");
    header(&mut report, &instance, args, cap);
    report.field("group", oracle.spec().name());
    report.field("group.order", oracle.spec().order());
    report.field("subgroup.order", subgroup.len());
    report.field("target", oracle.target());
    report.field("target.is_member", member);
    report.field("closure_rounds", config.closure_rounds);

    if member {
        let cert = find_certificate(&oracle, config.cert_slots).ok_or_else(|| {
            Failure::new(
                3,
                format!(
                    "membership certificate needs more than {} slots",
                    config.cert_slots
                ),
            )
        })?;
        let witness = group::certificate_witness(&oracle, config, &cert)?;
        let p = proc.acceptance_probability(&witness)?;
        report.field("certificate.length", cert.len());
        report.field_f64("certificate.acceptance", p);
        if (p - 1.0).abs() > tol::EQUALITY {
            return Err(Failure::new(
                4,
                format!("valid certificate accepted with {p}, expected 1"),
            ));
        }
    } else {
        let psi = oracle.subgroup_state()?;
        let closed_form = oracle.interference_acceptance(&psi)?;
        let subtest_config = GnmConfig {
            closure_rounds: 0,
            ..config.clone()
        };
        let subtest_proc = group::build_gnm_procedure(&oracle, &subtest_config)?;
        let witness = group::flag_one_witness(&oracle, &subtest_config, &psi)?;
        let p = subtest_proc.acceptance_probability(&witness)?;
        report.field_f64("subtest.acceptance", p);
        report.field_f64("subtest.closed_form", closed_form);
        if (p - 0.5).abs() > tol::EQUALITY {
            return Err(Failure::new(
                4,
                format!("non-membership subtest accepted with {p}, expected 1/2"),
            ));
        }
    }
    let ceiling = group::flag_one_max_acceptance(&proc, layout.total_qubits.max(cap))?;
    report.field_f64("flag_one.ceiling", ceiling);
    report.field("queries", oracle.queries());
    Ok(report)
}

use rand::SeedableRng;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes_follow_the_contract() {
        assert_eq!(Failure::from(Error::Parse("x".into())).code, 2);
        assert_eq!(
            Failure::from(Error::SizeCap { needed: 20, cap: 14 }).code,
            3
        );
        assert_eq!(Failure::from(Error::InternalCheck("x".into())).code, 4);
    }

    #[test]
    fn cli_parses_every_subcommand() {
        for line in [
            "qvpkit spectrum --instance x.toml",
            "qvpkit verify --instance x.toml --a 2/3 --b 1/3",
            "qvpkit reduce --instance x.toml --z 4/5 --z-prime 1/5",
            "qvpkit reduce --instance x.toml --target-a 3/5 --target-b 2/5",
            "qvpkit grover --instance x.toml --seed 7",
            "qvpkit gnm --instance x.toml --out r.txt --cap 18",
        ] {
            let words: Vec<&str> = line.split_whitespace().collect();
            Cli::try_parse_from(&words).unwrap();
        }
    }

    #[test]
    fn missing_instance_is_an_input_error() {
        let cli = Cli::try_parse_from(["qvpkit", "spectrum"]).unwrap();
        let Command::Spectrum(args) = &cli.command else {
            unreachable!()
        };
        let err = cmd_spectrum(args).unwrap_err();
        assert_eq!(err.code, 2);
    }
}
