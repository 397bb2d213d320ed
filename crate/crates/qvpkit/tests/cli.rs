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

//! Command-line contract: every documented failure mode maps to its exit
//! code (2 bad input, 3 resource or feasibility limit), the size cap can
//! come from a flag or the environment, and `--out` mirrors stdout.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)
}

/// Runs the binary with a clean cap environment and returns the raw output.
fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvpkit"))
        .args(args)
        .env_remove("QVPKIT_CAP")
        .output()
        .expect("binary runs")
}

fn run_with_env(args: &[&str], cap: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvpkit"))
        .args(args)
        .env("QVPKIT_CAP", cap)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn missing_instance_flag_is_an_input_error() {
    let out = run(&["spectrum"]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("--instance"));
}

#[test]
fn nonexistent_instance_file_is_an_input_error() {
    let out = run(&["spectrum", "--instance", "/nonexistent/instance.toml"]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
}

#[test]
fn malformed_instance_file_is_an_input_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "problem = \"qsat\"\nn = [not toml").expect("write");
    let out = run(&["spectrum", "--instance", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
}

#[test]
fn unknown_problem_tag_is_an_input_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("mystery.toml");
    std::fs::write(&path, "problem = \"mystery\"\nn = 2\n").expect("write");
    let out = run(&["spectrum", "--instance", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("mystery"), "stderr: {}", stderr_of(&out));
}

#[test]
fn inverted_bounds_are_an_input_error() {
    let out = run(&[
        "spectrum",
        "--instance",
        &fixture("synthetic-thirds.toml"),
        "--a",
        "1/3",
        "--b",
        "2/3",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
}

#[test]
fn non_fraction_bound_is_an_input_error() {
    let out = run(&[
        "spectrum",
        "--instance",
        &fixture("synthetic-thirds.toml"),
        "--a",
        "two thirds",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("--a"), "stderr: {}", stderr_of(&out));
}

#[test]
fn inverted_deamplification_weights_are_an_input_error() {
    let out = run(&[
        "reduce",
        "--instance",
        &fixture("synthetic-thirds.toml"),
        "--z",
        "1/5",
        "--z-prime",
        "4/5",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
}

#[test]
fn too_many_amplifier_rounds_hit_the_size_cap() {
    let out = run(&[
        "reduce",
        "--instance",
        &fixture("synthetic-thirds.toml"),
        "--rounds",
        "20",
        "--tau",
        "1/2",
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr_of(&out));
}

#[test]
fn unreachable_retarget_sharpness_is_a_feasibility_error() {
    // Targets clear the dyadic marks at sharpness 5, but no amplifier
    // within the round cap is sharp enough to realize them.
    let out = run(&[
        "reduce",
        "--instance",
        &fixture("synthetic-thirds.toml"),
        "--target-a",
        "19/20",
        "--target-b",
        "1/20",
        "--sharpness",
        "5",
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr_of(&out));
}

#[test]
fn qubit_cap_flag_blocks_large_instances() {
    let out = run(&[
        "verify",
        "--instance",
        &fixture("qsat-satisfiable.toml"),
        "--cap",
        "3",
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr_of(&out));
}

#[test]
fn zero_cap_flag_is_an_input_error() {
    let out = run(&[
        "verify",
        "--instance",
        &fixture("qsat-satisfiable.toml"),
        "--cap",
        "0",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
}

#[test]
fn environment_cap_applies_when_no_flag_is_given() {
    let out = run_with_env(
        &["verify", "--instance", &fixture("qsat-satisfiable.toml")],
        "3",
    );
    assert_eq!(code(&out), 3, "stderr: {}", stderr_of(&out));
}

#[test]
fn cap_flag_overrides_the_environment() {
    let out = run_with_env(
        &[
            "verify",
            "--instance",
            &fixture("qsat-satisfiable.toml"),
            "--cap",
            "14",
        ],
        "3",
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
}

#[test]
fn non_numeric_environment_cap_is_an_input_error() {
    let out = run_with_env(
        &["verify", "--instance", &fixture("qsat-satisfiable.toml")],
        "plenty",
    );
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("QVPKIT_CAP"), "stderr: {}", stderr_of(&out));
}

#[test]
fn zero_environment_cap_is_an_input_error() {
    let out = run_with_env(
        &["verify", "--instance", &fixture("qsat-satisfiable.toml")],
        "0",
    );
    assert_eq!(code(&out), 2, "stderr: {}", stderr_of(&out));
}

#[test]
fn out_flag_mirrors_stdout_and_leaves_no_temp_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path: PathBuf = dir.path().join("report.txt");
    let out = run(&[
        "spectrum",
        "--instance",
        &fixture("synthetic-thirds.toml"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let mirrored = std::fs::read_to_string(&path).expect("report file");
    assert_eq!(mirrored.as_bytes(), &out.stdout[..]);
    assert!(!dir.path().join("report.tmp").exists());
}

#[test]
fn out_flag_replaces_an_existing_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path: PathBuf = dir.path().join("report.txt");
    let mut stale = std::fs::File::create(&path).expect("create");
    writeln!(stale, "stale contents").expect("write");
    drop(stale);
    let out = run(&[
        "spectrum",
        "--instance",
        &fixture("synthetic-thirds.toml"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_of(&out));
    let mirrored = std::fs::read_to_string(&path).expect("report file");
    assert_eq!(mirrored.as_bytes(), &out.stdout[..]);
    assert!(!mirrored.contains("stale"));
}
