use std::path::PathBuf;
use std::process::{Command, Output};

pub const CANONICAL: [&str; 13] =
    ["verify", "--n", "3", "--c", "-1", "--A", "1", "--suites", "all", "--samples", "100", "--seed", "42"];

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kahler-lift"));
    cmd.env_remove("KAHLER_LIFT_OUT_DIR");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/canonical_report.json")
}

/// The canonical report bytes produced by the binary on stdout.
pub fn canonical_report() -> Vec<u8> {
    let out = run(&CANONICAL);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}
