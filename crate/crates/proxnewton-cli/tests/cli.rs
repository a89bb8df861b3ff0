//! End-to-end tests driving the compiled binary.

use proxnewton::{read_pgm, read_reports_csv};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_proxnewton"))
}

fn ok(out: &Output) -> &Output {
    assert!(
        out.status.success(),
        "command failed ({}):\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const L0L2_SPEC: &str = "family = l0l2\nm = 20\nmu0 = 1e-2\nmu2 = 1e-2\nseed = 7\n";

/// Parses the `TN,solver,...` stdout of a solve run into its single row.
fn report_row(out: &Output) -> Vec<String> {
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "TN,solver,time,iter,delta,eta,nnz,status");
    let row: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    assert_eq!(row.len(), 8, "row: {row:?}");
    row
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("a.spec");
    write(&spec, L0L2_SPEC);
    let out1 = dir.path().join("a1.inst");
    let out2 = dir.path().join("a2.inst");
    ok(&bin().arg("gen").args([&spec, &out1]).arg("--seed").arg("9").output().unwrap());
    ok(&bin().arg("gen").args([&spec, &out2]).arg("--seed").arg("9").output().unwrap());
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn gen_rejects_unknown_family() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    write(&spec, "family = ridge\nn = 10\n");
    let out = bin().arg("gen").args([&spec, &dir.path().join("x.inst")]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("family"), "stderr: {err}");
}

#[test]
fn solve_converges_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("a.spec");
    let inst = dir.path().join("a.inst");
    let trace = dir.path().join("trace.csv");
    write(&spec, L0L2_SPEC);
    ok(&bin().arg("gen").args([&spec, &inst]).output().unwrap());
    let out = bin()
        .arg("solve")
        .arg(&inst)
        .args(["--solver", "gcnm", "--id", "desk"])
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    let row = report_row(ok(&out));
    assert_eq!(row[0], "desk");
    assert_eq!(row[1], "gcnm");
    assert_eq!(row[7], "converged");
    assert!(row[5].parse::<f64>().unwrap() <= 1e-6);

    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,fbe,eta,v_norm,tau,backtracks,elapsed_s");
    let iters: usize = row[3].parse().unwrap();
    assert_eq!(lines.count(), iters);
}

#[test]
fn solve_pgm_and_zero_direction_glpg_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("a.spec");
    let inst = dir.path().join("a.inst");
    write(&spec, L0L2_SPEC);
    ok(&bin().arg("gen").args([&spec, &inst]).output().unwrap());
    let run = |solver: &str| {
        let out = bin().arg("solve").arg(&inst).args(["--solver", solver]).output().unwrap();
        report_row(ok(&out))
    };
    let pgm = run("pgm");
    let glpg = run("glpg");
    assert_eq!(pgm[3], glpg[3], "iteration counts");
    assert_eq!(pgm[5], glpg[5], "final eta");
    assert_eq!(pgm[6], glpg[6], "final nnz");
}

#[test]
fn solve_rejects_unknown_solver_flag() {
    let out = bin().args(["solve", "x.inst", "--solver", "bfgs"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("possible values"));
}

#[test]
fn bench_runs_suite_and_records_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("good.spec"), L0L2_SPEC);
    write(&dir.path().join("bad.spec"), "family = l0l2\nn = 13\n");
    write(
        &dir.path().join("suite.txt"),
        "# desk suite\nTN1 good.spec pgm,gcnm\nTN2 bad.spec gcnm\n",
    );
    let table = dir.path().join("table.csv");
    let out = bin()
        .arg("bench")
        .arg(dir.path().join("suite.txt"))
        .arg("--out")
        .arg(&table)
        .args(["--max-iter", "2000"])
        .output()
        .unwrap();
    ok(&out);
    let rows = read_reports_csv(&table).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!((&rows[0].id[..], &rows[0].solver[..]), ("TN1", "pgm"));
    assert_eq!((&rows[1].id[..], &rows[1].solver[..]), ("TN1", "gcnm"));
    assert_eq!(rows[1].status, "converged");
    assert_eq!((&rows[2].id[..], &rows[2].solver[..]), ("TN2", "gcnm"));
    assert_eq!(rows[2].status, "error");
}

#[test]
fn bench_empty_suite_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("empty.txt");
    write(&suite, "# nothing\n");
    let table = dir.path().join("table.csv");
    ok(&bin().arg("bench").arg(&suite).arg("--out").arg(&table).output().unwrap());
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.trim(), "TN,solver,time,iter,delta,eta,nnz,status");
}

#[test]
fn deblur_identity_kernel_roundtrips_image() {
    let dir = tempfile::tempdir().unwrap();
    let input = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/synthetic64.pgm");
    let restored_path = dir.path().join("restored.pgm");
    let out = bin()
        .arg("deblur")
        .arg(&input)
        .arg("--out")
        .arg(&restored_path)
        .args(["--solver", "pgm", "--kernel-size", "1", "--noise-std", "0"])
        .args(["--mu0", "1e-12", "--mu2", "0"])
        .output()
        .unwrap();
    let row = report_row(ok(&out));
    assert_eq!(row[7], "converged");
    let original = read_pgm(&input).unwrap();
    let restored = read_pgm(&restored_path).unwrap();
    assert_eq!(original.pixels.len(), restored.pixels.len());
    for (a, b) in original.pixels.iter().zip(&restored.pixels) {
        assert!((a - b).abs() <= 1.0 / 255.0 + 1e-12, "pixel {a} vs {b}");
    }
}

#[test]
fn deblur_missing_input_names_path() {
    let out = bin()
        .args(["deblur", "/no/such/image.pgm", "--out", "/tmp/never.pgm"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/image.pgm"));
}
