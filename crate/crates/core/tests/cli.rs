use std::path::Path;
use std::process::{Command, Output};

use modschatten::gabor::{gaussian, write_grid};
use modschatten::matrix_bank::{read_matrix, write_matrix, LatticeMatrix, MatrixFormat};
use modschatten::weights_lattices::Lattice;
use modschatten::Complex64;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modschatten"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_writes_a_report_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, "[trials]\nfactorization = 20\n").unwrap();
    let out = dir.path().join("run");
    let o = run(&out, &["verify", "factorization", "--seed", "3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("PASS"));
    for f in ["report.json", "records.csv", "aggregates.csv", "timing.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(out.join("records.csv")).unwrap();
    assert!(csv.starts_with("# modschatten records schema=1 seed=3\n"));

    let o = run(&out, &["replay", out.join("report.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 mismatches"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-suite"));

    let o = run(dir.path(), &["factorize", "missing.csv", "--p0", "1", "--p1", "2", "--p2", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn factorize_a_csv_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let a = LatticeMatrix::from_fn(Lattice::counting(&[3]).unwrap(), |j, k| {
        Complex64::new((j + 2 * k) as f64, j as f64 - 1.0)
    })
    .unwrap();
    let input = dir.path().join("a.csv");
    write_matrix(&input, &a, MatrixFormat::Csv).unwrap();
    let out = dir.path().join("fac");
    let o = run(&out, &["factorize", input.to_str().unwrap(), "--p0", "1", "--p1", "2", "--p2", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("norm_a0="));
    let a1 = read_matrix(&out.join("a1.csv")).unwrap();
    let a2 = read_matrix(&out.join("a2.csv")).unwrap();
    assert!(a1.is_diagonal());
    let prod = a1.mul(&a2).unwrap();
    assert!((&prod.entries - &a.entries).iter().all(|v| v.norm() < 1e-12));
}

#[test]
fn probe_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--format", "json", "probe", "sharpness", "--sizes", "4,8", "--n", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("terms,"));
    assert!(dir.path().join("sharpness.json").exists());

    let o = run(dir.path(), &["probe", "sharpness", "--q", "1", "--r", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gabor_reconstruct_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let signal = dir.path().join("f.csv");
    write_grid(&signal, &gaussian(32, 2.0).unwrap(), false).unwrap();
    let o = run(dir.path(), &["gabor", "reconstruct", signal.to_str().unwrap(), "--a", "2", "--b", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let res: f64 = text
        .split_whitespace()
        .next()
        .and_then(|t| t.strip_prefix("residual_synthesis_dual="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(res < 1e-10, "{text}");
    assert!(dir.path().join("reconstruction.csv").exists());
}
