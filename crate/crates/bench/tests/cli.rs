use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qzcpd::tensor::io::{read_matrix, write_tensor};
use qzcpd::{CpdModel, DenseTensor, Mat};

fn qzcpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qzcpd")).args(args).output().unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

const MINI_SWEEP: [&str; 14] = [
    "sweep", "--order", "3", "--dims", "6", "--rank-range", "2:3", "--snr", "30,inf", "--trials", "2", "--seed",
    "7", "--no-timing",
];

fn run_mini_sweep(out: &Path) -> (String, String) {
    let mut args = MINI_SWEEP.to_vec();
    args.extend(["--out", out.to_str().unwrap()]);
    let o = qzcpd(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (
        std::fs::read_to_string(out.join("raw.csv")).unwrap(),
        std::fs::read_to_string(out.join("summary.csv")).unwrap(),
    )
}

#[test]
fn mini_sweep_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let (raw, summary) = run_mini_sweep(dir.path());
    assert_eq!(raw, std::fs::read_to_string(golden("mini_raw.csv")).unwrap());
    assert_eq!(summary, std::fs::read_to_string(golden("mini_summary.csv")).unwrap());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run_mini_sweep(a.path()), run_mini_sweep(b.path()));
}

#[test]
fn configuration_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["sweep", "--methods", "als", "--out", out],
        vec!["sweep", "--order", "3", "--dims", "4", "--rank", "6", "--out", out],
        vec!["sweep", "--snr", "nan", "--out", out],
        vec!["sweep", "--trials", "0", "--out", out],
        vec!["sweep", "--unknown-flag", "--out", out],
        vec!["doa", "--wavelength", "-1", "--out", out],
        vec!["decompose", "--input", "/nonexistent/t.txt", "--rank", "2", "--out", out],
    ] {
        let o = qzcpd(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn missing_dataset_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = qzcpd(&["fluor", "--data", "/nonexistent/amino.txt", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dataset unavailable"));
}

fn write_input(dir: &Path, t: &DenseTensor<f64>) -> PathBuf {
    let path = dir.join("t.txt");
    write_tensor(std::fs::File::create(&path).unwrap(), t).unwrap();
    path
}

#[test]
fn numerical_failure_exits_with_code_four() {
    // Slices [[1,0],[0,1]] and [[0,-1],[1,0]]: the pencil has eigenvalues ±i.
    let dir = tempfile::tempdir().unwrap();
    let t = DenseTensor::new(vec![2, 2, 2], vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, -1.0, 0.0]).unwrap();
    let input = write_input(dir.path(), &t);
    let out = dir.path().join("f");
    let args = ["decompose", "--input", input.to_str().unwrap(), "--rank", "2", "--out", out.to_str().unwrap()];
    assert_eq!(qzcpd(&args).status.code(), Some(4));
    let mut fallback = args.to_vec();
    fallback.extend(["--complex-fallback", "on"]);
    let o = qzcpd(&fallback);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn decompose_writes_one_factor_file_per_mode() {
    let dir = tempfile::tempdir().unwrap();
    let model = CpdModel::new(vec![
        Mat::from_fn(4, 2, |i, j| (1 + i + 3 * j) as f64),
        Mat::from_fn(3, 2, |i, j| (2 * i + j) as f64 - 1.5),
        Mat::from_fn(3, 2, |i, j| ((i + 1) * (j + 2)) as f64 * 0.25 + j as f64),
    ])
    .unwrap();
    let t = model.full().unwrap();
    let input = write_input(dir.path(), &t);
    let out = dir.path().join("factors");
    for method in ["cpdqz", "cpdqzs", "gevd"] {
        let o = qzcpd(&[
            "decompose",
            "--input",
            input.to_str().unwrap(),
            "--rank",
            "2",
            "--method",
            method,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let factors: Vec<Mat<f64>> = (0..3)
            .map(|n| {
                let path = out.join(format!("factor_{n}.txt"));
                let text = std::fs::read_to_string(&path).unwrap();
                let header = format!("{} 2 real", t.shape()[n]);
                assert_eq!(text.lines().next().unwrap(), header);
                let (m, _) = read_matrix(text.as_bytes()).unwrap();
                m.map(|z| z.re)
            })
            .collect();
        let back = CpdModel::new(factors).unwrap().full().unwrap();
        let diff: f64 = back.data().iter().zip(t.data()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(diff <= 1e-10 * t.norm(), "{method}: {diff}");
    }
}
