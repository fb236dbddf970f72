//! End-to-end tests of the `gqstate` binary: exit codes, file formats,
//! atomic output behavior, and bitwise reproducibility of the full
//! tomo → estimate → verify → sample pipeline.

use gqstate::maxent::{geometric_entropy, MaxEntState, SolveReport};
use gqstate::partition::moments_matrix;
use gqstate::qstate::{validate_density, DensityMatrix, HermitianMatrix};
use gqstate::tomography::{pauli_qubit_povms, simulate_counts};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::Command;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn example_qubit() -> DensityMatrix {
    validate_density(&DMatrix::from_row_slice(
        2,
        2,
        &[c(0.45, 0.0), c(0.2, -0.3), c(0.2, 0.3), c(0.55, 0.0)],
    ))
    .unwrap()
}

struct Cli {
    dir: tempfile::TempDir,
}

impl Cli {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write<T: serde::Serialize>(&self, name: &str, value: &T) -> PathBuf {
        let path = self.path(name);
        std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
        path
    }

    fn run(&self, args: &[&str]) -> (i32, String) {
        let out = Command::new(env!("CARGO_BIN_EXE_gqstate"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .expect("binary runs");
        (
            out.status.code().expect("exit code"),
            String::from_utf8_lossy(&out.stderr).into_owned(),
        )
    }

    fn no_temp_files(&self) {
        for entry in std::fs::read_dir(self.dir.path()).unwrap() {
            let name = entry.unwrap().file_name();
            assert!(
                !name.to_string_lossy().contains(".tmp-"),
                "leftover temp file {name:?}"
            );
        }
    }
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn pipeline_is_bitwise_reproducible() {
    let cli = Cli::new();
    let truth = cli.write("truth.json", &example_qubit());
    let povms: Vec<PathBuf> = pauli_qubit_povms()
        .iter()
        .enumerate()
        .map(|(j, p)| cli.write(&format!("povm{j}.json"), p))
        .collect();

    // Exact-frequency tomography: reconstruction equals the truth.
    let recon = cli.path("recon.json");
    let (code, stderr) = cli.run(&[
        "tomo",
        "--input",
        truth.to_str().unwrap(),
        "--povm",
        povms[0].to_str().unwrap(),
        "--povm",
        povms[1].to_str().unwrap(),
        "--povm",
        povms[2].to_str().unwrap(),
        "--shots",
        "0",
        "--output",
        recon.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");

    let report = cli.path("report.json");
    let verify = cli.path("verify.json");
    let samples = cli.path("samples.csv");
    let stages: Vec<Vec<String>> = vec![
        vec![
            "estimate".into(),
            "--input".into(),
            recon.display().to_string(),
            "--output".into(),
            report.display().to_string(),
        ],
        vec![
            "verify".into(),
            "--input".into(),
            truth.display().to_string(),
            "--report".into(),
            report.display().to_string(),
            "--output".into(),
            verify.display().to_string(),
            "--samples".into(),
            "200000".into(),
            "--seed".into(),
            "5".into(),
        ],
        vec![
            "sample".into(),
            "--report".into(),
            report.display().to_string(),
            "--output".into(),
            samples.display().to_string(),
            "--samples".into(),
            "5000".into(),
            "--seed".into(),
            "7".into(),
        ],
    ];

    let mut first_pass = Vec::new();
    for stage in &stages {
        let args: Vec<&str> = stage.iter().map(String::as_str).collect();
        let (code, stderr) = cli.run(&args);
        assert_eq!(code, 0, "stage {stage:?}: {stderr}");
    }
    for path in [&report, &verify, &samples] {
        first_pass.push(read(path));
    }

    for stage in &stages {
        let args: Vec<&str> = stage.iter().map(String::as_str).collect();
        let (code, _) = cli.run(&args);
        assert_eq!(code, 0);
    }
    for (path, before) in [&report, &verify, &samples].iter().zip(&first_pass) {
        assert_eq!(
            &read(path),
            before,
            "{} changed between identical runs",
            path.display()
        );
    }

    // The verification summary itself reports agreement.
    let summary: serde_json::Value = serde_json::from_str(&first_pass[1]).unwrap();
    assert_eq!(summary["withinThreeSigma"], serde_json::Value::Bool(true));

    // Sample CSV records its seed and parameters in comments.
    let csv = &first_pass[2];
    assert!(csv.contains("# seed=7"));
    assert!(csv.contains("# samples=5000"));
    assert!(csv.contains("# acceptance_rate="));
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("p_0,"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 5001);

    cli.no_temp_files();
}

#[test]
fn estimate_rejects_singular_and_malformed_inputs() {
    let cli = Cli::new();
    let pure = cli.write(
        "pure.json",
        &DensityMatrix::pure(&gqstate::manifold::PurePoint::basis_state(2, 0)),
    );
    let out = cli.path("report.json");
    let (code, stderr) = cli.run(&[
        "estimate",
        "--input",
        pure.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("error:"));

    let garbled = cli.path("garbled.json");
    std::fs::write(&garbled, "{ not json").unwrap();
    let (code, _) = cli.run(&[
        "estimate",
        "--input",
        garbled.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);

    let (code, _) = cli.run(&[
        "estimate",
        "--input",
        cli.path("missing.json").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);

    // A density that is Hermitian and unit-trace but not PSD also parses
    // into exit 3 (validation failure).
    let indefinite = serde_json::json!({
        "dim": 2,
        "re": [0.7, 0.5, 0.5, 0.3],
        "im": [0.0, 0.0, 0.0, 0.0],
    });
    let bad = cli.write("indefinite.json", &indefinite);
    let (code, _) = cli.run(&[
        "estimate",
        "--input",
        bad.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);

    cli.no_temp_files();
}

#[test]
fn estimate_writes_best_effort_report_on_iteration_cap() {
    let cli = Cli::new();
    let input = cli.write("rho.json", &example_qubit());
    let output = cli.path("report.json");
    let (code, stderr) = cli.run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--tol",
        "1e-15",
        "--max-iter",
        "2",
    ]);
    assert_eq!(code, 4, "{stderr}");
    let report: SolveReport = serde_json::from_str(&read(&output)).unwrap();
    assert_eq!(report.iterations, 2);
    assert!(report.residual > 1e-15);
    cli.no_temp_files();
}

#[test]
fn verify_reports_degenerate_weights() {
    let cli = Cli::new();
    // A state concentrated enough that 1000 uniform proposals keep almost
    // no effective weight.
    let lambda = HermitianMatrix::from_real_diagonal(&[-400.0, 400.0]);
    let state = MaxEntState::from_multipliers(&lambda).unwrap();
    let rho = moments_matrix(state.multipliers()).unwrap();
    let entropy = geometric_entropy(&state, &rho).unwrap();
    let report = SolveReport {
        state,
        residual: 0.0,
        iterations: 0,
        entropy,
        dual_value: entropy,
    };
    let report_path = cli.write("report.json", &report);
    let rho_path = cli.write("rho.json", &rho);
    let (code, stderr) = cli.run(&[
        "verify",
        "--input",
        rho_path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
        "--output",
        cli.path("verify.json").to_str().unwrap(),
        "--samples",
        "1000",
    ]);
    assert_eq!(code, 5, "{stderr}");
    assert!(stderr.contains("hint:"), "stderr should point at a way out");
    cli.no_temp_files();
}

#[test]
fn grid_rejects_higher_dimensions_and_honors_size() {
    let cli = Cli::new();
    let qutrit = cli.write(
        "qutrit.json",
        &validate_density(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.5, 0.0),
            c(0.3, 0.0),
            c(0.2, 0.0),
        ])))
        .unwrap(),
    );
    let report3 = cli.path("report3.json");
    let (code, stderr) = cli.run(&[
        "estimate",
        "--input",
        qutrit.to_str().unwrap(),
        "--output",
        report3.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let (code, stderr) = cli.run(&[
        "grid",
        "--report",
        report3.to_str().unwrap(),
        "--output",
        cli.path("grid.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 6, "{stderr}");

    let qubit = cli.write("qubit.json", &example_qubit());
    let report2 = cli.path("report2.json");
    let (code, _) = cli.run(&[
        "estimate",
        "--input",
        qubit.to_str().unwrap(),
        "--output",
        report2.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let grid = cli.path("grid.csv");
    let (code, _) = cli.run(&[
        "grid",
        "--report",
        report2.to_str().unwrap(),
        "--output",
        grid.to_str().unwrap(),
        "--grid-size",
        "50",
    ]);
    assert_eq!(code, 0);
    let text = read(&grid);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,phi,q"));
    assert_eq!(lines.count(), 50 * 50);
    for line in text.lines().skip(1).take(5) {
        let q: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(q >= 0.0 && q.is_finite());
    }
    cli.no_temp_files();
}

#[test]
fn tomo_counts_mode_and_incompleteness() {
    let cli = Cli::new();
    let truth = example_qubit();
    let povms = pauli_qubit_povms();
    let povm_paths: Vec<PathBuf> = povms
        .iter()
        .enumerate()
        .map(|(j, p)| cli.write(&format!("povm{j}.json"), p))
        .collect();

    // Counts files produced off-line drive the same reconstruction.
    let count_paths: Vec<PathBuf> = povms
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let record = simulate_counts(&truth, p, 200_000, 40 + j as u64).unwrap();
            cli.write(&format!("counts{j}.json"), &record)
        })
        .collect();
    let out = cli.path("recon.json");
    let (code, stderr) = cli.run(&[
        "tomo",
        "--povm",
        povm_paths[0].to_str().unwrap(),
        "--povm",
        povm_paths[1].to_str().unwrap(),
        "--povm",
        povm_paths[2].to_str().unwrap(),
        "--counts",
        count_paths[0].to_str().unwrap(),
        "--counts",
        count_paths[1].to_str().unwrap(),
        "--counts",
        count_paths[2].to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let recon: DensityMatrix = serde_json::from_str(&read(&out)).unwrap();
    assert!(recon.trace_distance(&truth).unwrap() <= 0.05);

    // A single Pauli axis cannot determine a qubit: informational
    // incompleteness is its own exit code.
    let truth_path = cli.write("truth.json", &truth);
    let (code, stderr) = cli.run(&[
        "tomo",
        "--input",
        truth_path.to_str().unwrap(),
        "--povm",
        povm_paths[2].to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 7, "{stderr}");

    // Mixing --input with --counts is a validation error.
    let (code, _) = cli.run(&[
        "tomo",
        "--input",
        truth_path.to_str().unwrap(),
        "--povm",
        povm_paths[0].to_str().unwrap(),
        "--counts",
        count_paths[0].to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);

    // Corrupt counts (sum ≠ shots) fail validation on parse.
    let bad = cli.path("bad_counts.json");
    std::fs::write(&bad, r#"{"counts":[3,4],"shots":100}"#).unwrap();
    let (code, _) = cli.run(&[
        "tomo",
        "--povm",
        povm_paths[2].to_str().unwrap(),
        "--counts",
        bad.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);

    cli.no_temp_files();
}

#[test]
fn usage_and_help_exit_codes() {
    let cli = Cli::new();
    let (code, _) = cli.run(&[]);
    assert_eq!(code, 64);
    let (code, _) = cli.run(&["estimate", "--no-such-flag"]);
    assert_eq!(code, 64);
    let (code, _) = cli.run(&["--help"]);
    assert_eq!(code, 0);
    let (code, _) = cli.run(&["--version"]);
    assert_eq!(code, 0);
}

#[test]
fn sample_csv_identical_for_identical_seeds() {
    let cli = Cli::new();
    let input = cli.write("rho.json", &example_qubit());
    let report = cli.path("report.json");
    let (code, _) = cli.run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let a = cli.path("a.csv");
    let b = cli.path("b.csv");
    for out in [&a, &b] {
        let (code, _) = cli.run(&[
            "sample",
            "--report",
            report.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
            "--samples",
            "2000",
            "--seed",
            "13",
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(read(&a), read(&b));

    // Different seed ⇒ different draw.
    let c_path = cli.path("c.csv");
    let (code, _) = cli.run(&[
        "sample",
        "--report",
        report.to_str().unwrap(),
        "--output",
        c_path.to_str().unwrap(),
        "--samples",
        "2000",
        "--seed",
        "14",
    ]);
    assert_eq!(code, 0);
    assert_ne!(read(&a), read(&c_path));
    cli.no_temp_files();
}
