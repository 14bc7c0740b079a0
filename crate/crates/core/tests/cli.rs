use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use pauli_core::io::{snapshot_name, write_spinor, DumpHeader, DumpKind};
use pauli_core::{Grid, SpinorField, Units};

fn pauli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pauli")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let col = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn verify_passes_and_reports_counts() {
    let o = pauli(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("254/254 conditions pass"), "{}", stdout(&o));

    let o = pauli(&["verify", "--rep", "original"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("127/127 conditions pass"), "{text}");
    assert!(!text.contains("convenient"), "{text}");
}

#[test]
fn tampered_verify_exits_numerical_and_names_the_failure() {
    let o = pauli(&["verify", "--tamper", "B5"]);
    assert_eq!(o.status.code(), Some(2));
    let all = stdout(&o) + &stderr(&o);
    assert!(all.contains("{B4,B5} = 0"), "{all}");
}

#[test]
fn bad_thread_override_is_a_validation_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_pauli"))
        .arg("verify")
        .env("PAULI_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("PAULI_THREADS"));
}

#[test]
fn config_errors_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(example("free_gaussian.cfg")).unwrap();

    let split_landau = base.replace("preset = zero", "preset = landau\nB0 = 1.0");
    let path = dir.path().join("split_landau.cfg");
    std::fs::write(&path, split_landau).unwrap();
    let o = pauli(&["simulate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("SplitStep requires A ≡ 0"), "{}", stderr(&o));

    let unknown = base.replace("t_end = 2.0", "t_end = 2.0\nt_stop = 3.0");
    let path = dir.path().join("unknown.cfg");
    std::fs::write(&path, unknown).unwrap();
    let o = pauli(&["simulate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("t_stop"), "{}", stderr(&o));

    let o = pauli(&["simulate", dir.path().join("absent.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn free_gaussian_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("free_gaussian.cfg");
    std::fs::copy(example("free_gaussian.cfg"), &cfg).unwrap();
    let out = dir.path().join("free_gaussian_out");

    let o = pauli(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let series = out.join("series.csv");
    let header = std::fs::read_to_string(&series).unwrap();
    assert!(header.starts_with("t,norm,Sx,Sy,Sz,energy,cont_residual_max,dual_current_maxdiff\n"));
    let norms = csv_column(&series, "norm");
    assert!((norms.last().unwrap() - 1.0).abs() < 1e-10);

    let dumps = out.join("dumps");
    let o = pauli(&["analyze", dumps.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let analysis = dumps.join("analysis.csv");
    assert!(csv_column(&analysis, "dual_current_maxdiff").iter().all(|d| *d < 1e-10));
    let with_spin = csv_column(&analysis, "cont_residual_max");

    let o = pauli(&["analyze", dumps.to_str().unwrap(), "--omit-spin", "--dump-currents"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let without = csv_column(&analysis, "cont_residual_max");
    assert_eq!(with_spin.len(), without.len());
    for (a, b) in with_spin.iter().zip(&without) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
    assert!(dumps.join("current_00000000.dump").exists());

    let o = pauli(&["trajectories", dumps.to_str().unwrap(), cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let traj = out.join("trajectories");
    let summary = std::fs::read_to_string(traj.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 201);
    let arrivals = std::fs::read_to_string(traj.join("arrivals.csv")).unwrap();
    assert!(arrivals.starts_with("id,seed_x,seed_y,seed_z,arrival_time\n"));
}

#[test]
fn corrupt_dump_names_file_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(snapshot_name(0));
    std::fs::write(&path, "format = pauli-dump-1\nkind = spinor\ndim = two\n\n").unwrap();
    let o = pauli(&["analyze", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("psi_00000000.dump") && err.contains("dim"), "{err}");
}

const PLANE_WAVE_CFG: &str = "\
[grid]
dim = 2
n = 32
extent = 8

[initial]
width = 1.0

[propagator]
scheme = splitstep
dt = 0.05
t_end = 0.5

[trajectories]
seeds = -1 0.5; 0 0; 1.5 -2
dt = 0.01
output_dir = traj
";

#[test]
fn plane_wave_trajectories_are_straight() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::centered(&[32, 32], &[8.0, 8.0]).unwrap();
    let k = [2.0 * std::f64::consts::PI / 8.0, 2.0 * 2.0 * std::f64::consts::PI / 8.0];
    let units = Units::ELECTRON;
    for (step, t) in [0.0, 0.5].into_iter().enumerate() {
        let w = 0.5 * (k[0] * k[0] + k[1] * k[1]);
        let f = SpinorField::from_fn(&grid, |r| {
            let z = Complex64::from_polar(0.125, k[0] * r[0] + k[1] * r[1] - w * t);
            [z, Complex64::new(0.0, 0.0)]
        });
        let header = DumpHeader::new(DumpKind::Spinor, &grid, t, units);
        write_spinor(&dir.path().join(snapshot_name(step)), &f, &header).unwrap();
    }
    let cfg = dir.path().join("plane.cfg");
    std::fs::write(&cfg, PLANE_WAVE_CFG).unwrap();
    let o = pauli(&["trajectories", dir.path().to_str().unwrap(), cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    for (i, seed) in [[-1.0, 0.5], [0.0, 0.0], [1.5, -2.0]].into_iter().enumerate() {
        let path = dir.path().join("traj").join(format!("traj_{i:05}.csv"));
        let t = csv_column(&path, "t");
        let x = csv_column(&path, "x");
        let y = csv_column(&path, "y");
        assert!((t.last().unwrap() - 0.5).abs() < 1e-12);
        for j in 0..t.len() {
            assert!((x[j] - seed[0] - k[0] * t[j]).abs() < 1e-10, "x at {}", t[j]);
            assert!((y[j] - seed[1] - k[1] * t[j]).abs() < 1e-10, "y at {}", t[j]);
        }
    }
}
