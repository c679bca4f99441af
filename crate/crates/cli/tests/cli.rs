use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pnpm_cli::commands::{appendix, convergence_rows, counterexample, run, snapshot_name};
use pnpm_cli::{exit, CliError, Problem, RunConfig};

fn pnpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnpm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn burgers_preset_writes_three_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnpm(&[
        "run",
        "--problem",
        "burgers",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        exit::SUCCESS,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for t in ["0.022", "0.066", "0.198"] {
        let rows = read_csv(&dir.path().join(format!("snapshot_t{t}.csv")));
        assert_eq!(rows.len(), 160 * 8);
        assert!(rows
            .iter()
            .all(|r| r.len() == 3 && r.iter().all(|v| v.is_finite())));
    }
    let entropy = read_csv(&dir.path().join("entropy.csv"));
    assert!(entropy.last().unwrap()[1] < entropy[0][1]);
}

#[test]
fn traffic_preset_is_p4p6_on_40_cells() {
    let cfg = RunConfig::preset(Problem::TrafficSine);
    assert_eq!((cfg.n, cfg.m, cfg.cells), (4, 6, 40));
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cfg;
    cfg.out = dir.path().to_path_buf();
    let summary = run(&cfg).unwrap();
    assert_eq!(summary.snapshots.len(), 3);
    assert!(summary.min_margin >= -1e-10);
    let rows = read_csv(&summary.snapshots[2]);
    assert_eq!(rows.len(), 40 * 8);
    // densities stay near the initial range
    assert!(rows.iter().all(|r| r[1] > 0.2 && r[1] < 0.8));
}

#[test]
fn zero_end_time_snapshot_is_the_projection() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg =
        RunConfig::parse("problem = advection_sin4\nn = 2\nm = 4\ncells = 12\nt_end = 0").unwrap();
    cfg.out = dir.path().to_path_buf();
    run(&cfg).unwrap();
    let rows = read_csv(&dir.path().join(snapshot_name(0.0)));
    let u0 = cfg.setup.initial_field(12, 2).unwrap();
    for (k, r) in rows.iter().enumerate() {
        let (i, j) = (k / 8, k % 8);
        let s = -1.0 + 2.0 * j as f64 / 7.0;
        let expect = pnpm_core::basis::eval_series(u0.cell(i), s);
        assert!((r[1] - expect).abs() < 1e-11, "row {k}");
    }
    assert_eq!(
        fs::read_to_string(dir.path().join("entropy.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );
}

#[test]
fn identical_configs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = pnpm(&[
            "run",
            "--problem",
            "traffic",
            "--n",
            "2",
            "--m",
            "4",
            "--cells",
            "20",
            "--tend",
            "0.1",
            "--snapshots",
            "0.05,0.1",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["snapshot_t0.05.csv", "snapshot_t0.1.csv", "entropy.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(
        &cfg_path,
        "# coarse traffic run\nproblem = traffic\nn = 1\nm = 3\ncells = 10\nt_end = 0.05\nsnapshots = 0.05\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = pnpm(&[
        "run",
        "--config",
        cfg_path.to_str().unwrap(),
        "--cells",
        "16",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_csv(&out_dir.join("snapshot_t0.05.csv")).len(), 16 * 8);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--n", "1", "--m", "9", "--out", d],
        vec![
            "run",
            "--problem",
            "burgers",
            "--flux",
            "upwind",
            "--out",
            d,
        ],
        vec!["run", "--cfl", "0", "--out", d],
        vec!["run", "--problem", "nope", "--out", d],
        vec!["converge", "--grids", "10", "--out", d],
        vec![
            "converge",
            "--problem",
            "burgers",
            "--grids",
            "10,20",
            "--out",
            d,
        ],
        vec!["appendix", "--n-max", "-1"],
    ] {
        let out = pnpm(&args);
        assert_eq!(
            code(&out),
            exit::CONFIG,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn overflow_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("huge.cfg");
    fs::write(
        &cfg_path,
        "problem = custom\nmodel = burgers\ninitial = constant:1e300\nt_end = 0.1\ncells = 8\n",
    )
    .unwrap();
    let out = pnpm(&[
        "run",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), exit::BLOW_UP);
}

#[test]
fn single_grid_is_rejected() {
    let mut cfg = RunConfig::preset(Problem::AdvectionSin4);
    cfg.grids = vec![20];
    let err = convergence_rows(&cfg).unwrap_err();
    assert!(matches!(
        err,
        CliError::Core(pnpm_core::Error::TooFewGrids(1))
    ));
    assert_eq!(err.exit_code(), exit::CONFIG);
}

#[test]
fn converge_writes_one_table_per_limiter_setting() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnpm(&[
        "converge",
        "--n",
        "1",
        "--m",
        "2",
        "--grids",
        "10,20,40",
        "--compare",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    for name in ["convergence_P1P2_off.csv", "convergence_P1P2_on.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n_cells,l2_error,order,theta_mean");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("10,") && lines[1].contains(",,"));
    }
}

#[test]
fn p4p6_limited_rows_match_unlimited_from_twenty_cells() {
    let mut cfg = RunConfig::preset(Problem::AdvectionSin4);
    cfg.n = 4;
    cfg.m = 6;
    cfg.grids = vec![10, 20, 40];
    let on = convergence_rows(&cfg).unwrap();
    cfg.limiter = false;
    let off = convergence_rows(&cfg).unwrap();
    assert!(on[0].theta_mean < 1.0 && on[0].l2_error > off[0].l2_error);
    for (a, b) in on.iter().zip(&off).skip(1) {
        assert_eq!(a.l2_error, b.l2_error);
        assert_eq!(a.theta_mean, 1.0);
    }
}

#[test]
fn counterexample_found_and_repaired() {
    let out = pnpm(&["counterexample"]);
    assert_eq!(code(&out), exit::SUCCESS);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("violated") && text.contains("midpoint"));
    let c = counterexample(false).unwrap();
    assert!(c.violated);
    assert!((c.midpoint - 0.5 * (c.u_minus + c.u_plus)).abs() < 1e-15);
    // jump upward: the reconstructed trace must not exceed the midpoint
    assert!(c.u_minus < c.u_plus && c.w_minus > c.midpoint);
    assert!(c.margin_unlimited < 0.0);
    assert!(c.theta > 0.0 && c.theta < 1.0 && c.margin_limited >= -1e-12);
}

#[test]
fn smooth_data_has_no_counterexample() {
    assert_eq!(
        code(&pnpm(&["counterexample", "--smooth"])),
        exit::NOT_FOUND
    );
    assert!(!counterexample(true).unwrap().violated);
}

#[test]
fn appendix_table_rows() {
    let out = pnpm(&["appendix", "--n-max", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);
    let rows = appendix(6).unwrap();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.min_singular_value > 0.0));
    assert!(rows
        .windows(2)
        .all(|w| w[1].condition_number > w[0].condition_number));
}

#[test]
fn custom_problem_runs_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::parse(
        "problem = custom\nmodel = advection:-1\nleft = 0\nright = 2\nboundary = periodic\ninitial = sine\nn = 1\nm = 3\ncells = 16\nt_end = 2",
    )
    .unwrap();
    cfg.out = dir.path().to_path_buf();
    let s = run(&cfg).unwrap();
    // one period of leftward transport: errors stay at the discretization level
    let rows = read_csv(&s.snapshots[0]);
    let worst = rows
        .iter()
        .map(|r| (r[1] - (std::f64::consts::PI * r[0]).sin()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.05, "{worst}");
}
