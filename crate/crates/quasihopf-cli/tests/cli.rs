//! Black-box checks of the binary: exit codes, output shape, and the
//! bundled configuration files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasihopf"))
}

/// Fresh output directory per call; tests must not share state.
fn scratch(tag: &str) -> PathBuf {
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("quasihopf-test-{}-{tag}-{n}", std::process::id()))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn help_prints_usage_and_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["simulate", "spectrum", "beta-map", "bifurcation-sweep", "liyorke", "density", "reproduce-figures"] {
        assert!(text.contains(sub), "help is missing {sub}");
    }
}

#[test]
fn missing_arguments_are_usage_errors() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["beta-map"])), 1);
}

#[test]
fn nonexistent_config_is_a_usage_error() {
    let out = run(&["simulate", "--config", "/no/such/file.toml"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let path = scratch("broken").with_extension("toml");
    std::fs::write(&path, "name = \"unterminated\nfrequencies = [").unwrap();
    let out = run(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn empty_epsilon_list_is_a_usage_error() {
    let cfg = config("autonomous.toml");
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--epsilon", ""]);
    assert_eq!(code(&out), 1);
}

#[test]
fn empty_sweep_range_is_a_usage_error() {
    let cfg = config("autonomous.toml");
    let out =
        run(&["bifurcation-sweep", "--config", cfg.to_str().unwrap(), "--epsilon", "0.5:0.1:0.1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn wrong_grid_rank_is_a_usage_error() {
    let cfg = config("quasiperiodic.toml");
    let out = run(&["beta-map", "--config", cfg.to_str().unwrap(), "--grid", "8x16"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn numeric_blowup_keeps_partial_output_and_exits_two() {
    // A huge shift drives the radial step size below the integrator's
    // floor; whatever was sampled up to that point must still land on
    // disk.
    let dir = scratch("blowup");
    let cfg = config("autonomous.toml");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--epsilon",
        "1e30",
        "--t-end",
        "5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).expect("partial CSV exists");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config=autonomous"));
    assert_eq!(lines.next().unwrap(), "t,y1,y2,r,theta");
}

#[test]
fn trajectory_csv_has_comment_header_and_full_precision_cells() {
    let dir = scratch("csvshape");
    let cfg = config("autonomous.toml");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--t-end",
        "2",
        "--samples",
        "20",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# config=autonomous hash="));
    assert!(comment.contains("atol="));
    assert_eq!(lines.next().unwrap(), "t,y1,y2,r,theta");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 5);
        for cell in cells {
            // 12 significant digits in scientific notation, '.' decimal.
            let mantissa = cell.split('e').next().unwrap();
            let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
            assert_eq!(digits.len(), 12, "cell {cell} is not 12 significant digits");
            cell.parse::<f64>().expect("cell parses as a float");
        }
    }
}

#[test]
fn output_directory_is_created_on_demand() {
    let dir = scratch("nested").join("a").join("b");
    let cfg = config("autonomous.toml");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--t-end",
        "1",
        "--samples",
        "2",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(dir.join("trajectory.csv").exists());
}

#[test]
fn identical_seeds_give_byte_identical_outputs() {
    let cfg = config("quasiperiodic.toml");
    let mut dirs = Vec::new();
    for i in 0..2 {
        let dir = scratch(&format!("seeded{i}"));
        let out = run(&[
            "liyorke",
            "--config",
            cfg.to_str().unwrap(),
            "--pairs",
            "4",
            "--horizon",
            "50",
            "--seed",
            "3",
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        dirs.push(dir);
    }
    for file in ["pairs.csv", "summary.csv"] {
        let a = std::fs::read(dirs[0].join(file)).unwrap();
        let b = std::fs::read(dirs[1].join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn bundled_configs_match_the_presets() {
    use quasihopf::config::ConfigFile;
    use quasihopf::presets;

    let cases: Vec<(&str, quasihopf::driving::SystemFamily)> = vec![
        ("autonomous.toml", presets::autonomous(0.5)),
        ("quasiperiodic.toml", presets::quasiperiodic(0.5)),
        ("rotational.toml", presets::rotational(0.5)),
        ("chaotic.toml", presets::chaotic(5, 2.0, 0.0)),
    ];
    for (file, want) in cases {
        let got = ConfigFile::load(&config(file)).unwrap().to_family().unwrap();
        assert_eq!(got.dim(), want.dim(), "{file}: dimension");
        assert_eq!(got.rho, want.rho, "{file}: rho");
        assert_eq!(got.epsilon, want.epsilon, "{file}: epsilon");
        for (a, b) in got.freqs.values().iter().zip(want.freqs.values()) {
            assert!((a - b).abs() <= 1e-15 * b.abs(), "{file}: frequency {a} vs {b}");
        }
        let p = quasihopf::driving::TorusPoint::origin(want.dim());
        let go = got.along_orbit(&p);
        let wo = want.along_orbit(&p);
        for i in 0..40 {
            let t = -7.0 + 1.3 * i as f64;
            let (ga, gb, gc, gd) = go.entries(t);
            let (wa, wb, wc, wd) = wo.entries(t);
            for (g, w) in [(ga, wa), (gb, wb), (gc, wc), (gd, wd)] {
                assert!((g - w).abs() <= 1e-12, "{file}: entry at t={t}: {g} vs {w}");
            }
        }
    }
}
