use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subradiance"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("subradiance-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn minimal_config_runs_a_spectrum() {
    let dir = scratch("minimal");
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        "preset = paper-default\nexperiment = spectrum\npower = 1pW\nlaser_grid = -20ueV:20ueV:9\n",
    )
    .unwrap();
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--svg",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.join("spectrum.csv")).unwrap();
    assert_eq!(header(&csv), "omega_rel_ueV,reflectivity,converged");
    assert!(csv.contains("# g_ueV = 2.00000000000e1"));
    assert!(csv.contains("# kappa_left_ueV = 1.00000000000e2"));
    assert!(csv.contains("# gamma_ueV = 6.00000000000e-1"));
    assert!(csv.contains("# code_version = "));
    assert_eq!(csv.lines().filter(|l| l.ends_with(",true")).count(), 9);
    assert!(!csv.contains('\r'));
    assert!(fs::read_to_string(dir.join("spectrum.svg"))
        .unwrap()
        .contains("<polyline"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = scratch("det-a");
    let b = scratch("det-b");
    let args = [
        "spectrum",
        "--set",
        "preset=case-d",
        "--set",
        "laser_grid=-40:40:17",
    ];
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let o = bin()
            .args(args)
            .args(["--out", dir.to_str().unwrap(), "--jobs", jobs])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(
        fs::read(a.join("spectrum.csv")).unwrap(),
        fs::read(b.join("spectrum.csv")).unwrap()
    );
}

#[test]
fn power_suffix_reaches_the_parameters() {
    let dir = scratch("suffix");
    let o = run(&[
        "spectrum",
        "--set",
        "power=10nW",
        "--set",
        "laser_grid=0:0:1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.join("spectrum.csv")).unwrap();
    assert!(csv.contains("# p_laser_W = 1.00000000000e-8"), "{csv}");
}

#[test]
fn exclusive_keys_are_named() {
    let dir = scratch("exclusive");
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, "d = 10nm\nomega12 = 31ueV\n").unwrap();
    let o = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("`d`") && err.contains("`omega12`"), "{err}");
}

#[test]
fn usage_errors_exit_with_one() {
    let o = run(&["spectrum", "--set", "kapa=3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`kapa`"));
    assert_eq!(run(&["dance"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["reproduce", "--figure", "9"]).status.code(), Some(1));
    assert_eq!(
        run(&["spectrum", "--set", "power=3ueV"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unconverged_truncation_exits_with_two() {
    // at the cap there is no larger truncation to compare against
    let dir = scratch("cap");
    let o = run(&[
        "spectrum",
        "--fock",
        "20",
        "--set",
        "laser_grid=0:0:1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));
    assert!(!dir.join("spectrum.csv").exists());
}

#[test]
fn eigen_sweep_columns() {
    let dir = scratch("eigen");
    let o = run(&[
        "eigen",
        "--set",
        "preset=case-d",
        "--sweep",
        "delta12=0:50:200",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.join("eigen.csv")).unwrap();
    assert!(
        header(&csv).starts_with("delta12_ueV,mu,nu,Gamma_minus_ueV,nc_minus_ratio"),
        "{}",
        header(&csv)
    );
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 201);
}

#[test]
fn blockade_curves_share_one_file() {
    let dir = scratch("g2");
    let o = run(&[
        "g2",
        "--set",
        "curves=blockade",
        "--set",
        "power=10pW",
        "--set",
        "tau_grid=0:1:11",
        "--out",
        dir.to_str().unwrap(),
        "--svg",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.join("g2.csv")).unwrap();
    assert_eq!(header(&csv), "curve,tau_ns,g2,converged");
    for label in ["single", "plus20", "minus20", "minus10"] {
        assert_eq!(
            csv.lines()
                .filter(|l| l.starts_with(&format!("{label},")))
                .count(),
            11,
            "{label}"
        );
    }
    assert_eq!(
        fs::read_to_string(dir.join("g2.svg"))
            .unwrap()
            .matches("<polyline")
            .count(),
        4
    );
}

#[test]
fn reproduce_analytic_overlay() {
    let dir = scratch("fig4");
    let o = run(&[
        "reproduce",
        "--figure",
        "4",
        "--out",
        dir.to_str().unwrap(),
        "--svg",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.join("fig4.csv")).unwrap();
    assert!(header(&csv).ends_with("mu_analytic,nu_analytic"));
    assert!(csv.contains("# omega12_ueV = 3.10000000000e1"));
    let svg = fs::read_to_string(dir.join("fig4.svg")).unwrap();
    assert!(svg.contains("mu analytic") && svg.contains("stroke-dasharray"));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert!(o.status.success());
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}
