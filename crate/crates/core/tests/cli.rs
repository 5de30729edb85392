//! End-to-end checks of the `spoofsim` binary: exit codes, output files and
//! byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spoofsim"))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn list_checks_prints_the_catalog() {
    let out = binary().arg("--list-checks").output().expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("attacker-dominates-window"));
    assert!(text.contains("genuine-recovery-within"));
}

#[test]
fn passing_scenario_exits_zero_and_writes_outputs() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out = binary()
        .arg("run")
        .arg(scenarios_dir().join("lidar_scenario_3.toml"))
        .arg("--out")
        .arg(tmp.path())
        .arg("--log-every")
        .arg("50")
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(tmp.path().join("lidar_scenario_3.csv").exists());
    assert!(tmp.path().join("lidar_scenario_3.verdict.txt").exists());
    let verdict = std::fs::read_to_string(tmp.path().join("lidar_scenario_3.verdict.txt")).unwrap();
    assert!(verdict.contains("result: PASS"));
}

#[test]
fn failing_check_exits_one_and_names_the_check() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let scenario = tmp.path().join("fails.toml");
    std::fs::write(
        &scenario,
        r#"
id = "fails"
duration_ticks = 2000

[[mission.waypoints]]
x = 0.0
y = 4.0
z = 3.0

[[checks]]
kind = "collision-occurred"
"#,
    )
    .unwrap();
    let out = binary()
        .arg("run")
        .arg(&scenario)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[FAIL] collision-occurred"), "{text}");
}

#[test]
fn invalid_scenario_exits_two() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let scenario = tmp.path().join("invalid.toml");
    std::fs::write(
        &scenario,
        r#"
id = "invalid"
duration_ticks = 100

[attack]
kind = "lidar-uniform"
distance = 99.0
end_tick = 50

[[checks]]
kind = "no-collision"
"#,
    )
    .unwrap();
    let out = binary()
        .arg("run")
        .arg(&scenario)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("attack.distance"), "{text}");
}

#[test]
fn rerun_with_same_seed_is_byte_identical() {
    let tmp_a = tempfile::tempdir().expect("tempdir");
    let tmp_b = tempfile::tempdir().expect("tempdir");
    for tmp in [&tmp_a, &tmp_b] {
        let status = binary()
            .arg("run")
            .arg(scenarios_dir().join("gps_scenario_2.toml"))
            .arg("--seed")
            .arg("123")
            .arg("--out")
            .arg(tmp.path())
            .status()
            .expect("binary runs");
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(tmp_a.path().join("gps_scenario_2.csv")).unwrap();
    let b = std::fs::read(tmp_b.path().join("gps_scenario_2.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn run_all_reports_every_scenario() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out = binary()
        .arg("run-all")
        .arg(scenarios_dir())
        .arg("--out")
        .arg(tmp.path())
        .arg("--log-every")
        .arg("100")
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("8/8 scenarios passed"), "{text}");
}
