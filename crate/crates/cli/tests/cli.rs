use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn holeqd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holeqd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_config(dir: &Path, toml: &str) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, toml).unwrap();
    let out = dir.join("out");
    holeqd(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn gate_time_crosses_ten_ns_near_37nm() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "experiment = \"gate-time\"\n");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("out/gate_time.csv"));
    assert_eq!(header, ["L_s_nm", "T_cz_ns"]);
    // T_CZ grows by ~40% per nm here, so only rows within about half a
    // nanometre of the crossover land in [8, 12] ns.
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/gate_time_summary.json")).unwrap()).unwrap();
    let lx = summary["crossover_L_s_nm"].as_f64().unwrap();
    assert!((lx - 37.0).abs() <= 3.0, "crossover {lx}");
    let nearest = rows
        .iter()
        .min_by(|a, b| (a[0] - lx).abs().total_cmp(&(b[0] - lx).abs()))
        .unwrap();
    assert!((nearest[0] - 37.0).abs() <= 3.0);
    assert!((8.0..=12.0).contains(&nearest[1]), "row {nearest:?}");
    for w in rows.windows(2) {
        assert!(w[1][1] > w[0][1], "T_CZ not increasing at {:?}", w[1]);
    }
}

#[test]
fn identical_config_gives_identical_data_files() {
    let toml = "experiment = \"oscillation\"\nseed = 9\n[oscillation]\nn_traj = 40\nn_times = 30\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_config(a.path(), toml).status.success());
    assert!(run_config(b.path(), toml).status.success());
    let mut names: Vec<_> = fs::read_dir(a.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    names.sort();
    assert!(names.contains(&"oscillation.csv".to_string()));
    for n in &names {
        let x = fs::read(a.path().join("out").join(n)).unwrap();
        let y = fs::read(b.path().join("out").join(n)).unwrap();
        assert_eq!(x, y, "{n} differs");
    }
}

#[test]
fn noiseless_oscillation_has_flat_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let toml = "experiment = \"oscillation\"\n[noise]\na_n_uev = 0.0\n[oscillation]\nn_traj = 8\nn_times = 40\n";
    let o = run_config(dir.path(), toml);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("out/oscillation.csv"));
    assert_eq!(header, ["t_ns", "p_up", "envelope_fit"]);
    assert_eq!(rows.len(), 40);
    for r in &rows {
        assert_eq!(r[2], 1.0);
    }
}

#[test]
fn manifest_lists_files_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "experiment = \"wkb-fit\"\nseed = 3\n");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["experiment"], "wkb-fit");
    assert_eq!(m["seed"], 3);
    for f in m["files"].as_array().unwrap() {
        assert!(dir.path().join("out").join(f.as_str().unwrap()).exists());
    }
    assert!(m["config"]["gate"].is_object());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "experiment = \"bands\"\n[bands]\nk_maximum = 1.0\n");
    assert_eq!(o.status.code(), Some(2));
    let rec: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec["kind"], "config");
    assert!(rec["message"].as_str().unwrap().contains("k_maximum"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn bad_experiment_name_exits_2() {
    let o = holeqd(&["--experiment", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compute_error_names_module_and_operation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(dir.path(), "experiment = \"gate-time\"\n[gate]\nu1_mev = 0.0\n");
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(rec["kind"], "compute");
    assert_eq!(rec["module"], "gate");
    assert!(dir.path().join("out/error.json").exists());
}

#[test]
fn list_presets_shows_materials_and_zeeman() {
    let o = holeqd(&["--list-presets"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("13.25"), "{text}");
    assert!(text.contains("E_z") || text.contains("zeeman"), "{text}");
}
