//! End-to-end runs of the `srgeo` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn srgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srgeo")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn optics_prints_the_distortion_figures() {
    let o = srgeo(&["optics", "--project", "0.1,0.2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!((v["y_max"].as_f64().unwrap() - 0.63).abs() < 0.01);
    assert!(v["project"]["in_view"].as_bool().unwrap());
}

#[test]
fn configuration_errors_exit_with_2() {
    assert_eq!(code(&srgeo(&["geodesic", "--h2", "2", "--h3", "0", "--xi", "1", "--end", "1", "--out", "/tmp/never.csv"])), 2);
    assert_eq!(code(&srgeo(&["geodesic", "--h2", "0.1"])), 2);
    assert_eq!(code(&srgeo(&["fastmarch", "--preset", "se3", "--out", "/tmp/never.bin"])), 2);
    assert_eq!(code(&srgeo(&["optics", "--eye", "2,0.8,1"])), 2);
    assert_eq!(code(&srgeo(&["optics", "--config", "/nonexistent.json"])), 2);
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, format!(r#"{{"h2": 0.3, "h3": 0.1, "xi": 1.5, "end": 1.0, "samples": 20, "out": "{}"}}"#, s(&out))).unwrap();
    let o = srgeo(&["geodesic", "--config", s(&cfg), "--xi", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let side = read_json(&dir.path().join("g.csv.json"));
    assert_eq!(side["command"], "geodesic");
    assert_eq!(side["config"]["xi"], 2.0);
    assert_eq!(side["config"]["h2"], 0.3);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("# xi=2"));
    assert_eq!(csv.lines().count(), 2 + 21);
}

#[test]
fn closed_form_and_ode_agree() {
    let dir = tempfile::tempdir().unwrap();
    let end = |method: &str, param: &str| -> Vec<f64> {
        let out = dir.path().join(format!("{method}-{param}.csv"));
        let o = srgeo(&["geodesic", "--h2", "-0.2", "--h3", "0.4", "--xi", "1.5", "--method", method, "--param", param, "--end", "0.8", "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        stdout_json(&o)["endpoint"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
    };
    for param in ["t", "s"] {
        let (a, b) = (end("closed-form", param), end("ode", param));
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-5, "{param}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn cusp_reports_regimes() {
    let v = stdout_json(&srgeo(&["cusp", "--h2", "0", "--h3", "1", "--xi", "1"]));
    assert_eq!(v["s_max"], 1.0);
    assert_eq!(v["class"], "linear");
    let v = stdout_json(&srgeo(&["cusp", "--h2", "0", "--h3", "0.1", "--xi", "0.5"]));
    assert_eq!(v["s_max"], "inf");
    assert!(v["kappa"].as_f64().unwrap() < 0.0);
}

#[test]
fn wavefront_writes_one_row_per_momentum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wf.csv");
    assert_eq!(code(&srgeo(&["wavefront", "--xi", "1", "--t", "1", "--n", "10", "--out", s(&out)])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let rows = text.lines().count() - 2;
    assert_eq!(rows, read_json(&dir.path().join("wf.csv.json"))["result"]["points"].as_u64().unwrap() as usize);
    assert!(rows >= 100);
}

#[test]
fn fastmarch_is_deterministic_and_tracks() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.bin"), dir.path().join("b.bin"));
    for p in [&a, &b] {
        let o = srgeo(&["fastmarch", "--grid", "21,41,41", "--xi", "1.5", "--stop-radius", "2", "--out", s(p)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let side = |p: &str| {
        let mut v = read_json(&dir.path().join(p));
        v["config"]["out"] = Value::Null;
        v
    };
    assert_eq!(side("a.bin.json"), side("b.bin.json"));
    let t = dir.path().join("t.csv");
    let o = srgeo(&["track", "--dist", s(&a), "--end", "0.3,0,0", "--out", s(&t)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let w = stdout_json(&o)["W"].as_f64().unwrap();
    assert!(w > 0.3 && w < 1.2);
    // Beyond the stopping radius the map holds no values.
    let o = srgeo(&["track", "--dist", s(&a), "--end", "0.3,1.5,0", "--out", s(&t)]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn image_cost_feeds_fast_marching() {
    use srgeo::cost::synthetic::{render, Tube};
    let dir = tempfile::tempdir().unwrap();
    let png = dir.path().join("tube.png");
    render(61, 61, &[Tube::segment([5.0, 30.0], [55.0, 30.0], 2.0, 0.5)]).save_png(&png).unwrap();
    let cost = dir.path().join("cost.bin");
    let o = srgeo(&["cost", "--image", s(&png), "--grid", "41,41", "--window", "0.5,0.5", "--out", s(&cost)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!(v["min"].as_f64().unwrap() < 0.5 && v["floor"].as_f64().unwrap() > 0.0);
    let length = |cost_args: &[&str]| -> f64 {
        let dist = dir.path().join("d.bin");
        let mut args = vec!["fastmarch", "--grid", "41,41,41", "--window", "0.5,0.5", "--xi", "3", "--seed=-0.2,0,0", "--out", s(&dist)];
        args.extend_from_slice(cost_args);
        let o = srgeo(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let o = srgeo(&["track", "--dist", s(&dist), "--end", "0.2,0,0", "--out", s(&dir.path().join("t.csv"))]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        stdout_json(&o)["W"].as_f64().unwrap()
    };
    // The tube makes the path cheaper than at unit cost.
    let (cheap, unit) = (length(&["--cost", s(&cost)]), length(&[]));
    assert!(cheap < 0.6 * unit, "{cheap} vs {unit}");
}

#[test]
fn compare_trivial_and_short_segment() {
    let dir = tempfile::tempdir().unwrap();
    let o = srgeo(&["compare", "--v0", "0.1,0.1,0.3", "--v1", "0.1,0.1,0.3", "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["trivial"], true);

    let o = srgeo(&["compare", "--v0=-0.15,0,0", "--v1", "0.15,0,0", "--grid", "51,51,41", "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["trivial"], false);
    assert!(r["hausdorff"].as_f64().unwrap() <= 2.0 * r["cell"].as_f64().unwrap(), "{r}");
    assert!(dir.path().join("se2.csv").exists() && dir.path().join("so3.csv").exists());
    assert_eq!(read_json(&dir.path().join("report.json.json"))["command"], "compare");
}

#[test]
fn out_of_view_endpoints_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = srgeo(&["compare", "--v0", "0,0,0", "--v1", "5,0,0", "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_reports_json_and_fails_on_mutation() {
    let o = srgeo(&["verify", "--only", "1,2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    let o = srgeo(&["verify", "--only", "4", "--ytilde-factor", "1.05"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["results"][0]["passed"], false);
}
