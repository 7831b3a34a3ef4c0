use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hawkes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hawkes"))
        .args(args)
        .output()
        .expect("run hawkes")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn out_path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

const ZERO_KERNEL: &str = r#"{"eta": 2.0, "kernel": {"family": "piecewise_constant", "delta": 1.0, "alphas": [0.0]}}"#;

#[test]
fn empty_csv_exits_with_validation_code() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "empty.csv", "time\n");
    assert_eq!(hawkes(&["fit", &data]).status.code(), Some(2));
    let headerless = write(&dir, "blank.csv", "");
    assert_eq!(hawkes(&["fit", &headerless]).status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_with_validation_code() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "bad.csv", "time\n1.0\n0.5\n");
    assert_eq!(hawkes(&["fit", &data]).status.code(), Some(2));
    let model = write(&dir, "bad.json", r#"{"eta": -1.0, "kernel": {"family": "omori", "K": 0.1, "c": 1, "p": 1}}"#);
    assert_eq!(hawkes(&["simulate", &model]).status.code(), Some(2));
    assert_eq!(hawkes(&["simulate", "/no/such/model.json"]).status.code(), Some(2));
}

#[test]
fn unstable_model_exits_3_and_reports_the_ratio() {
    let dir = TempDir::new().unwrap();
    let model = write(
        &dir,
        "unstable.json",
        r#"{"eta": 1.0, "kernel": {"family": "exponential", "alpha": 3.0, "beta": 2.0}}"#,
    );
    let out = hawkes(&["simulate", &model, "--horizon", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.5"));
}

#[test]
fn simulate_is_deterministic_and_writes_metadata() {
    let dir = TempDir::new().unwrap();
    let model = fixture("quakes.model.json");
    let (a, b) = (out_path(&dir, "a.csv"), out_path(&dir, "b.csv"));
    for out in [&a, &b] {
        assert_ok(&hawkes(&["simulate", &model, "--horizon", "50", "--seed", "9", "--out", out]));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let strip = |p: &str| {
        let mut v = json(PathBuf::from(p).with_extension("meta.json"));
        v.as_object_mut().unwrap().remove("wall_time_secs");
        v
    };
    assert_eq!(strip(&a), strip(&b));
    let meta = strip(&a);
    let rows = fs::read_to_string(&a).unwrap().lines().count() - 1;
    assert_eq!(meta["events"].as_u64().unwrap() as usize, rows);
    assert_eq!(meta["seed"], 9);
    assert!(fs::read_to_string(&a).unwrap().starts_with("time,parent\n"));
}

#[test]
fn every_method_runs_from_the_command_line() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"eta": 1.0, "kernel": {"family": "omori", "K": 0.2, "c": 0.5, "p": 1.0}}"#);
    for method in ["hazards", "thinning", "cluster"] {
        let out = hawkes(&["simulate", &model, "--method", method, "--horizon", "20", "--seed", "1"]);
        assert_ok(&out);
        let csv = String::from_utf8(out.stdout).unwrap();
        assert!(csv.starts_with("time"));
    }
    let gev = write(
        &dir,
        "gev.json",
        r#"{"eta": 1.0, "kernel": {"family": "gev_min", "mu": 2.0, "sigma": 1.0, "xi": 0.2, "kappa": 1.0}}"#,
    );
    assert_eq!(hawkes(&["simulate", &gev, "--method", "thinning"]).status.code(), Some(2));
    assert_ok(&hawkes(&["simulate", &gev, "--method", "thinning", "--bound", "5"]));
}

#[test]
fn zero_kernel_simulation_is_poisson() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "zero.json", ZERO_KERNEL);
    let out = hawkes(&["simulate", &model, "--horizon", "5000", "--seed", "4"]);
    assert_ok(&out);
    let n = String::from_utf8(out.stdout).unwrap().lines().count() - 1;
    // Poisson(10000): four standard deviations
    assert!((n as f64 - 10_000.0).abs() < 400.0, "{n} events");
}

#[test]
fn fixture_fit_recovers_the_generator_branching_ratio() {
    let dir = TempDir::new().unwrap();
    let fit = out_path(&dir, "fit.json");
    assert_ok(&hawkes(&["fit", &fixture("quakes.csv"), "--family", "omori", "--end", "168", "--out", &fit]));
    let fitted = json(&fit)["branching_ratio"].as_f64().unwrap();
    let generator = 0.082 / (0.141 * 0.145f64.powf(0.141));
    assert!((fitted - generator).abs() <= 0.1, "fitted {fitted} vs {generator}");

    // the fit output doubles as a model file
    let gof = out_path(&dir, "gof.json");
    assert_ok(&hawkes(&["gof", &fixture("quakes.csv"), &fit, "--end", "168", "--out", &gof]));
    assert!(json(&gof)["p_value"].as_f64().unwrap() > 0.01);
}

#[test]
fn gof_writes_a_qq_row_per_event() {
    let dir = TempDir::new().unwrap();
    let qq = out_path(&dir, "qq.csv");
    let out = hawkes(&["gof", &fixture("quakes.csv"), &fixture("quakes.model.json"), "--end", "168", "--qq-out", &qq]);
    assert_ok(&out);
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let events = fs::read_to_string(fixture("quakes.csv")).unwrap().lines().count() - 1;
    let text = fs::read_to_string(&qq).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theoretical,empirical"));
    assert!(lines.all(|l| l.split(',').count() == 2));
    assert_eq!(text.lines().count(), events + 1);
    assert!(result["p_value"].as_f64().unwrap() > 0.01);
}

#[test]
fn poisson_model_is_rejected_on_clustered_data() {
    let dir = TempDir::new().unwrap();
    let generator = write(
        &dir,
        "clustered.json",
        r#"{"eta": 1.0, "kernel": {"family": "exponential", "alpha": 1.8, "beta": 2.0}}"#,
    );
    let data = out_path(&dir, "clustered.csv");
    assert_ok(&hawkes(&["simulate", &generator, "--horizon", "500", "--seed", "31", "--out", &data]));
    let events = fs::read_to_string(&data).unwrap().lines().count() - 1;
    let rate = events as f64 / 500.0;
    let model = write(
        &dir,
        "poisson.json",
        &format!(r#"{{"eta": {rate}, "kernel": {{"family": "piecewise_constant", "delta": 1.0, "alphas": [0.0]}}}}"#),
    );
    let p = |model: &str| {
        let out = hawkes(&["gof", &data, model, "--end", "500"]);
        assert_ok(&out);
        let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        result["p_value"].as_f64().unwrap()
    };
    assert!(p(&model) < 0.01);
    assert!(p(&generator) > 0.01);
}

#[test]
fn zero_kernel_forecast_is_all_background() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "zero.json", ZERO_KERNEL);
    let out = hawkes(&["forecast", &fixture("quakes.csv"), &model, "--paths", "500", "--seed", "2"]);
    assert_ok(&out);
    let s: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["mean_background_fraction"], 1.0);
    assert_eq!(s["pooled_background_fraction"], 1.0);
    assert_eq!(s["paths"], 500);
    let mean = s["mean_count"].as_f64().unwrap();
    assert!((mean - 48.0).abs() < 4.0 * (48.0f64 / 500.0).sqrt(), "mean count {mean}");
}

#[test]
fn forecast_is_deterministic_and_handles_one_path() {
    let model = fixture("quakes.model.json");
    let data = fixture("quakes.csv");
    let run = |paths: &str| {
        let out = hawkes(&["forecast", &data, &model, "--paths", paths, "--seed", "5", "--horizon", "6"]);
        assert_ok(&out);
        out.stdout
    };
    assert_eq!(run("200"), run("200"));
    let one: serde_json::Value = serde_json::from_slice(&run("1")).unwrap();
    assert_eq!(one["paths"], 1);
    let hist = one["count_histogram"].as_array().unwrap();
    assert_eq!(hist.len(), 1);
    assert_eq!(hist[0]["paths"], 1);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "hawkes.toml", "seed = 11\nhorizon = 30.0\n");
    let model = fixture("quakes.model.json");
    let sim = |extra: &[&str]| {
        let mut args = vec!["simulate", model.as_str()];
        args.extend_from_slice(extra);
        let out = hawkes(&args);
        assert_ok(&out);
        out.stdout
    };
    let from_config = sim(&["--config", &config]);
    assert_eq!(from_config, sim(&["--seed", "11", "--horizon", "30"]));
    assert_eq!(sim(&["--config", &config, "--seed", "12"]), sim(&["--seed", "12", "--horizon", "30"]));
    assert_ne!(from_config, sim(&["--config", &config, "--seed", "12"]));

    let bad = write(&dir, "bad.toml", "sede = 1\n");
    assert_eq!(hawkes(&["--config", &bad, "simulate", &model]).status.code(), Some(2));
}

#[test]
fn bench_writes_a_reproducible_report() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (out_path(&dir, "a.json"), out_path(&dir, "b.json"));
    let out = hawkes(&["bench", "--reps", "2", "--seed", "3", "--out", &a]);
    assert_ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("omori"));
    assert_ok(&hawkes(&["bench", "--reps", "2", "--seed", "3", "--parallel", "--out", &b]));
    let strip = |p: &str| {
        let mut v = json(p);
        for cell in v["cells"].as_array_mut().unwrap() {
            let cell = cell.as_object_mut().unwrap();
            cell.remove("runtime_per_point_us");
            for rep in cell["replications"].as_array_mut().unwrap() {
                rep.as_object_mut().unwrap().remove("wall_time_secs");
            }
        }
        v["cells"].take()
    };
    let cells = strip(&a);
    assert_eq!(cells.as_array().unwrap().len(), 27);
    assert_eq!(cells, strip(&b));
}
